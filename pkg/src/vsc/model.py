"""The Very Simple Classifier and the baselines it is benchmarked against.

A VSC model draws ``k`` (positive, negative) training pairs, turns each pair
into the max-margin hyperplane between its two points, and maps a sample
``x`` to the features

    f_j(x) = tanh(<n_j, x> - b_j) * C_j(x)

where ``C_j`` is a sigmoid confidence that is high near either pair endpoint
and exactly 1/2 at the pair midpoint.  A ridge readout with a leading bias
column is fitted on top of the features.

Two ablations share the code path: ``confidence_enabled=False`` replaces
``C_j`` with 1, and ``pair_mode=PairMode.UNIFORM_BOX`` draws both pair points
uniformly in the bounding box of the training data, ignoring labels.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from vsc import kernels
from vsc.errors import (
    ClassMissingError,
    DegeneracyError,
    ParameterError,
    ShapeError,
)
from vsc.linalg import ridge_solve

DEGENERACY_TOL = 1e-9
MAX_PAIR_ATTEMPTS = 100
SEED_LIMIT = 2**64


class PairMode(str, enum.Enum):
    FROM_DATA = "data"
    UNIFORM_BOX = "uniform"


@dataclass(frozen=True)
class Pair:
    x_plus: np.ndarray
    x_minus: np.ndarray

    def __post_init__(self):
        xp = np.asarray(self.x_plus, dtype=np.float64).ravel()
        xm = np.asarray(self.x_minus, dtype=np.float64).ravel()
        if xp.shape != xm.shape:
            raise ShapeError(f"pair endpoints differ in dimension: {xp.size} vs {xm.size}")
        object.__setattr__(self, "x_plus", xp)
        object.__setattr__(self, "x_minus", xm)

    @property
    def dim(self):
        return self.x_plus.size


@dataclass(frozen=True)
class Hyperplane:
    """Max-margin separator of one pair, with a unit normal.

    ``signed_value(x_plus) == +half_dist`` and ``signed_value(x_minus) ==
    -half_dist`` up to rounding.
    """

    normal: np.ndarray
    bias: float
    center: np.ndarray
    half_dist: float
    pair: Pair

    @property
    def dim(self):
        return self.normal.size

    def signed_value(self, x):
        return np.asarray(x, dtype=np.float64) @ self.normal - self.bias


def make_hyperplane(pair: Pair) -> Hyperplane:
    v = pair.x_plus - pair.x_minus
    norm = float(np.linalg.norm(v))
    if not norm > DEGENERACY_TOL:
        raise DegeneracyError(f"pair endpoints coincide (distance {norm:.3g})")
    normal = v / norm
    center = (pair.x_plus + pair.x_minus) / 2.0
    return Hyperplane(
        normal=normal,
        bias=float(normal @ center),
        center=center,
        half_dist=norm / 2.0,
        pair=pair,
    )


def _stack(hyperplanes):
    centers = np.array([h.center for h in hyperplanes], dtype=np.float64)
    normals = np.array([h.normal for h in hyperplanes], dtype=np.float64)
    halves = np.array(
        [(h.pair.x_plus - h.pair.x_minus) / 2.0 for h in hyperplanes], dtype=np.float64
    )
    return centers, normals, halves


def _points(x, dim):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.ndim != 2 or X.shape[1] != dim:
        raise ShapeError(f"expected points of dimension {dim}, got shape {x.shape}")
    return X, single


def confidence(h: Hyperplane, x, epsilon=0.01):
    """Confidence of ``h`` at ``x`` (a point, or rows of points).

    sigma(d/(|x+ - x|^2 + eps) + d/(|x- - x|^2 + eps) - 2d/(d^2 + eps)),
    with eps added to every denominator.
    """
    X, single = _points(x, h.dim)
    centers, _, halves = _stack([h])
    c = kernels.confidence_matrix(X, centers, halves, float(epsilon))[:, 0]
    return float(c[0]) if single else c


# -- pair sampling -----------------------------------------------------------


def _class_indices(y):
    y = np.asarray(y)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == -1)
    if pos.size == 0 or neg.size == 0:
        missing = "+1" if pos.size == 0 else "-1"
        raise ClassMissingError(f"no samples with label {missing}")
    return pos, neg


def _redraw_degenerate(P, M, draw):
    """Replace coincident rows of (P, M) by fresh draws from ``draw()``."""
    for j in range(P.shape[0]):
        for _ in range(MAX_PAIR_ATTEMPTS):
            if np.linalg.norm(P[j] - M[j]) > DEGENERACY_TOL:
                break
            P[j], M[j] = draw()
        else:
            raise DegeneracyError(
                f"{MAX_PAIR_ATTEMPTS} consecutive degenerate pair draws"
            )
    return [Pair(p, m) for p, m in zip(P, M)]


def sample_pairs(data, k, rng):
    """Draw ``k`` opposite-class training pairs, uniformly with replacement."""
    X = np.asarray(data.x, dtype=np.float64)
    pos, neg = _class_indices(data.y)
    ip = pos[rng.integers(pos.size, size=k)]
    im = neg[rng.integers(neg.size, size=k)]

    def draw():
        return X[pos[rng.integers(pos.size)]], X[neg[rng.integers(neg.size)]]

    return _redraw_degenerate(X[ip].copy(), X[im].copy(), draw)


def sample_pairs_uniform(ranges, k, rng):
    """Draw ``k`` pairs of points uniformly in the box given by ``ranges``.

    ``ranges`` is a sequence of per-feature ``(min, max)``.  Labels play no
    part; the first point of each pair takes the positive role.
    """
    ranges = np.asarray(ranges, dtype=np.float64).reshape(-1, 2)
    lo, hi = ranges[:, 0], ranges[:, 1]
    if np.any(hi < lo):
        raise ParameterError("every range needs max >= min")
    n = lo.size
    P = rng.uniform(lo, hi, size=(k, n))
    M = rng.uniform(lo, hi, size=(k, n))

    def draw():
        return rng.uniform(lo, hi), rng.uniform(lo, hi)

    return _redraw_degenerate(P, M, draw)


# -- VSC ---------------------------------------------------------------------


@dataclass(frozen=True)
class VscConfig:
    k: int = 100
    lam: float = 1.0
    epsilon: float = 0.01
    confidence_enabled: bool = True
    pair_mode: PairMode = PairMode.FROM_DATA
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "pair_mode", PairMode(self.pair_mode))


@dataclass(frozen=True)
class VscModel:
    hyperplanes: tuple
    weights: np.ndarray
    config: VscConfig
    dim: int
    _arrays: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.hyperplanes) != self.config.k:
            raise ShapeError("number of hyperplanes differs from config.k")
        if self.weights.shape != (self.config.k + 1,):
            raise ShapeError("weights must have length k + 1")
        if any(h.dim != self.dim for h in self.hyperplanes):
            raise ShapeError("hyperplane dimensions differ from model dim")
        object.__setattr__(self, "_arrays", _stack(self.hyperplanes))

    def features(self, x):
        X, _ = _points(x, self.dim)
        centers, normals, halves = self._arrays
        return kernels.feature_matrix(
            X, centers, normals, halves, self.config.epsilon, self.config.confidence_enabled
        )

    def decision_function(self, x):
        scores = self.features(x) @ self.weights
        return float(scores[0]) if np.ndim(x) == 1 else scores

    def predict(self, x):
        scores = np.atleast_1d(self.decision_function(x))
        labels = np.where(scores >= 0.0, 1, -1)
        return int(labels[0]) if np.ndim(x) == 1 else labels


def feature_map(hyperplanes, x, cfg: VscConfig):
    """Feature vector ``(1, f_1(x), ..., f_k(x))``; rows for a 2-D ``x``."""
    dim = hyperplanes[0].dim
    X, single = _points(x, dim)
    centers, normals, halves = _stack(hyperplanes)
    F = kernels.feature_matrix(
        X, centers, normals, halves, cfg.epsilon, cfg.confidence_enabled
    )
    return F[0] if single else F


def feature_ranges(X):
    X = np.asarray(X, dtype=np.float64)
    return np.column_stack([X.min(axis=0), X.max(axis=0)])


def fit_vsc(data, cfg: VscConfig) -> VscModel:
    X = np.asarray(data.x, dtype=np.float64)
    y = np.asarray(data.y, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ShapeError("training data needs at least one feature")
    if X.shape[0] < 2:
        raise ParameterError("training data needs at least two samples")
    rng = np.random.default_rng(cfg.seed)
    if cfg.pair_mode is PairMode.FROM_DATA:
        pairs = sample_pairs(data, cfg.k, rng)
    else:
        pairs = sample_pairs_uniform(feature_ranges(X), cfg.k, rng)
    hyperplanes = tuple(make_hyperplane(p) for p in pairs)
    centers, normals, halves = _stack(hyperplanes)
    F = kernels.feature_matrix(
        X, centers, normals, halves, cfg.epsilon, cfg.confidence_enabled
    )
    weights = ridge_solve(F, y, cfg.lam)
    return VscModel(hyperplanes=hyperplanes, weights=weights, config=cfg, dim=X.shape[1])


def decision_value(m: VscModel, x):
    return m.decision_function(x)


def predict_vsc(m: VscModel, x):
    """Label(s) in {-1, +1}; a zero score maps to +1."""
    return m.predict(x)


# -- classifier surface ------------------------------------------------------


class Classifier(Protocol):
    def fit(self, X, y) -> "Classifier": ...

    def predict(self, X) -> np.ndarray: ...


class _Labelled:
    """Minimal (x, y) holder so the fit_* functions accept raw arrays."""

    def __init__(self, x, y):
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y)


class VSC:
    """Estimator wrapper around :func:`fit_vsc`."""

    def __init__(self, config: VscConfig | None = None, **params):
        self.config = config if config is not None else VscConfig(**params)
        self.model_ = None

    def fit(self, X, y):
        self.model_ = fit_vsc(_Labelled(X, y), self.config)
        return self

    def decision_function(self, X):
        return self.model_.decision_function(np.atleast_2d(X))

    def predict(self, X):
        return self.model_.predict(np.atleast_2d(X))


class ELM:
    """Extreme-learning-machine baseline: random tanh layer + ridge readout.

    Input weights (bias included) are drawn uniformly in [-1, 1].
    """

    def __init__(self, hidden=100, lam=1.0, seed=0):
        if hidden < 0:
            raise ParameterError("hidden must be >= 0")
        self.hidden = int(hidden)
        self.lam = float(lam)
        self.seed = seed

    def _hidden(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        ones = np.ones((X.shape[0], 1))
        H = np.tanh(np.hstack([ones, X]) @ self.input_weights_.T)
        return np.hstack([ones, H])

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] < 2:
            raise ParameterError("training data needs at least two samples")
        rng = np.random.default_rng(self.seed)
        self.input_weights_ = rng.uniform(-1.0, 1.0, size=(self.hidden, X.shape[1] + 1))
        self.weights_ = ridge_solve(self._hidden(X), np.asarray(y, dtype=np.float64), self.lam)
        return self

    def decision_function(self, X):
        return self._hidden(X) @ self.weights_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, 1, -1)


class KNN:
    """k-nearest-neighbour majority vote.

    Equal distances go to the lower training index; a tied vote gives +1.
    """

    def __init__(self, k_neighbors=5):
        if k_neighbors < 1:
            raise ParameterError("k_neighbors must be >= 1")
        self.k_neighbors = int(k_neighbors)

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if self.k_neighbors > X.shape[0]:
            raise ParameterError(
                f"k_neighbors={self.k_neighbors} exceeds {X.shape[0]} training samples"
            )
        self.X_ = X
        self.y_ = np.asarray(y, dtype=np.int64)
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty(X.shape[0], dtype=np.int64)
        step = max(1, (1 << 20) // max(1, self.X_.size))
        for start in range(0, X.shape[0], step):
            Q = X[start : start + step]
            D = ((Q[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=-1)
            nearest = np.argsort(D, axis=1, kind="stable")[:, : self.k_neighbors]
            votes = self.y_[nearest].sum(axis=1)
            out[start : start + step] = np.where(votes >= 0, 1, -1)
        return out


class Constant:
    """Predicts one fixed label; handy as a floor in comparisons."""

    def __init__(self, label=1):
        self.label = 1 if label >= 0 else -1

    def fit(self, X, y):
        return self

    def predict(self, X):
        return np.full(np.atleast_2d(X).shape[0], self.label, dtype=np.int64)


def fit_elm(data, hidden, lam, rng):
    """``rng`` is a numpy Generator (one seed is drawn from it) or an int seed."""
    if isinstance(rng, np.random.Generator):
        seed = int(rng.integers(2**63))
    else:
        seed = int(rng)
    return ELM(hidden=hidden, lam=lam, seed=seed).fit(data.x, data.y)


def fit_knn(data, k_neighbors):
    return KNN(k_neighbors).fit(data.x, data.y)


MODEL_IDS = ("vsc", "vsc-noconf", "vsc-uniform", "elm", "knn", "constant")


def build_classifier(model_id, params, seed):
    """Instantiate an unfitted classifier from its id and parameters.

    ``params`` keys: ``k``, ``lam``, ``epsilon`` (VSC variants), ``hidden``,
    ``lam`` (elm), ``neighbors`` (knn), ``label`` (constant).
    """
    if model_id.startswith("vsc"):
        variant = {
            "vsc": {},
            "vsc-noconf": {"confidence_enabled": False},
            "vsc-uniform": {"pair_mode": PairMode.UNIFORM_BOX},
        }
        if model_id not in variant:
            raise ParameterError(f"unknown model {model_id!r}")
        return VSC(
            k=params.get("k", 100),
            lam=params.get("lam", 1.0),
            epsilon=params.get("epsilon", 0.01),
            seed=seed,
            **variant[model_id],
        )
    if model_id == "elm":
        return ELM(hidden=params.get("hidden", 100), lam=params.get("lam", 1.0), seed=seed)
    if model_id == "knn":
        return KNN(params.get("neighbors", 5))
    if model_id == "constant":
        return Constant(params.get("label", 1))
    raise ParameterError(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}")
