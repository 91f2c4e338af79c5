"""Cross-validated F1 measurement, significance marks, rankings and sweeps."""
from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from vsc import kernels
from vsc.data import Dataset, FoldPlan, fit_scaler, stratified_folds
from vsc.errors import FoldError, ParameterError, ShapeError
from vsc.model import Pair, build_classifier, make_hyperplane
from vsc.stats import ALPHA, TTestResult, paired_t_test

SCALE_MODES = ("fold", "global", "none")
TIE_EPS = 0.001
MARK_WORSE = "▼"  # competitor significantly worse than the reference
MARK_BETTER = "△"  # competitor significantly better than the reference


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @classmethod
    def from_labels(cls, y_true, y_pred):
        t = np.asarray(y_true) == 1
        p = np.asarray(y_pred) == 1
        return cls(
            tp=int(np.sum(t & p)),
            fp=int(np.sum(~t & p)),
            fn=int(np.sum(t & ~p)),
            tn=int(np.sum(~t & ~p)),
        )

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def f1_score(c: ConfusionCounts) -> float:
    """F1 of the positive class; any 0/0 on the way gives 0."""
    if c.tp + c.fp == 0 or c.tp + c.fn == 0:
        return 0.0
    precision = c.tp / (c.tp + c.fp)
    recall = c.tp / (c.tp + c.fn)
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def dataset_id(ds: Dataset) -> str:
    """Source name plus a digest of the contents, for pairing results."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(ds.x).tobytes())
    h.update(np.ascontiguousarray(ds.y).tobytes())
    return f"{ds.source or 'data'}#{h.hexdigest()[:12]}"


def derive_seed(master_seed, index):
    """Deterministic 64-bit child seed for (master_seed, index)."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ClassifierSpec:
    model_id: str
    params: dict = field(default_factory=dict)

    def build(self, seed):
        return build_classifier(self.model_id, self.params, seed)


@dataclass(frozen=True)
class CvResult:
    fold_f1: tuple
    classifier_id: str
    dataset_id: str
    config: dict = field(default_factory=dict)
    seed: int = 0
    fold_seed: int | None = None
    scale_mode: str = "fold"

    @property
    def n_folds(self):
        return len(self.fold_f1)

    @property
    def mean_f1(self):
        return float(np.mean(self.fold_f1))

    @property
    def std_f1(self):
        # sample std over folds
        return float(np.std(self.fold_f1, ddof=1)) if len(self.fold_f1) > 1 else 0.0

    def pairing_key(self):
        return (self.dataset_id, self.fold_seed, self.n_folds)


def _scaled_splits(data, train, test, scale_mode, global_scaler):
    if scale_mode == "none":
        return data.x[train], data.x[test]
    scaler = global_scaler if scale_mode == "global" else fit_scaler(data.x[train])
    return scaler.transform(data.x[train]), scaler.transform(data.x[test])


def _check_plan(folds: FoldPlan, n):
    if folds.assignments.shape != (n,):
        raise ShapeError("fold plan does not match the dataset size")
    seen = np.zeros(n, dtype=np.int64)
    for train, test in folds.splits():
        if np.intersect1d(train, test).size:
            raise AssertionError("train and test indices overlap")
        seen[test] += 1
    if not np.all(seen == 1):
        raise AssertionError("test folds do not partition the samples")


def run_cv(data: Dataset, spec: ClassifierSpec, folds: FoldPlan, scale_mode="fold",
           seed=0, jobs=1) -> CvResult:
    """F1 on each held-out fold.

    The fold-``i`` model is seeded with ``derive_seed(seed, i)``; with
    ``jobs > 1`` folds run on a thread pool and are merged by index.
    """
    if scale_mode not in SCALE_MODES:
        raise ParameterError(f"scale_mode must be one of {SCALE_MODES}")
    _check_plan(folds, data.n_samples)
    global_scaler = fit_scaler(data.x) if scale_mode == "global" else None

    def one_fold(f):
        train, test = folds.train_indices(f), folds.test_indices(f)
        try:
            x_train, x_test = _scaled_splits(data, train, test, scale_mode, global_scaler)
            clf = spec.build(derive_seed(seed, f)).fit(x_train, data.y[train])
            pred = clf.predict(x_test)
        except Exception as exc:
            raise FoldError(f, exc) from exc
        return f1_score(ConfusionCounts.from_labels(data.y[test], pred))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(one_fold, range(folds.n_folds)))
    else:
        scores = [one_fold(f) for f in range(folds.n_folds)]
    return CvResult(
        fold_f1=tuple(scores),
        classifier_id=spec.model_id,
        dataset_id=dataset_id(data),
        config=dict(spec.params),
        seed=seed,
        fold_seed=folds.seed,
        scale_mode=scale_mode,
    )


# -- comparison --------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Pairwise outcomes; ``direction[i, j]`` is sign(mean_i - mean_j)."""

    ids: tuple
    means: np.ndarray
    direction: np.ndarray
    tests: tuple  # tests[i][j] is paired_t_test(fold_f1_i, fold_f1_j)

    @property
    def significant(self):
        return np.array([[t.significant for t in row] for row in self.tests])

    def mark(self, reference, other):
        """Mark for ``other`` relative to ``reference`` ('' when not significant)."""
        i, j = self.ids.index(reference), self.ids.index(other)
        if i == j or not self.tests[i][j].significant:
            return ""
        return MARK_WORSE if self.direction[i, j] > 0 else MARK_BETTER


def compare(results, alpha=ALPHA) -> Comparison:
    """Paired t-tests between every two results over their shared folds."""
    results = list(results)
    if len(results) < 2:
        raise ParameterError("compare needs at least two results")
    keys = {r.pairing_key() for r in results}
    if len(keys) != 1:
        raise ParameterError(
            "results do not share dataset, fold seed and fold count; pairing impossible"
        )
    ids = tuple(_unique_ids(results))
    means = np.array([r.mean_f1 for r in results])
    m = len(results)
    direction = np.sign(means[:, None] - means[None, :]).astype(np.int64)
    tests = tuple(
        tuple(
            paired_t_test(results[i].fold_f1, results[j].fold_f1, alpha)
            if i != j
            else TTestResult(0.0, results[i].n_folds - 1, 1.0, alpha)
            for j in range(m)
        )
        for i in range(m)
    )
    return Comparison(ids=ids, means=means, direction=direction, tests=tests)


def _unique_ids(results):
    seen = {}
    for r in results:
        name = r.classifier_id
        if name in seen:
            seen[name] += 1
            name = f"{name}#{seen[r.classifier_id]}"
        else:
            seen[name] = 1
        yield name


def rankings(mean_f1_by_classifier, tie_eps=TIE_EPS):
    """Competition ranks, best first.

    Walking down the sorted scores, an entry within ``tie_eps`` of the one
    before it shares that entry's rank (so ties chain); the next distinct
    entry's rank skips past all tied ones.
    """
    items = sorted(mean_f1_by_classifier.items(), key=lambda kv: -kv[1])
    ranks = {}
    prev_value = prev_rank = None
    for pos, (name, value) in enumerate(items, 1):
        if prev_value is not None and prev_value - value < tie_eps:
            rank = prev_rank
        else:
            rank = pos
        ranks[name] = rank
        prev_value, prev_rank = value, rank
    return ranks


# -- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class SweepGrid:
    entries: dict  # (k, lam) -> CvResult
    reference_key: tuple
    reference: CvResult

    def normalized(self):
        ref = self.reference.mean_f1
        return {key: r.mean_f1 / ref for key, r in self.entries.items()}

    def normalized_against(self, baseline):
        """Divide each entry by a baseline mean F1.

        ``baseline`` is a float, or a mapping from ``k`` to a mean F1 (a
        baseline run per feature count).
        """
        out = {}
        for (k, lam), r in self.entries.items():
            ref = baseline.get(k) if isinstance(baseline, dict) else float(baseline)
            out[(k, lam)] = None if ref is None else r.mean_f1 / ref
        return out


def sweep(data: Dataset, k_list, lambda_list, variant, folds: FoldPlan,
          reference_key=(100, 1.0), seed=0, scale_mode="fold", epsilon=0.01,
          jobs=1) -> SweepGrid:
    """run_cv at every (k, lambda) of the grid on one shared fold plan."""
    keys = [(int(k), float(lam)) for k in k_list for lam in lambda_list]
    if len(set(keys)) != len(keys):
        raise ParameterError("duplicate grid points")
    reference_key = (int(reference_key[0]), float(reference_key[1]))
    todo = keys if reference_key in keys else keys + [reference_key]

    def one(key):
        k, lam = key
        spec = ClassifierSpec(variant, {"k": k, "lam": lam, "epsilon": epsilon})
        return run_cv(data, spec, folds, scale_mode=scale_mode, seed=seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = dict(zip(todo, pool.map(one, todo)))
    else:
        done = {key: one(key) for key in todo}
    return SweepGrid(
        entries={key: done[key] for key in keys},
        reference_key=reference_key,
        reference=done[reference_key],
    )


# -- confidence heat map -----------------------------------------------------


def lattice(lo, hi, n):
    """``n`` evenly spaced points from lo to hi; the midpoint is exact for odd n."""
    if n < 2:
        raise ParameterError("resolution must be >= 2")
    i = np.arange(n, dtype=np.float64)
    return lo + (hi - lo) * i / (n - 1)


def confidence_grid(pair: Pair, x_range=(-10.0, 10.0), y_range=(-10.0, 10.0),
                    resolution=201, epsilon=0.01):
    """Confidence of ``pair``'s hyperplane on a regular 2-D lattice.

    Returns ``(xs, ys, grid)`` with ``grid[r, c]`` the value at
    ``(xs[c], ys[r])``, i.e. one row per y slice.
    """
    if pair.dim != 2:
        raise ShapeError("confidence_grid needs a 2-D pair")
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    xs = lattice(float(x_range[0]), float(x_range[1]), int(nx))
    ys = lattice(float(y_range[0]), float(y_range[1]), int(ny))
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    h = make_hyperplane(pair)
    halves = ((pair.x_plus - pair.x_minus) / 2.0)[None, :]
    grid = kernels.confidence_matrix(pts, h.center[None, :], halves, float(epsilon))
    return xs, ys, grid.reshape(len(ys), len(xs))


def make_folds(data: Dataset, n_folds, fold_seed) -> FoldPlan:
    return stratified_folds(data.y, n_folds, int(fold_seed))
