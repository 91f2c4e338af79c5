"""Datasets: Keel/CSV ingestion, standard scaling, stratified folds, generators."""
from __future__ import annotations

import csv
import io
import logging
import os
import re
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from vsc.errors import ParameterError, ParseError, ShapeError, UnsupportedFeatureError

log = logging.getLogger(__name__)

CONSTANT_STD = 1e-12


def as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    feature_names: tuple = ()
    positive_class_name: str = "1"
    negative_class_name: str = "-1"
    label_name: str = "label"
    source: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64).ravel()
        if x.ndim != 2:
            raise ShapeError(f"x must be 2-D, got shape {x.shape}")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"x has {x.shape[0]} rows but y has {y.shape[0]} labels")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be -1 or +1")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise ShapeError("feature_names length differs from number of columns")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self):
        return self.x.shape[0]

    @property
    def n_features(self):
        return self.x.shape[1]

    def class_counts(self):
        return int(np.sum(self.y == 1)), int(np.sum(self.y == -1))

    def subset(self, idx):
        return replace(self, x=self.x[idx], y=self.y[idx])

    def with_x(self, x):
        return replace(self, x=x)


# -- Keel --------------------------------------------------------------------

_ATTR_RE = re.compile(r"@attribute\s+('[^']*'|\"[^\"]*\"|[^\s{\[]+)\s*(.*)$", re.I)
_NUMERIC_TYPES = {"real", "integer", "numeric"}
_MISSING = {"?", "<null>", ""}


def _split_names(text):
    return [t.strip().strip("'\"") for t in text.split(",") if t.strip()]


def _decode(text):
    if isinstance(text, (bytes, bytearray)):
        return text.decode("utf-8")
    if hasattr(text, "read"):
        return _decode(text.read())
    return text


def parse_keel(text, positive_class=None, source="keel") -> Dataset:
    """Parse a Keel ``.dat`` document.

    Input attributes must be numeric (``real``/``integer``); the single output
    attribute is mapped to +1 for ``positive_class`` (default: its first
    declared value) and -1 otherwise.  Rows with missing values are rejected.
    """
    attrs = []  # (name, kind, values)
    inputs = outputs = None
    lines = _decode(text).splitlines()
    data_start = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            if not m or not m.group(2):
                raise ParseError("malformed @attribute declaration", line=lineno)
            name, rest = m.group(1).strip("'\""), m.group(2).strip()
            if rest.startswith("{"):
                if not rest.endswith("}"):
                    raise ParseError("unterminated nominal value list", line=lineno)
                attrs.append((name, "nominal", _split_names(rest[1:-1]), lineno))
            else:
                kind = rest.split()[0].split("[")[0].lower()
                if kind not in _NUMERIC_TYPES:
                    raise ParseError(f"unknown attribute type {kind!r}", line=lineno)
                attrs.append((name, "numeric", None, lineno))
        elif low.startswith("@input"):
            inputs = _split_names(line.split(None, 1)[1] if " " in line else "")
        elif low.startswith("@output"):
            outputs = _split_names(line.split(None, 1)[1] if " " in line else "")
        elif low.startswith("@data"):
            data_start = lineno
            break
        else:
            raise ParseError(f"unexpected header line {line[:40]!r}", line=lineno)
    if data_start is None:
        raise ParseError("missing @data section")
    if not attrs:
        raise ParseError("no @attribute declarations")

    names = [a[0] for a in attrs]
    if outputs is None:
        outputs = [names[-1]]
    if inputs is None:
        inputs = [n for n in names if n not in outputs]
    if len(outputs) != 1:
        raise ParseError(f"expected exactly one output attribute, got {len(outputs)}")
    for n in list(inputs) + outputs:
        if n not in names:
            raise ParseError(f"@inputs/@outputs names undeclared attribute {n!r}")
    by_name = {a[0]: a for a in attrs}
    for n in inputs:
        if by_name[n][1] != "numeric":
            raise UnsupportedFeatureError(
                f"categorical input attribute {n!r} is not supported", line=by_name[n][3]
            )
    input_pos = [names.index(n) for n in names if n in inputs]
    feature_names = [names[i] for i in input_pos]
    out_name = outputs[0]
    out_pos = names.index(out_name)
    declared = by_name[out_name][2] or []

    rows, labels = [], []
    for lineno in range(data_start + 1, len(lines) + 1):
        line = lines[lineno - 1].strip()
        if not line or line.startswith("%"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} values, got {len(cells)}", line=lineno)
        row = []
        for i in input_pos:
            cell = cells[i]
            if cell in _MISSING:
                raise ParseError("missing value", line=lineno, column=names[i])
            try:
                row.append(float(cell))
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", line=lineno, column=names[i]) from None
        if cells[out_pos] in _MISSING:
            raise ParseError("missing class label", line=lineno, column=out_name)
        rows.append(row)
        labels.append(cells[out_pos])

    classes = list(declared) or list(dict.fromkeys(labels))
    if positive_class is None:
        if not classes:
            raise ParseError("cannot infer positive class from an empty file")
        positive_class = classes[0]
    others = [c for c in classes if c != positive_class]
    negative = others[0] if len(others) == 1 else "rest"
    x = np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_names))
    y = np.where(np.array(labels, dtype=object) == positive_class, 1, -1)
    return Dataset(
        x=x,
        y=y,
        feature_names=tuple(feature_names),
        positive_class_name=str(positive_class),
        negative_class_name=negative,
        label_name=out_name,
        source=source,
    )


# -- CSV ---------------------------------------------------------------------


def parse_csv(text, label_column="label", positive_label="1", source="csv") -> Dataset:
    """Parse a header-first CSV; ``label_column`` values equal to
    ``positive_label`` become +1, all others -1."""
    reader = csv.reader(io.StringIO(_decode(text)))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV: header row required") from None
    header = [h.strip() for h in header]
    if label_column not in header:
        raise ParseError(f"label column {label_column!r} not in header", line=1)
    li = header.index(label_column)
    feat_idx = [i for i in range(len(header)) if i != li]
    rows, labels = [], []
    for lineno, cells in enumerate(reader, 2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, got {len(cells)}", line=lineno)
        row = []
        for i in feat_idx:
            try:
                row.append(float(cells[i]))
            except ValueError:
                raise ParseError(
                    f"non-numeric value {cells[i]!r}", line=lineno, column=header[i]
                ) from None
        rows.append(row)
        labels.append(cells[li].strip())
    negatives = sorted({lab for lab in labels if lab != positive_label})
    x = np.array(rows, dtype=np.float64).reshape(len(rows), len(feat_idx))
    y = np.array([1 if lab == positive_label else -1 for lab in labels], dtype=np.int64)
    return Dataset(
        x=x,
        y=y,
        feature_names=tuple(header[i] for i in feat_idx),
        positive_class_name=positive_label,
        negative_class_name=negatives[0] if len(negatives) == 1 else "rest",
        label_name=label_column,
        source=source,
    )


def format_csv(ds: Dataset) -> str:
    """CSV text with features first and the label column last.

    Values use 17 significant digits, so parsing gives back identical doubles.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(ds.feature_names) + [ds.label_name])
    pos, neg = ds.positive_class_name, ds.negative_class_name
    for row, label in zip(ds.x, ds.y):
        writer.writerow([format(v, ".17g") for v in row] + [pos if label == 1 else neg])
    return buf.getvalue()


def atomic_write_text(path, text):
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_csv(ds: Dataset, path):
    atomic_write_text(path, format_csv(ds))


def load_dataset(path, label_column="label", positive_label=None) -> Dataset:
    """Read a ``.dat`` (Keel) or CSV file, choosing the parser by extension."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".dat":
        return parse_keel(text, positive_class=positive_label, source=path.name)
    return parse_csv(
        text,
        label_column=label_column,
        positive_label="1" if positive_label is None else positive_label,
        source=path.name,
    )


# -- scaling -----------------------------------------------------------------


@dataclass(frozen=True)
class Scaler:
    means: np.ndarray
    scales: np.ndarray

    def transform(self, x):
        return (np.asarray(x, dtype=np.float64) - self.means) / self.scales

    def inverse_transform(self, z):
        return np.asarray(z, dtype=np.float64) * self.scales + self.means


def fit_scaler(x) -> Scaler:
    """Column means and population standard deviations (std < 1e-12 -> 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ShapeError("fit_scaler needs a 2-D array with at least one row")
    means = x.mean(axis=0)
    std = x.std(axis=0)
    scales = np.where(std < CONSTANT_STD, 1.0, std)
    return Scaler(means=means, scales=scales)


def transform(s: Scaler, x):
    return s.transform(x)


# -- folds -------------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    assignments: np.ndarray
    degraded: bool = False
    seed: int | None = field(default=None, compare=False)

    def test_indices(self, fold):
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for f in range(self.n_folds):
            yield self.train_indices(f), self.test_indices(f)


def stratified_folds(y, n_folds, rng) -> FoldPlan:
    """Shuffle each class, then deal its samples round-robin over the folds.

    The dealing position carries over from one class to the next so overall
    fold sizes stay within one of each other.  ``degraded`` is set when some
    class has fewer members than folds.
    """
    y = np.asarray(y).ravel()
    n_folds = int(n_folds)
    if n_folds < 2:
        raise ParameterError("n_folds must be >= 2")
    if n_folds > y.size:
        raise ParameterError(f"n_folds={n_folds} exceeds {y.size} samples")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = as_rng(rng)
    assignments = np.empty(y.size, dtype=np.int64)
    offset = 0
    degraded = False
    for label in (1, -1):
        members = np.flatnonzero(y == label)
        if 0 < members.size < n_folds:
            degraded = True
        members = rng.permutation(members)
        assignments[members] = (offset + np.arange(members.size)) % n_folds
        offset = (offset + members.size) % n_folds
    if degraded:
        log.warning("a class has fewer than %d members; folds are not fully stratified", n_folds)
    return FoldPlan(n_folds=n_folds, assignments=assignments, degraded=degraded, seed=seed)


# -- synthetic generators ----------------------------------------------------


def _balanced_labels(n, rng):
    y = np.array([1] * ((n + 1) // 2) + [-1] * (n // 2), dtype=np.int64)
    return rng.permutation(y)


def gen_twonorm(n_samples, dim=20, rng=0) -> Dataset:
    """Two unit-covariance Gaussians centred at +(a,..,a) and -(a,..,a), a = 2/sqrt(dim)."""
    rng = as_rng(rng)
    a = 2.0 / np.sqrt(dim)
    y = _balanced_labels(n_samples, rng)
    x = rng.standard_normal((n_samples, dim)) + a * y[:, None]
    return Dataset(x=x, y=y, source=f"twonorm(n={n_samples},dim={dim})")


def gen_ringnorm(n_samples, dim=20, rng=0) -> Dataset:
    """Class +1 ~ N(0, 4I); class -1 ~ N((a,..,a), I), a = 2/sqrt(dim)."""
    rng = as_rng(rng)
    a = 2.0 / np.sqrt(dim)
    y = _balanced_labels(n_samples, rng)
    z = rng.standard_normal((n_samples, dim))
    x = np.where(y[:, None] == 1, 2.0 * z, z + a)
    return Dataset(x=x, y=y, source=f"ringnorm(n={n_samples},dim={dim})")


_XOR_BLOBS = ((1.0, 1.0, 1), (1.0, -1.0, -1), (-1.0, -1.0, 1), (-1.0, 1.0, -1))


def gen_xor_blobs(n_samples, noise=0.2, rng=0) -> Dataset:
    """Four isotropic Gaussian blobs at (+-1, +-1) with XOR labels."""
    if not noise > 0:
        raise ParameterError("noise must be positive")
    rng = as_rng(rng)
    counts = [n_samples // 4 + (1 if i < n_samples % 4 else 0) for i in range(4)]
    centers = np.repeat(np.array([b[:2] for b in _XOR_BLOBS]), counts, axis=0)
    y = np.repeat(np.array([b[2] for b in _XOR_BLOBS], dtype=np.int64), counts)
    x = centers + noise * rng.standard_normal((n_samples, 2))
    order = rng.permutation(n_samples)
    return Dataset(x=x[order], y=y[order], source=f"xor_blobs(n={n_samples},noise={noise})")


GENERATORS = {
    "twonorm": gen_twonorm,
    "ringnorm": gen_ringnorm,
    "xor_blobs": gen_xor_blobs,
}
