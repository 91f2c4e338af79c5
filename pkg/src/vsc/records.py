"""Line-delimited result records and their CSV flattening.

Each record is one JSON object per line, with a fixed field order and every
float written with 17 significant digits.  ``schema_version`` lets later
versions read older runs.
"""
import csv
import io
import json
import math

from vsc.evaluation import CvResult, SweepGrid

SCHEMA_VERSION = 1

_PARAM_ORDER = ("k", "lam", "epsilon", "hidden", "neighbors", "label")


def _fmt(value):
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_fmt(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in value) + "]"
    if hasattr(value, "item"):  # numpy scalar
        return _fmt(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(record) -> str:
    return _fmt(record)


def loads(line):
    return json.loads(line)


def _ordered_params(params):
    out = {k: params[k] for k in _PARAM_ORDER if k in params}
    out.update({k: params[k] for k in sorted(params) if k not in out})
    return {k: float(v) if k in ("lam", "epsilon") else v for k, v in out.items()}


def cv_record(result: CvResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cv",
        "dataset_id": result.dataset_id,
        "classifier_id": result.classifier_id,
        "params": _ordered_params(result.config),
        "seed": result.seed,
        "fold_seed": result.fold_seed,
        "n_folds": result.n_folds,
        "scale_mode": result.scale_mode,
        "fold_f1": [float(v) for v in result.fold_f1],
        "mean_f1": result.mean_f1,
        "std_f1": result.std_f1,
    }


def sweep_records(grid: SweepGrid, baseline=None) -> list:
    """One record per grid point, ordered by (k, lambda).

    ``baseline`` (float or ``{k: mean_f1}``) adds ``baseline_mean_f1`` and
    ``baseline_normalized_f1``.
    """
    norm = grid.normalized()
    ext = grid.normalized_against(baseline) if baseline is not None else {}
    ref_k, ref_lam = grid.reference_key
    out = []
    for key in sorted(grid.entries):
        r = grid.entries[key]
        rec = cv_record(r)
        rec["kind"] = "sweep"
        rec["k"] = key[0]
        rec["lambda"] = key[1]
        rec["reference_k"] = ref_k
        rec["reference_lambda"] = ref_lam
        rec["reference_mean_f1"] = grid.reference.mean_f1
        rec["normalized_f1"] = norm[key]
        if baseline is not None:
            b = baseline.get(key[0]) if isinstance(baseline, dict) else float(baseline)
            rec["baseline_mean_f1"] = b
            rec["baseline_normalized_f1"] = ext[key]
        out.append(rec)
    return out


def result_from_record(rec) -> CvResult:
    version = rec.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported record schema_version {version!r}")
    return CvResult(
        fold_f1=tuple(float(v) for v in rec["fold_f1"]),
        classifier_id=rec["classifier_id"],
        dataset_id=rec["dataset_id"],
        config=dict(rec.get("params", {})),
        seed=rec.get("seed", 0),
        fold_seed=rec.get("fold_seed"),
        scale_mode=rec.get("scale_mode", "fold"),
    )


def format_lines(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)


def parse_lines(text) -> list:
    return [loads(line) for line in text.splitlines() if line.strip()]


def format_csv(records) -> str:
    """Flatten records to CSV: params become ``params.<name>`` columns and
    fold scores one ``;``-joined cell."""
    rows = []
    columns = []
    for rec in records:
        flat = {}
        for key, value in rec.items():
            if isinstance(value, dict):
                for pk, pv in value.items():
                    flat[f"{key}.{pk}"] = pv
            elif isinstance(value, list):
                flat[key] = ";".join(_fmt(v) for v in value)
            else:
                flat[key] = value
        for key in flat:
            if key not in columns:
                columns.append(key)
        rows.append(flat)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for flat in rows:
        writer.writerow(
            ["" if flat.get(c) is None else (flat[c] if isinstance(flat[c], str) else _fmt(flat[c]))
             for c in columns]
        )
    return buf.getvalue()
