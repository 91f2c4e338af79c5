"""Command-line interface: ``vsc {gen,cv,sweep,compare,heatmap}``.

Exit status is 0 on success, 2 for invalid arguments or inputs, 1 when a
computation fails.  Diagnostics are one line on stderr.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

import numpy as np

from vsc import __version__, records
from vsc.data import GENERATORS, atomic_write_text, format_csv, load_dataset
from vsc.errors import VscError
from vsc.evaluation import (
    MARK_BETTER,
    MARK_WORSE,
    SCALE_MODES,
    ClassifierSpec,
    compare,
    confidence_grid,
    make_folds,
    rankings,
    run_cv,
    sweep,
)
from vsc.model import MODEL_IDS, Pair

FORMATS = ("table", "csv", "json-lines")
DEFAULT_K_LIST = (25, 50, 100, 250, 500)
DEFAULT_LAMBDA_LIST = (0.1, 1.0, 10.0)


class UsageError(Exception):
    pass


# -- argument helpers --------------------------------------------------------


def _floats(text, count=None):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} numbers, got {text!r}")
    return vals


def _ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pair_arg(text):
    return _floats(text, 2)


def _ref_key(text):
    parts = dict(p.split("=", 1) for p in text.split(",") if "=" in p)
    try:
        return int(parts["k"]), float(parts.get("lambda", parts.get("lam")))
    except (KeyError, TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"expected k=<int>,lambda=<float>, got {text!r}")


def _default_seed():
    env = os.environ.get("VSC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"VSC_SEED must be an integer, got {env!r}")


def _parse_gen_spec(text):
    """``name:key=value,...`` -> generated Dataset."""
    name, _, rest = text.partition(":")
    if name not in GENERATORS:
        raise UsageError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    opts = dict(p.split("=", 1) for p in rest.split(",") if "=" in p)
    seed = int(opts.pop("seed", 0))
    n = int(opts.pop("n", 1000))
    if name == "xor_blobs":
        ds = GENERATORS[name](n, float(opts.pop("noise", 0.2)), seed)
    else:
        ds = GENERATORS[name](n, int(opts.pop("dim", 20)), seed)
    if opts:
        raise UsageError(f"unknown generator options: {', '.join(opts)}")
    return ds


def _load(args):
    if args.gen:
        return _parse_gen_spec(args.gen)
    if not args.data:
        raise UsageError("one of --data or --gen is required")
    path = Path(args.data)
    if not path.is_file():
        raise UsageError(f"data file not found: {path}")
    return load_dataset(path, label_column=args.label_column, positive_label=args.positive_label)


def _emit(text, out):
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _render(recs, fmt, table):
    if fmt == "json-lines":
        return records.format_lines(recs)
    if fmt == "csv":
        return records.format_csv(recs)
    return table


def _record_file_text(recs, out):
    if out and str(out).lower().endswith(".csv"):
        return records.format_csv(recs)
    return records.format_lines(recs)


def _params_from(args, model_id):
    params = {}
    if model_id.startswith("vsc"):
        params.update(k=args.k, lam=args.lam, epsilon=args.epsilon)
    elif model_id == "elm":
        params.update(hidden=args.hidden, lam=args.lam)
    elif model_id == "knn":
        params.update(neighbors=args.neighbors)
    return params


def _validate_common(args):
    if args.folds < 2:
        raise UsageError("--folds must be >= 2")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.seed is None:
        args.seed = _default_seed()
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if args.fold_seed is None:
        args.fold_seed = args.seed


# -- commands ----------------------------------------------------------------


def cmd_gen(args):
    name = args.dataset or args.name
    if not name:
        raise UsageError("a dataset name is required (e.g. --dataset twonorm)")
    if name not in GENERATORS:
        raise UsageError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    seed = _default_seed() if args.seed is None else args.seed
    if name == "xor_blobs":
        if not args.noise > 0:
            raise UsageError("--noise must be positive")
        ds = GENERATORS[name](args.n, args.noise, seed)
    else:
        if args.dim < 1:
            raise UsageError("--dim must be >= 1")
        ds = GENERATORS[name](args.n, args.dim, seed)
    text = format_csv(ds)
    pos, neg = ds.class_counts()
    summary = f"N={ds.n_samples} n={ds.n_features} pos={pos} neg={neg}\n"
    if args.out:
        atomic_write_text(args.out, text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return 0


def _cv_table(result):
    lines = [
        f"dataset   {result.dataset_id}",
        f"model     {result.classifier_id} {records._ordered_params(result.config)}",
        f"folds     {result.n_folds} (fold seed {result.fold_seed}, scale {result.scale_mode})",
        "",
        "fold  F1",
    ]
    lines += [f"{i + 1:>4}  {v:.4f}" for i, v in enumerate(result.fold_f1)]
    lines += ["", f"mean F1   {result.mean_f1:.4f}", f"std F1    {result.std_f1:.4f}", ""]
    return "\n".join(lines)


def cmd_cv(args):
    _validate_common(args)
    ds = _load(args)
    folds = make_folds(ds, args.folds, args.fold_seed)
    spec = ClassifierSpec(args.model, _params_from(args, args.model))
    result = run_cv(ds, spec, folds, scale_mode=args.scale, seed=args.seed, jobs=args.jobs)
    recs = [records.cv_record(result)]
    if args.out:
        atomic_write_text(args.out, _record_file_text(recs, args.out))
    sys.stdout.write(_render(recs, args.format, _cv_table(result)))
    return 0


def _load_baseline(path):
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"baseline file not found: {path}")
    recs = records.parse_lines(path.read_text(encoding="utf-8"))
    if not recs:
        raise UsageError(f"baseline file has no records: {path}")
    if len(recs) == 1:
        return float(recs[0]["mean_f1"])
    by_size = {}
    for rec in recs:
        params = rec.get("params", {})
        size = rec.get("k", params.get("k", params.get("hidden")))
        if size is None or int(size) in by_size:
            raise UsageError("baseline records must carry one distinct k/hidden size each")
        by_size[int(size)] = float(rec["mean_f1"])
    return by_size


def _sweep_table(recs):
    ks = sorted({r["k"] for r in recs})
    lams = sorted({r["lambda"] for r in recs})
    cell = {(r["k"], r["lambda"]): r for r in recs}
    has_base = "baseline_normalized_f1" in recs[0]
    head = "k \\ lambda" + "".join(f"{lam:>22g}" for lam in lams)
    lines = [f"normalized F1 (reference k={recs[0]['reference_k']}, "
             f"lambda={recs[0]['reference_lambda']:g})", head]
    for k in ks:
        row = f"{k:>10}"
        for lam in lams:
            r = cell[(k, lam)]
            txt = f"{r['mean_f1']:.4f} ({r['normalized_f1']:.3f})"
            if has_base and r["baseline_normalized_f1"] is not None:
                txt += f"[{r['baseline_normalized_f1']:.3f}]"
            row += f"{txt:>22}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def cmd_sweep(args):
    _validate_common(args)
    if args.model not in ("vsc", "vsc-noconf", "vsc-uniform"):
        raise UsageError("sweep supports the VSC variants only")
    if not args.k_list or any(k < 1 for k in args.k_list):
        raise UsageError("--k-list needs positive integers")
    if not args.lambda_list or any(not lam > 0 for lam in args.lambda_list):
        raise UsageError("--lambda-list needs positive numbers")
    baseline = _load_baseline(args.normalize_against) if args.normalize_against else None
    ds = _load(args)
    folds = make_folds(ds, args.folds, args.fold_seed)
    grid = sweep(ds, args.k_list, args.lambda_list, args.model, folds,
                 reference_key=args.normalize_ref, seed=args.seed, scale_mode=args.scale,
                 epsilon=args.epsilon, jobs=args.jobs)
    recs = records.sweep_records(grid, baseline)
    if args.out:
        atomic_write_text(args.out, _record_file_text(recs, args.out))
    sys.stdout.write(_render(recs, args.format, _sweep_table(recs)))
    return 0


def cmd_compare(args):
    recs = []
    for path in args.records:
        p = Path(path)
        if not p.is_file():
            raise UsageError(f"record file not found: {p}")
        recs += records.parse_lines(p.read_text(encoding="utf-8"))
    if len(recs) < 2:
        raise UsageError("compare needs at least two result records")
    try:
        results = [records.result_from_record(r) for r in recs]
    except (KeyError, ValueError) as exc:
        raise UsageError(f"malformed result record: {exc}")
    if len({r.pairing_key() for r in results}) != 1:
        raise UsageError("records differ in dataset, fold seed or fold count; refusing to pair them")
    cmp = compare(results, alpha=args.alpha)
    ref = args.reference or cmp.ids[0]
    if ref not in cmp.ids:
        raise UsageError(f"reference {ref!r} not among {', '.join(cmp.ids)}")
    ranks = rankings(dict(zip(cmp.ids, cmp.means)), tie_eps=args.tie_eps)
    ri = cmp.ids.index(ref)
    rows = []
    for j, name in enumerate(cmp.ids):
        t = cmp.tests[ri][j]
        rows.append({
            "schema_version": records.SCHEMA_VERSION,
            "kind": "compare",
            "dataset_id": results[j].dataset_id,
            "reference": ref,
            "classifier_id": name,
            "mean_f1": float(cmp.means[j]),
            "mark": cmp.mark(ref, name),
            "t_stat": None if j == ri else float(t.t_stat),
            "p_value": None if j == ri else float(t.p_value),
            "significant": bool(j != ri and t.significant),
            "rank": ranks[name],
        })
    if args.out:
        atomic_write_text(args.out, _record_file_text(rows, args.out))
    width = max(len(n) for n in cmp.ids)
    table = [f"reference: {ref}   ({MARK_WORSE} significantly worse, "
             f"{MARK_BETTER} significantly better, alpha={args.alpha:g})",
             f"{'model':<{width}}  mean F1  mark  p-value   rank"]
    for r in rows:
        p = "-" if r["p_value"] is None else f"{r['p_value']:.4f}"
        table.append(f"{r['classifier_id']:<{width}}  {r['mean_f1']:.4f}   {r['mark'] or ' ':<4}"
                     f"{p:>8}  {r['rank']:>5}")
    sys.stdout.write(_render(rows, args.format, "\n".join(table) + "\n"))
    return 0


def cmd_heatmap(args):
    if args.resolution < 2:
        raise UsageError("--resolution must be >= 2")
    if not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    pair = Pair(np.array(args.plus), np.array(args.minus))
    xs, ys, grid = confidence_grid(pair, args.x_range, args.y_range, args.resolution, args.epsilon)
    buf = io.StringIO()
    buf.write(",".join(format(x, ".17g") for x in xs) + "\n")
    for row in grid:
        buf.write(",".join(format(v, ".17g") for v in row) + "\n")
    _emit(buf.getvalue(), args.out)
    return 0


# -- parser ------------------------------------------------------------------


def _add_eval_args(p):
    src = p.add_argument_group("data")
    src.add_argument("--data", help="CSV or Keel .dat file")
    src.add_argument("--gen", help="generator spec instead of a file, e.g. twonorm:n=2000,dim=20,seed=7")
    src.add_argument("--label-column", default="label")
    src.add_argument("--positive-label", default=None,
                     help="label value mapped to +1 (CSV default '1'; Keel default: first class)")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help="master seed (env VSC_SEED, else 0)")
    p.add_argument("--fold-seed", type=int, default=None, help="fold-plan seed (default: --seed)")
    p.add_argument("--scale", choices=SCALE_MODES, default="fold",
                   help="fit the scaler per training fold, once on all data, or not at all")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=FORMATS, default="table", help="stdout format")
    p.add_argument("--out", help="write records here (.csv for CSV, else json-lines)")


def build_parser():
    parser = argparse.ArgumentParser(prog="vsc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset as CSV")
    p.add_argument("name", nargs="?", help="generator name (same as --dataset)")
    p.add_argument("--dataset", help=f"one of {', '.join(GENERATORS)}")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--dim", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cv", help="cross-validated F1 of one model")
    p.add_argument("--model", choices=[m for m in MODEL_IDS if m != "constant"], default="vsc")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--hidden", type=int, default=100)
    p.add_argument("--neighbors", type=int, default=5)
    _add_eval_args(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("sweep", help="cross-validate a (k, lambda) grid")
    p.add_argument("--model", choices=("vsc", "vsc-noconf", "vsc-uniform"), default="vsc")
    p.add_argument("--k-list", type=_ints, default=list(DEFAULT_K_LIST))
    p.add_argument("--lambda-list", type=_floats, default=list(DEFAULT_LAMBDA_LIST))
    p.add_argument("--normalize-ref", type=_ref_key, default=(100, 1.0),
                   help="grid point used as the normalizer, k=<int>,lambda=<float>")
    p.add_argument("--normalize-against", help="record file of an external baseline run")
    _add_eval_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="significance marks and ranks for result records")
    p.add_argument("records", nargs="+", help="json-lines record files")
    p.add_argument("--reference", help="classifier id to mark against (default: first)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tie-eps", type=float, default=0.001)
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("heatmap", help="confidence of one pair on a 2-D lattice, as CSV")
    p.add_argument("--plus", type=_pair_arg, default=[-5.0, 0.0])
    p.add_argument("--minus", type=_pair_arg, default=[5.0, 0.0])
    p.add_argument("--x-range", type=_pair_arg, default=[-10.0, 10.0])
    p.add_argument("--y-range", type=_pair_arg, default=[-10.0, 10.0])
    p.add_argument("--resolution", type=int, default=201)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_heatmap)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"vsc: error: {exc}\n")
        return 2
    except VscError as exc:
        sys.stderr.write(f"vsc: error: {exc}\n")
        # bad inputs (parse, parameter, shape) vs failed computations
        return 2 if isinstance(exc, ValueError) else 1
    except OSError as exc:
        sys.stderr.write(f"vsc: error: {exc}\n")
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
