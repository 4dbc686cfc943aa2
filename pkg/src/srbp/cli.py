"""Command-line front end for the experiments and validation checks.

Exit codes: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import dof
from .channel import (
    MaskMatrix,
    PathSet,
    synthesize_physical_channel,
    virtual_decompose,
)
from .experiments import (
    DEFAULT_SNR_GRID_DB,
    ExperimentConfig,
    run_block_census,
    run_capacity_sweep,
    run_dof_trials,
)
from .pairing import block_triangulate, serialize_trace, triangulate_mask

SEED_ENV_VAR = "SRBP_SEED"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}")


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _add_common(sub, trials_default=10000):
    sub.add_argument("--trials", type=_positive_int, default=trials_default)
    sub.add_argument("--seed", type=int, default=None,
                     help=f"master seed (default: ${SEED_ENV_VAR} or 0)")
    sub.add_argument("--delta", type=float, default=None,
                     help="entry probability (default 1/n)")
    sub.add_argument("--workers", type=_positive_int, default=1)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srbp",
        description="Semi-random beam pairing transceiver experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dof-table", help="analytical vs simulated stream counts")
    p.add_argument("--n", type=_int_list, default=[8, 16, 32, 64, 128])
    _add_common(p)

    p = sub.add_parser("block-census", help="diagonal block size classification")
    p.add_argument("--n", type=_positive_int, default=64)
    _add_common(p)

    p = sub.add_parser("capacity-sweep", help="mean capacity versus SNR")
    p.add_argument("--n", type=_int_list, default=[32, 64])
    p.add_argument("--snr-db", type=_float_list, default=list(DEFAULT_SNR_GRID_DB))
    _add_common(p)

    p = sub.add_parser("predict-dof", help="analytical predictor only")
    p.add_argument("--n", type=_int_list, default=[8, 16, 32, 64, 128])
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--trajectory", default=None,
                   help="write the per-step recursion trace to this CSV file "
                        "(single --n only)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)

    p = sub.add_parser("validate-channel", help="beamspace equivalence checks")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--paths", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("trace", help="step-by-step pairing log for a small mask")
    p.add_argument("--n", type=_positive_int, default=8)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mask-file", default=None,
                   help="text grid of 0/1 characters, one row per line")
    p.add_argument("--output", default=None)

    return parser


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _rows_to_csv(rows, fields) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow(
            [f"{row[f]:.6g}" if isinstance(row[f], float) else row[f] for f in fields]
        )
    return buf.getvalue()


def cmd_dof_table(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rows = []
    for n in args.n:
        cfg = ExperimentConfig(n=n, delta=args.delta, trials=args.trials,
                               seed=seed, workers=args.workers)
        report = run_dof_trials(cfg)
        rows.append({
            "n": n,
            "dof_analytical": dof.predict_dof(n, cfg.delta).n_d,
            "dof_srbp_sim": report.metrics["n_d"][0],
            "dof_svd_sim": report.metrics["svd_rank"][0],
        })
    if args.format == "csv":
        text = _rows_to_csv(rows, ["n", "dof_analytical", "dof_srbp_sim", "dof_svd_sim"])
    else:
        text = json.dumps(
            {"seed": seed, "trials": args.trials, "rows": rows},
            indent=2, sort_keys=True,
        )
    _emit(text, args.output)
    return 0


def cmd_block_census(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = ExperimentConfig(n=args.n, delta=args.delta, trials=args.trials,
                           seed=seed, workers=args.workers)
    report = run_block_census(cfg)
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _emit(text, args.output)
    return 0


def cmd_capacity_sweep(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    sweeps = []
    for n in args.n:
        cfg = ExperimentConfig(n=n, delta=args.delta, trials=args.trials,
                               snr_grid_db=tuple(args.snr_db), seed=seed,
                               workers=args.workers)
        sweeps.append((n, run_capacity_sweep(cfg)))
    if args.format == "csv":
        rows = []
        for n, report in sweeps:
            for point in report.curves:
                rows.append({"n": n, **point})
        fields = ["n"] + sorted(sweeps[0][1].curves[0])
        text = _rows_to_csv(rows, fields)
    else:
        text = json.dumps(
            {
                "seed": seed,
                "sweeps": [
                    {"n": n, "config": r.config.to_dict(),
                     "curves": [dict(p) for p in r.curves]}
                    for n, r in sweeps
                ],
            },
            indent=2, sort_keys=True,
        )
    _emit(text, args.output)
    return 0


def cmd_predict_dof(args, parser) -> int:
    rows = []
    predictions = []
    for n in args.n:
        pred = dof.predict_dof(n, args.delta)
        predictions.append(pred)
        rows.append({"n": n, "dof_analytical": pred.n_d, "n_ex": pred.n_ex})
    if args.trajectory:
        if len(args.n) != 1:
            parser.error("--trajectory needs exactly one --n value")
        with open(args.trajectory, "w") as fh:
            fh.write(dof.trajectory_csv(predictions[0]))
    if args.format == "csv":
        text = _rows_to_csv(rows, ["n", "dof_analytical", "n_ex"])
    else:
        text = json.dumps({"rows": rows}, indent=2, sort_keys=True)
    _emit(text, args.output)
    return 0


def cmd_validate_channel(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng(seed)
    n = args.n
    if args.paths == 1:
        # Single path on exact grid angles: the beamspace matrix must
        # concentrate on one entry.
        i, j = int(rng.integers(n)), int(rng.integers(n))
        paths = PathSet(gains=np.array([1.0 + 0j]),
                        aoa=np.array([i / n]), aod=np.array([j / n]))
    else:
        paths = PathSet.random(args.paths, rng)
    physical = synthesize_physical_channel(paths, n_t=n, n_r=n)
    virtual = virtual_decompose(physical)

    failures = 0

    def check(name, err, tol):
        nonlocal failures
        ok = err < tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name}: error {err:.3e} (tol {tol:g})")

    eye = np.eye(n)
    check("rx transform unitary",
          np.abs(virtual.a_r.conj().T @ virtual.a_r - eye).max(), 1e-10)
    check("tx transform unitary",
          np.abs(virtual.a_t.conj().T @ virtual.a_t - eye).max(), 1e-10)

    h = physical.matrix
    rt_err = np.linalg.norm(virtual.reconstruct() - h) / np.linalg.norm(h)
    check("round trip", rt_err, 1e-10)

    sv_phys = np.linalg.svd(h, compute_uv=False)
    sv_virt = np.linalg.svd(virtual.h_v, compute_uv=False)
    sv_err = np.abs(sv_phys - sv_virt).max() / sv_phys.max()
    check("singular value match", sv_err, 1e-9)

    if args.paths == 1:
        mags = np.abs(virtual.h_v)
        dominant = mags.max()
        mags_rest = mags.copy()
        mags_rest[np.unravel_index(mags.argmax(), mags.shape)] = 0.0
        check("single dominant beam entry", mags_rest.max() / dominant, 1e-9)
        print(f"dominant virtual entry magnitude: {dominant:.6g} "
              f"(expected {np.sqrt(n * n) * 1.0:.6g})")

    return 1 if failures else 0


def _load_mask_file(path, parser) -> MaskMatrix:
    try:
        with open(path) as fh:
            lines = [line.rstrip("\n") for line in fh]
    except OSError as exc:
        parser.error(f"cannot read mask file: {exc}")
    lines = [line for line in lines if line]
    if not lines:
        parser.error(f"mask file {path}: no rows")
    width = len(lines[0])
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if len(line) != width:
            parser.error(f"mask file {path} line {lineno}: expected {width} "
                         f"characters, got {len(line)}")
        if set(line) - {"0", "1"}:
            parser.error(f"mask file {path} line {lineno}: characters must be 0 or 1")
        rows.append([int(c) for c in line])
    return MaskMatrix(bits=np.array(rows, dtype=np.uint8))


def cmd_trace(args, parser) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng(seed)
    if args.mask_file:
        mask = _load_mask_file(args.mask_file, parser)
    else:
        if args.n > 16:
            parser.error("trace is meant for small masks: --n must be <= 16")
        from .channel import sample_bernoulli_mask

        mask = sample_bernoulli_mask(args.n, args.n,
                                     args.delta or 1.0 / args.n, rng)

    tri = triangulate_mask(mask, rng)
    decomp = block_triangulate(tri, mask)

    out = io.StringIO()
    out.write(serialize_trace(tri.trace.actions))
    out.write("\n")
    out.write(f"n_d={tri.n_d} n_ex_active={tri.n_ex_active} "
              f"n_residual={tri.n_residual} n_bar={tri.n_bar}\n")
    out.write("permuted mask:\n")
    permuted = mask.bits[np.ix_(decomp.row_order, decomp.col_order)] \
        if decomp.row_order.size else np.zeros((0, mask.shape[1]), np.uint8)
    for row in permuted:
        out.write("".join(str(int(v)) for v in row) + "\n")
    out.write("blocks:\n")
    for i, block in enumerate(decomp.blocks, start=1):
        out.write(f"  block {i}: {block.shape[0]}x{block.shape[1]} "
                  f"rows={[r + 1 for r in block.rows]} "
                  f"cols={[c + 1 for c in block.cols]}\n")
    if not decomp.blocks:
        out.write("  (none)\n")
    _emit(out.getvalue(), args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dof-table":
        return cmd_dof_table(args)
    if args.command == "block-census":
        return cmd_block_census(args)
    if args.command == "capacity-sweep":
        return cmd_capacity_sweep(args)
    if args.command == "predict-dof":
        return cmd_predict_dof(args, parser)
    if args.command == "validate-channel":
        return cmd_validate_channel(args)
    if args.command == "trace":
        return cmd_trace(args, parser)
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
