# cli.py
# Command-line front end: estimation, bandwidth selection, risk analytics,
# kernel inspection, and reference-table reproduction.
#
# Exit codes: 0 success, 1 usage error, 2 runtime error.

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import reproduce
from .data_io import builtin_dataset, load_counts, write_report
from .estimation import (
    Sample,
    SearchConfig,
    default_search_config,
    frequency_estimate,
    kernel_estimate_raw,
    normalize_estimate,
    select_bandwidth,
)
from .kernels import (
    KernelFamily,
    KernelSpec,
    kernel_mean,
    kernel_variance,
    modal_limit,
    modal_limit_ratio_negbin_poisson,
    modal_limit_ratio_poisson_binomial,
    modal_probability,
)
from .risk import PoissonPmf, exact_mise, frequency_mise
from .simulation import SimulationConfig, run_study

_KERNEL_NAMES = ("dirac", "binomial", "poisson", "negbin", "triangular")


class _UsageError(Exception):
    pass


def _parse_kernel(token: str, arm: int = 1) -> KernelSpec:
    name, _, suffix = token.partition(":")
    if name not in _KERNEL_NAMES:
        raise _UsageError(f"unknown kernel {token!r}; choose from {', '.join(_KERNEL_NAMES)}")
    if suffix:
        if name != "triangular":
            raise _UsageError(f"only the triangular kernel takes an arm suffix, got {token!r}")
        try:
            arm = int(suffix)
        except ValueError:
            raise _UsageError(f"bad triangular arm in {token!r}") from None
    if name == "triangular":
        return KernelSpec(KernelFamily.TRIANGULAR, arm=arm)
    return KernelSpec(KernelFamily(name))


def _parse_true(token: str):
    name, _, value = token.partition(":")
    if name != "poisson" or not value:
        raise _UsageError(f"unsupported distribution {token!r}; use poisson:MU")
    try:
        mu = float(value)
    except ValueError:
        raise _UsageError(f"bad mean in {token!r}") from None
    return PoissonPmf(mu)


def _load_data(token: str) -> Sample:
    if token.startswith("builtin:"):
        return builtin_dataset(token[len("builtin:"):]).sample
    path = Path(token)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    fmt = "value-count" if first.strip().lower().startswith("value") else "raw"
    return load_counts(path, fmt).sample


def _print_table(headers, rows, stream=None) -> None:
    stream = stream or sys.stdout
    table = [headers] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    for r in table:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=stream)


def _fmt(x, digits: int = 6) -> str:
    if x is None:
        return "-"
    return f"{x:.{digits}g}"


def _write_csv(path, headers, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)


def _cmd_estimate(args) -> int:
    sample = _load_data(args.data)
    kernel = _parse_kernel(args.kernel, args.p)
    if kernel.family is KernelFamily.DIRAC:
        h = 0.0
    elif args.cv:
        h = select_bandwidth(sample, kernel).h_cv
    elif args.h is not None:
        h = args.h
    else:
        raise _UsageError("choose a bandwidth with --h or select one with --cv")
    raw = kernel_estimate_raw(sample, kernel, h)
    norm = normalize_estimate(raw) if raw.total() > 0 else None
    print(f"# kernel={kernel.label} h={_fmt(h)} n={sample.n} C={_fmt(raw.normalization_constant, 12)}")
    headers = ["x", "raw"] + (["normalized"] if args.normalize else [])
    rows = []
    for i, x in enumerate(raw.grid()):
        row = [x, _fmt(raw.values[i], 12)]
        if args.normalize:
            row.append(_fmt(norm.values[i], 12) if norm is not None else "-")
        rows.append(row)
    _print_table(headers, rows)
    if args.out:
        _write_csv(args.out, headers, rows)
    return 0


def _cmd_cv(args) -> int:
    sample = _load_data(args.data)
    kernel = _parse_kernel(args.kernel, args.p)
    base = default_search_config(kernel.family)
    config = SearchConfig(
        h_min=args.h_min if args.h_min is not None else base.h_min,
        h_max=args.h_max if args.h_max is not None else base.h_max,
        grid_points=args.grid,
    )
    sel = select_bandwidth(sample, kernel, config)
    print(f"# kernel={kernel.label} n={sample.n} h_cv={_fmt(sel.h_cv, 12)}")
    rows = [[_fmt(h, 12), _fmt(score, 12)] for h, score in sel.cv_curve]
    _print_table(["h", "cv"], rows)
    if args.out:
        _write_csv(args.out, ["h", "cv"], rows)
    return 0


def _cmd_simulate(args) -> int:
    config = SimulationConfig(
        true_pmf=_parse_true(args.true),
        sample_sizes=tuple(args.sizes),
        replicates=args.replicates,
        kernels=tuple(_parse_kernel(tok) for tok in args.kernels),
        seed=args.seed,
        normalize=args.normalize,
    )
    report = run_study(config)
    headers = ["kernel", "n", "h_mean", "h_sd", "mean_mise", "ibias", "ivar"]
    rows = [
        [c.kernel, c.n, _fmt(c.h_mean), _fmt(c.h_sd), _fmt(c.mean_mise), _fmt(c.ibias), _fmt(c.ivar)]
        for c in report.cells
    ]
    _print_table(headers, rows)
    if args.out:
        write_report(report, args.format, args.out)
        print(f"# wrote {args.format} report to {args.out}")
    return 0


def _cmd_risk(args) -> int:
    f = _parse_true(args.true)
    kernel = _parse_kernel(args.kernel, args.p)
    h = 0.0 if kernel.family is KernelFamily.DIRAC else args.h
    if h is None:
        raise _UsageError("--h is required for non-dirac kernels")
    breakdown = exact_mise(kernel, h, f, args.n)
    print(f"# kernel={kernel.label} h={_fmt(h)} n={args.n} truth={f.label()}")
    print(f"integrated squared bias: {_fmt(breakdown.integrated_squared_bias, 12)}")
    print(f"integrated variance:     {_fmt(breakdown.integrated_variance, 12)}")
    print(f"mise:                    {_fmt(breakdown.mise, 12)}")
    print(f"amise:                   {_fmt(breakdown.amise, 12)}")
    print(f"frequency mise:          {_fmt(frequency_mise(f, args.n), 12)}")
    if args.out:
        _write_csv(
            args.out,
            ["x", "bias", "variance", "bias_off_target", "variance_remainder"],
            [
                [x, _fmt(bv, 12), _fmt(vv, 12), _fmt(qv, 12), _fmt(rv, 12)]
                for x, bv, vv, qv, rv in zip(
                    breakdown.x_values,
                    breakdown.bias,
                    breakdown.variance,
                    breakdown.bias_off_target,
                    breakdown.variance_remainder,
                )
            ],
        )
    return 0


def _cmd_kernel_info(args) -> int:
    kernel = _parse_kernel(args.kernel, args.p)
    xs = range(0, args.x_max + 1)
    headers = ["x", "h", "modal_prob", "mean", "variance", "modal_limit", "r_pois_binom", "r_negbin_pois"]
    rows = []
    for x in xs:
        limit = modal_limit(kernel, x)
        r1 = modal_limit_ratio_poisson_binomial(x)
        r2 = modal_limit_ratio_negbin_poisson(x)
        h_list = [0.0] if kernel.family is KernelFamily.DIRAC else args.h_list
        for h in h_list:
            rows.append(
                [
                    x,
                    _fmt(h),
                    _fmt(modal_probability(kernel, x, h), 12),
                    _fmt(kernel_mean(kernel, x, h), 12),
                    _fmt(kernel_variance(kernel, x, h), 12),
                    _fmt(limit, 12),
                    _fmt(r1, 12),
                    _fmt(r2, 12),
                ]
            )
    _print_table(headers, rows)
    if args.out:
        _write_csv(args.out, headers, rows)
    return 0


def _cmd_reproduce(args) -> int:
    if args.table == 1:
        rows = reproduce.run_table1(args.seed)
        _print_table(
            ["n", "kernel_ise", "reference", "rel_err", "frequency_ise", "reference_f", "rel_err_f"],
            [
                [r["n"], _fmt(r["kernel_mean_ise"]), _fmt(r["kernel_reference"]),
                 f"{r['kernel_rel_err']:+.1%}", _fmt(r["frequency_mean_ise"]),
                 _fmt(r["frequency_reference"]), f"{r['frequency_rel_err']:+.1%}"]
                for r in rows
            ],
        )
    elif args.table in (2, 3):
        report = reproduce.run_table23_study(args.seed)
        if args.table == 2:
            rows = reproduce.table2_rows(report)
            _print_table(
                ["kernel", "n", "h_mean", "reference", "rel_err", "h_sd", "reference_sd"],
                [
                    [r["kernel"], r["n"], _fmt(r["h_mean"], 4), _fmt(r["reference_mean"]),
                     f"{r['rel_err_mean']:+.1%}", _fmt(r["h_sd"], 4), _fmt(r["reference_sd"])]
                    for r in rows
                ],
            )
        else:
            rows = reproduce.table3_rows(report)
            _print_table(
                ["kernel", "n", "mise_x1000", "reference", "rel_err", "ibias_x1000", "ref_ibias", "ivar_x1000", "ref_ivar"],
                [
                    [r["kernel"], r["n"], _fmt(r["mise_x1000"], 4), _fmt(r["reference_mise_x1000"]),
                     f"{r['rel_err']:+.1%}", _fmt(r["ibias_x1000"], 4), _fmt(r["reference_ibias_x1000"]),
                     _fmt(r["ivar_x1000"], 4), _fmt(r["reference_ivar_x1000"])]
                    for r in rows
                ],
            )
    else:
        rows = reproduce.table5_rows()
        _print_table(
            ["dataset", "kernel", "ise@ref_h", "reference", "rel_err", "own_h", "own_ise", "winner"],
            [
                [r["dataset"], r["kernel"], _fmt(r["ise_at_reference_h"], 4), _fmt(r["reference_ise"]),
                 f"{r['rel_err']:+.1%}", _fmt(r["own_h"], 4), _fmt(r["own_ise"], 4),
                 "*" if r["own_winner"] else ""]
                for r in rows
            ],
        )
        print("# * marks the smallest own-selection ISE per dataset")
    return 0


def _add_common_kernel_args(parser, default_p: int = 1) -> None:
    parser.add_argument("--kernel", required=True, help="dirac, binomial, poisson, negbin, triangular[:P]")
    parser.add_argument("--p", type=int, default=default_p, help="triangular arm (default 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dks", description="Discrete-kernel estimation of count-data p.m.f.s")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate a p.m.f. from count data")
    p_est.add_argument("--data", required=True, help="path to a count file or builtin:NAME")
    _add_common_kernel_args(p_est)
    group = p_est.add_mutually_exclusive_group()
    group.add_argument("--h", type=float, help="fixed bandwidth")
    group.add_argument("--cv", action="store_true", help="select the bandwidth by cross-validation")
    p_est.add_argument("--normalize", action="store_true", help="include the normalized column")
    p_est.add_argument("--out", help="write the table as CSV")
    p_est.set_defaults(func=_cmd_estimate)

    p_cv = sub.add_parser("cv", help="cross-validation bandwidth selection")
    p_cv.add_argument("--data", required=True)
    _add_common_kernel_args(p_cv)
    p_cv.add_argument("--h-min", type=float, dest="h_min")
    p_cv.add_argument("--h-max", type=float, dest="h_max")
    p_cv.add_argument("--grid", type=int, default=64)
    p_cv.add_argument("--out")
    p_cv.set_defaults(func=_cmd_cv)

    p_sim = sub.add_parser("simulate", help="seeded Monte Carlo study")
    p_sim.add_argument("--true", required=True, help="poisson:MU")
    p_sim.add_argument("--sizes", required=True, type=lambda s: [int(t) for t in s.split(",")])
    p_sim.add_argument("--replicates", type=int, default=250)
    p_sim.add_argument("--kernels", required=True, type=lambda s: s.split(","))
    p_sim.add_argument("--seed", type=int, default=reproduce.DEFAULT_SEED)
    p_sim.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True)
    p_sim.add_argument("--out")
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sim.set_defaults(func=_cmd_simulate)

    p_risk = sub.add_parser("risk", help="exact risk of the raw estimator")
    p_risk.add_argument("--true", required=True, help="poisson:MU")
    _add_common_kernel_args(p_risk)
    p_risk.add_argument("--h", type=float)
    p_risk.add_argument("--n", type=int, required=True)
    p_risk.add_argument("--out")
    p_risk.set_defaults(func=_cmd_risk)

    p_info = sub.add_parser("kernel-info", help="kernel shape and comparison tables")
    _add_common_kernel_args(p_info)
    p_info.add_argument("--x-max", type=int, dest="x_max", default=10)
    p_info.add_argument("--h-list", dest="h_list", default="0.1",
                        type=lambda s: [float(t) for t in s.split(",")])
    p_info.add_argument("--out")
    p_info.set_defaults(func=_cmd_kernel_info)

    p_rep = sub.add_parser("reproduce", help="recompute an embedded reference table")
    p_rep.add_argument("--table", type=int, choices=(1, 2, 3, 5), required=True)
    p_rep.add_argument("--seed", type=int, default=reproduce.DEFAULT_SEED)
    p_rep.set_defaults(func=_cmd_reproduce)

    return parser


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args) or 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
