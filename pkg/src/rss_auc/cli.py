"""Command-line interface: ``rss-auc {estimate,ci,simulate,case-study,presets}``.

Exit codes: 0 success, 2 usage, 3 configuration error, 4 data error,
5 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .case_study import DatasetError, Orientation, load_dataset, parse_columns, run_case_sweep
from .el import (
    DegenerateSampleError,
    Form,
    chi2_threshold,
    confidence_interval,
    confidence_interval_dual,
    el_log_ratio,
    el_log_ratio_dual,
)
from .estimators import Kernel, mw_auc, mw_auc_dual
from .kernel import kernel_auc, kernel_ci
from .populations import InvalidConfigurationError
from .sampling import read_samples_csv
from .simulation import (
    METHODS,
    ConfigError,
    SimulationConfig,
    load_preset,
    preset_names,
    run_sweep,
    write_replicates_csv,
    write_summary_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_DATA = 4
EXIT_DEGENERATE = 5


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _emit(record: dict, as_json: bool, out) -> None:
    if as_json:
        out.write(json.dumps(record, sort_keys=False) + "\n")
        return
    width = max(len(k) for k in record)
    for key, value in record.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        out.write(f"{key:<{width}}  {value}\n")


def _load_samples(path):
    try:
        return read_samples_csv(path)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", EXIT_DATA) from None
    except InvalidConfigurationError as exc:
        raise CommandError(f"{path}: {exc}", EXIT_DATA) from None


def _geometry(x, y) -> dict:
    return {
        "n_x": x.size,
        "n_y": y.size,
        "set_size_x": x.set_size,
        "set_size_y": y.set_size,
        "counts_x": " ".join(map(str, x.counts)),
        "counts_y": " ".join(map(str, y.counts)),
    }


def _form_for(method, x, y):
    if method is None:
        return None
    if method == "srs-el":
        if x.set_size != 1 or y.set_size != 1:
            raise CommandError("srs-el expects set size 1 in both groups", EXIT_DATA)
        return Form.BRSS
    if method == "brss-el":
        if not (x.is_balanced and y.is_balanced):
            raise CommandError("brss-el expects balanced samples; use urss-el", EXIT_DATA)
        return Form.BRSS
    if method == "urss-el":
        return Form.URSS
    return None


def cmd_estimate(args, out) -> int:
    x, y = _load_samples(args.samples)
    kernel = Kernel(args.kernel)
    _form_for(args.method, x, y)
    record = {"method": args.method or ("brss-el" if x.is_balanced and y.is_balanced else "urss-el")}
    if args.method == "brss-ker":
        record["estimate"] = kernel_auc(x, y)
    elif args.method == "dual-el":
        record["estimate"] = mw_auc_dual(x, y, kernel)
    else:
        record["estimate"] = mw_auc(x, y, kernel)
    if args.dual and args.method != "dual-el":
        record["dual_estimate"] = mw_auc_dual(x, y, kernel)
    record.update(_geometry(x, y))
    _emit(record, args.json, out)
    if record["estimate"] in (0.0, 1.0):
        sys.stderr.write("warning: complete separation; the estimate lies on the boundary\n")
    return EXIT_OK


def cmd_ci(args, out) -> int:
    if not 0.0 < args.level < 1.0:
        raise CommandError(f"--level must lie in (0, 1), got {args.level}", EXIT_CONFIG)
    x, y = _load_samples(args.samples)
    kernel = Kernel(args.kernel)
    form = _form_for(args.method, x, y)
    try:
        if args.method == "brss-ker":
            ci = kernel_ci(x, y, args.level)
        elif args.method == "dual-el":
            ci = confidence_interval_dual(x, y, args.level, kernel=kernel, rescale=args.rescale)
        else:
            ci = confidence_interval(x, y, args.level, form=form, kernel=kernel, rescale=args.rescale)
    except DegenerateSampleError as exc:
        raise CommandError(f"degenerate sample: {exc}", EXIT_DEGENERATE) from None
    except InvalidConfigurationError as exc:
        raise CommandError(str(exc), EXIT_DATA) from None
    if ci.boundary:
        raise CommandError(
            f"degenerate sample: all placement values coincide (estimate {ci.point:.6f}); "
            "the likelihood ratio is finite only at the estimate",
            EXIT_DEGENERATE,
        )
    record = {
        "method": ci.method,
        "level": ci.level,
        "estimate": ci.point,
        "lower": ci.lower,
        "upper": ci.upper,
        "length": ci.length,
    }
    if ci.scale_at_point is not None:
        record["threshold"] = chi2_threshold(args.level)
        record["scale_at_estimate"] = ci.scale_at_point
        profile = el_log_ratio_dual if args.method == "dual-el" else el_log_ratio
        for name, end, clipped in (("lower", ci.lower, ci.clipped_lower), ("upper", ci.upper, ci.clipped_upper)):
            ev = profile(x, y, end, form=form, kernel=kernel)
            record[f"lambda_{name}"] = ev.lambda_ if ev.feasible else float("nan")
            record[f"log_ratio_{name}"] = ev.log_ratio
            record[f"clipped_{name}"] = clipped
        record["evaluations"] = ci.iterations
    _emit(record, args.json, out)
    return EXIT_OK


def _print_summaries(summaries, out) -> None:
    fw = max([len("family")] + [len(s.cell.family) for s in summaries]) + 2
    out.write(f"{'method':<9}{'family':<{fw}}{'delta':>6}{'n_x':>5}{'n':>5}{'m':>3}{'rho':>5}"
              f"{'p_y':>5}{'cover':>8}{'length':>9}{'sd':>8}{'degen':>6}\n")
    for s in summaries:
        c = s.cell
        rho = "" if c.rho is None else f"{c.rho:g}"
        p_y = "" if c.p_y is None else f"{c.p_y:g}"
        out.write(f"{c.method:<9}{c.family:<{fw}}{c.delta:>6.3f}{c.n_x:>5}{c.n:>5}{c.set_size:>3}"
                  f"{rho:>5}{p_y:>5}{s.coverage:>8.3f}{s.avg_length:>9.4f}{s.sd_length:>8.4f}"
                  f"{s.degenerate_count:>6}\n")


def cmd_simulate(args, out) -> int:
    try:
        config = load_preset(args.preset) if args.preset else SimulationConfig.load(args.config)
    except OSError as exc:
        raise CommandError(f"cannot read config: {exc}", EXIT_CONFIG) from None
    except (ConfigError, ValueError, TypeError) as exc:
        raise CommandError(f"invalid config: {exc}", EXIT_CONFIG) from None
    if args.replicates is not None:
        config.replicates = args.replicates
    problems = config.problems()
    if problems:
        raise CommandError("invalid config:\n  " + "\n  ".join(problems), EXIT_CONFIG)
    result = run_sweep(config, seed=args.seed, workers=args.workers,
                       return_records=bool(args.per_replicate))
    summaries, records = result if args.per_replicate else (result, None)
    write_summary_csv(args.out, summaries)
    if args.per_replicate:
        write_replicates_csv(args.per_replicate, summaries, records)
    _print_summaries(summaries, out)
    out.write(f"wrote {len(summaries)} rows to {args.out}\n")
    return EXIT_OK


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _method_list(text):
    methods = [v.strip() for v in text.split(",") if v.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}")
    return methods


def cmd_case_study(args, out) -> int:
    try:
        columns = parse_columns(args.columns)
        dataset = load_dataset(args.data, columns, Orientation(args.orientation))
    except OSError as exc:
        raise CommandError(f"cannot read {args.data}: {exc}", EXIT_DATA) from None
    except DatasetError as exc:
        raise CommandError(str(exc), EXIT_DATA) from None
    nx, ny = dataset.counts
    out.write(f"population: {nx} non-diseased, {ny} diseased, {dataset.dropped} rows dropped\n")
    out.write(f"population AUC: {dataset.auc:.6f}\n")
    try:
        result = run_case_sweep(dataset, args.sizes, args.set_sizes, args.methods, args.replicates,
                                args.seed, args.level, workers=args.workers,
                                return_records=bool(args.per_replicate))
    except ConfigError as exc:
        raise CommandError("invalid configuration:\n  " + "\n  ".join(exc.problems), EXIT_CONFIG) from None
    summaries, records = result if args.per_replicate else (result, None)
    write_summary_csv(args.out, summaries)
    if args.per_replicate:
        write_replicates_csv(args.per_replicate, summaries, records)
    _print_summaries(summaries, out)
    out.write(f"wrote {len(summaries)} rows to {args.out}\n")
    return EXIT_OK


def cmd_presets(args, out) -> int:
    if args.name:
        try:
            out.write(load_preset(args.name).dump())
        except ConfigError as exc:
            raise CommandError(str(exc), EXIT_CONFIG) from None
        return EXIT_OK
    for name in preset_names():
        out.write(name + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rss-auc",
        description="Empirical likelihood inference for the AUC from ranked set samples.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def sample_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("samples", help="CSV with columns group,stratum,cycle,value")
        p.add_argument("--method", choices=METHODS, default=None,
                       help="estimator; inferred from sample balance by default")
        p.add_argument("--kernel", choices=[k.value for k in Kernel], default=Kernel.STRICT.value)
        p.add_argument("--json", action="store_true", help="one flat JSON object per line")
        return p

    p = sample_command("estimate", "point estimate of the AUC")
    p.add_argument("--dual", action="store_true", help="also report the diseased-reference estimate")
    p.set_defaults(func=cmd_estimate)

    p = sample_command("ci", "confidence interval for the AUC")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--rescale", action="store_true",
                   help="recompute the scale factor at each candidate instead of fixing it at the estimate")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("simulate", help="Monte Carlo coverage sweep")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML sweep configuration")
    src.add_argument("--preset", help="named preset (see the presets command)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="summary CSV path")
    p.add_argument("--per-replicate", help="optional per-replicate CSV path")
    p.add_argument("--replicates", type=int, help="override the configured replicate count")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("case-study", help="finite-population resampling study")
    p.add_argument("data", help="CSV with marker, disease label and concomitant columns")
    p.add_argument("--columns", help="mapping such as marker=BMI,label=Diabetes,concomitant=Weight")
    p.add_argument("--orientation", choices=[o.value for o in Orientation],
                   default=Orientation.HIGHER_IS_DISEASED.value,
                   help="'lower' negates the marker (low values indicate disease)")
    p.add_argument("--sizes", type=_int_list, default=[20, 40, 60, 80])
    p.add_argument("--set-sizes", type=_int_list, default=[2, 4])
    p.add_argument("--methods", type=_method_list, default=["srs-el", "brss-el"])
    p.add_argument("--replicates", type=int, default=5000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="summary CSV path")
    p.add_argument("--per-replicate", help="optional per-replicate CSV path")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_case_study)

    p = sub.add_parser("presets", help="list presets or print one")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CommandError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
