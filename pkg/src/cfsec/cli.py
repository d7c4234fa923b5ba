"""Command-line interface: ``cfsec <command> [options]``.

Exit status is 0 on success, 2 on invalid input and 1 on internal errors.
Matrices are given inline (``--h "0.9,0.8"``, rows separated by ``;``) or
as a JSON file (``--H-file ch.json`` with ``{"H": [[...]], "P": 10}``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import PowerAllocation, PowerBudget, parse_channel_json
from .errors import CFSecError, InvalidArgumentError, UnrecoverableError
from .experiments import (CURVE_HEADER, MonteCarloConfig, manifest,
                          monte_carlo_positive_fraction, power_rate_curve,
                          rate_region_sweep, region_to_csv, rows_to_csv)
from .lattice_codec import LatticeChain, codec_results_to_csv, combination_error_rate
from .power_alloc import GridSpec, optimize_power
from .secrecy import secrecy_rate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.strip().split(";") if row]
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed matrix {text!r}: {exc}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidArgumentError(f"malformed matrix {text!r}")
    return np.array(rows)


def parse_vector(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InvalidArgumentError(f"malformed vector {text!r}") from None


def _channel(args) -> tuple[np.ndarray, PowerBudget]:
    if args.H_file:
        try:
            text = Path(args.H_file).read_text()
        except OSError as exc:
            raise InvalidArgumentError(f"cannot read {args.H_file}: {exc}") from None
        H, budget = parse_channel_json(text)
        H = H.entries
        if args.power is not None or args.snr_db is not None:
            budget = _budget(args, budget.noise_variance)
    elif args.h:
        H = parse_matrix(args.h)
        budget = _budget(args)
    else:
        raise InvalidArgumentError("give a channel with --h or --H-file")
    return H, budget


def _budget(args, noise_var: float = 1.0) -> PowerBudget:
    if args.power is not None:
        return PowerBudget(args.power, noise_var)
    if args.snr_db is not None:
        return PowerBudget.from_snr_db(args.snr_db, noise_var)
    raise InvalidArgumentError("give --power or --snr-db")


def _emit(args, payload: dict, csv_text: str | None = None) -> None:
    if args.format == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if hasattr(o, "__dataclass_fields__"):
        return {k: getattr(o, k) for k in o.__dataclass_fields__}
    raise TypeError(f"not serialisable: {type(o)}")


def cmd_rate(args):
    H, budget = _channel(args)
    alloc = PowerAllocation(parse_vector(args.alloc)) if args.alloc else None
    rep = secrecy_rate(H, budget, alloc, literal=args.drop_half, leakage=args.leakage)
    d = rep.to_dict()
    csv_text = rows_to_csv(("per_user_secrecy", "r_cf", "mac_sum"),
                           [(rep.per_user_secrecy, rep.r_cf, rep.mac_sum)])
    _emit(args, d, csv_text)


def cmd_optimize_power(args):
    H, budget = _channel(args)
    grid = GridSpec(args.grid_step, args.refine_levels, args.min_power)
    alloc, rep = optimize_power(H, budget, grid, literal=args.drop_half,
                                leakage=args.leakage)
    csv_text = rows_to_csv(("allocation", "per_user_secrecy", "r_cf", "mac_sum"),
                           [(" ".join(map(str, alloc.powers)), rep.per_user_secrecy,
                             rep.r_cf, rep.mac_sum)])
    _emit(args, rep.to_dict(), csv_text)


def cmd_region(args):
    H, budget = _channel(args)
    allocs = {"given": parse_vector(args.alloc)} if args.alloc else None
    grid = GridSpec(args.grid_step, args.refine_levels)
    sweep = rate_region_sweep(H, budget.P, allocs, optimize=args.optimize, grid=grid,
                              leakage=args.leakage)
    payload = {k: {"allocation": v["allocation"], "mac_sum": v["mac_sum"],
                   "vertices": [list(p) for p in v["region"].vertices],
                   "points": v["points"]} for k, v in sweep.items()}
    _emit(args, payload, region_to_csv(sweep))


def cmd_curve(args):
    if not (0 < args.pmin < args.pmax) or args.points < 1:
        raise InvalidArgumentError("need 0 < pmin < pmax and points >= 1")
    grid = np.logspace(np.log10(args.pmin), np.log10(args.pmax), args.points)
    rows = power_rate_curve(grid)
    payload = {"header": list(CURVE_HEADER), "rows": [list(r) for r in rows]}
    fmt = args.format or ("csv" if args.out else "json")
    args.format = fmt
    _emit(args, payload, rows_to_csv(CURVE_HEADER, rows))


def cmd_monte_carlo(args):
    cfg_dict = {}
    if args.config:
        try:
            cfg_dict = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgumentError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(cfg_dict, dict):
            raise InvalidArgumentError("config must be a JSON object")
    overrides = {"trials": args.trials, "base_seed": args.seed, "snr_db": args.snr_db,
                 "L": args.users, "antenna_config": args.antennas,
                 "n_antennas": args.n_antennas, "grid_step": args.grid_step_mc,
                 "refine_levels": args.refine_levels_mc, "leakage": args.leakage}
    cfg_dict.update({k: v for k, v in overrides.items() if v is not None})
    if args.power_opt:
        cfg_dict["power_opt"] = True
    if args.drop_half:
        cfg_dict["literal"] = True
    cfg = MonteCarloConfig.from_dict(cfg_dict)
    res = monte_carlo_positive_fraction(cfg)
    outputs = []
    if args.out:
        Path(args.out).write_text(res.records_csv())
        outputs.append(args.out)
    doc = json.loads(manifest("monte-carlo", cfg.to_dict(), outputs))
    doc["result"] = {"positive_fraction": res.positive_fraction,
                     "mean_secrecy_rate": res.mean_secrecy_rate,
                     "std_error": res.std_error, "trials": cfg.trials}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(str(args.out) + ".manifest.json").write_text(text)
    sys.stdout.write(text)


def cmd_codec_demo(args):
    if args.users < 2:
        raise InvalidArgumentError("need at least 2 users")
    P = 10 ** (args.snr_db / 10)
    chain = LatticeChain(args.n, args.q, P)
    h = np.ones((1, args.users))
    res = combination_error_rate(h, np.ones(args.users, dtype=int), chain, args.trials,
                                 base_seed=args.seed or 0)
    payload = {"snr_db": res.snr_db, "q": res.q, "n": res.n, "L": res.L, "a": list(res.a),
               "trials": res.trials, "errors": res.errors, "error_rate": res.error_rate}
    _emit(args, payload, codec_results_to_csv([res]))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cfsec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cfsec {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, channel=True):
        if channel:
            sp.add_argument("--h", help="inline channel, e.g. '0.9,0.8' or '1,0;0,1'")
            sp.add_argument("--H-file", dest="H_file", help="JSON channel file")
        sp.add_argument("--power", type=float, help="per-user power budget P (W)")
        sp.add_argument("--snr-db", type=float, help="P / noise variance in dB")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--leakage", choices=("budget", "allocated"), default="budget")
        sp.add_argument("--drop-half", action="store_true",
                        help="drop the 1/2 in the computation rate")

    sp = sub.add_parser("rate", help="secrecy rate for a channel and allocation")
    common(sp)
    sp.add_argument("--alloc", help="per-user powers, e.g. '7.7,10'")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("optimize-power", help="grid-search the power allocation")
    common(sp)
    sp.add_argument("--grid-step", type=float, default=0.1)
    sp.add_argument("--refine-levels", type=int, default=0)
    sp.add_argument("--min-power", type=float, default=None)
    sp.set_defaults(func=cmd_optimize_power)

    sp = sub.add_parser("region", help="MAC region and compute-and-forward points (2 users)")
    common(sp)
    sp.add_argument("--alloc")
    sp.add_argument("--optimize", action="store_true")
    sp.add_argument("--grid-step", type=float, default=0.1)
    sp.add_argument("--refine-levels", type=int, default=0)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("curve", help="two-way power-rate curves against baselines")
    common(sp, channel=False)
    sp.add_argument("--pmin", type=float, default=0.1)
    sp.add_argument("--pmax", type=float, default=1000.0)
    sp.add_argument("--points", type=int, default=50)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("monte-carlo", help="positive-secrecy fraction over random channels")
    common(sp, channel=False)
    sp.add_argument("--config", help="JSON file with MonteCarloConfig fields")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--users", type=int)
    sp.add_argument("--antennas", choices=("siso", "miso", "simo"))
    sp.add_argument("--n-antennas", type=int)
    sp.add_argument("--power-opt", action="store_true")
    sp.add_argument("--grid-step", dest="grid_step_mc", type=float)
    sp.add_argument("--refine-levels", dest="refine_levels_mc", type=int)
    sp.set_defaults(func=cmd_monte_carlo, leakage=None)

    sp = sub.add_parser("codec-demo", help="nested lattice combination decoding error rate")
    common(sp, channel=False)
    sp.add_argument("--q", type=int, default=4)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--users", type=int, default=2)
    sp.add_argument("--trials", type=int, default=1000)
    sp.set_defaults(func=cmd_codec_demo, snr_db=None)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "codec-demo" and args.snr_db is None:
            raise InvalidArgumentError("codec-demo needs --snr-db")
        args.func(args)
    except (UsageError, InvalidArgumentError, UnrecoverableError) as exc:
        print(f"cfsec: error: {exc}", file=sys.stderr)
        return 2
    except CFSecError as exc:
        print(f"cfsec: internal error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"cfsec: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
