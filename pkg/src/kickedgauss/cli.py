"""Command-line entry point.

Examples
--------
    kickedgauss fidelity-center --K1 1 --K2 1.01 --tau 0.01 --x0 -0.25 --kicks 5000
    kickedgauss preset fig3 --out results
    kickedgauss scattering --config scatter.cfg --kicks 200
    kickedgauss convert --K-prime 1e-30 --T 1e-3 --m 1.4e-25 --Delta 1e-5
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import KINDS, ExperimentConfig, PhysicalParams, from_dimensionless, parse_key_values, to_dimensionless
from .errors import ConfigError, NumericalError
from .experiments import run_experiment
from .presets import PRESETS, run_preset

# flag -> (config field, type)
FLAGS = {
    "--K1": ("K1", float),
    "--K2": ("K2", float),
    "--tau": ("tau", float),
    "--x0": ("x0", float),
    "--p0": ("p0", float),
    "--sigma-t": ("sigma_t", float),
    "--kicks": ("kicks", int),
    "--xb": ("x_b", float),
    "--grid-n": ("grid_n", int),
    "--grid-span": ("grid_span", float),
    "--ensemble": ("ensemble", int),
    "--seed": ("seed", int),
    "--out": ("out", str),
    "--r": ("r", int),
    "--record-every": ("record_every", int),
    "--noise-mode": ("noise_mode", str),
}


def _add_run_flags(p: argparse.ArgumentParser):
    for flag, (dest, typ) in FLAGS.items():
        p.add_argument(flag, dest=dest, type=typ, default=None)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--no-classical", dest="classical", action="store_const", const=False, default=None,
                   help="skip the classical counterpart")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kickedgauss", description="Kicked Gaussian potential: classical and quantum experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        _add_run_flags(sub.add_parser(kind, help=f"run a {kind} experiment"))
    pp = sub.add_parser("preset", help="run a named figure/table preset")
    pp.add_argument("name", help="one of: " + ", ".join(PRESETS))
    _add_run_flags(pp)
    sub.add_parser("presets", help="list preset names")
    cv = sub.add_parser("convert", help="physical units to dimensionless K and tau, or back")
    for name in ("--K-prime", "--T", "--m", "--Delta", "--hbar", "--K", "--tau"):
        cv.add_argument(name, type=float, default=None)
    return ap


def _overrides(args) -> dict:
    out = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            out.update(parse_key_values(fh.read()))
    for dest, _ in FLAGS.values():
        v = getattr(args, dest, None)
        if v is not None:
            out[dest] = v
    if args.classical is not None:
        out["classical"] = args.classical
    return out


def _convert(args) -> dict:
    if args.K is not None or args.tau is not None:
        if None in (args.K, args.tau, args.T, args.m, args.Delta):
            raise ConfigError("inverse conversion needs --K --tau --T --m --Delta")
        ph = from_dimensionless(args.K, args.tau, args.T, args.m, args.Delta)
        return {"K_prime": ph.K_prime, "hbar": ph.hbar}
    if None in (args.K_prime, args.T, args.m, args.Delta):
        raise ConfigError("conversion needs --K-prime --T --m --Delta")
    kw = {} if args.hbar is None else {"hbar": args.hbar}
    K, tau = to_dimensionless(PhysicalParams(args.K_prime, args.T, args.m, args.Delta, **kw))
    return {"K": K, "tau": tau}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            print("\n".join(PRESETS))
            return 0
        if args.command == "convert":
            print(json.dumps(_convert(args)))
            return 0
        over = _overrides(args)
        if args.command == "preset":
            res = run_preset(args.name, **over)
        else:
            over.pop("kind", None)
            cfg = ExperimentConfig.from_dict({"kind": args.command, **over})
            res = run_experiment(cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        # preconditions checked inside the simulation modules
        print(f"error: {e}", file=sys.stderr)
        return 2
    for p in res.paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
