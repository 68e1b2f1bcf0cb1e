"""Command-line interface.

Subcommands: kernel, spectral, construct, jackson-rate, network-rate,
paired-mc, verify-identity.  Every emitter writes CSV with a
``# schema=<name>@1`` first line; ``--out`` writes to a file, otherwise the
CSV goes to stdout.  ``--config <path>`` loads defaults for any flag not
given explicitly (key = value lines, same names as the long flags).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .harness import RateExperiment, load_config, run_jackson_rate, run_network_rate, run_paired_mc
from .jackson import build_kernel, multiplier_from_kernel
from .network import save_network
from .sampler import construct, identity_residual
from .spectral import build_levels, level_sup_constant
from .targets import TORUS, _fmt, default_grid, holder_norm, load_target


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_config(args: argparse.Namespace, converters: dict[str, object]) -> None:
    if not getattr(args, "config", None):
        return
    cfg = load_config(args.config)
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if name not in converters:
            raise SystemExit(f"config key {key!r} is not a flag of this subcommand")
        if getattr(args, name, None) is None:
            setattr(args, name, converters[name](value))


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise SystemExit(f"missing required option(s): {', '.join('--' + n for n in missing)}")


def _cmd_kernel(args) -> int:
    _apply_config(args, {"N": int, "r": int, "dump": str})
    _require(args, ["N", "r"])
    kernel = build_kernel(args.N, args.r)
    mult = multiplier_from_kernel(kernel)
    lines = ["# schema=kernel@1", "k,a_tilde,a_multiplier"]
    for k in range(-args.N, args.N + 1):
        lines.append(f"{k},{_fmt(kernel.coefficient(k))},{_fmt(mult.axis_coefficient(k))}")
    _emit("\n".join(lines) + "\n", args.dump)
    return 0


def _cmd_spectral(args) -> int:
    _apply_config(args, {"target": str, "r": int, "L": int, "grid": int, "out": str})
    _require(args, ["target", "r", "L"])
    target = load_target(args.target)
    grid = default_grid(target.d, TORUS, args.grid)
    decomp = build_levels(target, args.r, args.L, grid)
    holder = holder_norm(target, args.r, grid)
    constant = level_sup_constant(target.d, args.r)
    lines = ["# schema=spectral@1", "level,sup_norm,shell_sum,parseval_residual,sup_bound_lhs,sup_bound_rhs"]
    for level in range(args.L + 1):
        rhs = constant * holder * float(level + 1) ** target.d
        lines.append(
            f"{level},{_fmt(decomp.sup_norms[level])},{_fmt(decomp.shells[level])},"
            f"{_fmt(decomp.parseval_residuals[level])},{_fmt(decomp.sup_norms[level])},{_fmt(rhs)}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_construct(args) -> int:
    _apply_config(
        args,
        {"target": str, "r": int, "m": int, "seed": int, "N": int, "out": str},
    )
    _require(args, ["target", "r", "m", "seed", "out"])
    target = load_target(args.target)
    method = "plain" if args.plain else "stratified"
    net = construct(target, args.r, args.m, args.seed, bandwidth=args.N, method=method)
    save_network(net, args.out)
    return 0


def _rate_experiment(args, mode: str) -> RateExperiment:
    target = load_target(args.target)
    return RateExperiment(
        mode=mode,
        target=target,
        r=args.r,
        sweep=tuple(getattr(args, "sweep", None) or ()),
        seeds=tuple(getattr(args, "seed", None) or ()),
        grid_points=args.grid,
        bandwidth=getattr(args, "N", None),
        bandwidth_exponent=getattr(args, "N_exponent", None),
        m=getattr(args, "m", None),
    )


def _cmd_jackson_rate(args) -> int:
    _apply_config(args, {"target": str, "r": int, "sweep": _int_list, "grid": int, "out": str})
    _require(args, ["target", "r", "sweep"])
    _emit(run_jackson_rate(_rate_experiment(args, "jackson-rate")), args.out)
    return 0


def _cmd_network_rate(args) -> int:
    _apply_config(
        args,
        {
            "target": str,
            "r": int,
            "sweep": _int_list,
            "seed": _int_list,
            "grid": int,
            "N": int,
            "N_exponent": float,
            "out": str,
        },
    )
    _require(args, ["target", "r", "sweep", "seed"])
    _emit(run_network_rate(_rate_experiment(args, "network-rate")), args.out)
    return 0


def _cmd_paired_mc(args) -> int:
    _apply_config(
        args,
        {"target": str, "r": int, "m": int, "seed": _int_list, "grid": int, "N": int, "out": str},
    )
    _require(args, ["target", "r", "m", "seed"])
    _emit(run_paired_mc(_rate_experiment(args, "paired-mc")), args.out)
    return 0


def _cmd_verify_identity(args) -> int:
    _apply_config(
        args,
        {"samples": int, "cmax": float, "panels": int, "seed": int, "out": str},
    )
    _require(args, ["samples", "cmax"])
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    lines = ["# schema=identity@1", "sample,z,c,residual"]
    worst = 0.0
    for i in range(args.samples):
        c = args.cmax * (1.0 - rng.random())
        z = c * (2.0 * rng.random() - 1.0)
        res = identity_residual(z, c, args.panels)
        worst = max(worst, res)
        lines.append(f"{i},{_fmt(z)},{_fmt(c)},{_fmt(res)}")
    lines.append(f"# max_residual={_fmt(worst)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relu-jackson",
        description="Constructive shallow-ReLU approximation of periodic targets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, seed_list=False):
        p.add_argument("--config", help="key = value file supplying defaults for missing flags")
        p.add_argument("--target", help="path to a target description file")
        p.add_argument("--r", type=int, help="smoothing / weight order")
        p.add_argument("--grid", type=int, help="grid points per axis")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        if seed_list:
            p.add_argument("--seed", type=_int_list, help="comma-separated seeds")

    p = sub.add_parser("kernel", help="emit kernel and multiplier coefficients")
    p.add_argument("--config")
    p.add_argument("--N", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--dump", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("spectral", help="per-level norms, shell sums, bound sides")
    common(p)
    p.add_argument("--L", type=int, help="highest dyadic level")
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("construct", help="build one network and write it as CSV")
    common(p)
    p.add_argument("--m", type=int, help="requested width")
    p.add_argument("--seed", type=int)
    p.add_argument("--N", type=int, help="bandwidth override")
    p.add_argument("--plain", action="store_true", help="plain Monte Carlo instead of stratified")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("jackson-rate", help="smoothing error sweep over bandwidths")
    common(p)
    p.add_argument("--sweep", type=_int_list, help="comma-separated bandwidths")
    p.set_defaults(func=_cmd_jackson_rate)

    p = sub.add_parser("network-rate", help="network error sweep over widths")
    common(p, seed_list=True)
    p.add_argument("--sweep", type=_int_list, help="comma-separated widths")
    p.add_argument("--N", type=int, help="bandwidth override")
    p.add_argument(
        "--N-exponent",
        dest="N_exponent",
        type=float,
        help="bandwidth schedule N = floor(m**exponent) instead of the selection rule",
    )
    p.set_defaults(func=_cmd_network_rate)

    p = sub.add_parser("paired-mc", help="stratified vs plain at one width, per seed")
    common(p, seed_list=True)
    p.add_argument("--m", type=int, help="unit budget for both arms")
    p.add_argument("--N", type=int, help="bandwidth override")
    p.set_defaults(func=_cmd_paired_mc)

    p = sub.add_parser("verify-identity", help="quadrature sweep of the ridge identity")
    p.add_argument("--config")
    p.add_argument("--samples", type=int)
    p.add_argument("--cmax", type=float)
    p.add_argument("--panels", type=int, default=2**14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_identity)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
