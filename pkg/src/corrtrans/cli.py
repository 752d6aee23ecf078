"""Command-line front-end.

Subcommands: transform, delta, ranges, exact, simulate, table.
Exit codes: 0 success, 1 usage error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import models as mo
from . import montecarlo as mc
from . import pearson as pe
from .specfun import IntegrationError, normal_quantile

__all__ = ["main", "RunConfig"]

CSV_FIELDS = [
    "model", "transform", "alpha", "rho", "n", "N", "K", "seed",
    "eps_mean", "eps_sd", "eps_se", "alpha_hat_mean",
]


@dataclass(frozen=True)
class RunConfig:
    """Flat simulation config, read from a JSON object of the same shape."""

    model: str
    alphas: tuple[float, ...]
    rhos: tuple[float, ...]
    ns: tuple[int, ...]
    N: int
    K: int
    master_seed: int
    transforms: tuple[str, ...]
    output_path: str
    format: str = "csv"

    @staticmethod
    def from_json(path: str | Path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return RunConfig(
            model=raw["model"],
            alphas=tuple(raw["alphas"]),
            rhos=tuple(raw["rhos"]),
            ns=tuple(int(n) for n in raw["ns"]),
            N=int(raw["N"]),
            K=int(raw["K"]),
            master_seed=int(raw["master_seed"]),
            transforms=tuple(raw.get("transforms",
                                     ("identity", "fisher", "optimal"))),
            output_path=raw["output_path"],
            format=raw.get("format", "csv"),
        )

    def grid(self) -> mc.ExperimentGrid:
        return mc.ExperimentGrid(
            model=self.model, alphas=self.alphas, rhos=self.rhos, ns=self.ns,
            N=self.N, K=self.K, master_seed=self.master_seed,
            transforms=self.transforms,
        )


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="corrtrans")
    parser.add_argument("--digits", type=int, default=6,
                        help="significant digits for printed values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="evaluate the optimal transform")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float)
    group.add_argument("--z", type=float)
    p.add_argument("--rho", type=float, required=True)

    p = sub.add_parser("delta", help="leading error term for a transform")
    p.add_argument("--model", required=True)
    p.add_argument("--transform", required=True,
                   choices=["identity", "fisher", "optimal"])
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--z-ref", type=float, default=None)

    p = sub.add_parser("ranges", help="dominance range of significance levels")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--vs", required=True, choices=["identity", "fisher"])

    p = sub.add_parser("exact", help="exact SquareV rejection probability")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--transform", required=True,
                   choices=["identity", "fisher", "optimal"])

    p = sub.add_parser("simulate", help="run a grid from a JSON config")
    p.add_argument("--config", required=True)

    p = sub.add_parser("table", help="render a stored run as text")
    p.add_argument("--input", required=True)
    p.add_argument("--plot-data", action="store_true",
                   help="emit (n, eps*sqrt(n)) series per transform as CSV")
    return parser


def _fmt(value: float, digits: int) -> str:
    return f"{value:.{digits}g}"


def _cmd_transform(args, digits: int) -> None:
    model = mo.get_model(args.model)
    z = args.z if args.z is not None else normal_quantile(1.0 - args.alpha)
    psi = mo.psi_closed(model, z, args.rho)
    dpsi = (1.0 - args.rho ** 2) ** mo.optimal_exponent(model, z)
    print(f"psi({_fmt(args.rho, digits)}) = {_fmt(psi, digits)}")
    print(f"psi'({_fmt(args.rho, digits)}) = {_fmt(dpsi, digits)}")


def _cmd_delta(args, digits: int) -> None:
    model = mo.get_model(args.model)
    z_ref = args.z_ref
    if args.transform == "optimal" and z_ref is None:
        raise _UsageError("delta --transform optimal requires --z-ref")
    closed = mo.delta_closed(model, args.transform, args.z, args.rho, z_ref)
    t = mo.transform_for(model, args.transform, z_ref)
    generic = pe.delta_psi(model.moments, t, args.rho, args.z)
    print(f"closed-form:      {_fmt(closed, digits)}")
    print(f"generic pipeline: {_fmt(generic, digits)}")


def _cmd_ranges(args, digits: int) -> None:
    model = mo.get_model(args.model)
    interval = mo.dominance_range(model, args.alpha, args.vs)
    print(f"({interval.lo:.5f}, {interval.hi:.5f})")


def _cmd_exact(args, digits: int) -> None:
    z_alpha = normal_quantile(1.0 - args.alpha)
    t = mo.transform_for(mo.SQUAREV, args.transform, z_alpha)
    prob = mo.squarev_exact_rejection(args.rho, args.n, t, args.alpha)
    eps = prob / args.alpha - 1.0
    print(f"rejection probability = {_fmt(prob, digits)}")
    print(f"relative error eps    = {_fmt(eps, digits)}")


def _cmd_simulate(args, digits: int) -> None:
    path = Path(args.config)
    if not path.is_file():
        raise _UsageError(f"config file not found: {path}")
    try:
        cfg = RunConfig.from_json(path)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise _UsageError(f"bad config: {exc}")
    results = mc.run_grid(cfg.grid())
    rows = []
    for (kind, alpha, rho, n), cell in sorted(results.items()):
        hat_mean = math.fsum(cell.alpha_hats) / len(cell.alpha_hats)
        rows.append({
            "model": cfg.model, "transform": kind, "alpha": alpha,
            "rho": rho, "n": n, "N": cfg.N, "K": cfg.K,
            "seed": cfg.master_seed, "eps_mean": repr(cell.eps_mean),
            "eps_sd": repr(cell.eps_sd), "eps_se": repr(cell.eps_se),
            "alpha_hat_mean": repr(hat_mean),
        })
    out = Path(cfg.output_path)
    if cfg.format == "csv":
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
    elif cfg.format == "json":
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    else:
        raise _UsageError(f"unknown output format {cfg.format!r}")
    print(f"wrote {len(rows)} rows to {out}")


def _read_table(path: Path) -> list[dict]:
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _cmd_table(args, digits: int) -> None:
    path = Path(args.input)
    if not path.is_file():
        raise _UsageError(f"input file not found: {path}")
    rows = _read_table(path)
    transforms = sorted({r["transform"] for r in rows})
    if args.plot_data:
        # (n, eps * sqrt(n)) series, one per (transform, alpha, rho)
        print("transform,alpha,rho,n,eps_sqrt_n")
        for r in sorted(rows, key=lambda r: (r["transform"], float(r["alpha"]),
                                             float(r["rho"]), int(r["n"]))):
            n = int(r["n"])
            scaled = float(r["eps_mean"]) * math.sqrt(n)
            print(f"{r['transform']},{r['alpha']},{r['rho']},{n},"
                  f"{_fmt(scaled, digits)}")
        return
    keys = sorted({(float(r["alpha"]), float(r["rho"]), int(r["n"]))
                   for r in rows})
    by_cell = {(r["transform"], float(r["alpha"]), float(r["rho"]),
                int(r["n"])): r for r in rows}
    header = f"{'alpha':>6} {'rho':>5} {'n':>7}"
    for kind in transforms:
        header += f"  {kind:>24}"
    print(header)
    for alpha, rho, n in keys:
        line = f"{alpha:>6g} {rho:>5g} {n:>7d}"
        for kind in transforms:
            r = by_cell.get((kind, alpha, rho, n))
            if r is None:
                line += f"  {'-':>24}"
            else:
                entry = (f"{_fmt(float(r['eps_mean']), digits)} "
                         f"+/- {_fmt(float(r['eps_se']), digits)}")
                line += f"  {entry:>24}"
        print(line)


_COMMANDS = {
    "transform": _cmd_transform,
    "delta": _cmd_delta,
    "ranges": _cmd_ranges,
    "exact": _cmd_exact,
    "simulate": _cmd_simulate,
    "table": _cmd_table,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        _COMMANDS[args.command](args, args.digits)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, pe.DegenerateModelError, ValueError,
            OverflowError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
