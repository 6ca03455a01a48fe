"""Command-line front end.

Subcommands map one-to-one onto the library modules: `levels` and
`partition` expose the exact enumeration and the four partition sums,
`verify` runs the identity suites, `eigen` the spectral routes, `thermo`
the transition curves, and `balls` the diameter table.  Output is CSV or
JSON with the full run configuration echoed into every file, and the same
configuration always produces byte-identical bytes (no timestamps, fixed
float formatting at 17 significant digits).

Exit codes: 0 success, 1 a verification suite reported a violation,
2 usage/validation error, 3 numeric or overflow error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, ball_geometry, thermo, transfer, verify
from .farey_core import level_fractions
from .partition import (
    Model,
    z_farey_chain,
    z_farey_tree,
    z_knauf,
    z_knauf_even,
    z_knauf_odd,
)

_MODEL_FUNCS = {
    Model.FAREY_CHAIN: z_farey_chain,
    Model.KNAUF: z_knauf,
    Model.KNAUF_EVEN: z_knauf_even,
    Model.KNAUF_ODD: z_knauf_odd,
    Model.FAREY_TREE: z_farey_tree,
}


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything that determines the output bytes, echoed into each file."""

    command: str
    model: str | None = None
    k: int | None = None
    k_range: tuple[int, int] | None = None
    beta: float | None = None
    beta_grid: str | None = None
    dim: int | None = None
    tol: float | None = None
    threads: int = 1
    format: str = "csv"
    out: str | None = None
    seed: int = 0

    def echo(self) -> str:
        parts = [f"command={self.command}"]
        for name in ("model", "k", "k_range", "beta", "beta_grid", "dim", "tol",
                     "threads", "format", "seed"):
            val = getattr(self, name)
            if val is None:
                continue
            if name == "k_range":
                val = f"{val[0]}:{val[1]}"
            parts.append(f"{name}={val}")
        parts.append(f"version={__version__}")
        return " ".join(parts)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write(config: RunConfig, columns: list[str], rows: list[dict],
           notes: list[str] | None = None) -> None:
    out = sys.stdout if config.out is None else open(config.out, "w", newline="")
    try:
        if config.format == "json":
            doc = {"config": config.echo(), "columns": columns, "rows": rows}
            if notes:
                doc["notes"] = notes
            json.dump(doc, out, separators=(",", ":"))
            out.write("\n")
        else:
            out.write(f"# {config.echo()}\n")
            for note in notes or ():
                out.write(f"# {note}\n")
            out.write(",".join(columns) + "\n")
            for row in rows:
                out.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _parse_k_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    a, b = int(lo), int(hi)
    if a > b:
        raise ValueError(f"empty level range {text!r}")
    return a, b


def _parse_beta_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"beta grid must be start:stop:count[:log1], got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("beta grid needs at least one point")
    if len(parts) == 3:
        return np.linspace(start, stop, count)
    if parts[3] != "log1":
        raise ValueError(f"unknown grid spacing {parts[3]!r}")
    lo, hi = 1.0 - start, 1.0 - stop
    if lo <= 0.0 or hi <= 0.0:
        raise ValueError("log-toward-1 spacing needs both ends below 1")
    return 1.0 - np.geomspace(lo, hi, count)


def _levels_for(args) -> list[int]:
    if args.k_range is not None:
        a, b = args.k_range
        return list(range(a, b + 1))
    if args.k is None:
        raise ValueError("need --k or --k-range")
    return [args.k]


def _betas_for(args) -> list[float]:
    if args.beta_grid is not None:
        return [float(b) for b in _parse_beta_grid(args.beta_grid)]
    if args.beta is None:
        raise ValueError("need --beta or --beta-grid")
    return [args.beta]


def cmd_levels(config: RunConfig, args) -> int:
    if args.k is None:
        raise ValueError("levels needs --k")
    rows = [
        {"level": f.level, "index": f.index, "numerator": f.numerator,
         "denominator": f.denominator, "fraction": str(f)}
        for f in level_fractions(args.k)
    ]
    _write(config, ["level", "index", "numerator", "denominator", "fraction"], rows)
    return 0


def cmd_partition(config: RunConfig, args) -> int:
    func = _MODEL_FUNCS[Model(args.model)]
    rows = []
    for k in _levels_for(args):
        for beta in _betas_for(args):
            pv = func(k, beta, config.threads)
            rows.append({"model": pv.model.value, "k": pv.level, "beta": pv.beta,
                         "value": pv.value, "terms": pv.terms})
    _write(config, ["model", "k", "beta", "value", "terms"], rows)
    return 0


def cmd_verify(config: RunConfig, args) -> int:
    del args
    results = verify.run_all(config.threads)
    rows = [
        {"suite": r.suite, "cases": r.cases, "failures": r.failures,
         "ok": int(r.ok), "detail": r.detail.replace(",", ";")}
        for r in results
    ]
    _write(config, ["suite", "cases", "failures", "ok", "detail"], rows)
    return 0 if all(r.ok for r in results) else 1


def cmd_eigen(config: RunConfig, args) -> int:
    dim = args.dim or 256
    tol = args.tol or 1e-10
    rows = []
    for beta in _betas_for(args):
        res = transfer.eigen_with_uncertainty(beta, dim, tol)
        rows.append({
            "source": "matrix", "beta": beta, "size": res.dim,
            "lambda": res.lambda_, "residual": res.residual,
            "iterations": res.iterations,
            "uncertainty": res.truncation_uncertainty
            if res.truncation_uncertainty is not None else float("nan"),
        })
        for k in (_levels_for(args) if (args.k is not None or args.k_range is not None) else []):
            lam = transfer.lambda_from_ratio(beta, k)
            rows.append({"source": "ratio", "beta": beta, "size": k, "lambda": lam,
                         "residual": 0.0, "iterations": 0, "uncertainty": 0.0})
    _write(config, ["source", "beta", "size", "lambda", "residual",
                    "iterations", "uncertainty"], rows)
    return 0


def cmd_thermo(config: RunConfig, args) -> int:
    betas = _betas_for(args)
    curve = thermo.thermo_curve(betas, threads=config.threads)
    rows = [
        {"beta": b, "f": f, "u": u, "c": c,
         "lambda": float(np.exp(-b * f)) if 0.0 < b < 1.0 else 1.0,
         "source": curve.lambda_source.value, "uncertainty": unc}
        for b, f, u, c, unc in zip(curve.grid, curve.f, curve.u, curve.c,
                                   curve.uncertainty)
    ]
    notes = []
    window = sorted(1.0 - b for b in betas if 1e-3 <= 1.0 - b <= 1e-1)
    if len(window) >= 3:
        fit = thermo.prellberg_fit(window)
        notes.append(
            f"prellberg: c_hat={fit.c_hat:.6f} stability={fit.stability:.4f} "
            f"heat_flatness={fit.heat_flatness:.4f} window={fit.window[0]:g}:{fit.window[1]:g}"
        )
    else:
        notes.append("prellberg: skipped (needs >= 3 grid points with 1-beta in [1e-3, 1e-1])")
    if min(betas) < 1.0 < max(betas):
        rep = thermo.hausdorff_check(betas, (10, 16, 20))
        notes.append(f"hausdorff: ok={rep.ok}")
    else:
        notes.append("hausdorff: skipped (grid does not bracket beta=1)")
    _write(config, ["beta", "f", "u", "c", "lambda", "source", "uncertainty"],
           rows, notes)
    return 0


def cmd_balls(config: RunConfig, args) -> int:
    if args.k is None:
        raise ValueError("balls needs --k")
    rows = []
    for rec in ball_geometry.ball_records(args.k):
        rows.append({
            "level": rec.level, "index": rec.index,
            "symbols": "".join(map(str, rec.symbols)),
            "exact": rec.exact_diameter,
            "composed": ball_geometry.ball_by_composition(rec.symbols),
            "approx": rec.approx_diameter,
        })
    _write(config, ["level", "index", "symbols", "exact", "composed", "approx"], rows)
    return 0


_COMMANDS = {
    "levels": cmd_levels,
    "partition": cmd_partition,
    "verify": cmd_verify,
    "eigen": cmd_eigen,
    "thermo": cmd_thermo,
    "balls": cmd_balls,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fareyphase",
        description="Partition sums, transfer-operator spectrum, and transition "
                    "thermodynamics of the mediant-fraction lattice models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("levels", "list one fraction level exactly"),
        ("partition", "evaluate partition sums over k/beta grids"),
        ("verify", "run the identity and bound suites"),
        ("eigen", "leading eigenvalue via matrix and ratio routes"),
        ("thermo", "free energy, specific heat, transition fits"),
        ("balls", "ball diameters: exact, composed, derivative approximation"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--k", type=int, default=None, help="single level")
        p.add_argument("--k-range", type=_parse_k_range, default=None,
                       metavar="A:B", help="inclusive level range")
        p.add_argument("--beta", type=float, default=None, help="single beta")
        p.add_argument("--beta-grid", default=None,
                       metavar="START:STOP:COUNT[:log1]",
                       help="beta grid, linear or log-spaced toward 1")
        p.add_argument("--model", default="knauf",
                       choices=sorted(m.value for m in Model),
                       help="partition model selector")
        p.add_argument("--dim", type=int, default=None, metavar="M",
                       help="operator truncation size")
        p.add_argument("--tol", type=float, default=None,
                       help="iteration tolerance")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: FAREYPHASE_THREADS or all cores)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")
    return parser


def _default_threads() -> int:
    env = os.environ.get("FAREYPHASE_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"FAREYPHASE_THREADS must be positive, got {env!r}")
        return n
    return os.cpu_count() or 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        threads = args.threads if args.threads is not None else _default_threads()
        if threads < 1:
            raise ValueError("--threads must be positive")
        config = RunConfig(
            command=args.command,
            model=args.model if args.command == "partition" else None,
            k=args.k,
            k_range=args.k_range,
            beta=args.beta,
            beta_grid=args.beta_grid,
            dim=args.dim,
            tol=args.tol,
            threads=threads,
            format=args.format,
            out=args.out,
        )
        return _COMMANDS[args.command](config, args)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OverflowError, RuntimeError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
