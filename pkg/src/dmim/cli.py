"""Command-line interface.

Commands: compute (importance measure of one spec), plan (sample sizes and
KS thresholds), table2 (error-probability validation grid), fit (ECDF-vs-CDF
curves), figures (regenerate the standard figure set). JSON results are
wrapped in an envelope {schema_version, command, inputs, results}; delimited
results go to --out (or stdout) with an envelope pointing at the files, and
--plot renders a PNG alongside.

Exit codes: 0 success, 2 input error, 3 numerical failure. The DMIM_SEED
environment variable overrides the default seed of sampling commands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import figures as figures_mod
from .core import (
    DmimEstimate, QuadratureConfig, SeriesConfig, dmim_auto, dmim_closed_form,
    dmim_quadrature, dmim_series, dmim_via_renyi,
)
from .distributions import from_json
from .emit import csv_text, dump_json, envelope
from .errors import (
    DivergentIntegralError, MissingVarianceError, NoClosedFormError,
    NonConvergenceError, QuadratureError, UnboundedTailError,
    UnsupportedOperationError,
)
from .planner import d_from, make_plan, required_samples
from .simulate import TABLE2_FAMILIES, McConfig, fit_curve, reproduce_table2

_NUMERICAL_ERRORS = (DivergentIntegralError, NonConvergenceError,
                     QuadratureError, UnboundedTailError)
_INPUT_ERRORS = (ValueError, KeyError, UnsupportedOperationError,
                 MissingVarianceError, NoClosedFormError)


def _default_seed() -> int:
    return int(os.environ.get("DMIM_SEED", "0"))


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_dist(raw: str):
    return from_json(json.loads(raw))


def cmd_compute(args) -> int:
    dist = _parse_dist(args.dist)
    scfg = SeriesConfig(max_terms=args.max_terms, rel_tol=args.rel_tol)
    qcfg = QuadratureConfig(abs_tol=args.abs_tol, tail_mass=args.tail_mass)
    if args.engine == "auto":
        est = dmim_auto(dist, scfg, qcfg)
    elif args.engine == "quadrature":
        est = dmim_quadrature(dist, qcfg)
    elif args.engine == "series":
        est = dmim_series(dist, scfg)
    elif args.engine == "closed":
        est = dmim_closed_form(dist)
    else:
        est = dmim_via_renyi(dist, scfg)
    results = est.to_json()
    results["engine"] = est.method if isinstance(est, DmimEstimate) else est.kind
    env = envelope("compute", {"dist": json.loads(args.dist), "engine": args.engine},
                   results)
    _emit(dump_json(env), args.out)
    return 0


def cmd_plan(args) -> int:
    if (args.sigma is None) == (args.dist is None):
        raise ValueError("provide exactly one of --sigma or --dist")
    if args.dist is not None:
        sigma = math.sqrt(_parse_dist(args.dist).variance())
    else:
        sigma = args.sigma
    rounding = args.rounding.replace("-", "_")
    inputs = {"epsilon": args.epsilon, "sigma": sigma, "rounding": args.rounding,
              "beta": args.beta}
    if args.beta is None:
        results = {"epsilon": args.epsilon, "sigma": sigma,
                   "n": required_samples(args.epsilon, sigma, rounding),
                   "rounding": rounding}
    else:
        results = make_plan(args.epsilon, sigma, args.beta, rounding).to_json()
    _emit(dump_json(envelope("plan", inputs, results)), args.out)
    return 0


def cmd_table2(args) -> int:
    reps = args.reps if args.reps is not None else (10000 if args.profile == "paper" else 1000)
    seed = args.seed if args.seed is not None else _default_seed()
    families = args.families or list(TABLE2_FAMILIES)
    rows = reproduce_table2(families=families,
                            cfg=McConfig(reps=reps, seed=seed, workers=args.workers))
    header = ["family", "epsilon", "sigma", "n", "beta", "p_hat", "ci95"]
    text = csv_text(header, [[r[k] for k in header] for r in rows])
    if args.out:
        _emit(text, args.out)
        outputs = {"csv": args.out}
        if args.plot:
            png = str(Path(args.out).with_suffix(".png"))
            _plot_table2(rows, png)
            outputs["png"] = png
        env = envelope("table2", {"reps": reps, "seed": seed, "families": families},
                       outputs)
        sys.stdout.write(dump_json(env) + "\n")
    else:
        if args.plot:
            raise ValueError("--plot needs --out to place the image next to the csv")
        sys.stdout.write(text)
    return 0


def _plot_table2(rows, png: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, sigma in zip(axes, sorted({r["sigma"] for r in rows})):
        for family in sorted({r["family"] for r in rows}):
            sel = sorted((r for r in rows
                          if r["family"] == family and r["sigma"] == sigma),
                         key=lambda r: r["epsilon"])
            ax.semilogx([r["epsilon"] for r in sel], [r["p_hat"] for r in sel],
                        "o-", label=family)
        ax.set_title(f"sigma = {sigma:g}")
        ax.set_xlabel("deviation epsilon")
    axes[0].set_ylabel("P{D_n > 0.01}")
    axes[0].legend()
    fig.savefig(png, dpi=150, bbox_inches="tight")
    plt.close(fig)


def cmd_fit(args) -> int:
    dist = _parse_dist(args.dist)
    seed = args.seed if args.seed is not None else _default_seed()
    curves = fit_curve(dist, args.epsilons, seed=seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for c in curves:
        rows = zip(c["x"], c["ecdf"], c["cdf"], c["abs_gap"])
        p = out_dir / f"fit_eps{c['epsilon']:g}.csv"
        _emit(csv_text(["x", "ecdf", "cdf", "abs_gap"], rows), str(p))
        paths.append(str(p))
    outputs = {"csv": paths,
               "sup_gap": {f"{c['epsilon']:g}": c["sup_gap"] for c in curves}}
    if args.plot:
        png = out_dir / "fit.png"
        _plot_fit(curves, png)
        outputs["png"] = str(png)
    env = envelope("fit", {"dist": json.loads(args.dist),
                           "epsilons": list(args.epsilons), "seed": seed}, outputs)
    sys.stdout.write(dump_json(env) + "\n")
    return 0


def _plot_fit(curves, png: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curves[0]["x"], curves[0]["cdf"], "k-", lw=2, label="reference cdf")
    for c in curves:
        ax.plot(c["x"], c["ecdf"], "--", lw=1,
                label=f"ecdf, eps = {c['epsilon']:g} (n = {c['n']})")
    ax.set_xlabel("x")
    ax.set_ylabel("cdf")
    ax.legend(fontsize=8)
    fig.savefig(png, dpi=150, bbox_inches="tight")
    plt.close(fig)


def cmd_figures(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    names = args.names or sorted(figures_mod.FIGURES)
    paths = []
    for name in names:
        paths.extend(figures_mod.generate(name, args.out_dir, seed=seed,
                                          reps=args.reps, workers=args.workers,
                                          plot=not args.no_plot))
    env = envelope("figures", {"names": names, "seed": seed, "reps": args.reps},
                   {"files": [str(p) for p in paths]})
    sys.stdout.write(dump_json(env) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dmim", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="importance measure of one distribution spec")
    c.add_argument("--dist", required=True, help='JSON: {"family": ..., "params": {...}}')
    c.add_argument("--engine", default="auto",
                   choices=["auto", "quadrature", "series", "closed", "renyi"])
    c.add_argument("--abs-tol", type=float, default=1e-10)
    c.add_argument("--tail-mass", type=float, default=1e-12)
    c.add_argument("--rel-tol", type=float, default=1e-14)
    c.add_argument("--max-terms", type=int, default=200)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("plan", help="required sample size, optional KS threshold")
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--sigma", type=float)
    c.add_argument("--dist", help="derive sigma from this spec's variance")
    c.add_argument("--rounding", default="ceil", choices=["ceil", "paper-floor"])
    c.add_argument("--beta", type=float)
    c.add_argument("--out")
    c.set_defaults(func=cmd_plan)

    c = sub.add_parser("table2", help="error-probability validation grid (CSV)")
    c.add_argument("--reps", type=int, default=None)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--families", nargs="+", choices=list(TABLE2_FAMILIES))
    c.add_argument("--profile", default="desk", choices=["desk", "paper"],
                   help="desk: 1000 reps; paper: 10000 reps (unless --reps)")
    c.add_argument("--out")
    c.add_argument("--plot", action="store_true")
    c.set_defaults(func=cmd_table2)

    c = sub.add_parser("fit", help="ECDF-vs-CDF fit curves per deviation (CSV)")
    c.add_argument("--dist", required=True)
    c.add_argument("--epsilons", type=float, nargs="+",
                   default=[0.1, 0.05, 0.01, 0.001])
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--out-dir", default=".")
    c.add_argument("--plot", action="store_true")
    c.set_defaults(func=cmd_fit)

    c = sub.add_parser("figures", help="regenerate standard figure data and images")
    c.add_argument("--out-dir", default="figures")
    c.add_argument("--names", nargs="+", choices=sorted(figures_mod.FIGURES))
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--reps", type=int, default=1000)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--no-plot", action="store_true")
    c.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        if args.command == "compute" and args.engine != "quadrature":
            sys.stderr.write("hint: --engine quadrature evaluates this spec "
                             "by direct integration\n")
        return 3
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"input error: bad JSON: {exc}\n")
        return 2
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
