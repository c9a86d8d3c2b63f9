"""Figure data generation and rendering.

Each generator writes one CSV of plot-ready data and, when rendering is
requested, a PNG next to it. The six standard figures trace the package's
main claims: the normal-density importance curve with its approximations, the
approximation errors, the truncated-series error settling, the measure vs.
variance across families, the error-probability phase curve, and the
Nakagami CDF-fit gaps.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import dmim_quadrature
from .distributions import Exponential, Gamma, Laplace, Nakagami, Normal, Uniform
from .emit import write_csv
from .normal_asym import l_hat, l_tilde1, l_tilde2
from .planner import required_samples
from .rng import derive_seed
from .simulate import McConfig, fit_curve, mc_error_probability

__all__ = ["FIGURES", "generate", "generate_all"]


def _save(fig, path: Path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def normal_dmim_vs_sigma(out_dir: Path, seed: int, reps: int, workers: int,
                         plot: bool) -> list[Path]:
    sigmas = np.logspace(math.log10(0.01), 1.0, 60)
    rows = []
    for s in sigmas:
        l = dmim_quadrature(Normal(0.0, float(s))).value
        rows.append((float(s), l, l_tilde1(float(s)).value, l_tilde2(float(s)).value))
    csv = write_csv(out_dir / "normal_dmim_vs_sigma.csv",
                    ["sigma", "l", "l_tilde1", "l_tilde2"], rows)
    out = [csv]
    if plot:
        arr = np.array(rows)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogx(arr[:, 0], arr[:, 1], "k-", label="l (quadrature)")
        ax.semilogx(arr[:, 0], arr[:, 2], "b--", label=r"$1 - 1/(2\sqrt{\pi}\sigma)$")
        ax.semilogx(arr[:, 0], arr[:, 3], "r:", label=r"$e^{-1/(2\sqrt{\pi}\sigma)}$")
        ax.set_xlabel(r"$\sigma$")
        ax.set_ylabel("importance measure")
        ax.set_ylim(-0.3, 1.05)
        ax.legend()
        png = out_dir / "normal_dmim_vs_sigma.png"
        _save(fig, png)
        out.append(png)
    return out


def normal_approx_error(out_dir: Path, seed: int, reps: int, workers: int,
                        plot: bool) -> list[Path]:
    sigmas = np.logspace(math.log10(0.3), 1.0, 50)
    rows = []
    for s in sigmas:
        l = dmim_quadrature(Normal(0.0, float(s))).value
        a1 = abs(l - l_tilde1(float(s)).value)
        a2 = abs(l - l_tilde2(float(s)).value)
        rows.append((float(s), a1, a2, a1 / l, a2 / l))
    csv = write_csv(out_dir / "normal_approx_error.csv",
                    ["sigma", "abs_err_tilde1", "abs_err_tilde2",
                     "rel_err_tilde1", "rel_err_tilde2"], rows)
    out = [csv]
    if plot:
        arr = np.array(rows)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.loglog(arr[:, 0], arr[:, 3], "b--", label="rel err, linear approx")
        ax.loglog(arr[:, 0], arr[:, 4], "r:", label="rel err, exp approx")
        ax.loglog(arr[:, 0], arr[:, 1], "b-", alpha=0.4, label="abs err, linear approx")
        ax.loglog(arr[:, 0], arr[:, 2], "r-", alpha=0.4, label="abs err, exp approx")
        ax.set_xlabel(r"$\sigma$")
        ax.set_ylabel("error")
        ax.legend()
        png = out_dir / "normal_approx_error.png"
        _save(fig, png)
        out.append(png)
    return out


def normal_truncation_error(out_dir: Path, seed: int, reps: int, workers: int,
                            plot: bool) -> list[Path]:
    sigmas = (0.02, 0.03, 0.05)
    n_grid = range(0, 101)
    refs = {s: dmim_quadrature(Normal(0.0, s)).value for s in sigmas}
    rows = []
    for s in sigmas:
        for n in n_grid:
            err = abs(l_hat(s, n_terms=n).value - refs[s])
            rows.append((s, n, err))
    csv = write_csv(out_dir / "normal_truncation_error.csv",
                    ["sigma", "terms", "abs_err"], rows)
    out = [csv]
    if plot:
        fig, ax = plt.subplots(figsize=(6, 4))
        arr = np.array(rows)
        for s in sigmas:
            sel = arr[arr[:, 0] == s]
            ax.semilogy(sel[:, 1], np.maximum(sel[:, 2], 1e-17),
                        label=rf"$\sigma$ = {s}")
        ax.set_xlabel("terms kept")
        ax.set_ylabel("truncation error")
        ax.legend()
        png = out_dir / "normal_truncation_error.png"
        _save(fig, png)
        out.append(png)
    return out


def _family_with_variance(name: str, var: float):
    sd = math.sqrt(var)
    if name == "uniform":
        return Uniform(0.0, math.sqrt(12.0 * var))
    if name == "normal":
        return Normal(0.0, sd)
    if name == "exponential":
        return Exponential(1.0 / sd)
    if name == "laplace":
        return Laplace(0.0, math.sqrt(2.0) / sd)
    if name == "gamma_0.5":
        return Gamma(0.5, math.sqrt(0.5 / var))
    if name == "gamma_1.5":
        return Gamma(1.5, math.sqrt(1.5 / var))
    raise ValueError(name)


def dmim_vs_variance(out_dir: Path, seed: int, reps: int, workers: int,
                     plot: bool) -> list[Path]:
    variances = np.logspace(-1, 2, 25)
    names = ["uniform", "normal", "exponential", "gamma_0.5", "gamma_1.5", "laplace"]
    rows = []
    for v in variances:
        vals = [dmim_quadrature(_family_with_variance(nm, float(v))).value
                for nm in names]
        rows.append((float(v), *vals))
    csv = write_csv(out_dir / "dmim_vs_variance.csv", ["variance", *names], rows)
    out = [csv]
    if plot:
        arr = np.array(rows)
        fig, ax = plt.subplots(figsize=(6, 4))
        for j, nm in enumerate(names):
            ax.semilogx(arr[:, 0], arr[:, 1 + j], label=nm)
        ax.set_xlabel("variance")
        ax.set_ylabel("importance measure")
        ax.legend()
        png = out_dir / "dmim_vs_variance.png"
        _save(fig, png)
        out.append(png)
    return out


def error_probability_vs_epsilon(out_dir: Path, seed: int, reps: int,
                                 workers: int, plot: bool) -> list[Path]:
    epsilons = np.logspace(-3, -1, 12)
    d = 0.01
    rows = []
    cell = 0
    for sigma in (1.0, 2.0):
        for eps in epsilons:
            n = required_samples(float(eps), sigma, "paper_floor")
            cfg = McConfig(reps=reps, seed=derive_seed(seed, cell), workers=workers)
            rep = mc_error_probability(Normal(0.0, sigma), n, d, cfg)
            rows.append((sigma, float(eps), n, rep.p_hat, rep.ci95_halfwidth))
            cell += 1
    csv = write_csv(out_dir / "error_probability_vs_epsilon.csv",
                    ["sigma", "epsilon", "n", "p_hat", "ci95"], rows)
    out = [csv]
    if plot:
        arr = np.array(rows)
        fig, ax = plt.subplots(figsize=(6, 4))
        for sigma in (1.0, 2.0):
            sel = arr[arr[:, 0] == sigma]
            ax.semilogx(sel[:, 1], sel[:, 3], "o-", label=rf"$\sigma$ = {sigma:g}")
        ax.set_xlabel(r"deviation $\varepsilon$")
        ax.set_ylabel(r"$\hat P\{D_n > 0.01\}$")
        ax.legend()
        png = out_dir / "error_probability_vs_epsilon.png"
        _save(fig, png)
        out.append(png)
    return out


def nakagami_cdf_fit(out_dir: Path, seed: int, reps: int, workers: int,
                     plot: bool) -> list[Path]:
    dist = Nakagami(2.0, 10.0)
    epsilons = (0.1, 0.05, 0.01, 0.001)
    curves = fit_curve(dist, epsilons, seed=seed)
    out = []
    for c in curves:
        rows = zip(c["x"], c["ecdf"], c["cdf"], c["abs_gap"])
        out.append(write_csv(out_dir / f"nakagami_cdf_fit_eps{c['epsilon']:g}.csv",
                             ["x", "ecdf", "cdf", "abs_gap"], rows))
    if plot:
        fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True, sharey=True)
        for ax, c in zip(axes.ravel(), curves):
            ax.plot(c["x"], c["cdf"], "k-", label="reference cdf")
            ax.plot(c["x"], c["ecdf"], "r--", label="empirical cdf")
            ax.set_title(rf"$\varepsilon$ = {c['epsilon']:g}, n = {c['n']}")
            ax.legend(loc="lower right", fontsize=8)
        for ax in axes[-1]:
            ax.set_xlabel("x")
        png = out_dir / "nakagami_cdf_fit.png"
        _save(fig, png)
        out.append(png)
    return out


FIGURES = {
    "normal_dmim_vs_sigma": normal_dmim_vs_sigma,
    "normal_approx_error": normal_approx_error,
    "normal_truncation_error": normal_truncation_error,
    "dmim_vs_variance": dmim_vs_variance,
    "error_probability_vs_epsilon": error_probability_vs_epsilon,
    "nakagami_cdf_fit": nakagami_cdf_fit,
}


def generate(name: str, out_dir: str | Path, seed: int = 0, reps: int = 1000,
             workers: int = 1, plot: bool = True) -> list[Path]:
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return FIGURES[name](out, seed, reps, workers, plot)


def generate_all(out_dir: str | Path, seed: int = 0, reps: int = 1000,
                 workers: int = 1, plot: bool = True) -> list[Path]:
    paths = []
    for name in FIGURES:
        paths.extend(generate(name, out_dir, seed, reps, workers, plot))
    return paths
