"""Experiment orchestration: single runs, benchmark suites, CSV emission."""

import csv
import io as _io
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import io as nio
from .datasets import (GradientField, add_noise, gen_peaks, gen_phantom,
                       gen_sombrero, gen_vase, inject_outliers)
from .domain import build_domain
from .fastmarching import FmConfig, integrate_fm
from .frequency import embed_masked, integrate_dct, integrate_fft
from .krylov import SolverConfig, build_preconditioner, cg_solve
from .metrics import mse_opt
from .poisson import assemble, compatibilize, robustify_gradient

_GENERATORS = {"sombrero": gen_sombrero, "peaks": gen_peaks,
               "vase": gen_vase, "phantom": gen_phantom}

METHODS = ("fm", "cg", "pcg", "fm-pcg", "fft", "dct")


@dataclass
class RunSpec:
    dataset: str = "sombrero"        # built-in name; file runs fill the *_path fields
    size: int = 256
    method: str = "fm-pcg"
    preconditioner: str = "mic"      # used by pcg / fm-pcg
    tau: float = 1e-3
    alpha: float = 1e-3
    tol: float = 1e-4
    max_iter: Optional[int] = None
    lam: float = 1e5
    auxiliary: str = "geodesic"
    robustify: bool = False
    noise_pct: float = 0.0
    outlier_frac: float = 0.0
    outlier_mag: float = 10.0
    seed: int = 0
    gradient_path: Optional[str] = None
    mask_path: Optional[str] = None
    truth_path: Optional[str] = None
    out: Optional[str] = None
    error_cap: float = 1.0


@dataclass
class RunResult:
    depth: np.ndarray
    metrics: Optional[object]
    stats: Optional[object]
    stage_times: dict = field(default_factory=dict)
    spec: Optional[RunSpec] = None


def load_inputs(spec):
    """Resolve a RunSpec to (domain, gradient, truth-or-None) with corruption applied."""
    if spec.gradient_path is not None:
        g = nio.read_gradient(spec.gradient_path)
        if spec.mask_path is not None:
            mask = nio.read_mask(spec.mask_path)
        else:
            mask = np.ones(g.p.shape, dtype=bool)
        domain = build_domain(mask)
        truth = nio.read_pfm(spec.truth_path) if spec.truth_path else None
    else:
        if spec.dataset not in _GENERATORS:
            raise ValueError("unknown dataset %r" % (spec.dataset,))
        ds = _GENERATORS[spec.dataset](spec.size)
        domain, g, truth = ds.domain, ds.gradient, ds.ground_truth

    if spec.outlier_frac > 0:
        g = inject_outliers(g, spec.outlier_frac, spec.outlier_mag, seed=spec.seed)
    if spec.noise_pct > 0:
        g = add_noise(g, spec.noise_pct, seed=spec.seed + 1)
    return domain, g, truth


def run(spec):
    """Execute one integration run; writes artifacts when spec.out is set."""
    if spec.method not in METHODS:
        raise ValueError("unknown method %r" % (spec.method,))
    times = {}
    t0 = time.perf_counter()
    domain, g, truth = load_inputs(spec)
    times["generate"] = time.perf_counter() - t0

    if spec.robustify:
        t = time.perf_counter()
        rg = robustify_gradient(domain, g)
        g = GradientField(p=rg.p_bar, q=rg.q_bar)
        times["robustify"] = time.perf_counter() - t

    stats = None
    depth_fm = None
    if spec.method in ("fm", "fm-pcg"):
        t = time.perf_counter()
        depth_fm = integrate_fm(g, domain,
                                FmConfig(lam=spec.lam, auxiliary=spec.auxiliary))
        times["fm"] = time.perf_counter() - t

    if spec.method == "fm":
        depth = depth_fm
    elif spec.method in ("fft", "dct"):
        t = time.perf_counter()
        rect = embed_masked(domain, g)
        depth = integrate_fft(rect) if spec.method == "fft" else integrate_dct(rect)
        times["solve"] = time.perf_counter() - t
    else:
        t = time.perf_counter()
        system = compatibilize(assemble(domain, g))
        times["system"] = time.perf_counter() - t

        cfg = SolverConfig(tol=spec.tol, max_iter=spec.max_iter,
                           preconditioner="none" if spec.method == "cg"
                           else spec.preconditioner,
                           tau=spec.tau, alpha=spec.alpha)
        t = time.perf_counter()
        factor = build_preconditioner(system, cfg)
        times["precond"] = time.perf_counter() - t

        x0 = domain.flat(depth_fm) if depth_fm is not None else None
        x, stats = cg_solve(system, x0=x0, factor=factor, cfg=cfg)
        times["solve"] = stats.wall_time
        depth = domain.grid(x)

    times["total"] = time.perf_counter() - t0
    metrics = mse_opt(depth, truth, domain) if truth is not None else None
    result = RunResult(depth=depth, metrics=metrics, stats=stats,
                       stage_times=times, spec=spec)
    if spec.out:
        _write_artifacts(result, domain, truth)
    return result


def _write_artifacts(result, domain, truth):
    import os

    out = result.spec.out
    os.makedirs(out, exist_ok=True)
    nio.write_pfm(os.path.join(out, "depth.pfm"), result.depth)
    nio.write_mask(os.path.join(out, "mask.png"), domain.mask)
    payload = {"spec": asdict(result.spec), "stage_times": result.stage_times}
    if result.metrics is not None:
        payload["metrics"] = {"mse": result.metrics.mse, "ssim": result.metrics.ssim,
                              "offset": result.metrics.offset_used}
    if result.stats is not None:
        payload["solver"] = {"iterations": result.stats.iterations,
                             "converged": bool(result.stats.converged),
                             "final_relres": float(result.stats.residual_history[-1])}
    nio.write_manifest(os.path.join(out, "run.json"), payload)
    if truth is not None:
        err = np.where(domain.mask,
                       np.abs(result.depth + result.metrics.offset_used - truth), 0.0)
        nio.write_error_map(os.path.join(out, "error.png"), err, result.spec.error_cap)


# benchmark CSV columns; t_* columns are excluded from determinism comparisons
CSV_FIELDS = ("dataset", "size", "method", "preconditioner", "tau", "alpha",
              "seed", "noise_pct", "outlier_frac", "robustify", "iterations",
              "converged", "mse", "ssim", "t_system", "t_precond", "t_solve",
              "t_total", "error")
TIME_FIELDS = ("t_system", "t_precond", "t_solve", "t_total")


def _fmt(x):
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def benchmark(suite, path=None):
    """Run a list of RunSpecs; returns CSV text (and writes it when path given)."""
    rows = []
    for spec in suite:
        row = {"dataset": spec.dataset, "size": spec.size, "method": spec.method,
               "preconditioner": spec.preconditioner if spec.method in ("pcg", "fm-pcg")
               else "none",
               "tau": spec.tau, "alpha": spec.alpha, "seed": spec.seed,
               "noise_pct": spec.noise_pct, "outlier_frac": spec.outlier_frac,
               "robustify": spec.robustify, "error": ""}
        try:
            res = run(spec)
            row["iterations"] = res.stats.iterations if res.stats else 0
            row["converged"] = bool(res.stats.converged) if res.stats else True
            row["mse"] = res.metrics.mse if res.metrics else float("nan")
            row["ssim"] = res.metrics.ssim if res.metrics else float("nan")
            row["t_system"] = res.stage_times.get("system", 0.0)
            row["t_precond"] = res.stage_times.get("precond", 0.0)
            row["t_solve"] = res.stage_times.get("solve", 0.0)
            row["t_total"] = res.stage_times.get("total", 0.0)
        except Exception as exc:  # partial failures become rows with an error column
            row.update(iterations=0, converged=False, mse=float("nan"),
                       ssim=float("nan"), t_system=0.0, t_precond=0.0,
                       t_solve=0.0, t_total=0.0, error=str(exc))
        rows.append(row)

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in CSV_FIELDS])
    text = buf.getvalue()
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def strip_time_columns(csv_text):
    """Drop wall-time columns (for determinism comparisons of benchmark output)."""
    rows = list(csv.reader(_io.StringIO(csv_text)))
    keep = [i for i, name in enumerate(rows[0]) if name not in TIME_FIELDS]
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row in rows:
        writer.writerow([row[i] for i in keep])
    return out.getvalue()


def suite_preconditioners(sizes=(256,), dataset="phantom", warm=False, seed=0):
    """The preconditioner sweep: none, then MIC with decreasing drop tolerance."""
    specs = []
    method = "fm-pcg" if warm else "pcg"
    for n in sizes:
        specs.append(RunSpec(dataset=dataset, size=n, seed=seed,
                             method="fm-pcg" if warm else "cg",
                             preconditioner="none"))
        for tau in (0.0, 1e-1, 1e-2, 1e-3):
            specs.append(RunSpec(dataset=dataset, size=n, method=method,
                                 preconditioner="mic", tau=tau, seed=seed))
    return specs


def suite_warmstart(sizes=(256,), dataset="phantom", seed=0):
    cold = suite_preconditioners(sizes, dataset, warm=False, seed=seed)
    warm = suite_preconditioners(sizes, dataset, warm=True, seed=seed)
    return cold + warm


def suite_datasets(size=256, seed=0):
    specs = []
    for name in ("sombrero", "peaks", "vase"):
        for method in ("fft", "dct", "fm", "fm-pcg"):
            specs.append(RunSpec(dataset=name, size=size, method=method, seed=seed))
    return specs


def suite_noise(size=256, dataset="sombrero", seeds=(0, 1, 2, 3, 4)):
    specs = []
    for pct in (0, 5, 10, 15, 20):
        for s in seeds:
            for method in ("fm", "fm-pcg"):
                specs.append(RunSpec(dataset=dataset, size=size, method=method,
                                     noise_pct=pct, seed=s))
    return specs


SUITES = {"preconditioners": suite_preconditioners, "warmstart": suite_warmstart,
          "datasets": suite_datasets, "noise": suite_noise}
