"""Command line interface: generate, integrate, benchmark, ps."""

import argparse
import json
import os
import sys

import numpy as np

from . import io as nio
from .datasets import add_noise, inject_outliers
from .domain import build_domain
from .fastmarching import FmConfig, integrate_fm
from .metrics import mse_opt
from .photometric import (PsProblem, estimate_normals, normals_to_gradient,
                          reproject)
from .pipeline import (METHODS, SUITES, RunSpec, benchmark, load_inputs, run)


def _add_solver_flags(p):
    p.add_argument("--method", default="fm-pcg", choices=METHODS)
    p.add_argument("--precond", default="mic", choices=("none", "ic", "mic"))
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--lambda", dest="lam", type=float, default=1e5)
    p.add_argument("--auxiliary", default="geodesic",
                   choices=("geodesic", "squared-euclidean"))
    p.add_argument("--robustify", action="store_true")


def _add_corruption_flags(p):
    p.add_argument("--noise-pct", type=float, default=0.0)
    p.add_argument("--outlier-frac", type=float, default=0.0)
    p.add_argument("--outlier-mag", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="normint",
                                     description="Surface-normal integration toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset to disk")
    g.add_argument("--dataset", default="sombrero",
                   choices=("sombrero", "peaks", "vase", "phantom"))
    g.add_argument("--size", type=int, default=256)
    _add_corruption_flags(g)
    g.add_argument("--out", required=True)

    i = sub.add_parser("integrate", help="integrate a gradient field to depth")
    i.add_argument("--dataset", default=None,
                   choices=("sombrero", "peaks", "vase", "phantom"))
    i.add_argument("--size", type=int, default=256)
    i.add_argument("--gradient", default=None, help="Gf gradient file")
    i.add_argument("--mask", default=None, help="PGM/PNG mask, >127 = inside")
    i.add_argument("--truth", default=None, help="PFM ground-truth depth")
    _add_solver_flags(i)
    _add_corruption_flags(i)
    i.add_argument("--error-cap", type=float, default=1.0)
    i.add_argument("--out", required=True)

    b = sub.add_parser("benchmark", help="run a named suite, emit CSV")
    b.add_argument("--suite", default="preconditioners", choices=sorted(SUITES))
    b.add_argument("--sizes", default="256", help="comma-separated side lengths")
    b.add_argument("--dataset", default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)

    p = sub.add_parser("ps", help="photometric stereo to depth and reprojection")
    p.add_argument("--images", required=True,
                   help="comma-separated grayscale image paths (>= 3)")
    p.add_argument("--lightings", required=True, help="text file, one lx ly lz per line")
    p.add_argument("--mask", default=None)
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _cmd_generate(args):
    spec = RunSpec(dataset=args.dataset, size=args.size, noise_pct=args.noise_pct,
                   outlier_frac=args.outlier_frac, outlier_mag=args.outlier_mag,
                   seed=args.seed)
    domain, g, truth = load_inputs(spec)
    os.makedirs(args.out, exist_ok=True)
    nio.write_gradient(os.path.join(args.out, "gradient.gf"), g)
    nio.write_mask(os.path.join(args.out, "mask.png"), domain.mask)
    if truth is not None:
        nio.write_pfm(os.path.join(args.out, "depth_true.pfm"), truth)
    nio.write_manifest(os.path.join(args.out, "dataset.json"),
                       {"spec": vars(args) | {"command": "generate"}})
    print("wrote %s" % args.out)
    return 0


def _cmd_integrate(args):
    if args.gradient is None and args.dataset is None:
        print("error: provide --gradient or --dataset", file=sys.stderr)
        return 2
    spec = RunSpec(dataset=args.dataset or "sombrero", size=args.size,
                   method=args.method, preconditioner=args.precond, tau=args.tau,
                   alpha=args.alpha, tol=args.tol, lam=args.lam,
                   auxiliary=args.auxiliary, robustify=args.robustify,
                   noise_pct=args.noise_pct, outlier_frac=args.outlier_frac,
                   outlier_mag=args.outlier_mag, seed=args.seed,
                   gradient_path=args.gradient, mask_path=args.mask,
                   truth_path=args.truth, out=args.out, error_cap=args.error_cap)
    result = run(spec)
    if result.metrics is not None:
        print("mse=%.6g ssim=%.6g" % (result.metrics.mse, result.metrics.ssim))
    if result.stats is not None:
        print("iterations=%d converged=%s"
              % (result.stats.iterations, result.stats.converged))
    print("wrote %s" % args.out)
    return 0


def _cmd_benchmark(args):
    sizes = tuple(int(t) for t in args.sizes.split(","))
    kwargs = {"seed": args.seed} if args.suite != "noise" else {}
    if args.suite in ("preconditioners", "warmstart"):
        kwargs["sizes"] = sizes
        if args.dataset:
            kwargs["dataset"] = args.dataset
    else:
        kwargs["size"] = sizes[0]
        if args.dataset and args.suite == "noise":
            kwargs["dataset"] = args.dataset
    suite = SUITES[args.suite](**kwargs)
    benchmark(suite, path=args.out)
    print("wrote %s" % args.out)
    return 0


def _cmd_ps(args):
    paths = [t for t in args.images.split(",") if t]
    images = np.stack([nio.read_gray(p) for p in paths])
    lightings = nio.read_lightings(args.lightings)
    mask = nio.read_mask(args.mask) if args.mask else np.ones(images.shape[1:], bool)
    domain = build_domain(mask)

    problem = PsProblem(domain=domain, images=images, lightings=lightings)
    nf = estimate_normals(problem)
    g = normals_to_gradient(nf)

    spec = RunSpec(method=args.method, preconditioner=args.precond, tau=args.tau,
                   alpha=args.alpha, tol=args.tol, lam=args.lam,
                   auxiliary=args.auxiliary, robustify=args.robustify,
                   seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    if spec.method in ("fft", "dct"):
        from .frequency import embed_masked, integrate_dct, integrate_fft
        rect = embed_masked(domain, g)
        depth = integrate_fft(rect) if spec.method == "fft" else integrate_dct(rect)
    elif spec.method == "fm":
        depth = integrate_fm(g, domain, FmConfig(lam=spec.lam, auxiliary=spec.auxiliary))
    else:
        from .krylov import SolverConfig, build_preconditioner, cg_solve
        from .poisson import assemble, compatibilize
        system = compatibilize(assemble(domain, g))
        cfg = SolverConfig(tol=spec.tol,
                           preconditioner="none" if spec.method == "cg" else spec.preconditioner,
                           tau=spec.tau, alpha=spec.alpha)
        factor = build_preconditioner(system, cfg)
        x0 = None
        if spec.method == "fm-pcg":
            x0 = domain.flat(integrate_fm(g, domain,
                                          FmConfig(lam=spec.lam, auxiliary=spec.auxiliary)))
        x, _ = cg_solve(system, x0=x0, factor=factor, cfg=cfg)
        depth = domain.grid(x)

    report = reproject(depth, nf.albedo, lightings, domain, images)
    nio.write_pfm(os.path.join(args.out, "depth.pfm"), depth)
    nio.write_pfm(os.path.join(args.out, "albedo.pfm"), domain.grid(nf.albedo))
    nio.write_gradient(os.path.join(args.out, "gradient.gf"), g)
    normals_grid = np.stack([domain.grid(nf.n[:, k]) for k in range(3)], axis=-1)
    nio.write_normal_map(os.path.join(args.out, "normals.png"), normals_grid)
    for k in range(report.images.shape[0]):
        nio.write_gray(os.path.join(args.out, "reprojection_%02d.png" % k),
                       report.images[k])
    nio.write_manifest(os.path.join(args.out, "ps.json"),
                       {"spec": vars(args) | {"command": "ps"},
                        "reprojection_mse": report.mse.tolist(),
                        "reprojection_ssim": report.ssim.tolist(),
                        "mean_mse": report.mean_mse, "mean_ssim": report.mean_ssim})
    print(json.dumps({"mean_mse": report.mean_mse, "mean_ssim": report.mean_ssim}))
    print("wrote %s" % args.out)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    return {"generate": _cmd_generate, "integrate": _cmd_integrate,
            "benchmark": _cmd_benchmark, "ps": _cmd_ps}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
