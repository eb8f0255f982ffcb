"""Command-line entry point: ``mhn-phase <command> [options]``.

Commands write CSV (always), SVG (unless ``--no-svg``) and a ``config.json``
with the fully resolved parameters into the output directory, which defaults
to ``$MHN_PHASE_OUTDIR`` or ``./mhn_out``.

Exit codes: 0 success, 1 invalid arguments, 2 solver/convergence failure,
3 file I/O error.
"""

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels, output, svgplot
from .critical import BracketError, SweepItemError, critical_sweep, solve_critical
from .experiments import appendix_figures_data, minima_count_sweep, order_parameter_sweep, transition_index
from .mnist import IdxFormatError, load_idx_images, select_patterns
from .patterns import EquidistantSpec, InfeasibleSpecError, build_equidistant, gram_metadata

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3
OUTDIR_ENV = "MHN_PHASE_OUTDIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str, default_spacing: str = "log") -> np.ndarray:
    """``start:stop:count[log|lin]`` or a comma-separated list of values."""
    text = text.strip()
    if not text:
        raise UsageError("empty grid")
    if ":" not in text:
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad grid {text!r}: {exc}") from None
        if not vals:
            raise UsageError("empty grid")
        return np.array(vals)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:count[log|lin], got {text!r}")
    spacing = default_spacing
    count = parts[2].strip()
    for suffix in ("log", "lin"):
        if count.endswith(suffix):
            spacing, count = suffix, count[: -len(suffix)]
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(count)
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if n < 1:
        raise UsageError("grid count must be >= 1")
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise UsageError("log grid needs positive bounds")
        return np.logspace(math.log10(start), math.log10(stop), n)
    return np.linspace(start, stop, n)


def parse_int_list(text: str) -> list:
    """``2``, ``2,3,5`` or the inclusive range ``2:100``."""
    out = []
    try:
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" in chunk:
                lo, hi = (int(v) for v in chunk.split(":"))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(chunk))
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None
    if not out:
        raise UsageError("empty integer list")
    return out


def _outdir(args) -> Path:
    path = Path(args.out or os.environ.get(OUTDIR_ENV) or "mhn_out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _base_config(args, command):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg.update(command=command, version=__version__, kernel_backend=_kernels.backend())
    return cfg


def cmd_solve_critical(args):
    Ns = parse_int_list(args.n)
    bad = [n for n in Ns if n < 2]
    if bad:
        raise UsageError(f"N must be >= 2, got {bad[0]}")
    points = critical_sweep(Ns)
    out = _outdir(args)
    output.write_critical_csv(out / "critical.csv", points)
    if not args.no_svg and len(points) > 1:
        ns = [c.N for c in points]
        svgplot.save(
            out / "critical.svg",
            svgplot.line_plot(
                [svgplot.Series(ns, [c.beta_c for c in points], "beta_c"),
                 svgplot.Series(ns, [c.p_c for c in points], "p_c", style="dashed")],
                title="Critical point vs number of patterns", xlabel="N", ylabel="value",
            ),
        )
    cfg = _base_config(args, "solve-critical")
    cfg["N_values"] = Ns
    output.write_config(out / "config.json", cfg)
    for c in points[:5]:
        print(f"N={c.N}  p_c={c.p_c:.12g}  beta_c={c.beta_c:.12g}")
    if len(points) > 5:
        print(f"... {len(points)} rows written to {out / 'critical.csv'}")
    return EXIT_OK


def _kl_specs(args):
    ds = parse_int_list(args.d)
    specs = []
    for d in ds:
        N = args.n if args.n is not None else d + 1
        if args.cos_theta is not None:
            c = args.cos_theta
        else:
            c = -1.0 / (N - 1) if N == d + 1 else 0.0
        try:
            specs.append(EquidistantSpec(d=d, N=N, norm=args.norm, cos_theta=c))
        except InfeasibleSpecError as exc:
            raise UsageError(str(exc)) from None
        if N < 2:
            raise UsageError("need N >= 2 patterns")
    return specs


def cmd_sweep_kl(args):
    grid = parse_grid(args.beta_grid)
    if np.any(grid <= 0):
        raise UsageError("beta grid values must be positive")
    specs = _kl_specs(args)
    out = _outdir(args)
    results = []
    for spec in specs:
        if args.normalize_beta:
            # grid is in units of beta_c: convert to raw beta for this spec
            scale = solve_critical(spec.N).beta_c / (spec.norm**2 * (1.0 - spec.cos_theta))
            betas = grid * scale
        else:
            betas = grid
        res = order_parameter_sweep(spec, betas, args.normalize_beta, eps=args.eps, tol=args.tol,
                                    max_iters=args.max_iters)
        output.write_kl_csv(out / f"kl_d{spec.d}_N{spec.N}.csv", res)
        results.append((spec, res))
        ti = transition_index(res)
        where = "none" if ti is None else output.fmt(res.abscissa()[ti])
        print(f"d={spec.d} N={spec.N} beta_c={res.metadata['beta_c']:.6g} transition at {where}")

    if not args.no_svg:
        for name, norm_axis in (("kl_raw.svg", False), ("kl_normalized.svg", True)):
            series = []
            for spec, res in results:
                x = [r.beta_over_beta_c for r in res.records] if norm_axis else res.betas
                series.append(svgplot.Series(x, res.values, f"d={spec.d}, N={spec.N}"))
            svgplot.save(
                out / name,
                svgplot.line_plot(series, title="Normalised KL divergence of the fixed point",
                                  xlabel="beta_eff / beta_c" if norm_axis else "beta",
                                  ylabel="KL / log N", logx=True),
            )
    cfg = _base_config(args, "sweep-kl")
    cfg["specs"] = [dict(d=s.d, N=s.N, norm=s.norm, cos_theta=s.cos_theta) for s in specs]
    cfg["beta_grid_values"] = grid
    cfg["sweeps"] = [r.metadata for _, r in results]
    output.write_config(out / "config.json", cfg)
    failed = sum(not rec.converged for _, r in results for rec in r.records)
    total = sum(len(r.records) for _, r in results)
    if failed:
        print(f"warning: {failed} of {total} sweep points did not converge (flagged in CSV)", file=sys.stderr)
    return EXIT_RUNTIME if failed == total else EXIT_OK


def cmd_mnist(args):
    grid = parse_grid(args.beta_grid)
    if np.any(grid <= 0):
        raise UsageError("beta grid values must be positive")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.noise_sigma is not None and args.noise_sigma < 0:
        raise UsageError("--noise-sigma must be non-negative")
    try:
        idx = load_idx_images(args.idx)
    except OSError as exc:
        print(f"error: cannot read {args.idx}: {exc}", file=sys.stderr)
        return EXIT_IO
    except IdxFormatError as exc:
        print(f"error: {args.idx}: {exc}", file=sys.stderr)
        return EXIT_IO
    ns = parse_int_list(args.n)
    for n in ns:
        if n < 1 or n > idx.count:
            raise UsageError(f"--n {n} out of range: file holds {idx.count} images")
    out = _outdir(args)
    series, sweeps = [], []
    for n in ns:
        patterns = select_patterns(idx, n, args.seed, args.scale)
        res = minima_count_sweep(patterns, grid, args.noise_sigma, args.trials, args.seed,
                                 args.distinct_tol, workers=args.workers)
        output.write_minima_csv(out / f"minima_n{n}.csv", res)
        series.append(svgplot.Series(res.betas, res.values, f"N={n}", style="step"))
        sweeps.append(res.metadata)
        ti = transition_index(res)
        onset = "none" if ti is None else output.fmt(res.betas[ti])
        print(f"N={n}: minima {int(res.values[0])} -> {int(res.values[-1])}, onset beta {onset}")
    if not args.no_svg:
        svgplot.save(out / "minima.svg",
                     svgplot.line_plot(series, title="Distinct minima reached from noisy patterns",
                                       xlabel="beta", ylabel="number of minima", logx=True))
    cfg = _base_config(args, "mnist")
    cfg.update(image_count=idx.count, rows=idx.rows, cols=idx.cols, beta_grid_values=grid, sweeps=sweeps)
    output.write_config(out / "config.json", cfg)
    return EXIT_OK


def cmd_appendix(args):
    betas = parse_grid(args.beta, default_spacing="lin")
    if np.any(betas <= 0):
        raise UsageError("beta values must be positive")
    if not 0.0 <= args.p0 <= 1.0:
        raise UsageError("--p0 must lie in [0, 1]")
    if args.n < 2:
        raise UsageError("N must be >= 2")
    blocks = appendix_figures_data(betas, args.n, cos_theta=args.cos_theta, p0=args.p0, steps=args.steps)
    out = _outdir(args)
    output.write_appendix_csv(out / "appendix.csv", blocks)
    output.write_orbit_csv(out / "appendix_orbits.csv", blocks)
    if not args.no_svg:
        cob = [svgplot.Series([0, 1], [0, 1], "p' = p", style="dashed", color="#000000")]
        for b in blocks:
            cob.append(svgplot.Series(b.p, b.f_of_p, f"beta={output.fmt(b.beta)}"))
        svgplot.save(out / "cobweb.svg",
                     svgplot.line_plot(cob, title="Update map on the symmetric line", xlabel="p", ylabel="f(p)"))
        en = [svgplot.Series(b.p, b.energy - b.energy.min(), f"beta={output.fmt(b.beta)}") for b in blocks]
        svgplot.save(out / "energy.svg",
                     svgplot.line_plot(en, title="Energy along the symmetric line (shifted to min 0)",
                                       xlabel="p", ylabel="E - min E"))
    cfg = _base_config(args, "appendix")
    cfg["beta_values"] = betas
    output.write_config(out / "config.json", cfg)
    for b in blocks:
        print(f"beta={output.fmt(b.beta)}: energy argmin p={output.fmt(b.p[np.argmin(b.energy)])}")
    return EXIT_OK


def cmd_patterns(args):
    try:
        spec = EquidistantSpec(d=args.d, N=args.n, norm=args.norm, cos_theta=args.cos_theta)
    except InfeasibleSpecError as exc:
        raise UsageError(str(exc)) from None
    X = build_equidistant(spec).data
    meta = gram_metadata(build_equidistant(spec))
    out = _outdir(args)
    output.write_rows(out / "patterns.csv", [f"x{i}" for i in range(spec.N)], X.tolist())
    output.write_rows(out / "cosines.csv", [f"x{i}" for i in range(spec.N)], meta.cosines.tolist())
    cfg = _base_config(args, "patterns")
    cfg["norms"] = meta.norms
    output.write_config(out / "config.json", cfg)
    print(f"wrote {spec.N} patterns of dimension {spec.d} to {out / 'patterns.csv'}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="mhn-phase", description="Phase transitions in Modern Hopfield Networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help=f"output directory (default ${OUTDIR_ENV} or ./mhn_out)")
        p.add_argument("--no-svg", action="store_true", help="skip SVG plots")

    p = sub.add_parser("solve-critical", help="critical (p_c, beta_c) for each N")
    p.add_argument("--n", required=True, help="N values: 2, 2,3,5 or the inclusive range 2:100")
    common(p)
    p.set_defaults(func=cmd_solve_critical)

    p = sub.add_parser("sweep-kl", help="normalised KL order parameter versus beta")
    p.add_argument("--d", required=True, help="dimensions, e.g. 3,7,15")
    p.add_argument("--n", type=int, help="pattern count (default d+1, a regular simplex)")
    p.add_argument("--norm", type=float, default=1.0)
    p.add_argument("--cos-theta", type=float, help="pairwise cosine (default -1/d for N=d+1, else 0)")
    p.add_argument("--beta-grid", default="0.1:100:200log", help="start:stop:count[log|lin]")
    p.add_argument("--normalize-beta", action="store_true",
                   help="read the grid as beta_eff/beta_c and plot against it")
    p.add_argument("--eps", type=float, default=1e-3, help="start is (1-eps) e_1 + eps/N")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=200_000)
    common(p)
    p.set_defaults(func=cmd_sweep_kl)

    p = sub.add_parser("mnist", help="count distinct minima for MNIST digits versus beta")
    p.add_argument("--idx", required=True, help="IDX3 image file, optionally gzipped")
    p.add_argument("--n", default="25", help="pattern counts, e.g. 25,50,100")
    p.add_argument("--beta-grid", default="1e-3:10:80log")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=2, help="noisy starts per stored pattern")
    p.add_argument("--noise-sigma", type=float, help="default 0.1 * mean pattern norm / sqrt(d)")
    p.add_argument("--distinct-tol", type=float, default=1e-3)
    p.add_argument("--scale", choices=("unit_interval", "raw"), default="unit_interval")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_mnist)

    p = sub.add_parser("appendix", help="cobweb and energy tables along the symmetric line")
    p.add_argument("--beta", default="0.5,2,8", help="beta values or a grid")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--cos-theta", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.6)
    p.add_argument("--steps", type=int, default=40)
    common(p)
    p.set_defaults(func=cmd_appendix)

    p = sub.add_parser("patterns", help="write an equidistant pattern set")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--norm", type=float, default=1.0)
    p.add_argument("--cos-theta", type=float, default=0.0)
    common(p)
    p.set_defaults(func=cmd_patterns)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mhn-phase {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketError, SweepItemError, FloatingPointError) as exc:
        print(f"mhn-phase {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"mhn-phase {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
