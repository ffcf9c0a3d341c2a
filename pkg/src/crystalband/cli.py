"""Command-line front end: every module as a subcommand, CSV/JSON out.

Outputs are deterministic given identical arguments (fixed float format,
fixed ordering, explicit seeds).  Exit codes: 0 success, 2 validation or
input failure, 3 numerical non-convergence.  --plot renders a matplotlib
figure next to the delimited output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from ._pool import resolve_threads
from .crystal import builtin, check_connected, load_crystal, validate
from .errors import (CrystalError, DivergentGradientEnergy, IntegrationFailure,
                     ResolutionExceeded, SpectrumProximity)
from .evolve import dispersion_trace, propagate
from .floquet import detect_flat_bands, sample_bands
from .locality import hs_norm
from .output import fmt, write_csv, write_json
from .resolvent import decay_fit, green
from .spectral import occupation_density, regularity_probe
from .transport import msd_series, superballistic_detector
from . import report as report_mod

__all__ = ["main"]


def _add_common(p, grid_default=1024):
    p.add_argument("--graph", required=False,
                   help="crystal source: builtin:<name> or a JSON file path")
    p.add_argument("--out", default=None, help="output file (command-specific default)")
    p.add_argument("--eps", type=float, default=1e-9, help="target accuracy")
    p.add_argument("--grid", type=int, default=grid_default,
                   help="torus grid size (power of two, divisible by 4)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (CRYSTAL_THREADS overrides the default)")
    p.add_argument("--json", action="store_true", help="also write a JSON summary")
    p.add_argument("--plot", action="store_true",
                   help="render a figure next to the output file")
    p.add_argument("--seed", type=int, default=report_mod.DEFAULT_SEED)


def _graph(args):
    if not args.graph:
        raise CrystalError("--graph is required (builtin:<name> or a JSON file)")
    return load_crystal(args.graph)


def _maybe_plot(args, default_name, draw):
    if not args.plot:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6, 3.4))
    draw(ax)
    base = args.out or default_name
    path = os.path.splitext(base)[0] + ".png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    print("figure %s" % path)


def _parse_times(args):
    if args.times:
        return np.asarray([float(x) for x in args.times.split(",")])
    if args.tlog:
        return np.geomspace(args.tmin, args.tmax, args.tn)
    return np.linspace(args.tmin, args.tmax, args.tn)


def cmd_validate(args):
    spec = _graph(args)
    rep = validate(spec)
    for line in rep.lines():
        print(line)
    conn = check_connected(spec)
    print("connectivity     %s" % conn.witness())
    if args.json:
        write_json(args.out or "validate.json",
                   {"conditions": rep.conditions, "connected": conn.connected,
                    "violations": [str(v) for v in rep.violations]})
    return 0 if rep.ok else 2


def cmd_spectrum(args):
    spec = _graph(args)
    grid = sample_bands(spec, args.grid, eps=args.eps)
    rep = detect_flat_bands(grid)
    out = args.out or "bands.csv"
    from .floquet import bands_to_rows
    header = ["theta_%d" % (i + 1) for i in range(spec.d)] + \
        ["E_%d" % (j + 1) for j in range(spec.nu)]
    write_csv(out, header, bands_to_rows(grid))
    if args.json:
        write_json(os.path.splitext(out)[0] + ".json", rep.to_json())
    flats = {"%.6g" % f.value: round(f.measure, 6) for f in rep.flats}
    print("band %s, flat %s" % (
        ["[%s,%s]" % (fmt(lo), fmt(hi)) for lo, hi in rep.bands], flats or "{}"))
    _maybe_plot(args, out, lambda ax: (
        [ax.plot(np.linspace(0, 1, grid.eigenvalues.reshape(-1, spec.nu).shape[0],
                             endpoint=False),
                 grid.eigenvalues.reshape(-1, spec.nu)[:, j], lw=0.8)
         for j in range(spec.nu)],
        ax.set_xlabel("theta"), ax.set_ylabel("E_j")))
    return 0


def cmd_flatbands(args):
    spec = _graph(args)
    grid = sample_bands(spec, args.grid, eps=args.eps)
    rep = detect_flat_bands(grid, tol_flat=args.tol_flat, min_measure=args.min_measure)
    out = args.out or "flats.json"
    write_json(out, rep.to_json())
    print("flats %s (N=%d)" % ([(fmt(f.value), round(f.measure, 6)) for f in rep.flats],
                               args.grid))
    return 0


def cmd_measure(args):
    spec = _graph(args)
    grid = sample_bands(spec, args.grid, eps=args.eps)
    rep = detect_flat_bands(grid)
    hist = occupation_density(grid, bins=args.bins, flat_report=rep)
    out = args.out or "measure.csv"
    write_csv(out, ["bin_lo", "bin_hi", "mass"], hist.rows())
    print("total mass %s; atoms %s" % (fmt(hist.total),
                                       [(fmt(v), fmt(m)) for v, m in hist.atoms]))
    _maybe_plot(args, out, lambda ax: (
        ax.stairs(hist.mass, hist.edges), ax.set_xlabel("energy"),
        ax.set_ylabel("mass")))
    return 0


def cmd_regularity(args):
    spec = _graph(args)
    probe = regularity_probe(spec)
    out = args.out or "regularity.csv"
    write_csv(out, ["scale", "max_quotient"], probe.rows())
    print("holder exponent %.3f; growth ratio %.3f; lipschitz bound %s" %
          (probe.holder_exponent, probe.growth_ratio,
           fmt(probe.lipschitz_bound) if np.isfinite(probe.lipschitz_bound) else "inf"))
    _maybe_plot(args, out, lambda ax: (
        ax.loglog(probe.scales, probe.max_quotients, "o-"),
        ax.set_xlabel("scale"), ax.set_ylabel("max quotient")))
    return 0


def cmd_evolve(args):
    spec = _graph(args)
    fld = propagate(spec, args.t, window=args.window, eps_mass=args.eps)
    out = args.out or "field.csv"
    write_csv(out, ["m", "re", "im", "abs2"], fld.rows())
    print("t %s sup %s origin %s mass %s (N=%d)" %
          (fmt(args.t), fmt(fld.supnorm_full), fmt(abs(fld[0])),
           fmt(fld.captured_mass), fld.resolution))
    _maybe_plot(args, out, lambda ax: (
        ax.plot(fld.ms, fld.abs2()), ax.set_xlabel("site"), ax.set_ylabel("|psi|^2")))
    return 0


def cmd_disperse(args):
    spec = _graph(args)
    ts = _parse_times(args)
    tr = dispersion_trace(spec, ts, window=args.window, eps=args.eps)
    out = args.out or "trace.csv"
    write_csv(out, ["t", "supnorm", "origin_abs", "peak_m"], tr.rows())
    print("sup range [%s, %s]; final peak near m=%s" %
          (fmt(tr.supnorm.min()), fmt(tr.supnorm.max()),
           tr.peaks[-1][:3] if tr.peaks else "-"))
    _maybe_plot(args, out, lambda ax: (
        ax.loglog(tr.times, tr.supnorm, "o-"), ax.set_xlabel("t"),
        ax.set_ylabel("sup |psi|")))
    return 0


def cmd_transport(args):
    spec = _graph(args)
    ts = _parse_times(args)
    rep = msd_series(spec, ts, M=args.window, eps=args.eps)
    out = args.out or "transport.json"
    write_json(out, rep.to_json())
    print("verdict %s; fitted speed^2 %s; analytic %s" %
          (rep.verdict, fmt(rep.fitted_speed2),
           fmt(rep.analytic_limit) if rep.analytic_limit is not None else "divergent"))
    _maybe_plot(args, out, lambda ax: (
        ax.plot(rep.times, rep.msd, "o-"), ax.set_xlabel("t"), ax.set_ylabel("MSD")))
    return 0


def cmd_superballistic(args):
    alphas = [float(x) for x in args.alphas.split(",")]
    windows = tuple(int(x) for x in args.windows.split(","))
    verdicts = superballistic_detector(alphas, t=args.t, M_list=windows)
    out = args.out or "superballistic.json"
    write_json(out, [v.__dict__ for v in verdicts])
    for v in verdicts:
        print("alpha %s ratio %s exponents (%.3f, %.3f) -> %s" %
              (fmt(v.alpha), fmt(v.window_ratio), v.position_exponent,
               v.fourier_exponent, v.verdict))
    _maybe_plot(args, out, lambda ax: (
        ax.semilogy([v.alpha for v in verdicts], [v.window_ratio for v in verdicts],
                    "o-"),
        ax.axvline(0.25, ls="--", lw=0.8), ax.set_xlabel("alpha"),
        ax.set_ylabel("window ratio")))
    return 0


def cmd_green(args):
    spec = _graph(args)
    z = complex(args.z.replace("i", "j").replace(" ", ""))
    samples = green(spec, z, n_max=args.nmax, eps=args.eps)
    out = args.out or "green.csv"
    write_csv(out, ["n", "re", "im", "abs"], samples.rows())
    fit = decay_fit(samples, n_min=max(8, args.nmax // 16))
    print("model %s; exponent %.3f; rate %s; residual ratio %.3g" %
          (fit.model, fit.exponent, fmt(fit.rate), fit.residual_ratio))
    _maybe_plot(args, out, lambda ax: (
        ax.loglog(np.arange(1, samples.n_max + 1),
                  np.abs(samples.values[samples.n_max + 1:])),
        ax.set_xlabel("n"), ax.set_ylabel("|G|")))
    return 0


def cmd_locality(args):
    spec = _graph(args)
    rep = hs_norm(spec, R=args.rmax)
    out = args.out or "locality.csv"
    rows = [[r, s, rep.tail_bound if rep.tail_bound is not None else float("nan")]
            for r, s in rep.checkpoints]
    write_csv(out, ["R", "partial_hs2", "tail_bound"], rows)
    print("partial HS^2 %s; verdict %s%s" %
          (fmt(rep.partial_hs2), rep.verdict,
           ("; value %s" % fmt(rep.hs2)) if rep.tail_bound is not None else ""))
    _maybe_plot(args, out, lambda ax: (
        ax.semilogx(*zip(*rep.checkpoints), marker="o"),
        ax.set_xlabel("R"), ax.set_ylabel("partial HS^2")))
    return 0


def cmd_reproduce(args):
    results = report_mod.run_acceptance(seed=args.seed, verbose=True)
    outdir = args.out or "report"
    path = report_mod.write_report(results, outdir, figures=not args.no_figures,
                                   seed=args.seed)
    print("report written to %s" % path)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: %s" % ", ".join(failed))
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crystal",
        description="Band structure, spectral diagnostics and wave dynamics for "
                    "periodic graphs with summable long-range weights.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the standing weight conditions "
                       "(positivity, no loops, symmetry, summability) and connectivity")
    _add_common(p)

    p = sub.add_parser("spectrum", help="sample the band functions over the torus "
                       "grid and report band intervals with flat segments")
    _add_common(p)

    p = sub.add_parser("flatbands", help="locate eigenvalues shared by a positive "
                       "fraction of the torus (infinitely degenerate levels)")
    _add_common(p, grid_default=4096)
    p.add_argument("--tol-flat", type=float, default=None)
    p.add_argument("--min-measure", type=float, default=1e-3)

    p = sub.add_parser("measure", help="histogram of the spectral (occupation) "
                       "measure of a state, with flat-segment atoms split out")
    _add_common(p, grid_default=4096)
    p.add_argument("--bins", type=int, default=50)

    p = sub.add_parser("regularity", help="max difference quotients of the band "
                       "function across dyadic scales (Lipschitz vs rough)")
    _add_common(p)

    p = sub.add_parser("evolve", help="wave field at one time via the torus phase "
                       "function (certified aliasing control)")
    _add_common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--window", type=int, default=256)

    p = sub.add_parser("disperse", help="sup-norm, origin mass and peak tracking "
                       "along a time grid")
    _add_common(p)
    p.add_argument("--window", type=int, default=256)
    p.add_argument("--times", default=None, help="comma-separated explicit times")
    p.add_argument("--tmin", type=float, default=1.0)
    p.add_argument("--tmax", type=float, default=100.0)
    p.add_argument("--tn", type=int, default=16)
    p.add_argument("--tlog", action="store_true")

    p = sub.add_parser("transport", help="mean-squared displacement series, speed "
                       "fit and ballistic verdict against the gradient-energy limit")
    _add_common(p)
    p.add_argument("--window", type=int, default=2 ** 14)
    p.add_argument("--times", default=None)
    p.add_argument("--tmin", type=float, default=20.0)
    p.add_argument("--tmax", type=float, default=200.0)
    p.add_argument("--tn", type=int, default=10)
    p.add_argument("--tlog", action="store_true")

    p = sub.add_parser("superballistic", help="classify fractional exponents by "
                       "window-sum growth and gradient-energy divergence")
    _add_common(p)
    p.add_argument("--alphas", default="0.15,0.2,0.25,0.3,0.4,0.5")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--windows", default="4096,65536")

    p = sub.add_parser("green", help="resolvent kernel off the spectrum and its "
                       "off-diagonal decay fit (power vs exponential)")
    _add_common(p)
    p.add_argument("--z", default="-1+0j", help="energy, e.g. --z=-1+0i")
    p.add_argument("--nmax", type=int, default=256)

    p = sub.add_parser("locality", help="half-line commutator: partial "
                       "Hilbert-Schmidt sums, certified tail, divergence verdict")
    _add_common(p)
    p.add_argument("--rmax", type=int, default=2 ** 16)

    p = sub.add_parser("reproduce", help="run the full reproduction suite and "
                       "write a markdown report with figures")
    _add_common(p)
    p.add_argument("--no-figures", action="store_true")
    return ap


_COMMANDS = {
    "validate": cmd_validate, "spectrum": cmd_spectrum, "flatbands": cmd_flatbands,
    "measure": cmd_measure, "regularity": cmd_regularity, "evolve": cmd_evolve,
    "disperse": cmd_disperse, "transport": cmd_transport,
    "superballistic": cmd_superballistic, "green": cmd_green,
    "locality": cmd_locality, "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.threads = resolve_threads(getattr(args, "threads", None))
    try:
        return _COMMANDS[args.command](args)
    except (ResolutionExceeded, IntegrationFailure, SpectrumProximity,
            DivergentGradientEnergy) as exc:
        print("numerical non-convergence: %s" % exc, file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print("malformed JSON at line %d column %d: %s"
              % (exc.lineno, exc.colno, exc.msg), file=sys.stderr)
        return 2
    except (CrystalError, KeyError, ValueError) as exc:
        print("invalid input: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
