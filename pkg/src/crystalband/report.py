"""Reference-results reproduction suite: one check per headline claim.

Each check recomputes a closed-form or independently-derived target at the
stated tolerance and returns a CheckResult; the CLI renders the collection
as a markdown report with figures, and the acceptance tests assert each
check individually.  Everything is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .crystal import builtin, validate
from .errors import DivergentGradientEnergy
from .evolve import closed_form_oracle, dispersion_trace, power_dispersion_probe, propagate
from .floquet import (dirichlet_form_check, detect_flat_bands, sample_bands,
                      top_band_flatness)
from .fractional import fractional_laplacian, heat_kernel_crosscheck
from .functions import fourier_coefficients, named_function
from .locality import commutator_kernel_window, hs_norm, hs_window_pair_sum
from .resolvent import decay_fit, green
from .spectral import ac_criterion, occupation_density, regularity_probe
from .transport import msd_series, superballistic_detector
from .weights import WeightFamily, dyadic_power_tail
from .crystal import CrystalSpec

__all__ = ["CheckResult", "ALL_CHECKS", "run_acceptance", "write_report"]

PI = math.pi
DEFAULT_SEED = 1913


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return "%s %-28s %s" % ("PASS" if self.passed else "FAIL", self.name, self.summary)


def check_fourier_coefficients(seed=0) -> CheckResult:
    """Quadrature coefficients of the three model shapes vs closed forms."""
    worst = 0.0
    for name in ("a", "b", "c"):
        f = named_function(name)
        ks = np.arange(-64, 65)
        quad = fourier_coefficients(f.fn, 64, n=2 ** 16)
        exact = f.coef(ks)
        worst = max(worst, float(np.max(np.abs(quad - exact))))
    return CheckResult("fourier-coefficients", worst < 1e-10,
                       "max |quadrature - closed form| = %.3e (tol 1e-10)" % worst,
                       {"worst": worst})


def check_band_endpoints(seed=0) -> CheckResult:
    """Band endpoints of the partly-flat graph and its rescaled adjacency form."""
    targets = {"graph_c": (0.0, 0.25), "thm1_3": (-PI ** 2 / 8, 3 * PI ** 2 / 8)}
    details, ok = [], True
    data = {}
    for name, (lo_t, hi_t) in targets.items():
        grid = sample_bands(builtin(name), 1024)
        lo, hi = grid.band_ranges()[0]
        err = max(abs(lo - lo_t), abs(hi - hi_t))
        ok &= err < 1e-6
        details.append("%s err %.2e" % (name, err))
        data[name] = (lo, hi)
    return CheckResult("band-endpoints", ok, "; ".join(details) + " (tol 1e-6)", data)


_CONNECTED_BUILTINS = ["graph_a", "graph_b", "graph_c", "thm1_1", "thm1_2",
                       "thm1_3", "weierstrass", "sc_dyadic", "zd:1", "zd:2",
                       "frac:1:0.5", "fig5_left", "fig5_right"]


def check_flat_band(seed=0) -> CheckResult:
    """Partly-flat value/measure, and no connected crystal has a flat top band."""
    N = 4096
    grid = sample_bands(builtin("graph_c"), N)
    rep = detect_flat_bands(grid)
    flat_ok = any(abs(f.value) < 1e-9 and abs(f.measure - 0.5) <= 2.0 / N
                  for f in rep.flats)
    tops_ok, failed = True, []
    for name in _CONNECTED_BUILTINS:
        spec = builtin(name)
        n = 64 if spec.d > 1 else 1024
        verdict = top_band_flatness(sample_bands(spec, n))
        if not (verdict.checked and verdict.passed):
            tops_ok = False
            failed.append(name)
    gate = top_band_flatness(sample_bands(builtin("adjacency_power:2"), 1024))
    gate_ok = not gate.checked   # disconnected input must be skipped, not judged
    flats = [(f.value, f.measure) for f in rep.flats]
    return CheckResult(
        "flat-band", flat_ok and tops_ok and gate_ok,
        "flat segments %s; top-band oscillation positive on %d/%d connected "
        "builtins%s; disconnected gate %s" % (
            [(round(v, 12), round(m, 6)) for v, m in flats],
            len(_CONNECTED_BUILTINS) - len(failed), len(_CONNECTED_BUILTINS),
            (" (failed: %s)" % failed if failed else ""),
            "skipped" if gate_ok else "NOT skipped"),
        {"flats": flats, "grid": grid, "report": rep})


def check_frozen_mass(seed=DEFAULT_SEED) -> CheckResult:
    """Origin amplitude of the partly-flat graph: closed form, never small."""
    rng = np.random.default_rng(seed)
    spec = builtin("graph_c")
    ts = rng.uniform(1e-3, 1e3, 100)
    worst_err, worst_val = 0.0, np.inf
    for t in ts:
        fld = propagate(spec, float(t), window=8, eps_mass=1e-9)
        target = abs(closed_form_oracle("graph_c", float(t), 0))
        worst_err = max(worst_err, abs(abs(fld[0]) - target))
        worst_val = min(worst_val, abs(fld[0]))
    ok = worst_err < 1e-8 and worst_val >= 0.3
    return CheckResult("frozen-mass", ok,
                       "max |simulated - closed form| = %.2e (tol 1e-8); "
                       "min origin amplitude %.4f (>= 0.3)" % (worst_err, worst_val),
                       {"worst_err": worst_err, "worst_val": worst_val})


def check_sliding_peaks(seed=DEFAULT_SEED) -> CheckResult:
    """Non-dispersing twin peaks: sup-norm floor and the resonant-time pattern."""
    rng = np.random.default_rng(seed + 1)
    spec = builtin("graph_b")
    min_sup = np.inf
    for t in rng.uniform(0.01, 40 * PI, 100):
        fld = propagate(spec, float(t), window=8, eps_mass=1e-9)
        min_sup = min(min_sup, fld.supnorm_full)
    floor_ok = min_sup >= 1 / PI - 1e-6
    res_ok = True
    worst_peak, worst_zero = 0.0, 0.0
    for k in range(1, 21):
        fld = propagate(spec, 2 * PI * k, window=64, eps_mass=1e-9)
        worst_peak = max(worst_peak, abs(abs(fld[k]) - 0.5), abs(abs(fld[-k]) - 0.5))
        for m in range(-64, 65):
            if m in (k, -k) or (k - m) % 2:
                continue
            worst_zero = max(worst_zero, abs(fld[m]))
    res_ok = worst_peak <= 1e-8 and worst_zero < 1e-8
    return CheckResult("sliding-peaks", floor_ok and res_ok,
                       "min sup-norm %.4f (floor 1/pi = %.4f); resonant peak "
                       "defect %.1e; parity-dead sites max %.1e (tol 1e-8)"
                       % (min_sup, 1 / PI, worst_peak, worst_zero),
                       {"min_sup": min_sup})


def check_fast_dispersion(seed=0) -> CheckResult:
    """Square-root decay of the parabolic-symbol graph, with sharp origin law."""
    spec = builtin("graph_a")
    rows, ok = [], True
    for t in (10.0, 1e2, 1e3, 1e4):
        fld = propagate(spec, t, window=8, eps_mass=1e-8)
        sup = fld.supnorm_full
        origin_gap = abs(abs(fld[0]) - math.sqrt(PI / t))
        ok &= sup <= 8 * t ** -0.5 and origin_gap <= 4 / t
        rows.append((t, sup, 8 * t ** -0.5, origin_gap, 4 / t))
    return CheckResult("fast-dispersion", ok,
                       "sup <= 8/sqrt(t) and origin within 4/t at t = 10..1e4 "
                       "(worst sup ratio %.3f)" % max(r[1] / r[2] for r in rows),
                       {"rows": rows})


def check_ballistic_speed(seed=0) -> CheckResult:
    """Fitted MSD speed against the gradient-energy limit for both graphs."""
    targets = {"graph_b": 1 / (4 * PI ** 2), "graph_c": 1 / (8 * PI ** 2)}
    ok, parts, data = True, [], {}
    ts = np.linspace(20, 200, 10)
    for name, target in targets.items():
        rep = msd_series(builtin(name), ts, M=2 ** 14)
        rel = abs(rep.fitted_speed2 - target) / target
        ok &= rel <= 0.05 and rep.verdict == "ballistic"
        parts.append("%s rel err %.2e (%s)" % (name, rel, rep.verdict))
        data[name] = rep
    return CheckResult("ballistic-speed", ok, "; ".join(parts) + " (tol 5%)", data)


def check_fractional_transition(seed=0) -> CheckResult:
    """Window-growth phase transition of the fractional family at alpha = 1/4."""
    alphas = [0.15, 0.2, 0.25, 0.3, 0.4, 0.5]
    verdicts = superballistic_detector(alphas, t=1.0, M_list=(2 ** 12, 2 ** 16))
    level = {"super-ballistic": 2, "boundary": 1, "ballistic": 0}
    ok = True
    for v in verdicts:
        if v.alpha < 0.25:
            ok &= v.window_ratio > 1.5 and v.verdict == "super-ballistic"
        elif v.alpha > 0.3:
            ok &= v.window_ratio < 1.05 and v.verdict == "ballistic"
        elif v.alpha == 0.25:
            ok &= v.verdict == "boundary"
    levels = [level[v.verdict] for v in verdicts]
    ok &= all(a >= b for a, b in zip(levels, levels[1:]))
    return CheckResult(
        "fractional-transition", ok,
        "; ".join("a=%.2f ratio %.3f %s" % (v.alpha, v.window_ratio, v.verdict)
                  for v in verdicts),
        {"verdicts": verdicts})


def check_fractional_identity(seed=0) -> CheckResult:
    """Weight sum recovers the degree with certified tails; Bessel cross-check."""
    ok, parts = True, []
    for alpha in (0.3, 0.5, 0.7):
        spec = fractional_laplacian(1, alpha, ncoef=64)
        fam = spec.weights[0][0]
        Q = float(spec.Q[0])
        for N in (16, 32, 64):
            partial = float(np.sum(fam.values_1d(N))) * 2.0
            gap = Q - partial
            ok &= -1e-10 <= gap <= fam.tail_bound(N) + 1e-12
        bess = max(abs(fam.value(k) - heat_kernel_crosscheck(alpha, k))
                   for k in (1, 2, 5))
        ok &= bess < 1e-8
        parts.append("a=%.1f gap-in-bound, bessel %.1e" % (alpha, bess))
    exact_q = abs(float(fractional_laplacian(1, 0.5, ncoef=16).Q[0]) - 4 / PI)
    ok &= exact_q < 1e-10
    return CheckResult("fractional-identity", ok,
                       "; ".join(parts) + "; Q(0.5) vs 4/pi err %.1e" % exact_q,
                       {})


def check_dispersion_exponents(seed=0) -> CheckResult:
    """Origin-amplitude decay exponents for integer powers and fractional family."""
    ok, parts, data = True, [], {}
    for p in (4, 6):
        probe = power_dispersion_probe(builtin("adjacency_power:%d" % p))
        gap = abs(probe.origin_slope + 1.0 / p)
        ok &= gap <= 0.03
        parts.append("p=%d slope %.4f (gap %.3f)" % (p, probe.origin_slope, gap))
        data["p%d" % p] = probe
    for alpha in (0.3, 0.7):
        probe = power_dispersion_probe(builtin("frac:1:%g" % alpha))
        gap = abs(probe.origin_slope + 0.5)
        ok &= gap <= 0.05
        parts.append("a=%.1f slope %.4f (gap %.3f)" % (alpha, probe.origin_slope, gap))
        data["a%g" % alpha] = probe
    return CheckResult("dispersion-exponents", ok, "; ".join(parts), data)


def check_greens_decay(seed=0) -> CheckResult:
    """Inverse-square kernel decay off the spectrum; exponential for the lattice."""
    ok, parts, data = True, [], {}
    for name in ("graph_a", "graph_b", "graph_c"):
        fit = decay_fit(green(builtin(name), -1.0, n_max=1024, eps=1e-11))
        ok &= fit.model == "power" and abs(fit.exponent + 2.0) <= 0.1
        parts.append("%s %s %.3f" % (name, fit.model, fit.exponent))
        data[name] = fit
    zfit = decay_fit(green(builtin("zd:1"), 3.0, n_max=256, eps=1e-12), n_min=8)
    ok &= zfit.model == "exponential" and zfit.residual_ratio >= 10.0
    parts.append("zd:1 %s residual ratio %.1e" % (zfit.model, zfit.residual_ratio))
    data["zd"] = zfit
    return CheckResult("greens-decay", ok, "; ".join(parts), data)


def check_commutator(seed=0) -> CheckResult:
    """HS-norm value, window-kernel oracle, and the divergent dyadic example."""
    target = float(sum(1.0 / r ** 3 for r in range(1, 400000))) / (2 * PI ** 4)
    # zeta(3)/(2 pi^4) frozen through an independent partial-sum oracle
    rep = hs_norm(builtin("graph_a"), R=2 ** 14)
    value_err = abs(rep.hs2 - target)
    kernel = commutator_kernel_window(builtin("graph_a"), 200)
    frob2 = float(np.sum(kernel ** 2))
    window_err = abs(frob2 - hs_window_pair_sum(builtin("graph_a"), 200))
    div_fam = WeightFamily(d=1, explicit={}, tails=(dyadic_power_tail(1.0, 0.5, 0),))
    div_spec = CrystalSpec(d=1, nu=1, Q=np.zeros(1), weights=((div_fam,),),
                           label="dyadic_sqrt")
    div = hs_norm(div_spec, R=2 ** 20)
    cps = dict(div.checkpoints)
    growth = cps[2 ** 20] - cps[2 ** 10]
    ok = (value_err < 1e-8 and rep.verdict == "converges"
          and window_err < 1e-10
          and abs(growth - 20.0) <= 0.5 and div.verdict == "diverges")
    return CheckResult("commutator-hs", ok,
                       "value err %.1e (tol 1e-8); window oracle err %.1e "
                       "(tol 1e-10); dyadic growth %.2f (target 20 +- 0.5, %s)"
                       % (value_err, window_err, growth, div.verdict),
                       {"report": rep, "div": div})


def check_property_suite(seed=DEFAULT_SEED) -> CheckResult:
    """Hermiticity, unitarity, composition, symmetry, energy-form identity, mass."""
    rng = np.random.default_rng(seed + 2)
    msgs, ok = [], True

    # Hermiticity / sorted eigenvalues across builtins
    herm = 0.0
    for name in _CONNECTED_BUILTINS:
        spec = builtin(name)
        g = sample_bands(spec, 64 if spec.d > 1 else 256)
        herm = max(herm, g.hermiticity_defect)
        ok &= bool(np.all(np.diff(g.eigenvalues, axis=-1) >= -1e-12))
    msgs.append("hermiticity defect %.1e" % herm)
    ok &= herm < 1e-12

    # unitarity: captured mass within window at modest time
    worst_mass = 0.0
    for name in ("graph_a", "graph_b", "graph_c"):
        fld = propagate(builtin(name), 3.0, window=512, eps_mass=1e-10)
        worst_mass = max(worst_mass, abs(1.0 - fld.captured_mass))
        ok &= fld.captured_mass <= 1.0 + 1e-9
    msgs.append("mass defect %.1e" % worst_mass)
    ok &= worst_mass < 1e-6

    # symmetry psi(-m) = psi(m)
    sym = 0.0
    for name in ("graph_a", "graph_b", "graph_c"):
        t = float(rng.uniform(0.5, 30.0))
        fld = propagate(builtin(name), t, window=128, eps_mass=1e-9)
        sym = max(sym, float(np.max(np.abs(fld.amplitudes - fld.amplitudes[::-1]))))
    ok &= sym < 1e-10
    msgs.append("mirror defect %.1e" % sym)

    # composition: evolve(t1 + t2) = kernel(t2) convolved with field(t1)
    comp = 0.0
    for name in ("graph_b", "graph_c"):
        spec = builtin(name)
        t1, t2 = 1.3, 0.7
        f1 = propagate(spec, t1, window=256, eps_mass=1e-10).amplitudes
        k2 = propagate(spec, t2, window=256, eps_mass=1e-10).amplitudes
        direct = propagate(spec, t1 + t2, window=64, eps_mass=1e-10)
        conv = np.convolve(f1, k2)
        mid = len(conv) // 2
        seg = conv[mid - 64: mid + 65]
        comp = max(comp, float(np.max(np.abs(seg - direct.amplitudes))))
    ok &= comp < 1e-7
    msgs.append("composition defect %.1e" % comp)

    # energy-form identity on random states and momenta
    worst_b1 = 0.0
    for spec in (builtin("fig5_right"), builtin("graph_a")):
        for _ in range(25):
            th = rng.uniform(size=spec.d)
            f = rng.normal(size=spec.nu) + 1j * rng.normal(size=spec.nu)
            lhs, rhs, gap = dirichlet_form_check(spec, th, f)
            worst_b1 = max(worst_b1, gap / max(abs(lhs), 1.0))
    ok &= worst_b1 < 1e-9
    msgs.append("energy-form defect %.1e" % worst_b1)

    # occupation-measure mass conservation
    worst_occ = 0.0
    for name in ("graph_a", "graph_b", "graph_c", "weierstrass"):
        grid = sample_bands(builtin(name), 4096)
        hist = occupation_density(grid, bins=64)
        worst_occ = max(worst_occ, abs(hist.total - 1.0),
                        abs(float(np.sum(hist.mass)) - 1.0))
    ok &= worst_occ < 1e-8
    msgs.append("occupation mass defect %.1e" % worst_occ)

    return CheckResult("property-suite", ok, "; ".join(msgs), {})


def check_singular_candidate(seed=0) -> CheckResult:
    """The dyadic-log graph: valid, no flat band, quotients grow across scales."""
    spec = builtin("sc_dyadic")
    rep = validate(spec)
    grid = sample_bands(spec, 4096)
    flats = detect_flat_bands(grid).flats
    probe = regularity_probe(spec)          # scales 2^-6 .. 2^-14
    ref = regularity_probe(builtin("weierstrass"))
    acv = ac_criterion(sample_bands(spec, 1024))[0]
    ok = (rep.ok and not flats and probe.unbounded_suspect
          and probe.growth_ratio >= 1.2 and ref.growth_ratio > probe.growth_ratio
          and acv.verdict == "inconclusive")
    return CheckResult("singular-candidate", ok,
                       "valid=%s; flat segments %d; quotient growth %.2f "
                       "(slower than the non-differentiable reference %.2f); "
                       "AC criterion %s" % (rep.ok, len(flats), probe.growth_ratio,
                                            ref.growth_ratio, acv.verdict),
                       {"probe": probe, "ref": ref})


ALL_CHECKS = [
    check_fourier_coefficients,
    check_band_endpoints,
    check_flat_band,
    check_frozen_mass,
    check_sliding_peaks,
    check_fast_dispersion,
    check_ballistic_speed,
    check_fractional_transition,
    check_fractional_identity,
    check_dispersion_exponents,
    check_greens_decay,
    check_commutator,
    check_property_suite,
    check_singular_candidate,
]


def run_acceptance(seed: int = DEFAULT_SEED, verbose: bool = True) -> list[CheckResult]:
    results = []
    for fn in ALL_CHECKS:
        res = fn(seed)
        results.append(res)
        if verbose:
            print(res.line())
    return results


# ---------------------------------------------------------------------------
# Markdown + figures
# ---------------------------------------------------------------------------

def write_report(results: list[CheckResult], outdir: str, figures: bool = True,
                 seed: int = DEFAULT_SEED) -> str:
    import os

    os.makedirs(outdir, exist_ok=True)
    fig_paths = render_figures(outdir) if figures else []
    lines = ["# Reproduction report", "",
             "Deterministic run (seed %d). One row per headline claim." % seed, "",
             "| check | status | details |", "|---|---|---|"]
    for r in results:
        lines.append("| %s | %s | %s |" % (r.name, "PASS" if r.passed else "FAIL",
                                           r.summary.replace("|", "/")))
    if fig_paths:
        lines += ["", "## Figures", ""]
        lines += ["![%s](%s)" % (os.path.basename(p), os.path.basename(p))
                  for p in fig_paths]
    path = os.path.join(outdir, "report.md")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def render_figures(outdir: str) -> list[str]:
    """Render the headline figures next to the delimited outputs."""
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []

    def save(fig, name):
        p = os.path.join(outdir, name)
        fig.savefig(p, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(p)

    # band functions of the three model graphs
    th = np.linspace(0, 1, 2049)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for name in ("graph_a", "graph_b", "graph_c"):
        ax.plot(th, builtin(name).symbol(th), label=name)
    ax.set_xlabel("theta")
    ax.set_ylabel("band function")
    ax.legend()
    save(fig, "fig_bands.png")

    # sliding tents
    fig, ax = plt.subplots(figsize=(6, 3.2))
    spec = builtin("graph_b")
    for k in (5, 10, 15):
        fld = propagate(spec, 2 * PI * k, window=40, eps_mass=1e-9)
        ax.plot(fld.ms, fld.abs2(), label="t = 2pi*%d" % k)
    ax.set_xlabel("site")
    ax.set_ylabel("|psi|^2")
    ax.legend()
    save(fig, "fig_tents.png")

    # sup-norm decay of the parabolic graph
    fig, ax = plt.subplots(figsize=(6, 3.2))
    tr = dispersion_trace(builtin("graph_a"), np.geomspace(5, 5e3, 18), window=16,
                          eps=1e-8)
    ax.loglog(tr.times, tr.supnorm, "o-", label="sup |psi_t|")
    ax.loglog(tr.times, 8 / np.sqrt(tr.times), "--", label="8 t^-1/2")
    ax.set_xlabel("t")
    ax.legend()
    save(fig, "fig_dispersion.png")

    # MSD growth vs the analytic limits
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ts = np.linspace(20, 200, 10)
    for name, target in (("graph_b", 1 / (4 * PI ** 2)), ("graph_c", 1 / (8 * PI ** 2))):
        rep = msd_series(builtin(name), ts, M=2 ** 14)
        ax.plot(ts, rep.msd / ts ** 2, "o-", label="%s MSD/t^2" % name)
        ax.axhline(target, ls="--", lw=0.8)
    ax.set_xlabel("t")
    ax.legend()
    save(fig, "fig_msd.png")

    # fractional transition
    fig, ax = plt.subplots(figsize=(6, 3.2))
    alphas = [0.15, 0.2, 0.25, 0.3, 0.4, 0.5]
    verdicts = superballistic_detector(alphas, t=1.0)
    ax.semilogy(alphas, [v.window_ratio for v in verdicts], "o-")
    ax.axvline(0.25, ls="--", lw=0.8)
    ax.axhline(1.5, ls=":", lw=0.8)
    ax.axhline(1.05, ls=":", lw=0.8)
    ax.set_xlabel("alpha")
    ax.set_ylabel("window mass ratio")
    save(fig, "fig_frac_transition.png")

    # Green kernel decay
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ns = np.arange(1, 513)
    for name in ("graph_a", "graph_b"):
        G = green(builtin(name), -1.0, n_max=512, eps=1e-11)
        ax.loglog(ns, np.abs(G.values[G.n_max + 1:]), label="%s, z=-1" % name)
    ax.loglog(ns, 0.03 / ns.astype(float) ** 2, "--", label="n^-2 guide")
    ax.set_xlabel("n")
    ax.set_ylabel("|G(0,n)|")
    ax.legend()
    save(fig, "fig_green_decay.png")

    # commutator partial sums
    fig, ax = plt.subplots(figsize=(6, 3.2))
    rep = hs_norm(builtin("graph_a"), R=2 ** 14)
    xs, ys = zip(*rep.checkpoints)
    ax.semilogx(xs, ys, "o-", label="inverse-square weights")
    div_fam = WeightFamily(d=1, explicit={}, tails=(dyadic_power_tail(1.0, 0.5, 0),))
    div_spec = CrystalSpec(d=1, nu=1, Q=np.zeros(1), weights=((div_fam,),),
                           label="dyadic_sqrt")
    rep2 = hs_norm(div_spec, R=2 ** 20)
    xs, ys = zip(*rep2.checkpoints)
    ax.semilogx(xs, ys, "s-", label="dyadic 1/sqrt weights")
    ax.set_xlabel("cutoff R")
    ax.set_ylabel("partial HS^2 sum")
    ax.legend()
    save(fig, "fig_commutator.png")

    return paths
