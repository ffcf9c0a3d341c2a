"""Spectral-type diagnostics: occupation measures, AC criterion, regularity.

These are numerical probes, not certifications: the AC criterion reports
whether the gradient evidence is consistent with purely absolutely
continuous spectrum, flags flat-band suspects, and declines to decide when
the eigenvalue function shows signs of unbounded difference quotients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crystal import CrystalSpec, floquet_symbol_grid
from .floquet import BandGrid, sample_bands

__all__ = ["OccupationHistogram", "occupation_density", "ACVerdict",
           "ac_criterion", "RegularityProbe", "regularity_probe"]


@dataclass
class OccupationHistogram:
    edges: np.ndarray         # bin edges, length bins+1
    mass: np.ndarray          # mass per bin
    total: float              # = ||psi||^2 up to quadrature error
    atoms: list               # (value, mass) pairs from flat segments
    band: int
    state: str

    def rows(self):
        return np.column_stack([self.edges[:-1], self.edges[1:], self.mass])


def occupation_density(grid: BandGrid, psi_hat=None, bins: int = 50,
                       band: int = 0, flat_report=None) -> OccupationHistogram:
    """Histogram of the spectral measure: pushforward of |psi_hat|^2 dtheta.

    psi_hat may be None (the delta_0 state, |psi_hat| = 1), an array sampled
    on the grid, or a callable on theta.  Only nu = 1 grids are supported;
    general nu needs eigenprojection weights.  When a flat-segment report is
    passed, the corresponding atoms are listed separately as value/mass pairs.
    """
    if grid.nu != 1:
        raise ValueError("occupation measures need nu = 1")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    E = grid.eigenvalues[..., band].reshape(-1)
    npts = E.size
    if psi_hat is None:
        w = np.ones(npts)
    elif callable(psi_hat):
        w = np.abs(np.asarray(psi_hat(grid.thetas()))).reshape(-1) ** 2
    else:
        w = np.abs(np.asarray(psi_hat)).reshape(-1) ** 2
    cell = 1.0 / npts
    lo, hi = float(E.min()), float(E.max())
    edges = np.linspace(lo, hi, bins + 1)
    idx = np.clip(np.searchsorted(edges, E, side="right") - 1, 0, bins - 1)
    mass = np.zeros(bins)
    np.add.at(mass, idx, w * cell)
    atoms = []
    if flat_report is not None:
        for f in flat_report.flats:
            if f.band != band:
                continue
            sel = np.abs(E - f.value) < flat_report.tol_flat
            atoms.append((f.value, float(np.sum(w[sel]) * cell)))
    return OccupationHistogram(edges=edges, mass=mass, total=float(np.sum(w) * cell),
                               atoms=atoms, band=band,
                               state="psi_hat" if psi_hat is not None else "delta_0")


@dataclass
class ACVerdict:
    band: int
    verdict: str              # "ac_consistent" | "flat_suspect" | "inconclusive"
    small_gradient_fraction: float
    refined_fraction: float
    gradient_sup_growth: float

    def __str__(self):
        return "band %d: %s (zero-gradient fraction %.3g -> %.3g, sup growth %.2f)" % (
            self.band, self.verdict, self.small_gradient_fraction,
            self.refined_fraction, self.gradient_sup_growth)


def _central_gradients(grid: BandGrid) -> np.ndarray:
    """Central differences of each band along every axis; shape (..., nu, d)."""
    ev = grid.eigenvalues
    N = grid.N
    outs = []
    for axis in range(grid.d):
        diff = (np.roll(ev, -1, axis=axis) - np.roll(ev, 1, axis=axis)) * (N / 2.0)
        outs.append(diff)
    return np.stack(outs, axis=-1)


def ac_criterion(grid: BandGrid, tol_grad: float = 1e-6,
                 min_measure: float = 1e-3) -> list[ACVerdict]:
    """Per-band verdict on the a.e.-nonvanishing-gradient criterion.

    The fraction of grid points with |grad E_j| < tol_grad is compared
    between the given grid and one at twice the resolution: a fraction that
    keeps shrinking is consistent with purely AC spectrum, a stable fraction
    above min_measure flags a flat segment.  If the gradient suprema keep
    growing under refinement (non-Lipschitz surface), the criterion's
    hypothesis fails and the verdict is inconclusive.
    """
    fine = sample_bands(grid.spec, 2 * grid.N, eps=grid.trunc_error)
    g1 = np.linalg.norm(_central_gradients(grid), axis=-1)
    g2 = np.linalg.norm(_central_gradients(fine), axis=-1)
    # multi-scale quotient growth detects non-Lipschitz surfaces much more
    # reliably than one doubling (lacunary symbols grow only ~10% per scale)
    rough = False
    if grid.nu == 1 and grid.d == 1:
        rough = regularity_probe(grid.spec).unbounded_suspect
    out = []
    for j in range(grid.nu):
        a, b = g1[..., j], g2[..., j]
        f1 = float((np.abs(a) < tol_grad).mean())
        f2 = float((np.abs(b) < tol_grad).mean())
        sup_growth = float(b.max() / max(a.max(), 1e-300))
        if f2 >= min_measure and f2 > 0.6 * f1:
            verdict = "flat_suspect"
        elif rough or sup_growth > 1.2:
            verdict = "inconclusive"
        elif f2 < max(min_measure, 0.75 * f1):
            verdict = "ac_consistent"
        else:
            verdict = "inconclusive"
        out.append(ACVerdict(j, verdict, f1, f2, sup_growth))
    return out


@dataclass
class RegularityProbe:
    scales: np.ndarray            # dyadic increments h = 2^-j
    max_quotients: np.ndarray     # max_theta |E(theta+h) - E(theta)| / h
    holder_exponent: float        # 1 + fitted slope of log max vs log h, in [0, 1]
    lipschitz_bound: float        # 2 pi sum |k| w(k); inf when divergent
    growth_ratio: float           # last/first quotient; > 1.2 flags non-Lipschitz

    @property
    def unbounded_suspect(self) -> bool:
        increasing = np.all(np.diff(self.max_quotients) > -1e-12)
        return bool(self.growth_ratio >= 1.2 and increasing)

    def rows(self):
        return np.column_stack([self.scales, self.max_quotients])


def regularity_probe(spec: CrystalSpec, scales=None) -> RegularityProbe:
    """Max difference quotients of the eigenvalue function at dyadic scales.

    For weights with a finite first moment the quotients stay below the
    closed Lipschitz bound 2 pi sum |k| w(k); lacunary examples show
    steadily growing maxima instead (growth_ratio across the scale range).
    """
    if spec.nu != 1 or spec.d != 1:
        raise ValueError("the probe runs on scalar symbols (d = nu = 1)")
    if scales is None:
        js = np.arange(6, 15)
    else:
        js = np.asarray([int(round(-np.log2(h))) for h in scales])
    jmax = int(js.max())
    N = 2 ** (jmax + 2)
    vals, _ = floquet_symbol_grid(spec, N)
    quotients = []
    for j in js:
        step = N >> int(j)
        q = np.abs(np.roll(vals, -step) - vals) * (2.0 ** j)
        quotients.append(float(q.max()))
    hs = 2.0 ** (-js.astype(float))
    q = np.asarray(quotients)
    slope = np.polyfit(np.log(hs), np.log(np.maximum(q, 1e-300)), 1)[0]
    holder = float(np.clip(1.0 + slope, 0.0, 1.0))
    lip = 2 * np.pi * spec.weights[0][0].abs_moment(1.0)
    return RegularityProbe(scales=hs, max_quotients=q, holder_exponent=holder,
                           lipschitz_bound=float(lip),
                           growth_ratio=float(q[-1] / max(q[0], 1e-300)))
