"""Lattice Green's functions G^z(0, n) and off-diagonal decay fitting.

For a one-vertex crystal the kernel is the Fourier coefficient sequence of
1/(h(theta) - z).  Energies are validated against the sampled band with a
safety margin; decay fits compare a power model (per residue class, since
the leading constants alternate) against an exponential one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crystal import CrystalSpec, ensure_valid, floquet_symbol_grid
from .errors import ResolutionExceeded, SpectrumProximity
from .evolve import RESOLUTION_CAP
from .floquet import sample_bands

__all__ = ["GreenSamples", "green", "DecayFit", "decay_fit"]


@dataclass(eq=False)
class GreenSamples:
    z: complex
    n_max: int
    values: np.ndarray           # index n + n_max, n = -n_max..n_max
    resolution: int
    error: float
    band: tuple[float, float]
    distance: float              # dist(z, sampled band)

    def __getitem__(self, n: int) -> complex:
        return complex(self.values[n + self.n_max])

    @property
    def ns(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def rows(self):
        v = self.values
        return np.column_stack([self.ns, v.real, v.imag, np.abs(v)])


def green(spec: CrystalSpec, z: complex, n_max: int = 256,
          eps: float = 1e-10) -> GreenSamples:
    """Resolvent kernel G^z(0, n) for |n| <= n_max by certified torus FFT.

    z must keep a distance of at least 3x the band truncation error from the
    sampled spectrum (SpectrumProximity otherwise); the FFT resolution
    doubles until two passes agree to eps in the sup norm on the window.
    """
    ensure_valid(spec)
    if spec.nu != 1:
        raise ValueError("resolvent kernels are implemented for nu = 1")
    z = complex(z)
    grid = sample_bands(spec, 2048)
    lo, hi = grid.band_ranges()[0]
    margin = 3.0 * max(grid.trunc_error, 1e-14)
    if lo - margin <= z.real <= hi + margin and abs(z.imag) <= margin:
        dist = max(0.0, max(lo - z.real, z.real - hi, abs(z.imag)))
        raise SpectrumProximity(
            "z = %s is inside or within %.2e of the sampled band [%g, %g]"
            % (z, margin, lo, hi), distance=dist)
    dist = abs(z.imag) if lo <= z.real <= hi else \
        math.hypot(max(lo - z.real, z.real - hi, 0.0), z.imag)

    def pass_at(N):
        h, _ = floquet_symbol_grid(spec, N)
        g = 1.0 / (h - z)
        G = np.fft.fft(g) / N
        ms = np.arange(-n_max, n_max + 1)
        return G[ms % N]

    N = max(4096, 8 * n_max)
    prev = pass_at(N)
    while True:
        N *= 2
        cur = pass_at(N)
        diff = float(np.max(np.abs(cur - prev)))
        if diff < eps:
            return GreenSamples(z=z, n_max=n_max, values=cur, resolution=N,
                                error=diff, band=(lo, hi), distance=dist)
        if 2 * N > RESOLUTION_CAP:
            raise ResolutionExceeded("Green kernel did not converge (gap %.2e)" % diff,
                                     resolution=N, achieved=diff)
        prev = cur


@dataclass
class DecayFit:
    model: str                   # "power" | "exponential"
    exponent: float              # power exponent (slope of log|G| vs log n)
    rate: float                  # exponential rate (slope of log|G| vs n)
    exponent_stderr: float
    residual_power: float
    residual_exp: float
    classes: int                 # residue classes used by the power fit

    @property
    def residual_ratio(self) -> float:
        return self.residual_power / max(self.residual_exp, 1e-300)


def decay_fit(samples: GreenSamples, n_min: int = 64) -> DecayFit:
    """Competing power / exponential regressions on |G^z(0, n)|.

    Power fits run per residue class (mod 1, 2 and 4 are tried; the leading
    constants of kinked symbols alternate along such classes) and the best
    split is kept; model selection is by mean squared log-residual.
    """
    if samples.n_max < max(2 * n_min, 64):
        raise ValueError("need n_max >= %d for a stable fit" % max(2 * n_min, 64))
    ns = np.arange(n_min, samples.n_max + 1)
    g = np.abs(samples.values[ns + samples.n_max])
    # values below the certified kernel error are numerical noise, not decay
    floor = max(1e-280, 30.0 * samples.error)
    live = g > floor
    if live.sum() < 8:
        return DecayFit("underflow", float("nan"), float("nan"), float("nan"),
                        float("nan"), float("nan"), 0)
    ns, g = ns[live], g[live]
    logg = np.log(g)

    best = None
    for m in (1, 2, 4):
        slopes, resid, wsum = [], 0.0, 0
        ok = True
        for r in range(m):
            sel = ns % m == r
            if sel.sum() < 4:
                ok = False
                break
            x, y = np.log(ns[sel]), logg[sel]
            c, res, _, _ = np.linalg.lstsq(
                np.column_stack([x, np.ones_like(x)]), y, rcond=None)
            slopes.append(c[0])
            resid += float(res[0]) if res.size else 0.0
            wsum += sel.sum()
        if not ok:
            continue
        score = resid / wsum
        if best is None or score < best[0]:
            best = (score, m, slopes)
    score_pw, m_pw, slopes = best
    exponent = float(np.mean(slopes))
    spread = float(np.std(slopes))

    ce, res_e, _, _ = np.linalg.lstsq(
        np.column_stack([ns.astype(float), np.ones_like(ns, dtype=float)]),
        logg, rcond=None)
    score_ex = float(res_e[0]) / len(ns) if res_e.size else 0.0

    model = "power" if score_pw <= score_ex else "exponential"
    return DecayFit(model=model, exponent=exponent, rate=float(ce[0]),
                    exponent_stderr=spread / max(math.sqrt(len(slopes)), 1.0),
                    residual_power=score_pw, residual_exp=score_ex, classes=m_pw)
