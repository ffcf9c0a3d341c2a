"""Floquet matrices, band grids, flat-band detection and structure checks.

The Floquet matrix H(theta) has entries h_ij = sum_k w_ij(k) e^{2 pi i theta.k}
plus Q_i on the diagonal; its sorted eigenvalue surfaces E_1 <= ... <= E_nu
over the torus carry the spectrum as a union of bands.  Grid sampling is
deterministic (theta = m/N, N divisible by 4 so kink points land on nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .crystal import (CrystalSpec, check_connected, ensure_valid,
                      floquet_symbol_grid, grid_points, norm_bound)
from .errors import CrystalError

__all__ = ["BandGrid", "BandReport", "FlatSegment", "floquet_matrix",
           "sample_bands", "detect_flat_bands", "quotient_matrix",
           "QuotientReport", "dirichlet_form_check", "top_band_flatness"]


@dataclass(eq=False)
class BandGrid:
    """Eigenvalue surfaces sampled on the N^d torus grid.

    eigenvalues has shape (N,)*d + (nu,), ascending along the last axis.
    trunc_error is a certified bound on the entrywise assembly error.
    """

    spec: CrystalSpec
    N: int
    eigenvalues: np.ndarray
    trunc_error: float
    hermiticity_defect: float = 0.0
    eigenvectors: np.ndarray | None = None

    @property
    def nu(self) -> int:
        return self.spec.nu

    @property
    def d(self) -> int:
        return self.spec.d

    def band_ranges(self) -> list[tuple[float, float]]:
        flat = self.eigenvalues.reshape(-1, self.nu)
        return [(float(flat[:, j].min()), float(flat[:, j].max()))
                for j in range(self.nu)]

    def thetas(self) -> np.ndarray:
        return grid_points(self.N, self.d)


@dataclass
class FlatSegment:
    value: float
    measure: float
    band: int
    theta_lo: float
    theta_hi: float


@dataclass
class BandReport:
    bands: list
    flats: list
    N: int
    tol_flat: float
    min_measure: float

    def classify(self, j: int) -> str:
        """'flat', 'partly_flat' or 'dispersive' for band j."""
        ms = [f.measure for f in self.flats if f.band == j]
        if not ms:
            return "dispersive"
        return "flat" if max(ms) > 1.0 - 2.0 / self.N else "partly_flat"

    def to_json(self) -> dict:
        return {"bands": [{"min": lo, "max": hi} for lo, hi in self.bands],
                "flats": [{"value": f.value, "measure": f.measure, "band": f.band}
                          for f in self.flats]}


def floquet_matrix(spec: CrystalSpec, theta, eps: float = 1e-9) -> np.ndarray:
    """H(theta) as a dense Hermitian nu x nu matrix, tails summed in closed form.

    The neglected remainder of every entry is below eps (the supported tail
    rules are summed exactly; eps gates the generic truncation fallback).
    """
    ensure_valid(spec)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if th.shape != (spec.d,):
        raise ValueError("theta must have %d component(s)" % spec.d)
    if spec.nu == 1 and spec.symbol is not None:
        val = float(np.asarray(spec.symbol(th if spec.d > 1 else th[0])))
        return np.array([[val]], dtype=complex)
    H = np.zeros((spec.nu, spec.nu), dtype=complex)
    for i in range(spec.nu):
        for j in range(spec.nu):
            H[i, j] = spec.weights[i][j].symbol_value(th)
        H[i, i] += spec.Q[i]
    defect = float(np.max(np.abs(H - H.conj().T)))
    if defect > 1e-10 * (1.0 + float(np.max(np.abs(H)))):
        raise CrystalError("Floquet matrix not Hermitian at theta = %s" % (th,))
    return 0.5 * (H + H.conj().T)


def _assemble_grid(spec: CrystalSpec, N: int):
    """All H(theta) on the grid at once: shape (N,)*d + (nu, nu)."""
    nu, d = spec.nu, spec.d
    if spec.matrix_symbol is not None:
        H = np.asarray(spec.matrix_symbol(grid_points(N, d)), dtype=complex)
        return H, 1e-14 * (1.0 + float(np.max(np.abs(H))))
    shape = (N,) * d
    H = np.zeros(shape + (nu, nu), dtype=complex)
    err = 0.0
    for i in range(nu):
        for j in range(nu):
            fam = spec.weights[i][j]
            if fam.is_zero():
                continue
            folded = fam.fold(N)
            H[..., i, j] = np.fft.ifftn(folded) * N ** d
        H[..., i, i] += spec.Q[i]
    err += 1e-13 * (1.0 + float(np.max(np.abs(H))))
    return H, err


def sample_bands(spec: CrystalSpec, N: int, eps: float = 1e-9,
                 store_vectors: bool = False) -> BandGrid:
    """Eigen-decompose H(theta) at all N^d grid points (deterministic).

    N must be >= 4 and divisible by 4 so that the quarter-point kinks of the
    piecewise-linear examples fall on nodes.
    """
    if N < 4 or N % 4:
        raise ValueError("grid size must be >= 4 and divisible by 4")
    ensure_valid(spec)
    if spec.nu == 1:
        vals, err = floquet_symbol_grid(spec, N)
        ev = vals[..., None]
        return BandGrid(spec, N, ev, err)
    H, err = _assemble_grid(spec, N)
    defect = float(np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2)))))
    scale = 1.0 + float(np.max(np.abs(H)))
    if defect > 1e-10 * scale:
        flat = np.abs(H - np.conj(np.swapaxes(H, -1, -2))).reshape(-1)
        at = np.argmax(flat) // (spec.nu * spec.nu)
        raise CrystalError("Hermiticity defect %.2e at grid point %d" % (defect, at))
    if store_vectors:
        ev, vec = np.linalg.eigh(H)
        return BandGrid(spec, N, ev, err + defect, defect, vec)
    ev = np.linalg.eigvalsh(H)
    return BandGrid(spec, N, ev, err + defect, defect)


def detect_flat_bands(grid: BandGrid, tol_flat: float | None = None,
                      min_measure: float = 1e-3) -> BandReport:
    """Locate eigenvalues that a positive fraction of the grid shares.

    Candidate values come from a histogram of all samples at bin width
    tol_flat (default 1e-9 times the total band width), then each candidate
    is refined to the median of its cluster and its grid measure reported.
    """
    ev = grid.eigenvalues.reshape(-1, grid.nu)
    npts = ev.shape[0]
    lo, hi = float(ev.min()), float(ev.max())
    width = max(hi - lo, 1e-300)
    if tol_flat is None:
        tol_flat = 1e-9 * width
    flats = []
    thetas = grid.thetas().reshape(npts, -1) if grid.d > 1 else \
        grid.thetas().reshape(npts, 1)
    # a symmetric symbol duplicates every generic level (theta vs 1 - theta)
    # and may have finitely many exact coincidences; a genuine flat segment
    # must contain neighbouring grid points, not just scattered matches
    min_count = max(3, math.ceil(min_measure * npts))
    shape = grid.eigenvalues.shape[:-1]
    for j in range(grid.nu):
        col = ev[:, j]
        bins = np.floor((col - lo) / tol_flat).astype(np.int64)
        uniq, counts = np.unique(bins, return_counts=True)
        # merge adjacent bins: a flat value may straddle a bin edge
        cand = uniq[counts >= min(min_count, max(2, min_count // 2))]
        seen = set()
        for b in cand:
            if b in seen:
                continue
            sel = (bins >= b - 1) & (bins <= b + 1)
            value = float(np.median(col[sel]))
            mask = np.abs(col - value) < tol_flat
            measure = float(mask.mean())
            cube = mask.reshape(shape)
            contiguous = any(np.any(cube & np.roll(cube, 1, axis=ax))
                             for ax in range(grid.d))
            if measure < min_measure or mask.sum() < min_count or not contiguous:
                continue
            seen.update((b - 1, b, b + 1))
            th_sel = thetas[mask, 0]
            flats.append(FlatSegment(value=value, measure=measure, band=j,
                                     theta_lo=float(th_sel.min()),
                                     theta_hi=float(th_sel.max())))
    # deduplicate values discovered in neighbouring bins
    flats.sort(key=lambda f: (f.band, f.value))
    pruned = []
    for f in flats:
        if pruned and f.band == pruned[-1].band and \
                abs(f.value - pruned[-1].value) <= 2 * tol_flat:
            if f.measure > pruned[-1].measure:
                pruned[-1] = f
            continue
        pruned.append(f)
    return BandReport(bands=grid.band_ranges(), flats=pruned, N=grid.N,
                      tol_flat=tol_flat, min_measure=min_measure)


@dataclass
class QuotientReport:
    matrix: np.ndarray
    error: np.ndarray
    irreducible: bool
    components: list


def quotient_matrix(spec: CrystalSpec) -> QuotientReport:
    """Total inter-orbit weights t_ij = sum_k w_ij(k) with certified error bars."""
    ensure_valid(spec)
    sums, errs = spec.weight_sums()
    # connected components of the nu-vertex quotient graph
    nu = spec.nu
    seen = [False] * nu
    comps = []
    for s in range(nu):
        if seen[s]:
            continue
        comp, queue = [], [s]
        seen[s] = True
        while queue:
            i = queue.pop()
            comp.append(i)
            for j in range(nu):
                if not seen[j] and (sums[i, j] > 0 or sums[j, i] > 0):
                    seen[j] = True
                    queue.append(j)
        comps.append(sorted(comp))
    return QuotientReport(matrix=sums, error=errs,
                          irreducible=(len(comps) == 1), components=comps)


def dirichlet_form_check(spec: CrystalSpec, theta, f, eps: float = 1e-9):
    """Compare the quadratic form of D - A(theta) with its edgewise expansion.

    lhs: <f, (D - A(theta)) f> from the assembled Floquet matrix.
    rhs: (1/2) sum_{i,j,k} w_ij(k) |f_i - e^{2 pi i theta.k} f_j|^2, explicit
    entries summed directly and tail rules folded in through their exact
    first and second moments.  Returns (lhs, rhs, |lhs - rhs|).
    """
    ensure_valid(spec)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    f = np.asarray(f, dtype=complex).reshape(spec.nu)
    H = floquet_matrix(spec, th, eps)
    A = H - np.diag(spec.Q)
    D = np.diag(spec.degrees())
    lhs = complex(np.vdot(f, (D - A) @ f)).real
    rhs = 0.0
    for i in range(spec.nu):
        for j in range(spec.nu):
            fam = spec.weights[i][j]
            for k, w in fam.explicit.items():
                phase = np.exp(2j * np.pi * float(np.dot(th, k)))
                rhs += 0.5 * w * abs(f[i] - phase * f[j]) ** 2
            for t in fam.tails:
                # |f_i - z f_j|^2 = |f_i|^2 + |f_j|^2 - 2 Re(conj(f_i) z f_j)
                mass = t.total()
                cross = t.symbol_sum(float(th[0])) if spec.d == 1 else None
                if cross is None:
                    raise CrystalError("tail cross terms need d = 1")
                rhs += 0.5 * (mass * (abs(f[i]) ** 2 + abs(f[j]) ** 2))
                rhs -= 0.5 * 2.0 * (np.conj(f[i]) * f[j]).real * float(np.real(cross))
    return lhs, rhs, abs(lhs - rhs)


@dataclass
class FlatnessVerdict:
    checked: bool
    passed: bool
    oscillation: float
    threshold: float
    note: str = ""


def top_band_flatness(grid: BandGrid, tol_flat: float | None = None) -> FlatnessVerdict:
    """PASS iff the top band's oscillation clearly exceeds the flat tolerance.

    Requires a connected crystal; for disconnected input the check is skipped
    with a warning verdict.
    """
    conn = check_connected(grid.spec)
    ranges = grid.band_ranges()
    lo, hi = ranges[-1]
    width = max(max(h for _, h in ranges) - min(l for l, _ in ranges), 1e-300)
    if tol_flat is None:
        tol_flat = 1e-9 * width
    osc = hi - lo
    if not conn.connected:
        return FlatnessVerdict(False, False, osc, 10 * tol_flat,
                               "skipped: crystal is not connected (%s)" % conn.witness())
    return FlatnessVerdict(True, osc > 10 * tol_flat, osc, 10 * tol_flat)


def bands_to_rows(grid: BandGrid):
    """Rows (theta_1..theta_d, E_1..E_nu) in grid order, for CSV export."""
    th = grid.thetas().reshape(-1, grid.d) if grid.d > 1 else \
        grid.thetas().reshape(-1, 1)
    ev = grid.eigenvalues.reshape(-1, grid.nu)
    return np.hstack([th, ev])
