"""Periodic-graph data types, validation, connectivity and built-in examples.

A crystal is a Z^d-periodic weighted graph with a finite fundamental cell of
nu vertices.  Entry (i, j) of `weights` holds the family w_ij(k) >= 0 coupling
cell vertex i to vertex j shifted by k; Q holds the cell potential values.
The standing conditions (positivity, no loops, symmetry w_ji(-k) = w_ij(k),
certified l1 summability) are checked by `validate`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (CrystalError, LoopViolation, PositivityViolation,
                     SummabilityViolation, SymmetryViolation)
from .weights import WeightFamily, PowerTail, DyadicTail, family_from_json

__all__ = ["CrystalSpec", "ValidationReport", "ConnectivityReport", "validate",
           "ensure_valid", "check_connected", "builtin", "BUILTIN_NAMES",
           "load_crystal", "crystal_to_json", "crystal_from_json",
           "norm_bound", "floquet_symbol_grid"]

PI2 = math.pi ** 2


@dataclass(frozen=True, eq=False)
class CrystalSpec:
    """Immutable description of a Z^d-periodic weighted graph.

    Optional fields carry closed forms used as exact oracles: `symbol` is the
    scalar Floquet function for nu = 1 (vectorised over theta), `symbol_grad`
    its gradient, `matrix_symbol` the nu x nu Floquet matrix for nu > 1.
    """

    d: int
    nu: int
    Q: np.ndarray
    weights: tuple
    label: str = ""
    symbol: Callable | None = None
    symbol_grad: Callable | None = None
    matrix_symbol: Callable | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=float).reshape(self.nu))
        if len(self.weights) != self.nu or any(len(row) != self.nu for row in self.weights):
            raise ValueError("weights must be a nu x nu grid of WeightFamily")

    def family(self, i: int, j: int) -> WeightFamily:
        return self.weights[i][j]

    def weight_sums(self) -> tuple[np.ndarray, np.ndarray]:
        """Certified l1 sums per family and their error bars."""
        if "sums" not in self._cache:
            s = np.zeros((self.nu, self.nu))
            e = np.zeros((self.nu, self.nu))
            for i in range(self.nu):
                for j in range(self.nu):
                    s[i, j], e[i, j] = self.weights[i][j].total()
            self._cache["sums"] = (s, e)
        return self._cache["sums"]

    def degrees(self) -> np.ndarray:
        """Weighted degree of each cell vertex."""
        return self.weight_sums()[0].sum(axis=1)


@dataclass
class ValidationReport:
    label: str
    conditions: dict
    violations: list
    weight_sums: np.ndarray | None = None
    sum_errors: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def lines(self) -> list[str]:
        out = ["%-14s %s" % (name, "pass" if good else "FAIL")
               for name, good in self.conditions.items()]
        out += ["  " + str(v) for v in self.violations]
        return out


def validate(spec: CrystalSpec, tol: float = 1e-12) -> ValidationReport:
    """Check the standing weight conditions; failures are fatal downstream."""
    conditions = {"positivity": True, "no_loop": True, "symmetry": True,
                  "summability": True}
    violations = []
    nu = spec.nu
    for i in range(nu):
        for j in range(nu):
            fam = spec.weights[i][j]
            for k, v in fam.explicit.items():
                if v < -tol:
                    conditions["positivity"] = False
                    violations.append(PositivityViolation(
                        "w[%d,%d](%s) = %g < 0" % (i + 1, j + 1, k, v)))
            for t in fam.tails:
                if getattr(t, "c", 1.0) < 0:
                    conditions["positivity"] = False
                    violations.append(PositivityViolation(
                        "tail of w[%d,%d] has negative constant" % (i + 1, j + 1)))
    for i in range(nu):
        zero = (0,) * spec.d
        if abs(spec.weights[i][i].explicit.get(zero, 0.0)) > tol:
            conditions["no_loop"] = False
            violations.append(LoopViolation("w[%d,%d](0) != 0" % (i + 1, i + 1)))
    for i in range(nu):
        for j in range(i, nu):
            fam, opp = spec.weights[i][j], spec.weights[j][i]
            mirror = opp.mirrored()
            keys = set(fam.explicit) | set(mirror.explicit)
            for k in keys:
                a, b = fam.explicit.get(k, 0.0), mirror.explicit.get(k, 0.0)
                if abs(a - b) > tol:
                    conditions["symmetry"] = False
                    violations.append(SymmetryViolation(
                        "w[%d,%d](%s) = %g but w[%d,%d](%s) = %g"
                        % (i + 1, j + 1, k, a, j + 1, i + 1,
                           tuple(-x for x in k), b)))
            if set(fam.tails) != set(opp.tails):
                conditions["symmetry"] = False
                violations.append(SymmetryViolation(
                    "tail rules of w[%d,%d] and w[%d,%d] differ" % (i + 1, j + 1, j + 1, i + 1)))
    sums = errs = None
    try:
        sums, errs = spec.weight_sums()
    except SummabilityViolation as exc:
        conditions["summability"] = False
        violations.append(exc)
    else:
        if not np.all(np.isfinite(sums)):
            conditions["summability"] = False
            violations.append(SummabilityViolation("a weight family has infinite mass"))
    return ValidationReport(spec.label, conditions, violations, sums, errs)


def ensure_valid(spec: CrystalSpec, tol: float = 1e-12) -> None:
    """Raise the first violation if the spec fails validation (cached)."""
    if spec._cache.get("valid"):
        return
    report = validate(spec, tol)
    if not report.ok:
        for v in report.violations:
            raise v
        raise CrystalError("validation failed: %s" % report.conditions)
    spec._cache["valid"] = True


def norm_bound(spec: CrystalSpec) -> float:
    """Certified operator-norm bound: max_i sum_j ||w_ij||_1 + ||Q||_inf."""
    sums, errs = spec.weight_sums()
    return float(np.max((sums + errs).sum(axis=1)) + np.max(np.abs(spec.Q)))


# ---------------------------------------------------------------------------
# Connectivity
# ---------------------------------------------------------------------------

@dataclass
class ConnectivityReport:
    connected: bool
    quotient_connected: bool
    lattice_index: int | None    # 1 = full lattice; 0 = not full rank
    components: list | None = None

    def witness(self) -> str:
        if self.connected:
            return "connected"
        if not self.quotient_connected:
            return "quotient graph splits into %s" % (self.components,)
        return "cycle voltages generate a sublattice of index %s" % (self.lattice_index,)


def _lattice_index(gens: list[tuple], d: int) -> int:
    """Index of the subgroup of Z^d generated by gens (0 if not full rank)."""
    cols = [list(map(int, g)) for g in gens if any(g)]
    basis = []
    for i in range(d):
        while True:
            nz = [c for c in cols if c[i] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda c: abs(c[i]))
            reduced = True
            for c in cols:
                if c is piv or c[i] == 0:
                    continue
                q = c[i] // piv[i]
                for r in range(d):
                    c[r] -= q * piv[r]
                if c[i] != 0:
                    reduced = False
            if reduced:
                cols.remove(piv)
                basis.append(piv)
                break
    if len(basis) < d:
        return 0
    det = np.linalg.det(np.array(basis, dtype=float).T)
    return int(round(abs(det)))


def check_connected(spec: CrystalSpec) -> ConnectivityReport:
    """Covering-graph criterion: quotient connected and cycle voltages span Z^d.

    The support examined is the explicit part plus each tail rule's declared
    pattern.  For nu = 1 this reduces to the support lattice having index one.
    """
    nu, d = spec.nu, spec.d
    # quotient adjacency (positive total weight)
    adj = [[False] * nu for _ in range(nu)]
    supports = {}
    for i in range(nu):
        for j in range(nu):
            gens = spec.weights[i][j].support_generators()
            supports[(i, j)] = gens
            if gens and i != j:
                adj[i][j] = adj[j][i] = True
    # BFS on the quotient, recording a spanning tree with one chosen offset
    seen = {0}
    x = {0: (0,) * d}
    queue = [0]
    while queue:
        i = queue.pop(0)
        for j in range(nu):
            if j in seen or not adj[i][j]:
                continue
            k = supports[(i, j)][0] if supports[(i, j)] else supports[(j, i)][0]
            if not supports[(i, j)]:
                k = tuple(-x_ for x_ in k)
            x[j] = tuple(a + b for a, b in zip(x[i], k))
            seen.add(j)
            queue.append(j)
    quotient_connected = len(seen) == nu
    if not quotient_connected:
        comp = [sorted(seen), sorted(set(range(nu)) - seen)]
        return ConnectivityReport(False, False, None, components=comp)
    # cycle voltages: x_i + k - x_j over every supported edge offset
    voltages = []
    for (i, j), gens in supports.items():
        if j not in x or i not in x:
            continue
        for k in gens:
            v = tuple(a + b - c for a, b, c in zip(x[i], k, x[j]))
            if any(v):
                voltages.append(v)
    index = _lattice_index(voltages, d)
    return ConnectivityReport(index == 1, True, index)


# ---------------------------------------------------------------------------
# Grid evaluation of the (nu = 1) Floquet function
# ---------------------------------------------------------------------------

def grid_points(N: int, d: int) -> np.ndarray:
    """Torus grid m/N; shape (N,) for d = 1, else (N,)*d + (d,)."""
    axis = np.arange(N) / N
    if d == 1:
        return axis
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack(mesh, axis=-1)


def floquet_symbol_grid(spec: CrystalSpec, N: int) -> tuple[np.ndarray, float]:
    """Sample the scalar Floquet function h on the N-grid (nu = 1).

    Returns (values, certified truncation error).  Uses the closed-form
    symbol when the spec carries one, otherwise folds all weights into
    residue classes mod N (exact for the supported tail rules) and applies
    an FFT, so the full infinite series is accounted for.
    """
    if spec.nu != 1:
        raise ValueError("scalar symbol needs nu = 1")
    key = ("grid", N)
    if key in spec._cache:
        return spec._cache[key]
    if spec.symbol is not None:
        vals = np.asarray(spec.symbol(grid_points(N, spec.d)), dtype=float)
        out = (vals, 1e-14 * (1.0 + float(np.max(np.abs(vals)))))
    else:
        folded = spec.weights[0][0].fold(N)
        vals = np.fft.ifftn(folded) * N ** spec.d
        imag = float(np.max(np.abs(vals.imag)))
        scale = 1.0 + float(np.max(np.abs(vals.real)))
        if imag > 1e-9 * scale:
            raise CrystalError("asymmetric weights produced a complex symbol")
        vals = vals.real + float(spec.Q[0])
        out = (vals, 1e-13 * scale + imag)
    spec._cache[key] = out
    return out


# ---------------------------------------------------------------------------
# Built-in crystals
# ---------------------------------------------------------------------------

BUILTIN_NAMES = ["graph_a", "graph_b", "graph_c", "thm1_1", "thm1_2", "thm1_3",
                 "weierstrass", "sc_dyadic", "zd:<d>", "frac:<d>:<alpha>",
                 "adjacency_power:<p>", "fig5_left", "fig5_right"]

_EXPLICIT_CUT = 64   # explicit coefficients up to this |k|; analytic tails beyond


def _power_families(coef_rules, K0=_EXPLICIT_CUT):
    """Build a 1d family from per-progression power rules [(c, p, mod, res), ...]."""
    explicit = {}
    for k in range(1, K0 + 1):
        w = 0.0
        for c, p, mod, res in coef_rules:
            if k % mod == res % mod:
                w += c * k ** (-p)
        if w:
            explicit[(k,)] = w
            explicit[(-k,)] = w
    tails = tuple(PowerTail(c=c, p=p, K0=K0, mod=mod, residue=res) for c, p, mod, res in coef_rules)
    return WeightFamily(d=1, explicit=explicit, tails=tails)


def _scalar_spec(fam, Q, label, symbol=None, grad=None):
    return CrystalSpec(d=1, nu=1, Q=np.array([Q]), weights=((fam,),), label=label,
                       symbol=symbol, symbol_grad=grad)


def _sym_a(th):
    x = np.mod(th, 1.0)
    return (x - 0.5) ** 2


def _grad_a(th):
    x = np.mod(th, 1.0)
    return 2.0 * (x - 0.5)


def _sym_b(th):
    return np.abs(0.5 - np.mod(th, 1.0))


def _grad_b(th):
    x = np.mod(th, 1.0)
    return np.where(x < 0.5, -1.0, 1.0)


def _sym_c(th):
    x = np.mod(th, 1.0)
    return np.maximum(0.25 - x, 0.0) + np.maximum(x - 0.75, 0.0)


def _grad_c(th):
    x = np.mod(th, 1.0)
    return np.where(x < 0.25, -1.0, np.where(x > 0.75, 1.0, 0.0))


def _affine(fn, a, b):
    return lambda th: a * fn(th) + b


def _scaled(fn, a):
    return lambda th: a * fn(th)


def _lacunary(coefs):
    """h(theta) = sum_n coefs[n] * cos(2 pi 2^n theta), evaluated termwise.

    The doubling angle is reduced mod 1 at every level; for dyadic grid
    points this is exact, so the huge-argument cosine noise never appears.
    """
    def fn(th):
        y = np.mod(np.asarray(th, dtype=float), 1.0)
        out = np.zeros_like(y)
        for c in coefs:
            out += c * np.cos(2.0 * np.pi * y)
            y = np.mod(2.0 * y, 1.0)
        return out
    return fn


def _zd_spec(d):
    explicit = {}
    for i in range(d):
        e = [0] * d
        e[i] = 1
        explicit[tuple(e)] = 1.0
        e[i] = -1
        explicit[tuple(e)] = 1.0
    fam = WeightFamily(d=d, explicit=explicit)
    if d == 1:
        sym = lambda th: 2.0 * np.cos(2 * np.pi * th)
        grad = lambda th: -4.0 * np.pi * np.sin(2 * np.pi * th)
    else:
        sym = lambda th: np.sum(2.0 * np.cos(2 * np.pi * th), axis=-1)
        grad = lambda th: -4.0 * np.pi * np.sin(2 * np.pi * th)
    return CrystalSpec(d=d, nu=1, Q=np.zeros(1), weights=((fam,),),
                       label="zd:%d" % d, symbol=sym, symbol_grad=grad)


def _adjacency_power_spec(p):
    if p < 1:
        raise ValueError("power must be >= 1")
    explicit = {}
    for k in range(-p, p + 1):
        if k == 0 or (p + k) % 2:
            continue
        explicit[(k,)] = float(math.comb(p, (p + k) // 2))
    Q = float(math.comb(p, p // 2)) if p % 2 == 0 else 0.0
    fam = WeightFamily(d=1, explicit=explicit)
    sym = lambda th: (2.0 * np.cos(2 * np.pi * th)) ** p
    grad = lambda th: -4.0 * np.pi * p * np.sin(2 * np.pi * th) * (2.0 * np.cos(2 * np.pi * th)) ** (p - 1)
    return _scalar_spec(fam, Q, "adjacency_power:%d" % p, sym, grad)


def _fig5_spec(side):
    one = {"left": {(0, 1): {(0,): 1.0}, (1, 2): {(0,): 1.0},
                    (1, 1): {(1,): 1.0, (-1,): 1.0}},
           "right": {(0, 1): {(0,): 1.0}, (1, 2): {(0,): 1.0},
                     (0, 0): {(1,): 1.0, (-1,): 1.0},
                     (1, 1): {(1,): 1.0, (-1,): 1.0},
                     (2, 2): {(1,): 1.0, (-1,): 1.0}}}[side]
    fams = [[{} for _ in range(3)] for _ in range(3)]
    for (i, j), entries in one.items():
        fams[i][j] = dict(entries)
        if i != j:
            fams[j][i] = {tuple(-x for x in k): v for k, v in entries.items()}
    weights = tuple(tuple(WeightFamily(d=1, explicit=fams[i][j]) for j in range(3))
                    for i in range(3))
    return CrystalSpec(d=1, nu=3, Q=np.zeros(3), weights=weights,
                       label="fig5_%s" % side)


def builtin(name: str) -> CrystalSpec:
    """Construct a named example crystal; see BUILTIN_NAMES for the grammar."""
    name = name.strip().replace("(", ":").replace(")", "").replace(",", ":")
    parts = [p for p in name.split(":") if p]
    head, args = parts[0], parts[1:]

    if head == "graph_a":
        fam = _power_families([(1 / (2 * PI2), 2.0, 1, 0)])
        return _scalar_spec(fam, 1 / 12, "graph_a", _sym_a, _grad_a)
    if head == "graph_b":
        fam = _power_families([(1 / PI2, 2.0, 2, 1)])
        return _scalar_spec(fam, 0.25, "graph_b", _sym_b, _grad_b)
    if head == "graph_c":
        fam = _power_families([(1 / (2 * PI2), 2.0, 2, 1), (1 / PI2, 2.0, 4, 2)])
        return _scalar_spec(fam, 1 / 16, "graph_c", _sym_c, _grad_c)
    if head == "thm1_1":
        fam = _power_families([(1.0, 2.0, 1, 0)])
        return _scalar_spec(fam, 0.0, "thm1_1", _affine(_sym_a, 2 * PI2, -PI2 / 6),
                            _scaled(_grad_a, 2 * PI2))
    if head == "thm1_2":
        fam = _power_families([(1.0, 2.0, 2, 1)])
        return _scalar_spec(fam, 0.0, "thm1_2", _affine(_sym_b, PI2, -PI2 / 4),
                            _scaled(_grad_b, PI2))
    if head == "thm1_3":
        fam = _power_families([(1.0, 2.0, 2, 1), (2.0, 2.0, 4, 2)])
        return _scalar_spec(fam, 0.0, "thm1_3", _affine(_sym_c, 2 * PI2, -PI2 / 8),
                            _scaled(_grad_c, 2 * PI2))
    if head == "weierstrass":
        # w(2^n) = 2^(-n-2): the lacunary cosine series with coefficients 2^-n
        fam = WeightFamily(d=1, explicit={},
                           tails=(DyadicTail(coef=lambda n: 2.0 ** (-n - 2), K0=0,
                                             rho=0.5, json_form=(0.25, 1.0)),))
        return _scalar_spec(fam, 0.0, "weierstrass",
                            _lacunary([2.0 ** (-n - 1) for n in range(60)]))
    if head == "sc_dyadic":
        fam = WeightFamily(d=1, explicit={},
                           tails=(DyadicTail(coef=lambda n: 2.0 ** (-n - 2) / math.sqrt(n + 1),
                                             K0=0, rho=0.5),))
        return _scalar_spec(fam, 0.0, "sc_dyadic",
                            _lacunary([2.0 ** (-n - 1) / math.sqrt(n + 1) for n in range(60)]))
    if head == "zd":
        d = int(args[0]) if args else 1
        return _zd_spec(d)
    if head == "frac":
        from .fractional import fractional_laplacian
        d = int(args[0]) if args else 1
        alpha = float(args[1]) if len(args) > 1 else 0.5
        return fractional_laplacian(d, alpha)
    if head == "adjacency_power":
        return _adjacency_power_spec(int(args[0]) if args else 2)
    if head == "fig5_left":
        return _fig5_spec("left")
    if head == "fig5_right":
        return _fig5_spec("right")
    raise KeyError("unknown builtin %r; valid names: %s" % (name, ", ".join(BUILTIN_NAMES)))


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def crystal_to_json(spec: CrystalSpec) -> dict:
    """Schema: {d, nu, Q, weights: [{i, j, entries, tail(s)}], label} (1-based i, j)."""
    fams = []
    for i in range(spec.nu):
        for j in range(spec.nu):
            fam = spec.weights[i][j]
            if fam.is_zero():
                continue
            obj = {"i": i + 1, "j": j + 1}
            obj.update(fam.to_json())
            fams.append(obj)
    return {"d": spec.d, "nu": spec.nu, "Q": list(map(float, spec.Q)),
            "weights": fams, "label": spec.label}


def crystal_from_json(obj: dict) -> CrystalSpec:
    d, nu = int(obj["d"]), int(obj["nu"])
    grid = [[None] * nu for _ in range(nu)]
    for w in obj.get("weights", []):
        i, j = int(w["i"]) - 1, int(w["j"]) - 1
        if not (0 <= i < nu and 0 <= j < nu):
            raise CrystalError("weight block (%d, %d) outside the cell" % (i + 1, j + 1))
        grid[i][j] = family_from_json(w, d)
    for i in range(nu):
        for j in range(nu):
            if grid[i][j] is None:
                grid[i][j] = grid[j][i].mirrored() if grid[j][i] is not None \
                    else WeightFamily(d=d)
    weights = tuple(tuple(row) for row in grid)
    return CrystalSpec(d=d, nu=nu, Q=np.asarray(obj.get("Q", [0.0] * nu), dtype=float),
                       weights=weights, label=obj.get("label", ""))


def load_crystal(source: str) -> CrystalSpec:
    """Load from "builtin:<name>" or a JSON file path."""
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):])
    with open(source, "r", encoding="utf-8") as fh:
        return crystal_from_json(json.load(fh))
