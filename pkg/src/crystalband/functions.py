"""Torus functions that define crystals: coefficients, constructors, combinators.

A function f on T^1 with real symmetric nonnegative summable Fourier
coefficients defines a one-vertex crystal via w(k) = fhat(k), Q = fhat(0).
This module computes coefficients (closed forms for the named shapes,
kink-aligned trapezoid quadrature otherwise), builds the crystal, and
implements the convolution / product / scale-shift combinators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .crystal import CrystalSpec, _sym_a, _sym_b, _sym_c, _grad_a, _grad_b, _grad_c, builtin
from .errors import NotAdmissible
from .weights import WeightFamily

__all__ = ["FloquetFunctionSpec", "named_function", "fourier_coefficients",
           "from_floquet_function", "combine"]

PI2 = math.pi ** 2


def _coef_a(k):
    k = np.asarray(k)
    ak = np.maximum(np.abs(k), 1)
    return np.where(k == 0, 1.0 / 12.0, 1.0 / (2 * PI2 * ak ** 2))


def _coef_b(k):
    k = np.asarray(k)
    ak = np.maximum(np.abs(k), 1)
    odd = np.abs(k) % 2 == 1
    return np.where(k == 0, 0.25, np.where(odd, 1.0 / (PI2 * ak ** 2), 0.0))


def _coef_c(k):
    k = np.asarray(k)
    ak = np.maximum(np.abs(k), 1)
    odd = np.abs(k) % 2 == 1
    even_val = (1.0 - (-1.0) ** (np.abs(k) // 2)) / (2 * PI2 * ak ** 2)
    return np.where(k == 0, 1.0 / 16.0,
                    np.where(odd, 1.0 / (2 * PI2 * ak ** 2), even_val))


def _indicator_fn(center, half):
    def fn(th):
        x = np.mod(np.asarray(th, dtype=float) - center + 0.5, 1.0) - 0.5
        return np.where(np.abs(x) <= half, 1.0, 0.0)
    return fn


def _indicator_coef(center, half):
    def coef(k):
        k = np.asarray(k, dtype=float)
        out = np.where(k == 0, 2.0 * half, 0.0)
        nz = k != 0
        kk = np.where(nz, k, 1.0)
        out = np.where(nz, np.sin(2 * np.pi * kk * half) / (np.pi * kk)
                       * np.cos(2 * np.pi * kk * center), out)
        return out
    return coef


@dataclass(frozen=True, eq=False)
class FloquetFunctionSpec:
    """A candidate Floquet function on T^1.

    Exactly one of `fn` (pointwise values) and `coef` (exact coefficient rule)
    may be missing; named shapes carry both.
    """

    d: int = 1
    name: str = ""
    fn: Callable | None = None
    coef: Callable | None = None
    grad: Callable | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def values(self, theta):
        if self.fn is None:
            raise ValueError("function %r has no pointwise form" % self.name)
        return self.fn(theta)

    def coefficients(self, kmax: int, n: int | None = None, tol: float = 1e-12):
        """fhat(k) for |k| <= kmax: exact rule if known, else quadrature."""
        ks = np.arange(-kmax, kmax + 1)
        if self.coef is not None:
            return ks, np.asarray(self.coef(ks), dtype=float)
        co = fourier_coefficients(self.fn, kmax, n=n, tol=tol)
        return ks, co


def named_function(name: str) -> FloquetFunctionSpec:
    """Closed-form shapes: a, b, c, const:<v>, indicator:<center>:<half>."""
    parts = name.replace("(", ":").replace(")", "").replace(",", ":").split(":")
    head, args = parts[0], [float(x) for x in parts[1:] if x]
    if head == "a":
        return FloquetFunctionSpec(name="a", fn=_sym_a, coef=_coef_a, grad=_grad_a)
    if head == "b":
        return FloquetFunctionSpec(name="b", fn=_sym_b, coef=_coef_b, grad=_grad_b)
    if head == "c":
        return FloquetFunctionSpec(name="c", fn=_sym_c, coef=_coef_c, grad=_grad_c)
    if head == "const":
        v = args[0] if args else 1.0
        return FloquetFunctionSpec(name=name, fn=lambda th: np.full_like(np.asarray(th, float), v),
                                   coef=lambda k: np.where(np.asarray(k) == 0, v, 0.0))
    if head == "indicator":
        center = args[0] if args else 0.5
        half = args[1] if len(args) > 1 else 0.125
        return FloquetFunctionSpec(name=name, fn=_indicator_fn(center, half),
                                   coef=_indicator_coef(center, half))
    raise KeyError("unknown named function %r" % name)


def fourier_coefficients(fn: Callable, kmax: int, n: int | None = None,
                         tol: float = 1e-12, nmax: int = 2 ** 22) -> np.ndarray:
    """Trapezoid-rule coefficients fhat(k), |k| <= kmax, for a torus function.

    Uniform grids of size 2^m (divisible by 4 so quarter-point kinks land on
    nodes).  When `n` is given a single pass at that size is returned; else
    the grid doubles until the Richardson-extrapolated correction is < tol.
    """
    def one_pass(N):
        vals = np.asarray(fn(np.arange(N) / N), dtype=complex)
        co = np.fft.fft(vals) / N
        ks = np.arange(-kmax, kmax + 1)
        return co[ks % N]

    if n is not None:
        return one_pass(int(n))
    N = max(4096, 4 * kmax)
    prev = one_pass(N)
    while True:
        N *= 2
        cur = one_pass(N)
        # second-order base rate: extrapolation correction bounds the error
        corr = np.max(np.abs(cur - prev)) / 3.0
        if corr < tol or N >= nmax:
            return cur + (cur - prev) / 3.0
        prev = cur


def from_floquet_function(f: FloquetFunctionSpec, ncoef: int,
                          tol: float = 1e-10) -> CrystalSpec:
    """Build the one-vertex crystal defined by f: w(k) = fhat(k), Q = fhat(0).

    Coefficients must be real, symmetric and nonnegative to tolerance;
    otherwise NotAdmissible names the offending index.  Named shapes a, b, c
    return the exact built-in crystal (analytic coefficients and tails).
    """
    if f.name in ("a", "b", "c"):
        return builtin("graph_" + f.name)
    ks, co = f.coefficients(ncoef, tol=tol)
    co = np.asarray(co)
    if np.iscomplexobj(co) and np.max(np.abs(co.imag)) > tol:
        raise NotAdmissible("coefficients are not real")
    co = np.real(co)
    sym_err = np.max(np.abs(co - co[::-1]))
    if sym_err > tol:
        raise NotAdmissible("coefficients are not symmetric (defect %.3e)" % sym_err)
    neg = ks[co < -tol]
    if neg.size:
        raise NotAdmissible("negative coefficient at k = %d" % int(neg[0]))
    co = np.maximum(co, 0.0)
    explicit = {}
    for k, w in zip(ks, co):
        if k != 0 and w > 0.0:
            explicit[(int(k),)] = float(w)
    fam = WeightFamily(d=1, explicit=explicit)
    Q = float(co[ncoef])
    return CrystalSpec(d=1, nu=1, Q=np.array([Q]), weights=((fam,),),
                       label=f.name or "from_function",
                       symbol=f.fn, symbol_grad=f.grad)


def combine(op: str, f: FloquetFunctionSpec, g: FloquetFunctionSpec | None = None,
            c: float = 1.0, cprime: float = 0.0,
            ncoef: int = 256) -> FloquetFunctionSpec:
    """Combinators that keep admissibility: convolution, product, scale_shift.

    convolution: hhat = fhat * ghat (pointwise), h = f (*) g on the torus.
    product:     hhat = discrete convolution of the coefficient arrays.
    scale_shift: h = c * f + cprime (only Q and a global scale change).
    """
    if op == "convolution":
        if g is None:
            g = f
        ff, gg = f, g
        coef = None
        if ff.coef is not None and gg.coef is not None:
            coef = lambda k: np.asarray(ff.coef(k)) * np.asarray(gg.coef(k))
        fn = None
        if ff.fn is not None and gg.fn is not None:
            def fn(th, _f=ff.fn, _g=gg.fn):
                th = np.asarray(th, dtype=float)
                N = 4096
                grid = np.arange(N) / N
                fv = np.fft.fft(np.asarray(_f(grid), dtype=complex)) / N
                gv = np.fft.fft(np.asarray(_g(grid), dtype=complex)) / N
                conv = fv * gv
                ks = np.fft.fftfreq(N, d=1.0 / N)
                phase = np.exp(2j * np.pi * np.multiply.outer(th, ks))
                return np.real(phase @ conv)
        return FloquetFunctionSpec(name="(%s)*(%s)" % (f.name, g.name), fn=fn, coef=coef)
    if op == "product":
        if g is None:
            g = f
        ksf, cof = f.coefficients(ncoef)
        ksg, cog = g.coefficients(ncoef)
        full = np.convolve(cof, cog)
        ks_full = np.arange(-2 * ncoef, 2 * ncoef + 1)
        table = {int(k): float(v) for k, v in zip(ks_full, full)}
        if min(full) < -1e-12:
            raise NotAdmissible("product has a negative coefficient")
        coef = lambda k: np.vectorize(lambda x: table.get(int(x), 0.0))(np.asarray(k))
        fn = None
        if f.fn is not None and g.fn is not None:
            fn = lambda th, _f=f.fn, _g=g.fn: np.asarray(_f(th)) * np.asarray(_g(th))
        return FloquetFunctionSpec(name="(%s).(%s)" % (f.name, g.name), fn=fn, coef=coef)
    if op == "scale_shift":
        if c < 0:
            raise NotAdmissible("negative scale flips coefficient signs")
        coef = None
        if f.coef is not None:
            def coef(k, _c=f.coef):
                k = np.asarray(k)
                return c * np.asarray(_c(k)) + np.where(k == 0, cprime, 0.0)
        fn = None
        if f.fn is not None:
            fn = lambda th, _f=f.fn: c * np.asarray(_f(th)) + cprime
        grad = None
        if f.grad is not None:
            grad = lambda th, _g=f.grad: c * np.asarray(_g(th))
        return FloquetFunctionSpec(name="%g*%s%+g" % (c, f.name, cprime),
                                   fn=fn, coef=coef, grad=grad)
    raise ValueError("unknown combinator %r" % op)
