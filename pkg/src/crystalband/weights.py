"""Edge-weight families: finite explicit parts plus certified analytic tails.

A weight family w: Z^d -> [0, inf) is stored as a finite map for |k|_inf <= K0
together with optional closed-form tail rules for |k|_inf > K0.  Every
operation that consumes an infinite sum goes through this module so the
truncation error is always certified, never guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import SummabilityViolation

__all__ = ["PowerTail", "DyadicTail", "WeightFamily", "normalize_key",
           "dyadic_power_tail", "family_from_json"]


def normalize_key(k, d: int) -> tuple:
    """Coerce an offset (int or sequence) to a length-d integer tuple."""
    if np.isscalar(k):
        if d != 1:
            raise ValueError("scalar offset for a %d-dimensional family" % d)
        return (int(k),)
    t = tuple(int(x) for x in k)
    if len(t) != d:
        raise ValueError("offset %r has wrong dimension (expected %d)" % (k, d))
    return t


def _first_in_progression(lo: int, mod: int, residue: int) -> int:
    """Smallest k > lo with k ≡ residue (mod mod), k >= 1."""
    k = max(lo + 1, 1)
    r = residue % mod
    k += (r - k) % mod
    return k


@dataclass(frozen=True)
class PowerTail:
    """w(k) = c * |k|^-p on an arithmetic progression of |k|, beyond K0.

    For d >= 2 the progression must be trivial (mod == 1) and |k| means the
    Euclidean norm; support is all k with |k|_inf > K0.
    """

    c: float
    p: float
    K0: int
    mod: int = 1
    residue: int = 0
    d: int = 1

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("tail constant must be nonnegative")
        if self.d > 1 and self.mod != 1:
            raise ValueError("progressions are only supported for d = 1")

    def supports(self, k: tuple) -> bool:
        a = max(abs(x) for x in k)
        if a <= self.K0:
            return False
        if self.d == 1:
            return abs(k[0]) % self.mod == self.residue % self.mod
        return True

    def value(self, k: tuple) -> float:
        if not self.supports(k):
            return 0.0
        r = math.sqrt(sum(x * x for x in k))
        return self.c * r ** (-self.p)

    def summable(self) -> bool:
        return self.p > self.d

    def total(self) -> float:
        """Exact value of the tail's l1 mass (d=1) or a certified upper value."""
        return self.tail_sum_beyond(self.K0)

    def tail_sum_beyond(self, N: int) -> float:
        """Sum of w over |k|_inf > max(N, K0); exact for d=1 via Hurwitz zeta."""
        if self.c == 0.0:
            return 0.0
        if not self.summable():
            return math.inf
        lo = max(N, self.K0)
        if self.d == 1:
            k1 = _first_in_progression(lo, self.mod, self.residue)
            # both signs; sum_{j>=0} (k1 + j*mod)^-p = mod^-p * zeta(p, k1/mod)
            return 2.0 * self.c * self.mod ** (-self.p) * float(
                hurwitz_zeta(self.p, k1 / self.mod))
        # d >= 2: sum the l_inf shells, |k|_2 >= s on shell s, shell size
        # (2s+1)^d - (2s-1)^d <= 2d(2s+1)^(d-1)
        d, p = self.d, self.p
        total = 0.0
        s = lo + 1
        # exact shell sums while they matter, then an integral-free bound
        while s <= lo + 4096:
            shell = (2 * s + 1) ** d - (2 * s - 1) ** d
            term = self.c * shell * s ** (-p)
            total += term
            if term < 1e-17 * max(total, 1e-300):
                return total
            s += 1
        rem = self.c * 2 * d * 3 ** (d - 1) * float(hurwitz_zeta(p - d + 1, s))
        return total + rem

    def weighted_sum(self, power: float) -> float:
        """Sum of |k|^power * w(k) over the tail (d=1 exact; inf if divergent)."""
        if self.c == 0.0:
            return 0.0
        q = self.p - power
        if q <= self.d:
            return math.inf
        if self.d == 1:
            k1 = _first_in_progression(self.K0, self.mod, self.residue)
            return 2.0 * self.c * self.mod ** (-q) * float(hurwitz_zeta(q, k1 / self.mod))
        return PowerTail(self.c, q, self.K0, d=self.d).tail_sum_beyond(self.K0)

    def square_r_sum_beyond(self, R: int) -> float:
        """Sum of r * w(r)^2 over tail elements r > R (d=1, for commutator use)."""
        if self.c == 0.0:
            return 0.0
        q = 2 * self.p - 1
        if q <= 1:
            return math.inf
        k1 = _first_in_progression(max(R, self.K0), self.mod, self.residue)
        # r * w(r)^2 = c^2 r^(1-2p), one-sided sum
        return self.c ** 2 * self.mod ** (-q) * float(hurwitz_zeta(q, k1 / self.mod))

    def fold_into(self, acc: np.ndarray, N: int) -> None:
        """Add the exact residue-class sums of the tail to an N-bin accumulator (d=1)."""
        if self.d != 1:
            raise NotImplementedError("tail folding needs d = 1")
        if self.c == 0.0:
            return
        if N % self.mod != 0:
            raise ValueError("grid size must be divisible by the tail progression modulus")
        r = np.arange(N)
        mask = (r % self.mod) == (self.residue % self.mod)
        rs = r[mask]
        k0 = rs + N * np.ceil((self.K0 + 1 - rs) / N).astype(np.int64)
        k0 = np.where(k0 < 1, k0 + N * np.ceil((1 - k0) / N).astype(np.int64), k0)
        sums = self.c * N ** (-self.p) * hurwitz_zeta(self.p, k0 / N)
        np.add.at(acc, rs % N, sums)          # positive k
        np.add.at(acc, (-rs) % N, sums)       # mirrored negative k

    def values_1d(self, kmax: int) -> np.ndarray:
        """Tail values at k = 1..kmax (zeros off the progression / below K0)."""
        k = np.arange(1, kmax + 1, dtype=float)
        v = self.c * k ** (-self.p)
        keep = (np.arange(1, kmax + 1) % self.mod == self.residue % self.mod)
        keep &= np.arange(1, kmax + 1) > self.K0
        return np.where(keep, v, 0.0)

    def symbol_sum(self, theta: float) -> complex:
        """Sum of w(k) e^{2 pi i k theta} over the tail, both signs (d=1, exact)."""
        import mpmath

        if self.c == 0.0:
            return 0.0
        k1 = _first_in_progression(self.K0, self.mod, self.residue)
        # sum_{j>=0} (k1 + j mod)^-p z1^(k1 + j mod), z1 = e^{2 pi i theta}
        z = mpmath.e ** (2j * mpmath.pi * self.mod * theta)
        z1k1 = mpmath.e ** (2j * mpmath.pi * theta * k1)
        s = z1k1 * mpmath.lerchphi(z, self.p, k1 / self.mod) * self.mod ** (-self.p)
        return 2.0 * self.c * float(mpmath.re(s))

    def to_json(self) -> dict:
        obj = {"kind": "power", "c": self.c, "p": self.p, "K0": self.K0}
        if self.mod != 1:
            obj["mod"] = self.mod
            obj["residue"] = self.residue
        return obj


@dataclass(frozen=True)
class DyadicTail:
    """w(2^n) = coef(n) at dyadic offsets 2^n > K0 (d=1), geometric decay.

    `rho` is a certified bound on coef(n+1)/coef(n); it feeds the closed
    remainder bound for all tail sums.  `json_form` carries the serialisable
    parameters when the rule is of the c * k^-p shape.
    """

    coef: Callable[[int], float]
    K0: int
    rho: float = 0.5
    nmax: int = 200
    json_form: tuple = ()

    d: int = 1

    def __post_init__(self):
        if not (0 < self.rho < 1):
            raise ValueError("rho must lie in (0, 1)")

    def _nmin(self, lo: int) -> int:
        n = 0
        while 2 ** n <= lo:
            n += 1
        return n

    def supports(self, k: tuple) -> bool:
        a = abs(k[0])
        return a > self.K0 and a & (a - 1) == 0

    def value(self, k: tuple) -> float:
        if not self.supports(k):
            return 0.0
        return float(self.coef(int(abs(k[0])).bit_length() - 1))

    def summable(self) -> bool:
        return True

    def total(self) -> float:
        return self.tail_sum_beyond(self.K0)

    def tail_sum_beyond(self, N: int) -> float:
        lo = max(N, self.K0)
        total, last = 0.0, 0.0
        for n in range(self._nmin(lo), self.nmax):
            last = float(self.coef(n))
            total += 2.0 * last
            if last < 1e-300:
                return total
        return total + 2.0 * last * self.rho / (1 - self.rho)

    def weighted_sum(self, power: float) -> float:
        if power > 0 and 2.0 ** power * self.rho >= 1:
            return math.inf
        total = 0.0
        for n in range(self._nmin(self.K0), self.nmax):
            term = float(self.coef(n)) * (2.0 ** n) ** power
            total += 2.0 * term
            if term < 1e-300 * max(total, 1e-10):
                break
        return total

    def square_r_sum_beyond(self, R: int) -> float:
        if 2.0 * self.rho ** 2 >= 1.0:
            return math.inf    # terms r w(r)^2 need not decay: no certificate
        total = last = 0.0
        for n in range(self._nmin(max(R, self.K0)), self.nmax):
            last = 2.0 ** n * float(self.coef(n)) ** 2
            total += last
        q = 2.0 * self.rho ** 2
        return total + last * q / (1.0 - q)

    def fold_into(self, acc: np.ndarray, N: int) -> None:
        for n in range(self._nmin(self.K0), self.nmax):
            w = float(self.coef(n))
            if w < 1e-300:
                break
            k = 2 ** n
            acc[k % N] += w
            acc[(-k) % N] += w

    def values_1d(self, kmax: int) -> np.ndarray:
        v = np.zeros(kmax)
        n = self._nmin(self.K0)
        while 2 ** n <= kmax:
            v[2 ** n - 1] = float(self.coef(n))
            n += 1
        return v

    def symbol_sum(self, theta: float) -> complex:
        s = 0.0
        for n in range(self._nmin(self.K0), self.nmax):
            w = float(self.coef(n))
            if w < 1e-300:
                break
            s += 2.0 * w * math.cos(2 * math.pi * (2 ** n) * theta)
        return s

    def to_json(self) -> dict:
        if self.json_form:
            c, p = self.json_form
            return {"kind": "dyadic_power", "c": c, "p": p, "K0": self.K0}
        # closed-form dyadic rules round-trip as c * k^-p only
        raise NotImplementedError("generic dyadic rules have no JSON form")


def dyadic_power_tail(c: float, p: float, K0: int) -> DyadicTail:
    """JSON-serialisable dyadic rule w(k) = c * k^-p at dyadic k > K0."""
    rho = min(max(2.0 ** (-p) if p > 0 else 0.99, 1e-6), 0.999)
    return DyadicTail(coef=lambda n: c * (2.0 ** n) ** (-p), K0=K0, rho=rho,
                      json_form=(float(c), float(p)))


@dataclass(frozen=True)
class WeightFamily:
    """One family w_ij: Z^d -> [0, inf): explicit map plus tail rules.

    Explicit keys must satisfy |k|_inf <= K0 of every tail rule, so the two
    domains never overlap.
    """

    d: int
    explicit: dict = field(default_factory=dict)
    tails: tuple = ()

    def __post_init__(self):
        norm = {normalize_key(k, self.d): float(v) for k, v in self.explicit.items()}
        object.__setattr__(self, "explicit", norm)
        for k in norm:
            for t in self.tails:
                if max(abs(x) for x in k) > t.K0:
                    raise ValueError("explicit entry %r overlaps tail domain (K0=%d)"
                                     % (k, t.K0))

    # -- point access ---------------------------------------------------

    def value(self, k) -> float:
        k = normalize_key(k, self.d)
        if k in self.explicit:
            return self.explicit[k]
        return sum(t.value(k) for t in self.tails)

    def is_zero(self) -> bool:
        return not any(v != 0.0 for v in self.explicit.values()) and not self.tails

    # -- certified sums ---------------------------------------------------

    def summable(self) -> bool:
        return all(t.summable() for t in self.tails)

    def total(self) -> tuple[float, float]:
        """(certified l1 sum, error bar).  Raises if a tail rule diverges."""
        if not self.summable():
            raise SummabilityViolation("tail rule is not summable")
        s = sum(self.explicit.values()) + sum(t.total() for t in self.tails)
        return s, 1e-14 * abs(s) + 1e-300

    def tail_bound(self, N: int) -> float:
        """Certified upper bound on the weight mass at |k|_inf > N."""
        b = sum(t.tail_sum_beyond(N) for t in self.tails)
        for k, v in self.explicit.items():
            if max(abs(x) for x in k) > N:
                b += v
        return b

    def abs_moment(self, power: float = 1.0) -> float:
        """Sum of |k|_2^power * w(k); may be inf."""
        s = sum((math.sqrt(sum(x * x for x in k)) ** power) * v
                for k, v in self.explicit.items())
        for t in self.tails:
            s += t.weighted_sum(power)
        return s

    # -- dense views (d = 1) ----------------------------------------------

    def values_1d(self, kmax: int) -> np.ndarray:
        """w(k) for k = 1..kmax (d = 1)."""
        if self.d != 1:
            raise ValueError("values_1d needs d = 1")
        v = np.zeros(kmax)
        for k, w in self.explicit.items():
            if 1 <= k[0] <= kmax:
                v[k[0] - 1] += w
        for t in self.tails:
            v += t.values_1d(kmax)
        return v

    def fold(self, N: int) -> np.ndarray:
        """Exact residue-class sums sum_{k = r mod N} w(k) as a complex grid array.

        For d = 1 the result has shape (N,); for general d, shape (N,)*d.
        Evaluating the Fourier series on the N-grid only needs these sums.
        """
        shape = (N,) * self.d
        acc = np.zeros(shape)
        for k, w in self.explicit.items():
            acc[tuple(x % N for x in k)] += w
        flat_ok = all(t.d == 1 for t in self.tails)
        if not flat_ok:
            raise NotImplementedError("tail folding needs d = 1 rules")
        if self.d == 1:
            for t in self.tails:
                t.fold_into(acc, N)
        elif self.tails:
            raise NotImplementedError("tail folding for d > 1 is not available")
        return acc

    def symbol_value(self, theta) -> complex:
        """a(theta) = sum_k w(k) e^{2 pi i theta . k}, tails summed in closed form."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        s = 0.0 + 0.0j
        for k, w in self.explicit.items():
            s += w * np.exp(2j * np.pi * float(np.dot(th, k)))
        for t in self.tails:
            if self.d != 1:
                raise NotImplementedError("tail symbol sums need d = 1")
            s += t.symbol_sum(float(th[0]))
        return complex(s)

    # -- structure ---------------------------------------------------------

    def support_generators(self) -> list[tuple]:
        """A finite generator set of the subgroup spanned by the support."""
        gens = [k for k, v in self.explicit.items() if v > 0]
        for t in self.tails:
            if isinstance(t, PowerTail) and t.c > 0:
                if t.d == 1:
                    k1 = _first_in_progression(t.K0, t.mod, t.residue)
                    gens += [(k1,), (k1 + t.mod,)]
                else:
                    for i in range(self.d):
                        e = [0] * self.d
                        e[i] = t.K0 + 1
                        gens.append(tuple(e))
                        e[i] = t.K0 + 2
                        gens.append(tuple(e))
            elif isinstance(t, DyadicTail):
                n = t._nmin(t.K0)
                gens += [(2 ** n,), (2 ** (n + 1),)]
        return gens

    def mirrored(self) -> "WeightFamily":
        """The family k -> w(-k)."""
        return WeightFamily(
            d=self.d,
            explicit={tuple(-x for x in k): v for k, v in self.explicit.items()},
            tails=self.tails,  # all tail rules are symmetric in |k| by construction
        )

    def same_weights(self, other: "WeightFamily", tol: float = 0.0) -> bool:
        keys = set(self.explicit) | set(other.explicit)
        for k in keys:
            if abs(self.explicit.get(k, 0.0) - other.explicit.get(k, 0.0)) > tol:
                return False
        return set(self.tails) == set(other.tails)

    def to_json(self) -> dict:
        entries = [[list(k), v] for k, v in sorted(self.explicit.items())]
        tails = [t.to_json() for t in self.tails]
        obj = {"entries": entries}
        if len(tails) == 0:
            obj["tail"] = {"kind": "none"}
        elif len(tails) == 1:
            obj["tail"] = tails[0]
        else:
            obj["tails"] = tails
        return obj


def tail_from_json(obj: dict, d: int):
    kind = obj.get("kind", "none")
    if kind == "none":
        return None
    if kind == "power":
        return PowerTail(c=float(obj["c"]), p=float(obj["p"]), K0=int(obj["K0"]),
                         mod=int(obj.get("mod", 1)), residue=int(obj.get("residue", 0)),
                         d=d)
    if kind == "dyadic_power":
        return dyadic_power_tail(float(obj["c"]), float(obj["p"]), int(obj["K0"]))
    raise ValueError("unknown tail kind %r" % kind)


def family_from_json(obj: dict, d: int) -> WeightFamily:
    explicit = {tuple(int(x) for x in k): float(v) for k, v in obj.get("entries", [])}
    tails = []
    if "tail" in obj:
        t = tail_from_json(obj["tail"], d)
        if t is not None:
            tails.append(t)
    for tobj in obj.get("tails", []):
        t = tail_from_json(tobj, d)
        if t is not None:
            tails.append(t)
    return WeightFamily(d=d, explicit=explicit, tails=tuple(tails))
