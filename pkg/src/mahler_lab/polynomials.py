"""Univariate polynomials over the integers and over the complex numbers.

Coefficients are always stored in ascending order: ``coeffs[k]`` is the
coefficient of ``z**k``.  Integer polynomials use Python ints and are exact;
complex polynomials use double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import ArgumentError, InconclusiveError, RootFindingError

EPS = np.finfo(float).eps

#: pairwise distance below which computed roots are folded into one repeated root
CLUSTER_RADIUS = 1e-7
#: cap on the lcm of estimated root orders in :func:`is_cyclotomic`
ORDER_CAP = 10**6


def _strip(seq):
    seq = list(seq)
    while len(seq) > 1 and seq[-1] == 0:
        seq.pop()
    return tuple(seq) if seq else (0,)


@dataclass(frozen=True)
class IntPolynomial:
    """Exact polynomial with arbitrary-precision integer coefficients."""

    coeffs: tuple

    def __post_init__(self):
        out = []
        for c in self.coeffs:
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise ArgumentError(f"integer coefficient expected, got {c!r}")
            out.append(int(c))
        object.__setattr__(self, "coeffs", _strip(out))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = _as_int_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_int_poly(other))

    def __rsub__(self, other):
        return _as_int_poly(other) - self

    def __mul__(self, other):
        other = _as_int_poly(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = IntPolynomial((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, divisor: "IntPolynomial"):
        """Exact long division by a divisor whose leading coefficient is a unit.

        Raises :class:`ArgumentError` when the divisor is zero or its leading
        coefficient is not +1 or -1 (the quotient would leave the integers).
        """
        if divisor.is_zero():
            raise ArgumentError("division by the zero polynomial")
        lead = divisor.leading
        if lead not in (1, -1):
            raise ArgumentError("divisor must have leading coefficient +1 or -1")
        rem = list(self.coeffs)
        dd = divisor.degree
        if self.degree < dd or self.is_zero():
            return IntPolynomial((0,)), self
        quot = [0] * (self.degree - dd + 1)
        for k in range(self.degree - dd, -1, -1):
            q = rem[k + dd] * lead
            quot[k] = q
            if q:
                for j, b in enumerate(divisor.coeffs):
                    rem[k + j] -= q * b
        return IntPolynomial(tuple(quot)), IntPolynomial(tuple(rem[:dd] or [0]))

    def __mod__(self, divisor):
        return self.divmod(divisor)[1]

    def reversed(self) -> "IntPolynomial":
        """Return ``z**degree * p(1/z)``."""
        return IntPolynomial(self.coeffs[::-1])

    def to_complex(self) -> "ComplexPolynomial":
        return ComplexPolynomial(tuple(complex(c) for c in self.coeffs))

    def __str__(self):
        from .textformat import format_polynomial

        return format_polynomial(self)


def _as_int_poly(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial((x,))
    raise TypeError(f"cannot combine IntPolynomial with {type(x).__name__}")


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with double-precision complex coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(complex(c) for c in self.coeffs))

    @classmethod
    def from_array(cls, arr) -> "ComplexPolynomial":
        return cls(tuple(np.asarray(arr, dtype=complex).tolist()))

    @classmethod
    def from_roots(cls, roots, leading: complex = 1.0) -> "ComplexPolynomial":
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return cls.from_array(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def is_zero(self) -> bool:
        return self.coeffs == (0j,)

    def __call__(self, z):
        return evaluate(self, z)

    def __mul__(self, other):
        other = as_complex(other)
        return ComplexPolynomial.from_array(np.convolve(self.array, other.array))

    def __str__(self):
        from .textformat import format_polynomial

        return format_polynomial(self)


PolyLike = Union[IntPolynomial, ComplexPolynomial, Sequence]


def as_complex(p) -> ComplexPolynomial:
    """Coerce an IntPolynomial or an ascending coefficient sequence."""
    if isinstance(p, ComplexPolynomial):
        return p
    if isinstance(p, IntPolynomial):
        return p.to_complex()
    return ComplexPolynomial(tuple(p))


def evaluate(p, z):
    """Horner evaluation; ``z`` may be a scalar or an ndarray."""
    p = as_complex(p)
    if np.ndim(z) == 0:
        acc = 0j
        for c in reversed(p.coeffs):
            acc = acc * z + c
        return acc
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def compose_scale(p, c: complex) -> ComplexPolynomial:
    """Return ``p(c*z)``."""
    a = as_complex(p).array
    return ComplexPolynomial.from_array(a * np.power(complex(c), np.arange(len(a))))


# ---------------------------------------------------------------------------
# root finding


@dataclass(frozen=True)
class RootSet:
    """All zeros of a polynomial, repeated according to multiplicity.

    ``residual_bound`` is the largest normwise backward error
    ``|p(a)| / sum_k |c_k| |a|**k`` over the returned roots.
    """

    roots: tuple
    residual_bound: float
    leading: complex
    iterations: int = 0

    def __len__(self):
        return len(self.roots)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


def _horner(c, z):
    acc = np.full_like(z, c[-1])
    for a in c[-2::-1]:
        acc = acc * z + a
    return acc


def backward_errors(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Normwise backward error of each approximate root in ``z``."""
    z = np.asarray(z, dtype=complex)
    if z.size == 0:
        return np.zeros(0)
    num = np.abs(_horner(c, z))
    den = _horner(np.abs(c).astype(complex), np.abs(z).astype(complex)).real
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, num / den, 0.0)
    return out


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    m = len(c) - 1
    a = np.abs(c)
    upper = 1.0 + np.max(a[:-1]) / a[-1]
    lower = a[0] / (a[0] + np.max(a[1:]))
    radius = min(max((a[0] / a[-1]) ** (1.0 / m), lower), upper)
    center = -c[-2] / (m * c[-1])
    angles = 2 * np.pi * np.arange(m) / m + 0.4
    return center + radius * np.exp(1j * angles)


def _aberth(c: np.ndarray, tol: float, max_iter: int):
    m = len(c) - 1
    dc = c[1:] * np.arange(1, m + 1)
    z = _initial_guesses(c)
    eye = np.eye(m, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        pv = _horner(c, z)
        dv = _horner(dc, z)
        be = backward_errors(c, z)
        done = be <= 2 * EPS
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            diff[eye] = 1.0
            inv = 1.0 / diff
            inv[eye] = 0.0
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        bad = ~np.isfinite(w)
        if bad.any():
            # derivative vanished: nudge the iterate off the critical point
            w[bad] = -1e-3 * (1 + np.abs(z[bad])) * np.exp(1j * (it + 0.7))
        w[done] = 0.0
        z = z - w
        if np.all(done | (np.abs(w) <= 4 * EPS * np.abs(z))):
            break
    return z, it


def _fold_clusters(z: np.ndarray, radius: float) -> np.ndarray:
    n = len(z)
    if n < 2:
        return z
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(z[:, None] - z[None, :]) < radius
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = z.copy()
    for members in groups.values():
        if len(members) > 1:
            out[members] = z[members].mean()
    return out


def _root_key(a: complex):
    arg = math.atan2(a.imag, a.real)
    if arg <= -math.pi + 1e-12:
        arg = math.pi
    return (round(abs(a), 12), round(arg, 12))


def _sort_roots(z):
    return sorted((complex(a) for a in z), key=_root_key)


def roots(p, tol: float = 1e-12, max_iter: int = 500) -> RootSet:
    """All complex zeros of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Exact zero roots are split off first; the remaining roots start on a
    circle whose radius is the geometric mean of the root moduli clamped to
    the Cauchy bounds.  Roots closer than ``CLUSTER_RADIUS`` are folded to
    their centroid and reported as a repeated root.

    Raises :class:`RootFindingError` if the backward error stays above ``tol``.
    """
    p = as_complex(p)
    if p.is_zero() or p.degree < 1:
        raise ArgumentError("root finding needs a nonzero polynomial of degree >= 1")
    c = p.array
    nz = int(np.argmax(c != 0))
    core = c[nz:]
    m = len(core) - 1
    iterations = 0
    if m == 0:
        found = np.zeros(0, dtype=complex)
    elif m == 1:
        found = np.array([-core[0] / core[1]])
    else:
        found, iterations = _aberth(core, tol, max_iter)
    z = np.concatenate([np.zeros(nz, dtype=complex), found])
    z = _fold_clusters(z, CLUSTER_RADIUS)
    be = backward_errors(c, z)
    worst = float(be.max()) if be.size else 0.0
    if not np.all(np.isfinite(z)) or worst > tol:
        raise RootFindingError(
            f"Aberth iteration stalled at backward error {worst:.3e} > {tol:.1e}",
            best=z,
            residual=worst,
            iterations=iterations,
        )
    return RootSet(tuple(_sort_roots(z)), worst, p.leading, iterations)


# ---------------------------------------------------------------------------
# exact integer machinery


def sylvester_matrix(p: IntPolynomial, q: IntPolynomial) -> list:
    """Sylvester matrix with rows in descending powers, ``deg q`` rows of ``p`` first."""
    m, n = p.degree, q.degree
    size = m + n
    pd, qd = p.coeffs[::-1], q.coeffs[::-1]
    rows = []
    for i in range(n):
        rows.append([0] * i + list(pd) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(qd) + [0] * (size - n - 1 - i))
    return rows


def bareiss_determinant(matrix) -> int:
    """Fraction-free Gaussian elimination; every intermediate stays integral."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def resultant(p: IntPolynomial, q: IntPolynomial) -> int:
    """Exact resultant ``lc(p)**deg(q) * prod q(a_i)`` over the roots of ``p``."""
    if p.is_zero() or q.is_zero():
        raise ArgumentError("resultant of the zero polynomial is undefined")
    return bareiss_determinant(sylvester_matrix(p, q))


def _powmod_z(n: int, p: IntPolynomial) -> IntPolynomial:
    """``z**n mod p`` for ``p`` with unit leading coefficient."""
    result = IntPolynomial((1,)) % p
    base = IntPolynomial((0, 1)) % p
    while n:
        if n & 1:
            result = (result * base) % p
        base = (base * base) % p
        n >>= 1
    return result


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of ``z**n - 1``."""
    if n < 1:
        raise ArgumentError("cyclotomic index must be positive")
    num = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
    for d in range(1, n):
        if n % d == 0:
            num, rem = num.divmod(cyclotomic(d))
            assert rem.is_zero()
    return num


def totient(m: int) -> int:
    result, n, q = m, m, 2
    while q * q <= n:
        if n % q == 0:
            while n % q == 0:
                n //= q
            result -= result // q
        q += 1
    if n > 1:
        result -= result // n
    return result


def _estimate_order(root: complex, degree: int, tol: float):
    """Smallest admissible order ``m`` whose ``m``-th roots of unity match ``root``.

    A primitive ``m``-th root of unity has degree ``totient(m)`` over the
    rationals, so only ``m`` with ``totient(m) <= degree`` (hence
    ``m <= 2 degree**2``) can occur.
    """
    t = (math.atan2(root.imag, root.real) / (2 * math.pi)) % 1.0
    for m in range(1, 2 * degree * degree + 3):
        if totient(m) <= degree and abs(t * m - round(t * m)) <= m * tol:
            return m
    return None


def is_cyclotomic(p: IntPolynomial, screen_tol: float = 1e-4, order_tol: float = 2e-5) -> bool:
    """Decide whether every root of the monic integer polynomial ``p`` is a root of unity.

    A numeric screen (monic, all roots near the unit circle) is followed by
    an exact confirmation: each root's order is read off its argument, and
    with ``N`` the lcm of those orders the test checks ``(z**N - 1)**deg``
    is divisible by ``p`` over the integers.  Raises
    :class:`InconclusiveError` when ``N`` exceeds ``ORDER_CAP``.
    """
    if p.is_zero():
        raise ArgumentError("is_cyclotomic needs a nonzero polynomial")
    if not p.is_monic() or p.degree < 1 or p.coeffs[0] == 0:
        return False
    rs = roots(p)
    if np.any(np.abs(np.abs(rs.array) - 1.0) > screen_tol):
        return False
    n = 1
    for r in rs.roots:
        m = _estimate_order(r, p.degree, order_tol)
        if m is None:
            return False
        n = math.lcm(n, m)
        if n > ORDER_CAP:
            raise InconclusiveError(f"root order lcm exceeds cap {ORDER_CAP}")
    r = _powmod_z(n, p) - 1
    acc = r
    for _ in range(p.degree - 1):
        if acc.is_zero():
            break
        acc = (acc * r) % p
    return acc.is_zero()

