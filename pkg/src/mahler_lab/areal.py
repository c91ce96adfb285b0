"""Areal Mahler measure over the unit disk and its relation to the Bergman shift.

With ``dA`` the normalized area measure on the disk,

    ||p||_0 = exp( integral of log|p| dA ).

The circle mean of ``log|z - a|`` at radius ``r`` is ``log max(r, |a|)``;
integrating against ``2r dr`` gives ``log|a|`` for ``|a| >= 1`` and
``(|a|**2 - 1) / 2`` for ``|a| < 1``, which is the closed form used below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .classical import MeasureResult, mahler_roots
from .errors import ArgumentError
from .operators import VectorH, WeightedShiftSpec, apply_poly, krylov_distance
from .polynomials import as_complex, roots

DEFAULT_RADIAL = 16
DEFAULT_ANGULAR = 4096
PANEL_TOL = 1e-10
MAX_DEPTH = 14


@dataclass(frozen=True, eq=False)
class RadialWeight:
    """Radial density ``rho`` sampled as ``(r_k, rho(r_k**2))``; ``r=None`` is the constant 1."""

    r: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None
    normalization_declared: bool = False
    fn: Optional[Callable] = None

    def __post_init__(self):
        if (self.r is None) != (self.rho is None):
            raise ArgumentError("r and rho must be given together")
        if self.r is None:
            return
        r = np.asarray(self.r, dtype=float).reshape(-1)
        rho = np.asarray(self.rho, dtype=float).reshape(-1)
        if r.shape != rho.shape or r.size < 2:
            raise ArgumentError("need at least two matching r and rho samples")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] > 1:
            raise ArgumentError("r grid must be strictly increasing inside [0, 1]")
        if np.any(rho < 0):
            raise ArgumentError("rho must be non-negative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "rho", rho)
        if self.fn is None:
            # shape-preserving cubic keeps rho >= 0 and smooth enough for Gauss-Legendre panels
            object.__setattr__(self, "_interp", PchipInterpolator(r, rho, extrapolate=True))

    @classmethod
    def constant_one(cls) -> "RadialWeight":
        return cls(None, None, normalization_declared=True)

    @classmethod
    def from_function(cls, fn, samples: int = 2001, normalization_declared: bool = False):
        """Sample ``fn(t)`` at ``t = r**2`` on a uniform ``r`` grid; quadrature calls ``fn`` directly."""
        r = np.linspace(0.0, 1.0, samples)
        return cls(r, np.asarray(fn(r * r), dtype=float), normalization_declared, fn)

    @classmethod
    def from_json(cls, text: str) -> "RadialWeight":
        data = json.loads(text)
        try:
            return cls(data["r"], data["rho"], bool(data.get("normalized", False)))
        except KeyError as exc:
            raise ArgumentError(f"radial weight JSON lacks {exc}") from exc

    @property
    def is_constant_one(self) -> bool:
        return self.r is None

    def __call__(self, r: np.ndarray) -> np.ndarray:
        """``rho(r**2)`` at radii ``r``; tables are interpolated in ``r``."""
        r = np.asarray(r, dtype=float)
        if self.r is None:
            return np.ones_like(r)
        if self.fn is not None:
            return np.asarray(self.fn(r * r), dtype=float)
        return np.maximum(self._interp(r), 0.0)

    def mass(self) -> float:
        """``integral of rho(|z|^2) dA`` over the disk."""
        if self.r is None:
            return 1.0
        return _panel_integral(lambda r: 2 * r * self(r), np.unique(np.concatenate([[0.0], self.r, [1.0]])))


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _panel_integral(fn, breaks, order: int = 32) -> float:
    x, w = _gauss_legendre(order)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b > a:
            total += (b - a) * float(np.sum(w * fn(a + (b - a) * x)))
    return total


def angular_log_means(c: np.ndarray, r: np.ndarray, nodes: int) -> np.ndarray:
    """Midpoint-rule mean of ``log|p(r e^{i theta})|`` for each radius in ``r``.

    All radii are handled by one batched FFT.  Nodes where ``|p|`` is within
    ``1e-14`` of zero relative to the coefficient scale are moved half a
    spacing along the circle.
    """
    m = np.arange(len(c))
    b = c[None, :] * r[:, None] ** m[None, :] * np.exp(1j * np.pi * m / nodes)[None, :]
    if len(c) > nodes:
        pad = (-len(c)) % nodes
        b = np.pad(b, ((0, 0), (0, pad))).reshape(len(r), -1, nodes).sum(axis=1)
        B = b
    else:
        B = np.zeros((len(r), nodes), dtype=complex)
        B[:, : len(c)] = b
    vals = np.abs(np.fft.ifft(B, axis=1) * nodes)
    scale = np.sum(np.abs(c)[None, :] * r[:, None] ** m[None, :], axis=1)
    bad = vals <= 1e-14 * scale[:, None]
    if bad.any():
        rows, cols = np.nonzero(bad)
        z = r[rows] * np.exp(2j * np.pi * (cols + 1.0) / nodes)
        vals[rows, cols] = np.abs(np.polyval(c[::-1], z))
    with np.errstate(divide="ignore"):
        return np.mean(np.log(vals), axis=1)


def _adaptive_radial(c, weight: RadialWeight, order: int, nodes: int, tol=PANEL_TOL, max_depth=MAX_DEPTH):
    """Integral of ``2r rho(r^2) A(r)`` on [0, 1] with bisected Gauss-Legendre panels.

    A panel is accepted when its ``order``- and ``2*order``-point rules agree
    to ``tol`` times its width; the angular mean ``A`` has kinks at the root
    moduli, which the bisection isolates.
    """
    def panel(a, b, n):
        x, w = _gauss_legendre(n)
        r = a + (b - a) * x
        return (b - a) * float(np.sum(w * 2 * r * weight(r) * angular_log_means(c, r, nodes)))

    total = 0.0
    stack = [(0.0, 1.0, 0)]
    panels = 0
    while stack:
        a, b, depth = stack.pop()
        coarse = panel(a, b, order)
        fine = panel(a, b, 2 * order)
        if abs(fine - coarse) <= tol * max(b - a, 1e-3) or depth >= max_depth:
            total += fine
            panels += 1
        else:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
    return total, panels


def areal_mahler_closed(p) -> MeasureResult:
    """``exp(log|a_d| + sum_{|a|>=1} log|a| + sum_{|a|<1} (|a|^2 - 1)/2)``."""
    p = as_complex(p)
    if p.is_zero():
        raise ArgumentError("areal measure of the zero polynomial is undefined")
    log_val = math.log(abs(p.leading))
    err = 0.0
    if p.degree >= 1:
        rs = roots(p)
        a = np.abs(rs.array)
        log_val += float(np.sum(np.where(a >= 1, np.log(np.maximum(a, 1.0)), (a * a - 1) / 2)))
        # both branches have slope at most 1 in |a|
        err = mahler_roots(p).error_estimate
    value = math.exp(log_val)
    return MeasureResult(value, "closed-form", {"degree": p.degree}, float(err))


def _quadrature(p, weight, radial_nodes, angular_nodes, method):
    p = as_complex(p)
    if p.is_zero():
        raise ArgumentError("areal measure of the zero polynomial is undefined")
    if radial_nodes < 16 or angular_nodes < 16:
        raise ArgumentError("radial and angular node counts must be at least 16")
    c = p.array
    if p.degree == 0:
        value = math.exp(math.log(abs(c[0])) * weight.mass())
        return MeasureResult(value, method, {"radial_nodes": radial_nodes, "angular_nodes": angular_nodes}, 0.0)
    full, panels = _adaptive_radial(c, weight, radial_nodes, angular_nodes)
    half, _ = _adaptive_radial(c, weight, radial_nodes, angular_nodes // 2)
    value = math.exp(full)
    params = {"radial_nodes": radial_nodes, "angular_nodes": angular_nodes, "panels": panels}
    return MeasureResult(value, method, params, abs(value - math.exp(half)))


def areal_mahler_quadrature(p, radial_nodes: int = DEFAULT_RADIAL, angular_nodes: int = DEFAULT_ANGULAR) -> MeasureResult:
    """Independent polar-grid evaluation of ``||p||_0``; the error estimate halves the angular grid."""
    return _quadrature(p, RadialWeight.constant_one(), radial_nodes, angular_nodes, "quadrature-oracle")


def weighted_areal(
    p, rho: RadialWeight, radial_nodes: int = DEFAULT_RADIAL, angular_nodes: int = DEFAULT_ANGULAR
) -> MeasureResult:
    """``exp(integral of log|p(z)| rho(|z|^2) dA)``, taken exactly as written (no renormalization)."""
    res = _quadrature(p, rho, radial_nodes, angular_nodes, "quadrature-oracle")
    params = dict(res.params, mass=rho.mass(), normalization_declared=rho.normalization_declared)
    return MeasureResult(res.value, res.method, params, res.error_estimate)


def bergman_op_mahler(p, N: Optional[int] = None, K: int = 256) -> MeasureResult:
    """``M_B^1(p)`` on the Bergman shift truncated to ``N``; error is the drift over the last K/2 steps."""
    p = as_complex(p)
    if N is None:
        N = 2 * (K + p.degree)
    if N < 2 * (K + p.degree):
        raise ArgumentError(f"need N >= 2 (K + deg p) = {2 * (K + p.degree)}, got N = {N}")
    return _bergman(p, N, K)


def _bergman(p, N, K) -> MeasureResult:
    B = WeightedShiftSpec("bergman", N).materialize()
    e1 = VectorH.unit(N, 1)
    res = krylov_distance(B, apply_poly(B, p, e1), K)
    h = res.history
    used = len(h) - 1
    err = h[min(K // 2, used)] - h[used]
    params = {"N": N, "K": K, "subspace_dim": res.subspace_dim, "converged": res.converged}
    return MeasureResult(res.distance, "krylov-truncation", params, float(err))


@dataclass(frozen=True)
class ChainReport:
    poly: object
    areal: MeasureResult
    bergman_op: MeasureResult
    classical: MeasureResult
    chain_ok: bool
    slack: tuple

    def to_dict(self) -> dict:
        from .textformat import format_polynomial

        return {
            "poly": format_polynomial(self.poly),
            "areal": self.areal.to_dict(),
            "bergman_op": self.bergman_op.to_dict(),
            "classical": self.classical.to_dict(),
            "chain_ok": self.chain_ok,
            "slack": list(self.slack),
        }


def chain_check(p, N: Optional[int] = None, K: int = 256, tol: float = 1e-6) -> ChainReport:
    """Evaluate ``||p||_0 <= M_B^1(p) <= M(p)`` with absolute tolerance ``tol``."""
    p = as_complex(p)
    areal = areal_mahler_closed(p)
    berg = bergman_op_mahler(p, N, K)
    classical = mahler_roots(p)
    slack = (berg.value - areal.value, classical.value - berg.value)
    ok = slack[0] >= -tol and slack[1] >= -tol
    return ChainReport(p, areal, berg, classical, ok, slack)


def lehmer_polynomial_family(n: int):
    """``z^n + z + 1``."""
    from .polynomials import IntPolynomial

    return IntPolynomial((1, 1) + (0,) * (n - 2) + (1,))


@dataclass(frozen=True)
class LimitRow:
    n: int
    bergman: float
    areal: float
    bergman_error: float

    def __iter__(self):
        return iter((self.n, self.bergman, self.areal))


def lehmer_limit_table(n_min: int = 3, n_max: int = 200, N: int = 1024, K: int = 480) -> list:
    """Rows ``(n, M_B^1(z^n+z+1), ||z^n+z+1||_0)`` for ``n_min <= n <= n_max``.

    Needs ``n_max + 2 < K < N/2`` so every Krylov vector fits inside the
    truncation.  Each row also carries the truncation error estimate of its
    Bergman value.
    """
    if n_min < 3 or n_max < n_min:
        raise ArgumentError("need 3 <= n_min <= n_max")
    if not (n_max + 2 < K < N / 2):
        raise ArgumentError(f"truncation headroom violated: need n_max + 2 < K < N/2, got K={K}, N={N}")
    rows = []
    for n in range(n_min, n_max + 1):
        p = lehmer_polynomial_family(n)
        berg = _bergman(as_complex(p), N, K)
        areal = areal_mahler_closed(p)
        rows.append(LimitRow(n, berg.value, areal.value, berg.error_estimate))
    return rows


def settles_decreasing(values, slack=None) -> int:
    """Index from which ``values`` never increase by more than ``slack[i]``.

    Returns ``len(values) - 1`` when only the last entry qualifies.
    """
    values = np.asarray(values, dtype=float)
    slack = np.zeros_like(values) if slack is None else np.asarray(slack, dtype=float)
    start = len(values) - 1
    while start > 0 and values[start] <= values[start - 1] + max(slack[start], slack[start - 1]):
        start -= 1
    return start
