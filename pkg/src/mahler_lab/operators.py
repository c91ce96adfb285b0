"""Finite matrices standing in for bounded operators, and their Mahler measures.

``M_T^e(p)`` is the distance from ``p(T)e`` to the closed span of
``T p(T) e, T^2 p(T) e, ...``; at finite truncation the span is cut at ``K``
powers.  ``M_T(p)`` is the supremum over unit vectors ``e``, estimated here
from below by restarted ascent on the sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .classical import MeasureResult
from .errors import ArgumentError, IllConditionedError
from .polynomials import as_complex

#: rank decisions: sigma_min / sigma_max below this means a nontrivial kernel
RANK_THRESHOLD = 1e-9
#: ratios inside this band are too close to the threshold to decide
AMBIGUOUS_BAND = (1e-11, 1e-7)
UNIT_TOL = 1e-12
WITNESS_TOL = 1e-9

DEFAULT_RESTARTS = 32
DEFAULT_STEP = 1e-2
DEFAULT_MAX_STEPS = 200
MIN_STEP = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class VectorH:
    """A vector of the finite Hilbert space."""

    components: np.ndarray

    def __post_init__(self):
        c = np.array(self.components, dtype=complex).reshape(-1)
        object.__setattr__(self, "components", _readonly(c))

    @classmethod
    def unit(cls, dim: int, k: int) -> "VectorH":
        """Standard basis vector ``e_k`` (1-based)."""
        if not 1 <= k <= dim:
            raise ArgumentError(f"basis index {k} outside 1..{dim}")
        c = np.zeros(dim, dtype=complex)
        c[k - 1] = 1.0
        return cls(c)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __mul__(self, c: complex) -> "VectorH":
        return VectorH(self.components * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FiniteOperator:
    """Dense square complex matrix; weighted shifts also keep their weights for fast products."""

    entries: np.ndarray
    shift_weights: Optional[np.ndarray] = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ArgumentError(f"operator must be a square matrix, got shape {a.shape}")
        object.__setattr__(self, "entries", _readonly(a))
        if self.shift_weights is not None:
            w = np.array(self.shift_weights, dtype=complex).reshape(-1)
            if w.shape[0] != max(a.shape[0] - 1, 0):
                raise ArgumentError("shift weights must number dim - 1")
            object.__setattr__(self, "shift_weights", _readonly(w))

    @classmethod
    def from_shift_weights(cls, weights) -> "FiniteOperator":
        w = np.asarray(weights, dtype=complex)
        n = w.shape[0] + 1
        a = np.zeros((n, n), dtype=complex)
        a[np.arange(1, n), np.arange(n - 1)] = w
        return cls(a, w)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    @cached_property
    def norm_bound(self) -> float:
        """Spectral norm: the largest weight for shifts, else the top singular value."""
        if self.shift_weights is not None:
            return float(np.max(np.abs(self.shift_weights), initial=0.0))
        return float(self.singular_values[0]) if self.dim else 0.0

    @cached_property
    def adjoint_entries(self) -> np.ndarray:
        return _readonly(self.entries.conj().T)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.shift_weights is not None:
            out = np.zeros_like(v, dtype=complex)
            out[1:] = self.shift_weights * v[:-1]
            return out
        return self.entries @ v

    def scaled(self, c: complex) -> "FiniteOperator":
        if self.shift_weights is not None:
            return FiniteOperator(self.entries * c, self.shift_weights * c)
        return FiniteOperator(self.entries * c)

    def _kernel_args(self):
        if self.shift_weights is not None:
            dummy = np.zeros((1, 1), dtype=complex)
            return dummy, dummy, np.ascontiguousarray(self.shift_weights), True
        return self.entries, self.adjoint_entries, np.zeros(1, dtype=complex), False


@dataclass(frozen=True)
class WeightedShiftSpec:
    """Rule for the weights ``a_1, a_2, ...`` of ``T e_n = a_n e_{n+1}`` plus a truncation."""

    rule: str
    truncation: int
    constant: complex = 1.0
    explicit: tuple = ()

    def __post_init__(self):
        if self.rule not in ("hardy", "bergman", "const", "explicit"):
            raise ArgumentError(f"unknown weight rule {self.rule!r}")
        if self.truncation < 1:
            raise ArgumentError("truncation must be positive")
        if self.rule == "const" and self.constant == 0:
            raise ArgumentError("weights must be nonzero")
        if self.rule == "explicit":
            if len(self.explicit) < self.truncation - 1:
                raise ArgumentError(
                    f"explicit rule gives {len(self.explicit)} weights, truncation needs {self.truncation - 1}"
                )
            if any(w == 0 for w in self.explicit):
                raise ArgumentError("weights must be nonzero")

    @classmethod
    def parse(cls, text: str, truncation: int) -> "WeightedShiftSpec":
        """``hardy``, ``bergman`` or ``const:c``."""
        if text in ("hardy", "bergman"):
            return cls(text, truncation)
        if text.startswith("const:"):
            try:
                c = complex(text[6:].replace("i", "j"))
            except ValueError as exc:
                raise ArgumentError(f"bad constant weight {text[6:]!r}") from exc
            return cls("const", truncation, constant=c)
        raise ArgumentError(f"unknown shift rule {text!r}")

    def weights(self, count: Optional[int] = None) -> np.ndarray:
        """``a_1..a_count`` (default ``truncation - 1``)."""
        if count is None:
            count = self.truncation - 1
        n = np.arange(1, count + 1, dtype=float)
        if self.rule == "hardy":
            return np.ones(count, dtype=complex)
        if self.rule == "bergman":
            return np.sqrt(n / (n + 1)).astype(complex)
        if self.rule == "const":
            return np.full(count, self.constant, dtype=complex)
        if count > len(self.explicit):
            raise ArgumentError("not enough explicit weights")
        return np.array(self.explicit[:count], dtype=complex)

    def weight_product(self, n: int) -> float:
        """``prod_{i<=n} |a_i|`` straight from the rule."""
        if self.rule == "hardy":
            return 1.0
        if self.rule == "bergman":
            return 1.0 / math.sqrt(n + 1)
        if self.rule == "const":
            return abs(self.constant) ** n
        return float(np.prod(np.abs(self.weights(n))))

    def materialize(self) -> FiniteOperator:
        return FiniteOperator.from_shift_weights(self.weights())


@dataclass(frozen=True)
class KrylovDistanceResult:
    distance: float
    subspace_dim: int
    history: tuple
    converged: bool


def _check_vector(T: FiniteOperator, v) -> np.ndarray:
    comps = v.components if isinstance(v, VectorH) else np.asarray(v, dtype=complex)
    if comps.shape != (T.dim,):
        raise ArgumentError(f"vector of length {comps.shape[0]} does not match operator dim {T.dim}")
    return np.ascontiguousarray(comps, dtype=complex)


def apply_poly(T: FiniteOperator, p, v) -> VectorH:
    """``p(T) v`` by Horner's rule using only matrix-vector products."""
    comps = _check_vector(T, v)
    c = np.ascontiguousarray(as_complex(p).array)
    dense, _, weights, shift = T._kernel_args()
    return VectorH(_kernels.horner(dense, weights, shift, c, comps.copy()))


def krylov_distance(T: FiniteOperator, v, K: int, tol: float = 1e-10) -> KrylovDistanceResult:
    """Distance from ``v`` to span{Tv, ..., T^K v}.

    ``converged`` is set when the basis broke down (the span is invariant)
    or the last ``ceil(K/8)`` steps shrank the distance by less than ``tol``
    relative to ``|v|``.
    """
    if K < 1:
        raise ArgumentError("K must be at least 1")
    comps = _check_vector(T, v)
    dense, _, weights, shift = T._kernel_args()
    hist, *_rest = _kernels.arnoldi(dense, weights, shift, comps, K, T.norm_bound)
    used = _rest[-2]
    # rounding can lift a residual by an ulp; the exact sequence is non-increasing
    hist = np.minimum.accumulate(hist)
    window = math.ceil(K / 8)
    if hist[0] == 0.0 or used < K:
        converged = True
    elif used >= window:
        converged = bool(hist[used - window] - hist[used] < tol * hist[0])
    else:
        converged = False
    return KrylovDistanceResult(float(hist[-1]), int(used), tuple(float(h) for h in hist), converged)


def _unit_components(T: FiniteOperator, e) -> np.ndarray:
    comps = _check_vector(T, e)
    nrm = float(np.linalg.norm(comps))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ArgumentError(f"e must be a unit vector, |e| = {nrm!r}")
    return comps


def op_mahler_on_vector(T: FiniteOperator, e, p, K: int, tol: float = 1e-10) -> MeasureResult:
    """``M_T^e(p)`` at Krylov truncation ``K``; the error estimate is the last decrement."""
    _unit_components(T, e)
    res = krylov_distance(T, apply_poly(T, p, e), K, tol)
    h = res.history
    err = h[-2] - h[-1] if len(h) > 1 else 0.0
    params = {"dim": T.dim, "K": K, "subspace_dim": res.subspace_dim, "converged": res.converged}
    return MeasureResult(res.distance, "krylov-truncation", params, float(err))


def _start_vectors(T: FiniteOperator, restarts: int, seed: int) -> list:
    n = T.dim
    starts = [VectorH.unit(n, 1).components]
    if T.shift_weights is None and n > 1:
        u, _, vh = np.linalg.svd(T.entries)
        # near-kernel and near-co-range directions are where E(T) = 1 lives
        starts.append(vh[-1].conj())
        starts.append(u[:, -1])
    else:
        starts.append(VectorH.unit(n, n).components)
    rng = np.random.default_rng(seed)
    while len(starts) < restarts:
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return [np.ascontiguousarray(s / np.linalg.norm(s)) for s in starts[:restarts]]


def _central_ascent(T, coeffs, e0, K, step0, max_steps, h=1e-6):
    """Same ascent with a central-difference gradient over the 2n real directions."""
    dense, _, weights, shift = T._kernel_args()
    tn = T.norm_bound

    def f(e):
        return _kernels.value(dense, weights, shift, coeffs, e, K, tn)

    def grad(e):
        g = np.zeros(e.shape[0], dtype=complex)
        for i in range(e.shape[0]):
            for unit in (1.0, 1j):
                d = np.zeros_like(e)
                d[i] = unit * h
                up = f((e + d) / np.linalg.norm(e + d))
                dn = f((e - d) / np.linalg.norm(e - d))
                g[i] += unit * (up - dn) / (2 * h)
        return g

    e = e0 / np.linalg.norm(e0)
    val = f(e)
    step = step0
    steps = 0
    for steps in range(max_steps):
        if step < MIN_STEP:
            break
        g = grad(e)
        g = g - np.real(np.vdot(e, g)) * e
        gn = np.linalg.norm(g)
        if gn <= 1e-300:
            break
        trial = e + step * g / gn
        trial = trial / np.linalg.norm(trial)
        ft = f(trial)
        if ft > val * (1 + 1e-12) + 1e-15:
            e, val = trial, ft
        else:
            step *= 0.5
    return val, e, steps


def op_mahler_sup(
    T: FiniteOperator,
    p,
    restarts: int = DEFAULT_RESTARTS,
    K: Optional[int] = None,
    seed: int = 0,
    gradient: str = "analytic",
    max_steps: int = DEFAULT_MAX_STEPS,
) -> MeasureResult:
    """Lower bound for ``M_T(p)`` from restarted projected ascent on the unit sphere.

    Starts are ``e_1``, then (dense operators) the right and left singular
    vectors of the smallest singular value, then complex Gaussian vectors
    drawn from ``seed``.  Restarts are independent and reduced by maximum,
    ties going to the earliest start.  ``gradient="analytic"`` differentiates
    the least-squares residual directly; ``"central"`` uses finite
    differences.  The error estimate is the spread of the best three results.
    """
    if restarts < 1:
        raise ArgumentError("restarts must be at least 1")
    if gradient not in ("analytic", "central"):
        raise ArgumentError(f"unknown gradient mode {gradient!r}")
    n = T.dim
    if K is None:
        K = min(n, 256)
    coeffs = np.ascontiguousarray(as_complex(p).array)
    dense, dense_h, weights, shift = T._kernel_args()
    results = []
    for start in _start_vectors(T, restarts, seed):
        if gradient == "analytic":
            val, _, steps = _kernels.ascend(
                dense, dense_h, weights, shift, coeffs, start, K, T.norm_bound,
                DEFAULT_STEP, max_steps, MIN_STEP,
            )
        else:
            val, _, steps = _central_ascent(T, coeffs, start, K, DEFAULT_STEP, max_steps)
        results.append(float(val))
    best = int(np.argmax(results))
    top = sorted(results, reverse=True)[:3]
    spread = top[0] - top[-1]
    params = {"dim": n, "K": K, "restarts": restarts, "seed": seed, "gradient": gradient, "best_restart": best}
    return MeasureResult(results[best], "krylov-truncation", params, float(spread))


def e_quantity(T: FiniteOperator) -> int:
    """``M_T(1)`` for a finite matrix: 1 with a nontrivial kernel, else 0.

    Raises :class:`IllConditionedError` when ``sigma_min / sigma_max`` falls
    inside ``AMBIGUOUS_BAND`` around ``RANK_THRESHOLD``.
    """
    if T.dim == 0:
        return 0
    s = T.singular_values
    if s[0] == 0.0:
        return 1
    ratio = float(s[-1] / s[0])
    lo, hi = AMBIGUOUS_BAND
    if lo <= ratio <= hi:
        raise IllConditionedError(
            f"sigma_min / sigma_max = {ratio:.3e} is too close to the rank threshold {RANK_THRESHOLD:g}",
            gap=ratio,
        )
    return 1 if ratio < RANK_THRESHOLD else 0


def is_subharmonic_finite(T: FiniteOperator) -> bool:
    return e_quantity(T) == 1


def subharmonic_witness_check(T: FiniteOperator, e, K: int) -> bool:
    """Whether ``e`` is orthogonal to ``T^k e`` for ``k = 1..K`` (zero powers skipped)."""
    comps = _unit_components(T, e)
    x = comps.copy()
    worst = 0.0
    for _ in range(K):
        x = T.matvec(x)
        nx = np.linalg.norm(x)
        if nx <= _kernels.BREAKDOWN * max(T.norm_bound, 1.0):
            break
        x = x / nx
        worst = max(worst, abs(np.vdot(comps, x)))
    return worst <= WITNESS_TOL


def shift_monomial_measure(spec: WeightedShiftSpec, n: int) -> float:
    """``M_T^{e_1}(z^n) = prod_{i<=n} |a_i|`` for the shift described by ``spec``."""
    if n < 0:
        raise ArgumentError("n must be non-negative")
    if n + 1 >= spec.truncation:
        raise ArgumentError(f"truncation {spec.truncation} too small for z^{n}")
    return spec.weight_product(n)


def operator_norm_of_poly(T: FiniteOperator, p) -> float:
    """Spectral norm of the matrix ``p(T)``."""
    c = as_complex(p).array
    acc = np.zeros_like(T.entries)
    eye = np.eye(T.dim, dtype=complex)
    for a in c[::-1]:
        acc = T.entries @ acc + a * eye
    return float(np.linalg.norm(acc, 2))
