"""Classical Mahler measure, Lehmer's Omega and Pierce sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, RootOfUnityError
from .polynomials import EPS, IntPolynomial, as_complex, evaluate, roots

METHODS = ("root-product", "circle-quadrature", "krylov-truncation", "closed-form", "quadrature-oracle")

#: a root this close to the unit circle is reported as boundary-ambiguous
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class MeasureResult:
    """A measure value with the method that produced it and an error estimate."""

    value: float
    method: str
    params: dict = field(default_factory=dict)
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ArgumentError(f"unknown method tag {self.method!r}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "params": self.params,
            "error_estimate": self.error_estimate,
        }


def _root_errors(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """First-order forward error of each root from its backward error."""
    absz = np.abs(z)
    scale = np.polyval(np.abs(c[::-1]), absz)
    resid = np.abs(np.polyval(c[::-1], z))
    deriv = np.abs(np.polyval(np.polyder(c[::-1]), z))
    eta = np.maximum(resid / np.where(scale > 0, scale, 1.0), EPS)
    with np.errstate(divide="ignore", invalid="ignore"):
        forward = eta * scale / deriv
    # a vanishing derivative means a folded cluster: use the square-root law
    clustered = ~np.isfinite(forward) | (forward > np.sqrt(eta) * (1 + absz))
    forward = np.where(clustered, np.sqrt(eta) * (1 + absz), forward)
    return forward


def mahler_roots(p, tol: float = 1e-12) -> MeasureResult:
    """``|a_d| * prod max(1, |a_i|)`` over the computed zero set."""
    p = as_complex(p)
    if p.is_zero():
        raise ArgumentError("Mahler measure of the zero polynomial is undefined")
    lead = abs(p.leading)
    if p.degree == 0:
        return MeasureResult(lead, "root-product", {"degree": 0}, 0.0)
    rs = roots(p, tol=tol)
    z = rs.array
    absz = np.abs(z)
    value = lead * float(np.prod(np.maximum(1.0, absz)))
    dz = _root_errors(p.array, z)
    rel = float(np.sum(np.where(absz + dz > 1.0, dz / np.maximum(absz, 1.0), 0.0)))
    err = value * (rel + p.degree * EPS)
    params = {"degree": p.degree, "tol": tol, "residual_bound": rs.residual_bound}
    return MeasureResult(value, "root-product", params, float(err))


def _circle_values(c: np.ndarray, nodes: int) -> np.ndarray:
    """``p`` at the midpoints ``exp(2 pi i (j + 1/2) / nodes)`` via one FFT."""
    k = np.arange(len(c))
    b = np.zeros(nodes, dtype=complex)
    np.add.at(b, k % nodes, c * np.exp(1j * np.pi * k / nodes))
    return np.fft.ifft(b) * nodes


def _log_mean(c: np.ndarray, nodes: int):
    vals = np.abs(_circle_values(c, nodes))
    scale = float(np.sum(np.abs(c)))
    near = np.nonzero(vals <= 1e-14 * scale)[0]
    if near.size:
        # nudge offending nodes half a spacing along the circle
        theta = 2 * np.pi * (near + 1.0) / nodes
        vals[near] = np.abs(np.polyval(c[::-1], np.exp(1j * theta)))
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(vals))), int(near.size)


def mahler_integral(p, nodes: int = 2**20) -> MeasureResult:
    """Exponential of the midpoint-rule mean of ``log|p|`` on the unit circle.

    The error estimate compares against the same rule on half as many nodes.
    """
    p = as_complex(p)
    if p.is_zero():
        raise ArgumentError("Mahler measure of the zero polynomial is undefined")
    if nodes < 16:
        raise ArgumentError("mahler_integral needs at least 16 nodes")
    c = p.array
    full, moved = _log_mean(c, nodes)
    half, moved_half = _log_mean(c, nodes // 2)
    value = math.exp(full)
    err = abs(value - math.exp(half))
    params = {"nodes": nodes, "perturbed_nodes": moved}
    if moved_half:
        params["perturbed_nodes_half"] = moved_half
    return MeasureResult(value, "circle-quadrature", params, err)


def omega(p) -> MeasureResult:
    """Product of the moduli of the roots strictly outside the unit circle."""
    p = as_complex(p)
    if p.is_zero() or p.degree < 1:
        raise ArgumentError("omega needs a polynomial of degree >= 1")
    rs = roots(p)
    absz = np.abs(rs.array)
    outside = absz > 1.0 + BOUNDARY_TOL
    ambiguous = int(np.count_nonzero(np.abs(absz - 1.0) <= BOUNDARY_TOL))
    value = float(np.prod(absz[outside]))
    dz = _root_errors(p.array, rs.array)
    err = value * float(np.sum(dz[outside] / absz[outside]))
    params = {"outside": int(outside.sum()), "boundary_ambiguous": ambiguous}
    return MeasureResult(value, "root-product", params, float(err))


# ---------------------------------------------------------------------------
# Pierce sequences


@dataclass(frozen=True)
class PierceSequence:
    """``values[n-1] = prod (a_i**n - 1)`` for ``n = 1..n_max``.

    ``ratios[k]`` is ``|values[k+1] / values[k]|`` or ``None`` when
    ``values[k]`` is zero.
    """

    poly: IntPolynomial
    values: tuple
    ratios: tuple

    @property
    def n_max(self) -> int:
        return len(self.values)


def pierce(p: IntPolynomial, n_max: int) -> PierceSequence:
    """Exact Pierce sequence of a monic integer polynomial.

    Each term is the resultant of ``p`` and ``z**n - 1``; the second argument
    is first reduced modulo ``p`` which leaves the resultant unchanged for
    monic ``p`` and keeps the Sylvester matrix small.
    """
    from .polynomials import resultant

    if not isinstance(p, IntPolynomial):
        raise ArgumentError("pierce needs an IntPolynomial")
    if p.degree < 1 or not p.is_monic():
        raise ArgumentError("pierce needs a monic polynomial of degree >= 1")
    if n_max < 1:
        raise ArgumentError("n_max must be positive")
    values = []
    zpow = IntPolynomial((1,))
    z = IntPolynomial((0, 1))
    for _ in range(n_max):
        zpow = (zpow * z) % p
        rem = zpow - 1
        values.append(0 if rem.is_zero() else resultant(p, rem))
    ratios = tuple(
        None if values[k] == 0 else abs(values[k + 1]) / abs(values[k]) for k in range(n_max - 1)
    )
    return PierceSequence(p, tuple(values), ratios)


def pierce_growth_check(seq: PierceSequence) -> float:
    """Last ratio of the sequence, to be compared with ``omega`` of its polynomial.

    Raises :class:`RootOfUnityError` on any zero term and
    :class:`ArgumentError` when a root lies within ``BOUNDARY_TOL`` of the
    unit circle or the sequence is shorter than 20 terms.
    """
    if any(v == 0 for v in seq.values):
        n = next(k + 1 for k, v in enumerate(seq.values) if v == 0)
        raise RootOfUnityError(f"root of unity present: term {n} is zero")
    if seq.n_max < 20:
        raise ArgumentError("growth check needs at least 20 terms")
    absz = np.abs(roots(seq.poly).array)
    close = np.abs(absz - 1.0) <= BOUNDARY_TOL
    if close.any():
        raise ArgumentError(
            f"{int(close.sum())} root(s) within {BOUNDARY_TOL:g} of the unit circle; ratios need not converge"
        )
    return float(seq.ratios[-1])


def float_pierce(p, n: int) -> complex:
    """Floating product ``prod (a_i**n - 1)`` over the computed roots."""
    z = roots(p).array
    return complex(np.prod(z**n - 1.0))
