"""Random instance generators shared by the verification suites and the tests."""

from __future__ import annotations

import numpy as np

from .operators import FiniteOperator
from .polynomials import ComplexPolynomial


def complex_normal(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_roots(rng, count, rmax=3.0, margin=0.0):
    """Roots uniform by area in ``|z| <= rmax``, none within ``margin`` of the unit circle."""
    out = []
    while len(out) < count:
        z = rmax * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if abs(abs(z) - 1.0) >= margin:
            out.append(z)
    return np.array(out, dtype=complex)


def random_poly(rng, max_degree, rmax=3.0, margin=0.0, min_degree=1, monic=False):
    d = int(rng.integers(min_degree, max_degree + 1))
    lead = 1.0 if monic else complex(*(rng.standard_normal(2))) or 1.0
    return ComplexPolynomial.from_roots(random_roots(rng, d, rmax, margin), lead)


def random_unitary(rng, n):
    q, r = np.linalg.qr(complex_normal(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def matrix_with_rank(rng, n, rank):
    """Random ``n x n`` matrix of the given rank, scaled to spectral norm 1."""
    if rank == 0:
        return np.zeros((n, n), dtype=complex)
    a = complex_normal(rng, n, rank) @ complex_normal(rng, rank, n)
    return a / np.linalg.norm(a, 2)


CONTRACTION_KINDS = ("singular", "invertible", "shift", "nilpotent")


def random_contraction(rng, n, kind):
    """A matrix of norm at most one of the requested kind."""
    scale = rng.uniform(0.5, 1.0)
    if kind == "singular":
        a = matrix_with_rank(rng, n, int(rng.integers(0, n)))
    elif kind == "invertible":
        a = matrix_with_rank(rng, n, n)
    elif kind == "shift":
        w = rng.uniform(0.1, 1.0, n - 1) * np.exp(2j * np.pi * rng.random(n - 1))
        return FiniteOperator.from_shift_weights(w * scale)
    elif kind == "nilpotent":
        a = np.triu(complex_normal(rng, n, n), 1)
        nrm = np.linalg.norm(a, 2)
        a = a / nrm if nrm > 0 else a
    else:
        raise ValueError(kind)
    return FiniteOperator(a * scale)


def contraction_family(rng, count, max_dim):
    """``count`` contractions cycling through :data:`CONTRACTION_KINDS`."""
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_dim + 1))
        out.append(random_contraction(rng, n, CONTRACTION_KINDS[i % len(CONTRACTION_KINDS)]))
    return out
