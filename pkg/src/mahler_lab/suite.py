"""Verification suites: one deterministic numerical check per registered claim.

Every check draws its randomness from ``SeedSequence([seed, crc32(claim_id)])``
so the outcome of a claim does not depend on which other claims run or on
how many workers run them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import areal as ar
from . import classical as cl
from . import operators as op
from .errors import ArgumentError, InconclusiveError
from .polynomials import ComplexPolynomial, IntPolynomial, compose_scale, cyclotomic, is_cyclotomic
from .randomized import (
    complex_normal,
    contraction_family,
    matrix_with_rank,
    random_poly,
    random_roots,
    random_unitary,
)
from .textformat import format_polynomial, matrix_to_json

SEED_ENV = "MAHLER_LAB_SEED"
CSV_HEADER = ["claim_id", "status", "observed", "expected", "provenance", "runtime_ms"]
LEHMER_L = IntPolynomial((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
LEHMER_VALUE = 1.176280


@dataclass
class ClaimContext:
    rng: np.random.Generator
    seed: int
    instances: int
    tol: float
    dims: dict
    restarts: int


@dataclass(frozen=True)
class Claim:
    claim_id: str
    statement: str
    provenance: str
    tol: float
    check: Callable


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    status: str
    observed: dict
    expected: dict
    provenance: str
    runtime_ms: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "status": self.status,
            "observed": self.observed,
            "expected": self.expected,
            "provenance": self.provenance,
            "runtime_ms": self.runtime_ms,
        }


def _poly_text(p) -> str:
    return format_polynomial(p)


def _op_text(T: op.FiniteOperator):
    return matrix_to_json(T.entries)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# classical claims


def check_kronecker(ctx):
    worst = 0.0
    violations = []
    for n in range(1, 21):
        p = cyclotomic(n)
        m = cl.mahler_roots(p).value
        worst = max(worst, abs(m - 1))
        if abs(m - 1) > ctx.tol or not is_cyclotomic(p):
            violations.append(_poly_text(p))
    for n in range(3, 31):
        p = IntPolynomial((1, 1) + (0,) * (n - 2) + (1,))
        if is_cyclotomic(p):
            violations.append(_poly_text(p))
    observed = {"max_abs_measure_minus_1": worst, "violations": violations}
    expected = {"cyclotomic_measure": 1.0, "tolerance": ctx.tol, "z^n+z+1_cyclotomic": False}
    return _status(not violations), observed, expected


def check_lehmer_l(ctx):
    from .search import lehmer_search

    report = lehmer_search(10, 1, 1.3)
    best_poly, best = report.candidates[0]
    roots_value = cl.mahler_roots(LEHMER_L).value
    integral_value = cl.mahler_integral(LEHMER_L).value
    ok = (
        abs(best.value - LEHMER_VALUE) <= ctx.tol
        and best_poly == LEHMER_L
        and abs(roots_value - LEHMER_VALUE) <= ctx.tol
        and abs(integral_value - LEHMER_VALUE) <= ctx.tol
    )
    observed = {
        "box_minimum": best.value,
        "box_minimizer": _poly_text(best_poly),
        "root_product": roots_value,
        "circle_quadrature": integral_value,
        "candidates": len(report.candidates),
    }
    return _status(ok), observed, {"value": LEHMER_VALUE, "tolerance": ctx.tol, "minimizer": _poly_text(LEHMER_L)}


def check_pierce_growth(ctx):
    seq = cl.pierce(IntPolynomial((-2, 1)), 64)
    exact = all(v == 2**n - 1 for n, v in enumerate(seq.values, start=1))
    ratio30 = seq.ratios[29 - 1]
    growth = cl.pierce_growth_check(cl.pierce(IntPolynomial((-2, 1)), 30))
    lseq = cl.pierce(LEHMER_L, 10)
    worst = 0.0
    for n, v in enumerate(lseq.values, start=1):
        f = cl.float_pierce(LEHMER_L, n)
        worst = max(worst, abs(f - v) / abs(v))
    # random monic integer polynomials with every root well off the circle
    rng = ctx.rng
    rand_worst = 0.0
    tested = 0
    while tested < 5:
        p = IntPolynomial(tuple(int(x) for x in rng.integers(-3, 4, 3)) + (1,))
        if p.coeffs[0] == 0:
            continue
        absz = np.abs(np.roots(p.coeffs[::-1]))
        # the ratio error decays like 1.2**-n once every root is this far from the circle
        if np.min(np.abs(absz - 1)) < 0.2:
            continue
        s = cl.pierce(p, 60)
        last = cl.pierce_growth_check(s)
        om = cl.omega(p).value
        rand_worst = max(rand_worst, abs(last - om) / om)
        tested += 1
    ok = exact and abs(ratio30 - 2) <= ctx.tol and abs(growth - 2) <= ctx.tol and worst <= ctx.tol and rand_worst <= 1e-3
    observed = {
        "z-2_bit_exact_n<=64": exact,
        "z-2_ratio_at_30": ratio30,
        "lehmer_float_vs_exact_max_rel": worst,
        "random_ratio_vs_omega_max_rel": rand_worst,
    }
    expected = {"ratio": 2.0, "tolerance": ctx.tol, "random_tolerance": 1e-3}
    return _status(ok), observed, expected


# ---------------------------------------------------------------------------
# operator claims


def _sup(T, p, ctx, K=None):
    return op.op_mahler_sup(T, p, restarts=ctx.restarts, K=K, seed=int(ctx.rng.integers(2**31)))


def check_contraction_bound(ctx):
    rng = ctx.rng
    violations = []
    worst = -math.inf
    per = 4
    for T in contraction_family(rng, ctx.instances, 16):
        for _ in range(per):
            p = random_poly(rng, 8)
            s = _sup(T, p, ctx).value
            m = cl.mahler_roots(p).value
            worst = max(worst, s / m - 1)
            if s > m * (1 + ctx.tol):
                violations.append({"T": _op_text(T), "p": _poly_text(p), "sup": s, "M": m})
    observed = {"max_relative_excess": worst, "instances": ctx.instances * per, "violations": violations}
    return _status(not violations), observed, {"bound": "sup <= M(p) (1 + tol)", "tolerance": ctx.tol}


def _hardy(N):
    return op.WeightedShiftSpec("hardy", N).materialize()


def _off_circle_poly(rng, max_degree=8, margin=0.05):
    return random_poly(rng, max_degree, rmax=3.0, margin=margin)


def check_isometry_product(ctx):
    rng = ctx.rng
    N, K = ctx.dims["N"], ctx.dims["K"]
    S = _hardy(N)
    e1 = op.VectorH.unit(N, 1)
    worst_shift = 0.0
    for _ in range(10):
        p = _off_circle_poly(rng)
        lhs = op.op_mahler_on_vector(S, e1, p, K).value
        rhs = op.op_mahler_on_vector(S, e1, [1.0], K).value * cl.mahler_roots(p).value
        worst_shift = max(worst_shift, abs(lhs - rhs) / rhs)
    worst_unitary = 0.0
    for _ in range(5):
        n = int(rng.integers(2, 9))
        U = op.FiniteOperator(random_unitary(rng, n))
        p = _off_circle_poly(rng)
        worst_unitary = max(worst_unitary, _sup(U, p, ctx).value, _sup(U, [1.0], ctx).value)
    ok = worst_shift <= ctx.tol and worst_unitary <= 1e-8
    observed = {"shift_e1_max_rel_gap": worst_shift, "finite_unitary_max_sup": worst_unitary}
    expected = {"identity": "M_V^e(p) = M_V^e(1) M(p)", "tolerance": ctx.tol, "unitary_sup": 0.0}
    return _status(ok), observed, expected


def check_isometry_dichotomy(ctx):
    rng = ctx.rng
    values = []
    for _ in range(5):
        n = int(rng.integers(2, 9))
        U = op.FiniteOperator(random_unitary(rng, n))
        values.append(_sup(U, [1.0], ctx).value)
    N, K = ctx.dims["N"], ctx.dims["K"]
    shift_value = op.op_mahler_on_vector(_hardy(N), op.VectorH.unit(N, 1), [1.0], K).value
    in_dichotomy = all(v <= ctx.tol for v in values) and abs(shift_value - 1) <= ctx.tol
    observed = {
        "finite_unitary_sup_of_1": max(values),
        "truncated_shift_e1_value_of_1": shift_value,
        "reason": "finite unitaries are invertible so only the value 0 occurs; the value 1 for a unitary needs infinite dimension",
    }
    status = "inconclusive" if in_dichotomy else "fail"
    return status, observed, {"values": [0.0, 1.0], "tolerance": ctx.tol}


def check_nonunitary_isometry(ctx):
    rng = ctx.rng
    N, K = ctx.dims["N"], ctx.dims["K"]
    S = _hardy(N)
    e1 = op.VectorH.unit(N, 1)
    worst = 0.0
    violations = []
    for _ in range(20):
        p = _off_circle_poly(rng)
        v = op.op_mahler_on_vector(S, e1, p, K).value
        m = cl.mahler_roots(p).value
        gap = abs(v - m) / m
        worst = max(worst, gap)
        if gap > ctx.tol:
            violations.append(_poly_text(p))
    observed = {"max_rel_gap": worst, "N": N, "K": K, "violations": violations}
    return _status(not violations), observed, {"identity": "M_S^1(p) = M(p)", "tolerance": ctx.tol}


def check_orthonormal_orbit(ctx):
    rng = ctx.rng
    n_dim, K = 128, 48
    worst = 0.0
    for _ in range(10):
        U = random_unitary(rng, n_dim)
        S = _hardy(n_dim).entries
        T = op.FiniteOperator(U @ S @ U.conj().T)
        e = op.VectorH(U[:, 0])
        p = _off_circle_poly(rng, 6, margin=0.2)
        v = op.op_mahler_on_vector(T, e, p, K).value
        m = cl.mahler_roots(p).value
        worst = max(worst, abs(v - m) / m)
    half = op.WeightedShiftSpec("hardy", 64).materialize().scaled(0.5)
    counter = op.op_mahler_on_vector(half, op.VectorH.unit(64, 1), [0.0, 1.0], 32).value
    ok = worst <= ctx.tol and abs(counter - 0.5) <= 1e-12
    observed = {"orthonormal_orbit_max_rel_gap": worst, "half_shift_M_of_z": counter}
    expected = {"identity": "M_T^e(p) = M(p)", "tolerance": ctx.tol, "half_shift_M_of_z": 0.5, "M_of_z": 1.0}
    return _status(ok), observed, expected


def _poly_with_scaled_roots_off_circle(rng, c, max_degree=8, margin=0.1):
    """p whose rescaled p(cz) keeps every root at least ``margin`` from the circle."""
    d = int(rng.integers(1, max_degree + 1))
    beta = random_roots(rng, d, rmax=3.0, margin=margin)
    lead = complex(*rng.standard_normal(2))
    return ComplexPolynomial.from_roots(beta * c, lead)


def check_constant_weight(ctx):
    rng = ctx.rng
    N, K = ctx.dims["N"], ctx.dims["K"]
    worst = 0.0
    violations = []
    for c in (0.3, 0.7):
        T = op.WeightedShiftSpec("const", N, constant=c).materialize()
        for _ in range(10):
            p = _poly_with_scaled_roots_off_circle(rng, c)
            v = op.op_mahler_on_vector(T, op.VectorH.unit(N, 1), p, K).value
            m = cl.mahler_roots(compose_scale(p, c)).value
            gap = abs(v - m)
            worst = max(worst, gap)
            if gap > ctx.tol:
                violations.append({"c": c, "p": _poly_text(p)})
    observed = {"max_abs_gap": worst, "violations": violations}
    return _status(not violations), observed, {"identity": "M_T^e1(p) = M(p(|a_1| z))", "tolerance": ctx.tol}


def check_monomials(ctx):
    rng = ctx.rng
    N, K = 64, 32
    worst = 0.0
    for _ in range(10):
        w = tuple(rng.uniform(0.2, 1.0, N - 1) * np.exp(2j * np.pi * rng.random(N - 1)))
        spec = op.WeightedShiftSpec("explicit", N, explicit=w)
        T = spec.materialize()
        for n in range(0, 12):
            v = op.op_mahler_on_vector(T, op.VectorH.unit(N, 1), [0.0] * n + [1.0], K).value
            worst = max(worst, abs(v - op.shift_monomial_measure(spec, n)))
    # strictly decreasing weights break multiplicativity on monomials
    dec = op.WeightedShiftSpec("explicit", N, explicit=tuple(1.0 / (k + 1) for k in range(1, N)))
    Td = dec.materialize()
    e1 = op.VectorH.unit(N, 1)
    mz = op.op_mahler_on_vector(Td, e1, [0.0, 1.0], K).value
    mz2 = op.op_mahler_on_vector(Td, e1, [0.0, 0.0, 1.0], K).value
    gap = abs(mz2 - mz * mz)
    ok = worst <= ctx.tol and gap > 1e-6
    observed = {"monomial_max_abs_gap": worst, "M(z)": mz, "M(z^2)": mz2, "multiplicativity_gap": gap}
    expected = {"identity": "M_T^e1(z^n) = prod |a_i|", "tolerance": ctx.tol, "multiplicativity_gap": "> 1e-6"}
    return _status(ok), observed, expected


def check_norm_attained(ctx):
    N, K = ctx.dims["N"], ctx.dims["K"]
    worst = 0.0
    for c in (0.1, 0.3, 0.7, 1.0, 0.5j):
        T = op.WeightedShiftSpec("const", N, constant=c).materialize()
        v = op.op_mahler_on_vector(T, op.VectorH.unit(N, 1), [0.0, 1.0], K).value
        worst = max(worst, abs(v - T.norm_bound))
    ok = worst <= ctx.tol
    observed = {"max_abs_gap": worst, "note": "constant-weight shifts only; other attaining vectors are not searched"}
    return _status(ok), observed, {"identity": "M_T^e(z) = |T|", "tolerance": ctx.tol}


def _rank_family(rng, count, max_dim=8):
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_dim + 1))
        rank = int(rng.integers(0, n)) if i % 2 == 0 else n
        out.append(op.FiniteOperator(matrix_with_rank(rng, n, rank) * rng.uniform(0.5, 1.0)))
    return out


def _kernel_vectors(T):
    u, s, vh = np.linalg.svd(T.entries)
    return vh[-1].conj(), u[:, -1]


def check_subharmonic_equivalences(ctx):
    rng = ctx.rng
    disagreements = []
    for T in _rank_family(rng, ctx.instances):
        E = op.e_quantity(T)
        kern, corange = _kernel_vectors(T)
        witness = op.subharmonic_witness_check(T, op.VectorH(kern), T.dim)
        dist = op.krylov_distance(T, op.VectorH(kern), T.dim).distance
        sup1 = _sup(T, [1.0], ctx).value
        views = [E == 1, witness, abs(dist - 1) <= ctx.tol, sup1 >= 1 - ctx.tol]
        if E == 1:
            # the defining inequality on the witness, for a handful of random p
            for _ in range(5):
                p = random_poly(rng, 5)
                pv = np.linalg.norm(op.apply_poly(T, p, op.VectorH(kern)).components)
                views.append(bool(pv >= abs(p.coeffs[0]) * (1 - ctx.tol)))
        if len(set(views)) != 1:
            disagreements.append({"T": _op_text(T), "views": views})
    observed = {"instances": ctx.instances, "disagreements": disagreements}
    expected = {"equivalent": ["E(T)=1", "orthogonal witness", "distance 1", "M_T(1)=1", "|p(T)e| >= |p(0)| when E(T)=1"]}
    return _status(not disagreements), observed, expected


def check_kernel_examples(ctx):
    rng = ctx.rng
    worst = 0.0
    for _ in range(ctx.instances):
        n = int(rng.integers(2, 9))
        T = op.FiniteOperator(matrix_with_rank(rng, n, int(rng.integers(0, n))))
        kern, corange = _kernel_vectors(T)
        for v in (kern, corange):
            d = op.krylov_distance(T, op.VectorH(v), n).distance
            worst = max(worst, abs(d - 1))
    observed = {
        "max_abs_distance_minus_1": worst,
        "note": "kernel and co-range cases; the third example is vacuous at finite dimension",
    }
    return _status(worst <= ctx.tol), observed, {"distance": 1.0, "tolerance": ctx.tol}


def check_finite_criterion(ctx):
    rng = ctx.rng
    mismatches = []
    for T in _rank_family(rng, ctx.instances):
        rank = int(np.linalg.matrix_rank(T.entries))
        expected_sub = rank < T.dim
        if op.is_subharmonic_finite(T) != expected_sub:
            mismatches.append(_op_text(T))
    observed = {"instances": ctx.instances, "mismatches": mismatches}
    return _status(not mismatches), observed, {"criterion": "subharmonic iff ker T != 0"}


def check_norm_bound(ctx):
    rng = ctx.rng
    violations = []
    worst = -math.inf
    for T in _rank_family(rng, ctx.instances):
        E = op.e_quantity(T)
        p = random_poly(rng, 6)
        s = _sup(T, p, ctx).value
        bound = op.operator_norm_of_poly(T, p) * E
        worst = max(worst, s - bound)
        if s > bound + ctx.tol:
            violations.append({"T": _op_text(T), "p": _poly_text(p)})
    observed = {"max_excess": worst, "violations": violations}
    return _status(not violations), observed, {"bound": "M_T(p) <= |p(T)| E(T)", "tolerance": ctx.tol}


def check_e_dichotomy(ctx):
    rng = ctx.rng
    violations = []
    counts = {0: 0, 1: 0}
    for T in _rank_family(rng, ctx.instances):
        E = op.e_quantity(T)
        counts[E] += 1
        s = _sup(T, [1.0], ctx).value
        if E not in (0, 1) or abs(s - E) > ctx.tol:
            violations.append({"T": _op_text(T), "E": E, "sup": s})
    observed = {"E=0": counts[0], "E=1": counts[1], "violations": violations}
    return _status(not violations), observed, {"values": [0, 1], "tolerance": ctx.tol}


def check_cyclotomic_on_subharmonic(ctx):
    rng = ctx.rng
    worst = 0.0
    violations = []
    for i in range(ctx.instances // 5):
        n = int(rng.integers(2, 9))
        T = op.FiniteOperator(matrix_with_rank(rng, n, int(rng.integers(0, n))) * rng.uniform(0.5, 1.0))
        p = cyclotomic(int(rng.integers(1, 13)))
        s = _sup(T, p, ctx).value
        worst = max(worst, abs(s - 1))
        if abs(s - 1) > ctx.tol:
            violations.append({"T": _op_text(T), "p": _poly_text(p), "sup": s})
    observed = {"max_abs_sup_minus_1": worst, "violations": violations}
    return _status(not violations), observed, {"value": 1.0, "tolerance": ctx.tol}


# ---------------------------------------------------------------------------
# areal claims


def check_lehmer_limit(ctx):
    N, K = ctx.dims["limit_N"], ctx.dims["limit_K"]
    n_max = ctx.dims["limit_n_max"]
    rows = ar.lehmer_limit_table(3, n_max, N, K)
    berg = np.array([r.bergman for r in rows])
    areal = np.array([r.areal for r in rows])
    errs = np.array([r.bergman_error for r in rows])
    settle_b = rows[ar.settles_decreasing(berg, errs)].n
    settle_a = rows[ar.settles_decreasing(areal)].n
    shrink_b = (berg[0] - 1) / (berg[-1] - 1)
    shrink_a = (areal[0] - 1) / (areal[-1] - 1)
    mid = (3 + n_max) / 2
    ok = (
        berg.min() >= 1 - ctx.tol
        and areal.min() >= 1 - ctx.tol
        and np.all(areal <= berg + errs + 1e-6)
        and settle_b <= mid
        and settle_a <= mid
        and shrink_b >= 10
        and shrink_a >= 10
    )
    observed = {
        "n_max": n_max,
        "bergman_min": float(berg.min()),
        "areal_min": float(areal.min()),
        "bergman_last": float(berg[-1]),
        "areal_last": float(areal[-1]),
        "bergman_decreasing_from_n": int(settle_b),
        "areal_decreasing_from_n": int(settle_a),
        "bergman_shrink": float(shrink_b),
        "areal_shrink": float(shrink_a),
    }
    expected = {"lower_bound": 1.0, "tolerance": ctx.tol, "shrink_at_least": 10, "decreasing_from_n_at_most": mid}
    return _status(ok), observed, expected


def check_areal_chain(ctx):
    rng = ctx.rng
    K = ctx.dims["K"]
    worst = math.inf
    violations = []
    for _ in range(ctx.instances):
        p = random_poly(rng, 10, margin=0.1)
        rep = ar.chain_check(p, None, K, ctx.tol)
        worst = min(worst, *rep.slack)
        if not rep.chain_ok:
            violations.append(_poly_text(p))
    for n in range(0, 8):
        rep = ar.chain_check(ComplexPolynomial((0.0,) * n + (1.0,)), None, K, ctx.tol)
        worst = min(worst, *rep.slack)
        if not rep.chain_ok:
            violations.append(f"z^{n}")
    observed = {"min_slack": worst, "violations": violations}
    return _status(not violations), observed, {"chain": "|p|_0 <= M_B^1(p) <= M(p)", "tolerance": ctx.tol}


def beta_weight(alpha: float) -> ar.RadialWeight:
    """``rho(t) = (alpha + 1)(1 - t)^alpha``, a probability density for ``dA``."""
    return ar.RadialWeight.from_function(lambda t: (alpha + 1) * (1 - t) ** alpha, normalization_declared=True)


def check_weighted_limit(ctx):
    ns = (3, 10, 30, 100)
    table = {}
    ok = True
    for alpha in (0.0, 1.0, 2.0):
        w = beta_weight(alpha)
        vals = [ar.weighted_areal(ar.lehmer_polynomial_family(n), w).value for n in ns]
        table[f"alpha={alpha:g}"] = vals
        ok &= all(v >= 1 - ctx.tol for v in vals)
        ok &= (vals[0] - 1) >= 10 * (vals[-1] - 1)
        ok &= w.mass() <= 1 + 1e-6
    unit = ar.weighted_areal([0.0, 1.0], ar.RadialWeight.constant_one()).value
    ok &= abs(unit - math.exp(-0.5)) <= 1e-6
    observed = {
        "n": list(ns),
        "values": table,
        "constant_weight_on_z": unit,
        "note": "only weights of total mass at most 1 are tested",
    }
    expected = {"limit": 1.0, "shrink_at_least": 10, "constant_weight_on_z": math.exp(-0.5)}
    return _status(ok), observed, expected


# ---------------------------------------------------------------------------
# registry


def _claims():
    c = Claim
    return [
        c("kronecker", "M(p) = 1 for cyclotomic p; z^n + z + 1 is not cyclotomic", "exact identity", 1e-9, check_kronecker),
        c("lehmer-L", "the degree-10 height-1 box minimum above 1 is L(z) with M = 1.176280...", "published value", 1e-5, check_lehmer_l),
        c("pierce-growth", "Delta_n is integral and |Delta_{n+1}/Delta_n| tends to Omega(p)", "exact arithmetic and limit", 1e-6, check_pierce_growth),
        c("thm-2.3", "M_T(p) <= M(p) for every contraction T", "randomized property run", 1e-6, check_contraction_bound),
        c("lemma-2.4", "M_V(p) = M_V(1) M(p) for isometries V", "truncated-shift witness", 1e-3, check_isometry_product),
        c("lemma-2.5", "M_V(1) is 0 or 1 for isometries V", "finite-dimension limitation", 1e-8, check_isometry_dichotomy),
        c("prop-2.6", "M_V(p) = M(p) for non-unitary isometries V", "truncated-shift witness", 1e-3, check_nonunitary_isometry),
        c("cor-2.8", "M_T^e(p) = M(p) when T^n e is orthonormal", "unitarily rotated shift", 1e-3, check_orthonormal_orbit),
        c("lemma-2.9", "M_T^e1(p) = M(p(|a_1| z)) for constant weights", "closed form", 1e-6, check_constant_weight),
        c("prop-2.10", "M_T^e1(z^n) = prod_{i<=n} |a_i|; multiplicativity fails for decreasing weights", "closed form", 1e-10, check_monomials),
        c("cor-2.11", "M_T^e(z) = |T| for constant-weight shifts", "closed form", 1e-10, check_norm_attained),
        c("thm-3.2", "subharmonic on e iff M_T(1) = 1 iff e is orthogonal to its forward orbit", "finite-matrix equivalences", 1e-9, check_subharmonic_equivalences),
        c("lemma-3.4", "kernel and co-range vectors are subharmonic witnesses", "exact identity", 1e-9, check_kernel_examples),
        c("cor-3.6", "a finite matrix is subharmonic iff it has a nontrivial kernel", "rank criterion", 1e-9, check_finite_criterion),
        c("prop-3.3-bound", "M_T(p) <= |p(T)| E(T)", "randomized property run", 1e-6, check_norm_bound),
        c("prop-3.8", "E(T) = M_T(1) is 0 or 1", "randomized property run", 1e-6, check_e_dichotomy),
        c("prop-4.3", "M_T(p) = 1 for cyclotomic p on subharmonic contractions", "randomized property run", 1e-6, check_cyclotomic_on_subharmonic),
        c("thm-4.1", "M_B^1(z^n + z + 1) and |z^n + z + 1|_0 tend to 1", "limit, rate observed", 1e-9, check_lehmer_limit),
        c("prop-4.6", "|p|_0 <= M_B^1(p) <= M(p)", "randomized property run", 1e-6, check_areal_chain),
        c("remark-4.7", "weighted areal measures of z^n + z + 1 tend to 1", "sampled weights of mass 1", 1e-9, check_weighted_limit),
    ]


REGISTRY = {claim.claim_id: claim for claim in _claims()}
CLAIM_IDS = tuple(REGISTRY)


# ---------------------------------------------------------------------------
# configuration and execution

DEFAULT_DIMS = {"N": 512, "K": 256, "limit_N": 1024, "limit_K": 480, "limit_n_max": 200}


@dataclass
class SuiteConfig:
    seed: int = 42
    dims: dict = field(default_factory=lambda: dict(DEFAULT_DIMS))
    tolerances: dict = field(default_factory=dict)
    suites: list = field(default_factory=lambda: list(CLAIM_IDS))
    jobs: int = 1
    output: Optional[str] = None
    format: str = "json"
    instances: int = 50
    restarts: int = 8
    timing: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        unknown = [s for s in self.suites if s not in REGISTRY]
        if unknown:
            raise ArgumentError(f"unknown claim id(s): {', '.join(unknown)}")
        for key, tol in self.tolerances.items():
            if key not in REGISTRY:
                raise ArgumentError(f"tolerance given for unknown claim id {key!r}")
            if not tol > 0:
                raise ArgumentError(f"tolerance for {key} must be positive")
        if self.format not in ("json", "csv"):
            raise ArgumentError(f"unknown report format {self.format!r}")
        if self.jobs < 1 or self.instances < 1 or self.restarts < 1:
            raise ArgumentError("jobs, instances and restarts must be positive")
        if self.output is not None:
            # fail before a long run rather than after it
            parent = os.path.dirname(os.path.abspath(self.output))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                raise ArgumentError(f"output path {self.output!r} is not writable")
            if os.path.isdir(self.output):
                raise ArgumentError(f"output path {self.output!r} is a directory")
        dims = dict(DEFAULT_DIMS)
        dims.update(self.dims)
        self.dims = dims

    @classmethod
    def from_json(cls, text: str, **overrides) -> "SuiteConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ArgumentError("config must be a JSON object")
        allowed = set(cls.__dataclass_fields__)
        extra = set(data) - allowed
        if extra:
            raise ArgumentError(f"unknown config keys: {', '.join(sorted(extra))}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def tolerance(self, claim_id: str) -> float:
        return self.tolerances.get(claim_id, REGISTRY[claim_id].tol)


def resolve_seed(seed: Optional[int]) -> int:
    """Explicit seed, else ``MAHLER_LAB_SEED``, else 42."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ArgumentError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return 42


def claim_rng(seed: int, claim_id: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(claim_id.encode())]))


def run_claim(claim_id: str, config: SuiteConfig) -> ClaimResult:
    claim = REGISTRY[claim_id]
    ctx = ClaimContext(
        rng=claim_rng(config.seed, claim_id),
        seed=config.seed,
        instances=config.instances,
        tol=config.tolerance(claim_id),
        dims=config.dims,
        restarts=config.restarts,
    )
    start = time.perf_counter()
    try:
        status, observed, expected = claim.check(ctx)
    except InconclusiveError as exc:
        status, observed, expected = "inconclusive", {"reason": str(exc)}, {}
    elapsed = (time.perf_counter() - start) * 1000.0
    expected = dict(expected, statement=claim.statement)
    return ClaimResult(
        claim_id,
        status,
        _jsonable(observed),
        _jsonable(expected),
        claim.provenance,
        round(elapsed, 3) if config.timing else None,
    )


def _run_claim_star(args):
    return run_claim(*args)


def run_suite(config: SuiteConfig) -> list:
    """Run the configured claims; results follow registry order whatever ``jobs`` is."""
    ids = [cid for cid in CLAIM_IDS if cid in set(config.suites)]
    if config.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_run_claim_star, [(cid, config) for cid in ids]))
    return [run_claim(cid, config) for cid in ids]


def exit_code(results) -> int:
    statuses = {r.status for r in results}
    if "fail" in statuses:
        return 1
    if "inconclusive" in statuses:
        return 2
    return 0


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return v
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def render_report(results, fmt: str = "json") -> str:
    if not results:
        raise ArgumentError("report needs at least one result")
    records = [r.to_dict() for r in results]
    if fmt == "json":
        return json.dumps(records, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(
                [
                    rec["claim_id"],
                    rec["status"],
                    json.dumps(rec["observed"], sort_keys=True),
                    json.dumps(rec["expected"], sort_keys=True),
                    rec["provenance"],
                    "" if rec["runtime_ms"] is None else rec["runtime_ms"],
                ]
            )
        return buf.getvalue()
    raise ArgumentError(f"unknown report format {fmt!r}")


def emit_report(results, fmt: str = "json", path: Optional[str] = None) -> str:
    """Render the report and write it to ``path`` (stdout when ``None``); I/O errors propagate."""
    text = render_report(results, fmt)
    if path is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
