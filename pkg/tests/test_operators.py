import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mahler_lab import _kernels
from mahler_lab.classical import mahler_roots
from mahler_lab.errors import ArgumentError, IllConditionedError
from mahler_lab.operators import (
    FiniteOperator,
    VectorH,
    WeightedShiftSpec,
    apply_poly,
    e_quantity,
    is_subharmonic_finite,
    krylov_distance,
    op_mahler_on_vector,
    op_mahler_sup,
    operator_norm_of_poly,
    shift_monomial_measure,
    subharmonic_witness_check,
)
from mahler_lab.polynomials import ComplexPolynomial, IntPolynomial, compose_scale
from mahler_lab.randomized import complex_normal, random_contraction, random_poly, random_unitary

JORDAN = FiniteOperator(np.array([[0, 0], [1, 0]]))


def _hardy(n):
    return WeightedShiftSpec("hardy", n).materialize()


def _krylov_oracle(A, v, K):
    """Distance from v to span{A v, ..., A^K v} by a dense least-squares solve."""
    cols = [A @ v]
    for _ in range(K - 1):
        cols.append(A @ cols[-1])
    M = np.stack(cols, axis=1)
    q, r = np.linalg.qr(M)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
    q = q[:, keep]
    return float(np.linalg.norm(v - q @ (q.conj().T @ v)))


# ---- vectors and operators --------------------------------------------------


def test_apply_poly_examples():
    v = VectorH(np.array([0.6, 0.8j]))
    p = ComplexPolynomial((2 - 1j, 3, 1))
    out = apply_poly(FiniteOperator(np.zeros((2, 2))), p, v)
    assert np.allclose(out.components, (2 - 1j) * v.components)
    out = apply_poly(FiniteOperator(np.eye(2)), ComplexPolynomial((0, 0, 1)), v)
    assert np.allclose(out.components, v.components)
    out = apply_poly(JORDAN, IntPolynomial((1, 1)), VectorH.unit(2, 1))
    assert np.allclose(out.components, [1, 1])


def test_apply_poly_dimension_mismatch():
    with pytest.raises(ArgumentError):
        apply_poly(JORDAN, IntPolynomial((1,)), VectorH.unit(3, 1))


def test_shift_spec_rules():
    assert np.allclose(WeightedShiftSpec("bergman", 5).weights(), np.sqrt([1 / 2, 2 / 3, 3 / 4, 4 / 5]))
    assert WeightedShiftSpec.parse("const:0.5", 4).constant == 0.5
    with pytest.raises(ArgumentError):
        WeightedShiftSpec.parse("wavy", 4)
    with pytest.raises(ArgumentError):
        WeightedShiftSpec("explicit", 4, explicit=(1.0, 0.0, 1.0))
    T = WeightedShiftSpec("const", 4, constant=0.5).materialize()
    assert np.allclose(T.entries, 0.5 * np.eye(4, k=-1))
    assert T.norm_bound == pytest.approx(0.5)


# ---- Krylov distance --------------------------------------------------------


def test_krylov_examples():
    assert krylov_distance(_hardy(64), VectorH.unit(64, 1), 32).distance == pytest.approx(1, abs=1e-14)
    assert krylov_distance(_hardy(64), VectorH(np.zeros(64)), 32).distance == 0
    v = VectorH(np.array([0.6, 0.8, 0, 0]))
    assert krylov_distance(FiniteOperator(np.eye(4)), v, 4).distance == pytest.approx(0, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(1, 6), st.integers(0, 2**31))
def test_krylov_matches_dense_least_squares(n, K, seed):
    rng = np.random.default_rng(seed)
    A = complex_normal(rng, n, n) / n
    v = complex_normal(rng, n)
    got = krylov_distance(FiniteOperator(A), VectorH(v), K)
    assert got.distance == pytest.approx(_krylov_oracle(A, v, K), rel=1e-7, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31))
def test_krylov_history_is_monotone(n, seed):
    rng = np.random.default_rng(seed)
    T = random_contraction(rng, n, ["singular", "invertible", "shift", "nilpotent"][seed % 4])
    res = krylov_distance(T, VectorH(complex_normal(rng, n)), n)
    h = np.array(res.history)
    assert np.all(np.diff(h) <= 0)
    assert res.distance == h[-1]


def test_krylov_shift_path_matches_dense_path():
    rng = np.random.default_rng(5)
    w = rng.uniform(0.2, 1, 29) * np.exp(2j * np.pi * rng.random(29))
    shift = FiniteOperator.from_shift_weights(w)
    dense = FiniteOperator(shift.entries)
    v = VectorH(complex_normal(rng, 30))
    a = krylov_distance(shift, v, 20).history
    b = krylov_distance(dense, v, 20).history
    assert np.allclose(a, b, rtol=1e-10, atol=1e-13)


# ---- M_T^e ------------------------------------------------------------------


def test_hardy_identity_on_e1():
    rng = np.random.default_rng(11)
    T = _hardy(512)
    for _ in range(5):
        p = random_poly(rng, 8, margin=0.05)
        got = op_mahler_on_vector(T, VectorH.unit(512, 1), p, 256).value
        assert got == pytest.approx(mahler_roots(p).value, abs=1e-3)


def test_bergman_monomials():
    T = WeightedShiftSpec("bergman", 512).materialize()
    for n in range(21):
        p = IntPolynomial((0,) * n + (1,))
        got = op_mahler_on_vector(T, VectorH.unit(512, 1), p, 256).value
        assert got == pytest.approx(1 / np.sqrt(n + 1), abs=1e-10)


@pytest.mark.parametrize("c", [0.3, 0.7])
def test_constant_weight_scales_the_polynomial(c):
    rng = np.random.default_rng(int(c * 10))
    T = WeightedShiftSpec("const", 512, constant=c).materialize()
    for _ in range(5):
        p = random_poly(rng, 6, rmax=2.0)
        # keep the scaled roots off the circle
        if np.min(np.abs(np.abs(np.roots(compose_scale(p, c).array[::-1])) - 1)) < 0.1:
            continue
        got = op_mahler_on_vector(T, VectorH.unit(512, 1), p, 256).value
        assert got == pytest.approx(mahler_roots(compose_scale(p, c)).value, abs=1e-6)


def test_unit_vector_required():
    with pytest.raises(ArgumentError):
        op_mahler_on_vector(_hardy(8), VectorH(np.ones(8)), IntPolynomial((1,)), 4)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31))
def test_unitary_similarity_invariance(n, seed):
    rng = np.random.default_rng(seed)
    T = random_contraction(rng, n, "singular")
    U = random_unitary(rng, n)
    e = complex_normal(rng, n)
    e /= np.linalg.norm(e)
    p = random_poly(rng, 4)
    a = op_mahler_on_vector(T, VectorH(e), p, n).value
    b = op_mahler_on_vector(FiniteOperator(U @ T.entries @ U.conj().T), VectorH(U @ e), p, n).value
    assert b == pytest.approx(a, rel=1e-8, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31))
def test_trivial_bound_for_constant_one(n, seed):
    rng = np.random.default_rng(seed)
    T = random_contraction(rng, n, ["singular", "invertible", "shift", "nilpotent"][seed % 4])
    e = complex_normal(rng, n)
    e /= np.linalg.norm(e)
    assert op_mahler_on_vector(T, VectorH(e), IntPolynomial((1,)), n).value <= 1 + 1e-12


def test_scalar_polynomial_factor():
    # M_T^e(a p) = |a| M_T^e(p)
    rng = np.random.default_rng(2)
    T = random_contraction(rng, 7, "singular")
    e = VectorH.unit(7, 1)
    p = random_poly(rng, 4)
    a = op_mahler_on_vector(T, e, p, 7).value
    b = op_mahler_on_vector(T, e, ComplexPolynomial.from_array((3 - 4j) * p.array), 7).value
    assert b == pytest.approx(5 * a, rel=1e-10)


# ---- gradient and the supremum ---------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**31))
def test_analytic_gradient_matches_finite_differences(n, seed):
    rng = np.random.default_rng(seed)
    T = random_contraction(rng, n, ["singular", "invertible", "shift", "nilpotent"][seed % 4])
    dense, dense_h, w, shift = T._kernel_args()
    c = np.ascontiguousarray(random_poly(rng, 3).array)
    e = complex_normal(rng, n)
    e /= np.linalg.norm(e)
    K = n - 1 if n > 1 else 1
    f, g = _kernels.value_grad(dense, dense_h, w, shift, c, e, K, T.norm_bound)
    d = complex_normal(rng, n)
    h = 1e-6
    fp = _kernels.value(dense, w, shift, c, e + h * d, K, T.norm_bound)
    fm = _kernels.value(dense, w, shift, c, e - h * d, K, T.norm_bound)
    fd = (fp**2 - fm**2) / (2 * h)
    assert fd == pytest.approx(2 * np.real(np.vdot(g, d)), rel=1e-4, abs=1e-7)


def test_central_and_analytic_sup_agree():
    rng = np.random.default_rng(4)
    for kind in ("singular", "nilpotent", "shift"):
        T = random_contraction(rng, 6, kind)
        p = random_poly(rng, 3)
        a = op_mahler_sup(T, p, restarts=6, K=6, seed=1).value
        b = op_mahler_sup(T, p, restarts=6, K=6, seed=1, gradient="central").value
        assert b == pytest.approx(a, rel=1e-4, abs=1e-6)


def test_sup_examples():
    p = ComplexPolynomial((2 - 1j, 1, 3))
    assert op_mahler_sup(FiniteOperator(np.zeros((5, 5))), p, restarts=4).value == pytest.approx(abs(2 - 1j))
    U = FiniteOperator(np.diag(np.exp(2j * np.pi * np.arange(6) / 7)))
    assert op_mahler_sup(U, p, restarts=8).value <= 1e-8
    T = _hardy(64)
    q = IntPolynomial((1, 1))
    sample = op_mahler_on_vector(T, VectorH.unit(64, 1), q, 64).value
    res = op_mahler_sup(T, q, restarts=4, K=64)
    assert res.value >= sample
    assert res.params["best_restart"] >= 0


def test_sup_deterministic_under_seed():
    rng = np.random.default_rng(8)
    T = random_contraction(rng, 8, "singular")
    p = random_poly(rng, 4)
    a = op_mahler_sup(T, p, restarts=5, seed=3)
    b = op_mahler_sup(T, p, restarts=5, seed=3)
    assert a.value == b.value and a.params == b.params


def test_sup_bounded_by_classical_measure():
    rng = np.random.default_rng(21)
    for i in range(8):
        T = random_contraction(rng, int(rng.integers(2, 9)), ["singular", "invertible", "shift", "nilpotent"][i % 4])
        p = random_poly(rng, 5)
        assert op_mahler_sup(T, p, restarts=6).value <= mahler_roots(p).value * (1 + 1e-6)


# ---- E(T) and subharmonicity -----------------------------------------------


def test_e_quantity_examples():
    assert e_quantity(JORDAN) == 1
    assert e_quantity(FiniteOperator(np.eye(3))) == 0
    assert e_quantity(FiniteOperator(np.diag([0.0, 1.0]))) == 1


def test_e_quantity_ill_conditioned():
    with pytest.raises(IllConditionedError) as info:
        e_quantity(FiniteOperator(np.diag([1.0, 1e-9])))
    assert info.value.gap == pytest.approx(1e-9)


def test_is_subharmonic_examples():
    v = np.array([1.0, 2.0, 2.0]) / 3
    assert is_subharmonic_finite(FiniteOperator(np.outer(v, v)))
    assert not is_subharmonic_finite(FiniteOperator(np.triu(np.ones((4, 4)))))
    assert is_subharmonic_finite(_hardy(16))


def test_witness_examples():
    assert subharmonic_witness_check(_hardy(16), VectorH.unit(16, 1), 15)
    e = VectorH(np.array([0.6, 0.8]))
    assert not subharmonic_witness_check(FiniteOperator(np.eye(2)), e, 4)
    assert subharmonic_witness_check(FiniteOperator(np.diag([0.0, 1.0])), VectorH.unit(2, 1), 4)


def test_kernel_vector_reaches_distance_one():
    rng = np.random.default_rng(9)
    for rank in range(0, 6):
        A = complex_normal(rng, 6, rank) @ complex_normal(rng, rank, 6) if rank else np.zeros((6, 6))
        T = FiniteOperator(A)
        assert e_quantity(T) == 1
        # a unit vector orthogonal to the range of T is orthogonal to every T^k e
        u, s, vh = np.linalg.svd(A)
        e = u[:, -1]
        assert krylov_distance(T, VectorH(e), 6).distance == pytest.approx(1, abs=1e-9)


def test_operator_norm_bound():
    rng = np.random.default_rng(13)
    for kind in ("singular", "nilpotent"):
        T = random_contraction(rng, 6, kind)
        p = random_poly(rng, 3)
        assert op_mahler_sup(T, p, restarts=6).value <= operator_norm_of_poly(T, p) * e_quantity(T) + 1e-6


# ---- monomials --------------------------------------------------------------


def test_shift_monomial_measure_examples():
    assert shift_monomial_measure(WeightedShiftSpec("hardy", 64), 7) == 1
    assert shift_monomial_measure(WeightedShiftSpec("bergman", 64), 8) == pytest.approx(1 / 3)
    assert shift_monomial_measure(WeightedShiftSpec("const", 64, constant=0.5), 3) == 0.125
    with pytest.raises(ArgumentError):
        shift_monomial_measure(WeightedShiftSpec("hardy", 4), 3)


def test_shift_monomial_matches_krylov():
    rng = np.random.default_rng(17)
    w = tuple(rng.uniform(0.2, 1, 63))
    spec = WeightedShiftSpec("explicit", 64, explicit=w)
    T = spec.materialize()
    for n in range(10):
        got = op_mahler_on_vector(T, VectorH.unit(64, 1), IntPolynomial((0,) * n + (1,)), 32).value
        assert got == pytest.approx(shift_monomial_measure(spec, n), rel=1e-10)
