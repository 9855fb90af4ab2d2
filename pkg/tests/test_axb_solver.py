"""Tests for the AXB vs C solvers: operator order, Schatten norms, oracles."""

import numpy as np
import pytest

from axbmin import (
    DEFAULT_TOL,
    OrderStatus,
    ProblemInstance,
    PsdWeight,
    SolveStatus,
    brute_force_p2_oracle,
    check_conditions,
    complex_gaussian,
    critical_residual,
    descent_check_fp,
    directional_derivative,
    h_map,
    hermitian_part,
    is_psd,
    loewner_leq,
    normal_residual_full,
    normal_residual_p2,
    operator_order_min,
    random_feasible_instance,
    random_instance,
    random_psd_weight,
    random_rank_matrix,
    schatten_min,
    shorted_to_range_of_a,
    solve_axb_exact,
    w_inverse,
    weighted_seminorm,
)
from axbmin.cli import example1_instance, example3_instance


def min_eig(h):
    return float(np.linalg.eigvalsh(hermitian_part(h))[0])


# ---------------------------------------------------------------------------
# instance plumbing


def test_instance_validation():
    eye = PsdWeight.identity(2)
    with pytest.raises(ValueError):
        ProblemInstance(np.eye(2), np.eye(3), np.eye(2), eye)  # C cols mismatch
    with pytest.raises(ValueError):
        ProblemInstance(np.eye(3), np.eye(3), np.eye(3), eye)  # W dim mismatch
    with pytest.raises(ValueError):
        ProblemInstance(np.eye(2), np.eye(2), np.eye(2), eye, p=0.5)
    with pytest.raises(TypeError):
        ProblemInstance(np.eye(2), np.eye(2), np.eye(2), np.eye(2))


def test_rectangular_shapes_supported():
    rng = np.random.default_rng(40)
    inst = random_instance(rng, 5, 3, 2, 4)
    assert inst.x_shape == (3, 2)
    x = complex_gaussian(rng, 3, 2)
    assert inst.residual(x).shape == (5, 4)
    assert h_map(inst, x).shape == (4, 4)
    assert normal_residual_full(inst, x).shape == (3, 4)
    assert normal_residual_p2(inst, x).shape == (3, 2)


# ---------------------------------------------------------------------------
# h_map


def test_h_map_zero_at_exact_solution():
    rng = np.random.default_rng(41)
    a = complex_gaussian(rng, 3, 3)
    b = complex_gaussian(rng, 3, 3)
    x = complex_gaussian(rng, 3, 3)
    inst = ProblemInstance(a, b, a @ x @ b, PsdWeight.identity(3))
    assert np.linalg.norm(h_map(inst, x)) <= 1e-10


def test_h_map_counterexample_form():
    # identity-weight 2x2 data: H(X) = [[1, -x], [-conj(x), |x|^2]]
    inst = example1_instance()
    rng = np.random.default_rng(42)
    for _ in range(5):
        x_mat = complex_gaussian(rng, 2, 2)
        x = x_mat[0, 0]
        expected = np.array([[1.0, -x], [-np.conj(x), abs(x) ** 2]])
        np.testing.assert_allclose(h_map(inst, x_mat), expected, atol=1e-12)


def test_h_map_always_psd():
    rng = np.random.default_rng(43)
    for _ in range(10):
        inst = random_instance(rng, 4, 3, 3, 4, rank_w=3)
        x = complex_gaussian(rng, *inst.x_shape)
        assert is_psd(h_map(inst, x))


# ---------------------------------------------------------------------------
# exact solver


def test_solve_axb_exact_identity():
    rng = np.random.default_rng(44)
    c = complex_gaussian(rng, 3, 3)
    result = solve_axb_exact(np.eye(3), np.eye(3), c)
    assert result.solvable
    np.testing.assert_allclose(result.manifold.particular, c, atol=1e-12)
    # manifold collapses: identity factors absorb every parameter
    l = complex_gaussian(rng, 3, 3)
    np.testing.assert_allclose(result.manifold.map(l), c, atol=1e-12)


def test_solve_axb_exact_zero_rhs():
    rng = np.random.default_rng(45)
    a = random_rank_matrix(rng, 4, 3, 2)
    b = random_rank_matrix(rng, 3, 4, 2)
    result = solve_axb_exact(a, b, np.zeros((4, 4)))
    assert result.solvable
    np.testing.assert_allclose(result.manifold.particular, 0, atol=1e-12)
    for _ in range(10):
        x = result.manifold.map(complex_gaussian(rng, 3, 3))
        assert np.linalg.norm(a @ x @ b) <= 1e-9


def test_solve_axb_exact_generated_solvable():
    rng = np.random.default_rng(46)
    for _ in range(10):
        a = random_rank_matrix(rng, 4, 3, 2)
        b = random_rank_matrix(rng, 3, 4, 2)
        c = a @ complex_gaussian(rng, 3, 3) @ b
        result = solve_axb_exact(a, b, c)
        assert result.solvable
        for _ in range(5):
            x = result.manifold.map(complex_gaussian(rng, 3, 3))
            assert np.linalg.norm(a @ x @ b - c) <= DEFAULT_TOL.residual_abs


def test_solve_axb_exact_unsolvable_is_status_not_exception():
    a = np.diag([1.0, 0.0]).astype(complex)
    result = solve_axb_exact(a, np.eye(2), np.eye(2))  # R(I) not in R(a)
    assert not result.solvable
    assert result.manifold is None
    assert result.range_c_in_a_residual > 0.1


# ---------------------------------------------------------------------------
# operator-order minimization


def test_order_min_counterexample_is_unknown():
    result = operator_order_min(example1_instance())
    assert result.status is OrderStatus.INFIMUM_UNKNOWN
    assert result.manifold is None
    assert result.inf_value is None
    assert not result.conditions.kernel_condition


def test_order_min_b_identity_matches_w_inverse():
    # with B = I the problem reduces to the W-inverse of A in R(C)
    rng = np.random.default_rng(47)
    a = random_rank_matrix(rng, 4, 3, 2)
    w = random_psd_weight(rng, 4)
    c = complex_gaussian(rng, 4, 4)
    inst = ProblemInstance(a, np.eye(4), c, w)
    result = operator_order_min(inst)
    assert result.status is OrderStatus.MINIMUM_EXISTS
    manifold = w_inverse(a, w, c)
    np.testing.assert_allclose(
        result.manifold.particular, manifold.particular, atol=1e-9
    )


def test_order_min_feasible_instances():
    rng = np.random.default_rng(48)
    for _ in range(10):
        inst = random_feasible_instance(rng, 5, 4, 3, 4, rank_a=3, rank_b=2)
        result = operator_order_min(inst)
        assert result.status is OrderStatus.MINIMUM_EXISTS
        for _ in range(5):
            x = result.manifold.map(complex_gaussian(rng, *inst.x_shape))
            # the manifold solves the strong normal equation
            assert np.linalg.norm(normal_residual_full(inst, x)) <= 1e-8
            # the attained value is the claimed infimum
            gap = h_map(inst, x) - result.inf_value
            assert np.linalg.norm(gap) <= 1e-8
        # and it bounds H from below everywhere
        for _ in range(10):
            x = complex_gaussian(rng, *inst.x_shape)
            assert loewner_leq(result.inf_value, h_map(inst, x))


def _range_defect_weight():
    # W whose A-complement hugs R(A) below the rank cutoff, collapsing the
    # numerical range condition while B = I keeps the kernel condition true
    delta = 1e-12
    a = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    w = PsdWeight.from_matrix(np.array([[delta**2, -delta], [-delta, 2.0]]))
    c = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    return ProblemInstance(a, np.eye(2), c, w)


def test_order_min_infimum_only_branch():
    result = operator_order_min(_range_defect_weight())
    assert result.status is OrderStatus.INFIMUM_ONLY
    assert result.inf_value is not None
    assert result.manifold is None


def test_schatten_min_no_minimum_branch():
    result = schatten_min(_range_defect_weight())
    assert result.status is SolveStatus.NO_MINIMUM
    assert result.manifold is None and result.value is None


# ---------------------------------------------------------------------------
# normal residuals


def test_normal_residuals_on_counterexamples():
    inst3, x03 = example3_instance(2.0, 3.0)
    p2 = normal_residual_p2(inst3, x03)
    # adjoint of the form [[-a^2 + a^(2/(p-1)), 0], [same, 0]]; same norm
    assert np.linalg.norm(p2) == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-12)
    np.testing.assert_allclose(p2, np.array([[2.0, 2.0], [0.0, 0.0]]), atol=1e-12)

    inst3_p2, x03_p2 = example3_instance(2.0, 2.0)
    assert np.linalg.norm(normal_residual_p2(inst3_p2, x03_p2)) <= 1e-12

    # identity-weight 2x2 data: residual [[x, 0], [0, 0]], zero iff x = 0
    inst1 = example1_instance()
    rng = np.random.default_rng(49)
    for _ in range(5):
        x_mat = complex_gaussian(rng, 2, 2)
        expected = np.zeros((2, 2), dtype=complex)
        expected[0, 0] = x_mat[0, 0]
        np.testing.assert_allclose(normal_residual_p2(inst1, x_mat), expected, atol=1e-12)
    assert np.linalg.norm(normal_residual_p2(inst1, np.zeros((2, 2)))) <= 1e-14


# ---------------------------------------------------------------------------
# schatten_min


def test_schatten_min_counterexample_p2():
    result = schatten_min(example1_instance())
    assert result.status is SolveStatus.SOLVED
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.formula_value == pytest.approx(0.0, abs=1e-12)
    assert result.formula_agrees is False
    np.testing.assert_allclose(result.minimizer, np.zeros((2, 2)), atol=1e-12)
    # the p2 normal equation holds at the emitted minimizer
    inst = example1_instance()
    assert np.linalg.norm(normal_residual_p2(inst, result.minimizer)) <= 1e-10


def test_schatten_min_not_characterized():
    inst, _ = example3_instance(2.0, 3.0)
    result = schatten_min(inst)
    assert result.status is SolveStatus.NOT_CHARACTERIZED
    assert result.manifold is None and result.value is None


def test_schatten_min_feasible_agrees_with_formula():
    rng = np.random.default_rng(50)
    for _ in range(10):
        inst = random_feasible_instance(rng, 4, 3, 3, 4, rank_a=2, rank_b=2)
        result = schatten_min(inst)
        assert result.status is SolveStatus.SOLVED
        assert result.conditions.both
        assert result.formula_agrees
        oracle = brute_force_p2_oracle(inst)
        assert result.value == pytest.approx(oracle.value, abs=1e-9)


def test_schatten_min_unitary_data():
    rng = np.random.default_rng(51)
    a, _ = np.linalg.qr(complex_gaussian(rng, 3, 3))
    b, _ = np.linalg.qr(complex_gaussian(rng, 3, 3))
    c = complex_gaussian(rng, 3, 3)
    inst = ProblemInstance(a, b, c, PsdWeight.identity(3))
    result = schatten_min(inst)
    assert result.value == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(result.minimizer, a.conj().T @ c @ b.conj().T, atol=1e-9)


def test_schatten_min_manifold_has_constant_objective():
    rng = np.random.default_rng(52)
    inst = random_feasible_instance(rng, 5, 4, 3, 4, rank_a=3, rank_b=2, p=1.5)
    result = schatten_min(inst)
    base_order = h_map(inst, result.minimizer)
    for _ in range(20):
        x = result.manifold.map(complex_gaussian(rng, *inst.x_shape))
        for p in (1.0, 1.5, 2.0, 3.0):
            v = weighted_seminorm(inst.residual(x), inst.w, p)
            v0 = weighted_seminorm(inst.residual(result.minimizer), inst.w, p)
            assert v == pytest.approx(v0, abs=1e-8)
        np.testing.assert_allclose(h_map(inst, x), base_order, atol=1e-8)


def test_schatten_min_p2_kernel_violating_instances():
    # B rank-deficient and C generic: the strong condition fails but p = 2
    # still solves through the weaker normal equation
    rng = np.random.default_rng(53)
    for _ in range(10):
        inst = random_instance(rng, 4, 3, 3, 4, rank_b=2)
        report = check_conditions(inst.a, inst.b, inst.c, inst.w)
        result = schatten_min(inst)
        assert result.status is SolveStatus.SOLVED
        assert np.linalg.norm(normal_residual_p2(inst, result.minimizer)) <= 1e-8
        oracle = brute_force_p2_oracle(inst)
        assert result.value == pytest.approx(oracle.value, abs=1e-9)
        if not report.kernel_condition:
            # direct evaluation is authoritative; formula may disagree
            assert result.value >= oracle.value - 1e-9


# ---------------------------------------------------------------------------
# critical points


def test_critical_residual_counterexample():
    inst, x0 = example3_instance(2.0, 3.0)
    assert np.linalg.norm(critical_residual(inst, x0)) <= 1e-12
    # a generic point is far from critical
    rng = np.random.default_rng(54)
    x_bad = x0 + 0.5 * complex_gaussian(rng, 2, 2)
    assert np.linalg.norm(critical_residual(inst, x_bad)) > 1e-3


def test_critical_residual_on_manifold():
    rng = np.random.default_rng(55)
    for p in (1.5, 3.0):
        inst = random_feasible_instance(rng, 4, 3, 3, 4, rank_a=2, rank_b=2, p=p)
        result = schatten_min(inst)
        for _ in range(5):
            x = result.manifold.map(complex_gaussian(rng, *inst.x_shape))
            assert np.linalg.norm(critical_residual(inst, x)) <= 1e-9


def test_critical_residual_p_guard():
    inst = example1_instance()
    inst1 = ProblemInstance(inst.a, inst.b, inst.c, inst.w, p=1.0)
    with pytest.raises(ValueError):
        critical_residual(inst1, np.zeros((2, 2)))


# ---------------------------------------------------------------------------
# brute-force oracle


def test_oracle_counterexample():
    result = brute_force_p2_oracle(example1_instance())
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert abs(result.x_opt[0, 0]) <= 1e-12


def test_oracle_identity_data():
    rng = np.random.default_rng(56)
    c = complex_gaussian(rng, 3, 3)
    inst = ProblemInstance(np.eye(3), np.eye(3), c, PsdWeight.identity(3))
    result = brute_force_p2_oracle(inst)
    assert result.value == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(result.x_opt, c, atol=1e-10)


def test_oracle_bounds_random_points():
    rng = np.random.default_rng(57)
    inst = random_instance(rng, 4, 3, 3, 4)
    oracle = brute_force_p2_oracle(inst)
    for _ in range(20):
        x = complex_gaussian(rng, *inst.x_shape)
        assert oracle.value <= weighted_seminorm(inst.residual(x), inst.w, 2.0) + 1e-9


def test_oracle_size_guard():
    rng = np.random.default_rng(58)
    inst = random_instance(rng, 2, 2, 2, 2)
    with pytest.raises(ValueError):
        brute_force_p2_oracle(inst, max_unknowns=3)


# ---------------------------------------------------------------------------
# descent checks


def test_descent_check_at_counterexample_optimum():
    inst, x0 = example3_instance(2.0, 3.0)
    report = descent_check_fp(inst, x0, trials=100, rng_seed=7)
    assert report.min_derivative >= -1e-8
    assert report.all_nonnegative
    assert report.negative_count == 0


def test_descent_check_flags_non_optimum():
    inst, x0 = example3_instance(2.0, 3.0)
    rng = np.random.default_rng(59)
    x_bad = x0 + 0.5 * complex_gaussian(rng, 2, 2)
    report = descent_check_fp(inst, x_bad, trials=100, rng_seed=8)
    assert report.min_derivative < 0
    assert report.negative_count >= 1


def test_descent_zero_direction_is_zero():
    inst, x0 = example3_instance(2.0, 3.0)
    t0 = inst.w.sqrt_w @ inst.residual(x0)
    d = directional_derivative(t0, np.zeros_like(t0), inst.p, 1.234)
    assert d == 0.0


# ---------------------------------------------------------------------------
# generators


def test_generators_satisfy_claimed_conditions():
    rng = np.random.default_rng(60)
    for _ in range(10):
        inst = random_feasible_instance(rng, 5, 4, 3, 5, rank_a=2, rank_b=2, rank_w=3)
        report = check_conditions(inst.a, inst.b, inst.c, inst.w)
        assert report.both
    inst = random_instance(rng, 4, 3, 2, 4, rank_a=2, rank_b=1, rank_w=2)
    assert np.linalg.matrix_rank(inst.a, tol=1e-8) == 2
    assert np.linalg.matrix_rank(inst.b, tol=1e-8) == 1
    assert np.linalg.matrix_rank(inst.w.w, tol=1e-8) == 2
