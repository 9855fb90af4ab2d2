"""Tests for Schatten norms, polar decomposition, and directional derivatives."""

import numpy as np
import pytest

from axbmin import (
    PsdWeight,
    complex_gaussian,
    directional_derivative,
    null_basis,
    polar,
    psd_power,
    random_rank_matrix,
    schatten_norm,
    weighted_seminorm,
)


def gp(t, p):
    # reference objective: ||T||_p^p for p > 1, ||T||_1 for p = 1
    return schatten_norm(t, p) ** p if p > 1 else schatten_norm(t, 1.0)


def test_schatten_norm_values():
    t = np.diag([3.0, 4.0])
    assert schatten_norm(t, 2.0) == pytest.approx(5.0)
    assert schatten_norm(t, 1.0) == pytest.approx(7.0)
    # residual of the rank-one frame counterexample at a=2, p=3
    c = np.diag([-1.0, 2.0])
    assert schatten_norm(c, 3.0) == pytest.approx(9.0 ** (1.0 / 3.0), abs=1e-12)
    assert schatten_norm(np.zeros((3, 2)), 1.5) == 0.0
    with pytest.raises(ValueError):
        schatten_norm(t, 0.5)


def test_weighted_seminorm():
    rng = np.random.default_rng(30)
    x = complex_gaussian(rng, 3, 3)
    eye = PsdWeight.identity(3)
    for p in (1.0, 1.5, 2.0, 3.0):
        assert weighted_seminorm(x, eye, p) == pytest.approx(schatten_norm(x, p))

    # a singular weight kills directions in its kernel
    w = PsdWeight.from_matrix(np.diag([1.0, 0.0]))
    e22 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    for p in (1.0, 2.0, 3.0):
        assert weighted_seminorm(e22, w, p) == pytest.approx(0.0, abs=1e-14)


def test_weighted_seminorm_trace_identity():
    rng = np.random.default_rng(31)
    for _ in range(10):
        x = complex_gaussian(rng, 4, 3)
        g = complex_gaussian(rng, 4, 4)
        w = PsdWeight.from_matrix(g @ g.conj().T)
        lhs = weighted_seminorm(x, w, 2.0) ** 2
        rhs = float(np.real(np.trace(x.conj().T @ w.w @ x)))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_polar_diagonal_cases():
    parts = polar(np.diag([-3.0, 0.0]))
    np.testing.assert_allclose(parts.u, np.diag([-1.0, 0.0]), atol=1e-12)
    np.testing.assert_allclose(parts.abs_t, np.diag([3.0, 0.0]), atol=1e-12)


def test_polar_unitary_input():
    rng = np.random.default_rng(32)
    q, _ = np.linalg.qr(complex_gaussian(rng, 4, 4))
    parts = polar(q)
    np.testing.assert_allclose(parts.u, q, atol=1e-10)
    np.testing.assert_allclose(parts.abs_t, np.eye(4), atol=1e-10)


def test_polar_counterexample_residual():
    # C = diag(-1, a^(2/(p-1))) at a=2, p=3 and its negative
    c = np.diag([-1.0, 2.0]).astype(complex)
    parts = polar(c)
    np.testing.assert_allclose(parts.u, np.diag([-1.0, 1.0]), atol=1e-12)
    np.testing.assert_allclose(parts.abs_t, np.diag([1.0, 2.0]), atol=1e-12)
    parts_neg = polar(-c)
    np.testing.assert_allclose(parts_neg.u, np.diag([1.0, -1.0]), atol=1e-12)
    np.testing.assert_allclose(parts_neg.abs_t, np.diag([1.0, 2.0]), atol=1e-12)


def test_polar_roundtrip_and_partial_isometry():
    rng = np.random.default_rng(33)
    for rows, cols, rank in [(4, 4, 4), (4, 4, 2), (5, 3, 2), (3, 5, 3)]:
        t = random_rank_matrix(rng, rows, cols, rank)
        parts = polar(t)
        np.testing.assert_allclose(parts.u @ parts.abs_t, t, atol=1e-10)
        # u*u is the projector onto the row space, i.e. N(T)^perp
        row_space = np.eye(cols) - null_basis(t).projector
        np.testing.assert_allclose(parts.u.conj().T @ parts.u, row_space, atol=1e-9)
        # abs_t = (T*T)^(1/2)
        np.testing.assert_allclose(
            parts.abs_t @ parts.abs_t, t.conj().T @ t, atol=1e-9
        )


def test_psd_power_clamps_dust():
    rng = np.random.default_rng(34)
    q, _ = np.linalg.qr(complex_gaussian(rng, 3, 3))
    h = (q * np.array([4.0, 1.0, 0.0])) @ q.conj().T
    half = psd_power(h, 0.5)
    np.testing.assert_allclose(half @ half, h, atol=1e-9)
    # the zero eigenvalue stays exactly zero rather than becoming dust^0.5
    kernel_vec = q[:, 2]
    assert np.linalg.norm(half @ kernel_vec) <= 1e-9
    with pytest.raises(ValueError):
        psd_power(h, 0.0)


def test_directional_derivative_simple_values():
    eye = np.eye(2, dtype=complex)
    # d/dh ||(1+h) I||_2^2 at h=0 is 4
    assert directional_derivative(eye, eye, 2.0, 0.0) == pytest.approx(4.0)

    x = np.diag([1.0, 0.0]).astype(complex)
    y = np.diag([0.0, 1.0]).astype(complex)
    # trace term vanishes, the kernel block contributes ||diag(0,1)||_1 = 1
    assert directional_derivative(x, y, 1.0, 0.0) == pytest.approx(1.0)


def test_directional_derivative_along_itself():
    rng = np.random.default_rng(35)
    x = complex_gaussian(rng, 3, 3)
    for p in (1.5, 2.0, 3.0):
        expected = -p * schatten_norm(x, p) ** p
        assert directional_derivative(x, x, p, np.pi) == pytest.approx(expected, rel=1e-9)


def test_directional_derivative_guards():
    x = np.eye(2, dtype=complex)
    with pytest.raises(ValueError):
        directional_derivative(x, x, 0.9, 0.0)
    with pytest.raises(ValueError):
        directional_derivative(x, np.eye(3, dtype=complex), 2.0, 0.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_directional_derivative_finite_differences(p):
    """One-sided finite differences agree to O(h), with first-order decay."""
    rng = np.random.default_rng(36)
    n = 3
    for trial in range(12):
        if p == 1.0 and trial % 2 == 0:
            x = random_rank_matrix(rng, n, n, 2)
        else:
            x = random_rank_matrix(rng, n, n, n)
        x /= np.linalg.norm(x)
        y = complex_gaussian(rng, n, n)
        y /= np.linalg.norm(y)
        for phi in (0.0, np.pi / 2, np.pi, 3 * np.pi / 2):
            d = directional_derivative(x, y, p, phi)
            errs = {}
            for h in (1e-4, 1e-5):
                fd = (gp(x + h * np.exp(1j * phi) * y, p) - gp(x, p)) / h
                errs[h] = abs(fd - d)
                assert errs[h] <= 10.0 * h
            # first-order convergence, up to a rounding floor
            assert errs[1e-5] <= 0.5 * errs[1e-4] + 1e-9


def test_derivative_of_norm_bounded_by_direction():
    # for f = ||.||_p the one-sided derivative satisfies |D f| <= ||y||_p
    rng = np.random.default_rng(37)
    for _ in range(10):
        x = random_rank_matrix(rng, 3, 3, 3)
        y = complex_gaussian(rng, 3, 3)
        phi = rng.uniform(0.0, 2 * np.pi)
        for p in (1.0, 1.5, 2.0, 3.0):
            d_gp = directional_derivative(x, y, p, phi)
            if p == 1.0:
                d_norm = d_gp
            else:
                # chain rule through G_p = f^p at f(x) != 0
                d_norm = d_gp / (p * schatten_norm(x, p) ** (p - 1.0))
            assert abs(d_norm) <= schatten_norm(y, p) + 1e-9
