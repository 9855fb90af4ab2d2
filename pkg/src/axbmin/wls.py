"""Weighted least-squares solutions, W-inverses, and existence conditions.

Given a PSD weight W, a W-least-squares solution of Az = x minimizes the
seminorm ||Az - x||_W.  One exists iff x lies in R(A) + R(A)^{perp_W} (which
is automatic in finite dimensions, though it is still verified numerically
here).  The W-inverse of A in R(B) collects W-LSS solutions for every column
of B; its solution set is the affine manifold

    (A*WA)^+ A*WB + { L : R(L) inside N(A*WA) },

equivalently the solutions of the normal equation A*W(AX - B) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_linalg import (
    DEFAULT_TOL,
    PsdWeight,
    SubspaceBasis,
    TolerancePolicy,
    as_matrix,
    as_vector,
    containment_residual,
    null_basis,
    pinv,
    range_basis,
    subspace_contains,
    subspace_sum,
    w_orthogonal_complement,
)

__all__ = [
    "ExistenceConditionError",
    "ConditionReport",
    "SolutionManifold",
    "range_plus_w_complement",
    "w_lss",
    "w_inverse",
    "check_conditions",
]


class ExistenceConditionError(RuntimeError):
    """The range condition backing a W-inverse failed numerically."""


@dataclass(frozen=True)
class SolutionManifold:
    """Affine solution set ``L -> particular + L - left_factor @ L @ right_factor``.

    ``map(0)`` is the canonical particular solution; every point of the
    manifold solves the governing normal equation.
    """

    particular: np.ndarray
    left_factor: np.ndarray
    right_factor: np.ndarray

    @property
    def shape(self):
        return self.particular.shape

    def map(self, l) -> np.ndarray:
        l = as_matrix(l)
        if l.shape != self.particular.shape:
            raise ValueError(
                f"parameter shape {l.shape} does not match solution shape "
                f"{self.particular.shape}"
            )
        return self.particular + l - self.left_factor @ l @ self.right_factor


@dataclass(frozen=True)
class ConditionReport:
    """The two hypotheses governing existence of a minimum for AXB vs C.

    range_condition: R(C) inside R(A) + R(A)^{perp_W}, decided by a rank test
    with ``range_residual`` = ||(I - P) C|| as the backing number.
    kernel_condition: N(B) inside N(A*WC), true iff
    ``kernel_residual`` = ||A*WC P_{N(B)}|| is at most ``tolerance``.
    """

    range_condition: bool
    kernel_condition: bool
    range_residual: float
    kernel_residual: float
    tolerance: float

    @property
    def both(self) -> bool:
        return self.range_condition and self.kernel_condition


def range_plus_w_complement(
    a, w: PsdWeight, tol: TolerancePolicy = DEFAULT_TOL
) -> SubspaceBasis:
    """The subspace R(A) + R(A)^{perp_W} of right-hand sides admitting a W-LSS."""
    ra = range_basis(a, tol)
    return subspace_sum(ra, w_orthogonal_complement(ra, w, tol), tol)


def w_lss(a, w: PsdWeight, x, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """W-least-squares solution u = (A*WA)^+ A*W x of Az = x."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[0] != x.shape[0] or a.shape[0] != w.dim:
        raise ValueError(
            f"dimension mismatch: A {a.shape}, W {w.dim}x{w.dim}, x {x.shape}"
        )
    awa = a.conj().T @ w.w @ a
    return pinv(awa, tol) @ (a.conj().T @ (w.w @ x))


def w_inverse(
    a, w: PsdWeight, b, tol: TolerancePolicy = DEFAULT_TOL
) -> SolutionManifold:
    """All W-inverses of A in R(B), i.e. the solutions of A*W(AX - B) = 0.

    The particular solution is (A*WA)^+ A*WB; the free directions are the
    matrices with range in N(A*WA).  Raises :class:`ExistenceConditionError`
    if the numerically verified containment R(B) in R(A) + R(A)^{perp_W}
    fails (it cannot, in exact finite-dimensional arithmetic).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] != b.shape[0] or a.shape[0] != w.dim:
        raise ValueError(
            f"dimension mismatch: A {a.shape}, W {w.dim}x{w.dim}, B {b.shape}"
        )
    span = range_plus_w_complement(a, w, tol)
    if not subspace_contains(span, range_basis(b, tol), tol):
        raise ExistenceConditionError(
            "R(B) is not contained in R(A) + R(A)^{perp_W}: "
            f"containment residual {containment_residual(span, b):.3e}"
        )
    awa = a.conj().T @ w.w @ a
    awa_pinv = pinv(awa, tol)
    particular = awa_pinv @ (a.conj().T @ (w.w @ b))
    return SolutionManifold(
        particular=particular,
        left_factor=awa_pinv @ awa,
        right_factor=np.eye(b.shape[1], dtype=np.complex128),
    )


def check_conditions(
    a, b, c, w: PsdWeight, tol: TolerancePolicy = DEFAULT_TOL
) -> ConditionReport:
    """Evaluate the range and kernel hypotheses for the AXB vs C problem."""
    a = as_matrix(a)
    b = as_matrix(b)
    c = as_matrix(c)
    if a.shape[0] != c.shape[0] or b.shape[1] != c.shape[1] or w.dim != a.shape[0]:
        raise ValueError(
            f"dimension mismatch: A {a.shape}, B {b.shape}, C {c.shape}, "
            f"W {w.dim}x{w.dim}"
        )
    span = range_plus_w_complement(a, w, tol)
    range_ok = subspace_contains(span, range_basis(c, tol), tol)
    range_residual = containment_residual(span, c)
    nb = null_basis(b, tol)
    kernel_residual = float(np.linalg.norm(a.conj().T @ w.w @ c @ nb.projector))
    return ConditionReport(
        range_condition=bool(range_ok),
        kernel_condition=bool(kernel_residual <= tol.residual_abs),
        range_residual=range_residual,
        kernel_residual=kernel_residual,
        tolerance=tol.residual_abs,
    )
