"""Minimization of AXB - C in the semidefinite order and in Schatten norms.

Two intertwined problems over complex matrices, for a PSD weight W:

* operator order: minimize H(X) = (AXB-C)* W (AXB-C) over the PSD cone
  ordering.  A minimum exists iff R(C) is contained in R(A) + R(A)^{perp_W}
  and N(B) is contained in N(A*WC); it then equals C* W_{/R(A)} C (shorted
  operator of W to R(A)), attained exactly on the affine manifold

      (A*WA)^+ A*WC B^+  +  L - (A*WA)^+ A*WA L BB^+ ,

  which is also the solution set of the normal equation A*W(AXB-C) = 0.
  When only the kernel condition holds the infimum still exists with the same
  value; when it fails nothing is claimed (an infimum may still exist, see
  the classic 2x2 counterexample reproduced in the CLI and tests).

* Schatten norm: minimize ||AXB - C||_{p,W} = ||W^{1/2}(AXB-C)||_p.  Under
  the kernel condition the minimizers are the same manifold for every p and
  the value is ||W_{/R(A)}^{1/2} C||_p.  Without it, p = 2 is still solvable
  through the weaker normal equation A*W(AXB-C)B* = 0 (same manifold
  formula), but the closed-form value can disagree with the true minimum, so
  the solver always reports the directly evaluated residual norm and flags
  any disagreement with the formula.  For p != 2 without the kernel
  condition no equation characterizes the minimizers (a critical point of
  F_p need not solve the p = 2 normal equation), and the solver returns a
  "not characterized" status instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core_linalg import (
    DEFAULT_TOL,
    PsdWeight,
    TolerancePolicy,
    as_matrix,
    complex_gaussian,
    hermitian_part,
    null_basis,
    pinv,
    psd_sqrt,
    range_basis,
    subspace_contains,
    containment_residual,
)
from .schatten import directional_derivative, polar, psd_power, schatten_norm, weighted_seminorm
from .shorted import shorted_operator
from .wls import ConditionReport, SolutionManifold, check_conditions

__all__ = [
    "ProblemInstance",
    "OrderStatus",
    "SolveStatus",
    "OrderMinResult",
    "SchattenMinResult",
    "ExactSolveResult",
    "OracleResult",
    "DescentReport",
    "h_map",
    "solve_axb_exact",
    "operator_order_min",
    "normal_residual_full",
    "normal_residual_p2",
    "schatten_min",
    "critical_residual",
    "brute_force_p2_oracle",
    "descent_check_fp",
    "random_rank_matrix",
    "random_psd_weight",
    "random_instance",
    "random_feasible_instance",
]


@dataclass(frozen=True)
class ProblemInstance:
    """One AXB vs C problem: matrices A, B, C, a PSD weight W, and an exponent p.

    Shapes: A is m x n, B is q x l, C is m x l, W is m x m; the unknown X is
    then n x q.  Rectangular data is fully supported.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    w: PsdWeight
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_matrix(self.a))
        object.__setattr__(self, "b", as_matrix(self.b))
        object.__setattr__(self, "c", as_matrix(self.c))
        if not isinstance(self.w, PsdWeight):
            raise TypeError("w must be a PsdWeight (validate raw matrices once at the boundary)")
        if self.a.shape[0] != self.c.shape[0] or self.b.shape[1] != self.c.shape[1]:
            raise ValueError(
                f"A X B and C are incompatible: A {self.a.shape}, "
                f"B {self.b.shape}, C {self.c.shape}"
            )
        if self.w.dim != self.a.shape[0]:
            raise ValueError(
                f"W must act on the target space: W {self.w.dim}x{self.w.dim}, "
                f"A {self.a.shape}"
            )
        if self.p < 1:
            raise ValueError(f"p must be at least 1, got {self.p}")

    @property
    def x_shape(self):
        return (self.a.shape[1], self.b.shape[0])

    def residual(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != self.x_shape:
            raise ValueError(f"X must have shape {self.x_shape}, got {x.shape}")
        return self.a @ x @ self.b - self.c


class OrderStatus(Enum):
    MINIMUM_EXISTS = "MinimumExists"
    INFIMUM_ONLY = "InfimumOnly"
    INFIMUM_UNKNOWN = "InfimumUnknown"


class SolveStatus(Enum):
    SOLVED = "Solved"
    NO_MINIMUM = "NoMinimum"
    NOT_CHARACTERIZED = "NotCharacterized"


@dataclass(frozen=True)
class OrderMinResult:
    """Outcome of the operator-order minimization.

    ``manifold`` is present iff the minimum exists; ``inf_value`` is
    C* W_{/R(A)} C whenever the infimum is known (minimum or kernel-only).
    """

    status: OrderStatus
    conditions: ConditionReport
    manifold: SolutionManifold | None
    inf_value: np.ndarray | None


@dataclass(frozen=True)
class SchattenMinResult:
    """Outcome of the weighted Schatten-norm minimization.

    ``value`` is always the directly evaluated residual norm
    ||W^{1/2}(A X0 B - C)||_p at the canonical minimizer X0 = manifold.map(0).
    ``formula_value`` is the closed-form ||W_{/R(A)}^{1/2} C||_p;
    ``formula_agrees`` flags whether the two coincide within tolerance (they
    can genuinely disagree when the kernel condition fails).
    """

    status: SolveStatus
    p: float
    conditions: ConditionReport
    manifold: SolutionManifold | None = None
    minimizer: np.ndarray | None = None
    value: float | None = None
    formula_value: float | None = None
    formula_agrees: bool | None = None


@dataclass(frozen=True)
class ExactSolveResult:
    """Solvability of AXB = C: range tests and, if solvable, all solutions."""

    solvable: bool
    manifold: SolutionManifold | None
    range_c_in_a_residual: float
    range_cstar_in_bstar_residual: float


@dataclass(frozen=True)
class OracleResult:
    value: float
    x_opt: np.ndarray


@dataclass(frozen=True)
class DescentReport:
    """Sampled one-sided derivatives of F_p at a candidate point.

    At a global minimum every sampled derivative is non-negative (up to
    tolerance); a clearly negative sample certifies non-optimality.
    """

    trials: int
    values: np.ndarray
    min_derivative: float
    negative_count: int
    tolerance: float

    @property
    def all_nonnegative(self) -> bool:
        return bool(self.min_derivative >= -self.tolerance)


def h_map(inst: ProblemInstance, x) -> np.ndarray:
    """The Hermitian PSD objective H(X) = (AXB-C)* W (AXB-C)."""
    r = inst.residual(x)
    return hermitian_part(r.conj().T @ inst.w.w @ r)


def solve_axb_exact(a, b, c, tol: TolerancePolicy = DEFAULT_TOL) -> ExactSolveResult:
    """Exact solvability of AXB = C and, when solvable, the solution manifold.

    Solvable iff R(C) is contained in R(A) and R(C*) in R(B*); the general
    solution is then A^+ C B^+ + L - A^+ A L B B^+.  An unsolvable instance
    is reported in the result, not raised.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    c = as_matrix(c)
    if a.shape[0] != c.shape[0] or b.shape[1] != c.shape[1]:
        raise ValueError(
            f"A X B and C are incompatible: A {a.shape}, B {b.shape}, C {c.shape}"
        )
    ra = range_basis(a, tol)
    rbs = range_basis(b.conj().T, tol)
    c_ok = subspace_contains(ra, range_basis(c, tol), tol)
    cs_ok = subspace_contains(rbs, range_basis(c.conj().T, tol), tol)
    res_a = containment_residual(ra, c)
    res_b = containment_residual(rbs, c.conj().T)
    if not (c_ok and cs_ok):
        return ExactSolveResult(False, None, res_a, res_b)
    a_pinv = pinv(a, tol)
    b_pinv = pinv(b, tol)
    manifold = SolutionManifold(
        particular=a_pinv @ c @ b_pinv,
        left_factor=a_pinv @ a,
        right_factor=b @ b_pinv,
    )
    return ExactSolveResult(True, manifold, res_a, res_b)


def _weighted_normal_manifold(inst: ProblemInstance, tol: TolerancePolicy) -> SolutionManifold:
    # particular (A*WA)^+ A*WC B^+ with factors (A*WA)^+ A*WA and B B^+
    awa = inst.a.conj().T @ inst.w.w @ inst.a
    awa_pinv = pinv(awa, tol)
    b_pinv = pinv(inst.b, tol)
    return SolutionManifold(
        particular=awa_pinv @ inst.a.conj().T @ inst.w.w @ inst.c @ b_pinv,
        left_factor=awa_pinv @ awa,
        right_factor=inst.b @ b_pinv,
    )


def shorted_to_range_of_a(inst: ProblemInstance, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """W_{/R(A)}, the shorted operator of the weight to the range of A."""
    return shorted_operator(inst.w, range_basis(inst.a, tol), tol).shorted


def operator_order_min(inst: ProblemInstance, tol: TolerancePolicy = DEFAULT_TOL) -> OrderMinResult:
    """Minimize H(X) in the semidefinite order.

    Status taxonomy: both conditions hold, the minimum exists and is
    attained on the returned manifold; kernel condition only, the infimum
    exists (value C* W_{/R(A)} C) but no minimum; kernel condition fails,
    nothing is claimed either way.
    """
    report = check_conditions(inst.a, inst.b, inst.c, inst.w, tol)
    if not report.kernel_condition:
        return OrderMinResult(OrderStatus.INFIMUM_UNKNOWN, report, None, None)
    inf_value = hermitian_part(
        inst.c.conj().T @ shorted_to_range_of_a(inst, tol) @ inst.c
    )
    if not report.range_condition:
        return OrderMinResult(OrderStatus.INFIMUM_ONLY, report, None, inf_value)
    manifold = _weighted_normal_manifold(inst, tol)
    return OrderMinResult(OrderStatus.MINIMUM_EXISTS, report, manifold, inf_value)


def normal_residual_full(inst: ProblemInstance, x) -> np.ndarray:
    """Residual of the strong normal equation, A*W(AXB - C)."""
    return inst.a.conj().T @ inst.w.w @ inst.residual(x)


def normal_residual_p2(inst: ProblemInstance, x) -> np.ndarray:
    """Residual of the Frobenius-type normal equation, A*W(AXB - C)B*."""
    return normal_residual_full(inst, x) @ inst.b.conj().T


def schatten_min(inst: ProblemInstance, tol: TolerancePolicy = DEFAULT_TOL) -> SchattenMinResult:
    """Minimize ||AXB - C||_{p,W} where the theory licenses a closed form.

    Kernel condition true: solvable iff the range condition also holds (it
    always does in finite dimensions); the manifold minimizes for every p.
    Kernel condition false and p = 2: the weaker normal equation
    A*W(AXB-C)B* = 0 is always solvable and the same manifold formula yields
    its solutions.  Kernel condition false and p != 2: not characterized.

    The reported ``value`` is always the direct evaluation at map(0); the
    closed-form ``formula_value`` is reported alongside with an agreement
    flag, since the two provably differ on some kernel-violating instances.
    """
    report = check_conditions(inst.a, inst.b, inst.c, inst.w, tol)
    if report.kernel_condition:
        if not report.range_condition:
            return SchattenMinResult(SolveStatus.NO_MINIMUM, inst.p, report)
    elif inst.p != 2.0:
        return SchattenMinResult(SolveStatus.NOT_CHARACTERIZED, inst.p, report)
    manifold = _weighted_normal_manifold(inst, tol)
    x0 = manifold.particular
    direct = weighted_seminorm(inst.residual(x0), inst.w, inst.p)
    formula = schatten_norm(psd_sqrt(shorted_to_range_of_a(inst, tol), tol) @ inst.c, inst.p)
    agrees = bool(abs(direct - formula) <= tol.residual_abs * max(1.0, direct, formula))
    return SchattenMinResult(
        status=SolveStatus.SOLVED,
        p=inst.p,
        conditions=report,
        manifold=manifold,
        minimizer=x0,
        value=direct,
        formula_value=formula,
        formula_agrees=agrees,
    )


def critical_residual(inst: ProblemInstance, x, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Global-optimality residual B |T|^{p-1} U* W^{1/2} A for p > 1.

    T = W^{1/2}(AXB - C) with polar decomposition T = U|T|, N(U) = N(T).
    X is a global minimum of F_p(X) = ||AXB - C||_{p,W}^p iff this matrix
    vanishes; no kernel hypothesis is needed.
    """
    if inst.p <= 1:
        raise ValueError(f"the critical-point equation needs p > 1, got p={inst.p}")
    t = inst.w.sqrt_w @ inst.residual(x)
    parts = polar(t, tol)
    power = psd_power(parts.abs_t, inst.p - 1.0, tol)
    return inst.b @ power @ parts.u.conj().T @ inst.w.sqrt_w @ inst.a


def brute_force_p2_oracle(
    inst: ProblemInstance,
    tol: TolerancePolicy = DEFAULT_TOL,
    max_unknowns: int = 10_000,
) -> OracleResult:
    """Independent p = 2 oracle: flatten X and solve one linear least squares.

    Stacking X column-major turns W^{1/2} A X B into
    (B^T kron W^{1/2} A) vec(X); the minimum of the Frobenius objective and a
    minimizer then come straight from the pseudoinverse of that design
    matrix.  Intended to cross-check the closed-form solver at desk scale.
    """
    n, q = inst.x_shape
    if n * q > max_unknowns:
        raise ValueError(f"oracle size guard exceeded: {n * q} unknowns > {max_unknowns}")
    wa = inst.w.sqrt_w @ inst.a
    rhs = (inst.w.sqrt_w @ inst.c).flatten(order="F")
    if n * q == 0:
        return OracleResult(float(np.linalg.norm(rhs)), np.zeros((n, q), dtype=np.complex128))
    design = np.kron(inst.b.T, wa)
    vec = pinv(design, tol) @ rhs
    value = float(np.linalg.norm(design @ vec - rhs))
    return OracleResult(value, vec.reshape((n, q), order="F"))


def descent_check_fp(
    inst: ProblemInstance,
    x0,
    trials: int,
    rng_seed: int,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> DescentReport:
    """Sample one-sided derivatives of F_p at x0 over random directions/angles.

    Each sample evaluates the derivative of G_p at W^{1/2}(A x0 B - C) along
    W^{1/2} A Y B for a random Y and a random angle.  At a global minimum
    every sample is non-negative; the report records the worst one.
    """
    if inst.p <= 1:
        raise ValueError(f"descent check needs p > 1, got p={inst.p}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    x0 = as_matrix(x0)
    t0 = inst.w.sqrt_w @ inst.residual(x0)
    rng = np.random.default_rng(rng_seed)
    values = np.empty(trials)
    for i in range(trials):
        y = complex_gaussian(rng, *inst.x_shape)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        values[i] = directional_derivative(
            t0, inst.w.sqrt_w @ inst.a @ y @ inst.b, inst.p, phi, tol
        )
    return DescentReport(
        trials=trials,
        values=values,
        min_derivative=float(values.min()),
        negative_count=int(np.count_nonzero(values < -tol.residual_abs)),
        tolerance=tol.residual_abs,
    )


def random_rank_matrix(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    rank: int,
    s_range: tuple[float, float] = (0.5, 2.0),
) -> np.ndarray:
    """Random complex matrix with prescribed rank and singular values in s_range."""
    if rank > min(rows, cols):
        raise ValueError(f"rank {rank} exceeds min{rows, cols}")
    if rank == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    q1, _ = np.linalg.qr(complex_gaussian(rng, rows, rank))
    q2, _ = np.linalg.qr(complex_gaussian(rng, cols, rank))
    s = rng.uniform(s_range[0], s_range[1], rank)
    return (q1 * s) @ q2.conj().T


def random_psd_weight(
    rng: np.random.Generator,
    n: int,
    rank: int | None = None,
    eig_range: tuple[float, float] = (0.5, 2.0),
    tol: TolerancePolicy = DEFAULT_TOL,
) -> PsdWeight:
    """Random PSD weight with prescribed rank and eigenvalues in eig_range."""
    if rank is None:
        rank = n
    if rank > n:
        raise ValueError(f"rank {rank} exceeds dimension {n}")
    if rank == 0:
        return PsdWeight.from_matrix(np.zeros((n, n), dtype=np.complex128), tol)
    q, _ = np.linalg.qr(complex_gaussian(rng, n, rank))
    eigs = rng.uniform(eig_range[0], eig_range[1], rank)
    return PsdWeight.from_matrix(hermitian_part((q * eigs) @ q.conj().T), tol)


def random_instance(
    rng: np.random.Generator,
    m: int,
    n: int,
    q: int,
    l: int,
    rank_a: int | None = None,
    rank_b: int | None = None,
    rank_w: int | None = None,
    p: float = 2.0,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ProblemInstance:
    """Generic random instance (no feasibility guarantees)."""
    a = random_rank_matrix(rng, m, n, min(m, n) if rank_a is None else rank_a)
    b = random_rank_matrix(rng, q, l, min(q, l) if rank_b is None else rank_b)
    c = complex_gaussian(rng, m, l)
    w = random_psd_weight(rng, m, rank_w, tol=tol)
    return ProblemInstance(a, b, c, w, p)


def random_feasible_instance(
    rng: np.random.Generator,
    m: int,
    n: int,
    q: int,
    l: int,
    rank_a: int | None = None,
    rank_b: int | None = None,
    rank_w: int | None = None,
    p: float = 2.0,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ProblemInstance:
    """Random instance satisfying both existence conditions by construction.

    Take C = A R B + K S with the columns of K spanning N(A*W) and R, S
    random.  Then A*WC = A*WARB, so N(B) lands in N(A*WC), and R(C) lies in
    R(A) + R(A)^{perp_W} because N(A*W) = R(A)^{perp_W}.
    """
    a = random_rank_matrix(rng, m, n, min(m, n) if rank_a is None else rank_a)
    b = random_rank_matrix(rng, q, l, min(q, l) if rank_b is None else rank_b)
    w = random_psd_weight(rng, m, rank_w, tol=tol)
    c = a @ complex_gaussian(rng, n, q) @ b
    k = null_basis(a.conj().T @ w.w, tol).basis
    if k.shape[1]:
        c = c + k @ complex_gaussian(rng, k.shape[1], l)
    return ProblemInstance(a, b, c, w, p)
