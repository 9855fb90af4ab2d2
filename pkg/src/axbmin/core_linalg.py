"""Dense complex linear algebra with a shared tolerance policy.

Everything downstream (shorted operators, weighted least squares, Schatten
norm solvers) reduces to a handful of primitives collected here: an SVD-backed
pseudoinverse, orthonormal subspace bases with their projectors, subspace
arithmetic, and positivity tests in the semidefinite (Loewner) order.  All
functions are pure and operate on immutable complex128 arrays; rank decisions
everywhere go through one relative singular-value cutoff so that containment
and equality of subspaces are reproducible rank/residual statements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DecompositionError",
    "NotPsdError",
    "TolerancePolicy",
    "DEFAULT_TOL",
    "SubspaceBasis",
    "PsdWeight",
    "as_matrix",
    "as_vector",
    "hermitian_part",
    "complex_gaussian",
    "svd",
    "pinv",
    "matrix_rank",
    "range_basis",
    "null_basis",
    "orthogonal_complement",
    "subspace_sum",
    "subspace_contains",
    "containment_residual",
    "w_orthogonal_complement",
    "is_psd",
    "loewner_leq",
    "psd_sqrt",
]


class DecompositionError(RuntimeError):
    """A matrix decomposition backend failed to converge."""


class NotPsdError(ValueError):
    """A matrix required to be positive semidefinite is not."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds shared by every rank and positivity decision.

    A singular value sigma_i counts toward the rank iff
    ``sigma_i > rank_rel * sigma_max * max(rows, cols)``.  Residual norms at or
    below ``residual_abs`` are treated as zero.  ``psd_tol`` (non-positive) is
    the relative eigenvalue floor for positivity: a Hermitian matrix passes the
    semidefinite test iff its smallest eigenvalue is at least
    ``psd_tol * spectral_norm``.
    """

    rank_rel: float = 1e-10
    residual_abs: float = 1e-8
    psd_tol: float = -1e-10

    def __post_init__(self):
        if not self.rank_rel > 0:
            raise ValueError("rank_rel must be strictly positive")
        if not self.residual_abs > 0:
            raise ValueError("residual_abs must be strictly positive")
        if self.psd_tol > 0:
            raise ValueError("psd_tol must be non-positive")

    def rank_cutoff(self, largest: float, shape) -> float:
        """Singular-value cutoff for a matrix of the given shape."""
        return self.rank_rel * float(largest) * max(max(shape), 1)

    def psd_floor(self, spectral_norm: float) -> float:
        """Smallest admissible eigenvalue for a PSD matrix of the given norm."""
        return self.psd_tol * float(spectral_norm)


DEFAULT_TOL = TolerancePolicy()


def as_matrix(a) -> np.ndarray:
    """Validate ``a`` as a finite 2-D matrix and return it as complex128."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


def as_vector(x) -> np.ndarray:
    """Validate ``x`` as a finite 1-D vector and return it as complex128."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={v.ndim}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite (no NaN/Inf)")
    return v


def hermitian_part(t) -> np.ndarray:
    """(T + T*)/2; absorbs round-off before any eigen-analysis."""
    t = as_matrix(t)
    return 0.5 * (t + t.conj().T)


def complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian matrix (unit-variance entries)."""
    return (
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    ) / np.sqrt(2.0)


def svd(t):
    """Thin SVD ``t = left @ diag(sigma) @ right.conj().T``.

    Returns
    -------
    left : (m, k) ndarray with orthonormal columns
    sigma : (k,) non-negative reals, descending, k = min(m, n)
    right : (n, k) ndarray with orthonormal columns
    """
    t = as_matrix(t)
    if min(t.shape) == 0:
        m, n = t.shape
        return (
            np.zeros((m, 0), dtype=np.complex128),
            np.zeros(0),
            np.zeros((n, 0), dtype=np.complex128),
        )
    try:
        u, s, vh = np.linalg.svd(t, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc
    return u, s, vh.conj().T


def matrix_rank(t, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """Numerical rank under the shared relative cutoff."""
    t = as_matrix(t)
    if min(t.shape) == 0:
        return 0
    _, s, _ = svd(t)
    return int(np.count_nonzero(s > tol.rank_cutoff(s[0], t.shape)))


def pinv(t, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the shared rank cutoff."""
    t = as_matrix(t)
    if min(t.shape) == 0:
        return np.zeros((t.shape[1], t.shape[0]), dtype=np.complex128)
    u, s, v = svd(t)
    cutoff = tol.rank_cutoff(s[0], t.shape)
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (v * inv) @ u.conj().T


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace carried as an orthonormal basis plus its projector.

    ``basis`` has orthonormal columns spanning the subspace; ``projector`` is
    the Hermitian idempotent ``basis @ basis*``.  A zero-dimensional subspace
    has a ``(n, 0)`` basis and the zero projector.
    """

    ambient_dim: int
    basis: np.ndarray
    projector: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_orthonormal(cls, basis) -> "SubspaceBasis":
        basis = as_matrix(basis)
        return cls(basis.shape[0], basis, basis @ basis.conj().T)


def range_basis(t, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column space R(T)."""
    t = as_matrix(t)
    u, s, _ = svd(t)
    r = 0
    if s.size:
        r = int(np.count_nonzero(s > tol.rank_cutoff(s[0], t.shape)))
    return SubspaceBasis.from_orthonormal(u[:, :r])


def null_basis(t, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the kernel N(T) inside the domain space."""
    t = as_matrix(t)
    m, n = t.shape
    if n == 0:
        return SubspaceBasis.from_orthonormal(np.zeros((0, 0), dtype=np.complex128))
    if m == 0:
        return SubspaceBasis.from_orthonormal(np.eye(n, dtype=np.complex128))
    try:
        _, s, vh = np.linalg.svd(t, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD did not converge: {exc}") from exc
    r = 0
    if s.size:
        r = int(np.count_nonzero(s > tol.rank_cutoff(s[0], t.shape)))
    return SubspaceBasis.from_orthonormal(vh[r:].conj().T)


def orthogonal_complement(s: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """The ordinary orthogonal complement of a subspace."""
    return null_basis(s.basis.conj().T, tol)


def subspace_sum(
    s1: SubspaceBasis, s2: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL
) -> SubspaceBasis:
    """Orthonormal basis of S1 + S2 (concatenate and re-orthonormalize)."""
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError(
            f"ambient dimension mismatch: {s1.ambient_dim} vs {s2.ambient_dim}"
        )
    return range_basis(np.hstack([s1.basis, s2.basis]), tol)


def containment_residual(space: SubspaceBasis, columns) -> float:
    """Frobenius norm of the part of ``columns`` outside ``space``."""
    columns = as_matrix(columns)
    return float(np.linalg.norm(columns - space.projector @ columns))


def subspace_contains(
    outer: SubspaceBasis, inner: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL
) -> bool:
    """Rank test for ``inner`` being a subspace of ``outer``."""
    return subspace_sum(outer, inner, tol).dim == outer.dim


def _check_hermitian(t: np.ndarray, tol: TolerancePolicy, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(t)))
    if np.linalg.norm(t - t.conj().T) > tol.residual_abs * scale:
        raise ValueError(f"{what} must be Hermitian (within tolerance)")


def is_psd(t, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Decide positive semidefiniteness of a (near-)Hermitian square matrix.

    The input is symmetrized before the eigenvalue analysis; the test accepts
    the matrix iff the smallest eigenvalue is at least
    ``psd_tol * spectral_norm``.
    """
    t = as_matrix(t)
    if t.shape[0] != t.shape[1]:
        raise ValueError(f"positivity test needs a square matrix, got {t.shape}")
    if t.shape[0] == 0:
        return True
    _check_hermitian(t, tol, "positivity test input")
    h = hermitian_part(t)
    try:
        eigs = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc
    spectral = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    return bool(eigs[0] >= tol.psd_floor(spectral))


def loewner_leq(t1, t2, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """T1 <= T2 in the semidefinite order, i.e. T2 - T1 is PSD."""
    return is_psd(as_matrix(t2) - as_matrix(t1), tol)


def psd_sqrt(w, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues below the shared rank cutoff (including negative dust above
    the ``psd_tol`` floor) are treated as exact zeros before taking roots;
    otherwise dust at eps scale would surface as sqrt(eps)-scale singular
    values of the root.  Anything below the floor raises
    :class:`NotPsdError`.
    """
    w = as_matrix(w)
    if w.shape[0] != w.shape[1]:
        raise ValueError(f"square root needs a square matrix, got {w.shape}")
    if w.shape[0] == 0:
        return w.copy()
    _check_hermitian(w, tol, "psd_sqrt input")
    h = hermitian_part(w)
    try:
        eigs, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc
    spectral = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if eigs[0] < tol.psd_floor(spectral):
        raise NotPsdError(
            f"matrix is not PSD: smallest eigenvalue {eigs[0]:.3e} "
            f"below floor {tol.psd_floor(spectral):.3e}"
        )
    cleaned = np.where(eigs > tol.rank_cutoff(spectral, w.shape), eigs, 0.0)
    root = np.sqrt(cleaned)
    return hermitian_part((vecs * root) @ vecs.conj().T)


@dataclass(frozen=True)
class PsdWeight:
    """A validated PSD weight together with its principal square root."""

    w: np.ndarray
    sqrt_w: np.ndarray

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_matrix(cls, w, tol: TolerancePolicy = DEFAULT_TOL) -> "PsdWeight":
        """Validate PSD-ness and cache the square root; raises NotPsdError."""
        w = as_matrix(w)
        if w.shape[0] != w.shape[1]:
            raise NotPsdError(f"weight must be square, got {w.shape}")
        try:
            _check_hermitian(w, tol, "weight")
        except ValueError as exc:
            raise NotPsdError(str(exc)) from exc
        h = hermitian_part(w)
        return cls(h, psd_sqrt(h, tol))

    @classmethod
    def identity(cls, n: int) -> "PsdWeight":
        eye = np.eye(n, dtype=np.complex128)
        return cls(eye, eye.copy())


def w_orthogonal_complement(
    s: SubspaceBasis, w: PsdWeight, tol: TolerancePolicy = DEFAULT_TOL
) -> SubspaceBasis:
    """W-orthogonal complement of S: all x with <Wx, y> = 0 for y in S.

    Equals the kernel of ``basis_S* W``, i.e. the preimage of the ordinary
    complement under W.  For W = I this is the ordinary complement; for W = 0
    it is the whole space.
    """
    if s.ambient_dim != w.dim:
        raise ValueError(
            f"ambient dimension mismatch: subspace {s.ambient_dim}, weight {w.dim}"
        )
    return null_basis(s.basis.conj().T @ w.w, tol)
