"""Shorted operator and compression of a PSD matrix to a closed subspace.

For a PSD weight W and a subspace S, the shorted operator W_{/S} is the
largest PSD matrix X with X <= W and R(X) inside the orthogonal complement of
S.  In finite dimensions it equals the generalized Schur complement of the
S-block of W: writing W in an orthonormal basis [U | V] of S and its
complement,

    W_{/S} = V (W22 - W12* W11^+ W12) V*,       W_S = W - W_{/S},

where W11 = U*WU, W12 = U*WV, W22 = V*WV and ^+ is the Moore-Penrose inverse.
The compression W_S is the complementary part.  W_{/S} is also the infimum of
E*WE over all oblique projections E with kernel S, which is what
``shorted_infimum_witness`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_linalg import (
    DEFAULT_TOL,
    PsdWeight,
    SubspaceBasis,
    TolerancePolicy,
    complex_gaussian,
    hermitian_part,
    null_basis,
    orthogonal_complement,
    pinv,
    w_orthogonal_complement,
)

__all__ = [
    "PsdWeight",
    "ShortedPair",
    "InfimumWitnessReport",
    "ShortedPropertyReport",
    "shorted_operator",
    "random_null_projection",
    "shorted_infimum_witness",
    "shorted_kernel_range_check",
]


@dataclass(frozen=True)
class ShortedPair:
    """Shorted operator W_{/S} and compression W_S = W - W_{/S}."""

    shorted: np.ndarray
    compression: np.ndarray


def shorted_operator(
    w: PsdWeight, s: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL
) -> ShortedPair:
    """Schur-complement computation of the shorted operator of W to S."""
    if w.dim != s.ambient_dim:
        raise ValueError(
            f"dimension mismatch: weight {w.dim}, subspace ambient {s.ambient_dim}"
        )
    u = s.basis
    v = orthogonal_complement(s, tol).basis
    w11 = u.conj().T @ w.w @ u
    w12 = u.conj().T @ w.w @ v
    w22 = v.conj().T @ w.w @ v
    schur = hermitian_part(w22 - w12.conj().T @ pinv(w11, tol) @ w12)
    # the exact complement is PSD with rank at most dim(S-perp); remove the
    # eigenvalue dust of the pinv arithmetic (positive dust would otherwise
    # surface as sqrt-scale singular values downstream, e.g. 1e-16 -> 1e-8)
    eigs, vecs = np.linalg.eigh(schur)
    w_scale = float(np.linalg.norm(w.w, 2))
    cleaned = np.where(eigs > tol.rank_cutoff(w_scale, w.w.shape), eigs, 0.0)
    shorted = hermitian_part(v @ ((vecs * cleaned) @ vecs.conj().T) @ v.conj().T)
    return ShortedPair(shorted=shorted, compression=w.w - shorted)


def random_null_projection(
    s: SubspaceBasis,
    rng: np.random.Generator,
    tol: TolerancePolicy = DEFAULT_TOL,
    max_draws: int = 50,
) -> np.ndarray:
    """Random oblique projection E with E^2 = E and N(E) = S.

    Draw a random complement G of S and project onto it along S:
    E = G (V*G)^{-1} V* with V an orthonormal basis of the orthogonal
    complement of S.  Degenerate draws (V*G badly conditioned) are rejected.
    """
    n = s.ambient_dim
    v = orthogonal_complement(s, tol).basis
    k = v.shape[1]
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    for _ in range(max_draws):
        g = complex_gaussian(rng, n, k)
        m = v.conj().T @ g
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] > 1e-6 * sv[0]:
            return g @ np.linalg.solve(m, v.conj().T)
    raise RuntimeError("no well-conditioned complement of S found")


@dataclass(frozen=True)
class InfimumWitnessReport:
    """Sampled evidence that W_{/S} bounds E*WE from below over N(E) = S."""

    trials: int
    margins: np.ndarray
    min_margin: float
    tolerance: float

    @property
    def all_bounded(self) -> bool:
        return bool(self.min_margin >= -self.tolerance)


def shorted_infimum_witness(
    w: PsdWeight,
    s: SubspaceBasis,
    trials: int,
    rng_seed: int,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> InfimumWitnessReport:
    """Check W_{/S} <= E*WE for random oblique projections with kernel S.

    For each trial the margin is the smallest eigenvalue of
    E*WE - W_{/S}; the report carries all margins and their minimum.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    pair = shorted_operator(w, s, tol)
    rng = np.random.default_rng(rng_seed)
    margins = np.empty(trials)
    for i in range(trials):
        e = random_null_projection(s, rng, tol)
        gap = hermitian_part(e.conj().T @ w.w @ e - pair.shorted)
        margins[i] = float(np.linalg.eigvalsh(gap)[0])
    return InfimumWitnessReport(
        trials=trials,
        margins=margins,
        min_margin=float(margins.min()),
        tolerance=tol.residual_abs,
    )


@dataclass(frozen=True)
class ShortedPropertyReport:
    """Kernel/range facts of the shorted pair, as rank/residual statements.

    * the kernel of the compression W_S equals the W-orthogonal complement
      of S (dimensions and mutual containment residual),
    * the range of W_{/S} lies in the orthogonal complement of S,
    * N(W) + S is annihilated by W_{/S}.
    """

    compression_kernel_dim: int
    w_complement_dim: int
    kernel_mismatch_residual: float
    range_residual: float
    null_absorb_residual: float
    tolerance: float

    @property
    def kernel_matches(self) -> bool:
        return (
            self.compression_kernel_dim == self.w_complement_dim
            and self.kernel_mismatch_residual <= self.tolerance
        )

    @property
    def range_in_complement(self) -> bool:
        return self.range_residual <= self.tolerance

    @property
    def null_and_s_absorbed(self) -> bool:
        return self.null_absorb_residual <= self.tolerance

    @property
    def all_pass(self) -> bool:
        return self.kernel_matches and self.range_in_complement and self.null_and_s_absorbed


def _null_basis_at_scale(t: np.ndarray, scale: float, tol: TolerancePolicy) -> SubspaceBasis:
    # kernel of t with the rank cutoff anchored at an external scale; needed
    # because the compression can consist entirely of W-scale rounding dust
    _, sv, vh = np.linalg.svd(t, full_matrices=True)
    cutoff = tol.rank_cutoff(max(float(sv[0]) if sv.size else 0.0, scale), t.shape)
    r = int(np.count_nonzero(sv > cutoff))
    return SubspaceBasis.from_orthonormal(vh[r:].conj().T)


def shorted_kernel_range_check(
    w: PsdWeight, s: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL
) -> ShortedPropertyReport:
    """Verify the kernel/range structure of the shorted pair numerically."""
    pair = shorted_operator(w, s, tol)
    w_scale = float(np.linalg.norm(w.w, 2))
    comp_kernel = _null_basis_at_scale(pair.compression, w_scale, tol)
    w_perp = w_orthogonal_complement(s, w, tol)
    mismatch = max(
        float(np.linalg.norm(comp_kernel.basis - w_perp.projector @ comp_kernel.basis)),
        float(np.linalg.norm(w_perp.basis - comp_kernel.projector @ w_perp.basis)),
    )
    range_residual = float(np.linalg.norm(s.projector @ pair.shorted))
    absorbed = np.hstack([null_basis(w.w, tol).basis, s.basis])
    null_absorb_residual = float(np.linalg.norm(pair.shorted @ absorbed))
    return ShortedPropertyReport(
        compression_kernel_dim=comp_kernel.dim,
        w_complement_dim=w_perp.dim,
        kernel_mismatch_residual=mismatch,
        range_residual=range_residual,
        null_absorb_residual=null_absorb_residual,
        tolerance=tol.residual_abs,
    )
