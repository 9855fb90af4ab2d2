"""Schatten p-norms, polar decomposition, and one-sided directional derivatives.

The p-norm of T is the l^p norm of its singular values.  The polar
decomposition used throughout is T = U |T| with |T| = (T*T)^{1/2} and U the
partial isometry whose kernel equals N(T); which singular directions enter U
is decided by the shared rank cutoff.

For G_p(X) = ||X||_p^p the one-sided derivative at X in direction e^{i phi} Y
is

    p > 1:   D_phi G_p(X, Y) = p Re[ e^{i phi} tr(|X|^{p-1} U* Y) ],
    p = 1:   D_phi G_1(X, Y) = Re[ e^{i phi} tr(U* Y) ]
                               + || P_{N(X*)} Y P_{N(X)} ||_1,

with U from the polar decomposition of X.  The p = 1 kernel term is
discontinuous in the rank of X, so its projectors use the same rank policy as
everything else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_linalg import (
    DEFAULT_TOL,
    PsdWeight,
    TolerancePolicy,
    as_matrix,
    hermitian_part,
    null_basis,
    svd,
)

__all__ = [
    "PolarParts",
    "schatten_norm",
    "weighted_seminorm",
    "polar",
    "psd_power",
    "directional_derivative",
]


def schatten_norm(t, p: float) -> float:
    """p-th root of the sum of p-th powers of the singular values of t."""
    if p < 1:
        raise ValueError(f"Schatten norms need p >= 1, got p={p}")
    _, s, _ = svd(t)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    # factor out the largest singular value to keep the powers well-scaled
    return float(s[0] * ((s / s[0]) ** p).sum() ** (1.0 / p))


def weighted_seminorm(x, w: PsdWeight, p: float) -> float:
    """Weighted seminorm ||X||_{p,W} = ||W^{1/2} X||_p (vanishes on N-of-W directions)."""
    x = as_matrix(x)
    if w.dim != x.shape[0]:
        raise ValueError(f"dimension mismatch: W {w.dim}x{w.dim}, X {x.shape}")
    return schatten_norm(w.sqrt_w @ x, p)


@dataclass(frozen=True)
class PolarParts:
    """Polar factors T = u @ abs_t with N(u) = N(T).

    ``u`` is a partial isometry (u*u is the projector onto the row space of
    T); ``abs_t`` is the Hermitian PSD modulus (T*T)^{1/2}.
    """

    u: np.ndarray
    abs_t: np.ndarray


def polar(t, tol: TolerancePolicy = DEFAULT_TOL) -> PolarParts:
    """Polar decomposition with the kernel convention N(U) = N(T)."""
    t = as_matrix(t)
    left, s, right = svd(t)
    abs_t = hermitian_part((right * s) @ right.conj().T)
    r = 0
    if s.size:
        r = int(np.count_nonzero(s > tol.rank_cutoff(s[0], t.shape)))
    u = left[:, :r] @ right[:, :r].conj().T
    return PolarParts(u=u, abs_t=abs_t)


def psd_power(h, exponent: float, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalue power of a PSD matrix, sending rank-cutoff dust to zero.

    This is the continuous extension at 0 for positive exponents, used to
    form |X|^{p-1} for non-integer p.
    """
    if exponent <= 0:
        raise ValueError(f"psd_power needs a positive exponent, got {exponent}")
    h = hermitian_part(h)
    eigs, vecs = np.linalg.eigh(h)
    largest = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    cutoff = tol.rank_cutoff(largest, h.shape)
    powered = np.where(eigs > cutoff, np.clip(eigs, 0.0, None), 0.0)
    powered = np.where(powered > 0.0, powered**exponent, 0.0)
    return hermitian_part((vecs * powered) @ vecs.conj().T)


def directional_derivative(
    x, y, p: float, phi: float, tol: TolerancePolicy = DEFAULT_TOL
) -> float:
    """One-sided derivative of G_p at x along e^{i phi} y.

    G_p(X) = ||X||_p^p for p > 1 and G_1(X) = ||X||_1; the limit is taken
    from h -> 0+ in (G_p(x + h e^{i phi} y) - G_p(x)) / h.
    """
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: X {x.shape}, Y {y.shape}")
    if p < 1:
        raise ValueError(f"directional derivative needs p >= 1, got p={p}")
    parts = polar(x, tol)
    phase = np.exp(1j * phi)
    if p == 1:
        trace_term = float(np.real(phase * np.trace(parts.u.conj().T @ y)))
        left_kernel = null_basis(x.conj().T, tol).projector
        right_kernel = null_basis(x, tol).projector
        return trace_term + schatten_norm(left_kernel @ y @ right_kernel, 1.0)
    weight = psd_power(parts.abs_t, p - 1.0, tol)
    return float(p * np.real(phase * np.trace(weight @ parts.u.conj().T @ y)))
