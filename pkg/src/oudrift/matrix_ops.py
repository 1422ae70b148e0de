"""Dense-matrix primitives: norms, SVD, tangent-space projections, prox operators.

Everything operates on plain 2-D float ndarrays.  Tangent spaces for the
low-rank-plus-sparse geometry are described by orthonormal factor bases
(for the low-rank part) and an index support set (for the sparse part).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLS",
    "SvdResult",
    "TangentSpaces",
    "as_matrix",
    "frobenius_norm",
    "nuclear_norm",
    "operator_norm",
    "l1_norm",
    "linf_norm",
    "svd",
    "numerical_rank",
    "project_tl",
    "project_tl_perp",
    "project_ts",
    "project_ts_perp",
    "soft_threshold",
    "singular_value_threshold",
]


@dataclass(frozen=True)
class Tolerances:
    """Central numeric-tolerance record shared across the package."""

    orth: float = 1e-10          # orthonormality of tangent factor bases
    svd_recon: float = 1e-8      # relative Frobenius error of U diag(s) Vt
    rank_rel: float = 1e-8       # sigma_i counted nonzero if > rank_rel * sigma_max
    projection: float = 1e-10    # idempotence / self-adjointness of projectors
    prox: float = 1e-10          # prox-operator optimality checks
    psd: float = 1e-12           # eigenvalue floor for "PSD to tolerance"
    certificate: float = 1e-4    # solver first-order-condition residuals
    support: float = 1e-6        # entry magnitude counted as nonzero support
    denom: float = 1e-14         # ratio denominators flagged as degenerate below this


DEFAULT_TOLS = Tolerances()


def as_matrix(a) -> np.ndarray:
    """Validate and return `a` as a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def frobenius_norm(m) -> float:
    m = as_matrix(m)
    return float(np.sqrt(np.sum(m * m)))


def nuclear_norm(m) -> float:
    """Sum of singular values."""
    m = as_matrix(m)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def operator_norm(m) -> float:
    """Largest singular value."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[0]) if s.size else 0.0


def l1_norm(m) -> float:
    """Entry-wise sum of absolute values."""
    m = as_matrix(m)
    return float(np.sum(np.abs(m)))


def linf_norm(m) -> float:
    """Entry-wise maximum absolute value."""
    m = as_matrix(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD m = u @ diag(singular_values) @ vt, singular values non-increasing."""

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.vt


def svd(m) -> SvdResult:
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    return SvdResult(u=u, singular_values=s, vt=vt)


def numerical_rank(m, rank_tol: float = DEFAULT_TOLS.rank_rel) -> int:
    """Number of singular values above rank_tol * sigma_max."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


@dataclass(frozen=True)
class TangentSpaces:
    """Tangent-space data at a low-rank-plus-sparse decomposition.

    u0, v0 : (d, r) orthonormal column bases of the row/column spaces of the
        low-rank part.  r = 0 is allowed (empty bases, trivial tangent space).
    support : index pairs (row, col) carrying the sparse part.
    """

    u0: np.ndarray
    v0: np.ndarray
    support: frozenset = field(default_factory=frozenset)
    tols: Tolerances = DEFAULT_TOLS

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "support", frozenset((int(i), int(j)) for i, j in self.support))
        if u0.ndim != 2 or v0.ndim != 2:
            raise ValueError("u0 and v0 must be 2-D")
        d, r = u0.shape
        if v0.shape != (d, r):
            raise ValueError(f"u0 and v0 shapes differ: {u0.shape} vs {v0.shape}")
        for basis, name in ((u0, "u0"), (v0, "v0")):
            gram = basis.T @ basis
            if gram.size and np.max(np.abs(gram - np.eye(r))) > self.tols.orth:
                raise ValueError(f"{name} columns are not orthonormal")
        for i, j in self.support:
            if not (0 <= i < d and 0 <= j < d):
                raise ValueError(f"support index ({i},{j}) outside [0,{d})^2")

    @property
    def dim(self) -> int:
        return self.u0.shape[0]

    @property
    def rank(self) -> int:
        return self.u0.shape[1]

    def support_mask(self) -> np.ndarray:
        mask = np.zeros((self.dim, self.dim), dtype=bool)
        for i, j in self.support:
            mask[i, j] = True
        return mask


def project_tl(ts: TangentSpaces, m) -> np.ndarray:
    """Orthogonal projection onto the low-rank tangent space.

    P(m) = Pu m + m Pv - Pu m Pv with Pu = u0 u0^T, Pv = v0 v0^T.
    """
    m = as_matrix(m)
    d = ts.dim
    if m.shape != (d, d):
        raise ValueError(f"expected {d}x{d} matrix, got {m.shape}")
    if ts.rank == 0:
        return np.zeros_like(m)
    um = ts.u0 @ (ts.u0.T @ m)
    mv = (m @ ts.v0) @ ts.v0.T
    umv = ts.u0 @ ((ts.u0.T @ m) @ ts.v0) @ ts.v0.T
    return um + mv - umv


def project_tl_perp(ts: TangentSpaces, m) -> np.ndarray:
    m = as_matrix(m)
    return m - project_tl(ts, m)


def project_ts(ts: TangentSpaces, m) -> np.ndarray:
    """Zero all entries outside the sparse support."""
    m = as_matrix(m)
    d = ts.dim
    if m.shape != (d, d):
        raise ValueError(f"expected {d}x{d} matrix, got {m.shape}")
    out = np.zeros_like(m)
    mask = ts.support_mask()
    out[mask] = m[mask]
    return out


def project_ts_perp(ts: TangentSpaces, m) -> np.ndarray:
    m = as_matrix(m)
    return m - project_ts(ts, m)


def soft_threshold(m, lam: float) -> np.ndarray:
    """Entry-wise shrinkage sign(x) * max(|x| - lam, 0); prox of lam * l1 norm."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    m = as_matrix(m)
    return np.sign(m) * np.maximum(np.abs(m) - lam, 0.0)


def singular_value_threshold(m, lam: float) -> np.ndarray:
    """Shrink singular values by lam; prox of lam * nuclear norm."""
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    s = np.maximum(s - lam, 0.0)
    return (u * s) @ vt
