"""Dense complex linear algebra used throughout the package.

Operators and states are plain ``numpy`` arrays of dtype ``complex128``.
Bipartite operators are ordered ``A ⊗ B`` with the usual Kronecker layout.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
PINV_CUTOFF = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, np.linalg.norm(m))
    return bool(np.linalg.norm(m - m.conj().T) <= tol * scale)


def hermitian_part(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(M + M†)/2``, rejecting inputs that are not Hermitian within ``tol``."""
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, dims: tuple[int, int], keep: str = "B") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    Args:
        m: square matrix of dimension ``dA * dB``.
        dims: the split ``(dA, dB)``.
        keep: ``"A"`` or ``"B"``, the subsystem that survives.
    """
    m = as_matrix(m)
    da, db = dims
    if m.shape != (da * db, da * db):
        raise ValidationError(f"matrix of shape {m.shape} does not match split {dims}")
    t = m.reshape(da, db, da, db)
    if keep == "B":
        return np.einsum("ajak->jk", t)
    if keep == "A":
        return np.einsum("ajbj->ab", t)
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            vecs[:, k] = col / ph
    return vecs


def herm_eig(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in descending order; each eigenvector has its
    first nonzero component made real and positive so results are
    reproducible.
    """
    h = hermitian_part(m, tol)
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return w[order], _fix_phases(v[:, order])


def psd_power(m, p: float, cutoff: float = PINV_CUTOFF, tol: float = PSD_TOL) -> np.ndarray:
    """Matrix power of a positive semidefinite matrix.

    Eigenvalues at or below ``cutoff * λ_max`` count as zero. Negative powers
    are taken on the support only (pseudo-inverse convention), so the zero
    eigenspace maps to zero for every ``p``.
    """
    h = hermitian_part(m)
    w, v = np.linalg.eigh(h)
    lmax = max(float(w.max(initial=0.0)), 0.0)
    if w.size and w.min() < -tol * max(lmax, 1.0):
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    support = w > cutoff * lmax if lmax > 0 else np.zeros_like(w, dtype=bool)
    wp = np.zeros_like(w)
    wp[support] = w[support] ** p
    return (v * wp) @ v.conj().T


def support_projector(m, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    return psd_power(m, 0.0, cutoff)


def swap_operator(d: int) -> np.ndarray:
    """The swap ``Σ_{s,t} |s⟩⟨t| ⊗ |t⟩⟨s|`` on two copies of a ``d``-dimensional space."""
    if d < 1:
        raise ValidationError("dimension must be positive")
    f = np.zeros((d, d, d, d), dtype=complex)
    idx = np.arange(d)
    # f[s, t, t', s'] = 1 iff output (s, t) comes from input (t, s)
    f[idx[:, None], idx[None, :], idx[None, :], idx[:, None]] = 1.0
    return f.reshape(d * d, d * d)


def is_state(m, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    if not is_hermitian(m, tol):
        return False
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return bool(w.min() >= -tol and abs(w.sum() - 1.0) <= tol)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr √(√σ ρ √σ))²``.

    Evaluated as ``‖√ρ √σ‖₁²`` from singular values, which avoids square
    roots of round-off eigenvalues when either state is rank deficient.
    """
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if not (is_state(rho) and is_state(sigma)):
        raise ValidationError("fidelity requires two density matrices")
    s = np.linalg.svd(psd_power(rho, 0.5) @ psd_power(sigma, 0.5), compute_uv=False)
    return float(np.sum(s) ** 2)
