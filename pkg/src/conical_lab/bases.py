"""Orthonormal bases of the traceless Hermitian operators on ``C^d``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, swap_operator

BASIS_TOL = 1e-10


@dataclass(frozen=True)
class HermitianBasis:
    """``d² − 1`` traceless Hermitian operators with ``tr[F_j F_k] = δ_jk``.

    ``operators`` has shape ``(d² − 1, d, d)``. Construction validates the
    invariants, so any instance can be trusted downstream.
    """

    dim: int
    operators: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        d = self.dim
        if d < 2:
            raise ValidationError("basis dimension must be at least 2")
        if ops.shape != (d * d - 1, d, d):
            raise ValidationError(f"expected {d * d - 1} operators of size {d}x{d}, got {ops.shape}")
        herm = np.abs(ops - ops.conj().transpose(0, 2, 1)).max()
        if herm > BASIS_TOL:
            raise ValidationError(f"operators not Hermitian (deviation {herm:.3e})")
        traces = np.abs(np.einsum("kii->k", ops)).max()
        if traces > BASIS_TOL:
            raise ValidationError(f"operators not traceless (deviation {traces:.3e})")
        gram = gram_matrix(ops)
        dev = np.abs(gram - np.eye(len(ops))).max()
        if dev > BASIS_TOL:
            raise ValidationError(f"operators not orthonormal (Gram deviation {dev:.3e})")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)

    def coefficients(self, h) -> np.ndarray:
        """Real expansion coefficients ``tr[F_k H]`` of a traceless Hermitian ``H``."""
        return np.einsum("kij,ji->k", self.operators, np.asarray(h)).real

    def combine(self, coeffs) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(coeffs, dtype=float), self.operators)


def gram_matrix(ops) -> np.ndarray:
    ops = np.asarray(ops)
    return np.einsum("jab,kba->jk", ops, ops)


def gell_mann_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann matrices normalized to ``tr[F_j F_k] = δ_jk``.

    Ordering: symmetric off-diagonal, antisymmetric off-diagonal, then the
    ``d − 1`` diagonal ones. For ``d = 2`` this gives ``σx, σy, σz`` over ``√2``.
    """
    if d < 2:
        raise ValidationError("Gell-Mann basis needs d >= 2")
    sym, anti, diag = [], [], []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            sym.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2)
            a[k, j] = 1j / np.sqrt(2)
            anti.append(a)
    for l in range(1, d):
        entries = np.zeros(d)
        entries[:l] = 1.0
        entries[l] = -l
        diag.append(np.diag(entries / np.sqrt(l * (l + 1))).astype(complex))
    return HermitianBasis(d, np.array(sym + anti + diag))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed real orthogonal matrix (QR of a Gaussian, sign-corrected)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def rotate_basis(basis: HermitianBasis, orthogonal) -> HermitianBasis:
    """``F'_j = Σ_k O_jk F_k`` for a real orthogonal ``O``."""
    o = np.asarray(orthogonal, dtype=float)
    return HermitianBasis(basis.dim, np.einsum("jk,kab->jab", o, basis.operators))


def random_rotated_basis(d: int, seed=None, base: HermitianBasis | None = None) -> HermitianBasis:
    rng = np.random.default_rng(seed)
    base = base if base is not None else gell_mann_basis(d)
    return rotate_basis(base, random_orthogonal(d * d - 1, rng))


def relabel_grid(basis: HermitianBasis) -> np.ndarray:
    """Arrange the basis as the ``(d+1) × (d−1)`` block grid.

    Returns an array ``G`` of shape ``(d+1, d−1, d, d)`` with
    ``G[θ−1, x−1] = F_{(θ−1)(d−1)+x}`` (one row per θ).
    """
    d = basis.dim
    return basis.operators.reshape(d + 1, d - 1, d, d)


def flatten_grid(grid) -> HermitianBasis:
    grid = np.asarray(grid)
    d = grid.shape[-1]
    return HermitianBasis(d, grid.reshape(d * d - 1, d, d))


def tensor_square_sum(ops) -> np.ndarray:
    """``Σ_k A_k ⊗ A_k`` for a stack of square operators."""
    ops = np.asarray(ops, dtype=complex)
    d = ops.shape[-1]
    return np.einsum("kab,kce->acbe", ops, ops).reshape(d * d, d * d)


def design_identity_residual(basis: HermitianBasis) -> float:
    """Frobenius norm of ``Σ_k F_k ⊗ F_k − (𝔽 − 𝟙/d)``."""
    d = basis.dim
    target = swap_operator(d) - np.eye(d * d) / d
    return float(np.linalg.norm(tensor_square_sum(basis.operators) - target))
