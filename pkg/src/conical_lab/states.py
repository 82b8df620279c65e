"""Bipartite states, classical-quantum assemblies and joint outcome statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, as_matrix, partial_trace
from .measurements import MumSet, SimSet

STATE_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteState:
    """Density operator on ``A ⊗ B`` with its dimension split."""

    matrix: np.ndarray
    dA: int
    dB: int

    def __post_init__(self):
        m = as_matrix(self.matrix)
        n = self.dA * self.dB
        if self.dA < 1 or self.dB < 1 or m.shape != (n, n):
            raise ValidationError(f"matrix shape {m.shape} does not match split ({self.dA}, {self.dB})")
        scale = max(1.0, np.linalg.norm(m))
        if np.linalg.norm(m - m.conj().T) > STATE_TOL * scale:
            raise ValidationError("state is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        w = np.linalg.eigvalsh(m)
        if w.min() < -STATE_TOL:
            raise ValidationError(f"state is not positive semidefinite (min eigenvalue {w.min():.3e})")
        if abs(w.sum() - 1.0) > STATE_TOL:
            raise ValidationError(f"state trace is {w.sum():.12g}, expected 1")
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dA, self.dB)

    @property
    def rho_A(self) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep="A")

    @property
    def rho_B(self) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep="B")


def random_density(n: int, rank: int | None = None, seed=None) -> np.ndarray:
    """``GG†/tr(GG†)`` for an ``n × rank`` complex Ginibre matrix ``G``."""
    rank = n if rank is None else rank
    if not 1 <= rank <= n:
        raise ValidationError(f"rank must be in [1, {n}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(dA: int, dB: int, rank: int | None = None, seed=None) -> BipartiteState:
    return BipartiteState(random_density(dA * dB, rank, seed), dA, dB)


def product_state(rho_a, rho_b) -> BipartiteState:
    rho_a, rho_b = as_matrix(rho_a), as_matrix(rho_b)
    return BipartiteState(np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def max_entangled(d: int) -> BipartiteState:
    """``|Ψ⟩ = Σ_s |ss⟩/√d`` as a density matrix."""
    if d < 2:
        raise ValidationError("maximally entangled state needs d >= 2")
    psi = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    return BipartiteState(np.outer(psi, psi.conj()), d, d)


def separable_sample(dA: int, dB: int, terms: int | None = None, seed=None) -> BipartiteState:
    """Random convex mixture of product states with flat Dirichlet weights."""
    rng = np.random.default_rng(seed)
    terms = dA * dB if terms is None else terms
    if terms < 1:
        raise ValidationError("need at least one term")
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((dA * dB, dA * dB), dtype=complex)
    for w in weights:
        ra = random_density(dA, rng.integers(1, dA + 1), rng)
        rb = random_density(dB, rng.integers(1, dB + 1), rng)
        rho += w * np.kron(ra, rb)
    return BipartiteState(rho / np.trace(rho).real, dA, dB)


@dataclass(frozen=True)
class CqState:
    """Classical-quantum state ``Σ_label |x⟩⟨x| ⊗ b_label (⊗ |θ⟩⟨θ|)``.

    ``blocks`` has shape ``label_shape + (dB, dB)``; the first label axis is
    the guessed register X and an optional second axis is the announced
    register Θ. Blocks are unnormalized and their traces sum to one.
    """

    kind: str
    blocks: np.ndarray

    @property
    def label_shape(self) -> tuple[int, ...]:
        return self.blocks.shape[:-2]

    @property
    def dB(self) -> int:
        return self.blocks.shape[-1]

    def probabilities(self) -> np.ndarray:
        return np.einsum("...ii->...", self.blocks).real

    def conditioning_marginal(self) -> np.ndarray:
        """``ω_B`` or, when Θ is present, ``ω_BΘ`` ordered ``B ⊗ Θ``."""
        marg = self.blocks.sum(axis=0)
        if marg.ndim == 2:
            return marg
        n_theta = marg.shape[0]
        out = np.zeros((self.dB * n_theta,) * 2, dtype=complex)
        for th in range(n_theta):
            out += np.kron(marg[th], _ket_bra(th, n_theta))
        return out

    def flatten(self) -> BipartiteState:
        """Block-diagonal state on ``X ⊗ (B Θ)`` for the ``X : BΘ`` partition."""
        dX = self.label_shape[0]
        if len(self.label_shape) == 1:
            m = np.zeros((dX * self.dB,) * 2, dtype=complex)
            for x in range(dX):
                m += np.kron(_ket_bra(x, dX), self.blocks[x])
            return BipartiteState(m, dX, self.dB)
        n_theta = self.label_shape[1]
        cond = self.dB * n_theta
        m = np.zeros((dX * cond,) * 2, dtype=complex)
        for x in range(dX):
            for th in range(n_theta):
                m += np.kron(_ket_bra(x, dX), np.kron(self.blocks[x, th], _ket_bra(th, n_theta)))
        return BipartiteState(m, dX, cond)


def _ket_bra(i: int, n: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[i, i] = 1.0
    return e


def _check_dim(state: BipartiteState, d: int):
    if state.dA != d:
        raise ValidationError(f"measurement acts on dimension {d} but system A has dimension {state.dA}")


def apply_on_a(matrix, dims: tuple[int, int], elements) -> np.ndarray:
    """``tr_A[(P_x ⊗ 𝟙) M]`` for each element ``P_x`` of a stack."""
    da, db = dims
    t = np.asarray(matrix).reshape(da, db, da, db)
    return np.einsum("...ba,ajbk->...jk", np.asarray(elements), t)


def conditional_blocks(state: BipartiteState, elements) -> np.ndarray:
    el = np.asarray(elements)
    _check_dim(state, el.shape[-1])
    return apply_on_a(state.matrix, state.dims, el)


def measure_cq_per_theta(state: BipartiteState, povm) -> CqState:
    return CqState("perTheta", conditional_blocks(state, povm))


def measure_cq_full(state: BipartiteState, mums: MumSet) -> CqState:
    """``ω_XBΘ`` with Θ uniform over the ``d + 1`` measurements."""
    blocks = conditional_blocks(state, mums.povms) / (mums.dim + 1)
    return CqState("full", np.moveaxis(blocks, 0, 1))


def measure_sim_cq(state: BipartiteState, sim: SimSet) -> CqState:
    return CqState("sim", conditional_blocks(state, sim.operators))


def joint_distribution(state: BipartiteState, p, q) -> np.ndarray:
    """``p(x, y) = tr[(P_x ⊗ Q_y) ρ]`` as an array indexed ``[x, y]``."""
    p, q = np.asarray(p), np.asarray(q)
    if p.shape[-1] != state.dA or q.shape[-1] != state.dB:
        raise ValidationError("measurement dimensions do not match the state split")
    t = state.matrix.reshape(state.dA, state.dB, state.dA, state.dB)
    probs = np.einsum("xba,yki,aibk->xy", p, q, t).real
    return probs / probs.sum()
