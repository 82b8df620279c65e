"""Conditional collision entropies and pretty-good guessing.

All entropies are in bits. Inverse powers of singular marginals act on
their support only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, psd_power
from .measurements import MumSet
from .states import BipartiteState, CqState, apply_on_a, measure_cq_per_theta

DUAL_PATH_TOL = 1e-9


def _sandwich_purity(state: BipartiteState) -> float:
    """``tr[ρ (𝟙⊗ρ_B)^{-1/2} ρ (𝟙⊗ρ_B)^{-1/2}]`` straight from the definition."""
    s = np.kron(np.eye(state.dA), psd_power(state.rho_B, -0.5))
    m = state.matrix @ s
    return float(np.einsum("ij,ji->", m, m).real)


def tilde_state(state: BipartiteState) -> np.ndarray:
    """``ρ̃ = ρ_B^{-1/4} ρ_AB ρ_B^{-1/4}`` (the B-factor acting on B only)."""
    q = np.kron(np.eye(state.dA), psd_power(state.rho_B, -0.25))
    return q @ state.matrix @ q


def h2_conditional(state: BipartiteState, crosscheck: bool = True) -> float:
    """Conditional collision entropy ``H2(A|B)``.

    With ``crosscheck`` the value is also computed as ``−log tr[ρ̃²]`` and the
    two routes must agree to ``1e-9``.
    """
    val = _sandwich_purity(state)
    if crosscheck:
        rt = tilde_state(state)
        alt = float(np.einsum("ij,ji->", rt, rt).real)
        if abs(np.log2(val) - np.log2(alt)) > DUAL_PATH_TOL:
            raise ArithmeticError(f"H2 evaluation routes disagree: {val!r} vs {alt!r}")
    return float(-np.log2(val))


def h2_tilde(state: BipartiteState) -> float:
    rt = tilde_state(state)
    return float(-np.log2(np.einsum("ij,ji->", rt, rt).real))


def h2_cq(cq: CqState) -> float:
    """``H2(X | B Θ)`` of a classical-quantum state through its flattened form."""
    return h2_conditional(cq.flatten())


def h2_cq_closed_form(state: BipartiteState, mums: MumSet) -> float:
    """``−log[(1/(d+1)) Σ_{θ,x} tr_B{tr_A[P_x^(θ) ρ̃]²}]``."""
    d = mums.dim
    if state.dA != d:
        raise ValidationError("MUM dimension does not match system A")
    blocks = apply_on_a(tilde_state(state), state.dims, mums.povms)
    total = np.einsum("txij,txji->", blocks, blocks).real
    return float(-np.log2(total / (d + 1)))


def h2_per_theta(state: BipartiteState, mums: MumSet) -> np.ndarray:
    """``H2(X^(θ) | B)`` for each measurement of the set."""
    return np.array([h2_cq(measure_cq_per_theta(state, povm)) for povm in mums.povms])


def h2_classical_conditional(p) -> float:
    """``H2(X|Y) = −log Σ_y p(y) Σ_x p(x|y)²`` for ``p`` indexed ``[x, y]``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise ValidationError("expected a normalized 2-d joint distribution")
    py = p.sum(axis=0)
    keep = py > 0
    return float(-np.log2(np.sum((p[:, keep] ** 2).sum(axis=0) / py[keep])))


def h2_unconditional(rho) -> float:
    rho = np.asarray(rho)
    return float(-np.log2(np.einsum("ij,ji->", rho, rho).real))


@dataclass(frozen=True)
class Ensemble:
    """Weighted states ``{η_x, ρ_x}`` held by the guesser."""

    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        s = np.asarray(self.states, dtype=complex)
        if w.ndim != 1 or s.ndim != 3 or len(w) != len(s):
            raise ValidationError("ensemble needs one square state per weight")
        if w.min() < 0 or abs(w.sum() - 1) > 1e-9:
            raise ValidationError("ensemble weights must be a probability vector")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)

    @classmethod
    def from_blocks(cls, blocks) -> "Ensemble":
        """Split unnormalized conditional operators into weights and states."""
        blocks = np.asarray(blocks)
        w = np.einsum("xii->x", blocks).real
        d = blocks.shape[-1]
        states = np.array([b / p if p > 0 else np.eye(d) / d for b, p in zip(blocks, w)])
        return cls(np.clip(w, 0, None) / w.sum(), states)

    @property
    def average(self) -> np.ndarray:
        return np.einsum("x,xij->ij", self.weights, self.states)

    def cq_state(self) -> BipartiteState:
        n, d = len(self.weights), self.states.shape[-1]
        m = np.zeros((n * d, n * d), dtype=complex)
        for x, (w, s) in enumerate(zip(self.weights, self.states)):
            m[x * d:(x + 1) * d, x * d:(x + 1) * d] = w * s
        return BipartiteState(m, n, d)


def pretty_good_measurement(ens: Ensemble) -> np.ndarray:
    """``M_y = ρ_B^{-1/2} η_y ρ_y ρ_B^{-1/2}``, completed to a POVM.

    The projector onto the kernel of ``ρ_B`` is added to the first outcome.
    """
    rho_b = ens.average
    inv_sqrt = psd_power(rho_b, -0.5)
    ops = np.einsum("ij,y,yjk,kl->yil", inv_sqrt, ens.weights, ens.states, inv_sqrt)
    ops[0] += np.eye(rho_b.shape[0]) - psd_power(rho_b, 0.0)
    return 0.5 * (ops + ops.conj().transpose(0, 2, 1))


def pg_guess_probability(ens: Ensemble) -> float:
    m = pretty_good_measurement(ens)
    return float(np.einsum("x,xij,xji->", ens.weights, m, ens.states).real)


def pg_entanglement_fidelity(state: BipartiteState) -> float:
    """Pretty-good recoverable entanglement fidelity, via ``2^{−H2(A|B)}``."""
    return float(2.0 ** -h2_conditional(state))
