"""Both sides of the uncertainty equalities, entropy-sum bounds and witnesses.

Every check returns a :class:`RelationReport` carrying the two sides, their
difference and the verdict at the requested tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entropy import (
    Ensemble,
    h2_classical_conditional,
    h2_conditional,
    h2_cq,
    h2_per_theta,
    h2_unconditional,
    pg_entanglement_fidelity,
    pg_guess_probability,
)
from .linalg import ValidationError
from .measurements import MumSet, SimSet, _require_kappa, f_kappa, g_kappa, l_eta, r_eta
from .states import (
    BipartiteState,
    conditional_blocks,
    joint_distribution,
    measure_cq_full,
    measure_sim_cq,
)

EQUALITY_TOL = 1e-8
INEQUALITY_TOL = 1e-9


@dataclass
class RelationReport:
    name: str
    lhs: float
    rhs: float
    kind: str = "equality"
    tolerance: float = EQUALITY_TOL
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs, self.rhs, self.tolerance = float(self.lhs), float(self.rhs), float(self.tolerance)

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        if self.kind == "equality":
            return bool(abs(self.gap) <= self.tolerance)
        return bool(self.gap >= -self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "context": self.context,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RelationReport":
        return cls(data["name"], data["lhs"], data["rhs"], data.get("kind", "equality"),
                   data["tolerance"], dict(data.get("context", {})))


def _check_dim(state: BipartiteState, d: int):
    if state.dA != d:
        raise ValidationError(f"measurements act on dimension {d} but system A has dimension {state.dA}")


def theorem1_rhs(d: int, kappa: float, h2_ab: float) -> float:
    return float(np.log2(d + 1) - np.log2(f_kappa(d, kappa) + g_kappa(d, kappa) * 2.0**-h2_ab))


def theorem1_check(state: BipartiteState, mums: MumSet, tol: float = EQUALITY_TOL) -> RelationReport:
    """``H2(X|BΘ)`` of the measured state against ``log(d+1) − log(f + g 2^{−H2(A|B)})``."""
    _check_dim(state, mums.dim)
    h2_ab = h2_conditional(state)
    lhs = h2_cq(measure_cq_full(state, mums))
    ctx = {"d": mums.dim, "dB": state.dB, "kappa": mums.kappa, "h2_AB": h2_ab}
    return RelationReport("theorem1", lhs, theorem1_rhs(mums.dim, mums.kappa, h2_ab), "equality", tol, ctx)


def guessing_sum(state: BipartiteState, mums: MumSet) -> float:
    """Sum over θ of the pretty-good guessing probability of ``X^(θ)`` from B."""
    _check_dim(state, mums.dim)
    return float(sum(pg_guess_probability(Ensemble.from_blocks(conditional_blocks(state, p))) for p in mums.povms))


def lemma1_check(state: BipartiteState, mums: MumSet, tol: float = EQUALITY_TOL) -> RelationReport:
    """``Σ_θ P^pg(X^(θ)|B)`` against ``f(κ) + g(κ) F^pg(A|B)``."""
    lhs = guessing_sum(state, mums)
    fid = pg_entanglement_fidelity(state)
    ctx = {"d": mums.dim, "dB": state.dB, "kappa": mums.kappa, "F_pg": fid}
    return RelationReport("lemma1", lhs, mums.f + mums.g * fid, "equality", tol, ctx)


def lemma2_check(state: BipartiteState, mums: MumSet, tol: float = INEQUALITY_TOL) -> RelationReport:
    """Average per-θ entropy against the theorem-1 value (an inequality).

    When all per-θ entropies coincide the bound is tight and the report
    only passes if the two sides are equal within ``tol``.
    """
    _check_dim(state, mums.dim)
    per_theta = h2_per_theta(state, mums)
    h2_ab = h2_conditional(state)
    rhs = theorem1_rhs(mums.dim, mums.kappa, h2_ab)
    symmetric = bool(np.ptp(per_theta) <= tol)
    ctx = {"d": mums.dim, "dB": state.dB, "kappa": mums.kappa, "h2_AB": h2_ab,
           "per_theta": per_theta.tolist(), "symmetric": symmetric}
    report = RelationReport("lemma2", float(per_theta.mean()), rhs, "inequality", tol, ctx)
    if symmetric:
        report.kind = "equality"
    return report


def lemma2_no_memory_rhs(rho_a, mums: MumSet) -> float:
    """``log(d+1) − log(f + g tr ρ_A²)``, the bound with a trivial memory."""
    purity = float(np.einsum("ij,ji->", rho_a, rho_a).real)
    return float(np.log2(mums.dim + 1) - np.log2(mums.f + mums.g * purity))


def witness_threshold(d: int, kappa: float) -> float:
    """``log(d+1) − log(f(κ) + g(κ))``; no separable state falls below it."""
    _require_kappa(d, kappa)
    return float(np.log2(d + 1) - np.log2(f_kappa(d, kappa) + g_kappa(d, kappa)))


def detect_entanglement(distributions, kappa: float, tol: float = INEQUALITY_TOL) -> RelationReport:
    """One-sided entanglement test from ``d + 1`` joint distributions ``p(x, y)``.

    A violation certifies entanglement. No violation is inconclusive.
    """
    dists = [np.asarray(p, dtype=float) for p in distributions]
    if not dists:
        raise ValidationError("no distributions supplied")
    d = dists[0].shape[0]
    if len(dists) != d + 1 or any(p.shape[0] != d for p in dists):
        raise ValidationError(f"expected {d + 1} distributions with {d} outcomes for Alice")
    per_theta = [h2_classical_conditional(p) for p in dists]
    lhs = float(np.mean(per_theta))
    thr = witness_threshold(d, kappa)
    verdict = "entangled" if lhs < thr - tol else "inconclusive"
    ctx = {"d": d, "kappa": kappa, "per_theta": per_theta, "verdict": verdict}
    return RelationReport("lemma3", lhs, thr, "inequality", tol, ctx)


def default_bob_povms(mums: MumSet) -> np.ndarray:
    """Element-wise transpose of the MUM set, used by Bob when none is given."""
    return np.swapaxes(mums.povms, -1, -2)


def measured_distributions(state: BipartiteState, mums: MumSet, bob_povms=None) -> list[np.ndarray]:
    _check_dim(state, mums.dim)
    bob = default_bob_povms(mums) if bob_povms is None else bob_povms
    if len(bob) != mums.dim + 1:
        raise ValidationError(f"Bob needs {mums.dim + 1} measurements, got {len(bob)}")
    return [joint_distribution(state, p, q) for p, q in zip(mums.povms, bob)]


def detect_state(state: BipartiteState, mums: MumSet, bob_povms=None, tol: float = INEQUALITY_TOL) -> RelationReport:
    return detect_entanglement(measured_distributions(state, mums, bob_povms), mums.kappa, tol)


def theorem2_rhs(d: int, eta: float, h2_ab: float) -> float:
    return float(-np.log2(l_eta(d, eta) + r_eta(d, eta) * 2.0**-h2_ab))


def theorem2_check(state: BipartiteState, sim: SimSet, tol: float = EQUALITY_TOL) -> RelationReport:
    """``H2(X|B)`` after a SIM on A against ``−log[l(η) + r(η) 2^{−H2(A|B)}]``."""
    _check_dim(state, sim.dim)
    h2_ab = h2_conditional(state)
    lhs = h2_cq(measure_sim_cq(state, sim))
    ctx = {"d": sim.dim, "dB": state.dB, "eta": sim.eta, "h2_AB": h2_ab}
    return RelationReport("theorem2", lhs, theorem2_rhs(sim.dim, sim.eta, h2_ab), "equality", tol, ctx)


def sic_rhs(d: int, h2_ab: float) -> float:
    """The ``η = 1/d²`` specialization ``log[d(d+1)] − log[1 + 2^{−H2(A|B)}]``."""
    return float(np.log2(d * (d + 1)) - np.log2(1 + 2.0**-h2_ab))


def sim_no_memory_entropy(rho_a, eta: float) -> float:
    """``H2(X)`` for a SIM with trivial memory, from ``tr ρ_A²``."""
    rho_a = np.asarray(rho_a)
    d = rho_a.shape[0]
    purity = float(np.einsum("ij,ji->", rho_a, rho_a).real)
    return float(np.log2(d * (d * d - 1) / ((d**3 * eta - 1) * purity + (1 - d * eta) * d)))


def sim_witness_check(state: BipartiteState, sim: SimSet, tol: float = INEQUALITY_TOL) -> RelationReport:
    """Compare ``H2(X|B)`` with ``−log[l(η) + r(η)]``; falling below means entangled."""
    _check_dim(state, sim.dim)
    lhs = h2_cq(measure_sim_cq(state, sim))
    thr = float(-np.log2(sim.l + sim.r))
    verdict = "entangled" if lhs < thr - tol else "inconclusive"
    ctx = {"d": sim.dim, "dB": state.dB, "eta": sim.eta, "verdict": verdict}
    return RelationReport("sim_witness", lhs, thr, "inequality", tol, ctx)


def outcome_distribution_entropy(rho_a, elements) -> float:
    """Collision entropy of the outcome distribution of a single-system measurement."""
    probs = np.einsum("xij,ji->x", np.asarray(elements), np.asarray(rho_a)).real
    return h2_unconditional(np.diag(probs))
