"""Mutually unbiased measurements, generalized SIMs and conical 2-designs.

A complete MUM set is built from an orthonormal traceless Hermitian basis
``{F_k}``: the basis is laid out on a ``(d+1) × (d−1)`` grid and each row θ
yields ``d`` traceless generators ``F_x^(θ)``. The POVM elements are
``P_x^(θ) = 𝟙/d + t F_x^(θ)`` for any ``t`` that keeps them positive.

A generalized SIM is built the same way from the whole basis treated as one
row: ``d²`` generators ``G_x`` and elements ``P_x = 𝟙/d² + t G_x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import HermitianBasis, relabel_grid, tensor_square_sum
from .linalg import ValidationError, swap_operator

CHECK_TOL = 1e-9


class PositivityError(ValidationError):
    """Raised when a requested ``t`` makes some POVM element non-positive."""

    def __init__(self, message: str, worst_eigenvalue: float):
        super().__init__(message)
        self.worst_eigenvalue = worst_eigenvalue


# coefficient functions

def f_kappa(d: int, kappa: float) -> float:
    return 1.0 + (1.0 - kappa) / (d - 1)


def g_kappa(d: int, kappa: float) -> float:
    return (kappa * d - 1.0) / (d - 1)


def l_eta(d: int, eta: float) -> float:
    return (1.0 - d * eta) / (d * d - 1)


def r_eta(d: int, eta: float) -> float:
    return (d**3 * eta - 1.0) / (d * (d * d - 1))


def kappa_from_t(d: int, t: float) -> float:
    return 1.0 / d + t * t * (1 + np.sqrt(d)) ** 2 * (d - 1)


def t_from_kappa(d: int, kappa: float) -> float:
    """Positive ``t`` producing efficiency ``kappa``; requires ``1/d < κ ≤ 1``."""
    if not (1.0 / d < kappa <= 1.0):
        raise ValidationError(f"kappa must lie in (1/{d}, 1], got {kappa}")
    return float(np.sqrt((kappa - 1.0 / d) / ((1 + np.sqrt(d)) ** 2 * (d - 1))))


def eta_from_t(d: int, t: float) -> float:
    return 1.0 / d**3 + t * t * (d + 1) ** 2 * (d * d - 1)


def _require_kappa(d: int, kappa: float):
    if not (1.0 / d < kappa <= 1.0 + CHECK_TOL):
        raise ValidationError(f"kappa must lie in (1/{d}, 1], got {kappa}")


# data types

@dataclass(frozen=True)
class MumSet:
    """``d + 1`` POVMs of ``d`` elements; ``povms[θ, x]`` is ``P_{x+1}^{(θ+1)}``."""

    dim: int
    t: float
    kappa: float
    povms: np.ndarray

    def __post_init__(self):
        d = self.dim
        povms = np.asarray(self.povms, dtype=complex)
        if povms.shape != (d + 1, d, d, d):
            raise ValidationError(f"MUM set for d={d} needs shape {(d + 1, d, d, d)}, got {povms.shape}")
        object.__setattr__(self, "povms", povms)

    @property
    def f(self) -> float:
        return f_kappa(self.dim, self.kappa)

    @property
    def g(self) -> float:
        return g_kappa(self.dim, self.kappa)

    def elements(self) -> np.ndarray:
        return self.povms.reshape(-1, self.dim, self.dim)


@dataclass(frozen=True)
class SimSet:
    """``d²`` POVM elements with constant purity ``eta``."""

    dim: int
    t: float
    eta: float
    operators: np.ndarray

    def __post_init__(self):
        d = self.dim
        ops = np.asarray(self.operators, dtype=complex)
        if ops.shape != (d * d, d, d):
            raise ValidationError(f"SIM for d={d} needs shape {(d * d, d, d)}, got {ops.shape}")
        object.__setattr__(self, "operators", ops)

    @property
    def l(self) -> float:
        return l_eta(self.dim, self.eta)

    @property
    def r(self) -> float:
        return r_eta(self.dim, self.eta)


@dataclass
class CheckReport:
    """Maximum absolute deviation per defining condition."""

    deviations: dict[str, float] = field(default_factory=dict)
    tol: float = CHECK_TOL

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.deviations.values())

    @property
    def worst(self) -> tuple[str, float]:
        return max(self.deviations.items(), key=lambda kv: kv[1])

    def to_dict(self) -> dict:
        return {"deviations": dict(self.deviations), "tol": self.tol, "pass": self.passed}


@dataclass(frozen=True)
class DesignFit:
    k_plus: float
    k_minus: float
    residual: float


# MUM construction

def mum_generators(basis: HermitianBasis) -> np.ndarray:
    """Traceless generators ``F_x^(θ)`` as an array of shape ``(d+1, d, d, d)``.

    ``F_x^(θ) = F^(θ) − (d + √d) F_{x,θ}`` for ``x < d`` and
    ``F_d^(θ) = (1 + √d) F^(θ)``, with ``F^(θ)`` the row sum of the grid.
    The generators of each row sum to zero.
    """
    d = basis.dim
    sd = np.sqrt(d)
    grid = relabel_grid(basis)
    row_sum = grid.sum(axis=1)
    gens = np.empty((d + 1, d, d, d), dtype=complex)
    gens[:, : d - 1] = row_sum[:, None] - (d + sd) * grid
    gens[:, d - 1] = (1 + sd) * row_sum
    return gens


def _positivity_bound(gens: np.ndarray, identity_weight: float) -> float:
    lam_min = np.linalg.eigvalsh(gens.reshape(-1, *gens.shape[-2:])).min(axis=1)
    neg = lam_min[lam_min < 0]
    return float(np.min(identity_weight / -neg))


def max_t(basis: HermitianBasis) -> float:
    """Largest ``t`` with ``𝟙/d + t F_x^(θ) ⪰ 0`` for every generator."""
    return _positivity_bound(mum_generators(basis), 1.0 / basis.dim)


def _resolve_t(t, bound: float) -> float:
    if t is None or (isinstance(t, str) and t == "max"):
        return bound
    t = float(t)
    if t <= 0:
        raise ValidationError(f"t must be positive, got {t}")
    return t


def _check_positive(elements: np.ndarray, what: str):
    lam = np.linalg.eigvalsh(elements).min()
    if lam < -CHECK_TOL:
        raise PositivityError(f"{what} has a negative eigenvalue {lam:.3e}", float(lam))


def build_mum_set(basis: HermitianBasis, t="max") -> MumSet:
    """Complete MUM set at parameter ``t`` (``"max"`` for the positivity limit)."""
    d = basis.dim
    gens = mum_generators(basis)
    t = _resolve_t(t, max_t(basis))
    povms = np.eye(d) / d + t * gens
    _check_positive(povms.reshape(-1, d, d), f"MUM element at t={t}")
    kappa = kappa_from_t(d, t)
    measured = np.einsum("ij,ji->", povms[0, 0], povms[0, 0]).real
    if abs(measured - kappa) > CHECK_TOL:
        raise ValidationError(f"measured purity {measured} disagrees with kappa(t)={kappa}")
    return MumSet(d, t, kappa, povms)


def verify_povm(elements, tol: float = CHECK_TOL) -> CheckReport:
    el = np.asarray(elements)
    d = el.shape[-1]
    lam = np.linalg.eigvalsh(el).min()
    return CheckReport(
        {
            "positivity": float(max(0.0, -lam)),
            "completeness": float(np.abs(el.sum(axis=0) - np.eye(d)).max()),
        },
        tol,
    )


def verify_mum(mums: MumSet, tol: float = CHECK_TOL) -> CheckReport:
    """Check POVM structure and the three MUM trace conditions."""
    d, kappa = mums.dim, mums.kappa
    p = mums.povms
    lam = np.linalg.eigvalsh(p.reshape(-1, d, d)).min()
    completeness = np.abs(p.sum(axis=1) - np.eye(d)).max()
    traces = np.einsum("txii->tx", p).real
    # overlaps[θ, x, θ', x'] = tr[P_x^θ P_x'^θ']
    overlaps = np.einsum("sxab,tyba->sxty", p, p).real
    intra_target = np.where(np.eye(d, dtype=bool), kappa, (1 - kappa) / (d - 1))
    intra = max(np.abs(overlaps[s, :, s, :] - intra_target).max() for s in range(d + 1))
    cross = max(
        np.abs(overlaps[s, :, u, :] - 1.0 / d).max() for s in range(d + 1) for u in range(d + 1) if s != u
    )
    return CheckReport(
        {
            "positivity": float(max(0.0, -lam)),
            "completeness": float(completeness),
            "trace": float(np.abs(traces - 1).max()),
            "intra_overlap": float(intra),
            "cross_overlap": float(cross),
            "kappa_relation": float(abs(kappa - kappa_from_t(d, mums.t))) if mums.t > 0 else 0.0,
        },
        tol,
    )


# SIM construction

def sim_generators(basis: HermitianBasis) -> np.ndarray:
    """``G_x = G − d(d+1) F_x`` for ``x < d²`` and ``G_{d²} = (d+1) G``, ``G = Σ F_k``."""
    d = basis.dim
    total = basis.operators.sum(axis=0)
    gens = np.empty((d * d, d, d), dtype=complex)
    gens[:-1] = total - d * (d + 1) * basis.operators
    gens[-1] = (d + 1) * total
    return gens


def sim_max_t(basis: HermitianBasis) -> float:
    return _positivity_bound(sim_generators(basis), 1.0 / basis.dim**2)


def build_sim_set(basis: HermitianBasis, t="max") -> SimSet:
    """Generalized SIM at parameter ``t``.

    The result is accepted only after it passes :func:`verify_sim`.
    """
    d = basis.dim
    gens = sim_generators(basis)
    t = _resolve_t(t, sim_max_t(basis))
    ops = np.eye(d) / d**2 + t * gens
    _check_positive(ops, f"SIM element at t={t}")
    eta = float(np.einsum("ij,ji->", ops[0], ops[0]).real)
    sim = SimSet(d, t, eta, ops)
    report = verify_sim(sim)
    if not report.passed:
        name, dev = report.worst
        raise ValidationError(f"constructed SIM violates {name} by {dev:.3e}")
    return sim


def verify_sim(sim: SimSet, tol: float = CHECK_TOL) -> CheckReport:
    d, eta = sim.dim, sim.eta
    p = sim.operators
    n = d * d
    lam = np.linalg.eigvalsh(p).min()
    overlaps = np.einsum("xab,yba->xy", p, p).real
    off = ~np.eye(n, dtype=bool)
    in_range = 1.0 / d**3 < eta <= 1.0 / d**2 + tol
    return CheckReport(
        {
            "positivity": float(max(0.0, -lam)),
            "completeness": float(np.abs(p.sum(axis=0) - np.eye(d)).max()),
            "purity": float(np.abs(np.diag(overlaps) - eta).max()),
            "cross_overlap": float(np.abs(overlaps[off] - (1 - eta * d) / (d * (d * d - 1))).max()),
            "eta_range": 0.0 if in_range else float("inf"),
        },
        tol,
    )


# exact MUBs

def mub_vectors(d: int) -> np.ndarray:
    """Complete MUB set as an array ``(d+1, d, d)``: ``[θ, x]`` is a unit vector.

    ``d = 2`` uses the eigenbases of σz, σx, σy. Odd primes use the
    computational basis plus ``(1/√d) Σ_k ω^{a k² + j k} |k⟩`` for ``a ∈ [0, d)``.
    """
    if d == 2:
        s = 1 / np.sqrt(2)
        return np.array(
            [
                [[1, 0], [0, 1]],
                [[s, s], [s, -s]],
                [[s, 1j * s], [s, -1j * s]],
            ],
            dtype=complex,
        )
    if d not in (3, 5):
        raise ValidationError(f"exact MUB sets are provided for d in {{2, 3, 5}}, got {d}")
    omega = np.exp(2j * np.pi / d)
    k = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        bases.append(np.array([omega ** ((a * k * k + j * k) % d) / np.sqrt(d) for j in range(d)]))
    return np.array(bases)


def mub_set(d: int) -> MumSet:
    """Rank-one projector POVMs of a complete MUB set, wrapped with ``κ = 1``."""
    vecs = mub_vectors(d)
    povms = np.einsum("txa,txb->txab", vecs, vecs.conj())
    return MumSet(d, t_from_kappa(d, 1.0), 1.0, povms)


# conical designs

def conical_design_fit(operators) -> DesignFit:
    """Least-squares fit of ``Σ A ⊗ A`` onto ``k₊ 𝟙 + k₋ 𝔽``.

    ``𝟙`` and ``𝔽`` are not orthogonal in the trace inner product, so the
    2×2 Gram system ``[[d², d], [d, d²]]`` is solved exactly.
    """
    ops = np.asarray(operators, dtype=complex)
    d = ops.shape[-1]
    s = tensor_square_sum(ops)
    swap = swap_operator(d)
    gram = np.array([[d * d, d], [d, d * d]], dtype=float)
    rhs = np.array([np.trace(s).real, np.einsum("ij,ji->", s, swap).real])
    k_plus, k_minus = np.linalg.solve(gram, rhs)
    residual = np.linalg.norm(s - k_plus * np.eye(d * d) - k_minus * swap)
    return DesignFit(float(k_plus), float(k_minus), float(residual))
