"""Search over Bob's projective measurements to sharpen the entanglement witness.

The objective is the average classical conditional collision entropy
``(1/(d+1)) Σ_θ H2(X^(θ)|Y^(θ))``. It splits into independent terms, one
per θ, so each basis ``U^(θ)`` is optimized on its own.

Each basis is refined by coordinate passes: for every Hermitian generator
``E_k`` the step ``U ← exp(i s E_k) U`` is line-searched in ``s`` with a
golden-section search. Passes stop when the improvement falls below the
convergence tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError
from .relations import INEQUALITY_TOL, RelationReport, default_bob_povms, detect_entanglement
from .states import BipartiteState, conditional_blocks


@dataclass(frozen=True)
class BobStrategy:
    """One orthonormal basis per θ; column ``y`` of ``unitaries[θ]`` is ``|y⟩``."""

    unitaries: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.unitaries, dtype=complex)
        if u.ndim != 3 or u.shape[1] != u.shape[2]:
            raise ValidationError("strategy needs a stack of square unitaries")
        eye = np.eye(u.shape[1])
        dev = np.abs(np.einsum("tji,tjk->tik", u.conj(), u) - eye).max()
        if dev > 1e-9:
            raise ValidationError(f"strategy matrices are not unitary (deviation {dev:.3e})")
        object.__setattr__(self, "unitaries", u)

    @property
    def dim(self) -> int:
        return self.unitaries.shape[1]

    def povms(self) -> np.ndarray:
        """``Q_y^(θ) = U|y⟩⟨y|U†`` with shape ``(d+1, dB, dB, dB)``."""
        u = self.unitaries
        return np.einsum("tay,tby->tyab", u, u.conj())


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 200
    seed: int = 0
    convergence_tol: float = 1e-7

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("restarts and max_iters must be positive")
        if self.convergence_tol <= 0:
            raise ValidationError("convergence_tol must be positive")


def hermitian_generators(n: int) -> np.ndarray:
    """The ``n²`` Hermitian matrices matching the parameter layout of :func:`parametrize_unitary`."""
    gens = []
    for j in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[j, j] = 1.0
        gens.append(e)
    for j in range(n):
        for k in range(j + 1, n):
            re = np.zeros((n, n), dtype=complex)
            re[j, k] = re[k, j] = 1.0
            im = np.zeros((n, n), dtype=complex)
            im[j, k] = 1j
            im[k, j] = -1j
            gens.extend([re, im])
    return np.array(gens)


def parametrize_unitary(params) -> np.ndarray:
    """``exp(i H)`` with ``H`` Hermitian built from ``n²`` reals.

    The first ``n`` entries are the diagonal; then, for each pair ``j < k``,
    the real and imaginary part of ``H[j, k]``.
    """
    params = np.asarray(params, dtype=float)
    n = int(round(np.sqrt(params.size)))
    if n * n != params.size or n < 1:
        raise ValidationError(f"need a square number of parameters, got {params.size}")
    h = np.einsum("k,kij->ij", params, hermitian_generators(n))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _theta_entropy(blocks: np.ndarray, u: np.ndarray) -> float:
    # p[x, y] = <u_y| b_x |u_y>
    p = np.einsum("ay,xab,by->xy", u.conj(), blocks, u).real
    p = np.clip(p, 0.0, None)
    py = p.sum(axis=0)
    keep = py > 1e-300
    return float(-np.log2(np.sum((p[:, keep] ** 2).sum(axis=0) / py[keep])))


def _blocks(state: BipartiteState, mums) -> np.ndarray:
    if state.dA != mums.dim:
        raise ValidationError("MUM dimension does not match system A")
    return conditional_blocks(state, mums.povms)


def objective(state: BipartiteState, mums, strategy: BobStrategy) -> float:
    """Average ``H2(X^(θ)|Y^(θ))`` when Bob measures in the strategy's bases."""
    blocks = _blocks(state, mums)
    if strategy.unitaries.shape != (mums.dim + 1, state.dB, state.dB):
        raise ValidationError("strategy does not match the number of measurements or system B")
    return float(np.mean([_theta_entropy(b, u) for b, u in zip(blocks, strategy.unitaries)]))


def _line_directions(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for e in hermitian_generators(n):
        w, v = np.linalg.eigh(e)
        out.append((w, v))
    return out


_INVPHI = (np.sqrt(5) - 1) / 2


def golden_section(fun, lo: float, hi: float, xtol: float = 1e-6) -> tuple[float, float]:
    """Minimize a unimodal ``fun`` on ``[lo, hi]``; returns ``(x, fun(x))``."""
    a, b = lo, hi
    c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refine(blocks: np.ndarray, u: np.ndarray, directions, cfg: OptimizerConfig) -> tuple[np.ndarray, float]:
    best = _theta_entropy(blocks, u)
    for _ in range(cfg.max_iters):
        start = best
        for w, v in directions:
            vu = v.conj().T @ u

            def step(s, w=w, v=v, vu=vu):
                return _theta_entropy(blocks, v @ (np.exp(1j * s * w)[:, None] * vu))

            s, val = golden_section(step, -np.pi / 2, np.pi / 2)
            if val < best:
                best = val
                u = v @ (np.exp(1j * s * w)[:, None] * vu)
        if start - best < cfg.convergence_tol:
            break
    return u, best


def _warm_start(povm_t: np.ndarray) -> np.ndarray:
    # eigenbasis of Σ_y y·Q_y: exact for projective Q, a projective proxy otherwise
    weights = np.arange(1, len(povm_t) + 1)
    h = np.einsum("y,yab->ab", weights, povm_t)
    _, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return v[:, ::-1]


def optimize_bob(state: BipartiteState, mums, cfg: OptimizerConfig | None = None,
                 tol: float = INEQUALITY_TOL) -> tuple[BobStrategy, RelationReport]:
    """Minimize the witness left-hand side over projective measurements on B.

    Restart 0 starts from the basis that diagonalizes Bob's default
    (transposed-MUM) measurement when ``dB == dA``; the other restarts start
    from Haar-random bases. Ties keep the lower restart index.
    """
    cfg = cfg or OptimizerConfig()
    blocks = _blocks(state, mums)
    db = state.dB
    rng = np.random.default_rng(cfg.seed)
    starts = [[haar_unitary(db, rng) for _ in blocks] for _ in range(cfg.restarts)]
    if db == mums.dim:
        starts[0] = [_warm_start(q) for q in default_bob_povms(mums)]
    directions = _line_directions(db)
    best_u, best_vals = [], []
    for th, b in enumerate(blocks):
        results = [_refine(b, s[th], directions, cfg) for s in starts]
        idx = min(range(len(results)), key=lambda i: (results[i][1], i))
        best_u.append(results[idx][0])
        best_vals.append(results[idx][1])
    strategy = BobStrategy(np.array(best_u))
    dists = [_joint(b, u) for b, u in zip(blocks, strategy.unitaries)]
    report = detect_entanglement(dists, mums.kappa, tol)
    report.name = "lemma3_optimized"
    report.context["restarts"] = cfg.restarts
    report.context["seed"] = cfg.seed
    return strategy, report


def _joint(blocks: np.ndarray, u: np.ndarray) -> np.ndarray:
    p = np.clip(np.einsum("ay,xab,by->xy", u.conj(), blocks, u).real, 0.0, None)
    return p / p.sum()
