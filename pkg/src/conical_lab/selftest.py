"""Randomized property suites behind ``conical-lab selftest``.

Each suite draws instances from a seeded generator and keeps the instance
with the largest violation, so the summary is reproducible and points at
the hardest case.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bases import design_identity_residual, gell_mann_basis, random_rotated_basis
from .entropy import h2_cq, h2_cq_closed_form
from .measurements import (
    build_mum_set,
    build_sim_set,
    conical_design_fit,
    max_t,
    sim_max_t,
    verify_mum,
    verify_sim,
)
from .relations import (
    RelationReport,
    detect_state,
    lemma1_check,
    lemma2_check,
    theorem1_check,
    theorem2_check,
)
from .states import measure_cq_full, random_state, separable_sample


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CONICAL_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _instance(d: int, db: int, seed: int):
    """Random (state, MUM set, SIM) triple with a random basis, ``t`` and rank."""
    rng = np.random.default_rng(seed)
    basis = random_rotated_basis(d, rng) if rng.random() < 0.8 else gell_mann_basis(d)
    mums = build_mum_set(basis, max_t(basis) * rng.uniform(0.05, 1.0))
    sim = build_sim_set(basis, sim_max_t(basis) * rng.uniform(0.05, 1.0))
    state = random_state(d, db, rank=int(rng.integers(1, d * db + 1)), seed=rng)
    return state, mums, sim


def _closed_form_report(state, mums) -> RelationReport:
    direct = h2_cq(measure_cq_full(state, mums))
    return RelationReport("closed_form", direct, h2_cq_closed_form(state, mums), "equality", 1e-9,
                          {"d": mums.dim, "dB": state.dB})


def _construction_report(basis) -> list[RelationReport]:
    out = []
    for frac in (1.0, 0.5):
        mums = build_mum_set(basis, max_t(basis) * frac)
        rep = verify_mum(mums)
        name, dev = rep.worst
        out.append(RelationReport("mum_conditions", dev, 0.0, "equality", 1e-9, {"d": mums.dim, "worst": name}))
        fit = conical_design_fit(mums.elements())
        dev = max(abs(fit.k_plus - mums.f), abs(fit.k_minus - mums.g), fit.residual)
        out.append(RelationReport("mum_design_fit", dev, 0.0, "equality", 1e-9, {"d": mums.dim}))
    sim = build_sim_set(basis)
    name, dev = verify_sim(sim).worst
    out.append(RelationReport("sim_conditions", dev, 0.0, "equality", 1e-9, {"d": sim.dim, "worst": name}))
    out.append(RelationReport("swap_identity", design_identity_residual(basis), 0.0, "equality", 1e-9,
                              {"d": basis.dim}))
    return out


def _run_instance(args) -> list[RelationReport]:
    d, db, seed = args
    state, mums, sim = _instance(d, db, seed)
    reports = [
        theorem1_check(state, mums),
        _closed_form_report(state, mums),
        lemma1_check(state, mums),
        lemma2_check(state, mums),
        theorem2_check(state, sim),
    ]
    sep = separable_sample(d, db, seed=seed)
    reports.append(detect_state(sep, mums) if db == d else detect_state(sep, mums, _square_bob(mums, db)))
    reports[-1].name = "lemma3_separable"
    reports.extend(_construction_report(random_rotated_basis(d, seed)))
    for r in reports:
        r.context["seed"] = seed
    return reports


def _square_bob(mums, db: int) -> np.ndarray:
    # computational-basis measurement on B, repeated for each θ
    q = np.array([np.diag(np.eye(db)[y]) for y in range(db)], dtype=complex)
    return np.repeat(q[None], mums.dim + 1, axis=0)


def _severity(r: RelationReport) -> float:
    return abs(r.gap) if r.kind == "equality" else -r.gap


def run_selftest(dims=(2, 3), trials: int = 20, seed: int = 0) -> tuple[list[RelationReport], dict]:
    """Run every suite; returns the worst report per suite and per-suite counts."""
    tasks = []
    for d in dims:
        for db in dims:
            for k in range(trials):
                tasks.append((d, db, int(seed) * 1_000_003 + len(tasks)))
    with ThreadPoolExecutor(thread_count()) as pool:
        results = list(pool.map(_run_instance, tasks))
    worst: dict[str, RelationReport] = {}
    summary: dict[str, dict] = {}
    for reports in results:
        for r in reports:
            s = summary.setdefault(r.name, {"instances": 0, "failures": 0})
            s["instances"] += 1
            s["failures"] += 0 if r.passed else 1
            if r.name not in worst or _severity(r) > _severity(worst[r.name]):
                worst[r.name] = r
    return list(worst.values()), summary
