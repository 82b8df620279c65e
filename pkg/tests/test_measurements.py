import itertools

import numpy as np
import pytest

from conical_lab.bases import gell_mann_basis, random_rotated_basis, relabel_grid
from conical_lab.linalg import ValidationError
from conical_lab.measurements import (
    MumSet,
    PositivityError,
    SimSet,
    build_mum_set,
    build_sim_set,
    conical_design_fit,
    eta_from_t,
    f_kappa,
    g_kappa,
    kappa_from_t,
    l_eta,
    max_t,
    mub_set,
    mub_vectors,
    mum_generators,
    r_eta,
    sim_max_t,
    t_from_kappa,
    verify_mum,
    verify_sim,
)

from .conftest import PAULIS, SX

SQ2 = np.sqrt(2)


def bisect_max_t(gens, weight, hi=10.0, iters=200):
    """Largest t with weight·𝟙 + t·G ⪰ 0 for all G, by bisection on positivity."""
    d = gens.shape[-1]
    flat = gens.reshape(-1, d, d)

    def ok(t):
        return all(np.linalg.eigvalsh(weight * np.eye(d) + t * g).min() >= 0 for g in flat)

    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def test_qubit_generators_closed_form():
    gens = mum_generators(gell_mann_basis(2))
    for theta, s in enumerate(PAULIS):
        assert np.allclose(gens[theta, 0], -(1 + SQ2) * s / SQ2)
        assert np.allclose(gens[theta, 1], (1 + SQ2) * s / SQ2)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_generators_traceless_and_rows_cancel(d):
    gens = mum_generators(random_rotated_basis(d, d))
    assert gens.shape == (d + 1, d, d, d)
    assert np.abs(np.einsum("txii->tx", gens)).max() <= 1e-12
    assert np.abs(gens.sum(axis=1)).max() <= 1e-12


def test_literal_coefficient_breaks_the_construction():
    # with d(d+√d) in place of (d+√d) the rows no longer sum to zero
    b = gell_mann_basis(3)
    grid = relabel_grid(b)
    row = grid.sum(axis=1)
    d = 3
    literal = row[:, None] - d * (d + np.sqrt(d)) * grid
    total = literal.sum(axis=1) + (1 + np.sqrt(d)) * row
    assert np.abs(total).max() > 1.0


def test_max_t_qubit():
    # λ_min(F_1) = −(1+√2)/√2, so t_max = (1/2)·√2/(1+√2) = 1 − 1/√2
    assert np.isclose(max_t(gell_mann_basis(2)), 1 - 1 / SQ2, atol=1e-12)


@pytest.mark.parametrize("basis", [gell_mann_basis(3), random_rotated_basis(3, 5), random_rotated_basis(4, 1)])
def test_max_t_matches_bisection(basis):
    oracle = bisect_max_t(mum_generators(basis), 1.0 / basis.dim)
    assert abs(max_t(basis) - oracle) <= 1e-10
    assert max_t(basis) > 0


def test_t_from_kappa():
    assert np.isclose(t_from_kappa(2, 1.0), 0.2928932188134524, atol=1e-12)
    for d in (2, 3, 5):
        for kappa in np.linspace(1 / d + 1e-3, 1, 7):
            assert abs(kappa_from_t(d, t_from_kappa(d, kappa)) - kappa) <= 1e-12
    with pytest.raises(ValidationError):
        t_from_kappa(3, 1 / 3)
    with pytest.raises(ValidationError):
        t_from_kappa(3, 1.2)


def test_kappa_strictly_increasing():
    ts = np.linspace(0, 0.5, 100)
    for d in (2, 3, 4):
        ks = [kappa_from_t(d, t) for t in ts]
        assert np.all(np.diff(ks) > 0)


def test_qubit_mum_at_max_t_is_mub():
    mums = build_mum_set(gell_mann_basis(2))
    assert np.isclose(mums.kappa, 1.0, atol=1e-12)
    rep = verify_mum(mums, 1e-10)
    assert rep.passed, rep.deviations


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("frac", [1.0, 0.5])
def test_mum_conditions(d, frac):
    for basis in [gell_mann_basis(d)] + [random_rotated_basis(d, s) for s in range(3)]:
        mums = build_mum_set(basis, max_t(basis) * frac)
        rep = verify_mum(mums)
        assert rep.passed, rep.deviations
        assert 1 / d < mums.kappa <= 1
        p = mums.povms[0, 0]
        assert abs(np.trace(p @ p).real - kappa_from_t(d, mums.t)) <= 1e-9


def test_qutrit_shape():
    mums = build_mum_set(gell_mann_basis(3))
    assert mums.povms.shape == (4, 3, 3, 3)


def test_t_beyond_max_reports_negative_eigenvalue():
    basis = gell_mann_basis(3)
    with pytest.raises(PositivityError) as info:
        build_mum_set(basis, 1.5 * max_t(basis))
    assert info.value.worst_eigenvalue < 0


def test_verify_mum_detects_fault():
    mums = build_mum_set(gell_mann_basis(2), 0.2)
    bad = mums.povms.copy()
    bad[0, 0] = bad[0, 0] + 1e-3 * SX
    rep = verify_mum(MumSet(2, mums.t, mums.kappa, bad))
    assert not rep.passed
    assert np.isclose(rep.worst[1], 1e-3, rtol=0.5)


def test_qubit_mub_vectors():
    vecs = mub_vectors(2)
    for th, op in enumerate((PAULIS[2], PAULIS[0], PAULIS[1])):
        for v in vecs[th]:
            assert np.isclose(abs(np.vdot(v, op @ v)), 1.0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_overlap_table(d):
    vecs = mub_vectors(d)
    for a, b in itertools.product(range(d + 1), repeat=2):
        gram = np.abs(vecs[a].conj() @ vecs[b].T)
        expected = np.eye(d) if a == b else np.full((d, d), 1 / np.sqrt(d))
        assert np.abs(gram - expected).max() <= 1e-10
    rep = verify_mum(mub_set(d))
    assert rep.passed, rep.deviations


def test_mub_unsupported_dimension():
    with pytest.raises(ValidationError):
        mub_set(4)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sim_construction(d):
    sim = build_sim_set(random_rotated_basis(d, 3))
    assert sim.operators.shape == (d * d, d, d)
    assert 1 / d**3 < sim.eta <= 1 / d**2 + 1e-12
    assert verify_sim(sim).passed
    assert np.abs(np.einsum("xii->x", sim.operators) - 1 / d).max() <= 1e-9
    assert abs(sim.eta - eta_from_t(d, sim.t)) <= 1e-12


def test_qubit_sim_at_max_is_sic():
    sim = build_sim_set(gell_mann_basis(2))
    assert np.isclose(sim.eta, 0.25, atol=1e-12)
    assert sim_max_t(gell_mann_basis(2)) > 0


def test_sim_small_t_limit():
    sim = build_sim_set(gell_mann_basis(2), 1e-8)
    assert np.abs(sim.operators - np.eye(2) / 4).max() < 1e-6
    assert abs(sim.eta - 1 / 8) < 1e-12


def tetrahedron_sic():
    ns = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    return np.array([(np.eye(2) + sum(c * s for c, s in zip(n, PAULIS))) / 4 for n in ns])


def test_tetrahedron_sic_verifies():
    ops = tetrahedron_sic()
    assert verify_sim(SimSet(2, 0.0, 0.25, ops)).passed


def test_verify_sim_detects_fault():
    ops = tetrahedron_sic()
    ops[1] = np.eye(2) / 4
    rep = verify_sim(SimSet(2, 0.0, 0.25, ops))
    assert not rep.passed
    assert rep.deviations["cross_overlap"] > 1e-3


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_design_fit_mum(d):
    for frac in (1.0, 0.6, 0.2):
        basis = random_rotated_basis(d, 11)
        mums = build_mum_set(basis, max_t(basis) * frac)
        fit = conical_design_fit(mums.elements())
        assert abs(fit.k_plus - (1 + (1 - mums.kappa) / (d - 1))) <= 1e-9
        assert abs(fit.k_minus - (mums.kappa * d - 1) / (d - 1)) <= 1e-9
        assert fit.residual <= 1e-9
        assert fit.k_plus >= fit.k_minus >= 0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_design_fit_sim(d):
    sim = build_sim_set(random_rotated_basis(d, 2), 0.7 * sim_max_t(random_rotated_basis(d, 2)))
    fit = conical_design_fit(sim.operators)
    assert abs(fit.k_plus - (1 - d * sim.eta) / (d * d - 1)) <= 1e-9
    assert abs(fit.k_minus - (d**3 * sim.eta - 1) / (d * (d * d - 1))) <= 1e-9
    assert fit.residual <= 1e-9


@pytest.mark.parametrize("d", [2, 3, 5])
def test_design_fit_mub_is_projective_design(d):
    fit = conical_design_fit(mub_set(d).elements())
    assert abs(fit.k_plus - 1) <= 1e-9 and abs(fit.k_minus - 1) <= 1e-9
    assert fit.residual <= 1e-9


def test_design_fit_reports_nonzero_residual_for_non_design():
    ops = np.array([np.diag([1.0, 0]), np.diag([0, 1.0])])
    assert conical_design_fit(ops).residual > 0.1


def test_coefficients_at_kappa_one():
    for d in (2, 3, 7):
        assert (f_kappa(d, 1.0), g_kappa(d, 1.0)) == (1.0, 1.0)
        assert np.isclose(l_eta(d, 1 / d**2), r_eta(d, 1 / d**2))
