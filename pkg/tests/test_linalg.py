import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conical_lab.linalg import (
    ValidationError,
    fidelity,
    herm_eig,
    kron,
    partial_trace,
    psd_power,
    swap_operator,
)
from conical_lab.states import random_density

from .conftest import SX, SZ, random_complex, random_hermitian


def naive_kron(a, b):
    n, m = a.shape
    p, q = b.shape
    out = np.zeros((n * p, m * q), dtype=complex)
    for i in range(n):
        for j in range(m):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = a[i, j] * b[k, l]
    return out


def naive_partial_trace(m, da, db, keep):
    if keep == "B":
        out = np.zeros((db, db), dtype=complex)
        for j in range(db):
            for k in range(db):
                out[j, k] = sum(m[a * db + j, a * db + k] for a in range(da))
    else:
        out = np.zeros((da, da), dtype=complex)
        for a in range(da):
            for b in range(da):
                out[a, b] = sum(m[a * db + j, b * db + j] for j in range(db))
    return out


def test_kron_identity_and_diagonal():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_projector_block(rng):
    m = random_complex(3, 3, rng)
    p0 = np.diag([1.0, 0.0])
    out = kron(p0, m)
    assert np.allclose(out, naive_kron(p0, m))
    assert np.allclose(out[:3, :3], m)
    assert np.allclose(out[3:, :], 0)


def test_partial_trace_product_and_bell(rng):
    ra, rb = random_density(2, seed=1), random_density(3, seed=2)
    assert np.allclose(partial_trace(np.kron(ra, rb), (2, 3), "B"), rb, atol=1e-12)
    assert np.allclose(partial_trace(np.kron(ra, rb), (2, 3), "A"), ra, atol=1e-12)
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(psi, psi), (2, 2), "B"), np.eye(2) / 2)


def test_partial_trace_matches_index_sum(rng):
    m = random_complex(6, 6, rng)
    for keep in ("A", "B"):
        assert np.allclose(partial_trace(m, (2, 3), keep), naive_partial_trace(m, 2, 3, keep), atol=1e-12)
        assert np.isclose(np.trace(partial_trace(m, (2, 3), keep)), np.trace(m))


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ValidationError):
        partial_trace(np.eye(5), (2, 3))


def test_partial_trace_of_kron_is_scaled_factor(rng):
    for _ in range(20):
        a, b = random_complex(3, 3, rng), random_complex(2, 2, rng)
        assert np.abs(partial_trace(np.kron(a, b), (3, 2), "B") - np.trace(a) * b).max() <= 1e-12


def test_herm_eig_simple_cases():
    w, _ = herm_eig(np.eye(4))
    assert np.allclose(w, 1)
    w, v = herm_eig(SX)
    assert np.allclose(w, [1, -1])
    # phase convention: first nonzero component real positive
    for k in range(2):
        first = v[np.flatnonzero(np.abs(v[:, k]) > 1e-12)[0], k]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_herm_eig_reconstruction(rng):
    m = random_hermitian(5, rng)
    w, v = herm_eig(m)
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(m @ v - v * w) <= 1e-10 * np.linalg.norm(m)
    assert np.linalg.norm(v.conj().T @ v - np.eye(5)) <= 1e-10


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        herm_eig(np.array([[0, 1], [0, 0]]))


def test_herm_eig_density_spectrum():
    for seed in range(10):
        w, _ = herm_eig(random_density(6, seed=seed))
        assert w.min() >= -1e-10 and w.max() <= 1 + 1e-10
        assert abs(w.sum() - 1) <= 1e-10


def test_psd_power_cases(rng):
    for d in (2, 3, 5):
        assert np.allclose(psd_power(np.eye(d) / d, -0.5), np.sqrt(d) * np.eye(d))
    v = random_complex(4, 1, rng)
    p = v @ v.conj().T / np.vdot(v, v).real
    assert np.allclose(psd_power(p, -0.5), p, atol=1e-12)
    g = random_complex(4, 4, rng)
    m = g @ g.conj().T
    root = psd_power(m, 0.5)
    assert np.linalg.norm(root @ root - m) <= 1e-10 * np.linalg.norm(m)


def test_psd_power_support_composition(rng):
    g = random_complex(5, 3, rng)
    m = g @ g.conj().T  # rank 3
    back = psd_power(psd_power(m, 0.5), 2.0)
    assert np.linalg.norm(back - m) <= 1e-10 * np.linalg.norm(m)
    proj = psd_power(m, 0.0)
    assert np.allclose(psd_power(m, -0.5) @ psd_power(m, 0.5), proj, atol=1e-10)


def test_psd_power_rejects_negative():
    with pytest.raises(ValidationError):
        psd_power(np.diag([1.0, -0.5]), 0.5)


def test_swap_operator_small():
    assert np.allclose(swap_operator(1), [[1]])
    expected = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(swap_operator(2), expected)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_swap_involution_and_trace(d):
    f = swap_operator(d)
    assert np.allclose(f @ f, np.eye(d * d))
    assert np.isclose(np.trace(f), d)


def test_swap_acts_on_product_vectors(rng):
    a, b = random_complex(3, 1, rng)[:, 0], random_complex(3, 1, rng)[:, 0]
    assert np.allclose(swap_operator(3) @ np.kron(a, b), np.kron(b, a))


@settings(max_examples=100, deadline=None)
@given(d=st.integers(2, 5), seed=st.integers(0, 2**31))
def test_swap_trick(d, seed):
    rng = np.random.default_rng(seed)
    m, n = random_complex(d, d, rng), random_complex(d, d, rng)
    lhs = np.trace(m @ n)
    rhs = np.trace(np.kron(m, n) @ swap_operator(d))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_fidelity_cases(rng):
    rho = random_density(3, seed=4)
    assert np.isclose(fidelity(rho, rho), 1.0, atol=1e-10)
    assert np.isclose(fidelity(np.diag([1.0, 0]), np.diag([0, 1.0])), 0.0, atol=1e-12)
    for _ in range(10):
        u = random_complex(3, 1, rng)[:, 0]
        v = random_complex(3, 1, rng)[:, 0]
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        f = fidelity(np.outer(u, u.conj()), np.outer(v, v.conj()))
        assert np.isclose(f, abs(np.vdot(u, v)) ** 2, atol=1e-8)


def test_fidelity_symmetric_and_bounded():
    for seed in range(10):
        r, s = random_density(4, seed=seed), random_density(4, rank=2, seed=seed + 100)
        f1, f2 = fidelity(r, s), fidelity(s, r)
        assert abs(f1 - f2) <= 1e-9
        assert 0 <= f1 <= 1 + 1e-9


def test_fidelity_rejects_non_states():
    with pytest.raises(ValidationError):
        fidelity(np.eye(2), np.eye(2) / 2)
