import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from holospin import qcore


def random_states():
    return st.lists(st.complex_numbers(max_magnitude=5.0, allow_nan=False,
                                       allow_infinity=False),
                    min_size=5, max_size=5).map(np.array)


class TestNormalize:
    def test_scaling(self):
        out = qcore.normalize(np.array([2.0, 0, 0, 0, 0]))
        np.testing.assert_allclose(out, [1, 0, 0, 0, 0])

    def test_symmetry(self):
        out = qcore.normalize(np.array([1.0, 1.0, 0, 0, 0]))
        np.testing.assert_allclose(out, np.array([1, 1, 0, 0, 0]) / np.sqrt(2))

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            qcore.normalize(np.zeros(5))

    @settings(deadline=None)
    @given(random_states())
    def test_idempotent(self, vec):
        if np.linalg.norm(vec) < 1e-6:
            return
        once = qcore.normalize(vec)
        twice = qcore.normalize(once)
        assert np.max(np.abs(twice - once)) < 1e-12
        assert abs(np.linalg.norm(once) - 1.0) < 1e-9


class TestEmbedProject:
    def test_embed_basis(self):
        np.testing.assert_allclose(qcore.embed_qubit(1, 0), qcore.basis_state(0))
        np.testing.assert_allclose(qcore.embed_qubit(0, 1), qcore.basis_state(1))

    def test_embed_superposition(self):
        psi = qcore.embed_qubit(1 / np.sqrt(2), 1j / np.sqrt(2))
        np.testing.assert_allclose(psi[:2], [1 / np.sqrt(2), 1j / np.sqrt(2)])
        assert np.all(psi[2:] == 0)

    def test_embed_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            qcore.embed_qubit(1.0, 1.0)

    def test_project_pure_zero(self):
        block, leak = qcore.project_qubit(np.diag([1.0, 0, 0, 0, 0]).astype(complex))
        np.testing.assert_allclose(block, np.diag([1.0, 0]))
        assert leak == pytest.approx(0.0, abs=1e-15)

    def test_project_ancilla(self):
        block, leak = qcore.project_qubit(np.diag([0, 0, 1.0, 0, 0]).astype(complex))
        assert np.all(block == 0)
        assert leak == pytest.approx(1.0)

    def test_project_half_excited(self):
        rho = np.diag([0.5, 0, 0, 0.5, 0]).astype(complex)
        block, leak = qcore.project_qubit(rho)
        np.testing.assert_allclose(block, np.diag([0.5, 0]))
        assert leak == pytest.approx(0.5)

    @settings(deadline=None)
    @given(random_states())
    def test_block_trace_plus_leakage(self, vec):
        if np.linalg.norm(vec) < 1e-6:
            return
        rho = qcore.density_from_state(qcore.normalize(vec))
        block, leak = qcore.project_qubit(rho)
        assert abs(np.trace(block).real + leak - 1.0) < 1e-9


class TestDenseExpm:
    def test_zero_matrix(self):
        np.testing.assert_allclose(qcore.dense_expm(np.zeros((5, 5))), np.eye(5))

    def test_diagonal(self):
        d = np.array([0.3, -1.2, 0.0, 2.0, -0.7])
        out = qcore.dense_expm(-1j * np.diag(d), 1.7)
        np.testing.assert_allclose(out, np.diag(np.exp(-1j * d * 1.7)), atol=1e-14)

    def test_sigma_x_block_closed_form(self):
        # exp(-i t sx) on the (|0>,|1>) block = cos t - i sin t sx, identity elsewhere
        m = np.zeros((5, 5), dtype=complex)
        m[0, 1] = m[1, 0] = -1j
        t = 0.83
        out = qcore.dense_expm(m, t)
        expect = np.eye(5, dtype=complex)
        expect[0, 0] = expect[1, 1] = np.cos(t)
        expect[0, 1] = expect[1, 0] = -1j * np.sin(t)
        np.testing.assert_allclose(out, expect, atol=1e-13)

    def test_matches_reference_implementation(self, rng):
        for _ in range(20):
            m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            m *= 10.0 / np.linalg.norm(m, 2) * rng.uniform(0.05, 1.0)
            mine = qcore.dense_expm(m)
            ref = scipy.linalg.expm(m)
            assert np.max(np.abs(mine - ref)) / np.max(np.abs(ref)) < 1e-12

    def test_semigroup_and_unitarity(self, rng):
        for _ in range(20):
            m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            m = 0.5 * (m - m.conj().T)
            t1, t2 = rng.uniform(0.1, 2.0, size=2)
            left = qcore.dense_expm(m, t1) @ qcore.dense_expm(m, t2)
            right = qcore.dense_expm(m, t1 + t2)
            assert np.max(np.abs(left - right)) < 1e-10
            u = qcore.dense_expm(m, t1)
            assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-10

    def test_rejects_non_finite(self):
        bad = np.zeros((5, 5))
        bad[0, 0] = np.inf
        with pytest.raises(ValueError):
            qcore.dense_expm(bad)


class TestCheckDensity:
    def test_accepts_valid(self):
        qcore.check_density(np.diag([0.25, 0.25, 0.25, 0.25, 0.0]).astype(complex))

    def test_rejects_non_hermitian(self):
        rho = np.diag([1.0, 0, 0, 0, 0]).astype(complex)
        rho[0, 1] = 1e-6
        with pytest.raises(ValueError, match="Hermitian"):
            qcore.check_density(rho)

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            qcore.check_density(np.diag([0.5, 0, 0, 0, 0]).astype(complex))

    def test_rejects_negative(self):
        rho = np.diag([1.1, -0.1, 0, 0, 0]).astype(complex)
        with pytest.raises(ValueError, match="positive"):
            qcore.check_density(rho)
