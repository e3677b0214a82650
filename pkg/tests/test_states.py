import numpy as np
import pytest

from nonbilocal import states
from nonbilocal.errors import InvalidWeights, OutOfRange


def test_bell_states_are_pure_and_orthogonal():
    mats = [states.bell(k).matrix for k in states.BELL_ORDER]
    for i, M in enumerate(mats):
        assert np.allclose(M @ M, M, atol=1e-12)
        assert np.isclose(np.trace(M).real, 1.0)
        for j in range(i):
            assert np.isclose(np.abs(np.trace(mats[j] @ M)), 0.0, atol=1e-12)


def test_bell_phi_plus_matrix():
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(states.bell("phi+").matrix, expected)


def test_bell_diagonal_weights():
    rho = states.bell_diagonal([0.4, 0.3, 0.2, 0.1])
    w = np.linalg.eigvalsh(rho.matrix)
    assert np.allclose(np.sort(w), [0.1, 0.2, 0.3, 0.4], atol=1e-12)
    with pytest.raises(InvalidWeights):
        states.bell_diagonal([0.5, 0.5, 0.5, -0.5])
    with pytest.raises(InvalidWeights):
        states.bell_diagonal([0.4, 0.4, 0.4, 0.4])


def test_werner_range_and_eigenvalues():
    rho = states.werner(1.0)
    assert np.allclose(rho.matrix, states.bell("psi-").matrix, atol=1e-12)
    assert np.allclose(states.werner(0.0).matrix, np.eye(4) / 4)
    with pytest.raises(OutOfRange):
        states.werner(1.5)
    with pytest.raises(OutOfRange):
        states.werner(-0.5)


def test_classical_separable_state():
    M = states.classical_separable().matrix
    assert np.allclose(M, np.diag([0.5, 0, 0, 0.5]))


def test_validate_flags_bad_matrices():
    bad_trace = states.DensityMatrix(np.eye(2), (2,))
    rep = states.validate(bad_trace)
    assert not rep.trace_ok and not rep.passed
    nonpsd = states.DensityMatrix(np.diag([1.5, -0.5]), (2,))
    assert not states.validate(nonpsd).psd_ok
    nonherm = states.DensityMatrix(np.array([[0.5, 0.3], [0.0, 0.5]]), (2,))
    assert not states.validate(nonherm).hermitian_ok
    good = states.validate(states.bell("phi+"))
    assert good.passed and good.failures() == []


def test_quantum_classical_structure():
    rho_a0 = np.diag([1.0, 0.0]).astype(complex)
    rho_a1 = np.full((2, 2), 0.5, dtype=complex)
    qc = states.quantum_classical([(rho_a0, 0.3, 0), (rho_a1, 0.7, 1)])
    assert qc.dims == (2, 2)
    expected = 0.3 * np.kron(rho_a0, np.diag([1, 0])) + 0.7 * np.kron(rho_a1, np.diag([0, 1]))
    assert np.allclose(qc.matrix, expected)
    cq = states.classical_quantum([(rho_a0, 0.3, 0), (rho_a1, 0.7, 1)])
    expected_cq = 0.3 * np.kron(np.diag([1, 0]), rho_a0) + 0.7 * np.kron(np.diag([0, 1]), rho_a1)
    assert np.allclose(cq.matrix, expected_cq)


def test_quantum_classical_rejects_bad_weights():
    rho_a = np.eye(2, dtype=complex) / 2
    with pytest.raises(InvalidWeights):
        states.quantum_classical([(rho_a, 0.6, 0), (rho_a, 0.6, 1)])
    with pytest.raises(InvalidWeights):
        states.quantum_classical([(rho_a, 0.5, 0), (rho_a, 0.5, 0)])


def test_random_density_reproducible():
    a = states.random_density(4, 4, seed=42)
    b = states.random_density(4, 4, seed=42)
    c = states.random_density(4, 4, seed=43)
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.allclose(a.matrix, c.matrix)
    assert states.validate(a).passed
    low = states.random_density(4, 2, seed=0)
    assert np.linalg.matrix_rank(low.matrix, tol=1e-10) == 2


def test_pure_from_schmidt():
    rho = states.pure_from_schmidt([np.sqrt(0.9), np.sqrt(0.1)])
    w = np.linalg.eigvalsh(rho.matrix)
    assert np.isclose(w[-1], 1.0)
    rb = states.marginal(rho, 1)
    assert np.allclose(np.sort(np.linalg.eigvalsh(rb.matrix)), [0.1, 0.9], atol=1e-12)


def test_swap_bipartite_is_involution():
    rho = states.random_bipartite(2, 3, 6, seed=5)
    back = states.swap_bipartite(states.swap_bipartite(rho))
    assert np.allclose(back.matrix, rho.matrix)
    qc = states.quantum_classical(
        [(np.diag([1.0, 0.0]).astype(complex), 0.4, 0),
         (np.diag([0.0, 1.0]).astype(complex), 0.6, 1)]
    )
    sw = states.swap_bipartite(qc)
    expected = 0.4 * np.kron(np.diag([1, 0]), np.diag([1, 0])) + 0.6 * np.kron(
        np.diag([0, 1]), np.diag([0, 1])
    )
    assert np.allclose(sw.matrix, expected)


def test_conjugate_local_preserves_marginal_spectra():
    rng = np.random.default_rng(9)
    rho = states.random_bipartite(2, 2, 4, seed=7)
    from nonbilocal.optimizer import haar_unitary

    U = [haar_unitary(2, rng), haar_unitary(2, rng)]
    conj = states.conjugate_local(rho, U)
    assert states.validate(conj).passed
    for k in (0, 1):
        wa = np.linalg.eigvalsh(states.marginal(rho, k).matrix)
        wb = np.linalg.eigvalsh(states.marginal(conj, k).matrix)
        assert np.allclose(wa, wb, atol=1e-10)
