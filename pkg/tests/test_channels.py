import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_choi, matrix_units, naive_apply, random_isometry
from twopath.bases import state_basis, unitary_basis
from twopath.channels import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    canonical_kraus,
    choi_matrix,
    connecting_matrix,
    dephasing_channel,
    identity_channel,
    is_linearly_independent,
    is_trace_preserving,
    random_channel,
    random_density,
)
from twopath.errors import ChannelsDiffer, DimensionError, NotLinearlyIndependent
from twopath.linalg import matrix_rank, numerical_rank, vec


def test_identity_channel_leaves_state_alone():
    rho = random_density(2, seed=1)
    out = apply_channel(identity_channel(2), rho)
    assert np.allclose(out.matrix, rho.matrix, atol=1e-15)


def test_dephasing_kills_coherence():
    rho = DensityMatrix(np.array([[1, 1], [1, 1]]) / 2)
    out = apply_channel(dephasing_channel(2), rho)
    assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_apply_channel_matches_naive_loop(seed):
    ch = random_channel(2, 3, 3, seed=seed)
    rho = random_density(2, seed=100 + seed)
    out = apply_channel(ch, rho)
    assert out.dim == 3
    assert np.max(np.abs(out.matrix - naive_apply(ch.kraus_ops, rho.matrix))) < 1e-12
    assert abs(np.trace(out.matrix) - 1) < 1e-12
    assert np.linalg.eigvalsh(out.matrix)[0] > -1e-10


def test_apply_channel_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_channel(identity_channel(2), random_density(3))


def test_trace_preservation_checks():
    assert is_trace_preserving(identity_channel(2))
    assert is_trace_preserving(dephasing_channel(2))
    assert not is_trace_preserving([np.eye(2) / np.sqrt(2)])
    with pytest.raises(DimensionError):
        KrausChannel((np.eye(2) / np.sqrt(2),))


def test_kraus_channel_rejects_bad_lists():
    with pytest.raises(DimensionError):
        KrausChannel(())
    with pytest.raises(DimensionError):
        KrausChannel((np.eye(2), np.eye(3)))


def test_density_matrix_validation():
    with pytest.raises(DimensionError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(2))
    with pytest.raises(DimensionError):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))
    assert DensityMatrix.maximally_mixed(3).dim == 3


def test_choi_identity_is_maximally_entangled_projector():
    j = choi_matrix(identity_channel(2))
    phi = np.array([1, 0, 0, 1])
    assert np.allclose(j, np.outer(phi, phi))
    assert matrix_rank(j) == 1 and np.isclose(np.trace(j), 2)


def test_choi_dephasing_against_matrix_units():
    ch = dephasing_channel(2)
    j = choi_matrix(ch)
    assert np.allclose(j, brute_choi(lambda e: naive_apply(ch.kraus_ops, e), 2))
    assert matrix_rank(j) == 2


@pytest.mark.parametrize("sd,td,k", [(2, 2, 3), (2, 3, 2), (3, 2, 4)])
def test_choi_against_brute_force(sd, td, k):
    ch = random_channel(sd, td, k, seed=sd * 10 + td)
    j = choi_matrix(ch)
    assert np.max(np.abs(j - brute_choi(lambda e: naive_apply(ch.kraus_ops, e), sd))) < 1e-12
    assert np.linalg.eigvalsh(j)[0] > -1e-12
    # partial trace over the output factor
    assert np.allclose(np.einsum("iaja->ij", j.reshape(sd, td, sd, td)), np.eye(sd))


def test_choi_rank_equals_kraus_number_many_channels():
    rng = np.random.default_rng(3)
    for trial in range(100):
        sd, td = rng.integers(2, 5, size=2)
        count = int(rng.integers(-(-sd // td), sd * td + 3))
        ch = random_channel(int(sd), int(td), count, seed=trial)
        gram = np.array([[np.vdot(a, b) for b in ch.kraus_ops] for a in ch.kraus_ops])
        _, k = canonical_kraus(ch)
        assert matrix_rank(choi_matrix(ch)) == k == matrix_rank(gram)


def test_canonical_collapses_redundant_copies():
    ch = KrausChannel((np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)))
    can, k = canonical_kraus(ch)
    assert k == 1
    assert np.allclose(can.kraus_ops[0], np.eye(2))


def test_canonical_keeps_independent_projectors():
    _, k = canonical_kraus(dephasing_channel(2))
    assert k == 2


def test_canonical_six_ops_dim_two():
    ch = random_channel(2, 2, 6, seed=9)
    can, k = canonical_kraus(ch)
    assert k <= 4
    assert is_linearly_independent(can)
    for e in matrix_units(2):
        assert np.max(np.abs(can.act(e) - ch.act(e))) < 1e-10
    assert np.max(np.abs(choi_matrix(can) - choi_matrix(ch))) < 1e-10


def test_canonical_is_deterministic():
    ch = random_channel(3, 3, 5, seed=4)
    assert canonical_kraus(ch)[0] == canonical_kraus(ch)[0]


def test_connecting_matrix_simple_split():
    theta = 0.7
    v = np.eye(2)
    b = KrausChannel((v / np.sqrt(2), v * np.exp(1j * theta) / np.sqrt(2)))
    m = connecting_matrix(identity_channel(2), b)
    assert np.allclose(m, np.array([[1], [np.exp(1j * theta)]]) / np.sqrt(2))
    assert np.allclose(m.conj().T @ m, 1)


def test_connecting_matrix_self_is_identity():
    ch = random_channel(2, 2, 3, seed=5)
    assert np.allclose(connecting_matrix(ch, ch), np.eye(3), atol=1e-12)


@given(seed=st.integers(0, 10**6), extra=st.integers(0, 3))
def test_connecting_matrix_recovers_isometry(seed, extra):
    rng = np.random.default_rng(seed)
    ch = random_channel(2, 2, 3, seed=seed)
    m = random_isometry(3 + extra, 3, rng)
    rotated = KrausChannel(tuple(np.einsum("lk,kij->lij", m, ch.kraus_ops)))
    got = connecting_matrix(ch, rotated)
    assert np.max(np.abs(got - m)) < 1e-10
    assert np.max(np.abs(got.conj().T @ got - np.eye(3))) < 1e-10


def test_connecting_matrix_errors():
    with pytest.raises(ChannelsDiffer):
        connecting_matrix(identity_channel(2), dephasing_channel(2))
    dependent = KrausChannel((np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)))
    with pytest.raises(NotLinearlyIndependent):
        connecting_matrix(dependent, identity_channel(2))


def test_random_channel_contract():
    u = random_channel(2, 2, 1, seed=2).kraus_ops[0]
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    ch = random_channel(2, 2, 4, seed=7)
    assert is_trace_preserving(ch, 1e-12)
    assert np.array_equal(ch.kraus_ops, random_channel(2, 2, 4, seed=7).kraus_ops)
    with pytest.raises(DimensionError):
        random_channel(4, 1, 2)


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_state_basis_spans(dim):
    states = state_basis(dim)
    assert len(states) == dim * dim
    assert matrix_rank(np.array([vec(s.matrix) for s in states])) == dim * dim


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_unitary_basis_trace_orthogonal(dim):
    us = unitary_basis(dim)
    assert len(us) == dim * dim
    gram = np.array([[np.trace(a.conj().T @ b) for b in us] for a in us])
    assert np.allclose(gram, dim * np.eye(dim * dim), atol=1e-12)


def test_unitary_basis_qubit_is_pauli_up_to_phase():
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1, -1]), np.array([[0, -1j], [1j, 0]])]
    for u in unitary_basis(2):
        overlaps = [abs(np.trace(p.conj().T @ u)) / 2 for p in paulis]
        assert np.isclose(max(overlaps), 1)


def test_numerical_rank_floor():
    s = np.array([3e-17, 1e-17])
    assert numerical_rank(s) == 2
    assert numerical_rank(s, abs_floor=1e-12) == 0
    assert numerical_rank(np.array([1.0, 1e-10])) == 1
