import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import blockwise_glued, matrix_units, random_gluing, random_isometry, random_unit_vector
from twopath.bases import state_basis
from twopath.channels import (
    DensityMatrix,
    KrausChannel,
    canonical_kraus,
    choi_matrix,
    connecting_matrix,
    identity_channel,
    random_channel,
    random_density,
)
from twopath.errors import DimensionError, InvalidGluing, NormTooLarge, NotUnitary
from twopath.gluing import (
    GluingMatrix,
    apply_glued,
    extend_occupation,
    glue,
    is_subspace_preserving,
    lsp_gluing,
    rebase_gluing,
    validate_gluing_matrix,
)
from twopath.interferometer import PATH_PLUS, prepare_input


def test_validate_gluing_matrix_examples():
    assert validate_gluing_matrix(np.array([[1.0]]))
    assert not validate_gluing_matrix(np.array([[1.2]]))
    c1, c2 = np.array([0.6, 0.8j]), np.array([1, 1, 1]) / np.sqrt(3)
    assert validate_gluing_matrix(np.outer(c1, c2.conj()))


def test_gluing_matrix_rejects_invalid():
    with pytest.raises(InvalidGluing):
        GluingMatrix(np.array([[1.2]]))
    with pytest.raises(InvalidGluing):
        GluingMatrix(np.array([[0.5]]), lsp_factors=(np.array([1.0]), np.array([0.3])))


def test_identity_gluing_blocks():
    r, phi = 0.7, 1.1
    rho = random_density(2, seed=3).matrix
    g = glue(identity_channel(2), identity_channel(2), [[r * np.exp(1j * phi)]])
    out = apply_glued(g, prepare_input(rho)).matrix
    assert np.allclose(out[:2, :2], rho / 2)
    assert np.allclose(out[2:, 2:], rho / 2)
    assert np.allclose(out[:2, 2:], r * np.exp(1j * phi) * rho / 2)


def test_zero_gluing_is_block_diagonal():
    ch = random_channel(2, 2, 2, seed=1)
    g = glue(ch, ch, np.zeros((2, 2)))
    out = apply_glued(g, prepare_input(random_density(2, seed=2))).matrix
    assert np.allclose(out[:2, 2:], 0)


@pytest.mark.parametrize("seed", range(6))
def test_apply_glued_matches_blockwise_oracle(seed):
    rng = np.random.default_rng(seed)
    phi1 = random_channel(2, 2, 3, seed=seed)
    phi2 = random_channel(2, 2, 2, seed=seed + 50)
    c = random_gluing(3, 2, rng)
    g = glue(phi1, phi2, c)
    for rho in state_basis(4):
        out = apply_glued(g, rho).matrix
        ref = blockwise_glued(phi1.kraus_ops, phi2.kraus_ops, c, rho.matrix)
        assert np.max(np.abs(out - ref)) < 1e-12
        assert abs(np.trace(out) - 1) < 1e-12
        assert np.linalg.eigvalsh(out)[0] > -1e-10


def test_apply_glued_errors():
    g = glue(identity_channel(2), identity_channel(2), [[1.0]])
    with pytest.raises(DimensionError):
        apply_glued(g, random_density(2))
    with pytest.raises(DimensionError):
        glue(identity_channel(2), identity_channel(2), np.zeros((2, 1)))


def test_lsp_gluing_examples():
    assert np.allclose(lsp_gluing([1], [1]).C, [[1]])
    g = lsp_gluing([1, 0], [0, 1])
    assert np.allclose(g.C, [[0, 1], [0, 0]])
    assert g.is_lsp
    with pytest.raises(NormTooLarge):
        lsp_gluing([1, 1], [1])


def test_lsp_gluing_unit_vectors_saturate(rng):
    c1, c2 = random_unit_vector(3, rng), random_unit_vector(2, rng)
    g = lsp_gluing(c1, c2)
    evals = np.linalg.eigvalsh(np.eye(3) - g.C @ g.C.conj().T)
    assert evals[0] > -1e-12 and abs(evals[0]) < 1e-12


def test_lsp_off_diagonal_block_is_v_rho_wdag(rng):
    phi1, phi2 = random_channel(3, 3, 2, seed=1), random_channel(3, 3, 3, seed=2)
    c1, c2 = random_unit_vector(2, rng) * 0.9, random_unit_vector(3, rng)
    g = glue(phi1, phi2, lsp_gluing(c1, c2))
    x = random_density(6, seed=5).matrix
    out = g.act(x)
    assert np.max(np.abs(out[:3, 3:] - g.V @ x[:3, 3:] @ g.W.conj().T)) < 1e-13


def test_gluing_map_is_injective(rng):
    phi1, phi2 = random_channel(2, 2, 2, seed=11), random_channel(2, 2, 3, seed=12)
    for _ in range(10):
        c = random_gluing(2, 3, rng, norm=0.5)
        d = c.copy()
        i, j = rng.integers(2), rng.integers(3)
        d[i, j] += 1e-6
        g1, g2 = glue(phi1, phi2, c), glue(phi1, phi2, d)
        diff = max(np.max(np.abs(g1.act(e) - g2.act(e))) for e in matrix_units(4))
        assert diff > 1e-9


def test_subspace_preserving_random_gluings():
    rng = np.random.default_rng(8)
    for trial in range(100):
        d = int(rng.integers(1, 4))
        n, m = int(rng.integers(1, d * d + 1)), int(rng.integers(1, d * d + 1))
        phi1 = canonical_kraus(random_channel(d, d, n, seed=trial))[0]
        phi2 = canonical_kraus(random_channel(d, d, m, seed=trial + 1000))[0]
        g = glue(phi1, phi2, random_gluing(len(phi1), len(phi2), rng))
        assert is_subspace_preserving(g.act, d)


def test_swap_is_not_subspace_preserving():
    swap = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert not is_subspace_preserving(lambda x: swap @ x @ swap.T, 2)


def test_rebase_examples():
    c = np.array([[0.3, 0.1j], [0.2, -0.4]])
    assert np.allclose(rebase_gluing(c, np.eye(2), np.eye(2)).C, c)
    a, b = 0.4, 1.3
    out = rebase_gluing([[0.5]], [[np.exp(1j * a)]], [[np.exp(1j * b)]])
    assert np.isclose(out.C[0, 0], 0.5 * np.exp(1j * (a - b)))
    with pytest.raises(NotUnitary):
        rebase_gluing(c, 2 * np.eye(2), np.eye(2))


@given(seed=st.integers(0, 10**6))
def test_rebased_gluing_gives_same_action(seed):
    rng = np.random.default_rng(seed)
    phi1, phi2 = random_channel(2, 2, 3, seed=seed), random_channel(2, 2, 2, seed=seed + 1)
    u1, u2 = random_isometry(3, 3, rng), random_isometry(2, 2, rng)
    rot1 = KrausChannel(tuple(np.einsum("lk,kij->lij", u1.T, phi1.kraus_ops)))
    rot2 = KrausChannel(tuple(np.einsum("lk,kij->lij", u2.T, phi2.kraus_ops)))
    c = random_gluing(3, 2, rng)
    # rot_l = sum_k M_lk phi_k gives C' = conj(M1) C M2^T
    m1, m2 = connecting_matrix(phi1, rot1), connecting_matrix(phi2, rot2)
    c_new = rebase_gluing(c, m1.conj(), m2.conj()).C
    g_old, g_new = glue(phi1, phi2, c), glue(rot1, rot2, c_new)
    for e in matrix_units(4):
        assert np.max(np.abs(g_old.act(e) - g_new.act(e))) < 1e-10


def test_glue_rebase_flag_canonicalizes(rng):
    phi1, phi2 = random_channel(2, 2, 2, seed=3), random_channel(2, 2, 3, seed=4)
    c = random_gluing(2, 3, rng)
    plain = glue(phi1, phi2, c)
    rebased = glue(phi1, phi2, c, rebase=True)
    assert rebased.phi1 == canonical_kraus(phi1)[0]
    for e in matrix_units(4):
        assert np.max(np.abs(plain.act(e) - rebased.act(e))) < 1e-10


def test_glue_canonicalizes_dependent_lists():
    dependent = KrausChannel((np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)))
    g = glue(dependent, identity_channel(2), [[1.0]])
    assert len(g.phi1) == 1


def test_extend_identity_phase():
    phi = 0.9
    ext = extend_occupation(identity_channel(2), [np.exp(1j * phi)])
    x = np.zeros((3, 3), dtype=complex)
    x[0, 2] = 1  # |1><0|
    assert np.allclose(ext.act(x), np.exp(1j * phi) * x)


def test_extend_zero_coefficient_destroys_coherence():
    ext = extend_occupation(identity_channel(2), [0])
    x = np.zeros((3, 3), dtype=complex)
    x[1, 2] = 1
    assert np.allclose(ext.act(x), 0)
    vac = np.zeros((3, 3))
    vac[2, 2] = 1
    assert np.allclose(ext.act(vac), vac)


def test_extend_random_channel(rng):
    ch = random_channel(2, 2, 3, seed=21)
    c1 = random_unit_vector(3, rng) * 0.7
    ext = extend_occupation(ch, c1)
    j = choi_matrix(ext)
    assert np.linalg.eigvalsh(j)[0] > -1e-10
    total = sum(k.conj().T @ k for k in ext.kraus_ops)
    assert np.max(np.abs(total - np.eye(3))) < 1e-10
    v = np.einsum("k,kij->ij", c1, ch.kraus_ops)
    for i in range(2):
        x = np.zeros((3, 3), dtype=complex)
        x[i, 2] = 1
        out = ext.act(x)
        assert np.max(np.abs(out[:2, 2] - v[:, i])) < 1e-12
        assert np.max(np.abs(out[:2, :2])) < 1e-15
    with pytest.raises(NormTooLarge):
        extend_occupation(ch, [1, 1, 0])


def test_extend_restricts_to_channel():
    ch = random_channel(3, 3, 2, seed=2)
    ext = extend_occupation(ch, [0.6, 0.8])
    for e in matrix_units(3):
        big = np.zeros((4, 4), dtype=complex)
        big[:3, :3] = e
        out = ext.act(big)
        assert np.max(np.abs(out[:3, :3] - ch.act(e))) < 1e-12
        assert np.max(np.abs(out[3])) < 1e-15


def test_glued_output_is_density_matrix_type():
    g = glue(identity_channel(1), identity_channel(1), [[1.0]])
    out = g(DensityMatrix(np.outer(PATH_PLUS, PATH_PLUS.conj())))
    assert isinstance(out, DensityMatrix)
    assert np.allclose(out.matrix, np.full((2, 2), 0.5))
