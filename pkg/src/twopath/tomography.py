"""Recovering gluing matrices from interference data.

Two routes are provided. The standard interferometer yields the operator
``R = sum C_nm W_m^dagger V_n`` and hence ``C`` only up to the kernel of
``C -> R``. The generalized interferometer, with a variable unitary after the
devices, yields the whole map ``U -> sum C_nm W_m^dagger U V_n``, which
always determines ``C``.
"""
from dataclasses import dataclass, field

import numpy as np

from .bases import state_basis, unitary_basis
from .channels import _as_array
from .errors import DimensionError, NotSpanning, OracleInconsistent, RankDeficient
from .gluing import validate_gluing_matrix
from .linalg import (
    REL_RANK_TOL,
    dag,
    haar_unitary,
    matrix_rank,
    min_eigenvalue,
    numerical_rank,
    orthonormal_complement,
    orthonormal_range,
    unvec,
    vec,
)

__all__ = [
    "TomographyResult",
    "nonsingular_unitary_family",
    "reconstruct_R",
    "recover_C_generalized",
    "recover_C_standard",
    "recover_C_steered",
    "state_basis",
    "unitary_basis",
]


@dataclass(frozen=True)
class TomographyResult:
    C_hat: np.ndarray
    identifiable: bool
    identifiable_subspace_rank: int
    residual: float
    undetermined_directions: list = field(default_factory=list)
    family_rank: int = None

    @property
    def rank(self):
        return self.identifiable_subspace_rank


# Kraus products have entries of order one, so anything below this is rounding noise
ABS_RANK_FLOOR = 1e-12


def _pinv_solve(a, b, rel_tol=REL_RANK_TOL, abs_floor=0.0):
    """Minimal-norm least-squares solution with a relative singular-value cut.

    Returns ``(x, rank, null_basis)`` where ``null_basis`` has orthonormal
    columns spanning the numerically-zero directions of ``a``.
    """
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    r = numerical_rank(s, rel_tol, abs_floor)
    x = dag(vh[:r]) @ ((dag(u[:, :r]) @ b) / s[:r])
    rowspace = dag(vh[:r])
    null = orthonormal_complement(rowspace, a.shape[1])
    return x, r, null


def _phase_normalize(v):
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k]) if abs(v[k]) > 0 else v


def _trace_rows(ops):
    # Tr(F X) = vec(X^T) . vec(F)
    return np.array([vec(np.asarray(x).T) for x in ops])


def reconstruct_R(e_values, rel_tol=REL_RANK_TOL):
    """Least-squares ``R`` from pairs ``(rho_j, E_j)`` with ``E_j = Tr(R rho_j)/2``.

    Raises :class:`RankDeficient`, carrying the minimal-norm solution on the
    span of the supplied states, when they do not span the operator space.
    """
    if not e_values:
        raise DimensionError("no interference data supplied")
    states = [_as_array(rho) for rho, _ in e_values]
    dim = states[0].shape[0]
    a = 0.5 * _trace_rows(states)
    b = np.array([complex(e) for _, e in e_values])
    x, r, _ = _pinv_solve(a, b, rel_tol)
    sol = unvec(x, (dim, dim))
    if r < dim * dim:
        raise RankDeficient(sol, r, dim * dim)
    return sol


def _eta_matrix(ops1, ops2, u):
    """``M[(n, m)] = W_m^dagger U V_n`` for all pairs, shape (N, M, dS, dS)."""
    return np.einsum("mji,jk,nkl->nmil", ops2.conj(), u, ops1)


def recover_C_standard(r, phi1, phi2, rel_tol=REL_RANK_TOL):
    """Solve ``R = sum C_nm W_m^dagger V_n`` for ``C`` in the minimal-norm sense.

    The map is identifiable when the products ``W_m^dagger V_n`` are linearly
    independent; otherwise the kernel directions are reported and the
    returned ``C_hat`` has no component along them.
    """
    ops1, ops2 = phi1.kraus_ops, phi2.kraus_ops
    n, m = len(ops1), len(ops2)
    prods = _eta_matrix(ops1, ops2, np.eye(phi1.target_dim))
    a = np.array([vec(p) for p in prods.reshape(n * m, *prods.shape[2:])]).T
    b = vec(np.asarray(r, dtype=complex))
    x, rank, null = _pinv_solve(a, b, rel_tol, ABS_RANK_FLOOR)
    residual = float(np.linalg.norm(a @ x - b))
    dirs = [_phase_normalize(null[:, j]).reshape(n, m) for j in range(null.shape[1])]
    return TomographyResult(x.reshape(n, m), rank == n * m, rank, residual, dirs)


def _extended_basis(ops):
    """Complete linearly independent ``ops`` to a basis of all operators of that shape.

    The added elements are an orthonormal basis of the orthogonal complement of
    their span, found by pivoted Gram-Schmidt over the matrix units.
    """
    shape = ops.shape[1:]
    vecs = np.array([vec(v) for v in ops]).T
    extra = orthonormal_complement(orthonormal_range(vecs), vecs.shape[0])
    added = [unvec(extra[:, j], shape) for j in range(extra.shape[1])]
    return np.concatenate([ops, np.array(added).reshape(-1, *shape)])


def _solve_from_F(f_values, unitaries, phi1, phi2, tol):
    """Expand the reconstructed ``F(U_j)`` in the basis ``W~_k'^dagger U V~_k``.

    Returns the leading N x M block of the coefficient matrix and a residual
    combining the fit error with the weight outside that block.
    """
    ops1, ops2 = phi1.kraus_ops, phi2.kraus_ops
    n, m = len(ops1), len(ops2)
    ext1, ext2 = _extended_basis(ops1), _extended_basis(ops2)
    k1, k2 = len(ext1), len(ext2)
    cols = np.concatenate(
        [_eta_matrix(ext1, ext2, u).reshape(k1 * k2, -1, order="C") for u in unitaries], axis=1
    )
    # each (k, k') column stacks all entries of W~^dagger U_j V~ over j
    a = cols.T
    b = np.concatenate([np.asarray(f).reshape(-1) for f in f_values])
    x, rank, _ = _pinv_solve(a, b, REL_RANK_TOL)
    if rank < k1 * k2:
        raise OracleInconsistent(f"basis expansion is singular (rank {rank} < {k1 * k2})")
    coeffs = x.reshape(k1, k2)
    c_hat = coeffs[:n, :m].copy()
    outside = coeffs.copy()
    outside[:n, :m] = 0
    fit = float(np.max(np.abs(a @ x - b), initial=0.0))
    residual = max(fit, float(np.max(np.abs(outside), initial=0.0)))
    if residual > tol:
        raise OracleInconsistent(f"data not explained by a gluing of these channels ({residual:.3g})")
    if not validate_gluing_matrix(c_hat, max(tol, 1e-6)):
        raise OracleInconsistent("recovered matrix violates I >= C C^dagger")
    return c_hat, residual


def recover_C_generalized(g_oracle, phi1, phi2, tol=1e-8):
    """Recover ``C`` from the generalized interference function ``g_oracle(U, rho)``.

    For every Weyl unitary ``U_j`` on the target space, ``F(U_j)`` is
    reconstructed by state tomography over :func:`state_basis`; the family
    ``{F(U_j)}`` is then expanded in the basis of maps ``Q -> W~^dagger Q V~``
    built from the Kraus operators completed to full operator bases.
    """
    if (phi1.source_dim, phi1.target_dim) != (phi2.source_dim, phi2.target_dim):
        raise DimensionError("channels act between different spaces")
    states = state_basis(phi1.source_dim)
    unitaries = unitary_basis(phi1.target_dim)
    f_values = []
    for u in unitaries:
        data = [(rho, g_oracle(u, rho.matrix)) for rho in states]
        f_values.append(reconstruct_R(data))
    c_hat, residual = _solve_from_F(f_values, unitaries, phi1, phi2, tol)
    n, m = c_hat.shape
    return TomographyResult(c_hat, True, n * m, residual, [])


def recover_C_steered(gbar_oracle, phi1, phi2, rho, half_factor=False, tol=1e-8, seed=None):
    """Recover ``C`` with a fixed input state and two path-1 unitaries.

    ``gbar_oracle(U, Ubar)`` returns ``sum C_nm Tr(W_m^dagger U V_n Ubar rho)``
    (halved if ``half_factor``). ``F(U_j)`` is reconstructed from the family
    ``{Ubar_k rho}``, which spans all operators only for nonsingular ``rho``.
    Otherwise the result is flagged not identifiable and ``C_hat`` is the
    minimal-norm solution of the direct linear system in ``C``.
    """
    rho = _as_array(rho)
    ds, dt = phi1.source_dim, phi1.target_dim
    if rho.shape != (ds, ds):
        raise DimensionError(f"state must be {ds}x{ds}")
    try:
        ubars = nonsingular_unitary_family(rho, seed=seed)
        family_rank = ds * ds
    except NotSpanning as exc:
        ubars = unitary_basis(ds)
        family_rank = exc.rank
    unitaries = unitary_basis(dt)
    scale = 0.5 if half_factor else 1.0
    xs = [ub @ rho for ub in ubars]
    rows = scale * _trace_rows(xs)
    values = np.array([[gbar_oracle(u, ub) for ub in ubars] for u in unitaries])
    if family_rank == ds * ds:
        f_values = [unvec(_pinv_solve(rows, v)[0], (ds, ds)) for v in values]
        c_hat, residual = _solve_from_F(f_values, unitaries, phi1, phi2, tol)
        n, m = c_hat.shape
        return TomographyResult(c_hat, True, n * m, residual, [], family_rank)
    ops1, ops2 = phi1.kraus_ops, phi2.kraus_ops
    n, m = len(ops1), len(ops2)
    cols = []
    for u in unitaries:
        prods = _eta_matrix(ops1, ops2, u).reshape(n * m, ds, ds)
        cols.append(np.array([[scale * np.trace(p @ x) for x in xs] for p in prods]))
    a = np.concatenate(cols, axis=1).T
    x, rank, null = _pinv_solve(a, values.reshape(-1), abs_floor=ABS_RANK_FLOOR)
    residual = float(np.linalg.norm(a @ x - values.reshape(-1)))
    dirs = [_phase_normalize(null[:, j]).reshape(n, m) for j in range(null.shape[1])]
    return TomographyResult(x.reshape(n, m), False, rank, residual, dirs, family_rank)


def nonsingular_unitary_family(rho, seed=None, tol=1e-10):
    """Unitaries ``U_k`` such that ``{U_k rho}`` spans all operators.

    The Weyl family is returned (left-multiplied by a seeded Haar unitary when
    ``seed`` is given). Raises :class:`NotSpanning` with the achieved rank when
    ``rho`` is singular, since no such family exists then.
    """
    rho = _as_array(rho)
    d = rho.shape[0]
    family = unitary_basis(d)
    if seed is not None:
        h = haar_unitary(d, np.random.default_rng(seed))
        family = [h @ u for u in family]
    rank = matrix_rank(np.array([vec(u @ rho) for u in family]))
    if min_eigenvalue(rho) <= tol or rank < d * d:
        raise NotSpanning(rank, d * d)
    return family
