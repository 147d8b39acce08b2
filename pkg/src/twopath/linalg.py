"""Small dense linear-algebra helpers shared by the other modules.

Vectorization is column stacking throughout: ``vec(A)[i*rows + t] == A[t, i]``.
"""
import numpy as np
import scipy.linalg

REL_RANK_TOL = 1e-9


def dag(a):
    return np.conjugate(np.swapaxes(a, -1, -2))


def vec(a):
    """Column-stack a matrix into a 1-d vector."""
    return np.asarray(a).T.reshape(-1)


def unvec(v, shape):
    """Inverse of :func:`vec` for a matrix of the given ``(rows, cols)`` shape."""
    rows, cols = shape
    return np.asarray(v).reshape(cols, rows).T


def max_abs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def max_abs_diff(a, b):
    return max_abs(np.asarray(a) - np.asarray(b))


def is_unitary(u, tol=1e-10):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return max_abs_diff(dag(u) @ u, np.eye(u.shape[0])) <= tol


def numerical_rank(singular_values, rel_tol=REL_RANK_TOL, abs_floor=0.0):
    """Count singular values above ``rel_tol`` times the largest and above ``abs_floor``."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > max(rel_tol * s[0], abs_floor)))


def matrix_rank(a, rel_tol=REL_RANK_TOL):
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return numerical_rank(np.linalg.svd(a, compute_uv=False), rel_tol)


def orthonormal_range(a, rel_tol=REL_RANK_TOL):
    """Orthonormal basis (as columns) of the column space of ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, :numerical_rank(s, rel_tol)]


def orthonormal_complement(basis, dim=None):
    """Orthonormal basis of the orthogonal complement of span(columns of ``basis``).

    ``basis`` must have orthonormal columns. The complement is extracted by
    pivoted QR of the complementary projector, which is deterministic for a
    given input.
    """
    basis = np.asarray(basis, dtype=complex)
    if dim is None:
        dim = basis.shape[0]
    basis = basis.reshape(dim, -1)
    m = dim - basis.shape[1]
    if m <= 0:
        return np.zeros((dim, 0), dtype=complex)
    proj = np.eye(dim, dtype=complex) - basis @ dag(basis)
    q, _, _ = scipy.linalg.qr(proj, pivoting=True)
    q = q[:, :m]
    # one round of re-orthogonalization against the input basis
    q = q - basis @ (dag(basis) @ q)
    q, _ = np.linalg.qr(q)
    return q


def null_space(a, rel_tol=REL_RANK_TOL):
    """Orthonormal basis (columns) of the kernel of ``a``, relative SVD threshold."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = numerical_rank(s, rel_tol)
    return dag(vh[r:])


def projector(basis):
    basis = np.asarray(basis)
    return basis @ dag(basis)


def haar_unitary(n, rng):
    """Haar-distributed ``n x n`` unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def partial_trace_last(x, dim_keep, dim_trace):
    """Trace out the second tensor factor of an operator on ``keep (x) trace``."""
    x = np.asarray(x).reshape(dim_keep, dim_trace, dim_keep, dim_trace)
    return np.einsum("iaja->ij", x)


def min_eigenvalue(h):
    h = np.asarray(h)
    if h.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh((h + dag(h)) / 2)[0])
