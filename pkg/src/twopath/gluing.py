"""Trace-preserving gluings of two channels on the two-path space.

Operators on the two-path space are block matrices ordered path 1 first:
``X = [[X11, X12], [X21, X22]]`` with each block on the internal space.
"""
from dataclasses import dataclass, field

import numpy as np

from .bases import state_basis
from .channels import (
    DensityMatrix,
    KrausChannel,
    _as_array,
    as_density,
    canonical_kraus,
    connecting_matrix,
    is_linearly_independent,
)
from .errors import DimensionError, InvalidGluing, NormTooLarge, NotUnitary
from .linalg import dag, is_unitary, max_abs, min_eigenvalue

TOL_GLUING = 1e-9


def validate_gluing_matrix(c, tol=TOL_GLUING):
    """True iff ``I - C C^dagger`` is positive semidefinite up to ``-tol``."""
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    return min_eigenvalue(np.eye(c.shape[0]) - c @ dag(c)) >= -tol


@dataclass(frozen=True)
class GluingMatrix:
    """An N x M gluing matrix, optionally with a rank-one factorization ``c1 c2^dagger``."""

    C: np.ndarray
    lsp_factors: tuple = None
    tol: float = field(default=TOL_GLUING, compare=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.C, dtype=complex)
        if c.ndim != 2:
            raise DimensionError(f"gluing matrix must be 2-d, got shape {c.shape}")
        if not validate_gluing_matrix(c, self.tol):
            raise InvalidGluing("I - C C^dagger is not positive semidefinite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "C", c)
        if self.lsp_factors is not None:
            c1, c2 = (np.asarray(f, dtype=complex).reshape(-1) for f in self.lsp_factors)
            if c1.size != c.shape[0] or c2.size != c.shape[1]:
                raise DimensionError("LSP factor lengths do not match the gluing matrix")
            if np.linalg.norm(c1) > 1 + self.tol or np.linalg.norm(c2) > 1 + self.tol:
                raise NormTooLarge("LSP factors must have norm at most 1")
            if max_abs(c - np.outer(c1, c2.conj())) > self.tol:
                raise InvalidGluing("C differs from c1 c2^dagger")
            object.__setattr__(self, "lsp_factors", (c1, c2))

    @property
    def rows(self):
        return self.C.shape[0]

    @property
    def cols(self):
        return self.C.shape[1]

    @property
    def is_lsp(self):
        return self.lsp_factors is not None


def as_gluing(c):
    return c if isinstance(c, GluingMatrix) else GluingMatrix(np.atleast_2d(c))


def lsp_gluing(c1, c2, tol=TOL_GLUING):
    c1 = np.asarray(c1, dtype=complex).reshape(-1)
    c2 = np.asarray(c2, dtype=complex).reshape(-1)
    if np.linalg.norm(c1) > 1 + tol or np.linalg.norm(c2) > 1 + tol:
        raise NormTooLarge(
            f"|c1| = {np.linalg.norm(c1):.6g}, |c2| = {np.linalg.norm(c2):.6g}; both must be <= 1"
        )
    return GluingMatrix(np.outer(c1, c2.conj()), lsp_factors=(c1, c2), tol=tol)


@dataclass(frozen=True)
class GluedChannel:
    """Two channels with linearly independent Kraus forms joined by a gluing matrix."""

    phi1: KrausChannel
    phi2: KrausChannel
    gluing: GluingMatrix

    def __post_init__(self):
        if (self.phi1.source_dim, self.phi1.target_dim) != (
            self.phi2.source_dim,
            self.phi2.target_dim,
        ):
            raise DimensionError("glued channels must share source and target spaces")
        if self.gluing.C.shape != (len(self.phi1), len(self.phi2)):
            raise DimensionError(
                f"gluing matrix shape {self.gluing.C.shape} does not match Kraus counts "
                f"({len(self.phi1)}, {len(self.phi2)})"
            )

    @property
    def source_dim(self):
        return self.phi1.source_dim

    @property
    def target_dim(self):
        return self.phi1.target_dim

    @property
    def V(self):
        if not self.gluing.is_lsp:
            return None
        return np.einsum("n,nij->ij", self.gluing.lsp_factors[0], self.phi1.kraus_ops)

    @property
    def W(self):
        if not self.gluing.is_lsp:
            return None
        return np.einsum("m,mij->ij", self.gluing.lsp_factors[1], self.phi2.kraus_ops)

    def act(self, x):
        """Apply the total map to an arbitrary operator on the two-path source space."""
        return glued_action(self.phi1.kraus_ops, self.phi2.kraus_ops, self.gluing.C, x)

    def __call__(self, rho):
        return apply_glued(self, rho)


def glue(phi1, phi2, c, rebase=False):
    """Build a :class:`GluedChannel`.

    Linearly dependent Kraus lists are replaced by their canonical form (``c``
    must then refer to that form). With ``rebase=True`` both channels are
    always replaced by :func:`canonical_kraus` and ``c``, given relative to the
    supplied linearly independent lists, is transformed accordingly.
    """
    gluing = as_gluing(c)
    if rebase:
        can1, _ = canonical_kraus(phi1)
        can2, _ = canonical_kraus(phi2)
        u1 = connecting_matrix(can1, phi1).T
        u2 = connecting_matrix(can2, phi2).T
        return GluedChannel(can1, can2, rebase_gluing(gluing, u1, u2))
    if not is_linearly_independent(phi1):
        phi1, _ = canonical_kraus(phi1)
    if not is_linearly_independent(phi2):
        phi2, _ = canonical_kraus(phi2)
    return GluedChannel(phi1, phi2, gluing)


def glued_action(ops1, ops2, c, x):
    ops1, ops2, x = np.asarray(ops1), np.asarray(ops2), np.asarray(x)
    d = ops1.shape[2]
    if x.shape != (2 * d, 2 * d):
        raise DimensionError(f"two-path operator must be {2 * d}x{2 * d}, got {x.shape}")
    x11, x12 = x[:d, :d], x[:d, d:]
    x21, x22 = x[d:, :d], x[d:, d:]
    y11 = np.einsum("nij,jl,nml->im", ops1, x11, ops1.conj())
    y22 = np.einsum("nij,jl,nml->im", ops2, x22, ops2.conj())
    y12 = np.einsum("nm,nij,jl,mkl->ik", c, ops1, x12, ops2.conj())
    y21 = np.einsum("nm,mij,jl,nkl->ik", c.conj(), ops2, x21, ops1.conj())
    return np.block([[y11, y12], [y21, y22]])


def apply_glued(g, rho_total):
    if not validate_gluing_matrix(g.gluing.C):
        raise InvalidGluing("gluing matrix violates I >= C C^dagger")
    rho = as_density(rho_total)
    if rho.dim != 2 * g.source_dim:
        raise DimensionError(f"state dim {rho.dim} != {2 * g.source_dim}")
    out = g.act(rho.matrix)
    return DensityMatrix((out + dag(out)) / 2)


def path_projector(dim, path=1):
    p = np.zeros((2 * dim, 2 * dim), dtype=complex)
    sl = slice(0, dim) if path == 1 else slice(dim, 2 * dim)
    p[sl, sl] = np.eye(dim)
    return p


def is_subspace_preserving(total_map, source_dim, tol=1e-10):
    """Check that ``total_map`` moves no probability weight between the paths.

    ``total_map`` takes a ``2*source_dim`` square array and returns an operator
    on the two-path target space. The path-1 weight is compared on a set of
    density matrices spanning the whole operator space, which suffices by
    linearity.
    """
    for rho in state_basis(2 * source_dim):
        out = _as_array(total_map(rho.matrix))
        if out.ndim != 2 or out.shape[0] != out.shape[1] or out.shape[0] % 2:
            raise DimensionError("total map must return a square operator of even dimension")
        before = np.trace(path_projector(source_dim) @ rho.matrix)
        after = np.trace(path_projector(out.shape[0] // 2) @ out)
        if abs(after - before) > tol:
            return False
    return True


def rebase_gluing(c, u1, u2, tol=1e-10):
    """Gluing matrix relative to new Kraus forms: ``C' = U1 C U2^dagger``."""
    gluing = as_gluing(c)
    u1, u2 = np.asarray(u1, dtype=complex), np.asarray(u2, dtype=complex)
    if not is_unitary(u1, tol) or not is_unitary(u2, tol):
        raise NotUnitary("rebasing matrices must be unitary")
    if u1.shape[0] != gluing.rows or u2.shape[0] != gluing.cols:
        raise DimensionError("rebasing matrices do not match the gluing shape")
    lsp = None
    if gluing.is_lsp:
        c1, c2 = gluing.lsp_factors
        lsp = (u1 @ c1, u2 @ c2)
    return GluingMatrix(u1 @ gluing.C @ dag(u2), lsp_factors=lsp)


def extend_occupation(phi1, c1, tol=1e-12):
    """Channel on the internal space plus one vacuum level.

    The vacuum ``|0>`` is appended as the last basis vector. Kraus operators
    are ``V_k (+) conj(c1_k)|0><0|`` plus ``sqrt(1 - |c1|^2)|0><0|`` when the
    norm is below one, so the particle-vacuum coherence is carried by
    ``V = sum_k c1_k V_k``.
    """
    c1 = np.asarray(c1, dtype=complex).reshape(-1)
    if c1.size != len(phi1):
        raise DimensionError(f"c1 has {c1.size} entries, channel has {len(phi1)} operators")
    norm = np.linalg.norm(c1)
    if norm > 1 + tol:
        raise NormTooLarge(f"|c1| = {norm:.6g} > 1")
    ds, dt = phi1.source_dim, phi1.target_dim
    ops = []
    for v, ck in zip(phi1.kraus_ops, c1):
        k = np.zeros((dt + 1, ds + 1), dtype=complex)
        k[:dt, :ds] = v
        k[dt, ds] = np.conj(ck)
        ops.append(k)
    rest = 1 - norm**2
    if rest > tol:
        vac = np.zeros((dt + 1, ds + 1), dtype=complex)
        vac[dt, ds] = np.sqrt(rest)
        ops.append(vac)
    return KrausChannel(tuple(ops))
