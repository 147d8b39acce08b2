"""Kraus and Choi algebra for channels between possibly different spaces.

Conventions
-----------
* A Kraus operator maps the source space (dim ``source_dim``) to the target
  space (dim ``target_dim``), so it has shape ``(target_dim, source_dim)``.
* The Choi matrix puts the input index in the first tensor factor,
  ``J = sum_ij |i><j| (x) Phi(|i><j|)``, which equals
  ``sum_k vec(V_k) vec(V_k)^dagger`` under column stacking.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelsDiffer, DimensionError, NotLinearlyIndependent
from .linalg import REL_RANK_TOL, dag, max_abs_diff, numerical_rank, unvec, vec

TOL_TP = 1e-10
TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TR = 1e-10


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-d, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density operator. ``matrix`` is stored read-only."""

    matrix: np.ndarray
    tol: float = field(default=TOL_PSD, compare=False, repr=False)

    def __post_init__(self):
        m = _as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        if max_abs_diff(m, dag(m)) > max(self.tol, TOL_HERM):
            raise DimensionError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > max(self.tol, TOL_TR):
            raise DimensionError(f"density matrix has trace {np.trace(m).real:.3g}")
        if np.linalg.eigvalsh((m + dag(m)) / 2)[0] < -self.tol:
            raise DimensionError("density matrix is not positive semidefinite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim, dtype=complex) / dim)


def as_density(rho):
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _as_array(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class KrausChannel:
    """A trace-preserving map given by an ordered, nonempty list of Kraus operators."""

    kraus_ops: tuple
    tol: float = field(default=TOL_TP, compare=False, repr=False)

    def __post_init__(self):
        ops = [_as_matrix(v, "Kraus operator") for v in self.kraus_ops]
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(v.shape != shape for v in ops):
            raise DimensionError("Kraus operators must share one shape")
        stacked = np.array(ops)
        stacked.setflags(write=False)
        object.__setattr__(self, "kraus_ops", stacked)
        err = _tp_error(stacked)
        if err > self.tol:
            raise DimensionError(f"Kraus operators are not trace preserving (error {err:.3g})")

    @property
    def source_dim(self):
        return self.kraus_ops.shape[2]

    @property
    def target_dim(self):
        return self.kraus_ops.shape[1]

    def __len__(self):
        return self.kraus_ops.shape[0]

    def __iter__(self):
        return iter(self.kraus_ops)

    def __eq__(self, other):
        if not isinstance(other, KrausChannel):
            return NotImplemented
        return self.kraus_ops.shape == other.kraus_ops.shape and np.array_equal(
            self.kraus_ops, other.kraus_ops
        )

    def __hash__(self):
        return hash(self.kraus_ops.tobytes())

    def act(self, x):
        """Apply the map to an arbitrary (not necessarily density) operator."""
        return kraus_action(self.kraus_ops, x)


def kraus_action(ops, x):
    ops = np.asarray(ops)
    return np.einsum("kij,jl,kml->im", ops, np.asarray(x), ops.conj())


def _tp_error(ops):
    ops = np.asarray(ops)
    gram = np.einsum("kji,kjl->il", ops.conj(), ops)
    return max_abs_diff(gram, np.eye(ops.shape[2]))


def is_trace_preserving(ch, tol=TOL_TP):
    """True iff ``sum_k V_k^dagger V_k`` equals the identity within ``tol``.

    Accepts a :class:`KrausChannel` or a bare sequence of operators, so that
    non-trace-preserving lists can be tested without constructing a channel.
    """
    ops = ch.kraus_ops if isinstance(ch, KrausChannel) else np.array(
        [np.asarray(v, dtype=complex) for v in ch]
    )
    return _tp_error(ops) <= tol


def apply_channel(ch, rho):
    rho = as_density(rho)
    if rho.dim != ch.source_dim:
        raise DimensionError(f"state dim {rho.dim} != channel source dim {ch.source_dim}")
    out = ch.act(rho.matrix)
    return DensityMatrix((out + dag(out)) / 2)


def choi_matrix(ch):
    ops = ch.kraus_ops if isinstance(ch, KrausChannel) else np.asarray(ch)
    vecs = np.array([vec(v) for v in ops])
    return vecs.T @ vecs.conj()


def choi_distance(a, b):
    ja, jb = choi_matrix(a), choi_matrix(b)
    if ja.shape != jb.shape:
        return np.inf
    return max_abs_diff(ja, jb)


def _kraus_vectors(ops):
    return np.array([vec(v) for v in ops]).T


def kraus_rank(ops, rel_tol=REL_RANK_TOL):
    """Rank of the span of ``ops`` (singular values of the stacked vectorizations)."""
    s = np.linalg.svd(_kraus_vectors(ops), compute_uv=False)
    return numerical_rank(s, rel_tol)


def is_linearly_independent(ch, rel_tol=REL_RANK_TOL):
    ops = ch.kraus_ops if isinstance(ch, KrausChannel) else np.asarray(ch)
    return kraus_rank(ops, rel_tol) == len(ops)


def _fix_phase(v):
    flat = v.reshape(-1)
    k = np.argmax(np.abs(flat) > np.abs(flat).max() * (1 - 1e-9))
    phase = flat[k] / abs(flat[k])
    return v / phase


def canonical_kraus(ch, tol=REL_RANK_TOL):
    """Linearly independent Kraus form from the Choi eigendecomposition.

    Eigenvalues above ``tol`` times the largest are kept, in descending order,
    and each operator's phase is fixed so its first largest-magnitude entry is
    real positive. Returns ``(channel, kraus_number)``.
    """
    j = choi_matrix(ch)
    evals, evecs = np.linalg.eigh((j + dag(j)) / 2)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    keep = evals > tol * evals[0]
    shape = (ch.target_dim, ch.source_dim)
    ops = [
        _fix_phase(np.sqrt(lam) * unvec(evecs[:, k], shape))
        for k, lam in zip(np.flatnonzero(keep), evals[keep])
    ]
    out = KrausChannel(tuple(ops), tol=max(ch.tol, 1e-9))
    return out, len(ops)


def connecting_matrix(rep_a, rep_b, tol=1e-10):
    """Isometry ``M`` (L x K) with ``rep_b[l] = sum_k M[l, k] rep_a[k]``.

    ``rep_a`` must be linearly independent; both must represent the same
    channel (Choi max-entry distance at most ``tol``).
    """
    ops_a = rep_a.kraus_ops if isinstance(rep_a, KrausChannel) else np.asarray(rep_a)
    ops_b = rep_b.kraus_ops if isinstance(rep_b, KrausChannel) else np.asarray(rep_b)
    if ops_a.shape[1:] != ops_b.shape[1:]:
        raise DimensionError("representations act between different spaces")
    dist = max_abs_diff(choi_matrix(ops_a), choi_matrix(ops_b))
    if dist > tol:
        raise ChannelsDiffer(f"Choi distance {dist:.3g} exceeds {tol:.3g}")
    a = _kraus_vectors(ops_a)
    if numerical_rank(np.linalg.svd(a, compute_uv=False)) < a.shape[1]:
        raise NotLinearlyIndependent("reference representation is rank deficient")
    b = _kraus_vectors(ops_b)
    coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    return coeffs.T


def random_channel(source_dim, target_dim, kraus_count, seed=0):
    """Deterministic random channel: slice a random isometry into Kraus blocks."""
    if min(source_dim, target_dim, kraus_count) < 1:
        raise DimensionError("dimensions and Kraus count must be positive")
    rows = kraus_count * target_dim
    if rows < source_dim:
        raise DimensionError(
            f"{kraus_count} operators of shape ({target_dim}, {source_dim}) cannot be trace preserving"
        )
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((rows, source_dim)) + 1j * rng.standard_normal((rows, source_dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return KrausChannel(tuple(q.reshape(kraus_count, target_dim, source_dim)))


def random_density(dim, seed=0, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dag(g)
    return DensityMatrix(rho / np.trace(rho).real)


def identity_channel(dim):
    return KrausChannel((np.eye(dim, dtype=complex),))


def unitary_channel(u):
    return KrausChannel((np.asarray(u, dtype=complex),))


def dephasing_channel(dim):
    """Kraus operators ``|n><n|``: kills off-diagonal elements in the standard basis."""
    return KrausChannel(tuple(np.diag(np.eye(dim)[n]).astype(complex) for n in range(dim)))


def collapse_channel(psi, dim=None):
    """Kraus operators ``|psi><n|``: prepares ``|psi>`` from any input."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    dim = psi.size if dim is None else dim
    return KrausChannel(tuple(np.outer(psi, np.eye(dim)[n]) for n in range(dim)))
