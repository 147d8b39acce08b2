"""Unitary dilations of a channel and the gluings they induce.

A dilation of a channel ``Phi`` on a d-level system is a unitary ``U`` on
``H_I (x) H_a`` (system index major) with
``Phi(rho) = Tr_a(U (rho (x) |a><a|) U^dagger)``. Every such ``U`` splits as
``U = W + R`` with ``R = sum_k V_k (x) |a_k><a|`` for a linearly independent
Kraus form ``{V_k}`` and an orthonormal tuple ``(a_1, ..., a_K)``, and ``W`` a
partial isometry between the complements of the initial and final spaces of
``R``. The overlaps ``<a|a_k>`` are the gluing that ``U`` induces with an
identity channel in the other path.
"""
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    KrausChannel,
    _as_array,
    canonical_kraus,
    choi_distance,
    connecting_matrix,
    is_linearly_independent,
)
from .errors import (
    AncillaTooSmall,
    DimensionError,
    InvariantViolation,
    NormTooLarge,
    NotARepresentation,
    NotCanonical,
    NotMaximal,
    NotOrthonormal,
    NotUnitary,
)
from .gluing import GluingMatrix
from .linalg import (
    dag,
    haar_unitary,
    is_unitary,
    max_abs_diff,
    orthonormal_complement,
    orthonormal_range,
    partial_trace_last,
)

TOL_DILATION = 1e-10


def _reference_kraus(channel):
    if is_linearly_independent(channel):
        return channel
    return canonical_kraus(channel)[0]


def _basis_vector(n, k=0):
    e = np.zeros(n, dtype=complex)
    e[k] = 1
    return e


def _as_tuple_matrix(a_tuple):
    """Orthonormal tuple as an ``(ancilla_dim, K)`` array of column vectors."""
    if isinstance(a_tuple, np.ndarray) and a_tuple.ndim == 2:
        return a_tuple.astype(complex)
    return np.array([np.asarray(a, dtype=complex).reshape(-1) for a in a_tuple]).T


def build_partial_isometry_R(channel, a_tuple, anchor, tol=TOL_DILATION):
    """``R = sum_k V_k (x) |a_k><a|``, a partial isometry from ``H (x) |a>``."""
    if channel.source_dim != channel.target_dim:
        raise DimensionError("dilations need equal source and target dimensions")
    if not is_linearly_independent(channel):
        raise NotCanonical("Kraus operators must be linearly independent")
    a = _as_tuple_matrix(a_tuple)
    anchor = np.asarray(anchor, dtype=complex).reshape(-1)
    if a.shape[1] != len(channel):
        raise DimensionError(f"need {len(channel)} ancilla vectors, got {a.shape[1]}")
    if a.shape[0] != anchor.size:
        raise DimensionError("ancilla vectors and anchor live in different spaces")
    if max_abs_diff(dag(a) @ a, np.eye(a.shape[1])) > tol:
        raise NotOrthonormal("ancilla tuple is not orthonormal")
    if abs(np.linalg.norm(anchor) - 1) > tol:
        raise NotOrthonormal("anchor is not normalized")
    return sum(
        np.kron(v, np.outer(a[:, k], anchor.conj())) for k, v in enumerate(channel.kraus_ops)
    )


def complete_partial_isometry_W(r, mode="deterministic", seed=0):
    """Partial isometry from ``ker R`` onto ``(range R)^perp``.

    In deterministic mode orthonormal bases of both complements are paired in
    order; random mode inserts a Haar unitary between them.
    """
    r = np.asarray(r, dtype=complex)
    dim = r.shape[0]
    initial = orthonormal_complement(orthonormal_range(dag(r)), dim)
    final = orthonormal_complement(orthonormal_range(r), dim)
    if initial.shape[1] != final.shape[1]:
        raise DimensionError("R is not a partial isometry between equal-dimensional spaces")
    if mode == "deterministic":
        return final @ dag(initial)
    if mode == "random":
        x = haar_unitary(initial.shape[1], np.random.default_rng(seed))
        return final @ x @ dag(initial)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Dilation:
    channel: KrausChannel
    ancilla_dim: int
    anchor: np.ndarray
    a_tuple: np.ndarray
    W: np.ndarray
    U: np.ndarray = field(repr=False)

    @property
    def kraus_number(self):
        return len(self.channel)

    @property
    def system_dim(self):
        return self.channel.source_dim

    @property
    def R(self):
        return build_partial_isometry_R(self.channel, self.a_tuple, self.anchor)

    @property
    def overlaps(self):
        """``(<a|a_k>)_k``."""
        return self.anchor.conj() @ self.a_tuple

    def check_invariants(self):
        return dilation_residuals(self.channel, self.a_tuple, self.anchor, self.W, self.U)

    def verify(self, tol=TOL_DILATION):
        for name, err in self.check_invariants().items():
            if err > tol:
                raise InvariantViolation(name, f"error {err:.3g} exceeds {tol:.3g}")
        return self


def induced_channel_residual(u, channel, anchor):
    """Max deviation of ``Tr_a(U (E_ij (x) |a><a|) U^dagger)`` from ``Phi(E_ij)``."""
    d = channel.source_dim
    n = anchor.size
    aa = np.outer(anchor, anchor.conj())
    worst = 0.0
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1
            out = partial_trace_last(u @ np.kron(unit, aa) @ dag(u), d, n)
            worst = max(worst, max_abs_diff(out, channel.act(unit)))
    return worst


def dilation_residuals(channel, a_tuple, anchor, w, u):
    """Named invariant residuals of an assembled dilation (all should be ~0)."""
    a = _as_tuple_matrix(a_tuple)
    anchor = np.asarray(anchor, dtype=complex)
    d, n = channel.source_dim, anchor.size
    eye = np.eye(d * n)
    p_i = np.kron(np.eye(d), np.outer(anchor, anchor.conj()))
    r = build_partial_isometry_R(channel, a, anchor)
    ops = channel.kraus_ops
    p_f = sum(
        np.kron(ops[k] @ dag(ops[l]), np.outer(a[:, k], a[:, l].conj()))
        for k in range(len(ops))
        for l in range(len(ops))
    )
    return {
        "R_initial": max_abs_diff(dag(r) @ r, p_i),
        "R_final": max_abs_diff(r @ dag(r), p_f),
        "P_f_idempotent": max_abs_diff(p_f @ p_f, p_f),
        "W_initial": max_abs_diff(dag(w) @ w, eye - p_i),
        "W_final": max_abs_diff(w @ dag(w), eye - p_f),
        "U_equals_W_plus_R": max_abs_diff(u, w + r),
        "unitary": max_abs_diff(dag(u) @ u, eye),
        "channel": induced_channel_residual(u, channel, anchor),
    }


def assemble_dilation(channel, a_tuple, anchor, w, tol=TOL_DILATION):
    """``U = W + sum_k V_k (x) |a_k><a|``, checked against every dilation invariant."""
    a = _as_tuple_matrix(a_tuple)
    anchor = np.asarray(anchor, dtype=complex).reshape(-1)
    r = build_partial_isometry_R(channel, a, anchor, tol)
    w = np.asarray(w, dtype=complex)
    if w.shape != r.shape:
        raise DimensionError(f"W must be {r.shape}, got {w.shape}")
    dil = Dilation(channel, anchor.size, anchor, a, w, w + r)
    return dil.verify(tol)


def decompose_dilation(u, channel, anchor=None, tol=TOL_DILATION):
    """Split a dilation ``U`` of ``channel`` into ``(a_tuple, W)``.

    The reference Kraus form is ``channel`` itself when linearly independent,
    otherwise its canonical form. ``anchor`` defaults to the first ancilla
    basis vector.
    """
    u = np.asarray(u, dtype=complex)
    d = channel.source_dim
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] % d:
        raise DimensionError(f"U of shape {u.shape} does not act on a {d}-level system and ancilla")
    n = u.shape[0] // d
    anchor = _basis_vector(n) if anchor is None else np.asarray(anchor, dtype=complex).reshape(-1)
    if not is_unitary(u, tol):
        raise NotUnitary("U is not unitary")
    ref = _reference_kraus(channel)
    # Kraus form read off U: W_l = <b_l| U |a>
    from_u = np.einsum("iljb,b->lij", u.reshape(d, n, d, n), anchor)
    if choi_distance(ref.kraus_ops, from_u) > tol:
        raise NotARepresentation("U does not induce the given channel")
    m = connecting_matrix(ref, from_u, tol)
    a = m.astype(complex)
    r = build_partial_isometry_R(ref, a, anchor, max(tol, 1e-9))
    p_i = np.kron(np.eye(d), np.outer(anchor, anchor.conj()))
    p_f = r @ dag(r)
    eye = np.eye(d * n)
    w = (eye - p_f) @ u @ (eye - p_i)
    if max_abs_diff(w + r, u) > tol:
        raise NotARepresentation("U does not split as W + R")
    return a, w


def gluing_of_dilation(dil):
    """Gluing with an identity channel in path 2 induced by ``dil``.

    Returns a K x 1 :class:`GluingMatrix` with entries ``<a|a_k>``, stored with
    rank-one factors ``(overlaps, [1])``.
    """
    c = dil.overlaps
    return GluingMatrix(c.reshape(-1, 1), lsp_factors=(c, np.ones(1)))


def _unitary_with_first_row(u):
    """Unitary whose first row is the unit vector ``u`` (phase-corrected Householder)."""
    n = u.size
    target = u.conj()
    theta = np.angle(target[0]) if abs(target[0]) > 0 else 0.0
    x = np.exp(1j * theta) * _basis_vector(n)
    w = x - target
    nw = np.linalg.norm(w)
    h = np.eye(n, dtype=complex)
    if nw > 1e-15:
        h -= 2 * np.outer(w, w.conj()) / nw**2
    p = h @ np.diag(np.concatenate([[np.exp(1j * theta)], np.ones(n - 1)]))
    return dag(p)


def dilation_for_target_gluing(channel, c_target, ancilla_dim, mode="deterministic", seed=0,
                               tol=TOL_DILATION):
    """Dilation whose induced gluing equals ``c_target``.

    ``c_target`` is given relative to the channel's Kraus list (or its
    canonical form if that list is linearly dependent). The anchor is the
    first ancilla basis vector and the tuple is read off the columns of a
    unitary whose first row is ``(c, sqrt(1 - |c|^2), 0, ...)``.
    """
    ref = _reference_kraus(channel)
    k = len(ref)
    c = np.asarray(c_target, dtype=complex).reshape(-1)
    if c.size != k:
        raise DimensionError(f"target has {c.size} entries, Kraus number is {k}")
    if ancilla_dim < k:
        raise AncillaTooSmall(f"ancilla dimension {ancilla_dim} < Kraus number {k}")
    norm = np.linalg.norm(c)
    if norm > 1 + tol:
        raise NormTooLarge(f"|C| = {norm:.12g} > 1")
    if ancilla_dim == k and abs(norm - 1) > tol:
        raise NotMaximal(f"ancilla dimension equals Kraus number {k}, so |C| must be 1 (got {norm:.12g})")
    row = np.zeros(ancilla_dim, dtype=complex)
    row[:k] = c
    if ancilla_dim > k:
        row[k] = np.sqrt(max(0.0, 1 - norm**2))
    row /= np.linalg.norm(row)
    q = _unitary_with_first_row(row)
    anchor = _basis_vector(ancilla_dim)
    a = q[:, :k]
    r = build_partial_isometry_R(ref, a, anchor)
    w = complete_partial_isometry_W(r, mode, seed)
    return assemble_dilation(ref, a, anchor, w, tol)


def zero_visibility_unitary(channel):
    """The reflection-type dilation with ``<a|U|a> = 0`` on ancilla dim ``d^2 + 1``.

    Kraus list: the linearly independent form padded with zero operators to
    ``d^2`` entries; ancilla basis ``(|a>, |a_1>, ..., |a_{d^2}>)``.
    """
    ref = _reference_kraus(channel)
    d = ref.source_dim
    if ref.target_dim != d:
        raise DimensionError("dilations need equal source and target dimensions")
    n = d * d + 1
    ops = np.zeros((d * d, d, d), dtype=complex)
    ops[: len(ref)] = ref.kraus_ops
    basis = np.eye(n, dtype=complex)
    a0 = np.outer(basis[0], basis[0])
    u = np.eye(d * n, dtype=complex) - np.kron(np.eye(d), a0)
    for j in range(d * d):
        u += np.kron(ops[j], np.outer(basis[j + 1], basis[0]))
        u += np.kron(dag(ops[j]), np.outer(basis[0], basis[j + 1]))
        for l in range(d * d):
            u -= np.kron(ops[j] @ dag(ops[l]), np.outer(basis[j + 1], basis[l + 1]))
    return u


def zero_visibility_dilation(channel, tol=TOL_DILATION):
    """Dilation that destroys all interference: its induced gluing is zero."""
    ref = _reference_kraus(channel)
    u = zero_visibility_unitary(ref)
    anchor = _basis_vector(u.shape[0] // ref.source_dim)
    a, w = decompose_dilation(u, ref, anchor, tol)
    return assemble_dilation(ref, a, anchor, w, tol)


class GlobalUnitaryMap:
    """Channel on the two-path space induced by path-controlled dilations.

    ``U`` acts on ``H_s (x) H_I (x) H_anc`` with the path index major; the
    ancilla register starts in ``ancilla_state`` and is traced out.
    """

    def __init__(self, u, system_dim, ancilla_state):
        self.U = u
        self.system_dim = system_dim
        self.ancilla_state = ancilla_state

    @property
    def ancilla_dim(self):
        return self.ancilla_state.size

    def act(self, x):
        x = _as_array(x)
        d2 = 2 * self.system_dim
        if x.shape != (d2, d2):
            raise DimensionError(f"two-path operator must be {d2}x{d2}, got {x.shape}")
        aa = np.outer(self.ancilla_state, self.ancilla_state.conj())
        y = self.U @ np.kron(x, aa) @ dag(self.U)
        return partial_trace_last(y, d2, self.ancilla_dim)

    __call__ = act


def _embed_second_ancilla(u2, d, n1, n2):
    """``U2`` on ``I (x) a2`` lifted to ``I (x) a1 (x) a2``."""
    t = np.einsum("iajb,cd->icajdb", u2.reshape(d, n2, d, n2), np.eye(n1))
    return t.reshape(d * n1 * n2, d * n1 * n2)


def global_unitary(dil1, dil2=None, shared_ancilla=False, tol=TOL_DILATION):
    """Path-controlled unitary built from one or two dilations.

    * ``dil2`` absent: ``|1><1| (x) U1 + |2><2| (x) 1 (x) 1``.
    * ``shared_ancilla``: ``|1><1| (x) U1 + |2><2| (x) U2`` on one ancilla
      (both dilations must use the same ancilla space and anchor).
    * otherwise: two ancillas, ``U1`` touching only the first and ``U2`` only
      the second.
    """
    d = dil1.system_dim
    p1 = np.diag([1, 0]).astype(complex)
    p2 = np.diag([0, 1]).astype(complex)
    if dil2 is None:
        n = dil1.ancilla_dim
        u = np.kron(p1, dil1.U) + np.kron(p2, np.eye(d * n))
        return GlobalUnitaryMap(u, d, dil1.anchor)
    if dil2.system_dim != d:
        raise DimensionError("both dilations must act on the same internal space")
    if shared_ancilla:
        if dil1.ancilla_dim != dil2.ancilla_dim or max_abs_diff(dil1.anchor, dil2.anchor) > tol:
            raise DimensionError("a shared ancilla needs equal ancilla spaces and anchors")
        u = np.kron(p1, dil1.U) + np.kron(p2, dil2.U)
        return GlobalUnitaryMap(u, d, dil1.anchor)
    n1, n2 = dil1.ancilla_dim, dil2.ancilla_dim
    u1 = np.kron(dil1.U, np.eye(n2))
    u2 = _embed_second_ancilla(dil2.U, d, n1, n2)
    u = np.kron(p1, u1) + np.kron(p2, u2)
    return GlobalUnitaryMap(u, d, np.kron(dil1.anchor, dil2.anchor))


def gluing_of_dilation_pair(dil1, dil2, shared_ancilla=False):
    """Gluing matrix of :func:`global_unitary` built from two dilations.

    Shared ancilla: ``C_nm = <a2_m|a1_n>``. Separate ancillas: the rank-one
    ``C = c1 c2^dagger`` with ``c_k = <a|a_k>`` for each dilation.
    """
    if shared_ancilla:
        return GluingMatrix(dil1.a_tuple.T @ dil2.a_tuple.conj())
    c1, c2 = dil1.overlaps, dil2.overlaps
    return GluingMatrix(np.outer(c1, c2.conj()), lsp_factors=(c1, c2))
