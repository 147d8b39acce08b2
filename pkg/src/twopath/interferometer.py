"""Two-path interferometer: fringes, interference functions and visibility measures."""
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .channels import DensityMatrix, _as_array, as_density
from .errors import DimensionError, NotLSP, NotUnitary
from .gluing import apply_glued, as_gluing
from .linalg import dag, is_unitary

BEAM_SPLITTER = np.array([[1, 1], [-1, 1]], dtype=complex) / np.sqrt(2)
PATH_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
DEFAULT_CHI_STEPS = 64


def phase_shifter(chi):
    return np.diag([1, np.exp(1j * chi)])


def default_chis(steps=DEFAULT_CHI_STEPS):
    return 2 * np.pi * np.arange(steps) / steps


def prepare_input(rho_internal):
    """State after the first beam splitter: ``|psi><psi| (x) rho``."""
    return np.kron(np.outer(PATH_PLUS, PATH_PLUS.conj()), _as_array(rho_internal))


def path_reduced(rho_total):
    """2x2 reduced state of the path degree of freedom."""
    x = _as_array(rho_total)
    d = x.shape[0] // 2
    return np.einsum("aibi->ab", x.reshape(2, d, 2, d))


def off_diagonal(rho_total):
    """``<1| Tr_I(rho) |2>``, the quantity the measurement stage reads out."""
    x = _as_array(rho_total)
    d = x.shape[0] // 2
    return np.trace(x[:d, d:])


def detection_probability(rho_f, chi):
    """Probability of a click in output port 1 after phase shift ``chi`` and beam splitter."""
    x = _as_array(rho_f)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] % 2:
        raise DimensionError(f"two-path state must be square with even dimension, got {x.shape}")
    d = x.shape[0] // 2
    u = np.kron(BEAM_SPLITTER @ phase_shifter(chi), np.eye(d))
    out = u @ x @ dag(u)
    return float(np.trace(out[:d, :d]).real)


def path_local_unitary(u, path=1):
    """``|1><1| (x) U + |2><2| (x) 1`` (or the path-2 analogue)."""
    u = np.asarray(u, dtype=complex)
    eye = np.eye(u.shape[0])
    blocks = (u, eye) if path == 1 else (eye, u)
    out = np.zeros((2 * u.shape[0], 2 * u.shape[0]), dtype=complex)
    d = u.shape[0]
    out[:d, :d], out[d:, d:] = blocks
    return out


def _kraus_pair(phi1, phi2, c):
    gluing = as_gluing(c)
    ops1, ops2 = phi1.kraus_ops, phi2.kraus_ops
    if gluing.C.shape != (len(ops1), len(ops2)):
        raise DimensionError(
            f"gluing matrix shape {gluing.C.shape} vs Kraus counts ({len(ops1)}, {len(ops2)})"
        )
    if ops1.shape[1:] != ops2.shape[1:]:
        raise DimensionError("channels act between different spaces")
    return ops1, ops2, gluing


def interference_operator(phi1, phi2, c):
    """``R = sum_nm C_nm W_m^dagger V_n`` (``W^dagger V`` for rank-one gluings)."""
    ops1, ops2, gluing = _kraus_pair(phi1, phi2, c)
    if gluing.is_lsp:
        c1, c2 = gluing.lsp_factors
        v = np.einsum("n,nij->ij", c1, ops1)
        w = np.einsum("m,mij->ij", c2, ops2)
        return dag(w) @ v
    return np.einsum("nm,mji,njk->ik", gluing.C, ops2.conj(), ops1)


def interference_function(r, rho):
    return 0.5 * np.trace(np.asarray(r) @ _as_array(rho))


def _check_unitary(u, dim, name):
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionError(f"{name} must be {dim}x{dim}, got {u.shape}")
    if not is_unitary(u, 1e-10):
        raise NotUnitary(f"{name} is not unitary")
    return u


def generalized_interference(phi1, phi2, c, u, rho_internal):
    """``G(U, rho) = 1/2 sum_nm C_nm Tr(W_m^dagger U V_n rho)``, U on the target space."""
    ops1, ops2, gluing = _kraus_pair(phi1, phi2, c)
    u = _check_unitary(u, phi1.target_dim, "U")
    f = np.einsum("nm,mji,jk,nkl->il", gluing.C, ops2.conj(), u, ops1)
    return 0.5 * np.trace(f @ _as_array(rho_internal))


def steered_interference(phi1, phi2, c, u, ubar, rho_internal, half_factor=False):
    """``sum_nm C_nm Tr(W_m^dagger U V_n Ubar rho)``, halved when ``half_factor``.

    ``Ubar`` acts on the source space in path 1 before the devices, ``U`` on
    the target space after them.
    """
    ops1, ops2, gluing = _kraus_pair(phi1, phi2, c)
    u = _check_unitary(u, phi1.target_dim, "U")
    ubar = _check_unitary(ubar, phi1.source_dim, "Ubar")
    f = np.einsum("nm,mji,jk,nkl->il", gluing.C, ops2.conj(), u, ops1)
    value = np.trace(f @ ubar @ _as_array(rho_internal))
    return 0.5 * value if half_factor else value


def interference_pipeline(glued, rho_internal, u=None, ubar=None):
    """Off-diagonal path element obtained by simulating the full setup.

    Optional unitaries act in path 1: ``ubar`` before the devices, ``u`` after.
    """
    rho_i = prepare_input(rho_internal)
    if ubar is not None:
        pre = path_local_unitary(_check_unitary(ubar, glued.source_dim, "Ubar"))
        rho_i = pre @ rho_i @ dag(pre)
    rho_f = glued.act(rho_i)
    if u is not None:
        post = path_local_unitary(_check_unitary(u, glued.target_dim, "U"))
        rho_f = post @ rho_f @ dag(post)
    return off_diagonal(rho_f)


@dataclass(frozen=True)
class InterferenceReport:
    R: np.ndarray
    rho: DensityMatrix
    E: complex
    chis: np.ndarray
    p1_direct: np.ndarray
    p1_formula: np.ndarray

    @property
    def abs_E(self):
        return abs(self.E)

    @property
    def arg_E(self):
        return float(np.angle(self.E))

    @property
    def visibility(self):
        return 2 * abs(self.E)

    @property
    def max_deviation(self):
        return float(np.max(np.abs(self.p1_direct - self.p1_formula), initial=0.0))


def fringe(glued, rho_internal, chis=None):
    """Simulate the interferometer over phase settings ``chis``.

    Each probability is computed twice: through the full beam-splitter
    pipeline and from the fringe law ``1/2 + |E| cos(arg E - chi)``.
    """
    rho = as_density(rho_internal)
    if rho.dim != glued.source_dim:
        raise DimensionError(f"state dim {rho.dim} != source dim {glued.source_dim}")
    chis = default_chis() if chis is None else np.asarray(chis, dtype=float)
    rho_f = apply_glued(glued, prepare_input(rho)).matrix
    r = interference_operator(glued.phi1, glued.phi2, glued.gluing)
    e = off_diagonal(rho_f)
    direct = np.array([detection_probability(rho_f, chi) for chi in chis])
    formula = 0.5 + abs(e) * np.cos(np.angle(e) - chis)
    return InterferenceReport(r, rho, complex(e), chis, direct, formula)


@dataclass(frozen=True)
class VisibilityMeasures:
    A: float
    B: float
    F_c: float


def _product_objective(p, q, d):
    def fun(x):
        psi = x[:d] + 1j * x[d:]
        n = np.vdot(psi, psi).real
        pp, qp = p @ psi, q @ psi
        a, b = np.vdot(psi, pp).real, np.vdot(psi, qp).real
        f = a * b / n**2
        # d/dx of psi^dagger H psi is 2 (Re, Im)(H psi)
        grad_c = (2 * b * pp + 2 * a * qp) / n**2 - 4 * f * psi / n
        return -f, -np.concatenate([grad_c.real, grad_c.imag])

    return fun


def max_product_of_norms(v, w, seed=0, starts=16):
    """``sup_{|psi|=1} |V psi| |W psi|`` by deterministic multi-start L-BFGS.

    Starts include the standard basis, eigenvectors of ``V^dagger V``,
    ``W^dagger W`` and their sum, plus ``starts`` seeded random vectors.
    Returns ``(value, psi)``.
    """
    v, w = np.asarray(v), np.asarray(w)
    p, q = dag(v) @ v, dag(w) @ w
    d = p.shape[0]
    rng = np.random.default_rng(seed)
    inits = list(np.eye(d, dtype=complex))
    for h in (p, q, p + q):
        inits.extend(np.linalg.eigh(h)[1].T)
    inits.extend(rng.standard_normal((starts, d)) + 1j * rng.standard_normal((starts, d)))
    fun = _product_objective(p, q, d)
    best, best_psi = -1.0, None
    for psi0 in inits:
        x0 = np.concatenate([psi0.real, psi0.imag])
        res = scipy.optimize.minimize(
            fun, x0, jac=True, method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-12}
        )
        val = -res.fun
        if val > best:
            best = val
            psi = res.x[:d] + 1j * res.x[d:]
            best_psi = psi / np.linalg.norm(psi)
    return float(np.sqrt(max(best, 0.0))), best_psi


def visibility_measures(glued, seed=0):
    """Return ``(A, B, F_c)``; A and B need a rank-one (LSP) gluing.

    ``F_c`` is twice the interference magnitude for the maximally mixed input.
    For gluings without LSP factors, :class:`NotLSP` is raised; use
    :func:`coherent_fidelity` for F_c alone.
    """
    if not glued.gluing.is_lsp:
        raise NotLSP("A and B are defined for rank-one gluings with stored factors")
    v, w = glued.V, glued.W
    a = 0.5 * max_product_of_norms(v, w, seed=seed)[0]
    b = 0.5 * np.linalg.norm(v, 2) * np.linalg.norm(w, 2)
    return VisibilityMeasures(a, float(b), coherent_fidelity(glued))


def coherent_fidelity(glued):
    r = interference_operator(glued.phi1, glued.phi2, glued.gluing)
    d = glued.source_dim
    return float(2 * abs(interference_function(r, np.eye(d) / d)))

