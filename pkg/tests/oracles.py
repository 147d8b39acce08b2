"""Independent reference implementations used by the tests.

Everything here is written with explicit loops or from first principles so
that it shares no code path with the library under test.
"""
import numpy as np


def matrix_units(d):
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            yield e


def naive_apply(ops, rho):
    """sum_k V_k rho V_k^dagger with explicit index loops."""
    ops = [np.asarray(v) for v in ops]
    t, s = ops[0].shape
    out = np.zeros((t, t), dtype=complex)
    for v in ops:
        for i in range(t):
            for j in range(t):
                acc = 0j
                for a in range(s):
                    for b in range(s):
                        acc += v[i, a] * rho[a, b] * np.conj(v[j, b])
                out[i, j] += acc
    return out


def brute_choi(apply, d_in):
    """J = sum_ij |i><j| (x) Phi(|i><j|), input factor first."""
    blocks = []
    for i in range(d_in):
        row = []
        for j in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, j] = 1
            row.append(apply(e))
        blocks.append(row)
    return np.block(blocks)


def blockwise_glued(ops1, ops2, c, x):
    """Two-path action written block by block with explicit sums."""
    d = np.asarray(ops1[0]).shape[1]
    t = np.asarray(ops1[0]).shape[0]
    x11, x12, x21, x22 = x[:d, :d], x[:d, d:], x[d:, :d], x[d:, d:]
    y11 = sum(v @ x11 @ v.conj().T for v in ops1)
    y22 = sum(w @ x22 @ w.conj().T for w in ops2)
    y12 = np.zeros((t, t), dtype=complex)
    y21 = np.zeros((t, t), dtype=complex)
    for n, v in enumerate(ops1):
        for m, w in enumerate(ops2):
            y12 += c[n, m] * v @ x12 @ w.conj().T
            y21 += np.conj(c[n, m]) * w @ x21 @ v.conj().T
    return np.block([[y11, y12], [y21, y22]])


def trace_out_ancilla(u, d, n, rho, anchor):
    """Tr_a(U (rho (x) |a><a|) U^dagger) via explicit ancilla-basis sum."""
    big = u @ np.kron(rho, np.outer(anchor, anchor.conj())) @ u.conj().T
    out = np.zeros((d, d), dtype=complex)
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1
        proj = np.kron(np.eye(d), e.reshape(1, -1))
        out += proj @ big @ proj.T
    return out


def anchor_block(u, d, n, anchor):
    """<a|U|a> as a d x d operator."""
    proj = np.kron(np.eye(d), anchor.conj().reshape(1, -1))
    return proj @ u @ proj.conj().T


def random_gluing(n, m, rng, norm=None):
    """Random N x M matrix with operator norm ``norm`` (default uniform in [0, 1])."""
    g = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    target = rng.uniform(0, 1) if norm is None else norm
    return g * (target / np.linalg.norm(g, 2))


def random_unit_vector(k, rng):
    v = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return v / np.linalg.norm(v)


def random_isometry(rows, cols, rng):
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def fibonacci_sphere(count):
    """Nearly uniform points on the Bloch sphere as qubit state vectors."""
    k = np.arange(count) + 0.5
    theta = np.arccos(1 - 2 * k / count)
    phi = np.pi * (1 + 5**0.5) * k
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
