"""Spanning families of states and unitaries for linear reconstruction."""
import numpy as np

from .channels import DensityMatrix


def state_basis(dim):
    """``dim**2`` density matrices spanning all operators on a ``dim``-level space.

    Order: ``|n><n|`` for each n, then for each pair ``n > n'`` the projectors
    onto ``(|n> + |n'>)/sqrt 2`` and ``(|n> + i|n'>)/sqrt 2``.
    """
    eye = np.eye(dim, dtype=complex)
    states = [DensityMatrix(np.outer(eye[n], eye[n])) for n in range(dim)]
    for n in range(dim):
        for m in range(n):
            states.append(DensityMatrix.pure(eye[n] + eye[m]))
            states.append(DensityMatrix.pure(eye[n] + 1j * eye[m]))
    return states


def shift_matrix(dim):
    return np.roll(np.eye(dim, dtype=complex), 1, axis=0)


def clock_matrix(dim):
    return np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))


def unitary_basis(dim):
    """Weyl clock-shift family ``X^a Z^b`` (a major, b minor), trace-orthogonal."""
    x, z = shift_matrix(dim), clock_matrix(dim)
    return [
        np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
        for a in range(dim)
        for b in range(dim)
    ]
