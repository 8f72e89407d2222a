"""Independent reference implementations used by several test files."""

import numpy as np
from scipy.linalg import expm

from qslab.circuit import gate_matrix

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])


def u1_expm(theta, phi):
    return expm(-0.5j * theta * (np.cos(phi) * X + np.sin(phi) * Y))


def fsim_expm(theta, phi):
    mix = expm(-0.5j * theta * (np.kron(X, X) + np.kron(Y, Y)))
    return mix @ np.diag([1, 1, 1, np.exp(-1j * phi)])


def embed_single(n, q, m):
    """Full 2^n operator: kron(I, m, I) with qubit q as bit q of the index."""
    return np.kron(np.kron(np.eye(1 << (n - q - 1)), m), np.eye(1 << q))


def embed_pair(n, qa, qb, m):
    """Full operator for a 4x4 gate indexed by bit(qa) + 2*bit(qb)."""
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    mask = (1 << qa) | (1 << qb)
    for col in range(dim):
        cin = (col >> qa & 1) + 2 * (col >> qb & 1)
        for cout in range(4):
            row = (col & ~mask) | ((cout & 1) << qa) | ((cout >> 1) << qb)
            full[row, col] += m[cout, cin]
    return full


def dense_circuit_state(c):
    dim = 1 << c.n
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    for cyc in c.cycles:
        layer = np.eye(dim, dtype=complex)
        for q, g in enumerate(cyc.singles):
            layer = embed_single(c.n, q, gate_matrix(g)) @ layer
        for i, j, g in cyc.pairs:
            layer = embed_pair(c.n, i, j, gate_matrix(g)) @ layer
        psi = layer @ psi
    return psi
