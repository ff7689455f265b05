"""Independent oracles for the golden values frozen into the test suite.

Nothing here goes through nhgauss: covariances come from a truncated Fock-space
construction of the squeezed state and from matrix exponentials of the
noise-free flow written out by hand.

    python3 scripts/oracles.py
"""

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

CUTOFF = 80


def annihilation(n):
    return sparse.diags(np.sqrt(np.arange(1, n)), 1, format="csr")


def tmsv_moments(r, sign):
    """Covariance of exp(sign r (a^dag b^dag - a b))|0,0> from Fock-space operators."""
    a1 = annihilation(CUTOFF)
    eye = sparse.identity(CUTOFF, format="csr")
    a, b = sparse.kron(a1, eye, format="csr"), sparse.kron(eye, a1, format="csr")
    gen = sign * r * (a.T @ b.T - a @ b)
    vac = np.zeros(CUTOFF * CUTOFF)
    vac[0] = 1.0
    psi = expm_multiply(gen, vac)
    quads = [(a + a.T) / np.sqrt(2), (a - a.T) / (1j * np.sqrt(2)),
             (b + b.T) / np.sqrt(2), (b - b.T) / (1j * np.sqrt(2))]
    V = np.empty((4, 4))
    for i, x in enumerate(quads):
        for j, y in enumerate(quads):
            V[i, j] = np.real(psi.conj() @ (((x @ y + y @ x) / 2) @ psi))
    return V


def ternary_S(V13, h, g):
    """S for TMSV on modes (1,3) times vacuum on mode 2 (product state, zero means)."""
    q = {(0, 0): V13[0, 0], (2, 2): 0.5, (1, 1): V13[2, 2], (0, 1): V13[0, 2]}
    p = {(0, 0): V13[1, 1], (2, 2): 0.5, (1, 1): V13[3, 3], (0, 1): V13[1, 3]}
    # index 1 here is mode 3
    hh = [h[0], h[2], h[1]]
    gg = [g[0], g[2], g[1]]
    S = sum(hh[k] ** 2 * q[(k, k)] + gg[k] ** 2 * p[(k, k)] for k in range(3))
    S += 2 * hh[0] * hh[1] * q[(0, 1)] + 2 * gg[0] * gg[1] * p[(0, 1)]
    return S


def binary_flow(J, K, G):
    # hand-expanded q/p equations for the gain (1) / loss (2) pair
    return np.array([
        [G / 2, 0, 0, -(J + K)],
        [0, G / 2, J - K, 0],
        [0, -(J + K), -G / 2, 0],
        [J - K, 0, 0, -G / 2],
    ])


if __name__ == "__main__":
    s = 1 / np.sqrt(2)
    h, g = (1, -s, -s), (1, s, s)
    for sign in (+1, -1):
        V = tmsv_moments(1.0, sign)
        print(f"TMSV r=1 sign={sign:+d}: <q1q2>={V[0, 2]:.15g} <p1p2>={V[1, 3]:.15g} <q1^2>={V[0, 0]:.15g}")
        print(f"  ternary S (standard coefficients) = {ternary_S(V, h, g):.15g}")
    V0 = tmsv_moments(1.0, -1)
    A = binary_flow(2.3, 1.0, 1.0)
    M = expm(A * 0.5)
    V = M @ V0 @ M.T
    print("expm V(t=0.5) at J=2.3, K=1, r=1:")
    for row in V:
        print("  ", ", ".join(f"{x:.15g}" for x in row))
