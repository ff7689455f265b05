"""System description and drift/diffusion construction for gain/loss mode networks.

All matrices use the quadrature ordering ``(q1, p1, q2, p2, ..., qN, pN)`` with
``q = (b + b^dag)/sqrt(2)`` and ``p = (b - b^dag)/(i sqrt(2))``. Rates are in
units of the optomechanical gain ``Gamma``; time is ``Gamma * t``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

REALNESS_TOL = 1e-12


class Topology(str, enum.Enum):
    BINARY = "binary"
    TERNARY = "ternary"

    @property
    def n_modes(self) -> int:
        return 2 if self is Topology.BINARY else 3


@dataclass(frozen=True)
class SystemSpec:
    """Declarative description of a coupled gain/loss network.

    ``J`` is the beam-splitter coupling, ``K`` the two-mode-squeezing coupling,
    ``gamma`` the intrinsic mechanical damping, ``n_th`` the thermal phonon
    number and ``r`` the initial squeezing. ``gain`` is the unit rate and
    stays 1 outside of tests.
    """

    topology: Topology = Topology.BINARY
    J: float = 0.0
    K: float = 0.0
    gamma: float = 0.0
    n_th: float = 0.0
    r: float = 0.0
    gain: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        for name in ("J", "K", "gamma", "n_th", "r", "gain"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"SystemSpec.{name} must be finite and >= 0, got {value!r}")

    @property
    def n_modes(self) -> int:
        return self.topology.n_modes

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def noise_free(self) -> SystemSpec:
        return replace(self, gamma=0.0)


# ---------------------------------------------------------------------------
# orderings

def momentum_first_permutation(n_modes: int) -> NDArray[np.float64]:
    """Permutation ``P`` with ``P @ (q1,p1,...) == (p1,q1,...)``."""
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.kron(np.eye(n_modes), swap)


def to_momentum_first(M: NDArray) -> NDArray:
    P = momentum_first_permutation(M.shape[0] // 2)
    return P @ M @ P.T


def from_momentum_first(M: NDArray) -> NDArray:
    P = momentum_first_permutation(M.shape[0] // 2)
    return P.T @ M @ P


# ---------------------------------------------------------------------------
# generators

def _couplings(topology: Topology) -> list[tuple[int, int]]:
    if topology is Topology.BINARY:
        return [(0, 1)]
    return [(0, 1), (1, 2)]


def _mode_rates(spec: SystemSpec) -> list[float]:
    half = spec.gain / 2.0
    if spec.topology is Topology.BINARY:
        return [half, -half]
    return [half, 0.0, -half]


def _lossless_drift(spec: SystemSpec) -> NDArray[np.float64]:
    # i J b_k - i K b_k^dag acting on mode j gives
    #   dq_j/dt += -(J + K) p_k,   dp_j/dt += (J - K) q_k
    A = np.zeros((spec.dim, spec.dim))
    for j, rate in enumerate(_mode_rates(spec)):
        A[2 * j, 2 * j] = A[2 * j + 1, 2 * j + 1] = rate
    for j, k in _couplings(spec.topology):
        for a, b in ((j, k), (k, j)):
            A[2 * a, 2 * b + 1] = -(spec.J + spec.K)
            A[2 * a + 1, 2 * b] = spec.J - spec.K
    return A


def build_hamiltonian(spec: SystemSpec) -> NDArray[np.complex128]:
    """Non-Hermitian generator ``H`` with ``du/dt = -i H u`` (no noise, no damping)."""
    return 1j * _lossless_drift(spec)


def build_drift(spec: SystemSpec) -> NDArray[np.float64]:
    """Drift matrix ``A = -i H - (gamma/2) I``."""
    A = -1j * build_hamiltonian(spec)
    residue = np.abs(A.imag).max()
    if residue > REALNESS_TOL:
        raise ArithmeticError(f"drift has imaginary residue {residue:.3e}")
    return A.real - 0.5 * spec.gamma * np.eye(spec.dim)


def build_diffusion(spec: SystemSpec) -> NDArray[np.float64]:
    """Diagonal diffusion matrix.

    Gain and loss modes receive ``Gamma/2`` of optical vacuum noise on top of the
    thermal mechanical bath ``gamma (n_th + 1/2)``; the ternary neutral mode only
    sees the bath.
    """
    bath = spec.gamma * (spec.n_th + 0.5)
    half = spec.gain / 2.0
    optical = [half, half] if spec.topology is Topology.BINARY else [half, 0.0, half]
    return np.diag(np.repeat(np.array(optical) + bath, 2))


def pseudo_hermiticity_metric() -> NDArray[np.complex128]:
    """``eta = sigma_x (x) sigma_y``, acting in the (p1, q1, p2, q2) ordering."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    return np.kron(sx, sy)


def check_pseudo_hermitian(H: NDArray) -> float:
    """Max-abs residual of ``eta H eta^-1 - H^dag`` for a binary generator."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (4, 4):
        raise ValueError(f"pseudo-Hermiticity check needs a 4x4 binary generator, got {H.shape}")
    Hp = to_momentum_first(H)
    eta = pseudo_hermiticity_metric()
    # eta is an involution
    return float(np.abs(eta @ Hp @ eta - Hp.conj().T).max())


def effective_gain(g: float, alpha_mag: float, kappa: float) -> float:
    """Optomechanically induced gain ``4 (g |alpha|)^2 / kappa``."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    G = g * alpha_mag
    return 4.0 * G * G / kappa
