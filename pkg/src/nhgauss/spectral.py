"""Closed-form eigenfrequencies, phase classification and exceptional points."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from nhgauss._linalg import charpoly, polyval
from nhgauss.model import SystemSpec, Topology, build_drift

EP_TOL = 1e-9


class Phase(str, enum.Enum):
    SYMMETRIC = "symmetric"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class SpectralReport:
    frequencies: tuple[complex, ...]
    phase: Phase
    ep_location: Optional[float] = None


def _principal_sqrt(x: float) -> complex:
    # +0.0 imaginary part keeps negative radicands on the Im > 0 side of the cut
    return cmath.sqrt(complex(x, 0.0))


def binary_eigenfrequencies(J: float, K: float, gain: float = 1.0) -> tuple[complex, complex]:
    """``(omega_plus, omega_minus)``; ``omega_plus`` has Im >= 0 in the broken phase."""
    w = _principal_sqrt(4 * J * J - 4 * K * K - gain * gain) / 2
    return w, -w


def ternary_eigenfrequencies(J: float, K: float, gain: float = 1.0) -> tuple[complex, complex, complex]:
    """``(omega_-1, omega_0, omega_1)`` of the gain/neutral/loss chain."""
    w = _principal_sqrt(2 * J * J - 2 * K * K - gain * gain / 4)
    return -w, 0j, w


def exceptional_point(topology: Topology | str, K: float, gain: float = 1.0) -> float:
    """Coupling ``J*`` at which the spectrum coalesces at zero."""
    topology = Topology(topology)
    if topology is Topology.BINARY:
        return math.sqrt(K * K + gain * gain / 4)
    return math.sqrt(K * K + gain * gain / 8)


def eigenfrequencies(spec: SystemSpec) -> tuple[complex, ...]:
    if spec.topology is Topology.BINARY:
        return binary_eigenfrequencies(spec.J, spec.K, spec.gain)
    return ternary_eigenfrequencies(spec.J, spec.K, spec.gain)


def classify_phase(spec: SystemSpec, tol: float = EP_TOL) -> SpectralReport:
    freqs = eigenfrequencies(spec)
    j_star = exceptional_point(spec.topology, spec.K, spec.gain)
    if abs(spec.J - j_star) <= tol:
        phase = Phase.EXCEPTIONAL_POINT
    elif all(abs(w.imag) <= tol for w in freqs):
        phase = Phase.SYMMETRIC
    else:
        phase = Phase.BROKEN
    return SpectralReport(frequencies=freqs, phase=phase, ep_location=j_star)


def drift_spectrum_crosscheck(spec: SystemSpec) -> float:
    """Normalised residual of the drift's characteristic polynomial at ``-i omega``.

    Each closed-form frequency must be a root of ``det(lambda - A)``; the
    residual is divided by ``||A||_F ** dim``.
    """
    if spec.gamma != 0:
        raise ValueError("drift_spectrum_crosscheck requires gamma = 0")
    A = build_drift(spec)
    coeffs = charpoly(A)
    norm = np.linalg.norm(A)
    if norm == 0:
        return 0.0
    worst = max(abs(polyval(coeffs, -1j * w)) for w in eigenfrequencies(spec))
    return float(worst / norm ** A.shape[0])
