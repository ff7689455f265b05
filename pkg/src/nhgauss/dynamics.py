"""Initial Gaussian states and covariance (Lyapunov) dynamics.

The covariance obeys ``dV/dt = A V + V A^T + D`` and is integrated with a
fixed-step classical Runge-Kutta scheme. Conventions: vacuum variance 1/2,
canonical ordering ``(q1, p1, ..., qN, pN)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from nhgauss.model import SystemSpec, Topology, build_diffusion, build_drift
from nhgauss.spectral import binary_eigenfrequencies

log = logging.getLogger(__name__)

DEFAULT_DT = 1e-4


class IntegrationAborted(RuntimeError):
    """Raised when the covariance stops being finite; carries the valid prefix."""

    def __init__(self, message: str, record: "TraceRecord"):
        super().__init__(message)
        self.record = record

    @property
    def last_valid_time(self) -> float:
        return float(self.record.times[-1])


@dataclass
class TraceRecord:
    times: NDArray[np.float64]
    covariances: NDArray[np.float64]
    measures: dict[str, NDArray[np.float64]] = field(default_factory=dict)

    def __post_init__(self):
        if self.times.ndim != 1 or self.covariances.shape[0] != self.times.shape[0]:
            raise ValueError("times and covariances must have matching leading length")
        if len(self.times) and self.times[0] != 0:
            raise ValueError("time grid must start at 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# initial states

def two_mode_squeezed(
    r: float,
    n_modes: int = 2,
    modes: tuple[int, int] = (0, 1),
    sign: int = -1,
) -> NDArray[np.float64]:
    """Two-mode squeezed vacuum on ``modes`` (0-based), vacuum elsewhere.

    ``sign=-1`` gives ``<q_i q_j> = -sinh(2r)/2`` and ``<p_i p_j> = +sinh(2r)/2``,
    the convention consistent with the closed-form binary solution at ``t=0``.
    """
    i, j = modes
    if i == j or not (0 <= i < n_modes and 0 <= j < n_modes):
        raise ValueError(f"invalid squeezed mode pair {modes} for {n_modes} modes")
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    V = 0.5 * np.eye(2 * n_modes)
    c, s = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    for m in (i, j):
        V[2 * m, 2 * m] = V[2 * m + 1, 2 * m + 1] = c
    V[2 * i, 2 * j] = V[2 * j, 2 * i] = sign * s
    V[2 * i + 1, 2 * j + 1] = V[2 * j + 1, 2 * i + 1] = -sign * s
    return V


def initial_state(
    spec: SystemSpec,
    squeezed_modes: Optional[tuple[int, int]] = None,
    squeeze_sign: int = -1,
) -> NDArray[np.float64]:
    """Initial covariance: a TMSV on the gain/loss pair, vacuum on the neutral mode."""
    if squeezed_modes is None:
        squeezed_modes = (0, 1) if spec.topology is Topology.BINARY else (0, 2)
    return two_mode_squeezed(spec.r, spec.n_modes, squeezed_modes, squeeze_sign)


# ---------------------------------------------------------------------------
# integration

def lyapunov_rhs(A: NDArray, D: NDArray, V: NDArray) -> NDArray:
    return A @ V + V @ A.T + D


def rk4_step(A: NDArray, D: NDArray, V: NDArray, h: float) -> NDArray:
    """One classical RK4 step of the Lyapunov equation, stage by stage."""
    k1 = lyapunov_rhs(A, D, V)
    k2 = lyapunov_rhs(A, D, V + 0.5 * h * k1)
    k3 = lyapunov_rhs(A, D, V + 0.5 * h * k2)
    k4 = lyapunov_rhs(A, D, V + h * k3)
    return V + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_affine_map(A: NDArray, D: NDArray, h: float) -> tuple[NDArray, NDArray]:
    """``(P, c)`` with ``vec(sym(rk4_step(V))) == P @ vec(V) + c`` (row-major vec).

    The equation is linear and autonomous, so one RK4 step is an affine map. It
    is assembled by pushing the basis matrices through :func:`rk4_step`.
    """
    n = A.shape[0]
    zero = np.zeros((n, n))
    c = rk4_step(A, D, zero, h)
    P = np.empty((n * n, n * n))
    Z = np.zeros_like(D)
    for m in range(n * n):
        E = np.zeros(n * n)
        E[m] = 1.0
        P[:, m] = rk4_step(A, Z, E.reshape(n, n), h).ravel()
    # fold the per-step symmetrisation V <- (V + V^T)/2 into the map
    T = np.arange(n * n).reshape(n, n).T.ravel()
    P = 0.5 * (P + P[T])
    c = 0.5 * (c + c.T)
    return P, c.ravel()


def integrate_lyapunov(
    A: NDArray,
    D: NDArray,
    V0: NDArray,
    t_end: float,
    dt: float = DEFAULT_DT,
    stride: int = 1,
) -> TraceRecord:
    """Integrate ``dV/dt = A V + V A^T + D`` from ``t=0`` to ``t_end``.

    Records every ``stride``-th step (plus the final step). Raises
    :class:`IntegrationAborted` as soon as a recorded covariance is non-finite.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not t_end >= 0:
        raise ValueError(f"t_end must be >= 0, got {t_end!r}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    V0 = 0.5 * (np.asarray(V0, dtype=float) + np.asarray(V0, dtype=float).T)

    n_steps = int(math.ceil(t_end / dt - 1e-9))
    rec_steps = list(range(0, n_steps + 1, stride))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    out = np.empty((len(rec_steps), n * n))
    out[0] = V0.ravel()

    P, c = _rk4_affine_map(A, D, dt)
    v = out[0].copy()
    slot = 1
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            v = P @ v + c
            if slot < len(rec_steps) and step == rec_steps[slot]:
                if not np.isfinite(v).all():
                    times = np.array(rec_steps[:slot], dtype=float) * dt
                    partial = TraceRecord(times, out[:slot].reshape(-1, n, n).copy())
                    raise IntegrationAborted(
                        f"covariance became non-finite before Gamma_t={step * dt:.6g}; "
                        f"last valid Gamma_t={times[-1]:.6g}",
                        partial,
                    )
                out[slot] = v
                slot += 1

    covs = out.reshape(-1, n, n)
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    return TraceRecord(np.array(rec_steps, dtype=float) * dt, covs)


def evolve(
    V0: NDArray,
    spec: SystemSpec,
    t_end: float,
    dt: float = DEFAULT_DT,
    stride: int = 1,
    noise: bool = True,
) -> TraceRecord:
    """Covariance trajectory for ``spec``; ``noise=False`` zeroes both D and gamma."""
    if not noise:
        spec = spec.noise_free()
        D = np.zeros((spec.dim, spec.dim))
    else:
        D = build_diffusion(spec)
    return integrate_lyapunov(build_drift(spec), D, V0, t_end, dt, stride)


# ---------------------------------------------------------------------------
# closed form (noise-free, gamma = 0, symmetric phase)

def closed_form_covariance(J: float, K: float, gain: float, r: float, t) -> NDArray[np.float64]:
    """Analytical binary covariance for the noise-free, undamped symmetric phase.

    ``t`` may be a scalar (returns 4x4) or an array (returns ``(len(t), 4, 4)``).
    """
    w2 = (4 * J * J - 4 * K * K - gain * gain) / 4
    if not w2 > 0:
        raise ValueError(
            f"closed form only valid above the exceptional point (omega_+^2 = {w2:.3g} <= 0)"
        )
    w = math.sqrt(w2)
    t = np.asarray(t, dtype=float)
    cos2, sin2 = np.cos(2 * w * t), np.sin(2 * w * t)
    ch, sh = math.cosh(2 * r) / 2, math.sinh(2 * r) / 2
    G = gain
    beat_plus = (4 * J * K + 4 * K * K + G * G) / (4 * w2)
    beat_minus = (4 * J * K - 4 * K * K - G * G) / (4 * w2)
    sum_jk = (J * J + J * K) / w2
    diff_jk = (J * J - J * K) / w2
    jg = J * G / (2 * w2)
    osc = G * sin2 / (2 * w)

    V = np.empty(t.shape + (4, 4))
    V[..., 0, 0] = ch * (sum_jk - beat_plus * cos2 + osc)
    V[..., 1, 1] = ch * (diff_jk + beat_minus * cos2 + osc)
    V[..., 2, 2] = ch * (sum_jk - beat_plus * cos2 - osc)
    V[..., 3, 3] = ch * (diff_jk + beat_minus * cos2 - osc)
    V[..., 0, 1] = sh * (-jg + jg * cos2 - J * sin2 / w)
    V[..., 0, 2] = sh * (beat_plus - sum_jk * cos2)
    V[..., 0, 3] = ch * (jg - jg * cos2 - K * sin2 / w)
    V[..., 1, 2] = ch * (-jg + jg * cos2 - K * sin2 / w)
    V[..., 1, 3] = sh * (beat_minus + diff_jk * cos2)
    V[..., 2, 3] = sh * (jg - jg * cos2 - J * sin2 / w)
    for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        V[..., j, i] = V[..., i, j]
    return V


def revival_times(J: float, K: float, gain: float, t_end: float) -> list[float]:
    """Instants ``k pi / omega_+ <= t_end`` at which the noise-free covariance recurs."""
    w = binary_eigenfrequencies(J, K, gain)[0]
    if w.imag != 0 or w.real == 0:
        log.warning("no revivals: J=%g, K=%g is not in the symmetric phase", J, K)
        return []
    period = math.pi / w.real
    count = int(math.floor(t_end / period + 1e-12))
    return [k * period for k in range(1, count + 1)]


def revival_couplings(K: float, gain: float, t: float, J_max: float) -> list[float]:
    """Couplings ``J <= J_max`` whose revival ``k pi / omega_+`` falls exactly at ``t``."""
    out = []
    k = 1
    while True:
        w = k * math.pi / t
        J = math.sqrt(w * w + K * K + gain * gain / 4)
        if J > J_max:
            return out
        out.append(J)
        k += 1


def sample_indices(times: Sequence[float], targets: Sequence[float]) -> NDArray[np.intp]:
    """Index of the nearest recorded time for each target time."""
    times = np.asarray(times)
    if len(times) == 1:
        return np.zeros(len(targets), dtype=np.intp)
    idx = np.searchsorted(times, targets)
    idx = np.clip(idx, 1, len(times) - 1)
    left = times[idx - 1]
    right = times[idx]
    return np.where(np.abs(np.asarray(targets) - left) <= np.abs(right - np.asarray(targets)), idx - 1, idx)
