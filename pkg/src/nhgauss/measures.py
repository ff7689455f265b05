"""Entanglement and phase-space measures on Gaussian covariance matrices.

Every function accepts a single covariance ``(2N, 2N)`` or a stack
``(..., 2N, 2N)`` and broadcasts over the leading axes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from nhgauss._linalg import real_cubic_roots

CLAMP_TOL = 1e-10


class PhysicalityError(ValueError):
    """The covariance violates positivity/uncertainty beyond round-off."""


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _clamp(x: NDArray, scale: NDArray, what: str) -> NDArray:
    bad = x < -CLAMP_TOL * np.maximum(1.0, scale)
    if np.any(bad):
        raise PhysicalityError(f"{what} is negative beyond round-off (min {np.min(x):.3e})")
    return np.maximum(x, 0.0)


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


# ---------------------------------------------------------------------------
# logarithmic negativity

def log_negativity(V: NDArray) -> float | NDArray:
    """Two-mode logarithmic negativity from the block invariants.

    ``nu_- = sqrt((Sigma - sqrt(Sigma^2 - 4 det V)) / 2)`` with
    ``Sigma = det V_G + det V_L - 2 det V_GL``; ``E_N = max(0, -ln 2 nu_-)``.
    """
    V = np.asarray(V, dtype=float)
    if V.shape[-2:] != (4, 4):
        raise ValueError(f"log_negativity expects 4x4 covariances, got {V.shape[-2:]}")
    nu = _smallest_transposed_nu_from_blocks(V)
    with np.errstate(divide="ignore"):
        en = np.maximum(0.0, -np.log(2.0 * nu))
    return _scalar_or_array(en)


def _smallest_transposed_nu_from_blocks(V: NDArray) -> NDArray:
    det_g = np.linalg.det(V[..., :2, :2])
    det_l = np.linalg.det(V[..., 2:, 2:])
    det_gl = np.linalg.det(V[..., :2, 2:])
    det_v = np.linalg.det(V)
    sigma = det_g + det_l - 2.0 * det_gl
    scale = sigma * sigma
    rad = _clamp(sigma * sigma - 4.0 * det_v, scale, "Sigma^2 - 4 det V")
    nu2 = _clamp((sigma - np.sqrt(rad)) / 2.0, np.abs(sigma), "nu_-^2")
    return np.sqrt(nu2)


def partial_transpose(V: NDArray, mode_index: int) -> NDArray:
    """Flip the sign of the momentum of mode ``mode_index`` (0-based)."""
    V = np.asarray(V, dtype=float)
    n_modes = V.shape[-1] // 2
    if not 0 <= mode_index < n_modes:
        raise IndexError(f"mode_index {mode_index} out of range for {n_modes} modes")
    flip = np.ones(2 * n_modes)
    flip[2 * mode_index + 1] = -1.0
    return V * flip[:, None] * flip[None, :]


def symplectic_eigenvalues(V: NDArray) -> NDArray:
    """Ascending symplectic eigenvalues for 1-3 modes.

    The eigenvalues of ``Omega V`` are ``+-i nu``; ``B = -(Omega V)^2`` has
    ``nu^2`` twice each, so the power sums of ``nu^2`` come from traces of
    ``B`` and the product from ``det V``. The resulting degree-N polynomial in
    ``nu^2`` is solved in closed form.
    """
    V = np.asarray(V, dtype=float)
    n_modes = V.shape[-1] // 2
    if n_modes not in (1, 2, 3):
        raise ValueError(f"closed-form symplectic spectrum supports 1-3 modes, got {n_modes}")
    det_v = np.linalg.det(V)
    if n_modes == 1:
        nu2 = _clamp(det_v, 1.0, "det V")[..., None]
        return np.sqrt(nu2)

    M = symplectic_form(n_modes) @ V
    B = -(M @ M)
    s1 = np.trace(B, axis1=-2, axis2=-1) / 2.0
    if n_modes == 2:
        scale = s1 * s1
        rad = np.sqrt(_clamp(s1 * s1 - 4.0 * det_v, scale, "discriminant"))
        big = (s1 + rad) / 2.0
        # product form avoids cancellation for the small root
        small = np.where(big > 0, det_v / np.where(big > 0, big, 1.0), 0.0)
        nu2 = np.stack([small, big], axis=-1)
    else:
        s2 = np.trace(B @ B, axis1=-2, axis2=-1) / 2.0
        e2 = (s1 * s1 - s2) / 2.0
        nu2 = real_cubic_roots(s1, e2, det_v)
    nu2 = _clamp(nu2, (s1 * s1)[..., None], "nu^2")
    return np.sort(np.sqrt(nu2), axis=-1)


def one_vs_rest_negativity(V: NDArray, mode_index: int) -> float | NDArray:
    """Negativity between mode ``mode_index`` (0-based) and all other modes."""
    nu = symplectic_eigenvalues(partial_transpose(V, mode_index))[..., 0]
    with np.errstate(divide="ignore"):
        en = np.maximum(0.0, -np.log(2.0 * nu))
    return _scalar_or_array(en)


# ---------------------------------------------------------------------------
# tripartite inseparability

@dataclass(frozen=True)
class CoefficientSet:
    """Weights of ``x = sum h_k q_k`` and ``y = sum g_k p_k``."""

    h: tuple[float, float, float]
    g: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(v) for v in self.h))
        object.__setattr__(self, "g", tuple(float(v) for v in self.g))
        if len(self.h) != 3 or len(self.g) != 3:
            raise ValueError("coefficient sets need three h and three g weights")
        if not any(self.h) and not any(self.g):
            raise ValueError("coefficients must not all vanish")

    @classmethod
    def standard(cls) -> CoefficientSet:
        s = 1 / math.sqrt(2)
        return cls(h=(1.0, -s, -s), g=(1.0, s, s))

    def scaled(self, c: float) -> CoefficientSet:
        return CoefficientSet(tuple(c * v for v in self.h), tuple(c * v for v in self.g))

    def bounds(self) -> tuple[float, float, float]:
        """``|h_k g_k| + |h_l g_l + h_m g_m|`` for k = 1, 2, 3."""
        hg = [a * b for a, b in zip(self.h, self.g)]
        return tuple(abs(hg[k]) + abs(sum(hg) - hg[k]) for k in range(3))


def inseparability_S(V: NDArray, coeffs: CoefficientSet | None = None) -> float | NDArray:
    """``S = <(dx)^2> + <(dy)^2>`` for zero-mean three-mode states."""
    coeffs = coeffs or CoefficientSet.standard()
    V = np.asarray(V, dtype=float)
    if V.shape[-2:] != (6, 6):
        raise ValueError("inseparability_S expects 6x6 covariances")
    h = np.array(coeffs.h)
    g = np.array(coeffs.g)
    Vqq = V[..., 0::2, 0::2]
    Vpp = V[..., 1::2, 1::2]
    S = np.einsum("i,...ij,j->...", h, Vqq, h) + np.einsum("i,...ij,j->...", g, Vpp, g)
    return _scalar_or_array(S)


class TripartiteClass(str, enum.Enum):
    GENUINE = "genuine"
    FULLY_INSEPARABLE = "fully_inseparable"
    INCONCLUSIVE = "inconclusive"


def tripartite_class(S: float, coeffs: CoefficientSet | None = None) -> TripartiteClass:
    """Violating the smallest bound certifies genuine tripartite entanglement;
    violating any bound certifies full inseparability."""
    bounds = (coeffs or CoefficientSet.standard()).bounds()
    if S < min(bounds):
        return TripartiteClass.GENUINE
    if S < max(bounds):
        return TripartiteClass.FULLY_INSEPARABLE
    return TripartiteClass.INCONCLUSIVE


# ---------------------------------------------------------------------------
# Wigner function

def wigner_density(V: NDArray, x: NDArray) -> float | NDArray:
    """``W(x) = exp(-x^T V^-1 x) / (pi^N sqrt(det V))``.

    ``x`` has shape ``(..., 2N)``. Uses a Cholesky factor of ``V``, which also
    certifies positive definiteness.
    """
    V = np.asarray(V, dtype=float)
    x = np.asarray(x, dtype=float)
    n_modes = V.shape[0] // 2
    try:
        L = np.linalg.cholesky(V)
    except np.linalg.LinAlgError as exc:
        raise PhysicalityError("covariance is not positive definite") from exc
    sqrt_det = float(np.prod(np.diag(L)))
    # solve L z = x for all points at once
    z = np.linalg.solve(L, x.reshape(-1, x.shape[-1]).T).T
    quad = np.einsum("...i,...i->...", z, z).reshape(x.shape[:-1])
    W = np.exp(-quad) / (math.pi**n_modes * sqrt_det)
    return _scalar_or_array(W)


def wigner_slice(
    V: NDArray,
    plane: tuple[int, int],
    axis_a: Sequence[float],
    axis_b: Sequence[float],
    fixed: Sequence[float] | None = None,
) -> NDArray[np.float64]:
    """Densities on the grid ``axis_a x axis_b`` of coordinates ``plane``.

    ``out[i, j]`` is evaluated at ``x[plane[0]] = axis_a[i]``,
    ``x[plane[1]] = axis_b[j]``; every other coordinate takes its value from
    ``fixed`` (zeros by default).
    """
    a, b = plane
    dim = np.asarray(V).shape[0]
    if a == b or not (0 <= a < dim and 0 <= b < dim):
        raise ValueError(f"invalid plane {plane}")
    base = np.zeros(dim) if fixed is None else np.asarray(fixed, dtype=float).copy()
    axis_a = np.asarray(axis_a, dtype=float)
    axis_b = np.asarray(axis_b, dtype=float)
    pts = np.broadcast_to(base, (len(axis_a), len(axis_b), dim)).copy()
    pts[..., a] = axis_a[:, None]
    pts[..., b] = axis_b[None, :]
    return np.asarray(wigner_density(V, pts))


def slice_covariance(V: NDArray, plane: tuple[int, int]) -> NDArray[np.float64]:
    """Covariance of the Gaussian profile seen on a slice through the origin.

    Inverse of the ``plane`` block of ``V^-1``; its eigenvalue ratio measures
    how squeezed the slice looks.
    """
    prec = np.linalg.inv(np.asarray(V, dtype=float))
    idx = np.ix_(plane, plane)
    return np.linalg.inv(prec[idx])


def slice_anisotropy(V: NDArray, plane: tuple[int, int] = (0, 2)) -> float:
    ev = np.linalg.eigvalsh(slice_covariance(V, plane))
    return float(ev[-1] / ev[0])


# ---------------------------------------------------------------------------
# trajectory analysis

def sudden_death_events(times: NDArray, values: NDArray) -> list[tuple[str, float]]:
    """``("ESD", t)`` where a measure first hits exactly 0 and ``("ESB", t)`` where it revives."""
    zero = np.asarray(values) <= 0.0
    flips = np.nonzero(zero[1:] != zero[:-1])[0] + 1
    return [("ESD" if zero[i] else "ESB", float(times[i])) for i in flips]


def final_death_time(times: NDArray, values: NDArray) -> float | None:
    """Start of the last zero stretch that lasts to the end of the trace."""
    events = sudden_death_events(times, values)
    if not events or events[-1][0] != "ESD":
        return None
    return events[-1][1]
