"""Closed-form helpers for the small dense matrices used throughout the package."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


def charpoly(M: NDArray) -> NDArray[np.complex128]:
    """Characteristic polynomial coefficients of ``M`` (highest power first).

    Faddeev-LeVerrier recursion, so the result is obtained with matrix
    products only. ``charpoly(M)[k]`` multiplies ``lambda**(n - k)``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    Mk = np.zeros_like(M)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        Mk = M @ Mk + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(M @ Mk) / k
    return coeffs


def polyval(coeffs: NDArray, x: complex) -> complex:
    """Horner evaluation of ``coeffs`` (highest power first) at ``x``."""
    acc = 0j
    for c in coeffs:
        acc = acc * x + c
    return acc


def real_cubic_roots(e1: NDArray, e2: NDArray, e3: NDArray) -> NDArray[np.float64]:
    """Ascending real roots of ``x**3 - e1 x**2 + e2 x - e3`` (broadcast over inputs).

    The cubic is assumed to have three real roots, which is the case for the
    squared symplectic spectrum of a positive definite matrix. Trigonometric
    Cardano branch, then one Newton step per root.
    """
    e1, e2, e3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (e1, e2, e3)))
    shift = e1 / 3.0
    p = e2 - e1 * e1 / 3.0
    q = -2.0 * e1**3 / 27.0 + e1 * e2 / 3.0 - e3

    scale = np.maximum(np.abs(e1), 1.0)
    degenerate = p > -1e-14 * scale**2
    p_safe = np.where(degenerate, -1.0, p)
    m = 2.0 * np.sqrt(-p_safe / 3.0)
    arg = np.clip(3.0 * q / (p_safe * m), -1.0, 1.0)
    theta = np.arccos(arg) / 3.0
    k = np.arange(3).reshape((3,) + (1,) * e1.ndim)
    y = m * np.cos(theta - 2.0 * np.pi * k / 3.0)
    y = np.where(degenerate, 0.0, y)
    x = y + shift

    f = ((x - e1) * x + e2) * x - e3
    df = (3.0 * x - 2.0 * e1) * x + e2
    ok = np.abs(df) > 1e-8 * scale**2
    x = np.where(ok, x - f / np.where(ok, df, 1.0), x)
    return np.moveaxis(np.sort(x, axis=0), 0, -1)
