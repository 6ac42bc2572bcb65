"""Pure-NumPy propagation kernels (fallback backend).

Sequential 2x2 products are evaluated as pairwise tree reductions so the
work stays inside vectorized matmul calls; results are identical to the
Cython backend up to floating-point rounding.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def _stack_from_angles(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Slice unitaries exp(-i*(theta/2)*(cos(phi) sx + sin(phi) sy))."""
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    u = np.empty((theta.shape[0], 2, 2), dtype=np.complex128)
    u[:, 0, 0] = c
    u[:, 1, 1] = c
    u[:, 0, 1] = -1j * s * np.exp(-1j * phi)
    u[:, 1, 0] = -1j * s * np.exp(1j * phi)
    return u


def sequence_product(mats: np.ndarray) -> np.ndarray:
    """Ordered product mats[n-1] @ ... @ mats[0] (index 0 acts first)."""
    u = np.ascontiguousarray(mats)
    if u.shape[0] == 0:
        return np.eye(u.shape[-1], dtype=u.dtype)
    while u.shape[0] > 1:
        if u.shape[0] % 2 == 1:
            u = np.concatenate([u[:1], np.matmul(u[2::2], u[1::2])])
        else:
            u = np.matmul(u[1::2], u[0::2])
    return u[0]


def su2_product(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Time-ordered product of xy-plane rotation slices."""
    return sequence_product(_stack_from_angles(theta, phi))


def density_product(
    theta: np.ndarray, phi: np.ndarray, decay: float, rho: np.ndarray
) -> np.ndarray:
    """Apply slice unitaries to ``rho`` with off-diagonal decay per slice.

    ``decay`` is exp(-dt/T2) for one slice, applied in the z basis after
    each unitary slice.
    """
    u = _stack_from_angles(theta, phi)
    if decay == 1.0:
        full = sequence_product(u)
        return full @ rho @ full.conj().T
    r = np.array(rho, dtype=np.complex128)
    for k in range(u.shape[0]):
        r = u[k] @ r @ u[k].conj().T
        r[0, 1] *= decay
        r[1, 0] *= decay
    return r


def conjugated_product(
    cache: np.ndarray, idx: np.ndarray, axes: np.ndarray
) -> np.ndarray:
    """Product of frame-rotated cached pulse unitaries.

    Pulse j applies Rz(axes[j]) @ cache[idx[j]] @ Rz(-axes[j]); index 0 acts
    first. Equivalent to propagating each pulse with its frame phase, by the
    frame-covariance identity.
    """
    u = cache[idx].copy()
    ph = np.exp(-1j * axes)
    u[:, 0, 1] *= ph
    u[:, 1, 0] *= np.conj(ph)
    return sequence_product(u)
