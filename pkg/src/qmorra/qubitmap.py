"""Qutrit-to-two-qubit embedding and entanglement entropy.

The qutrit basis maps onto the triplet sector of two qubits
(|0~> -> |00>, |1~> -> (|01>+|10>)/sqrt(2), |2~> -> |11>); the singlet
(|01>-|10>)/sqrt(2) completes the basis and is left untouched by the
embedded coin operator.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from .core import DimensionError, NormalizationError, coin_coefficients

_SQRT2 = math.sqrt(2.0)

#: Two-qubit images of the qutrit basis states, rows |00>,|01>,|10>,|11>.
_EMBED = np.array(
    [
        [1, 0, 0],
        [0, 1 / _SQRT2, 0],
        [0, 1 / _SQRT2, 0],
        [0, 0, 1],
    ],
    dtype=np.complex128,
)

SINGLET = np.array([0, 1 / _SQRT2, -1 / _SQRT2, 0], dtype=np.complex128)


def embed_qutrit(state3: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Two-qubit image of a qutrit state, ordered |00>,|01>,|10>,|11>."""
    state3 = np.asarray(state3, dtype=np.complex128)
    if state3.shape != (3,):
        raise DimensionError(f"expected a qutrit state, got shape {state3.shape}")
    if abs(np.linalg.norm(state3) - 1.0) > 1e-9:
        raise NormalizationError("qutrit state is not normalized")
    return _EMBED @ state3


def basis_change_v() -> NDArray[np.complex128]:
    """Unitary V with rows |00>,|01>,|10>,|11> and columns the extended
    basis |0~>,|1~>,|2~>,|3~> (singlet last)."""
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 1 / _SQRT2, 0, 1 / _SQRT2],
            [0, 1 / _SQRT2, 0, -1 / _SQRT2],
            [0, 0, 1, 0],
        ],
        dtype=np.complex128,
    )


def x4(theta: float) -> NDArray[np.complex128]:
    """Deformed coin operator extended to the 4-dim basis: acts as the
    qutrit X_theta on |0~>,|1~>,|2~> and trivially on the singlet."""
    x = coin_coefficients(3, theta)
    out = np.zeros((4, 4), dtype=np.complex128)
    # Circulant qutrit block: entry (j, k) = x_{(j-k) mod 3}.
    for j in range(3):
        for k in range(3):
            out[j, k] = x[(j - k) % 3]
    out[3, 3] = 1.0
    return out


def x_theta_two_qubit(theta: float) -> NDArray[np.complex128]:
    """X_theta conjugated into the two-qubit basis: V X4 V^dagger."""
    v = basis_change_v()
    return v @ x4(theta) @ v.conj().T


def entanglement_entropy(state: NDArray[np.complex128]) -> float:
    """Von Neumann entropy (bits) of the first qubit's reduced state."""
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (4,):
        raise DimensionError(f"expected a two-qubit state, got shape {state.shape}")
    if abs(np.linalg.norm(state) - 1.0) > 1e-9:
        raise NormalizationError("two-qubit state is not normalized")
    psi = state.reshape(2, 2)
    rho = psi @ psi.conj().T
    evals = np.linalg.eigvalsh(rho)
    # Clamp float noise of order 1e-16; 0 * log 0 := 0.
    evals = np.clip(evals.real, 0.0, 1.0)
    nz = evals[evals > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def qubit_count(r: int) -> int:
    """Qubits needed to host an (r+1)-level coin register."""
    if r < 1:
        raise ValueError(f"coin pool must be at least 1, got {r}")
    return math.ceil(math.log2(r + 1))
