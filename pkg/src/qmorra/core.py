"""Deformed coin operators and outcome distributions for the qudit Morra game.

All operators act on a qudit of dimension d = r + 1 where r = n*m is the
total coin pool.  The deformation angle theta interpolates between the
degenerate game (theta = 0, every toss collapses onto zero coins) and the
classical game (theta = 2*pi/d, where the coin operator is an exact cyclic
permutation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

TWO_PI = 2.0 * np.pi

#: Entrywise tolerance used when asserting a matrix is unitary.
UNITARITY_TOL = 1e-12
#: Tolerance on the norm of a state accepted as "normalized".
NORMALIZATION_TOL = 1e-9


class DimensionError(ValueError):
    """Raised for invalid qudit dimensions or out-of-range indices."""


class NormalizationError(ValueError):
    """Raised when a state vector is not normalized."""


@dataclass(frozen=True)
class GameConfig:
    """Game parameters: ``players`` hiding up to ``coins_per_player`` each.

    ``theta`` is reduced modulo 2*pi; the construction is periodic and the
    identity X_theta**k = X_{k*theta} stays meaningful for k*theta > 2*pi.
    """

    players: int = 2
    coins_per_player: int = 1
    theta: float = TWO_PI / 3.0

    def __post_init__(self) -> None:
        if self.players < 2:
            raise ValueError(f"need at least 2 players, got {self.players}")
        if self.coins_per_player < 1:
            raise ValueError(
                f"need at least 1 coin per player, got {self.coins_per_player}"
            )
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def total_coins(self) -> int:
        """Size of the coin pool, r = n*m."""
        return self.players * self.coins_per_player

    @property
    def dim(self) -> int:
        """Qudit dimension d = r + 1."""
        return self.total_coins + 1


def _check_dim(d: int) -> None:
    if d < 2:
        raise DimensionError(f"qudit dimension must be >= 2, got {d}")


def fourier(d: int) -> NDArray[np.complex128]:
    """Quantum Fourier transform F_{j,k} = omega**(j*k) / sqrt(d)."""
    _check_dim(d)
    j = np.arange(d)
    omega = np.exp(2j * np.pi / d)
    return omega ** np.outer(j, j) / np.sqrt(d)


def deformed_z(d: int, theta: float) -> NDArray[np.complex128]:
    """Deformed phase operator diag(1, e^{i theta}, ..., e^{i r theta})."""
    _check_dim(d)
    return np.diag(np.exp(1j * theta * np.arange(d)))


def deformed_x(d: int, theta: float) -> NDArray[np.complex128]:
    """Deformed coin operator X_theta = F^dagger Z_theta F.

    Circulant: column k holds the coefficients x_{j-k}(theta).  At
    theta = 2*pi/d this is the exact cyclic permutation ("classical" game).
    """
    _check_dim(d)
    f = fourier(d)
    return f.conj().T @ deformed_z(d, theta) @ f


def coin_coefficient(d: int, j: int, theta: float) -> complex:
    """Amplitude x_j(theta) of outcome j after one deformed coin toss.

    x_j(theta) = (1/d) * (1 + sum_{k=1}^{r} omega^{(d-k) j} e^{i k theta})
    with omega = e^{2 pi i / d} and r = d - 1.
    """
    _check_dim(d)
    if not 0 <= j < d:
        raise DimensionError(f"outcome index {j} out of range for dimension {d}")
    k = np.arange(1, d)
    omega = np.exp(2j * np.pi / d)
    return complex((1.0 + np.sum(omega ** ((d - k) * j) * np.exp(1j * k * theta))) / d)


def coin_coefficients(d: int, theta: float) -> NDArray[np.complex128]:
    """All amplitudes (x_0(theta), ..., x_r(theta)) as a vector."""
    _check_dim(d)
    k = np.arange(1, d)
    j = np.arange(d)[:, None]
    omega = np.exp(2j * np.pi / d)
    return (1.0 + np.sum(omega ** ((d - k) * j) * np.exp(1j * k * theta), axis=1)) / d


def coin_state(config: GameConfig, k: int) -> NDArray[np.complex128]:
    """State |k_theta> = X_theta**k |0>, i.e. k deformed coins in the box.

    Uses the identity X_theta**k = X_{k*theta}, so the result is just the
    coefficient vector at angle k*theta.
    """
    if not 0 <= k <= config.total_coins:
        raise DimensionError(
            f"coin count {k} out of range 0..{config.total_coins}"
        )
    if k == 0:
        state = np.zeros(config.dim, dtype=np.complex128)
        state[0] = 1.0
        return state
    return coin_coefficients(config.dim, k * config.theta)


def outcome_distribution(state: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Measurement distribution p(n) = |<n|state>|^2 over the coin outcomes."""
    state = np.asarray(state, dtype=np.complex128)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"state norm {norm} deviates from 1")
    probs = np.abs(state) ** 2
    return probs / probs.sum()


def is_unitary(u: NDArray[np.complex128], tol: float = UNITARITY_TOL) -> bool:
    """True if U^dagger U = I entrywise within ``tol``."""
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)
