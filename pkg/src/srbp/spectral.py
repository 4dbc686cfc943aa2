"""Singular-value gains, water-filling, and the two capacity formulas.

The baseline transceiver water-fills over all eigen channels of the full
matrix; the beam-pairing transceiver water-fills over the dominant singular
value of each diagonal block.  Capacity is reported in bits/s/Hz (log base
2) by default; noise variance is normalized to 1 so the power budget is the
total transmit SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import svdvals

from .channel import SparseVirtualChannel
from .validation import check_complex_matrix, check_positive, readonly

# sigma_i^2 counts toward the effective DoF if above this multiple of
# sigma_max^2; recovers the structural rank when zeros are exact.
RANK_REL_TOL = 1e-9


@dataclass(frozen=True)
class PowerAllocation:
    """Water-filling solution: per-stream powers, budget, and water level."""

    powers: np.ndarray
    budget: float
    water_level: float

    def __post_init__(self):
        object.__setattr__(self, "powers", readonly(np.asarray(self.powers, float)))


@dataclass(frozen=True)
class CapacityResult:
    """Capacity with the allocation and gains that produced it."""

    capacity: float
    allocation: PowerAllocation
    gains: np.ndarray
    scheme: str

    def __post_init__(self):
        object.__setattr__(self, "gains", readonly(np.asarray(self.gains, float)))

    @property
    def effective_dof(self) -> int:
        return int(self.gains.size)


def squared_singular_values(matrix) -> np.ndarray:
    """Descending squared singular values of a complex matrix."""
    m = check_complex_matrix(matrix, "matrix")
    if m.size == 0:
        return np.zeros(0)
    s = svdvals(m)
    return np.sort(s**2)[::-1]


def waterfill(gains, rho: float) -> PowerAllocation:
    """KKT-optimal power split: p_i = max(0, mu - 1/g_i), sum p_i = rho.

    Solved exactly by activating channels in descending gain order and
    computing the water level in closed form per active set.
    """
    check_positive(rho, "rho")
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1:
        raise ValueError("gains must be a 1-D sequence")
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite and nonnegative")
    pos = np.nonzero(g > 0)[0]
    if pos.size == 0:
        raise ValueError("no usable subchannel: all gains are zero")

    order = pos[np.argsort(g[pos])[::-1]]
    inv = 1.0 / g[order]
    # Largest active set whose water level clears its worst channel.
    mu = 0.0
    active = 1
    for k in range(1, order.size + 1):
        mu = (rho + inv[:k].sum()) / k
        active = k
        if k < order.size and mu <= inv[k]:
            break

    powers = np.zeros_like(g)
    powers[order[:active]] = mu - inv[:active]
    return PowerAllocation(powers=powers, budget=float(rho), water_level=float(mu))


def allocation_capacity(gains, powers, log_base: float = 2.0) -> float:
    """sum log(1 + p_i g_i) in the requested logarithm base."""
    g = np.asarray(gains, float)
    p = np.asarray(powers, float)
    return float(np.sum(np.log1p(p * g)) / np.log(log_base))


def _empty_result(scheme: str, rho: float) -> CapacityResult:
    alloc = PowerAllocation(powers=np.zeros(0), budget=float(rho), water_level=0.0)
    return CapacityResult(capacity=0.0, allocation=alloc, gains=np.zeros(0), scheme=scheme)


def svd_capacity(channel, rho: float, log_base: float = 2.0) -> CapacityResult:
    """Optimal capacity: water-fill over all eigen channels of the matrix."""
    check_positive(rho, "rho")
    values = channel.values if isinstance(channel, SparseVirtualChannel) else channel
    gains = squared_singular_values(values)
    gains = gains[gains > RANK_REL_TOL * gains[0]] if gains.size and gains[0] > 0 else gains[:0]
    if gains.size == 0:
        return _empty_result("svd", rho)
    alloc = waterfill(gains, rho)
    cap = allocation_capacity(gains, alloc.powers, log_base)
    return CapacityResult(capacity=cap, allocation=alloc, gains=gains, scheme="svd")


def srbp_capacity(blocks, rho: float, log_base: float = 2.0) -> CapacityResult:
    """Beam-pairing capacity: one stream per diagonal block.

    Each block contributes its largest squared singular value; the streams
    are water-filled jointly under the total budget.
    """
    check_positive(rho, "rho")
    gains = np.array([squared_singular_values(b)[0] for b in blocks])
    if gains.size == 0:
        return _empty_result("srbp", rho)
    alloc = waterfill(gains, rho)
    cap = allocation_capacity(gains, alloc.powers, log_base)
    return CapacityResult(capacity=cap, allocation=alloc, gains=gains, scheme="srbp")
