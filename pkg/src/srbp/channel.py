"""Multipath MIMO channels and their angular-domain (beamspace) representation.

A physical ULA-to-ULA channel is a sum of planar wavefronts.  Projecting it
onto uniform transmit/receive angle grids (DFT beams) gives a unitarily
equivalent matrix that becomes sparse when scatterers are few; the sparse
model used throughout the experiments is a Bernoulli mask applied to an
i.i.d. complex Gaussian matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import (
    check_binary_matrix,
    check_complex_matrix,
    check_probability,
    check_rng,
    readonly,
)

UNITARY_TOL = 1e-10
SINGVAL_REL_TOL = 1e-9
# |entry|^2 below this multiple of the mean entry energy counts as zero
# when deriving a mask from a numerically computed beamspace matrix.
NEAR_ZERO_ENERGY_RATIO = 1e-6


def steering_vector(n: int, omega: float) -> np.ndarray:
    """Unit-norm array response at normalized spatial frequency ``omega``.

    Entry k is exp(-j 2 pi omega k) / sqrt(n).
    """
    if n < 1:
        raise ValueError(f"array size must be >= 1, got {n}")
    return np.exp(-2j * np.pi * omega * np.arange(n)) / np.sqrt(n)


def steering_matrix(n: int) -> np.ndarray:
    """Unitary matrix whose columns are steering vectors on the grid {i/n}."""
    grid = np.arange(n) / n
    cols = [steering_vector(n, w) for w in grid]
    return np.column_stack(cols)


@dataclass(frozen=True)
class PathSet:
    """Propagation paths: complex gains plus departure/arrival angles in [0, 1)."""

    gains: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray

    def __post_init__(self):
        gains = readonly(np.asarray(self.gains, dtype=complex))
        aod = readonly(np.asarray(self.aod, dtype=float))
        aoa = readonly(np.asarray(self.aoa, dtype=float))
        if gains.ndim != 1 or gains.size < 1:
            raise ValueError("a PathSet needs at least one path")
        if aod.shape != gains.shape or aoa.shape != gains.shape:
            raise ValueError("gains, aod and aoa must have equal length")
        for name, ang in (("aod", aod), ("aoa", aoa)):
            if np.any(ang < 0) or np.any(ang >= 1):
                raise ValueError(f"{name} angles must lie in [0, 1)")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "aod", aod)
        object.__setattr__(self, "aoa", aoa)

    @property
    def count(self) -> int:
        return self.gains.size

    @classmethod
    def random(cls, count: int, rng=None) -> "PathSet":
        """Rayleigh paths: gains CN(0, 1/L), angles uniform on [0, 1)."""
        if count < 1:
            raise ValueError(f"path count must be >= 1, got {count}")
        rng = check_rng(rng)
        scale = 1.0 / np.sqrt(2 * count)
        gains = scale * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
        return cls(gains=gains, aod=rng.random(count), aoa=rng.random(count))


@dataclass(frozen=True)
class PhysicalChannel:
    """Antenna-domain channel matrix, n_r x n_t."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "matrix", readonly(check_complex_matrix(self.matrix, "channel"))
        )

    @property
    def n_r(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_t(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class VirtualChannel:
    """Beamspace representation H_v = A_r^H H A_t on uniform angle grids."""

    h_v: np.ndarray
    a_r: np.ndarray
    a_t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h_v", readonly(np.asarray(self.h_v, complex)))
        object.__setattr__(self, "a_r", readonly(np.asarray(self.a_r, complex)))
        object.__setattr__(self, "a_t", readonly(np.asarray(self.a_t, complex)))

    @property
    def rx_grid(self) -> np.ndarray:
        return np.arange(self.a_r.shape[0]) / self.a_r.shape[0]

    @property
    def tx_grid(self) -> np.ndarray:
        return np.arange(self.a_t.shape[0]) / self.a_t.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Map back to the antenna domain: A_r H_v A_t^H."""
        return self.a_r @ self.h_v @ self.a_t.conj().T


@dataclass(frozen=True)
class MaskMatrix:
    """Binary sparsity pattern of the beamspace channel."""

    bits: np.ndarray
    nnz: int = field(default=-1)

    def __post_init__(self):
        bits = readonly(check_binary_matrix(self.bits))
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "nnz", int(bits.sum()))

    @property
    def shape(self):
        return self.bits.shape

    def row_weights(self) -> np.ndarray:
        return self.bits.sum(axis=1)


@dataclass(frozen=True)
class SparsityConfig:
    """Per-entry Bernoulli probability delta and the mean row weight beta = n*delta."""

    delta: float
    beta: float

    def __post_init__(self):
        check_probability(self.delta, "delta")

    @classmethod
    def for_dimension(cls, n: int, delta: float | None = None) -> "SparsityConfig":
        if delta is None:
            delta = 1.0 / n
        return cls(delta=delta, beta=n * delta)


@dataclass(frozen=True)
class SparseVirtualChannel:
    """Complex beamspace channel with its exact zero pattern."""

    values: np.ndarray
    mask: MaskMatrix

    def __post_init__(self):
        values = readonly(check_complex_matrix(self.values, "values"))
        if values.shape != self.mask.shape:
            raise ValueError("values and mask shapes differ")
        if np.any(values[self.mask.bits == 0] != 0):
            raise ValueError("values must be exactly zero outside the mask support")
        object.__setattr__(self, "values", values)


def synthesize_physical_channel(paths: PathSet, n_t: int, n_r: int) -> PhysicalChannel:
    """Sum of rank-one wavefronts: sqrt(n_r n_t) sum_l g_l a_r(aoa_l) a_t(aod_l)^H."""
    a_r = np.column_stack([steering_vector(n_r, w) for w in paths.aoa])
    a_t = np.column_stack([steering_vector(n_t, w) for w in paths.aod])
    h = np.sqrt(n_r * n_t) * (a_r * paths.gains) @ a_t.conj().T
    return PhysicalChannel(matrix=h)


def virtual_decompose(channel: PhysicalChannel | np.ndarray) -> VirtualChannel:
    """Project the channel onto DFT beam grids at both ends."""
    h = channel.matrix if isinstance(channel, PhysicalChannel) else None
    if h is None:
        h = check_complex_matrix(channel, "channel")
    n_r, n_t = h.shape
    a_r = steering_matrix(n_r)
    a_t = steering_matrix(n_t)
    h_v = a_r.conj().T @ h @ a_t
    return VirtualChannel(h_v=h_v, a_r=a_r, a_t=a_t)


def sample_bernoulli_mask(n_r: int, n_t: int, delta: float, rng=None) -> MaskMatrix:
    """i.i.d. Bernoulli(delta) sparsity pattern."""
    check_probability(delta, "delta")
    rng = check_rng(rng)
    return MaskMatrix(bits=(rng.random((n_r, n_t)) < delta).astype(np.uint8))


def apply_mask(mask: MaskMatrix, rng=None) -> SparseVirtualChannel:
    """Fill the mask support with unit-variance circularly-symmetric Gaussians."""
    rng = check_rng(rng)
    n_r, n_t = mask.shape
    g = (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t)))
    g /= np.sqrt(2.0)
    return SparseVirtualChannel(values=mask.bits * g, mask=mask)


def derive_mask(h_v: np.ndarray, energy_ratio: float = NEAR_ZERO_ENERGY_RATIO) -> MaskMatrix:
    """Threshold a numerically computed beamspace matrix into a mask.

    Entries with |h|^2 below ``energy_ratio`` times the mean entry energy
    count as zero.  Validation path only; the experiments sample masks
    directly.
    """
    h_v = check_complex_matrix(h_v, "h_v")
    energy = np.abs(h_v) ** 2
    mean_energy = energy.mean()
    if mean_energy == 0:
        return MaskMatrix(bits=np.zeros(h_v.shape, dtype=np.uint8))
    return MaskMatrix(bits=(energy >= energy_ratio * mean_energy).astype(np.uint8))
