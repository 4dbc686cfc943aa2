"""Estimator-style front ends for the two transceivers.

Both estimators follow the scikit-learn convention (``fit`` on a channel
matrix, learned attributes with trailing underscores, ``get_params`` /
``set_params``) so they compose with ecosystem tooling; the heavy lifting
lives in the functional modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .channel import MaskMatrix, SparseVirtualChannel
from .pairing import block_triangulate, extract_blocks, triangulate_mask
from .spectral import (
    RANK_REL_TOL,
    CapacityResult,
    squared_singular_values,
    srbp_capacity,
    svd_capacity,
)
from .validation import check_complex_matrix, check_rng


def _as_sparse_channel(X) -> SparseVirtualChannel:
    if isinstance(X, SparseVirtualChannel):
        return X
    values = check_complex_matrix(X, "X")
    mask = MaskMatrix(bits=(values != 0).astype(np.uint8))
    return SparseVirtualChannel(values=values, mask=mask)


class SvdTransceiver(BaseEstimator):
    """Optimal baseline: full decomposition plus water-filling.

    Parameters
    ----------
    log_base : float, capacity logarithm base (2.0 gives bits/s/Hz).
    """

    def __init__(self, log_base: float = 2.0):
        self.log_base = log_base

    def fit(self, X, y=None):
        channel = _as_sparse_channel(X)
        gains = squared_singular_values(channel.values)
        if gains.size and gains[0] > 0:
            gains = gains[gains > RANK_REL_TOL * gains[0]]
        else:
            gains = gains[:0]
        self.channel_ = channel
        self.gains_ = gains
        self.n_streams_ = int(gains.size)
        return self

    def capacity(self, rho: float) -> CapacityResult:
        self._check_fitted()
        return svd_capacity(self.channel_, rho, log_base=self.log_base)

    def _check_fitted(self):
        if not hasattr(self, "channel_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")


class SrbpTransceiver(BaseEstimator):
    """Beam-pairing transceiver: mask triangulation, diagonal blocks, SIC streams.

    Parameters
    ----------
    random_state : seed for the column-exclusion choices.
    log_base : float, capacity logarithm base.
    """

    def __init__(self, random_state=None, log_base: float = 2.0):
        self.random_state = random_state
        self.log_base = log_base

    def fit(self, X, y=None):
        channel = _as_sparse_channel(X)
        rng = check_rng(self.random_state)
        tri = triangulate_mask(channel.mask, rng)
        decomp = block_triangulate(tri, channel.mask)
        blocks = extract_blocks(decomp, channel)
        self.channel_ = channel
        self.triangulation_ = tri
        self.decomposition_ = decomp
        self.blocks_ = blocks
        self.gains_ = np.array(
            [squared_singular_values(b)[0] for b in blocks]
        )
        self.n_streams_ = tri.n_d
        return self

    def capacity(self, rho: float) -> CapacityResult:
        self._check_fitted()
        return srbp_capacity(self.blocks_, rho, log_base=self.log_base)

    def _check_fitted(self):
        if not hasattr(self, "blocks_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")
