"""Analytical predictor of the average number of beam pairs.

Row weights of the down-sized mask start Poisson(beta); each peeling step
removes one column, shifting weight mass downward, and an exclusion occurs
exactly when no weight-1 row is present.  Tracking the mean row count and
the mean weight histogram step by step gives the expected number of
exclusions and hence the expected pair count.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .validation import check_probability, readonly

TAIL_MASS = 1e-12


def poisson_row_weight_pmf(beta: float, k: int) -> float:
    """P(row weight = k) in the infinite-antenna limit: e^-b b^k / k!."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return float(poisson.pmf(k, beta))


@dataclass(frozen=True)
class DofRecursionState:
    """Mean-field state of the peeling process at one step.

    weight_counts[k-1] is the average number of weight-k rows; ``p_ex`` is
    the exclusion probability at this step, (1 - p1)^m.
    """

    step: int
    m: float
    weight_counts: np.ndarray
    p1: float
    p_ex: float
    n_ex_accum: float

    def __post_init__(self):
        object.__setattr__(
            self, "weight_counts", readonly(np.asarray(self.weight_counts, float))
        )


@dataclass(frozen=True)
class DofPrediction:
    n_d: float
    n_ex: float
    trajectory: tuple

    def __post_init__(self):
        object.__setattr__(self, "trajectory", tuple(self.trajectory))


def _exclusion_probability(p1: float, m: float) -> float:
    # (1 - p1)^m with the corners handled explicitly: empty product is 1,
    # and a guaranteed weight-1 row means no exclusion.
    if m <= 0:
        return 1.0
    if p1 >= 1.0:
        return 0.0
    return float(np.exp(m * np.log1p(-p1)))


def init_state(n: int, delta: float) -> DofRecursionState:
    """State after dropping all-zero rows, before the first peeling step."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    check_probability(delta, "delta")
    beta = n * delta
    # Truncate the weight histogram where the Poisson tail is negligible.
    k_max = int(poisson.isf(TAIL_MASS, beta)) + 1
    p_hat0 = poisson_row_weight_pmf(beta, 0)
    m = n * (1.0 - p_hat0)
    ks = np.arange(1, k_max + 1)
    weight_counts = m * poisson.pmf(ks, beta) / (1.0 - p_hat0)
    p1 = float(weight_counts[0] / m) if m > 0 else 0.0
    return DofRecursionState(
        step=1,
        m=m,
        weight_counts=weight_counts,
        p1=min(p1, 1.0),
        p_ex=_exclusion_probability(min(p1, 1.0), m),
        n_ex_accum=0.0,
    )


def step(state: DofRecursionState, n: int) -> DofRecursionState:
    """Advance the mean-field recursion by one peeling step.

    A weight-k row loses one unit of weight with probability
    alpha_k = k / (columns remaining + 1); weight-1 rows additionally
    account for the removed paired row itself.  All quantities are clamped
    nonnegative since the fluid approximation can overshoot near m -> 0.
    """
    counts = state.weight_counts
    k_max = counts.size
    m, p1, p_ex = state.m, state.p1, state.p_ex

    # Columns remaining at this step: n - step + 1.
    denom = n - state.step + 2
    if denom < 1:
        denom = 1
    alpha = np.minimum(np.arange(1, k_max + 1) / denom, 1.0)
    q = alpha * counts

    # Weight-1 attrition: the paired row leaves with certainty (when a
    # pairing happens at all), the other weight-1 rows lose their single
    # entry with probability alpha_1.
    q1 = (1.0 - alpha[0]) * (1.0 - p_ex) + alpha[0] * m * p1

    new_m = max(m - q1, 0.0)
    inflow = np.roll(q, -1)
    inflow[-1] = 0.0
    new_counts = counts - q + inflow
    new_counts[0] = counts[0] - q1 + q[1] if k_max > 1 else counts[0] - q1
    new_counts = np.maximum(new_counts, 0.0)

    new_p1 = float(new_counts[0] / new_m) if new_m > 0 else 0.0
    new_p1 = min(new_p1, 1.0)
    return DofRecursionState(
        step=state.step + 1,
        m=new_m,
        weight_counts=new_counts,
        p1=new_p1,
        p_ex=_exclusion_probability(new_p1, new_m),
        n_ex_accum=state.n_ex_accum + p_ex,
    )


def predict_dof(n: int, delta: float | None = None) -> DofPrediction:
    """Expected pair count and exclusion count for an n x n Bernoulli mask."""
    if delta is None:
        delta = 1.0 / n
    state = init_state(n, delta)
    trajectory = [state]
    for _ in range(n):
        state = step(state, n)
        trajectory.append(state)
    n_ex = state.n_ex_accum
    return DofPrediction(n_d=n - n_ex, n_ex=n_ex, trajectory=trajectory)


def trajectory_csv(prediction: DofPrediction) -> str:
    """Per-step diagnostics as CSV: step, m, n1, p1, p_ex."""
    buf = io.StringIO()
    buf.write("step,m,n1,p1,p_ex\n")
    for s in prediction.trajectory:
        n1 = s.weight_counts[0] if s.weight_counts.size else 0.0
        buf.write(f"{s.step},{s.m!r},{n1!r},{s.p1!r},{s.p_ex!r}\n")
    return buf.getvalue()
