import itertools

import numpy as np
import pytest


class ScriptedChoices:
    """Duck-typed generator whose integers() answers come from a fixed list.

    Lets tests enumerate every possible column-exclusion branch.
    """

    def __init__(self, choices):
        self.choices = list(choices)
        self.consumed = 0

    def integers(self, n):
        if self.consumed < len(self.choices):
            value = self.choices[self.consumed]
        else:
            value = 0
        self.consumed += 1
        if value >= n:
            raise IndexError("scripted choice out of range")
        return value


def enumerate_choice_branches(run, max_depth=8):
    """Call ``run(rng)`` for every possible sequence of choice outcomes.

    ``run`` must consult the rng only through integers(n).  Yields the
    result of every branch.
    """
    stack = [()]
    while stack:
        prefix = stack.pop()
        probe = ScriptedChoices(prefix)
        result = run(probe)
        if probe.consumed <= len(prefix):
            yield result
            continue
        # The run consumed more choices than scripted; fan out on the next
        # choice point.  Re-run with each feasible value at that depth.
        depth = len(prefix)
        if depth >= max_depth:
            raise RuntimeError("choice tree deeper than expected")
        width = _choice_width(run, prefix)
        for value in range(width):
            stack.append(prefix + (value,))


def _choice_width(run, prefix):
    class Recorder(ScriptedChoices):
        def __init__(self, choices):
            super().__init__(choices)
            self.width = None

        def integers(self, n):
            if self.consumed == len(self.choices):
                self.width = n
            return super().integers(n)

    rec = Recorder(prefix)
    run(rec)
    return rec.width if rec.width is not None else 0


def brute_force_structural_rank(bits) -> int:
    """Maximum row-column matching by exhaustive permutation search."""
    bits = np.asarray(bits)
    n_r, n_c = bits.shape
    n = max(n_r, n_c)
    best = 0
    for perm in itertools.permutations(range(n)):
        hits = sum(
            1
            for i, j in enumerate(perm)
            if i < n_r and j < n_c and bits[i, j]
        )
        best = max(best, hits)
    return best


def assert_lower_triangular_head(permuted, n_d):
    """First n_d rows/cols must be lower-triangular with unit diagonal."""
    head = permuted[:n_d, :n_d]
    assert np.all(np.diag(head) == 1)
    assert not np.any(np.triu(permuted[:n_d, :n_d], k=1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
