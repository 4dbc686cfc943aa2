"""Semi-random beam pairing: greedy triangulation of the sparsity mask.

The transceiver structure is discovered purely on the binary mask.  Peeling
proceeds one column per step: a weight-1 row dedicates its column to a
beam pair; when no weight-1 row exists a random nonzero column is
temporarily excluded so peeling can continue.  A second pass absorbs the
excluded columns and leftover rows into diagonal blocks, yielding a block
lower-triangular layout whose blocks carry one stream each.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import MaskMatrix, SparseVirtualChannel
from .validation import check_rng, readonly


@dataclass(frozen=True)
class TraceAction:
    """One peeling step: either pair(row, col) or exclude(col).

    Indices are 0-based coordinates of the original mask; ``row`` is None
    for exclusions.  Serialized 1-based for the text trace format.
    """

    step: int
    kind: str  # "pair" | "exclude"
    row: int | None
    col: int

    def serialize(self) -> str:
        if self.kind == "pair":
            return f"{self.step}:pair({self.row + 1},{self.col + 1})"
        return f"{self.step}:exclude({self.col + 1})"


def serialize_trace(actions) -> str:
    return "\n".join(a.serialize() for a in actions)


@dataclass(frozen=True)
class PermutationTrace:
    """Row/column orders plus the per-step action log that produced them.

    ``row_order`` permutes the rows of the down-sized mask (original row
    indices, zero rows of the full mask omitted); ``col_order`` permutes
    all columns.
    """

    row_order: np.ndarray
    col_order: np.ndarray
    actions: tuple

    def __post_init__(self):
        object.__setattr__(self, "row_order", readonly(np.asarray(self.row_order, int)))
        object.__setattr__(self, "col_order", readonly(np.asarray(self.col_order, int)))
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class OperatingMatrix:
    """Live view of the mask during peeling: nonzero rows only.

    ``row_ids``/``col_ids`` map the view back to original coordinates.
    """

    bits: np.ndarray
    row_ids: np.ndarray
    col_ids: np.ndarray
    step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "bits", readonly(np.asarray(self.bits, np.uint8)))
        object.__setattr__(self, "row_ids", readonly(np.asarray(self.row_ids, int)))
        object.__setattr__(self, "col_ids", readonly(np.asarray(self.col_ids, int)))

    @property
    def n_bar(self) -> int:
        return self.bits.shape[0]

    @property
    def n_cols(self) -> int:
        return self.bits.shape[1]


@dataclass(frozen=True)
class TriangulationResult:
    """Full output of structure discovery on one mask.

    pairs     beam pairs (row, col) in pairing order; len == n_d
    excluded  actively excluded columns, in exclusion order
    c_rows    rows that peeled to zero without being paired, removal order
    residual_cols  columns never processed (all-zero columns of the mask)
    """

    n_d: int
    n_ex_active: int
    n_residual: int
    n_bar: int
    n: int
    pairs: tuple
    excluded: tuple
    c_rows: tuple
    residual_cols: tuple
    trace: PermutationTrace

    @property
    def a_region(self):
        """Paired rows x paired columns (lower-triangular, unit diagonal)."""
        return tuple(r for r, _ in self.pairs), tuple(c for _, c in self.pairs)

    @property
    def b_region(self):
        """All live rows x excluded columns."""
        rows = tuple(r for r, _ in self.pairs) + self.c_rows
        return rows, self.excluded

    @property
    def c_region(self):
        """Unpaired rows x paired columns."""
        return self.c_rows, tuple(c for _, c in self.pairs)


@dataclass(frozen=True)
class Block:
    """Index rectangle of one diagonal block, in original mask coordinates."""

    rows: tuple
    cols: tuple

    @property
    def shape(self):
        return (len(self.rows), len(self.cols))


@dataclass(frozen=True)
class BlockDecomposition:
    """Ordered diagonal blocks plus the final permuted layout."""

    blocks: tuple
    unabsorbed_cols: tuple
    unattached_rows: tuple
    residual_cols: tuple
    row_order: np.ndarray
    col_order: np.ndarray
    mask_bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_order", readonly(np.asarray(self.row_order, int)))
        object.__setattr__(self, "col_order", readonly(np.asarray(self.col_order, int)))
        object.__setattr__(self, "mask_bits", readonly(np.asarray(self.mask_bits, np.uint8)))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def initialize(mask: MaskMatrix) -> OperatingMatrix:
    """Drop all-zero rows of the mask; record where the survivors came from."""
    rows = np.nonzero(mask.row_weights() > 0)[0]
    return OperatingMatrix(
        bits=mask.bits[rows],
        row_ids=rows,
        col_ids=np.arange(mask.shape[1]),
    )


def lower_triangulate(op: OperatingMatrix, rng=None) -> TriangulationResult:
    """Peel the operating matrix into pairs, exclusions, and leftovers.

    Weight-1 rows are taken smallest-index first; the excluded column is
    chosen uniformly among columns that still carry at least one 1 (an
    all-zero column gains nothing from exclusion and is left residual).
    """
    rng = check_rng(rng)
    n = op.n_cols
    bits = op.bits

    row_cols = [set(np.nonzero(bits[i])[0]) for i in range(op.n_bar)]
    col_rows = [set(np.nonzero(bits[:, j])[0]) for j in range(n)]
    live_rows = set(range(op.n_bar))
    live_cols = set(range(n))

    pairs: list[tuple[int, int]] = []
    excluded: list[int] = []
    c_rows: list[int] = []
    actions: list[TraceAction] = []
    step = op.step

    def remove_column(j: int):
        live_cols.discard(j)
        for r in sorted(col_rows[j]):
            row_cols[r].discard(j)
            if not row_cols[r] and r in live_rows:
                live_rows.discard(r)
                c_rows.append(r)
        col_rows[j].clear()

    while live_rows:
        weight1 = [r for r in live_rows if len(row_cols[r]) == 1]
        if weight1:
            i = min(weight1)
            j = next(iter(row_cols[i]))
            actions.append(TraceAction(step, "pair", int(op.row_ids[i]), int(op.col_ids[j])))
            pairs.append((i, j))
            live_rows.discard(i)
            row_cols[i].clear()
            col_rows[j].discard(i)
            remove_column(j)
        else:
            candidates = sorted(j for j in live_cols if col_rows[j])
            k = candidates[int(rng.integers(len(candidates)))]
            actions.append(TraceAction(step, "exclude", None, int(op.col_ids[k])))
            excluded.append(k)
            remove_column(k)
        step += 1

    residual = sorted(live_cols)
    paired_rows = [i for i, _ in pairs]
    row_order = paired_rows + c_rows
    col_order = [j for _, j in pairs] + excluded + residual

    return TriangulationResult(
        n_d=len(pairs),
        n_ex_active=len(excluded),
        n_residual=len(residual),
        n_bar=op.n_bar,
        n=n,
        pairs=tuple((int(op.row_ids[i]), int(op.col_ids[j])) for i, j in pairs),
        excluded=tuple(int(op.col_ids[j]) for j in excluded),
        c_rows=tuple(int(op.row_ids[i]) for i in c_rows),
        residual_cols=tuple(int(op.col_ids[j]) for j in residual),
        trace=PermutationTrace(
            row_order=np.array(row_order, int),
            col_order=np.array(col_order, int),
            actions=tuple(actions),
        ),
    )


def triangulate_mask(mask: MaskMatrix, rng=None) -> TriangulationResult:
    """Convenience: initialize + lower_triangulate."""
    return lower_triangulate(initialize(mask), rng)


def permuted_mask(tri: TriangulationResult, mask: MaskMatrix) -> np.ndarray:
    """Down-sized mask under the discovered row/column permutation."""
    rows = initialize(mask).row_ids[tri.trace.row_order]
    return mask.bits[np.ix_(rows, tri.trace.col_order)]


def block_triangulate(tri: TriangulationResult, mask: MaskMatrix) -> BlockDecomposition:
    """Absorb excluded columns and leftover rows into diagonal blocks.

    An excluded column joins the block of its topmost nonzero paired row;
    a leftover row joins the block of its rightmost nonzero paired or
    absorbed column.  Columns supported only by leftover rows (and rows
    supported only by such columns) stay unabsorbed: they cannot sit next
    to any diagonal without breaking the zero-upper property.
    """
    bits = mask.bits
    paired_rows = [r for r, _ in tri.pairs]
    block_rows = [[r] for r in paired_rows]
    block_cols = [[c] for _, c in tri.pairs]

    # Excluded columns, scanned in exclusion order; topmost support decides.
    unabsorbed = []
    for col in tri.excluded:
        support = np.nonzero(bits[paired_rows, col])[0] if paired_rows else []
        if len(support):
            block_cols[int(support[0])].append(col)
        else:
            unabsorbed.append(col)

    # Leftover rows; rightmost nonzero block column decides.
    unattached = []
    for row in tri.c_rows:
        home = None
        for i in range(len(block_cols) - 1, -1, -1):
            if bits[row, block_cols[i]].any():
                home = i
                break
        if home is None:
            unattached.append(row)
        else:
            block_rows[home].append(row)

    blocks = tuple(
        Block(rows=tuple(rs), cols=tuple(cs)) for rs, cs in zip(block_rows, block_cols)
    )

    row_order = [r for rs in block_rows for r in rs] + unattached
    col_order = (
        [c for cs in block_cols for c in cs]
        + unabsorbed
        + list(tri.residual_cols)
    )

    _check_zero_upper(bits, blocks)

    return BlockDecomposition(
        blocks=blocks,
        unabsorbed_cols=tuple(unabsorbed),
        unattached_rows=tuple(unattached),
        residual_cols=tri.residual_cols,
        row_order=np.array(row_order, int),
        col_order=np.array(col_order, int),
        mask_bits=bits.copy(),
    )


def _check_zero_upper(bits: np.ndarray, blocks) -> None:
    """Defect guard: no mask entry may sit strictly above the block diagonal."""
    for i, upper in enumerate(blocks):
        for lower in blocks[i + 1 :]:
            sub = bits[np.ix_(upper.rows, lower.cols)]
            if sub.any():
                raise RuntimeError(
                    "internal invariant violation: nonzero entry above the "
                    f"block diagonal between blocks {i} and {blocks.index(lower)}"
                )


def extract_blocks(decomp: BlockDecomposition, channel: SparseVirtualChannel):
    """Cut the complex channel into the diagonal block matrices."""
    if not np.array_equal(channel.mask.bits, decomp.mask_bits):
        raise ValueError("channel mask does not match the decomposed mask")
    return [
        channel.values[np.ix_(b.rows, b.cols)] for b in decomp.blocks
    ]
