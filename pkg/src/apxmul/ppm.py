"""Baugh-Wooley partial-product matrix: generation, regions, transforms.

The matrix is symbolic: each entry records which operand bits feed it and
whether the gate is an AND, a NAND, or a hardwired 1. Evaluation
instantiates the symbols for concrete operands and sums columns with
their weights, wrapping at 2N bits like the hardware.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cells import Polarity

__all__ = [
    "SignedWord",
    "PPBit",
    "PPMatrix",
    "RegionMap",
    "generate_bw",
    "evaluate",
    "partition",
    "apply_truncation",
    "apply_compensation",
    "compensation_estimate",
    "render",
]

MIN_WIDTH = 4
MAX_WIDTH = 16


def _check_width(n: int) -> None:
    if not MIN_WIDTH <= n <= MAX_WIDTH:
        raise ValueError("width must be in %d..%d, got %r" % (MIN_WIDTH, MAX_WIDTH, n))


@dataclass(frozen=True)
class SignedWord:
    """A two's complement value with an explicit bit width."""

    value: int
    width: int

    def __post_init__(self):
        _check_width(self.width)
        lo, hi = -(1 << (self.width - 1)), (1 << (self.width - 1)) - 1
        if not lo <= self.value <= hi:
            raise ValueError("%d out of range [%d, %d] for width %d"
                             % (self.value, lo, hi, self.width))

    def bits(self) -> tuple[int, ...]:
        """Two's complement bits, least significant first."""
        return tuple((self.value >> k) & 1 for k in range(self.width))


@dataclass(frozen=True)
class PPBit:
    """One symbolic partial-product bit at a column weight 2**column."""

    polarity: Polarity
    column: int
    i: "int | None" = None
    j: "int | None" = None

    def __post_init__(self):
        if self.polarity is Polarity.CONSTANT_ONE:
            if self.i is not None or self.j is not None:
                raise ValueError("constant bits have no operand source")
        elif self.i is None or self.j is None:
            raise ValueError("gate bits need both operand indices")

    def instantiate(self, abits, bbits):
        """Bit value for concrete operand bit vectors (ints or arrays)."""
        if self.polarity is Polarity.CONSTANT_ONE:
            return 1
        prod = abits[self.i] & bbits[self.j]
        if self.polarity is Polarity.NEGATIVE_NAND:
            return prod ^ 1
        return prod


def _sort_key(bit: PPBit):
    rank = {Polarity.NEGATIVE_NAND: 0, Polarity.POSITIVE_AND: 1,
            Polarity.CONSTANT_ONE: 2}[bit.polarity]
    return (rank, -1 if bit.i is None else bit.i, -1 if bit.j is None else bit.j)


@dataclass(frozen=True)
class PPMatrix:
    """2N weighted columns of PPBits; immutable after construction."""

    width: int
    columns: tuple[tuple[PPBit, ...], ...]

    def __post_init__(self):
        if len(self.columns) != 2 * self.width:
            raise ValueError("matrix must have exactly 2N columns")
        for c, col in enumerate(self.columns):
            for bit in col:
                if bit.column != c:
                    raise ValueError("bit filed under the wrong column")

    def occupancy(self) -> tuple[int, ...]:
        return tuple(len(col) for col in self.columns)

    def replace_column(self, c: int, bits) -> "PPMatrix":
        cols = list(self.columns)
        cols[c] = tuple(sorted(bits, key=_sort_key))
        return PPMatrix(self.width, tuple(cols))


@dataclass(frozen=True)
class RegionMap:
    """Disjoint split of column indices into low, center, and high bands."""

    lsp: frozenset
    csp: frozenset
    msp: frozenset


def generate_bw(n: int) -> PPMatrix:
    """Symbolic Baugh-Wooley matrix in its all-addition final form.

    Positive AND terms cover i, j <= n-2 plus the (n-1, n-1) corner; the
    mixed-sign groups become NAND terms; hardwired 1s land at columns n
    and 2n-1.
    """
    _check_width(n)
    cols = [[] for _ in range(2 * n)]
    for i in range(n - 1):
        for j in range(n - 1):
            cols[i + j].append(PPBit(Polarity.POSITIVE_AND, i + j, i, j))
    cols[2 * n - 2].append(PPBit(Polarity.POSITIVE_AND, 2 * n - 2, n - 1, n - 1))
    for i in range(n - 1):
        cols[i + n - 1].append(PPBit(Polarity.NEGATIVE_NAND, i + n - 1, i, n - 1))
    for j in range(n - 1):
        cols[j + n - 1].append(PPBit(Polarity.NEGATIVE_NAND, j + n - 1, n - 1, j))
    cols[n].append(PPBit(Polarity.CONSTANT_ONE, n))
    cols[2 * n - 1].append(PPBit(Polarity.CONSTANT_ONE, 2 * n - 1))
    return PPMatrix(n, tuple(tuple(sorted(col, key=_sort_key)) for col in cols))


def _as_word(x, width: int) -> SignedWord:
    if isinstance(x, SignedWord):
        if x.width != width:
            raise ValueError("operand width %d does not match matrix width %d"
                             % (x.width, width))
        return x
    return SignedWord(int(x), width)


def to_signed(raw: int, bits: int) -> int:
    """Reinterpret a nonnegative raw value as a two's complement integer."""
    raw &= (1 << bits) - 1
    if raw >= 1 << (bits - 1):
        raw -= 1 << bits
    return raw


def evaluate(m: PPMatrix, a, b) -> int:
    """Instantiate and sum the matrix for one operand pair.

    Carries past column 2N-1 are discarded, matching two's complement
    hardware wraparound; for the untransformed matrix the result equals
    the true signed product.
    """
    aw, bw = _as_word(a, m.width), _as_word(b, m.width)
    abits, bbits = aw.bits(), bw.bits()
    total = 0
    for c, col in enumerate(m.columns):
        for bit in col:
            total += bit.instantiate(abits, bbits) << c
    return to_signed(total, 2 * m.width)


def partition(n: int) -> RegionMap:
    """Column regions: n-1 truncatable low columns, two center, rest high."""
    _check_width(n)
    return RegionMap(
        lsp=frozenset(range(n - 1)),
        csp=frozenset((n - 1, n)),
        msp=frozenset(range(n + 1, 2 * n)),
    )


def apply_truncation(m: PPMatrix, regions: "RegionMap | None" = None) -> PPMatrix:
    """Delete every bit in the low-significance columns."""
    regions = regions or partition(m.width)
    cols = tuple(() if c in regions.lsp else col for c, col in enumerate(m.columns))
    return PPMatrix(m.width, cols)


def compensation_estimate(n: int) -> Fraction:
    """Expected value removed by truncating the n-1 low columns.

    Column q < n-1 holds q+1 AND bits, each 1 with probability 1/4, so the
    expectation is sum((q+1) * 2**q) / 4. At width 8 this is 769/4 = 192.25;
    the realizable constant pair 2**(n-1) + 2**(n-2) = 192 sits 0.25 below it.
    """
    if n < 2:
        raise ValueError("need at least one truncatable column")
    return Fraction(sum((q + 1) << q for q in range(n - 1)), 4)


def apply_compensation(m: PPMatrix) -> PPMatrix:
    """Offset the truncation bias with constants and one NAND substitution.

    Adds hardwired 1s at columns n-1 and n-2 (combined value 3 * 2**(n-2),
    the closest realizable pair to the truncation expectation) and swaps
    the first NAND bit of column n for a hardwired 1.
    """
    n = m.width
    regions = partition(n)
    for c in regions.lsp:
        if m.columns[c]:
            raise ValueError("compensation requires a truncated matrix")
    target = list(m.columns[n])
    nand_at = next((k for k, bit in enumerate(target)
                    if bit.polarity is Polarity.NEGATIVE_NAND), None)
    if nand_at is None:
        raise ValueError("no NAND bit in column %d to substitute" % n)
    target[nand_at] = PPBit(Polarity.CONSTANT_ONE, n)
    out = m.replace_column(n, target)
    out = out.replace_column(n - 1, list(out.columns[n - 1]) + [PPBit(Polarity.CONSTANT_ONE, n - 1)])
    out = out.replace_column(n - 2, list(out.columns[n - 2]) + [PPBit(Polarity.CONSTANT_ONE, n - 2)])
    return out


def _token(bit: PPBit) -> str:
    if bit.polarity is Polarity.CONSTANT_ONE:
        return "1"
    body = "a%db%d" % (bit.i, bit.j)
    return "~" + body if bit.polarity is Polarity.NEGATIVE_NAND else body


def render(m: PPMatrix) -> str:
    """Text grid of the matrix, one display row per operand-a row.

    Gate bits sit on row i; the column-2n-1 constant joins row n-1 and the
    column-n constant row 0, matching the usual worked-example layout.
    Anything else lands on the first free row, growing the grid if needed.
    """
    n = m.width
    grid: dict[tuple[int, int], str] = {}
    height = n
    for c, col in enumerate(m.columns):
        for bit in col:
            if bit.polarity is not Polarity.CONSTANT_ONE:
                grid[(bit.i, c)] = _token(bit)
    for c, col in enumerate(m.columns):
        for bit in col:
            if bit.polarity is not Polarity.CONSTANT_ONE:
                continue
            prefer = n - 1 if c == 2 * n - 1 else 0
            row = prefer
            if (row, c) in grid:
                row = next(r for r in range(2 * n) if (r, c) not in grid)
            grid[(row, c)] = "1"
            height = max(height, row + 1)
    widths = [max([1] + [len(grid[(r, c)]) for r in range(height) if (r, c) in grid])
              for c in range(2 * n)]
    lines = []
    for r in range(height - 1, -1, -1):
        cells = [grid.get((r, c), "-").rjust(widths[c]) for c in range(2 * n - 1, -1, -1)]
        lines.append(" ".join(cells).rstrip())
    return "\n".join(lines)
