"""Whole-multiplier assembly: configs, presets, and the reduction engine.

A configured multiplier is built from the Baugh-Wooley matrix, optionally
truncated and compensated, with up to three sign-focused compressors wired
into the two center columns and standard exact cells everywhere else. The
engine is vectorized: operands travel as bit arrays over a batch axis, so
the same code path serves scalar calls and exhaustive sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import REGISTRY, CellTable, Polarity, get_cell
from . import ppm
from .ppm import PPMatrix, SignedWord

__all__ = [
    "MultiplierConfig",
    "ReductionTrace",
    "PRESET_NAMES",
    "preset",
    "multiply_exact",
    "multiply_approx",
    "multiply_batch",
    "reduce_and_trace",
    "static_error_bound",
    "config_to_text",
    "config_from_text",
]

_EXACT_CSP = "abcd1-exact"


def _csp_columns(n: int) -> tuple[int, int, int]:
    # cell slots in wiring order: one at column n, two at column n-1
    return (n, n - 1, n - 1)

_APPROX_PRESETS = {
    "proposed": "abcd1-approx",
    "ac1": "ac1",
    "ac2": "ac2",
    "ac3": "ac3",
    "ac4": "ac4",
    "ac5": "ac5",
}
PRESET_NAMES = ("exact",) + tuple(_APPROX_PRESETS)


@dataclass(frozen=True)
class MultiplierConfig:
    """Everything needed to build one multiplier deterministically."""

    width: int = 8
    variant: str = "exact"
    truncation: bool = False
    compensation: bool = False
    csp_cells: tuple[str, ...] = ()
    msp_strategy: str = "greedy-42"

    def __post_init__(self):
        if not ppm.MIN_WIDTH <= self.width <= ppm.MAX_WIDTH:
            raise ValueError("width must be in %d..%d" % (ppm.MIN_WIDTH, ppm.MAX_WIDTH))
        object.__setattr__(self, "csp_cells", tuple(self.csp_cells))
        if len(self.csp_cells) not in (0, 3):
            raise ValueError("csp_cells takes zero or exactly three cells")
        for name in self.csp_cells:
            cell = get_cell(name)
            if not cell.has_const_one:
                raise ValueError("%s has no constant slot; csp cells must be "
                                 "sign-focused compressors" % name)
        if self.compensation and not self.truncation:
            raise ValueError("compensation offsets truncation; enable truncation first")
        if self.variant == "exact" and (self.truncation or self.compensation or self.csp_cells):
            raise ValueError("the exact variant takes no transforms or csp cells")
        if self.msp_strategy != "greedy-42":
            raise ValueError("unknown msp strategy %r" % self.msp_strategy)


@dataclass(frozen=True)
class ReductionTrace:
    """Column occupancy entering each stage; the last stage is the final
    two-row addition, so stage_count includes it."""

    occupancies: tuple[tuple[int, ...], ...]
    stage_count: int


def preset(name: str, width: int = 8) -> MultiplierConfig:
    """Named configurations: exact, proposed, and competitor variants ac1..ac5."""
    key = name.strip().lower()
    if key == "exact":
        return MultiplierConfig(width=width, variant="exact")
    if key == "proposed":
        # one approximate cell at the lighter center column, exact neighbors
        return MultiplierConfig(
            width=width,
            variant=key,
            truncation=True,
            compensation=True,
            csp_cells=(_EXACT_CSP, _APPROX_PRESETS[key], _EXACT_CSP),
        )
    if key in _APPROX_PRESETS:
        # competitor integrations swap the whole center-column cell family
        cell = _APPROX_PRESETS[key]
        return MultiplierConfig(
            width=width,
            variant=key,
            truncation=True,
            compensation=True,
            csp_cells=(cell, cell, cell),
        )
    raise KeyError("unknown preset %r (choose from %s)" % (name, ", ".join(PRESET_NAMES)))


def build_matrix(cfg: MultiplierConfig) -> PPMatrix:
    m = ppm.generate_bw(cfg.width)
    if cfg.truncation:
        m = ppm.apply_truncation(m)
    if cfg.compensation:
        m = ppm.apply_compensation(m)
    return m


def static_error_bound(cfg: MultiplierConfig) -> int:
    """Worst-case |approx - exact| over the full operand space.

    Sums the maximum truncated value, the compensation constant, and each
    approximate cell's worst row error scaled by its column weight. Loose
    but guaranteed; the exhaustive sweeps stay under it.
    """
    n = cfg.width
    bound = 0
    if cfg.truncation:
        bound += sum((q + 1) << q for q in range(n - 1))
    if cfg.compensation:
        bound += (1 << (n - 1)) + (1 << (n - 2))
    for name, col in zip(cfg.csp_cells, _csp_columns(n)):
        bound += REGISTRY[name].max_error_distance << col
    return bound


# -- reduction engine --------------------------------------------------------

def _plan_greedy(counts: list, ncols: int, skip: frozenset) -> list:
    """Cell sizes per column for one ripe-as-possible stage.

    Five-input compressors soak columns down to at most four bits, one
    four-input compressor or full adder closes when it can, and one or two
    leftovers pass through rather than spending a half adder on them.
    """
    ghost = list(counts)
    plan = [[] for _ in range(ncols)]
    for c in range(ncols):
        if c in skip:
            continue
        while ghost[c] >= 5:
            plan[c].append(5)
            ghost[c] -= 5
            if c + 1 < ncols:
                ghost[c + 1] += 1
        if ghost[c] == 4:
            plan[c].append(4)
            ghost[c] = 0
            if c + 1 < ncols:
                ghost[c + 1] += 1
        elif ghost[c] == 3:
            plan[c].append(3)
            ghost[c] = 0
    return plan


def _plan_closing(counts: list, ncols: int) -> "list | None":
    """Plan a stage whose output provably fits two rows, or None.

    Next-stage occupancy of a column is its cell count plus its leftovers
    plus the previous column's carries, so each column gets a budget of
    2 minus the cells placed one column below.
    """
    ghost = list(counts)
    plan = [[] for _ in range(ncols)]
    cells_below = 0
    for c in range(ncols):
        budget = 2 - cells_below
        placed = 0
        while placed + ghost[c] > budget:
            r = ghost[c]
            if r >= 5:
                take = 5
            elif r >= 2:
                take = r
            else:
                return None
            plan[c].append(take)
            ghost[c] -= take
            placed += 1
            if take >= 4 and c + 1 < ncols:
                ghost[c + 1] += 1
        cells_below = placed
    return plan


_STAGE_CELL = {5: "exact-42", 4: "exact-42", 3: "full-adder", 2: "half-adder"}


class _Engine:
    """One configured multiplier, evaluated over a batch of operand pairs."""

    def __init__(self, cfg: MultiplierConfig, abits: list, bbits: list, batch: int):
        self.cfg = cfg
        self.n = cfg.width
        self.ncols = 2 * cfg.width
        self.abits = abits
        self.bbits = bbits
        self.zero = np.zeros(batch, dtype=np.uint8)
        self.batch = batch

    def _value(self, bit) -> np.ndarray:
        if bit.polarity is Polarity.CONSTANT_ONE:
            return self.zero + np.uint8(1)
        prod = self.abits[bit.i] & self.bbits[bit.j]
        if bit.polarity is Polarity.NEGATIVE_NAND:
            return prod ^ np.uint8(1)
        return prod

    def _eval(self, cell: CellTable, ins: list) -> tuple:
        while len(ins) < cell.arity:
            ins.append(self.zero)
        idx = ins[0] * np.uint8(2) + ins[1]
        for x in ins[2:]:
            idx = idx * np.uint8(2) + x
        return tuple(np.take(lut, idx) for lut in cell.output_luts())

    def _route(self, cell: CellTable, outs: tuple, c: int, stage: list, nxt: list):
        # weight-1 sum stays put, weight-2 outputs move up a column; the
        # 4:2 cout ripples within the stage, the carry waits for the next
        if len(outs) == 3:
            cout, carry, s = outs
            if c + 1 < self.ncols:
                stage[c + 1].append(cout)
        else:
            carry, s = outs
        nxt[c].append(s)
        if c + 1 < self.ncols:
            nxt[c + 1].append(carry)

    def _run_plan(self, plan: list, stage: list, nxt: list) -> list:
        for c in range(self.ncols):
            pool = stage[c]
            for take in plan[c]:
                ins = pool[:take]
                del pool[:take]
                cell = REGISTRY[_STAGE_CELL[take]]
                self._route(cell, self._eval(cell, ins), c, stage, nxt)
            nxt[c].extend(pool)
        return nxt

    def _csp_stage(self, stage: list, pool_value: int) -> tuple:
        """Wire the configured sign-focus cells, then greedy-reduce the rest.

        Each cell's built-in +1 consumes 2**column worth of hardwired-1
        value from the center columns; whatever the constants are worth
        beyond that is returned as a plain addend for the final addition.
        """
        n, ncols = self.n, self.ncols
        nxt = [[] for _ in range(ncols)]
        feeds: dict[int, tuple[list, list]] = {}
        for c in (n, n - 1):
            gates = [b for b in _cached_matrix(self.cfg).columns[c]
                     if b.polarity is not Polarity.CONSTANT_ONE]
            feeds[c] = ([b for b in gates if b.polarity is Polarity.NEGATIVE_NAND],
                        [b for b in gates if b.polarity is Polarity.POSITIVE_AND])
        k_addend = pool_value
        for name, c in zip(self.cfg.csp_cells, _csp_columns(n)):
            # one sign NAND per cell, then product bits in index order
            cell = REGISTRY[name]
            nands, ands = feeds[c]
            picked = [nands.pop(0)] if nands else []
            while len(picked) < cell.arity and ands:
                picked.append(ands.pop(0))
            ins = [self._value(b) for b in picked]
            self._route(cell, self._eval(cell, ins), c, stage, nxt)
            k_addend -= 1 << c
        for c, (nands, ands) in feeds.items():
            stage[c].extend(self._value(b) for b in nands + ands)
        plan = _plan_greedy([len(p) for p in stage], ncols, frozenset((n - 1, n)))
        return self._run_plan(plan, stage, nxt), k_addend

    def run(self) -> tuple:
        cfg, n, ncols = self.cfg, self.n, self.ncols
        m = _cached_matrix(cfg)
        occupancies = [m.occupancy()]
        stage = [[] for _ in range(ncols)]
        pool_value = 0
        csp_cols = {n - 1, n}
        for c, col in enumerate(m.columns):
            for bit in col:
                if cfg.csp_cells and bit.polarity is Polarity.CONSTANT_ONE and c in csp_cols:
                    pool_value += 1 << c
                elif cfg.csp_cells and c in csp_cols:
                    pass  # gate bits of the center columns are fed to cells
                else:
                    stage[c].append(self._value(bit))
        k_addend = 0
        if cfg.csp_cells:
            stage, k_addend = self._csp_stage(stage, pool_value)
            occupancies.append(tuple(len(p) for p in stage))
        while max(len(p) for p in stage) > 2:
            counts = [len(p) for p in stage]
            plan = _plan_closing(counts, ncols)
            if plan is None:
                plan = _plan_greedy(counts, ncols, frozenset())
            stage = self._run_plan(plan, stage, [[] for _ in range(ncols)])
            occupancies.append(tuple(len(p) for p in stage))
        total = np.zeros(self.batch, dtype=np.int64)
        for c, pool in enumerate(stage):
            for arr in pool:
                total += arr.astype(np.int64) << c
        total += k_addend
        mask = (1 << (2 * n)) - 1
        raw = total & mask
        half = 1 << (2 * n - 1)
        signed = np.where(raw >= half, raw - (mask + 1), raw)
        trace = ReductionTrace(tuple(tuple(o) for o in occupancies), len(occupancies))
        return signed, trace


_MATRIX_CACHE: dict[MultiplierConfig, PPMatrix] = {}


def _cached_matrix(cfg: MultiplierConfig) -> PPMatrix:
    m = _MATRIX_CACHE.get(cfg)
    if m is None:
        m = _MATRIX_CACHE[cfg] = build_matrix(cfg)
    return m


def _batch_run(cfg: MultiplierConfig, a: np.ndarray, b: np.ndarray) -> tuple:
    n = cfg.width
    lo, hi = -(1 << (n - 1)), (1 << (n - 1)) - 1
    if a.size and (a.min() < lo or a.max() > hi or b.min() < lo or b.max() > hi):
        raise ValueError("operands out of range for width %d" % n)
    abits = [((a >> k) & 1).astype(np.uint8) for k in range(n)]
    bbits = [((b >> k) & 1).astype(np.uint8) for k in range(n)]
    return _Engine(cfg, abits, bbits, a.shape[0]).run()


def multiply_batch(cfg: MultiplierConfig, a_vals, b_vals) -> np.ndarray:
    """Vectored multiply: equal-length arrays of signed operands in, int64 out."""
    a = np.ascontiguousarray(np.asarray(a_vals, dtype=np.int64))
    b = np.ascontiguousarray(np.asarray(b_vals, dtype=np.int64))
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("operand arrays must be equal-length vectors")
    return _batch_run(cfg, a, b)[0]


def _resolve_width(a, b, width: "int | None") -> int:
    widths = {x.width for x in (a, b) if isinstance(x, SignedWord)}
    if len(widths) > 1:
        raise ValueError("operand widths differ")
    if widths:
        w = widths.pop()
        if width is not None and width != w:
            raise ValueError("operand width %d does not match requested %d" % (w, width))
        return w
    return 8 if width is None else width


def _as_int(x) -> int:
    return x.value if isinstance(x, SignedWord) else int(x)


def multiply_exact(a, b, width: "int | None" = None) -> int:
    """Exact signed product, computed through the full matrix and exact cells."""
    w = _resolve_width(a, b, width)
    value, _ = reduce_and_trace(preset("exact", w), _as_int(a), _as_int(b))
    return value


def multiply_approx(cfg: MultiplierConfig, a, b) -> int:
    """Approximate signed product for one operand pair under cfg."""
    w = _resolve_width(a, b, cfg.width)
    if w != cfg.width:
        raise ValueError("operand width %d does not match config width %d" % (w, cfg.width))
    value, _ = reduce_and_trace(cfg, _as_int(a), _as_int(b))
    return value


def reduce_and_trace(cfg: MultiplierConfig, a, b) -> tuple:
    """Product plus the per-stage column occupancy trace for one pair."""
    arr_a = np.array([_as_int(a)], dtype=np.int64)
    arr_b = np.array([_as_int(b)], dtype=np.int64)
    value, trace = _batch_run(cfg, arr_a, arr_b)
    return int(value[0]), trace


# -- config serialization ----------------------------------------------------

_FLAGS = {"on": True, "off": False}


def config_to_text(cfg: MultiplierConfig) -> str:
    """Render a config as a small key = value document."""
    cells = ",".join(cfg.csp_cells) if cfg.csp_cells else "none"
    return (
        "width = %d\n"
        "variant = %s\n"
        "truncation = %s\n"
        "compensation = %s\n"
        "csp_cells = %s\n"
    ) % (cfg.width, cfg.variant,
         "on" if cfg.truncation else "off",
         "on" if cfg.compensation else "off",
         cells)


def config_from_text(text: str) -> MultiplierConfig:
    """Parse the document written by config_to_text (order-insensitive)."""
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError("expected 'key = value', got %r" % line)
        fields[key.strip()] = value.strip()
    allowed = {"width", "variant", "truncation", "compensation", "csp_cells", "msp_strategy"}
    unknown = set(fields) - allowed
    if unknown:
        raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    required = {"width", "variant", "truncation", "compensation", "csp_cells"}
    missing = required - set(fields)
    if missing:
        raise ValueError("missing config keys: %s" % ", ".join(sorted(missing)))

    def flag(key: str) -> bool:
        value = fields[key].lower()
        if value not in _FLAGS:
            raise ValueError("%s must be on or off, got %r" % (key, fields[key]))
        return _FLAGS[value]

    raw_cells = fields["csp_cells"]
    cells = () if raw_cells.lower() in ("none", "") else tuple(
        s.strip() for s in raw_cells.split(","))
    return MultiplierConfig(
        width=int(fields["width"]),
        variant=fields["variant"],
        truncation=flag("truncation"),
        compensation=flag("compensation"),
        csp_cells=cells,
        msp_strategy=fields.get("msp_strategy", "greedy-42"),
    )
