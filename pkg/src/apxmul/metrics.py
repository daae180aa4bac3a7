"""Error characterization: cell-level statistics and multiplier-level sweeps.

Cell statistics are exact rationals under the AND(1/4)/NAND(3/4)/const(1)
input model. Multiplier sweeps enumerate (or sample) operand pairs and
report ER, NMED, MRED, the signed mean error, and the worst error; the
pair space is split into a fixed number of chunks merged in order, so
results are byte-identical for any worker-thread count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .cells import CellTable, Polarity
from .multiplier import MultiplierConfig, multiply_batch

__all__ = [
    "InputDistribution",
    "CellStats",
    "cell_stats",
    "ErrorReport",
    "exhaustive_report",
    "sampled_report",
    "EXHAUSTIVE_WIDTH_LIMIT",
]

EXHAUSTIVE_WIDTH_LIMIT = 12
_CHUNKS = 64  # fixed split of the pair space, independent of thread count


@dataclass(frozen=True)
class InputDistribution:
    """Independent per-input probabilities of reading 1."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        for p in self.probs:
            if not 0 <= p <= 1:
                raise ValueError("probabilities must be in [0, 1]")

    @classmethod
    def for_cell(cls, cell: CellTable) -> "InputDistribution":
        if cell.input_polarities is None:
            raise ValueError("%s has no input signal model" % cell.name)
        return cls(tuple(p.probability_one() for p in cell.input_polarities))

    def joint(self, bits: tuple[int, ...]) -> Fraction:
        """Probability of one exact input combination."""
        if len(bits) != len(self.probs):
            raise ValueError("bit tuple arity does not match distribution")
        out = Fraction(1)
        for b, p in zip(bits, self.probs):
            out *= p if b else 1 - p
        return out


@dataclass(frozen=True)
class CellStats:
    """Probability of any error and signed mean error (exact - approx)."""

    p_e: Fraction
    e_mean: Fraction


def cell_stats(cell: CellTable, dist: "InputDistribution | None" = None) -> CellStats:
    """Exact error statistics of one cell under an input distribution."""
    if dist is None:
        dist = InputDistribution.for_cell(cell)
    if len(dist.probs) != cell.arity:
        raise ValueError("distribution arity %d does not match cell arity %d"
                         % (len(dist.probs), cell.arity))
    p_e = Fraction(0)
    e_mean = Fraction(0)
    for idx in range(2 ** cell.arity):
        p = dist.joint(cell.input_bits(idx))
        err = cell.value_error(idx)
        if err:
            p_e += p
        e_mean += p * err
    return CellStats(p_e=p_e, e_mean=e_mean)


@dataclass(frozen=True)
class ErrorReport:
    """Aggregate sweep metrics for one multiplier configuration."""

    er: float
    nmed: float
    mred: float
    mean_ed: float
    max_ed: int
    pairs: int
    zero_exact_skipped: int

    def to_dict(self) -> dict:
        return {
            "er": self.er,
            "nmed": self.nmed,
            "mred": self.mred,
            "mean_ed": self.mean_ed,
            "max_ed": self.max_ed,
            "pairs": self.pairs,
            "zero_exact_skipped": self.zero_exact_skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _chunk_stats(cfg: MultiplierConfig, a: np.ndarray, b: np.ndarray) -> tuple:
    approx = multiply_batch(cfg, a, b)
    exact = a * b
    err = approx - exact
    abs_err = np.abs(err)
    nonzero = exact != 0
    mred_sum = float(np.sum(abs_err[nonzero] / np.abs(exact[nonzero])))
    return (
        int(np.count_nonzero(err)),
        int(abs_err.sum()),
        int((exact - approx).sum()),
        int(abs_err.max()) if err.size else 0,
        mred_sum,
        int(err.size - np.count_nonzero(nonzero)),
        int(np.abs(exact).max()) if err.size else 0,
    )


def _merge(cfg: MultiplierConfig, chunks: list, pairs: int) -> ErrorReport:
    err_count = sum(c[0] for c in chunks)
    abs_sum = sum(c[1] for c in chunks)
    signed_sum = sum(c[2] for c in chunks)
    max_ed = max(c[3] for c in chunks)
    mred_sum = 0.0
    for c in chunks:  # fixed chunk order keeps float accumulation stable
        mred_sum += c[4]
    zero_skipped = sum(c[5] for c in chunks)
    peak = 1 << (2 * cfg.width - 2)
    denom = pairs - zero_skipped
    return ErrorReport(
        er=err_count / pairs,
        nmed=(abs_sum / pairs) / peak,
        mred=mred_sum / denom if denom else 0.0,
        mean_ed=signed_sum / pairs,
        max_ed=max_ed,
        pairs=pairs,
        zero_exact_skipped=zero_skipped,
    )


def _run_chunks(cfg: MultiplierConfig, a: np.ndarray, b: np.ndarray, threads: int) -> list:
    bounds = np.linspace(0, a.size, _CHUNKS + 1).astype(np.int64)
    jobs = [(a[bounds[k]:bounds[k + 1]], b[bounds[k]:bounds[k + 1]])
            for k in range(_CHUNKS) if bounds[k] < bounds[k + 1]]
    if threads <= 1:
        return [_chunk_stats(cfg, ja, jb) for ja, jb in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_chunk_stats, cfg, ja, jb) for ja, jb in jobs]
        return [f.result() for f in futures]


def _signed_range(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return np.where(codes >= 1 << (n - 1), codes - (1 << n), codes)


def exhaustive_report(cfg: MultiplierConfig, n: "int | None" = None, *,
                      threads: int = 1) -> ErrorReport:
    """Sweep every signed operand pair at width n (default: cfg.width).

    Width is capped at EXHAUSTIVE_WIDTH_LIMIT because the pair count grows
    as 4**n; sample with sampled_report beyond that.
    """
    cfg = _at_width(cfg, n)
    if cfg.width > EXHAUSTIVE_WIDTH_LIMIT:
        raise ValueError("width %d exceeds the exhaustive limit %d; "
                         "use sampled_report" % (cfg.width, EXHAUSTIVE_WIDTH_LIMIT))
    values = _signed_range(cfg.width)
    size = values.size
    a = np.repeat(values, size)
    b = np.tile(values, size)
    chunks = _run_chunks(cfg, a, b, threads)
    return _merge(cfg, chunks, size * size)


def sampled_report(cfg: MultiplierConfig, n: "int | None" = None,
                   sample_count: int = 65536, seed: int = 0, *,
                   threads: int = 1) -> ErrorReport:
    """Metrics over a seeded uniform sample of operand pairs.

    Pairs are drawn with replacement; a sample covering the whole space at
    an exhaustively checkable width delegates to exhaustive_report. NMED
    uses the analytic peak product 2**(2n-2) as its normalizer, the same
    value the exhaustive sweep attains.
    """
    cfg = _at_width(cfg, n)
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    space = 1 << (2 * cfg.width)
    if cfg.width <= EXHAUSTIVE_WIDTH_LIMIT and sample_count >= space:
        return exhaustive_report(cfg, threads=threads)
    rng = np.random.default_rng(seed)
    lo, hi = -(1 << (cfg.width - 1)), 1 << (cfg.width - 1)
    a = rng.integers(lo, hi, size=sample_count, dtype=np.int64)
    b = rng.integers(lo, hi, size=sample_count, dtype=np.int64)
    chunks = _run_chunks(cfg, a, b, threads)
    return _merge(cfg, chunks, sample_count)


def _at_width(cfg: MultiplierConfig, n: "int | None") -> MultiplierConfig:
    if n is None or n == cfg.width:
        return cfg
    return replace(cfg, width=n)
