"""Bit-accurate simulation of sign-focused approximate signed multipliers."""

from .cells import CellTable, Polarity, cell_names, get_cell
from .metrics import (
    ErrorReport,
    InputDistribution,
    cell_stats,
    exhaustive_report,
    sampled_report,
)
from .multiplier import (
    MultiplierConfig,
    PRESET_NAMES,
    ReductionTrace,
    config_from_text,
    config_to_text,
    multiply_approx,
    multiply_batch,
    multiply_exact,
    preset,
    reduce_and_trace,
    static_error_bound,
)
from .ppm import (
    PPMatrix,
    SignedWord,
    apply_compensation,
    apply_truncation,
    compensation_estimate,
    evaluate,
    generate_bw,
    partition,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "CellTable",
    "Polarity",
    "cell_names",
    "get_cell",
    "ErrorReport",
    "InputDistribution",
    "cell_stats",
    "exhaustive_report",
    "sampled_report",
    "MultiplierConfig",
    "PRESET_NAMES",
    "ReductionTrace",
    "config_from_text",
    "config_to_text",
    "multiply_approx",
    "multiply_batch",
    "multiply_exact",
    "preset",
    "reduce_and_trace",
    "static_error_bound",
    "PPMatrix",
    "SignedWord",
    "apply_compensation",
    "apply_truncation",
    "compensation_estimate",
    "evaluate",
    "generate_bw",
    "partition",
    "render",
    "__version__",
]
