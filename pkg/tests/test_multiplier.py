"""Multiplier assembly: configs, presets, reduction engine, error structure."""

import numpy as np
import pytest

from apxmul.cells import fold_bits, get_cell
from apxmul.multiplier import (
    MultiplierConfig,
    PRESET_NAMES,
    build_matrix,
    config_from_text,
    config_to_text,
    multiply_approx,
    multiply_batch,
    multiply_exact,
    preset,
    reduce_and_trace,
    static_error_bound,
)
from apxmul.ppm import SignedWord


def full_sweep(n):
    vals = np.arange(-(1 << (n - 1)), 1 << (n - 1), dtype=np.int64)
    return np.repeat(vals, vals.size), np.tile(vals, vals.size)


def test_config_validation():
    with pytest.raises(ValueError):
        MultiplierConfig(width=3)
    with pytest.raises(ValueError):
        MultiplierConfig(width=17)
    with pytest.raises(ValueError):
        MultiplierConfig(variant="proposed", csp_cells=("abcd1-approx",))
    with pytest.raises(ValueError):
        MultiplierConfig(variant="proposed", csp_cells=("full-adder",) * 3)
    with pytest.raises(ValueError):
        MultiplierConfig(variant="proposed", compensation=True)
    with pytest.raises(ValueError):
        MultiplierConfig(variant="exact", truncation=True)
    with pytest.raises(ValueError):
        MultiplierConfig(variant="exact", csp_cells=("abcd1-exact",) * 3)
    with pytest.raises(ValueError):
        MultiplierConfig(msp_strategy="dadda")


def test_preset_registry():
    assert PRESET_NAMES == ("exact", "proposed", "ac1", "ac2", "ac3", "ac4", "ac5")
    p = preset("proposed")
    assert p.width == 8 and p.truncation and p.compensation
    assert p.csp_cells == ("abcd1-exact", "abcd1-approx", "abcd1-exact")
    for k in ("ac1", "ac2", "ac3", "ac4", "ac5"):
        c = preset(k, 6)
        assert c.width == 6
        assert c.csp_cells == (k, k, k)
    assert preset("exact").csp_cells == ()
    with pytest.raises(KeyError):
        preset("nosuch")


def test_multiply_exact_equals_product_width4_scalar():
    for a in range(-8, 8):
        for b in range(-8, 8):
            assert multiply_exact(a, b, width=4) == a * b


def test_multiply_exact_width_resolution():
    assert multiply_exact(SignedWord(-8, 4), SignedWord(7, 4)) == -56
    assert multiply_exact(-100, 100) == -10000
    with pytest.raises(ValueError):
        multiply_exact(SignedWord(1, 4), SignedWord(1, 6))
    with pytest.raises(ValueError):
        multiply_exact(300, 1)


def test_multiply_goldens():
    assert multiply_exact(-128, -128) == 16384
    assert multiply_exact(53, -41) == -2173
    assert multiply_exact(0, 77) == 0
    assert multiply_approx(preset("proposed"), 0, 0) == 192
    assert multiply_approx(preset("proposed", 4), 0, 0) == 12


def test_reduce_and_trace_proposed_width8():
    cfg = preset("proposed")
    value, trace = reduce_and_trace(cfg, 0, 0)
    assert value == 192
    assert trace.stage_count == 3
    assert len(trace.occupancies) == trace.stage_count
    assert trace.occupancies[0] == build_matrix(cfg).occupancy()
    assert trace.occupancies == (
        (0, 0, 0, 0, 0, 0, 1, 9, 8, 6, 5, 4, 3, 2, 1, 1),
        (0, 0, 0, 0, 0, 0, 1, 2, 6, 4, 3, 2, 2, 2, 2, 1),
        (0, 0, 0, 0, 0, 0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2),
    )


def test_trace_final_stage_fits_two_rows():
    for name in PRESET_NAMES:
        _, trace = reduce_and_trace(preset(name), -77, 33)
        assert max(trace.occupancies[-1]) <= 2, name


def test_stage_counts_per_preset():
    counts = {}
    for name in PRESET_NAMES:
        _, trace = reduce_and_trace(preset(name), 93, -117)
        counts[name] = trace.stage_count
    assert counts == {"exact": 3, "proposed": 3,
                      "ac1": 4, "ac2": 4, "ac3": 4, "ac4": 4, "ac5": 4}


def test_trace_independent_of_operands():
    cfg = preset("ac2")
    _, t1 = reduce_and_trace(cfg, 0, 0)
    _, t2 = reduce_and_trace(cfg, -128, 127)
    assert t1 == t2


def test_exact_preset_full_sweep_width8_batch():
    a, b = full_sweep(8)
    got = multiply_batch(preset("exact"), a, b)
    assert np.array_equal(got, a * b)


def decomposed_error(n, a, b):
    """Independent model of the proposed design's error, from first principles.

    truncation drops the low product bits, compensation adds the two fixed
    constants, the substituted sign gate turns into +2^n when a1*b(n-1)
    fires, and the single approximate cell contributes its table error at
    weight 2^(n-1).
    """
    abits = [(a >> i) & 1 for i in range(n)]
    bbits = [(b >> i) & 1 for i in range(n)]
    truncated = np.zeros_like(a)
    for i in range(n - 1):
        for j in range(n - 1):
            if i + j < n - 1:
                truncated += (abits[i] & bbits[j]) << (i + j)
    comp = (1 << (n - 1)) + (1 << (n - 2))
    sub = (abits[1] & bbits[n - 1]) << n
    cell = get_cell("abcd1-approx")
    nand = 1 - (abits[0] & bbits[n - 1])
    # the cell takes the first sign gate plus up to three product bits of
    # the same column, zero-padded when the column runs short (n = 4)
    lanes = [nand] + [abits[i] & bbits[n - 1 - i] for i in range(1, n - 1)][:3]
    while len(lanes) < 4:
        lanes.append(np.zeros_like(nand))
    idx = fold_bits(lanes)
    cell_err = np.array([cell.value_error(int(k)) for k in idx], dtype=np.int64)
    return (comp - truncated) + sub - (cell_err << (n - 1))


def test_proposed_error_decomposition_width8():
    a, b = full_sweep(8)
    err = multiply_batch(preset("proposed"), a, b) - a * b
    assert np.array_equal(err, decomposed_error(8, a, b))


def test_proposed_error_decomposition_width4():
    a, b = full_sweep(4)
    err = multiply_batch(preset("proposed", 4), a, b) - a * b
    assert np.array_equal(err, decomposed_error(4, a, b))


def test_msp_purity_exact_cells_reproduce_product():
    cfg = MultiplierConfig(width=8, variant="proposed", truncation=False,
                           compensation=False, csp_cells=("abcd1-exact",) * 3)
    a, b = full_sweep(8)
    assert np.array_equal(multiply_batch(cfg, a, b), a * b)


def test_static_error_bound_values():
    assert static_error_bound(preset("exact")) == 0
    assert static_error_bound(preset("proposed")) == 769 + 192 + (2 << 7)
    assert static_error_bound(preset("ac3")) == 769 + 192 + (1 << 8) + (1 << 7) + (1 << 7)
    only_transforms = MultiplierConfig(width=4, variant="proposed",
                                       truncation=True, compensation=True)
    assert static_error_bound(only_transforms) == 17 + 12


def test_bound_holds_exhaustively_width8():
    a, b = full_sweep(8)
    for name in ("proposed", "ac1", "ac4"):
        cfg = preset(name)
        err = np.abs(multiply_batch(cfg, a, b) - a * b)
        assert int(err.max()) <= static_error_bound(cfg), name


def test_operand_asymmetry_documented():
    # the sign gates treat the two operands differently, so individual
    # products may differ under operand swap even though exhaustive
    # sweeps cover both orders
    cfg = preset("proposed")
    diffs = 0
    for a, b in ((3, -7), (100, -1), (55, 12), (-128, 5), (17, 93)):
        if multiply_approx(cfg, a, b) != multiply_approx(cfg, b, a):
            diffs += 1
    assert diffs > 0


def test_multiply_batch_validation():
    cfg = preset("exact")
    with pytest.raises(ValueError):
        multiply_batch(cfg, np.array([1, 2]), np.array([1]))
    with pytest.raises(ValueError):
        multiply_batch(cfg, np.array([200]), np.array([1]))
    with pytest.raises(ValueError):
        multiply_batch(cfg, np.array([[1]]), np.array([[1]]))


def test_config_text_roundtrip():
    for name in PRESET_NAMES:
        cfg = preset(name, 6)
        assert config_from_text(config_to_text(cfg)) == cfg


def test_config_from_text_parsing():
    text = """
    # comment line
    variant = proposed
    width = 8
    compensation = on
    truncation = on
    csp_cells = abcd1-exact, abcd1-approx, abcd1-exact
    """
    assert config_from_text(text) == preset("proposed")
    with pytest.raises(ValueError):
        config_from_text("width = 8\nvariant = exact\n"
                         "truncation = off\ncompensation = off\n"
                         "csp_cells = none\nbogus = 1")
    with pytest.raises(ValueError):
        config_from_text("width = 8")


def test_config_to_text_fields():
    text = config_to_text(preset("ac1"))
    assert "width = 8" in text
    assert "variant = ac1" in text
    assert "truncation = on" in text
    assert "compensation = on" in text
    assert "csp_cells = ac1,ac1,ac1" in text
