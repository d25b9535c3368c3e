# tests/test_fusion.py

"""
Fusion Counting Tests

Covers:
- Built-in models and their validation
- Quantum dimensions and D^2 for Fibonacci, the toric code and D(Z_3)
- Fusion-space dimensions against brute-force enumeration of fusion trees
- Left and right bracketings, superposition sites
- The secret ratio dim V-hat / dim V and its limit D^2
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from errors import InputError
from fusion import (
    FusionModel, abelian_double, builtin_model, charge_vector, fibonacci, fusion_dim,
    quantum_dims, secret_ratio, toric,
)

PHI = (1 + math.sqrt(5)) / 2


def brute_force_dim(model: FusionModel, labels, total: str) -> int:
    """Count left-bracketed fusion trees by listing every intermediate charge."""
    n = len(labels)
    if n == 0:
        return int(total == model.vacuum)
    count = 0
    for middle in itertools.product(model.labels, repeat=n - 1):
        charges = (labels[0],) + middle
        if charges[-1] != total:
            continue
        weight = 1
        for k in range(1, n):
            weight *= model.N(charges[k - 1], labels[k], charges[k])
            if weight == 0:
                break
        count += weight
    return count


# ============================================================================
# Models and quantum dimensions
# ============================================================================

def test_fibonacci_dimensions():
    dims = quantum_dims(fibonacci())
    assert abs(dims.dims["t"] - PHI) < 1e-12, f"d_t = {dims.dims['t']}"
    assert abs(dims.D2 - (1 + PHI ** 2)) < 1e-12
    assert not dims.abelian


@pytest.mark.parametrize("N", [2, 3, 4])
def test_abelian_doubles_have_d_squared_n_squared(N):
    dims = quantum_dims(abelian_double(N))
    assert dims.abelian
    assert abs(dims.D2 - N * N) < 1e-9


def test_toric_labels():
    model = toric()
    assert model.labels == ("1", "e", "m", "f")
    assert model.N("e", "m", "f") == 1
    assert model.dual["f"] == "f"


@pytest.mark.parametrize("name", ["fibonacci", "toric", "trivial", "zn:3", " Fibonacci "])
def test_builtin_names(name):
    assert builtin_model(name).rank >= 1


@pytest.mark.parametrize("name", ["ising7", "zn:x"])
def test_unknown_builtin(name):
    with pytest.raises(InputError):
        builtin_model(name)


def test_document_validation():
    with pytest.raises(InputError):
        FusionModel.from_document({"labels": ["1", "a"], "dual": {"1": "1", "a": "a"}})
    # a x a = a never reaches the vacuum
    with pytest.raises(InputError):
        FusionModel.from_document({"labels": ["1", "a"], "dual": {"1": "1", "a": "a"},
                                   "table": [["a", "a", "a"]]})
    with pytest.raises(InputError):
        FusionModel.from_document({"labels": ["1", "t"], "dual": {"1": "1"},
                                   "table": [["t", "t", "1"]]})


def test_document_roundtrip_of_fibonacci():
    model = FusionModel.from_document({
        "name": "fib-doc", "labels": ["1", "t"], "dual": {"1": "1", "t": "t"},
        "table": [["t", "t", "1"], ["t", "t", "t"]], "site": "t",
    })
    assert model.name == "fib-doc"
    assert [fusion_dim(model, n) for n in range(1, 8)] == [fusion_dim(fibonacci(), n) for n in range(1, 8)]


# ============================================================================
# Fusion spaces
# ============================================================================

@pytest.mark.acceptance
@pytest.mark.parametrize("n", list(range(0, 13)))
def test_fibonacci_dims_match_brute_force(n):
    model = fibonacci()
    for total in model.labels:
        expected = brute_force_dim(model, ["t"] * n, total)
        got = fusion_dim(model, n, total)
        assert got == expected, f"n={n} total={total}: {got} != {expected}"


def test_fibonacci_counts_are_fibonacci_numbers():
    """Vacuum channel of n tau's: 0, 1, 1, 2, 3, 5, ..."""
    model = fibonacci()
    assert [fusion_dim(model, n) for n in range(1, 11)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]


@pytest.mark.parametrize("n", [1, 4, 7])
def test_bracketings_agree(n):
    for model in (fibonacci(), toric(), abelian_double(3)):
        assert charge_vector(model, n, bracketing="left") == charge_vector(model, n, bracketing="right")


def test_bad_bracketing():
    with pytest.raises(InputError):
        charge_vector(fibonacci(), 3, bracketing="middle")


def test_superposition_site_counts_both_labels():
    """A {1, t} site is the sum of the two single-label chains."""
    model = fibonacci()
    mixed = charge_vector(model, 1, site={"1": 1, "t": 1})
    assert mixed == [1, 1]
    seq = ["t", "1", "t"]
    assert fusion_dim(model, 3, "1", site=seq) == brute_force_dim(model, seq, "1")


def test_site_sequence_length_must_match():
    with pytest.raises(InputError):
        charge_vector(fibonacci(), 3, site=["t", "t"])


# ============================================================================
# Secret ratio
# ============================================================================

@pytest.mark.acceptance
def test_fibonacci_ratio_tends_to_total_dimension():
    result = secret_ratio(fibonacci(), 30, 30, 30)
    d = result.to_dict()
    print(f"\n{'='*70}")
    print("FIBONACCI SECRET RATIO (30, 30, 30)")
    print(f"{'='*70}")
    print(f"  dim V = {result.dim_V}, dim V-hat = {result.dim_V_hat}, ratio = {d['ratio']:.9f}")
    assert abs(d["ratio"] - (1 + PHI ** 2)) < 0.01
    assert abs(d["D2"] - 3.618034) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_toric_ratio_is_exactly_four(n):
    result = secret_ratio(toric(), n, n, n)
    assert result.ratio == Fraction(4), f"Toric ratio {result.ratio} for n={n}"


def test_zn3_ratio_is_exactly_nine():
    assert secret_ratio(abelian_double(3), 2, 3, 2).ratio == 9


def test_empty_group_gives_ratio_one():
    assert secret_ratio(toric(), 0, 2, 3).ratio == 1


def test_undefined_ratio_is_flagged():
    """A single tau cannot fuse to the vacuum."""
    result = secret_ratio(fibonacci(), 1, 2, 2)
    assert result.ratio is None
    assert "undefined-ratio" in result.flags
    assert result.to_dict()["ratio"] is None
