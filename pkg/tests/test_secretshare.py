# tests/test_secretshare.py

"""
Secret-Sharing Verification Tests

Covers:
- Charge transporters and the four code states
- Authorized reads: four distinct Wilson-loop signatures in A and in B
- Unauthorized checks over the d-max probe family, and the violation an
  encircling loop produces
- The index of the two-blob code space on several tori and probe diameters,
  with the blobs moved and resized
- The small-torus default layout
- Superpositions of code states on the dense backend
"""

from __future__ import annotations

import pytest

from errors import InputError, LayoutError
from lattice import build_lattice, make_layout
from secretshare import (
    CHARGE_LABELS, EXPECTED_SIGNATURES, build_code_states, build_probe_family,
    charge_transporters, compute_index, encircling_diameter, encircling_loops,
    superposition_check, verify_authorized, verify_unauthorized, wilson_loops,
)
from stabilizer import defects, expectation, toric_ground_state


# ============================================================================
# Code states
# ============================================================================

def test_four_code_states_in_label_order(code_states8):
    assert [cc.label for cc, _ in code_states8] == list(CHARGE_LABELS)


def test_transporters_end_inside_the_blobs(lattice8, layout8):
    """Every defect a transporter makes sits in A or B."""
    classes = charge_transporters(lattice8, layout8)
    a, b = layout8["A"].edges, layout8["B"].edges
    stars, faces = defects(lattice8, classes["Y"].operator)
    assert len(stars) == 2 and len(faces) == 2
    for vx in stars:
        sup = set(lattice8.star(vx))
        assert sup <= a or sup <= b, f"charge at {vx} left in Eve's region"
    assert classes["0"].operator.is_identity()


def test_code_states_need_separation(ground8, layout8):
    with pytest.raises(LayoutError):
        build_code_states(ground8, layout8, min_separation=50)


def test_code_states_need_two_blob_layout(lattice8, ground8):
    with pytest.raises(InputError):
        build_code_states(ground8, make_layout(lattice8, "annulus"), min_separation=1)


# ============================================================================
# Authorized reads
# ============================================================================

def test_wilson_loops_lie_inside_the_blob(lattice8, layout8):
    loops = wilson_loops(lattice8, layout8["A"])
    for name, op in loops.items():
        assert op.support() <= layout8["A"].edges, f"{name} loop leaves A"


def test_authorized_reads_four_distinct_signatures(code_states8, layout8):
    report = verify_authorized(code_states8, layout8)
    print(f"\n{'='*70}")
    print("AUTHORIZED READ")
    print(f"{'='*70}")
    for label, sig in report.signatures.items():
        print(f"  {label}: A={sig['A']} B={sig['B']}")
    assert report.distinct == 4, f"Expected 4 distinct signatures, got {report.distinct}"
    assert report.clean
    for label, sig in report.signatures.items():
        assert sig["A"] == EXPECTED_SIGNATURES[label]


# ============================================================================
# Unauthorized checks
# ============================================================================

def test_eve_sees_nothing_with_dmax_3(ground8, layout8, code_states8):
    probes = build_probe_family(ground8, layout8, dmax=3, sampled=32, seed=7)
    report = verify_unauthorized(code_states8, probes, threads=4)
    assert probes.boxes, "Probe family has no regions"
    assert report.clean, f"{len(report.violations)} violations: {report.violations[:3]}"
    assert report.ledger.total > 0


def test_encircling_loop_is_caught_with_a_witness(lattice8, ground8, layout8, code_states8):
    loops = encircling_loops(lattice8, layout8["A"])
    extra = [(f"encircle_{k}", op) for k, op in sorted(loops.items())]
    probes = build_probe_family(ground8, layout8, dmax=2, sampled=0, extra=extra)
    report = verify_unauthorized(code_states8, probes)
    assert not report.clean
    flagged = {v.probe for v in report.violations}
    assert flagged == {"encircle_e", "encircle_m"}, f"Flagged probes: {flagged}"
    assert all(v.witness is not None for v in report.violations)


def test_probe_outside_eve_is_rejected(lattice8, ground8, layout8):
    loops = wilson_loops(lattice8, layout8["A"])
    with pytest.raises(InputError):
        build_probe_family(ground8, layout8, dmax=3, sampled=0, extra=[("inside_A", loops["e"])])


def test_probe_family_is_reproducible(ground8, layout8):
    first = build_probe_family(ground8, layout8, dmax=3, sampled=8, seed=11)
    second = build_probe_family(ground8, layout8, dmax=3, sampled=8, seed=11)
    assert [p for _, p in first.sampled] == [p for _, p in second.sampled]


# ============================================================================
# Index
# ============================================================================

def test_index_on_default_layout(ground8, layout8):
    report = compute_index(ground8, layout8, dmax=3)
    d = report.to_dict()
    assert d["index"] == 4
    assert d["charge_bits"] == 2
    assert d["kernel_bits"] == 2
    assert d["log_index_bits"] == 2.0
    assert d["logical_count"] == 2 and d["degeneracy"] == 4
    assert d["distinct_signatures"] == 4


def test_unrestricted_eve_collapses_the_index(ground8, layout8):
    """Eve measuring the encircling loops leaves a single class."""
    report = compute_index(ground8, layout8, dmax=None)
    assert report.index == 1, f"Unrestricted index {report.index}"


def test_encircling_diameter_exceeds_small_probes(lattice8, layout8):
    assert encircling_diameter(lattice8, layout8["A"]) > 3


def test_index_needs_torus():
    lat = build_lattice("planar", 8)
    ground = toric_ground_state(lat)
    with pytest.raises(InputError):
        compute_index(ground, make_layout(lat, "annulus"), dmax=3)


@pytest.mark.acceptance
@pytest.mark.slow
@pytest.mark.parametrize("L", [6, 8, 10])
@pytest.mark.parametrize("dmax", [2, 3])
def test_index_reproduction(L, dmax):
    """Index 4 with 2 kernel bits for every torus size and probe diameter."""
    lat = build_lattice("torus", L)
    layout = make_layout(lat, "two-blob")
    assert layout.separation >= 4
    report = compute_index(toric_ground_state(lat), layout, dmax=dmax)
    assert report.index == 4, f"L={L} dmax={dmax}: index {report.index}"
    assert report.kernel_bits == 2, f"L={L} dmax={dmax}: kernel bits {report.kernel_bits}"


# (L, centers, radius). A radius-r blob touches every vertex within
# distance r + 1 of its center, so L = 6 only fits single cells.
BLOB_PLACEMENTS = [
    (6, [[0, 0], [3, 3]], 0),
    (6, [[1, 2], [4, 5]], 0),
    (6, [[5, 0], [2, 3]], 0),
    (8, [[0, 0], [4, 4]], 0),
    (8, [[0, 3], [3, 7]], 0),
    (8, [[7, 2], [3, 6]], 0),
    (8, [[2, 3], [6, 7]], 1),
    (8, [[1, 1], [5, 4]], 1),
    (8, [[0, 5], [4, 1]], 1),
    (10, [[0, 5], [5, 0]], 1),
    (10, [[0, 0], [4, 3]], 1),
    (10, [[9, 9], [4, 4]], 1),
    (10, [[0, 0], [5, 5]], 2),
    (10, [[0, 3], [5, 7]], 2),
    (10, [[2, 9], [7, 4]], 2),
]


@pytest.mark.acceptance
@pytest.mark.slow
@pytest.mark.parametrize("L, centers, radius", BLOB_PLACEMENTS)
def test_index_is_independent_of_blob_placement(L, centers, radius):
    """Moving or growing the blobs, including onto row 0 and column 0, keeps the index at 4."""
    lat = build_lattice("torus", L)
    layout = make_layout(lat, "two-blob", {"centers": centers, "radius": radius, "separation": 4})
    ground = toric_ground_state(lat)
    for dmax in (2, 3):
        report = compute_index(ground, layout, dmax=dmax)
        assert report.index == 4, f"L={L} {centers} r={radius} dmax={dmax}: index {report.index}"
        assert report.kernel_bits == 2, f"L={L} {centers} r={radius}: kernel bits {report.kernel_bits}"
        assert report.signatures == 4
    assert compute_index(ground, layout, dmax=None).index == 1


def test_small_torus_default_blobs():
    """On L = 3 the default cells sit at the torus diameter and need min_separation=1."""
    lat = build_lattice("torus", 3)
    layout = make_layout(lat, "two-blob")
    ca, cb = (tuple(c) for c in layout.params["centers"])
    assert lat.distance(ca, cb) == max(lat.distance((0, 0), vx) for vx in lat.vertices)
    ground = toric_ground_state(lat)
    with pytest.raises(LayoutError):
        build_code_states(ground, layout, min_separation=4)
    assert len(build_code_states(ground, layout, min_separation=1)) == 4


@pytest.mark.acceptance
def test_secret_sharing_verification(lattice8, ground8, layout8, code_states8):
    """Zero violations over the full d-max=3 family; an encircling loop is caught."""
    probes = build_probe_family(ground8, layout8, dmax=3, sampled=64, seed=7)
    assert verify_unauthorized(code_states8, probes).clean
    assert verify_authorized(code_states8, layout8).distinct == 4
    extra = [("encircle_e", encircling_loops(lattice8, layout8["A"])["e"])]
    caught = verify_unauthorized(code_states8, build_probe_family(ground8, layout8, 3, 0, extra=extra))
    assert caught.violations and caught.violations[0].witness


# ============================================================================
# Superpositions
# ============================================================================

@pytest.mark.dense
@pytest.mark.acceptance
def test_relative_phases_are_invisible_to_alice(ground3, layout3):
    states = build_code_states(ground3, layout3, min_separation=1)
    report = superposition_check(states, layout3, samples=200, seed=7)
    assert report.n_operators >= 200
    assert len(report.phases) == 3
    assert report.passed, f"Max deviation {report.max_deviation:.3e}"
    assert abs(report.wilson_expectation) < 1e-9


def test_expected_signatures_match_ground_state(ground8, lattice8, layout8):
    loops = wilson_loops(lattice8, layout8["B"])
    assert (expectation(ground8, loops["e"]), expectation(ground8, loops["m"])) == EXPECTED_SIGNATURES["0"]
