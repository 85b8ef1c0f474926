import itertools
from collections import Counter

import pytest

from ellifloor.arith import Partition
from ellifloor.diagrams import (
    Elevator,
    FloorDiagram,
    MarkedDiagram,
    ProfileError,
    TangencyProfile,
    automorphism_group_size,
    canonical_form,
    enumerate_diagrams,
    enumerate_marked_diagrams,
    enumerate_markings,
    labeled_markings,
    marked_canonical_form,
    marking_violations,
    validate,
)

P = Partition
SMALL_GRID = [
    (delta, d1, d2, g)
    for delta in (0, 1)
    for d1 in range(1, 4)
    for d2 in range(0, 3)
    for g in range(1, 4)
    if not (delta == 0 and d2 == 0)
]


def test_validate_examples():
    D = FloorDiagram(1, (2,), (Elevator(None, 0, 1), Elevator(None, 0, 1)))
    assert validate(D) == []
    assert (D.d1, D.d2, D.genus) == (2, 0, 1)

    cyc = FloorDiagram(0, (1, 1), (Elevator(0, 1, 1), Elevator(1, 0, 1)))
    assert any(v.startswith("oriented cycle") for v in validate(cyc))

    bad = FloorDiagram(0, (1,), (Elevator(None, 0, 1), Elevator(0, None, 2)))
    assert any(v.startswith("divergence") for v in validate(bad))


def test_diagram_json_round_trip():
    for D in enumerate_diagrams(1, 2, 1, 2):
        assert FloorDiagram.from_json(D.to_json()) == D
        for M in enumerate_markings(D):
            assert MarkedDiagram.from_json(M.to_json()) == M


def test_diagram_counts():
    assert len(enumerate_diagrams(1, 2, 0, 2)) == 1
    # the printed tally of two diagrams omits the one with a bounded elevator
    # of weight 1 whose lower floor has weight 1; see test_acceptance
    assert len(enumerate_diagrams(1, 2, 1, 2)) == 3


def test_genus_three_relative_shapes():
    from ellifloor.diagrams import shape_key
    for w in range(2, 6):
        prof = TangencyProfile(P(), P.single(w), P(), P.single(w))
        Ds = enumerate_diagrams(0, 3, w, 3, prof)
        shapes = {shape_key(D) for D in Ds}
        floors = Counter(len(D.floors) for D in Ds)
        assert floors[3] == 1
        assert len(shapes) == 2
        # two floors of weights 1 and 2 in either order; the bounded pair
        # splits w as i + (w - i) up to swapping
        assert floors[2] == 2 * (w // 2)


def test_genus_one_markings():
    D, = enumerate_diagrams(0, 2, 1, 1)
    assert len(enumerate_markings(D)) == 2
    D, = enumerate_diagrams(1, 2, 0, 1)
    assert len(enumerate_markings(D)) == 1


def test_profile_mismatch_is_an_input_error():
    bad = TangencyProfile(P(), P.ones(2), P(), P.ones(1))
    with pytest.raises(ProfileError):
        enumerate_diagrams(1, 2, 1, 2, bad)


def test_automorphism_examples():
    two = FloorDiagram(1, (2,), (Elevator(None, 0, 1), Elevator(None, 0, 1)))
    assert automorphism_group_size(two) == 2
    mixed = FloorDiagram(1, (3,), (Elevator(None, 0, 1), Elevator(None, 0, 2)))
    assert automorphism_group_size(mixed) == 1
    pair = FloorDiagram(1, (1, 1), (Elevator(None, 0, 1), Elevator(None, 1, 1)))
    assert automorphism_group_size(pair) >= 2
    pinned = FloorDiagram(1, (2,), (Elevator(None, 0, 1, True, 0), Elevator(None, 0, 1, True, 1)))
    assert automorphism_group_size(pinned) == 1


@pytest.mark.parametrize("delta,d1,d2,g", SMALL_GRID)
def test_enumerated_diagrams_are_valid_and_distinct(delta, d1, d2, g):
    Ds = enumerate_diagrams(delta, d1, d2, g)
    keys = [canonical_form(D) for D in Ds]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)
    for D in Ds:
        assert validate(D, TangencyProfile.absolute(delta, d1, d2), connected=True) == []
        assert D.genus == g
        if D.n_fibers == 0 and len(D.floors) <= 4:
            assert D.genus == D.n_bounded + 1


@pytest.mark.parametrize("delta,d1,d2,g", SMALL_GRID)
def test_marking_orbits_match_brute_force(delta, d1, d2, g):
    for D in enumerate_diagrams(delta, d1, d2, g):
        if len(D.floors) > 3 or len(D.elevators) > 6:
            continue
        labeled = list(labeled_markings(D))
        orbits = {marked_canonical_form(M) for M in labeled}
        assert len(orbits) == len(enumerate_markings(D))
        # the action on markings is free, so orbit counting and division agree
        assert len(labeled) == len(orbits) * automorphism_group_size(D)
        for M in labeled:
            assert marking_violations(M, D.profile()) == []


@pytest.mark.parametrize("delta,d1,d2,g", SMALL_GRID)
def test_marked_sweep_matches_diagram_then_marking(delta, d1, d2, g):
    swept = Counter(marked_canonical_form(M) for M in enumerate_marked_diagrams(delta, d1, d2, g))
    assert all(c == 1 for c in swept.values())
    two_step = Counter(
        marked_canonical_form(M) for D in enumerate_diagrams(delta, d1, d2, g) for M in enumerate_markings(D)
    )
    assert swept == two_step


def test_disconnected_mode_admits_marked_fibers():
    prof = TangencyProfile(P(), P.ones(1), P(), P.ones(1))
    Ms = list(enumerate_marked_diagrams(0, 0, 1, 0, prof, connected=False))
    assert len(Ms) == 1 and Ms[0].diagram.elevators[0].is_fiber
    assert list(enumerate_marked_diagrams(0, 0, 1, 0, prof, connected=True)) == Ms
    two = TangencyProfile(P(), P.ones(2), P(), P.ones(2))
    assert len(list(enumerate_marked_diagrams(0, 0, 2, -1, two, connected=False))) == 1
    assert list(enumerate_marked_diagrams(0, 0, 2, -1, two, connected=True)) == []


def test_marking_violation_messages():
    D = FloorDiagram(0, (1,), (Elevator(None, 0, 1), Elevator(0, None, 1)))
    ok = MarkedDiagram(D, (("elevator", 0), ("floor", 0)))
    assert marking_violations(ok) == []
    both_free = MarkedDiagram(D, (("floor", 0),))
    assert any("end condition" in v for v in marking_violations(both_free))
    backwards = MarkedDiagram(D, (("floor", 0), ("elevator", 0)))
    assert any(v.startswith("increasing") for v in marking_violations(backwards))
