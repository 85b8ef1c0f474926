from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ellifloor.arith import QLaurent, divisors, qint, sigma
from ellifloor.diagrams import (
    Elevator,
    FloorDiagram,
    MarkedDiagram,
    TangencyProfile,
    enumerate_diagrams,
    enumerate_marked_diagrams,
    enumerate_markings,
)
from ellifloor.arith import Partition
from ellifloor.multiplicities import (
    ElevatorClass,
    diagram_mult_classical,
    diagram_mult_refined,
    elevator_class,
    floor_mult_classical,
    floor_mult_refined,
)


def test_floor_mult_classical_examples():
    assert all(floor_mult_classical(1, k) == 1 for k in range(1, 6))
    assert floor_mult_classical(2, 2) == 6
    assert floor_mult_classical(2, 3) == 12
    with pytest.raises(ValueError):
        floor_mult_classical(2, 0)


def test_floor_mult_refined_examples():
    assert floor_mult_refined(1, [3, 1, 2]) == QLaurent.const(1)
    assert floor_mult_refined(2, [1, 1]) == QLaurent({2: 1, 0: 4, -2: 1})
    # w = 2 with a single neighbour of weight 2: [4]/[2] from k = 2 plus
    # [2]/[2] from k = 1, so q + 1 + 1/q, which is sigma_1(2) at q = 1
    single = floor_mult_refined(2, [2])
    assert single == QLaurent({2: 1, 0: 1, -2: 1})
    assert single.at_one() == floor_mult_classical(2, 1)


@given(st.integers(1, 12), st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_floor_refined_specialises_when_weights_are_one(w, us):
    # at q = 1 each ratio [k u]/[u] becomes k, leaving sum_{kd=w} d^(N-1) k^N
    val = floor_mult_refined(w, us).at_one()
    N = len(us)
    assert val == sum((w // k) ** (N - 1) * k ** N for k in divisors(w)) == floor_mult_classical(w, N)
    assert floor_mult_refined(w, us).is_symmetric()


def test_floor_identity():
    for w in range(1, 31):
        for N in range(1, 7):
            a = sum(d ** N * (w // d) ** (N - 1) for d in divisors(w))
            b = sum(d ** (N - 1) * (w // d) ** N for d in divisors(w))
            assert a == b == w ** (N - 1) * sigma(1, w)


def test_three_floor_chain_multiplicity():
    w = 3
    prof = TangencyProfile(Partition(), Partition.single(w), Partition(), Partition.single(w))
    chain = [D for D in enumerate_diagrams(0, 3, w, 3, prof) if len(D.floors) == 3]
    Ms = enumerate_markings(chain[0], prof)
    assert len(Ms) == 4
    assert all(diagram_mult_classical(M) == w ** 9 for M in Ms)


def test_weight_two_diagram_tallies():
    D = next(D for D in enumerate_diagrams(1, 2, 1, 2) if D.floors == (1, 1) and
             any(e.is_bounded and e.weight == 2 for e in D.elevators))
    values = sorted(diagram_mult_classical(M) for M in enumerate_markings(D))
    assert values == [4, 8, 8]
    for M in enumerate_markings(D):
        b = next(j for j, e in enumerate(D.elevators) if e.is_bounded)
        if elevator_class(M, b) is ElevatorClass.UNMARKED_BOUNDED:
            assert diagram_mult_refined(M) == QLaurent({1: 1, -1: 1}) ** 2 * 2


def test_single_marked_source():
    D = FloorDiagram(1, (1,), (Elevator(None, 0, 1),))
    M = MarkedDiagram(D, (("floor", 0),))
    # a floor alone with an unmarked free end below
    assert diagram_mult_classical(M) == 1
    assert diagram_mult_refined(M) == QLaurent.const(1)


def test_elevator_classes_are_exhaustive():
    for M in enumerate_marked_diagrams(1, 2, 2, 2, None, connected=False):
        classes = [elevator_class(M, j) for j in range(len(M.diagram.elevators))]
        assert all(isinstance(c, ElevatorClass) for c in classes)


@pytest.mark.parametrize("delta,d1,d2,g", [(0, 2, 2, 2), (1, 2, 2, 2), (0, 3, 1, 3), (1, 3, 1, 2)])
def test_refined_specialises_and_is_symmetric(delta, d1, d2, g):
    for M in enumerate_marked_diagrams(delta, d1, d2, g, None, connected=False):
        r = diagram_mult_refined(M)
        assert r.at_one() == Fraction(diagram_mult_classical(M))
        assert r.is_symmetric()


def test_fixed_ends_in_relative_problems():
    # fixed ends: factor 1 each but still counted in the floor valence
    w = 2
    prof = TangencyProfile(Partition.single(w), Partition(), Partition(), Partition.single(w))
    for M in enumerate_marked_diagrams(0, 1, w, 1, prof):
        assert diagram_mult_refined(M).at_one() == diagram_mult_classical(M)


def test_one_floor_relative_problem():
    # one floor whose only unmarked end e0 is free: w_e0^2 * w_F^(val-1) sigma_1(w_F)
    from ellifloor.invariants import Problem, relative_invariant
    for wf in (1, 2, 3):
        for a in (1, 2):
            prof = TangencyProfile(Partition([a, 1]), Partition(), Partition(), Partition.single(a + 1))
            pr = Problem(0, wf, a + 1, 1, prof)
            assert relative_invariant(pr).value == (a + 1) ** 2 * wf ** 2 * sigma(1, wf)
