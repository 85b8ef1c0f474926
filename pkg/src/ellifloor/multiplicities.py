"""Classical and refined multiplicities of floors and of marked floor diagrams."""
from __future__ import annotations

from enum import Enum
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .arith import QLaurent, QRational, divisors, qint, qint_ratio, sigma
from .diagrams import MarkedDiagram, fixed_end_id


class ElevatorClass(Enum):
    FIXED_UNBOUNDED = "fixed-unbounded"
    MARKED_UNBOUNDED = "marked-unbounded"
    UNMARKED_UNBOUNDED = "unmarked-unbounded"
    MARKED_BOUNDED = "marked-bounded"
    UNMARKED_BOUNDED = "unmarked-bounded"
    MARKED_THROUGH = "marked-through"
    # a fiber with one fixed end; it carries no mark
    FIXED_THROUGH = "fixed-through"


def elevator_class(M: MarkedDiagram, j: int) -> ElevatorClass:
    e = M.diagram.elevators[j]
    marked = ("elevator", j) in M.marks
    if e.is_fiber:
        return ElevatorClass.FIXED_THROUGH if e.fixed else ElevatorClass.MARKED_THROUGH
    if e.fixed:
        return ElevatorClass.FIXED_UNBOUNDED
    if e.is_bounded:
        return ElevatorClass.MARKED_BOUNDED if marked else ElevatorClass.UNMARKED_BOUNDED
    return ElevatorClass.MARKED_UNBOUNDED if marked else ElevatorClass.UNMARKED_UNBOUNDED


def floor_mult_classical(w: int, valence: int) -> int:
    """w^(val-1) * sigma_1(w)."""
    if valence < 1:
        raise ValueError("a floor has at least one adjacent elevator")
    return w ** (valence - 1) * sigma(1, w)


def floor_mult_refined(w: int, adjacent_weights: Sequence[int]) -> QLaurent:
    """Sum over w = k*d of d^(N-1) * prod_i [k u_i]_q / [u_i]_q, N = number of adjacent elevators."""
    if not adjacent_weights:
        raise ValueError("a floor has at least one adjacent elevator")
    N = len(adjacent_weights)
    total = QLaurent.const(0)
    for k in divisors(w):
        d = w // k
        term = QLaurent.const(d ** (N - 1))
        for u in adjacent_weights:
            term = term * qint_ratio(k * u, u)
        total = total + term
    return total


_CLASSICAL_POWER = {
    ElevatorClass.FIXED_UNBOUNDED: 0,
    ElevatorClass.MARKED_UNBOUNDED: 1,
    ElevatorClass.UNMARKED_UNBOUNDED: 2,
    ElevatorClass.MARKED_BOUNDED: 2,
    ElevatorClass.UNMARKED_BOUNDED: 3,
    ElevatorClass.MARKED_THROUGH: 0,
    ElevatorClass.FIXED_THROUGH: -1,
}


def diagram_mult_classical(M: MarkedDiagram) -> int | Fraction:
    D = M.diagram
    out = Fraction(1)
    for i, w in enumerate(D.floors):
        out *= floor_mult_classical(w, D.valence(i))
    for j, e in enumerate(D.elevators):
        out *= Fraction(e.weight) ** _CLASSICAL_POWER[elevator_class(M, j)]
    return out.numerator if out.denominator == 1 else out


def _refined_elevator_factor(cls: ElevatorClass, w: int) -> QLaurent:
    qw = qint(w)
    if cls is ElevatorClass.MARKED_UNBOUNDED:
        return qw
    if cls is ElevatorClass.UNMARKED_UNBOUNDED:
        return qw * w
    if cls is ElevatorClass.MARKED_BOUNDED:
        return qw * qw
    if cls is ElevatorClass.UNMARKED_BOUNDED:
        return qw * qw * w
    return QLaurent.const(1)


def diagram_mult_refined(M: MarkedDiagram) -> QLaurent | QRational:
    D = M.diagram
    out = QLaurent.const(1)
    den: dict[int, int] = {}
    for i, w in enumerate(D.floors):
        out = out * floor_mult_refined(w, D.adjacent_weights(i))
    for j, e in enumerate(D.elevators):
        cls = elevator_class(M, j)
        if cls is ElevatorClass.FIXED_THROUGH:
            den[e.weight] = den.get(e.weight, 0) + 1
        else:
            out = out * _refined_elevator_factor(cls, e.weight)
    if den:
        r = QRational(out, den)
        return r.num if r.is_laurent() else r
    return out


def mult_signature(M: MarkedDiagram) -> tuple:
    """The data the multiplicity depends on: floors with their neighbour
    weights, and elevator classes with weights."""
    D = M.diagram
    floors = tuple(sorted((w, tuple(sorted(D.adjacent_weights(i)))) for i, w in enumerate(D.floors)))
    elevs = tuple(sorted((elevator_class(M, j).value, e.weight) for j, e in enumerate(D.elevators)))
    return floors, elevs


@lru_cache(maxsize=None)
def _mult_from_signature(sig: tuple, refined: bool):
    floors, elevs = sig
    if not refined:
        out = Fraction(1)
        for w, adj in floors:
            out *= floor_mult_classical(w, len(adj))
        for cls, w in elevs:
            out *= Fraction(w) ** _CLASSICAL_POWER[ElevatorClass(cls)]
        return out.numerator if out.denominator == 1 else out
    out = QLaurent.const(1)
    den: dict[int, int] = {}
    for w, adj in floors:
        out = out * floor_mult_refined(w, adj)
    for cls, w in elevs:
        cls = ElevatorClass(cls)
        if cls is ElevatorClass.FIXED_THROUGH:
            den[w] = den.get(w, 0) + 1
        else:
            out = out * _refined_elevator_factor(cls, w)
    if den:
        r = QRational(out, den)
        return r.num if r.is_laurent() else r
    return out


def diagram_mult(M: MarkedDiagram, refined: bool):
    """Cached multiplicity (many markings share the same local data)."""
    return _mult_from_signature(mult_signature(M), refined)
