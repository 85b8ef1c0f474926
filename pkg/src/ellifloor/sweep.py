"""Weighted count of marked floor diagrams without listing them.

The sweep of :func:`ellifloor.diagrams.enumerate_marked_diagrams` builds a
marked diagram label by label.  The multiplicity is a product of local
factors that are all known at the moment a move is made: a floor knows its
weight and all adjacent elevators when it is placed, and an elevator knows
its class (fixed, marked, bounded) when its upper end is attached.  So the
sum of multiplicities over all completions of a partial sweep depends only
on the partial state up to renaming floors and marks, and can be memoized on
a canonical form of that state.

Marked strands are kept without their labels: strands that differ only in
the label have the same future, so a floor absorbing c of m such strands
contributes binom(m, c) times one completion.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb

from .arith import QLaurent, partitions_of
from .diagrams import (
    _Components,
    _genus_lower_bound,
    _initial_strands,
    _sub_multisets,
    _top_assignments,
)
from .multiplicities import (
    _CLASSICAL_POWER,
    ElevatorClass,
    _refined_elevator_factor,
    floor_mult_classical,
    floor_mult_refined,
)

# a value is (number of marked diagrams, classical sum, refined sum keyed by denominator)
_ZERO = (0, Fraction(0), {})


def _add(a, b):
    if not a[0]:
        return b
    if not b[0]:
        return a
    ref = dict(a[2])
    for k, v in b[2].items():
        ref[k] = ref[k] + v if k in ref else v
    return (a[0] + b[0], a[1] + b[1], ref)


def _scale(a, ways, cf, rf):
    if not a[0]:
        return a
    return (a[0] * ways, a[1] * cf, {k: v * rf for k, v in a[2].items()})


@lru_cache(maxsize=None)
def _floor_factor(w: int, adjacent: tuple[int, ...]):
    return floor_mult_classical(w, len(adjacent)), floor_mult_refined(w, list(adjacent))


@lru_cache(maxsize=None)
def _elevator_factor(cls: ElevatorClass, w: int):
    return Fraction(w) ** _CLASSICAL_POWER[cls], _refined_elevator_factor(cls, w)


def _absorbed_class(s) -> ElevatorClass:
    w, tail, mark, fid = s
    if tail == 0:
        if fid >= 0:
            return ElevatorClass.FIXED_UNBOUNDED
        return ElevatorClass.MARKED_UNBOUNDED if mark else ElevatorClass.UNMARKED_UNBOUNDED
    return ElevatorClass.MARKED_BOUNDED if mark else ElevatorClass.UNMARKED_BOUNDED


def sweep_sum(problem, refined: bool = True) -> tuple[int, Fraction, dict]:
    """(markings, classical sum, refined sum by denominator) over marked diagrams.

    With ``refined=False`` the refined sum is skipped and returned empty.
    """
    delta, d1, g = problem.delta, problem.d1, problem.g
    profile, connected = problem.profile, problem.connected
    n = profile.n_marks(g)
    if n < 0:
        return _ZERO
    allow_fibers = not connected or d1 == 0
    top_count = profile.muInf.length + profile.nuInf.length
    memo: dict = {}

    def state_key(l, left, strands, nb, comps, whole):
        sources = []
        floors: dict = {}
        for s, c in strands.items():
            d = (s[0], 1 if s[2] else 0, s[3])
            if s[1] == 0:
                sources.extend([d] * c)
            else:
                floors.setdefault(s[1], []).extend([d] * c)
        groups: dict = {}
        for r, free in comps.free.items():
            groups[r] = [free]
        for f, ds in floors.items():
            groups[comps.find(f)].append(tuple(sorted(ds)))
        pieces: dict = {}
        for r, items in groups.items():
            top = whole.find(r) if whole is not None else 0
            pieces.setdefault(top, []).append((items[0], tuple(sorted(items[1:]))))
        shape = tuple(sorted(tuple(sorted(v)) for v in pieces.values()))
        return (n - l, left, nb, tuple(sorted(sources)), shape)

    def finish(strands, nb, comps, whole):
        total = _ZERO
        for assignment in _top_assignments(strands, profile.muInf, profile.nuInf):
            fibers = 0
            extra = Counter()
            cf, rf, den = Fraction(1), QLaurent.const(1), Counter()
            ok = True
            for (w, tail, mark, bid), tid in assignment:
                if tail == 0:
                    fibers += 1
                    if bid >= 0 or tid >= 0:
                        cf /= w
                        if w > 1:
                            den[w] += 1
                    elif not mark:
                        ok = False
                        break
                    continue
                if tid >= 0:
                    continue
                cls = ElevatorClass.MARKED_UNBOUNDED if mark else ElevatorClass.UNMARKED_UNBOUNDED
                if not mark:
                    extra[comps.find(tail)] += 1
                a, b = _elevator_factor(cls, w)
                cf = cf * a
                if refined:
                    rf = rf * b
            if not ok or 1 + nb - fibers != g:
                continue
            if any(comps.free[r] + extra[r] != 1 for r in comps.free):
                continue
            if connected:
                pieces = len({whole.find(r) for r in comps.free}) if whole is not None else 0
                if pieces + fibers != 1:
                    continue
            total = _add(total, (1, cf, {tuple(sorted(den.items())): rf} if refined else {}))
        return total

    def rec(l, left, strands, nb, comps, whole):
        if _genus_lower_bound(strands, nb, top_count, allow_fibers) > g:
            return _ZERO
        if whole is not None and comps.free:
            # c pieces and F >= 1 future floors need c + F - 1 >= c bounded joins
            pieces = len({whole.find(r) for r in comps.free})
            if left == 0 and pieces > 1:
                return _ZERO
            if left > 0 and 1 + nb + pieces > g:
                return _ZERO
        if l > n:
            return finish(strands, nb, comps, whole) if left == 0 else _ZERO
        if left == 0 and all(s[2] or s[3] >= 0 for s in strands):
            return _ZERO
        key = state_key(l, left, strands, nb, comps, whole)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = _ZERO
        # label l marks an open strand
        for s in strands:
            if s[2] or s[3] >= 0:
                continue
            nxt = strands.copy()
            nxt[s] -= 1
            if not nxt[s]:
                del nxt[s]
            nxt[(s[0], s[1], 1, -1)] += 1
            total = _add(total, rec(l + 1, left, nxt, nb, comps, whole))
        # label l is a floor of weight w
        for w in range(1, left + 1):
            for absorbed in _sub_multisets(strands):
                if not absorbed:
                    continue
                w_in = sum(s[0] * c for s, c in absorbed.items())
                out = w_in - delta * w
                if out < 0:
                    continue
                free = sum(c for s, c in absorbed.items() if s[1] == 0 and s[2] == 0 and s[3] < 0)
                if free > 1:
                    continue
                new_comps = comps.copy()
                if new_comps.add(l, free, [s[1] for s in absorbed if s[1] > 0 and s[2] == 0]) > 1:
                    continue
                new_whole = None
                if whole is not None:
                    new_whole = whole.copy()
                    new_whole.add(l, 0, [s[1] for s in absorbed if s[1] > 0])
                # marked strands carry distinct labels: choose which ones
                ways = 1
                for s, c in absorbed.items():
                    if s[2]:
                        ways *= comb(strands[s], c)
                cf, rf = Fraction(ways), QLaurent.const(ways)
                for s in absorbed.elements():
                    a, b = _elevator_factor(_absorbed_class(s), s[0])
                    cf = cf * a
                    if refined:
                        rf = rf * b
                rest = strands - absorbed
                new_nb = nb + sum(c for s, c in absorbed.items() if s[1] > 0)
                in_weights = [s[0] for s in absorbed.elements()]
                for part in partitions_of(out):
                    nxt = rest.copy()
                    for p in part.parts():
                        nxt[(p, l, 0, -1)] += 1
                    fa, fb = _floor_factor(w, tuple(sorted(in_weights + part.parts())))
                    sub = rec(l + 1, left - w, nxt, new_nb, new_comps, new_whole)
                    total = _add(total, _scale(sub, ways, cf * fa, rf * fb if refined else None))
        memo[key] = total
        return total

    whole = _Components() if connected else None
    count, classical, by_den = rec(1, d1, _initial_strands(profile), 0, _Components(), whole)
    return count, classical, {k: v for k, v in by_den.items() if v}

