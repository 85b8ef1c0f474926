"""Floor diagrams over an elliptic base: data model, validation and enumeration.

Conventions
-----------
* Elevators are oriented from ``tail`` to ``head``.  ``tail is None`` means
  the elevator comes from the zero section (a bottom end), ``head is None``
  means it goes to the infinity section (a top end).
* For each floor, (incoming weight) - (outgoing weight) = delta * w_F.  With
  this orientation the bottom ends carry delta*d1 + d2 and the top ends d2.
* Fixed ends carry a ``label``: bottom fixed ends are numbered
  0..len(mu0)-1 following ``mu0.parts()`` (non-increasing), top fixed ends
  likewise for ``muInf``.  They are attached to distinct prescribed points,
  so an isomorphism has to fix each of them.
* An elevator with both ends unbounded is a *fiber*; it is its own
  connected component and contributes -1 to the genus.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

from .arith import Partition, partitions_of

SOURCE = None
SINK = None

# sort keys used inside canonical encodings
_SRC = -1
_SNK = -2


class ProfileError(ValueError):
    """Raised for inconsistent problem data (sizes do not match the degree)."""


@dataclass(frozen=True)
class Elevator:
    tail: int | None
    head: int | None
    weight: int
    fixed: bool = False
    label: int | None = None

    @property
    def is_bounded(self) -> bool:
        return self.tail is not None and self.head is not None

    @property
    def is_fiber(self) -> bool:
        return self.tail is None and self.head is None

    def to_json(self) -> dict:
        out = {
            "tail": "source" if self.tail is None else self.tail,
            "head": "sink" if self.head is None else self.head,
            "weight": self.weight,
            "fixed": self.fixed,
        }
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Elevator":
        tail = obj["tail"]
        head = obj["head"]
        return cls(
            tail=None if tail == "source" else int(tail),
            head=None if head == "sink" else int(head),
            weight=int(obj["weight"]),
            fixed=bool(obj.get("fixed", False)),
            label=obj.get("label"),
        )


@dataclass(frozen=True)
class FloorDiagram:
    delta: int
    floors: tuple[int, ...]
    elevators: tuple[Elevator, ...]

    def __post_init__(self):
        object.__setattr__(self, "floors", tuple(self.floors))
        object.__setattr__(self, "elevators", tuple(self.elevators))

    @property
    def d1(self) -> int:
        return sum(self.floors)

    @property
    def d2(self) -> int:
        return sum(e.weight for e in self.elevators if e.head is None)

    @property
    def n_bounded(self) -> int:
        return sum(1 for e in self.elevators if e.is_bounded)

    @property
    def n_fibers(self) -> int:
        return sum(1 for e in self.elevators if e.is_fiber)

    @property
    def genus(self) -> int:
        return 1 + self.n_bounded - self.n_fibers

    def valence(self, i: int) -> int:
        return sum((e.tail == i) + (e.head == i) for e in self.elevators)

    def adjacent_weights(self, i: int) -> list[int]:
        out = []
        for e in self.elevators:
            if e.tail == i:
                out.append(e.weight)
            if e.head == i:
                out.append(e.weight)
        return out

    def divergence(self, i: int) -> int:
        inflow = sum(e.weight for e in self.elevators if e.head == i)
        outflow = sum(e.weight for e in self.elevators if e.tail == i)
        return inflow - outflow

    def profile(self) -> "TangencyProfile":
        """The tangency profile read off from the ends."""
        mu0, nu0, mui, nui = Counter(), Counter(), Counter(), Counter()
        for e in self.elevators:
            side = fixed_end_id(e)[0] if e.fixed else None
            if e.tail is None:
                (mu0 if side == "bottom" else nu0)[e.weight] += 1
            if e.head is None:
                (mui if side == "top" else nui)[e.weight] += 1
        return TangencyProfile(Partition(mu0), Partition(nu0), Partition(mui), Partition(nui))

    def component_count(self) -> int:
        """Connected components, each fiber counted separately."""
        parent = list(range(len(self.floors)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.elevators:
            if e.is_bounded:
                parent[find(e.tail)] = find(e.head)
        return len({find(i) for i in range(len(self.floors))}) + self.n_fibers

    def is_connected(self) -> bool:
        return self.component_count() == 1

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "floors": [{"weight": w} for w in self.floors],
            "elevators": [e.to_json() for e in self.elevators],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FloorDiagram":
        return cls(
            delta=int(obj["delta"]),
            floors=tuple(int(f["weight"]) for f in obj["floors"]),
            elevators=tuple(Elevator.from_json(e) for e in obj["elevators"]),
        )


def _fixed_side(e: Elevator) -> str | None:
    """Which boundary a fixed elevator is pinned to.

    A fixed elevator with a floor head is pinned at the bottom, one with a
    floor tail at the top.  A fixed fiber records its side in ``label``
    as ``("bottom", i)`` or ``("top", i)`` encoded by the sign convention
    of :func:`fiber_label`.
    """
    if not e.fixed:
        return None
    if e.tail is None and e.head is not None:
        return "bottom"
    if e.head is None and e.tail is not None:
        return "top"
    return "bottom" if (e.label or 0) >= 0 else "top"


def fiber_label(side: str, index: int) -> int:
    """Label for a fixed fiber: bottom ids are >= 0, top ids are < 0."""
    return index if side == "bottom" else -1 - index


def fixed_end_id(e: Elevator) -> tuple[str, int] | None:
    if not e.fixed:
        return None
    side = _fixed_side(e)
    label = e.label if e.label is not None else 0
    if e.is_fiber and side == "top":
        return ("top", -1 - label)
    return (side, label)


@dataclass(frozen=True)
class TangencyProfile:
    mu0: Partition = field(default_factory=Partition)
    nu0: Partition = field(default_factory=Partition)
    muInf: Partition = field(default_factory=Partition)
    nuInf: Partition = field(default_factory=Partition)

    @classmethod
    def absolute(cls, delta: int, d1: int, d2: int) -> "TangencyProfile":
        """Simple tangency everywhere and no fixed ends."""
        return cls(Partition(), Partition.ones(delta * d1 + d2), Partition(), Partition.ones(d2))

    def check(self, delta: int, d1: int, d2: int) -> None:
        bottom = self.mu0.size + self.nu0.size
        top = self.muInf.size + self.nuInf.size
        if bottom != delta * d1 + d2:
            raise ProfileError(f"bottom ends have total weight {bottom}, expected {delta * d1 + d2}")
        if top != d2:
            raise ProfileError(f"top ends have total weight {top}, expected {d2}")

    def n_marks(self, g: int) -> int:
        return self.nu0.length + self.nuInf.length + g - 1

    def to_json(self) -> dict:
        return {
            "mu0": self.mu0.to_json(),
            "nu0": self.nu0.to_json(),
            "muInf": self.muInf.to_json(),
            "nuInf": self.nuInf.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TangencyProfile":
        return cls(*(Partition.from_json(obj.get(k, {})) for k in ("mu0", "nu0", "muInf", "nuInf")))

    @property
    def key(self):
        return (self.mu0.key, self.nu0.key, self.muInf.key, self.nuInf.key)


# A mark target is ("floor", i) or ("elevator", j); marks[l-1] is the image of l.
Mark = tuple[str, int]


@dataclass(frozen=True)
class MarkedDiagram:
    diagram: FloorDiagram
    marks: tuple[Mark, ...]

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(tuple(m) for m in self.marks))

    def label_of(self, kind: str, index: int) -> int | None:
        for label, target in enumerate(self.marks, start=1):
            if target == (kind, index):
                return label
        return None

    def marked_elevators(self) -> set[int]:
        return {i for kind, i in self.marks if kind == "elevator"}

    def image(self) -> frozenset[Mark]:
        """The set of marked elements, forgetting the order of the labels."""
        return frozenset(self.marks)

    def to_json(self) -> dict:
        out = self.diagram.to_json()
        out["marks"] = [
            {"label": l, "target": {"kind": kind, "index": i}}
            for l, (kind, i) in enumerate(self.marks, start=1)
        ]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MarkedDiagram":
        marks = sorted(obj["marks"], key=lambda m: m["label"])
        return cls(
            FloorDiagram.from_json(obj),
            tuple((m["target"]["kind"], int(m["target"]["index"])) for m in marks),
        )


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


def _topological_order(n_floors: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    succ = {i: [] for i in range(n_floors)}
    indeg = [0] * n_floors
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    order = []
    ready = [i for i in range(n_floors) if indeg[i] == 0]
    while ready:
        v = ready.pop()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order if len(order) == n_floors else None


def validate(D: FloorDiagram, profile: TangencyProfile | None = None, connected: bool = False) -> list[str]:
    """List the violated axioms of ``D`` (empty list means valid)."""
    problems: list[str] = []
    nf = len(D.floors)
    if D.delta < 0:
        problems.append("delta: must be non-negative")
    for i, w in enumerate(D.floors):
        if w < 1:
            problems.append(f"floor weight: floor {i} has weight {w}")
    edges_ok = True
    for j, e in enumerate(D.elevators):
        if e.weight < 1:
            problems.append(f"elevator weight: elevator {j} has weight {e.weight}")
        for end in (e.tail, e.head):
            if end is not None and not (0 <= end < nf):
                problems.append(f"incidence: elevator {j} refers to missing floor {end}")
                edges_ok = False
        if e.fixed and e.is_bounded:
            problems.append(f"fixed flag: bounded elevator {j} cannot be fixed")
        if e.tail is not None and e.tail == e.head:
            problems.append(f"oriented cycle: elevator {j} is a loop at floor {e.tail}")
            edges_ok = False
    if not edges_ok:
        return problems

    bounded = [(e.tail, e.head) for e in D.elevators if e.is_bounded]
    if _topological_order(nf, bounded) is None:
        problems.append("oriented cycle: the floors are not acyclically ordered")

    for i, w in enumerate(D.floors):
        if D.valence(i) == 0:
            problems.append(f"isolated floor: floor {i} has no elevators")
        div = D.divergence(i)
        if div != D.delta * w:
            problems.append(f"divergence: floor {i} has in-out = {div}, expected {D.delta * w}")

    bottom = sum(e.weight for e in D.elevators if e.tail is None)
    if bottom != D.delta * D.d1 + D.d2:
        problems.append(f"bidegree: bottom ends weigh {bottom}, expected {D.delta * D.d1 + D.d2}")

    for j, e in enumerate(D.elevators):
        if e.is_fiber and e.fixed and e.label is None:
            problems.append(f"fiber: fixed fiber {j} needs a label")
    fixed_ids = [fixed_end_id(e) for e in D.elevators if e.fixed]
    if len(set(fixed_ids)) != len(fixed_ids):
        problems.append("fixed ends: two fixed elevators share a label")

    if profile is not None:
        if D.profile() != profile:
            problems.append("profile: ends do not match the tangency profile")

    if connected and not D.is_connected():
        problems.append("connected: diagram has several components")
    return problems


def _mark_order_violations(M: MarkedDiagram) -> list[str]:
    D = M.diagram
    out: list[str] = []
    floor_label = {}
    elev_label = {}
    for l, (kind, i) in enumerate(M.marks, start=1):
        if kind == "floor":
            if not 0 <= i < len(D.floors):
                out.append(f"marking: label {l} points to missing floor {i}")
                continue
            if i in floor_label:
                out.append(f"marking: floor {i} carries two marks")
            floor_label[i] = l
        elif kind == "elevator":
            if not 0 <= i < len(D.elevators):
                out.append(f"marking: label {l} points to missing elevator {i}")
                continue
            if i in elev_label:
                out.append(f"marking: elevator {i} carries two marks")
            if D.elevators[i].fixed:
                out.append(f"marking: fixed elevator {i} is marked")
            elev_label[i] = l
        else:
            out.append(f"marking: unknown target kind {kind!r}")
    for i in range(len(D.floors)):
        if i not in floor_label:
            out.append(f"marking: floor {i} is not marked")
    if out:
        return out
    for j, e in enumerate(D.elevators):
        if e.is_bounded and floor_label[e.tail] >= floor_label[e.head]:
            out.append(f"increasing: floor {e.tail} is not marked before floor {e.head}")
        if j in elev_label:
            lj = elev_label[j]
            if e.tail is not None and floor_label[e.tail] >= lj:
                out.append(f"increasing: elevator {j} is marked before its tail")
            if e.head is not None and floor_label[e.head] <= lj:
                out.append(f"increasing: elevator {j} is marked after its head")
    return out


def marking_violations(M: MarkedDiagram, profile: TangencyProfile | None = None) -> list[str]:
    """List the violated marking axioms (the diagram itself is checked too)."""
    D = M.diagram
    out = validate(D, profile)
    if out:
        return out
    if profile is not None and len(M.marks) != profile.n_marks(D.genus):
        out.append(f"marking: {len(M.marks)} marks, expected {profile.n_marks(D.genus)}")
    out += _mark_order_violations(M)
    if out:
        return out
    out += _component_violations(D, M.marked_elevators())
    return out


def _component_violations(D: FloorDiagram, marked: set[int]) -> list[str]:
    """Check that cutting marked (and fixed) elevators leaves one free end per piece."""
    nf = len(D.floors)
    parent = list(range(nf))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, e in enumerate(D.elevators):
        if e.is_bounded and j not in marked:
            parent[find(e.tail)] = find(e.head)
    free = Counter()
    out = []
    for j, e in enumerate(D.elevators):
        if e.is_fiber:
            n_free = (not _fixed_at(e, "bottom")) + (not _fixed_at(e, "top"))
            if n_free == 0:
                out.append(f"fiber: elevator {j} has both ends fixed")
            elif n_free == 2 and j not in marked:
                out.append(f"end condition: free fiber {j} is unmarked")
            elif n_free == 1 and j in marked:
                out.append(f"end condition: fiber {j} with a fixed end is marked")
            continue
        if e.is_bounded or e.fixed or j in marked:
            continue
        floor = e.head if e.tail is None else e.tail
        free[find(floor)] += 1
    for root in {find(i) for i in range(nf)}:
        if free[root] != 1:
            out.append(f"end condition: component of floor {root} has {free[root]} unmarked free ends")
    return out


def _fixed_at(e: Elevator, side: str) -> bool:
    return e.fixed and fixed_end_id(e)[0] == side


# --------------------------------------------------------------------------
# Canonical forms and automorphisms
# --------------------------------------------------------------------------


def _elevator_key(e: Elevator, perm: Sequence[int]) -> tuple:
    tail = _SRC if e.tail is None else perm[e.tail]
    head = _SNK if e.head is None else perm[e.head]
    fid = fixed_end_id(e)
    return (tail, head, e.weight, () if fid is None else fid)


def _block_permutations(weights: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Permutations of floor positions that keep the sorted weight sequence sorted."""
    order = sorted(range(len(weights)), key=lambda i: weights[i])
    blocks = [list(g) for _, g in itertools.groupby(order, key=lambda i: weights[i])]
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = [0] * len(weights)
        pos = 0
        for block in choice:
            for i in block:
                perm[i] = pos
                pos += 1
        yield tuple(perm)


def canonical_form(D: FloorDiagram) -> tuple:
    """Lexicographically least encoding over weight-preserving floor relabelings."""
    best = None
    fw = tuple(sorted(D.floors))
    for perm in _block_permutations(D.floors):
        key = tuple(sorted(_elevator_key(e, perm) for e in D.elevators))
        if best is None or key < best:
            best = key
    return (D.delta, fw, best or ())


def from_canonical_form(key: tuple) -> FloorDiagram:
    delta, fw, elevs = key
    out = []
    for tail, head, weight, fid in elevs:
        fixed = bool(fid)
        label = None
        t = None if tail == _SRC else tail
        h = None if head == _SNK else head
        if fixed:
            side, idx = fid
            label = fiber_label(side, idx) if (t is None and h is None) else idx
        out.append(Elevator(t, h, weight, fixed, label))
    return FloorDiagram(delta, fw, tuple(out))


def canonicalize(D: FloorDiagram) -> FloorDiagram:
    return from_canonical_form(canonical_form(D))


def shape_key(D: FloorDiagram) -> tuple:
    """Canonical form of the underlying graph with all weights forgotten."""
    stripped = FloorDiagram(
        D.delta,
        tuple(1 for _ in D.floors),
        tuple(Elevator(e.tail, e.head, 1, e.fixed, e.label) for e in D.elevators),
    )
    return canonical_form(stripped)[2]


def automorphism_group_size(D: FloorDiagram) -> int:
    """Order of the automorphism group (fixed elevators pinned one by one).

    A floor permutation is an automorphism when it preserves weights and maps
    the multiset of elevators onto itself; identical parallel elevators can in
    addition be permuted freely among themselves.
    """
    ident = tuple(range(len(D.floors)))
    base = Counter(_elevator_key(e, ident) for e in D.elevators)
    floor_perms = 0
    weights = D.floors
    for perm in itertools.permutations(range(len(weights))):
        if any(weights[i] != weights[perm[i]] for i in range(len(weights))):
            continue
        if Counter(_elevator_key(e, perm) for e in D.elevators) == base:
            floor_perms += 1
    return floor_perms * prod(factorial(c) for c in base.values())


# --------------------------------------------------------------------------
# Enumeration of floor diagrams (unmarked)
# --------------------------------------------------------------------------


def _sub_multisets(c: Counter) -> Iterator[Counter]:
    items = sorted(c.items())
    for counts in itertools.product(*(range(m + 1) for _, m in items)):
        yield Counter({k: n for (k, _), n in zip(items, counts) if n})


def _initial_strands(profile: TangencyProfile) -> Counter:
    """Bottom ends as (weight, tail, mark, fixed id); tail 0 is the source."""
    strands: Counter = Counter()
    for idx, w in enumerate(profile.mu0.parts()):
        strands[(w, 0, 0, idx)] += 1
    for w, c in profile.nu0.items():
        strands[(w, 0, 0, -1)] += c
    return strands


def _top_assignments(strands: Counter, mu_inf: Partition, nu_inf: Partition) -> Iterator[list[tuple]]:
    """Ways to close the open strands at the top.

    Yields lists of (strand, top fixed id or -1).  Fixed top ends must take
    unmarked strands whose bottom is not itself fixed to a fiber end.
    """
    fixed_parts = mu_inf.parts()

    def rec(i, left: Counter, acc):
        if i == len(fixed_parts):
            if Counter(s[0] for s in left.elements()) == Counter(dict(nu_inf.items())):
                yield acc + [(s, -1) for s in sorted(left.elements())]
            return
        w = fixed_parts[i]
        for s in sorted(left):
            if s[0] != w or s[2] != 0:
                continue
            if s[1] == 0 and s[3] >= 0:
                continue  # fixed-fixed fiber
            nxt = left.copy()
            nxt[s] -= 1
            if not nxt[s]:
                del nxt[s]
            yield from rec(i + 1, nxt, acc + [(s, i)])

    yield from rec(0, strands, [])


def _genus_lower_bound(strands: Counter, nb: int, top_count: int, allow_fibers: bool) -> int:
    """Smallest genus any completion of a partial sweep can reach.

    Open strands leaving a floor either reach the top (at most top_count of
    them, shared with fibers) or become bounded; fibers lower the genus by one
    each.
    """
    from_floors = sum(c for s, c in strands.items() if s[1] > 0)
    sources = sum(c for s, c in strands.items() if s[1] == 0) if allow_fibers else 0
    return 1 + nb + max(from_floors - top_count, -min(sources, top_count))


def _check_inputs(delta: int, d1: int, d2: int, g: int, profile: TangencyProfile) -> None:
    if min(delta, d1, d2) < 0:
        raise ProfileError("delta, d1 and d2 must be non-negative")
    profile.check(delta, d1, d2)


def enumerate_diagrams(
    delta: int,
    d1: int,
    d2: int,
    g: int,
    profile: TangencyProfile | None = None,
    connected: bool = True,
) -> list[FloorDiagram]:
    """One canonical representative per isomorphism class of floor diagrams."""
    if profile is None:
        profile = TangencyProfile.absolute(delta, d1, d2)
    _check_inputs(delta, d1, d2, g, profile)
    found: set = set()
    top_count = profile.muInf.length + profile.nuInf.length

    def finish(strands: Counter, floors: list[int], elevs: list[tuple], nb: int):
        for assignment in _top_assignments(strands, profile.muInf, profile.nuInf):
            out = list(elevs)
            fibers = 0
            for (w, tail, _, bid), tid in assignment:
                if tail == 0:
                    fibers += 1
                out.append((tail, 0, w, bid, tid))
            if 1 + nb - fibers != g:
                continue
            D = _build_diagram(delta, floors, out)
            if connected and not D.is_connected():
                continue
            found.add(canonical_form(D))

    def rec(left: int, strands: Counter, floors: list[int], elevs: list[tuple], nb: int):
        if _genus_lower_bound(strands, nb, top_count, not connected or d1 == 0) > g:
            return
        if left == 0:
            finish(strands, floors, elevs, nb)
            return
        label = len(floors) + 1
        for w in range(1, left + 1):
            for absorbed in _sub_multisets(strands):
                if not absorbed:
                    continue
                w_in = sum(s[0] * c for s, c in absorbed.items())
                out = w_in - delta * w
                if out < 0:
                    continue
                rest = strands - absorbed
                new_elevs = elevs + [(s[1], label, s[0], s[3], -1) for s in absorbed.elements()]
                new_nb = nb + sum(c for s, c in absorbed.items() if s[1] > 0)
                for part in partitions_of(out):
                    nxt = rest.copy()
                    for p in part.parts():
                        nxt[(p, label, 0, -1)] += 1
                    rec(left - w, nxt, floors + [w], new_elevs, new_nb)

    rec(d1, _initial_strands(profile), [], [], 0)
    return [from_canonical_form(k) for k in sorted(found)]


def _build_diagram(delta: int, floors: list[int], elevs: list[tuple]) -> FloorDiagram:
    """Elevators given as (tail label, head label, weight, bottom id, top id).

    Floor labels start at 1; 0 stands for the boundary.
    """
    out = []
    for tail, head, w, bid, tid in elevs:
        t = None if tail == 0 else tail - 1
        h = None if head == 0 else head - 1
        if t is None and h is None:
            if bid >= 0:
                out.append(Elevator(None, None, w, True, fiber_label("bottom", bid)))
            elif tid >= 0:
                out.append(Elevator(None, None, w, True, fiber_label("top", tid)))
            else:
                out.append(Elevator(None, None, w))
        elif t is None:
            out.append(Elevator(None, h, w, bid >= 0, bid if bid >= 0 else None))
        elif h is None:
            out.append(Elevator(t, None, w, tid >= 0, tid if tid >= 0 else None))
        else:
            out.append(Elevator(t, h, w))
    return FloorDiagram(delta, tuple(floors), tuple(out))


# --------------------------------------------------------------------------
# Enumeration of marked floor diagrams (sweep over the labels 1..n)
# --------------------------------------------------------------------------


class _Components:
    """Union-find over floor labels, tracking unmarked free ends per piece."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.free: dict[int, int] = {}

    def copy(self) -> "_Components":
        c = _Components()
        c.parent = dict(self.parent)
        c.free = dict(self.free)
        return c

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def add(self, x: int, free: int, join: Iterable[int]) -> int:
        self.parent[x] = x
        total = free
        for y in set(self.find(t) for t in join):
            if y == x:
                continue
            total += self.free.pop(y)
            self.parent[y] = x
        self.free[x] = total
        return total


def enumerate_marked_diagrams(
    delta: int,
    d1: int,
    d2: int,
    g: int,
    profile: TangencyProfile | None = None,
    connected: bool = True,
) -> Iterator[MarkedDiagram]:
    """Every marked floor diagram up to isomorphism, each exactly once.

    Labels 1..n are processed in increasing order.  Label l either becomes a
    new floor (which absorbs some open strands and emits new ones) or marks an
    open strand.  Because every floor carries its own label, the sequence of
    such moves determines the marked diagram up to isomorphism and vice versa;
    identical strands are grouped, so no class is produced twice.
    """
    if profile is None:
        profile = TangencyProfile.absolute(delta, d1, d2)
    _check_inputs(delta, d1, d2, g, profile)
    n = profile.n_marks(g)
    if n < 0:
        return
    allow_fibers = not connected or d1 == 0
    top_count = profile.muInf.length + profile.nuInf.length

    def rec(l: int, left: int, strands: Counter, floors: list[int], elevs: list[tuple], nb: int, comps: _Components):
        if _genus_lower_bound(strands, nb, top_count, allow_fibers) > g:
            return
        if l > n:
            if left == 0:
                yield from _finish_marked(delta, g, profile, connected, strands, floors, elevs, nb, comps)
            return
        if left == 0 and all(s[2] or s[3] >= 0 for s in strands):
            return
        # label l marks an open strand
        for s in sorted(strands):
            if s[2] or s[3] >= 0:
                continue
            nxt = strands.copy()
            nxt[s] -= 1
            if not nxt[s]:
                del nxt[s]
            nxt[(s[0], s[1], l, -1)] += 1
            yield from rec(l + 1, left, nxt, floors, elevs, nb, comps)
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
                join = [s[1] for s in absorbed if s[1] > 0 and s[2] == 0]
                new_comps = comps.copy()
                if new_comps.add(l, free, join) > 1:
                    continue
                rest = strands - absorbed
                new_elevs = elevs + [(s[1], l, s[0], s[3], -1, s[2]) for s in sorted(absorbed.elements())]
                new_nb = nb + sum(c for s, c in absorbed.items() if s[1] > 0)
                for part in partitions_of(out):
                    nxt = rest.copy()
                    for p in part.parts():
                        nxt[(p, l, 0, -1)] += 1
                    yield from rec(l + 1, left - w, nxt, floors + [(l, w)], new_elevs, new_nb, new_comps)

    yield from rec(1, d1, _initial_strands(profile), [], [], 0, _Components())


def _finish_marked(delta, g, profile, connected, strands, floors, elevs, nb, comps):
    for assignment in _top_assignments(strands, profile.muInf, profile.nuInf):
        out = list(elevs)
        fibers = 0
        ok = True
        extra = Counter()
        for (w, tail, mark, bid), tid in assignment:
            if tail == 0:
                fibers += 1
                free_ends = (bid < 0) + (tid < 0)
                if free_ends == 2 and not mark:
                    ok = False
                    break
            elif tid < 0 and not mark:
                extra[comps.find(tail)] += 1
            out.append((tail, 0, w, bid, tid, mark))
        if not ok or 1 + nb - fibers != g:
            continue
        if any(comps.free[r] + extra[r] != 1 for r in comps.free):
            continue
        M = _build_marked(delta, floors, out)
        if connected and not M.diagram.is_connected():
            continue
        yield M


def _build_marked(delta: int, floors: list[tuple[int, int]], elevs: list[tuple]) -> MarkedDiagram:
    index = {label: i for i, (label, _) in enumerate(floors)}
    weights = [w for _, w in floors]
    raw = []
    for tail, head, w, bid, tid, mark in elevs:
        raw.append((index[tail] + 1 if tail else 0, index[head] + 1 if head else 0, w, bid, tid))
    D = _build_diagram(delta, weights, raw)
    marks: dict[int, Mark] = {label: ("floor", index[label]) for label, _ in floors}
    for j, e in enumerate(elevs):
        if e[5]:
            marks[e[5]] = ("elevator", j)
    return MarkedDiagram(D, tuple(marks[l] for l in sorted(marks)))


def marked_canonical_form(M: MarkedDiagram) -> tuple:
    """Encoding that is equal exactly for isomorphic marked diagrams."""
    D = M.diagram
    floor_label = {}
    elev_label = {}
    for l, (kind, i) in enumerate(M.marks, start=1):
        (floor_label if kind == "floor" else elev_label)[i] = l
    perm = [floor_label[i] for i in range(len(D.floors))]
    floors = tuple(sorted((floor_label[i], w) for i, w in enumerate(D.floors)))
    elevs = tuple(sorted(_elevator_key(e, perm) + (elev_label.get(j, 0),) for j, e in enumerate(D.elevators)))
    return (D.delta, floors, elevs)


# --------------------------------------------------------------------------
# Markings of a given diagram
# --------------------------------------------------------------------------


def _linear_extensions(items: list, before: dict) -> Iterator[list]:
    """All orderings of ``items`` compatible with ``before[x]`` (set of predecessors)."""
    placed: list = []
    done: set = set()

    def rec():
        if len(placed) == len(items):
            yield list(placed)
            return
        for x in items:
            if x in done or not before[x] <= done:
                continue
            done.add(x)
            placed.append(x)
            yield from rec()
            placed.pop()
            done.discard(x)

    yield from rec()


def labeled_markings(D: FloorDiagram, profile: TangencyProfile | None = None) -> Iterator[MarkedDiagram]:
    """All markings of ``D`` as labeled increasing injections (no quotient)."""
    if profile is None:
        profile = D.profile()
    n = profile.n_marks(D.genus)
    k = n - len(D.floors)
    if k < 0:
        return
    candidates = [j for j, e in enumerate(D.elevators) if not e.fixed]
    for chosen in itertools.combinations(candidates, k):
        marked = set(chosen)
        if _component_violations(D, marked):
            continue
        items = [("floor", i) for i in range(len(D.floors))] + [("elevator", j) for j in chosen]
        before = {x: set() for x in items}
        for j, e in enumerate(D.elevators):
            if e.is_bounded:
                before[("floor", e.head)].add(("floor", e.tail))
            if j in marked:
                if e.tail is not None:
                    before[("elevator", j)].add(("floor", e.tail))
                if e.head is not None:
                    before[("floor", e.head)].add(("elevator", j))
        for order in _linear_extensions(items, before):
            yield MarkedDiagram(D, tuple(order))


def has_marking(D: FloorDiagram, profile: TangencyProfile | None = None) -> bool:
    """Whether ``D`` admits at least one marking."""
    if profile is None:
        profile = D.profile()
    k = profile.n_marks(D.genus) - len(D.floors)
    if k < 0:
        return False
    candidates = [j for j, e in enumerate(D.elevators) if not e.fixed]
    return any(not _component_violations(D, set(c)) for c in itertools.combinations(candidates, k))


def enumerate_markings(D: FloorDiagram, profile: TangencyProfile | None = None) -> list[MarkedDiagram]:
    """One representative per isomorphism class of markings of ``D``."""
    reps: dict = {}
    for M in labeled_markings(D, profile):
        reps.setdefault(marked_canonical_form(M), M)
    return [reps[k] for k in sorted(reps)]


def underlying_key(M: MarkedDiagram) -> tuple:
    return canonical_form(M.diagram)
