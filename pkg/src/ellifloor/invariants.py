"""Invariants N, N^bullet (classical) and BG, BG^bullet (refined) from marked floor diagrams."""
from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .arith import (
    Partition,
    QLaurent,
    QRational,
    normalize_scalar,
    scalar_to_json,
)
from .diagrams import (
    ProfileError,
    TangencyProfile,
    canonical_form,
    enumerate_marked_diagrams,
)
from .multiplicities import diagram_mult
from .sweep import sweep_sum


@dataclass(frozen=True)
class Problem:
    delta: int
    d1: int
    d2: int
    g: int
    profile: TangencyProfile = field(default=None)
    refined: bool = False
    connected: bool = True

    def __post_init__(self):
        if min(self.delta, self.d1, self.d2) < 0:
            raise ProfileError("delta, d1 and d2 must be non-negative")
        if self.profile is None:
            object.__setattr__(self, "profile", TangencyProfile.absolute(self.delta, self.d1, self.d2))
        self.profile.check(self.delta, self.d1, self.d2)

    @property
    def n_marks(self) -> int:
        return self.profile.n_marks(self.g)

    @property
    def key(self) -> tuple:
        return (self.delta, self.d1, self.d2, self.g, self.profile.key, self.refined, self.connected)

    def with_(self, **kw) -> "Problem":
        data = dict(delta=self.delta, d1=self.d1, d2=self.d2, g=self.g, profile=self.profile,
                    refined=self.refined, connected=self.connected)
        data.update(kw)
        return Problem(**data)

    def to_json(self) -> dict:
        return {
            "delta": self.delta, "d1": self.d1, "d2": self.d2, "g": self.g,
            "profile": self.profile.to_json(),
            "refined": self.refined, "connected": self.connected,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Problem":
        return cls(
            int(obj["delta"]), int(obj["d1"]), int(obj["d2"]), int(obj["g"]),
            TangencyProfile.from_json(obj["profile"]) if "profile" in obj else None,
            bool(obj.get("refined", False)), bool(obj.get("connected", True)),
        )


@dataclass(frozen=True)
class InvariantValue:
    problem: Problem
    value: object  # int / Fraction, or QLaurent / QRational when refined
    diagrams: int
    markings: int

    @property
    def classical(self):
        return None if self.problem.refined else self.value

    @property
    def refined(self):
        return self.value if self.problem.refined else None

    def to_json(self) -> dict:
        return {
            "problem": self.problem.to_json(),
            "classical": None if self.problem.refined else scalar_to_json(self.value),
            "refined": scalar_to_json(self.value) if self.problem.refined else None,
            "diagrams": self.diagrams,
            "markings": self.markings,
        }


# --------------------------------------------------------------------------
# caching
# --------------------------------------------------------------------------

_memo: dict = {}
_memo_lock = threading.Lock()


def clear_cache() -> None:
    with _memo_lock:
        _memo.clear()


def _disk_path(problem: Problem) -> Path | None:
    root = os.environ.get("ELLIFLOOR_CACHE_DIR")
    if not root:
        return None
    blob = json.dumps(problem.to_json(), sort_keys=True).encode()
    return Path(root) / (hashlib.sha256(blob).hexdigest() + ".json")


def _scalar_from_json(obj, refined: bool):
    if not refined:
        return normalize_scalar(Fraction(obj), False)
    if "num" in obj:
        num = QLaurent.from_json(obj["num"])
        den = {int(k): int(v) for k, v in obj.get("den", {}).items()}
        return normalize_scalar(QRational(num, den), True)
    return QLaurent.from_json(obj)


def _disk_load(problem: Problem) -> InvariantValue | None:
    path = _disk_path(problem)
    if path is None or not path.exists():
        return None
    row = json.loads(path.read_text())
    raw = row["refined"] if problem.refined else row["classical"]
    return InvariantValue(problem, _scalar_from_json(raw, problem.refined), row["diagrams"], row["markings"])


def _disk_store(value: InvariantValue) -> None:
    path = _disk_path(value.problem)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(value.to_json(), sort_keys=True))
    os.replace(tmp, path)


# --------------------------------------------------------------------------
# invariants
# --------------------------------------------------------------------------


def relative_invariant(problem: Problem) -> InvariantValue:
    """Sum of multiplicities over isomorphism classes of marked floor diagrams.

    A refined request computes the classical count alongside and caches both;
    a classical request skips the q-arithmetic.
    """
    with _memo_lock:
        hit = _memo.get(problem.key)
    if hit is not None:
        return hit
    hit = _disk_load(problem)
    if hit is None:
        pair = _compute_both(problem.with_(refined=False), problem.refined)
        for v in pair:
            _disk_store(v)
            with _memo_lock:
                _memo.setdefault(v.problem.key, v)
        hit = pair[-1] if problem.refined else pair[0]
    with _memo_lock:
        _memo.setdefault(problem.key, hit)
    return hit


def _compute(problem: Problem) -> InvariantValue:
    pair = _compute_both(problem.with_(refined=False), problem.refined)
    return pair[-1] if problem.refined else pair[0]


def _compute_both(problem: Problem, with_refined: bool = True) -> tuple[InvariantValue, ...]:
    count, classical, refined_by_den = 0, Fraction(0), {}
    if problem.n_marks >= 0:
        count, classical, refined_by_den = sweep_sum(problem, with_refined)
    refined = QRational(QLaurent.const(0))
    for key, num in refined_by_den.items():
        refined = refined + QRational(num, dict(key))
    shapes = marked_shape_count(problem) if count else 0
    if not with_refined:
        return (InvariantValue(problem, normalize_scalar(classical, False), shapes, count),)
    return (
        InvariantValue(problem, normalize_scalar(classical, False), shapes, count),
        InvariantValue(problem.with_(refined=True), normalize_scalar(refined, True), shapes, count),
    )


def enumerated_sum(problem: Problem) -> tuple[int, Fraction, dict]:
    """(markings, classical sum, refined sum by denominator) by listing every marked diagram.

    Slow reference for :func:`sweep_sum`.
    """
    classical = Fraction(0)
    refined_by_den: dict = {}
    count = 0
    for M in enumerate_marked_diagrams(problem.delta, problem.d1, problem.d2, problem.g,
                                       problem.profile, problem.connected):
        classical += diagram_mult(M, False)
        r = QRational.lift(diagram_mult(M, True))
        key = tuple(sorted(r.den.items()))
        refined_by_den[key] = refined_by_den.get(key, QLaurent.const(0)) + r.num
        count += 1
    return count, classical, {k: v for k, v in refined_by_den.items() if v}


def marked_shape_count(problem: Problem) -> int:
    """Number of floor diagrams of the problem that carry at least one marking."""
    from .diagrams import enumerate_diagrams, has_marking
    return sum(1 for D in enumerate_diagrams(problem.delta, problem.d1, problem.d2, problem.g,
                                             problem.profile, problem.connected)
               if has_marking(D, problem.profile))


def absolute_invariant(delta: int, d1: int, d2: int, g: int, refined: bool = False,
                       connected: bool = True) -> InvariantValue:
    """Invariant through generic points: every end is free with weight 1."""
    return relative_invariant(Problem(delta, d1, d2, g, None, refined, connected))


def invariant_value(problem: Problem):
    return relative_invariant(problem).value


def free_profiles(total: int, max_part: int) -> Iterable[Partition]:
    from .arith import partitions_of
    return partitions_of(total, max_part)


def invariant_table(
    deltas: Iterable[int],
    d1s: Iterable[int],
    d2s: Iterable[int],
    gs: Iterable[int],
    refined: bool = False,
    connected: bool = True,
    max_part: int = 1,
    jobs: int = 1,
) -> list[InvariantValue]:
    """Batch evaluation over free profiles with parts <= max_part, sorted by problem."""
    problems = []
    for delta in deltas:
        for d1 in d1s:
            for d2 in d2s:
                for nu0 in free_profiles(delta * d1 + d2, max_part):
                    for nuinf in free_profiles(d2, max_part):
                        prof = TangencyProfile(Partition(), nu0, Partition(), nuinf)
                        for g in gs:
                            if prof.n_marks(g) < 0:
                                continue
                            problems.append(Problem(delta, d1, d2, g, prof, refined, connected))
    problems = sorted(set(problems), key=lambda p: _sort_key(p))
    if jobs > 1 and len(problems) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(relative_invariant, problems))
    return [relative_invariant(p) for p in problems]


def _sort_key(p: Problem) -> tuple:
    return (p.delta, p.d1, p.d2, p.g, p.profile.key, p.refined, p.connected)
