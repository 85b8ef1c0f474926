"""Caporaso-Harris type recursion for disconnected relative invariants.

The lowest of the n point conditions is pushed far down.  It lands either

(i)   on a free bottom elevator of weight k, which then becomes fixed:
      coefficient k (refined: [k]_q);
(ii)  on a floor of weight s that swallows exactly one free bottom end k
      (the unique unmarked end of its component), some fixed ends
      mu0 - mu0', and emits a partition E of new free bottom ends;
(iii) on a floor that swallows only fixed ends mu0 - mu0', emits E and one
      more elevator k towards the free end of its component, which is fixed
      in the smaller problem.

Removing the floor leaves a problem with d1 - s and one point less.  The
recursion stops at d1 = 0 or n = 0, where the floor-diagram enumerator is
used directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .arith import (
    Partition,
    QLaurent,
    QRational,
    normalize_scalar,
    partition_binomial,
    partition_weight_product,
    partitions_of,
    qint,
    qint_weight_product,
)
from .diagrams import TangencyProfile
from .invariants import Problem, relative_invariant
from .multiplicities import floor_mult_classical, floor_mult_refined

_memo: dict = {}


def clear_cache() -> None:
    _memo.clear()


def _key(problem: Problem) -> Problem:
    if problem.connected:
        problem = problem.with_(connected=False)
    return problem


def _zero(refined: bool):
    return QRational(QLaurent.const(0)) if refined else Fraction(0)


def recursion_terms(problem: Problem) -> list[tuple[Any, Problem, str]]:
    """The (coefficient, subproblem, sum label) list of one recursion step.

    Empty for base cases.
    """
    p = problem.profile
    delta, d1, d2, g = problem.delta, problem.d1, problem.d2, problem.g
    refined = problem.refined
    if d1 == 0 or problem.n_marks <= 0:
        return []
    out: list = []

    def sub(s, profile, g2):
        return Problem(delta, d1 - s, d2, g2, profile, refined, False)

    # (i) the point sits on a free bottom elevator
    for k in p.nu0:
        prof = TangencyProfile(p.mu0.add_part(k), p.nu0.remove_part(k), p.muInf, p.nuInf)
        coef = QRational(qint(k)) if refined else Fraction(k)
        out.append((coef, Problem(delta, d1, d2, g, prof, refined, False), "i"))

    for s in range(1, d1 + 1):
        for kept in p.mu0.sub_multisets():
            absorbed_fixed = p.mu0 - kept
            fixed_w = absorbed_fixed.size
            bfix = partition_binomial(p.mu0, kept)
            # (ii) one free end k arrives on the floor
            for k in p.nu0:
                emit = k + fixed_w - delta * s
                if emit < 0:
                    continue
                rest = p.nu0.remove_part(k)
                for E in partitions_of(emit):
                    nu0p = rest + E
                    g2 = g - E.length
                    prof = TangencyProfile(kept, nu0p, p.muInf, p.nuInf)
                    if prof.n_marks(g2) < 0:
                        continue
                    val = 1 + absorbed_fixed.length + E.length
                    comb = bfix * partition_binomial(nu0p, rest)
                    if refined:
                        fl = floor_mult_refined(s, [k] + absorbed_fixed.parts() + E.parts())
                        coef = QRational(fl * qint(k) * k * qint_weight_product(E) * comb)
                    else:
                        coef = Fraction(comb * floor_mult_classical(s, val) * k * k * partition_weight_product(E))
                    out.append((coef, sub(s, prof, g2), "ii"))
            # (iii) no free end below; the elevator k leads to the free end
            total = fixed_w - delta * s
            for k in range(1, total + 1):
                for E in partitions_of(total - k):
                    nu0p = p.nu0 + E
                    g2 = g - E.length - 1
                    prof = TangencyProfile(kept.add_part(k), nu0p, p.muInf, p.nuInf)
                    if prof.n_marks(g2) < 0:
                        continue
                    val = 1 + absorbed_fixed.length + E.length
                    comb = bfix * partition_binomial(nu0p, p.nu0)
                    if refined:
                        fl = floor_mult_refined(s, [k] + absorbed_fixed.parts() + E.parts())
                        coef = QRational(fl * qint(k) * qint(k) * k * qint_weight_product(E) * comb)
                    else:
                        coef = Fraction(comb * floor_mult_classical(s, val) * k ** 3 * partition_weight_product(E))
                    out.append((coef, sub(s, prof, g2), "iii"))
    return out


def caporaso_harris(problem: Problem):
    """N^bullet (or BG^bullet when refined) through the recursion."""
    problem = _key(problem)
    if problem.key in _memo:
        return _memo[problem.key]
    terms = recursion_terms(problem)
    if not terms:
        value = relative_invariant(problem).value
    else:
        total = _zero(problem.refined)
        for coef, sub, _ in terms:
            v = caporaso_harris(sub)
            if v:
                total = total + coef * v
        value = normalize_scalar(total, problem.refined)
    _memo[problem.key] = value
    return value


@dataclass
class CHNode:
    problem: Problem
    value: Any
    label: str = "base"
    children: list[tuple[Any, "CHNode"]] = field(default_factory=list)

    def resum(self):
        if not self.children:
            return self.value
        total = _zero(self.problem.refined)
        for coef, child in self.children:
            total = total + coef * child.resum()
        return normalize_scalar(total, self.problem.refined)

    def size(self) -> int:
        return 1 + sum(c.size() for _, c in self.children)

    def to_json(self) -> dict:
        from .arith import scalar_to_json
        return {
            "problem": self.problem.to_json(),
            "value": scalar_to_json(self.value),
            "sum": self.label,
            "children": [{"coefficient": scalar_to_json(normalize_scalar(c, self.problem.refined)),
                          "node": n.to_json()} for c, n in self.children],
        }


def ch_trace(problem: Problem, label: str = "root") -> CHNode:
    """Expansion tree of the recursion; leaves hold enumerator values."""
    problem = _key(problem)
    terms = recursion_terms(problem)
    node = CHNode(problem, caporaso_harris(problem), label if terms else "base")
    for coef, sub, which in terms:
        if caporaso_harris(sub):
            node.children.append((coef, ch_trace(sub, which)))
    return node
