"""Heisenberg algebra acting on the bosonic Fock space of double partitions.

Generators are pairs ``(family, n)`` with family ``"a"`` or ``"b"`` and
``n != 0``; negative ``n`` creates, positive ``n`` annihilates, and the only
nonzero commutators are ``[a_n, b_{-n}] = n`` (``[n]_q`` when deformed) and
the ones forced by antisymmetry.

States use the normalized basis ``|mu, nu> = a_{-mu} b_{-nu} v`` where
``a_{-mu} = prod (a_{-i})^{mu_i} / mu_i!`` and likewise for ``b``.  In that
basis each generator acts with no hidden multiplicity:

    a_{-k} |mu,nu> = (mu_k + 1) |mu + e_k, nu>
    a_k    |mu,nu> = k |mu, nu - e_k>          (contracts a b_{-k})
    b_k    |mu,nu> = k |mu - e_k, nu>          (contracts an a_{-k})

Invariants are read with the free ends as the ``a`` (thin) family and the
fixed ends as the ``b`` (thick) family: the ket for a bottom profile
(mu0, nu0) is the basis vector |nu0, mu0>.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Sequence

from .arith import (
    Partition,
    QLaurent,
    QRational,
    divisors,
    normalize_scalar,
    partition_factorial,
    partition_weight_product,
    partitions_of,
    qint,
    qint_ratio,
    qint_weight_product,
    sigma,
)

Generator = tuple[str, int]


class FockInputError(ValueError):
    pass


def _weight(k: int, refined: bool):
    return qint(k) if refined else k


def _zero(refined: bool):
    return QLaurent.const(0) if refined else Fraction(0)


def _one(refined: bool):
    return QLaurent.const(1) if refined else Fraction(1)


# --------------------------------------------------------------------------
# states
# --------------------------------------------------------------------------


class FockState:
    """Finite linear combination of normalized basis vectors |mu, nu>."""

    __slots__ = ("terms", "refined")

    def __init__(self, terms: Mapping[tuple[Partition, Partition], object] | None = None, refined: bool = False):
        self.refined = refined
        self.terms: dict[tuple[Partition, Partition], object] = {}
        for key, c in (terms or {}).items():
            if c:
                self.terms[key] = c

    @classmethod
    def vacuum(cls, refined: bool = False) -> "FockState":
        return cls.basis(Partition(), Partition(), refined)

    @classmethod
    def basis(cls, mu: Partition, nu: Partition, refined: bool = False) -> "FockState":
        return cls({(mu, nu): _one(refined)}, refined)

    def coefficient(self, mu: Partition, nu: Partition):
        return self.terms.get((mu, nu), _zero(self.refined))

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {mu.size + nu.size for mu, nu in self.terms}

    def __add__(self, other: "FockState") -> "FockState":
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return FockState(out, self.refined or other.refined)

    def scale(self, c) -> "FockState":
        return FockState({k: v * c for k, v in self.terms.items()}, self.refined)

    def __eq__(self, other) -> bool:
        return isinstance(other, FockState) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"({c})|{mu},{nu}>" for (mu, nu), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0].key, kv[0][1].key))]
        return " + ".join(parts)


def _add_into(out: dict, key, c) -> None:
    s = out.get(key)
    s = c if s is None else s + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def apply_generator(state: FockState, gen: Generator, refined: bool | None = None) -> FockState:
    """Act with one generator ``a_n`` or ``b_n`` on ``state``."""
    family, n = gen
    refined = state.refined if refined is None else refined
    if family not in ("a", "b"):
        raise FockInputError(f"unknown generator family {family!r}")
    if n == 0:
        return FockState({}, refined)
    out: dict = {}
    k = abs(n)
    for (mu, nu), c in state.terms.items():
        if n < 0:
            if family == "a":
                _add_into(out, (mu.add_part(k), nu), c * (mu.get(k) + 1))
            else:
                _add_into(out, (mu, nu.add_part(k)), c * (nu.get(k) + 1))
        else:
            if family == "a":
                if nu.get(k):
                    _add_into(out, (mu, nu.remove_part(k)), c * _weight(k, refined))
            else:
                if mu.get(k):
                    _add_into(out, (mu.remove_part(k), nu), c * _weight(k, refined))
    return FockState(out, refined)


def apply_word(state: FockState, word: Sequence[Generator]) -> FockState:
    """Apply a product of generators (rightmost first)."""
    for gen in reversed(word):
        state = apply_generator(state, gen)
        if state.is_zero():
            break
    return state


# --------------------------------------------------------------------------
# vacuum expectations
# --------------------------------------------------------------------------


def _flatten(P) -> list[Generator]:
    word: list[Generator] = []
    for item in P:
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            word.append((item[0], int(item[1])))
        else:
            word.extend(_flatten(item))
    for fam, n in word:
        if fam not in ("a", "b"):
            raise FockInputError(f"unknown generator family {fam!r}")
    return word


def expectation_sequential(word: Sequence[Generator], refined: bool = False):
    """<v| word |v> by letting the generators act one by one on the vacuum."""
    if any(n == 0 for _, n in word):
        return _zero(refined)
    state = apply_word(FockState.vacuum(refined), word)
    return state.coefficient(Partition(), Partition())


def feynman_pairings(word: Sequence[Generator]) -> Iterator[list[tuple[int, int]]]:
    """Complete pairings of an annihilator with an opposite-family creator of the same weight to its right."""
    n = len(word)
    if any(k == 0 for _, k in word):
        return
    used = [False] * n

    def rec(acc):
        i = next((j for j in range(n) if not used[j]), None)
        if i is None:
            yield list(acc)
            return
        fam, k = word[i]
        if k < 0:
            return  # a creator with nothing on its left left to absorb it
        used[i] = True
        for j in range(i + 1, n):
            if used[j]:
                continue
            fam2, k2 = word[j]
            if k2 == -k and fam2 != fam:
                used[j] = True
                acc.append((i, j))
                yield from rec(acc)
                acc.pop()
                used[j] = False
        used[i] = False

    yield from rec([])


def expectation_wick(word: Sequence[Generator], refined: bool = False):
    """<v| word |v> as a weighted sum over Feynman pairings."""
    # pairings with the same multiset of edge weights share their weight
    tally: dict[tuple[int, ...], int] = {}
    for pairing in feynman_pairings(word):
        key = tuple(sorted(word[i][1] for i, _ in pairing))
        tally[key] = tally.get(key, 0) + 1
    total = _zero(refined)
    for key, count in tally.items():
        total = total + _edge_weight(key, refined) * count
    return total


_EDGE_WEIGHTS: dict = {}


def _edge_weight(ks: tuple[int, ...], refined: bool):
    try:
        return _EDGE_WEIGHTS[ks, refined]
    except KeyError:
        w = _one(refined)
        for k in ks:
            w = w * _weight(k, refined)
        _EDGE_WEIGHTS[ks, refined] = w
        return w


def _check_shape(P) -> None:
    """Inside each monomial (a nested list) creators stand left of annihilators."""
    for item in P:
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            continue
        mono = _flatten(item)
        seen_annihilator = False
        for _, n in mono:
            if n > 0:
                seen_annihilator = True
            elif seen_annihilator:
                raise FockInputError(f"monomial {mono} has a creator right of an annihilator")


def vacuum_expectation(P, refined: bool = False, check: bool = True):
    """Vacuum expectation of a product; the pairing sum is authoritative.

    ``P`` is a list of generators or of monomials (lists of generators);
    each monomial must be normally ordered, creators first.
    With ``check`` the result is also computed by sequential action and the
    two must agree.
    """
    _check_shape(P)
    word = _flatten(P)
    value = expectation_wick(word, refined)
    if check:
        other = expectation_sequential(word, refined)
        if other != value:
            raise AssertionError(f"Wick sum {value} differs from normal ordering {other}")
    return value


@dataclass
class WickReport:
    max_length: int
    max_index: int
    refined: bool
    checked: int
    nonzero: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _generators(max_index: int) -> list[Generator]:
    return [(f, s * k) for f in ("a", "b") for k in range(1, max_index + 1) for s in (-1, 1)]


def _vacuum_coefficient_after(state: FockState, gen: Generator, refined: bool):
    """Vacuum coefficient of ``gen`` applied to ``state``, without the rest."""
    family, n = gen
    if n <= 0:
        return _zero(refined)
    one_part = Partition.single(n)
    key = (Partition(), one_part) if family == "a" else (one_part, Partition())
    c = state.terms.get(key)
    return _zero(refined) if c is None else c * _weight(n, refined)


def _perfect_matchings(positions: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
    if not positions:
        yield []
        return
    i, rest = positions[0], positions[1:]
    for t, j in enumerate(rest):
        for m in _perfect_matchings(rest[:t] + rest[t + 1:]):
            yield [(i, j)] + m


def feynman_table(length: int, max_index: int, refined: bool = False) -> dict[tuple[Generator, ...], object]:
    """Pairing sums of all words of the given length at once.

    Every Feynman graph on ``length`` slots is a perfect matching whose left
    end of each edge carries an annihilator a_k (or b_k) and whose right end
    carries the partner b_{-k} (or a_{-k}).  Summing edge weights per word
    gives the Wick value of every word with a nonempty pairing set.
    """
    table: dict[tuple[Generator, ...], object] = {}
    if length % 2:
        return table
    edge_types = [(f, k) for f in ("a", "b") for k in range(1, max_index + 1)]
    for matching in _perfect_matchings(tuple(range(length))):
        for types in itertools.product(edge_types, repeat=len(matching)):
            word: list = [None] * length
            for (i, j), (f, k) in zip(matching, types):
                word[i] = (f, k)
                word[j] = ("b" if f == "a" else "a", -k)
            key = tuple(word)
            w = _edge_weight(tuple(sorted(k for _, k in types)), refined)
            table[key] = table[key] + w if key in table else w
    return table


def wick_agreement(max_length: int = 8, max_index: int = 3, refined: bool = False,
                   balanced_only: bool = True) -> WickReport:
    """Compare sequential action with the pairing sum on every word.

    A word is balanced when each a_k is matched in number by b_{-k} and each
    b_k by a_{-k}.  Only balanced words can reach the vacuum, so by default
    only those are listed; ``balanced_only=False`` walks every word.  Words
    grow from the right and the state after a common suffix is shared.  The
    pairing side comes from :func:`feynman_table`, which enumerates the
    graphs directly, so both sides are computed independently.
    """
    gens = _generators(max_index)
    slot = {}
    for f, n in gens:
        k = abs(n)
        if (f == "a") == (n > 0):
            slot[f, n] = (k - 1, 1 if n > 0 else -1)
        else:
            slot[f, n] = (max_index + k - 1, 1 if n > 0 else -1)
    tables = {L: feynman_table(L, max_index, refined) for L in range(1, max_length + 1)}
    zero = _zero(refined)
    vac = (Partition(), Partition())
    mismatches: list = []
    counts = [0, 0]
    seen = [0]

    def compare(word_rev: list, seq) -> None:
        word = tuple(word_rev[::-1])
        counts[0] += 1
        wick = tables[len(word)].get(word, zero)
        if wick:
            counts[1] += 1
            seen[0] += 1
        if seq != wick:
            mismatches.append((list(word), seq, wick))

    def visit(word_rev: list, state: FockState, imb: list, total: int) -> None:
        left = max_length - len(word_rev)
        for g in gens:
            i, d = slot[g]
            before = imb[i]
            imb[i] = before + d
            t2 = total - abs(before) + abs(before + d)
            if not balanced_only or t2 <= left - 1:
                word_rev.append(g)
                if left == 1 and balanced_only:
                    # last letter of a balanced word: only the vacuum coefficient matters
                    compare(word_rev, _vacuum_coefficient_after(state, g, refined))
                else:
                    nxt = state if state.is_zero() else apply_generator(state, g)
                    if not balanced_only or t2 == 0:
                        compare(word_rev, nxt.coefficient(*vac))
                    if left > 1:
                        visit(word_rev, nxt, imb, t2)
                word_rev.pop()
            imb[i] = before

    visit([], FockState.vacuum(refined), [0] * (2 * max_index), 0)
    # every word with a Feynman graph must have been visited
    missing = sum(len(t) for t in tables.values()) - seen[0]
    if missing:
        mismatches.append(("unvisited words with pairings", missing, None))
    return WickReport(max_length, max_index, refined, counts[0], counts[1], mismatches)


def scalar_product(left: tuple[Partition, Partition], right: tuple[Partition, Partition], refined: bool = False):
    """<mu,nu|mu',nu'> computed from the generators (``a_n`` adjoint to ``a_{-n}``)."""
    mu, nu = left
    mu2, nu2 = right
    bra = [("b", k) for k in nu.parts()] + [("a", k) for k in mu.parts()]
    ket = [("a", -k) for k in mu2.parts()] + [("b", -k) for k in nu2.parts()]
    norm = partition_factorial(mu) * partition_factorial(nu) * partition_factorial(mu2) * partition_factorial(nu2)
    value = vacuum_expectation(bra + ket, refined)
    return value * Fraction(1, norm)


# --------------------------------------------------------------------------
# the operator H_delta(t)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HTerm:
    """One monomial of H_delta(t).

    kind "marked": b_{-k} b_k.
    kind "A":      a_{-mu} a_nu b_k     with |mu| + s*delta = |nu| + k.
    kind "B":      b_{-k} a_{-mu} a_nu  with |mu| + s*delta + k = |nu|.
    """

    kind: str
    s: int
    k: int
    mu: Partition
    nu: Partition

    def degree_shift(self) -> int:
        create = self.mu.size + (self.k if self.kind in ("B", "marked") else 0)
        annihilate = self.nu.size + (self.k if self.kind in ("A", "marked") else 0)
        return create - annihilate

    def word(self) -> list[Generator]:
        """Unnormalized generator word (without the 1/mu! nu! factors)."""
        cr = [("a", -i) for i in self.mu.parts()]
        an = [("a", i) for i in self.nu.parts()]
        if self.kind == "marked":
            return [("b", -self.k), ("b", self.k)]
        if self.kind == "A":
            return cr + an + [("b", self.k)]
        return [("b", -self.k)] + cr + an


def floor_coefficient(s: int, k: int, mu: Partition, nu: Partition, refined: bool):
    """Coefficient of a floor monomial of weight s with special elevator k."""
    if not refined:
        return Fraction(s ** (mu.length + nu.length) * sigma(1, s) * k * k)
    total = QLaurent.const(0)
    for l in divisors(s):
        d = s // l
        term = QLaurent.const(d ** (mu.length + nu.length)) * qint_ratio(l * k, k)
        for i, c in (mu + nu).items():
            term = term * qint_ratio(l * i, i) ** c
        total = total + term
    return total * qint(k) * k


def term_coefficient(term: HTerm, refined: bool):
    if term.kind == "marked":
        return _one(refined)
    return floor_coefficient(term.s, term.k, term.mu, term.nu, refined)


def build_h(delta: int, t_max: int, energy_cap: int, refined: bool = False) -> dict[int, list[tuple[object, HTerm]]]:
    """All monomials of H_delta(t) with s <= t_max and every index bounded by energy_cap."""
    if t_max < 0 or energy_cap < 1:
        raise FockInputError("need t_max >= 0 and energy_cap >= 1")
    out: dict[int, list] = {0: []}
    for k in range(1, energy_cap + 1):
        t = HTerm("marked", 0, k, Partition(), Partition())
        out[0].append((term_coefficient(t, refined), t))
    for s in range(1, t_max + 1):
        terms = []
        for k in range(1, energy_cap + 1):
            for nsize in range(0, energy_cap + 1):
                for nu in partitions_of(nsize):
                    msize = nsize + k - s * delta
                    if 0 <= msize <= energy_cap:
                        for mu in partitions_of(msize):
                            t = HTerm("A", s, k, mu, nu)
                            terms.append((term_coefficient(t, refined), t))
                    msize = nsize - k - s * delta
                    if 0 <= msize <= energy_cap:
                        for mu in partitions_of(msize):
                            t = HTerm("B", s, k, mu, nu)
                            terms.append((term_coefficient(t, refined), t))
        out[s] = terms
    return out


def _annihilate_a(nu_state: Partition, nu: Partition, refined: bool):
    """a_nu (normalized) on the b-part ``nu_state``: returns (factor, remainder) or None."""
    if not nu_state.contains(nu):
        return None
    factor = Fraction(1, partition_factorial(nu))
    w = qint_weight_product(nu) if refined else partition_weight_product(nu)
    return factor * w, nu_state - nu


def _create_a(mu_state: Partition, mu: Partition) -> tuple[int, Partition]:
    """a_{-mu} (normalized): factor prod binom(mu_state_i + mu_i, mu_i)."""
    f = 1
    for i, c in mu.items():
        f *= comb(mu_state.get(i) + c, c)
    return f, mu_state + mu


def apply_term(state: dict, term: HTerm, coeff, refined: bool, out: dict, t_shift: int = 0) -> None:
    """Add coeff * term applied to ``state`` (keys (tdeg, a-part, b-part)) into ``out``."""
    k = term.k
    for (tdeg, amu, bnu), c in state.items():
        if term.kind == "marked":
            if not amu.get(k):
                continue
            c2 = c * _weight(k, refined)
            a2 = amu.remove_part(k)
            b2 = bnu.add_part(k)
            c2 = c2 * b2.get(k)
            _add_into(out, (tdeg + t_shift, a2, b2), c2 * coeff)
            continue
        if term.kind == "A":
            if not amu.get(k):
                continue
            c2 = c * _weight(k, refined)
            a_mid = amu.remove_part(k)
            got = _annihilate_a(bnu, term.nu, refined)
            if got is None:
                continue
            f, b2 = got
            f2, a2 = _create_a(a_mid, term.mu)
            _add_into(out, (tdeg + t_shift, a2, b2), c2 * f * f2 * coeff)
        else:
            got = _annihilate_a(bnu, term.nu, refined)
            if got is None:
                continue
            f, b_mid = got
            f2, a2 = _create_a(amu, term.mu)
            b2 = b_mid.add_part(k)
            _add_into(out, (tdeg + t_shift, a2, b2), c * f * f2 * b2.get(k) * coeff)


def _applicable_terms(amu: Partition, bnu: Partition, delta: int, s_max: int, refined: bool, cache: dict):
    """Monomials of H that do not kill the basis vector |amu, bnu> (t-degree <= s_max)."""
    key = (amu, bnu, s_max)
    if key in cache:
        return cache[key]
    terms = []
    for k in amu:
        terms.append(HTerm("marked", 0, k, Partition(), Partition()))
    subs = list(bnu.sub_multisets())
    for s in range(1, s_max + 1):
        for nu in subs:
            for k in amu:
                msize = nu.size + k - s * delta
                if msize >= 0:
                    for mu in partitions_of(msize):
                        terms.append(HTerm("A", s, k, mu, nu))
            for k in range(1, nu.size - s * delta + 1):
                msize = nu.size - k - s * delta
                for mu in partitions_of(msize):
                    terms.append(HTerm("B", s, k, mu, nu))
    out = [(t, _coeff_cached(t, refined, cache)) for t in terms]
    cache[key] = out
    return out


def _coeff_cached(t: HTerm, refined: bool, cache: dict):
    key = ("coeff", t)
    if key not in cache:
        cache[key] = term_coefficient(t, refined)
    return cache[key]


def h_power_matrix_element(
    delta: int,
    d1: int,
    n: int,
    ket: tuple[Partition, Partition],
    bra: tuple[Partition, Partition],
    refined: bool = False,
):
    """<bra| Coeff_{t^d1} H^n |ket> in the normalized basis (a-part, b-part)."""
    state = {(0, ket[0], ket[1]): _one(refined)}
    cache: dict = {}
    target = bra[0].size + bra[1].size
    for step in range(n):
        remaining = n - step - 1
        out: dict = {}
        for (tdeg, amu, bnu), c in state.items():
            for term, coeff in _applicable_terms(amu, bnu, delta, d1 - tdeg, refined, cache):
                apply_term({(tdeg, amu, bnu): c}, term, coeff, refined, out, term.s)
        # degree bookkeeping: a state must still be able to reach t^d1 and the bra's degree
        state = {
            key: c for key, c in out.items()
            if key[1].size + key[2].size - delta * (d1 - key[0]) == target
            and (remaining > 0 or key[0] == d1)
        }
        if not state:
            return _zero(refined)
    if n == 0 and d1 != 0:
        return _zero(refined)
    c = state.get((d1, bra[0], bra[1]), _zero(refined))
    # <a-part, b-part| a-part, b-part> with the adjoint pairing a_n ~ a_{-n}
    wa = qint_weight_product(bra[0]) if refined else partition_weight_product(bra[0])
    wb = qint_weight_product(bra[1]) if refined else partition_weight_product(bra[1])
    return c * wa * wb * Fraction(1, partition_factorial(bra[0]) * partition_factorial(bra[1]))


def fock_invariant(problem) -> object:
    """Relative invariant from the coefficient formula (disconnected counts only)."""
    if problem.connected:
        raise FockInputError("the Fock formula computes disconnected invariants; pass connected=False")
    p = problem.profile
    n = problem.n_marks
    refined = problem.refined
    if n < 0:
        return normalize_scalar(_zero(refined) if not refined else QRational(QLaurent.const(0)), refined)
    # ket: free bottom ends thin (a), fixed bottom ends thick (b)
    ket = (p.nu0, p.mu0)
    # bra: free top ends absorb thick edges (a_n), fixed top ends thin ones (b_n)
    bra_pairing = h_power_matrix_element(problem.delta, problem.d1, n, ket, (p.muInf, p.nuInf), refined)
    # bra_pairing already includes <b_{muInf} a_{nuInf}> normalizations
    pref_num = partition_factorial(p.muInf) * partition_factorial(p.mu0)
    if refined:
        den = {}
        for mu in (p.muInf, p.nuInf, p.mu0, p.nu0):
            for i, c in mu.items():
                den[i] = den.get(i, 0) + c
        value = QRational(QLaurent._lift(bra_pairing) * pref_num, den)
        return normalize_scalar(value, True)
    value = Fraction(bra_pairing) * pref_num / (
        partition_weight_product(p.muInf + p.nuInf) * partition_weight_product(p.mu0 + p.nu0)
    )
    return normalize_scalar(value, False)
