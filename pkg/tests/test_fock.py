from fractions import Fraction

import pytest

from ellifloor.arith import Partition, QLaurent, parse_partition, qint
from ellifloor.diagrams import TangencyProfile
from ellifloor.fock import (
    FockInputError,
    FockState,
    HTerm,
    apply_generator,
    apply_term,
    apply_word,
    build_h,
    expectation_sequential,
    expectation_wick,
    feynman_pairings,
    feynman_table,
    fock_invariant,
    h_power_matrix_element,
    scalar_product,
    vacuum_expectation,
    wick_agreement,
)
from ellifloor.invariants import Problem, relative_invariant

E = Partition()
VAC = (E, E)


def P(s):
    return parse_partition(s) if s else Partition()


# ---------------------------------------------------------------- generators


def test_single_contraction():
    s = apply_generator(FockState.basis(E, P("1^1")), ("a", 1))
    assert s == FockState.vacuum()


def test_weight_two_contraction():
    s = apply_generator(FockState.basis(E, P("2^1")), ("a", 2))
    assert s.coefficient(*VAC) == 2
    s = apply_generator(FockState.basis(E, P("2^1"), refined=True), ("a", 2))
    assert s.coefficient(*VAC) == qint(2)


def test_annihilators_kill_vacuum():
    for g in [("a", 1), ("b", 1), ("a", 3), ("b", 2)]:
        assert apply_generator(FockState.vacuum(), g).is_zero()


def test_zero_index_and_bad_family():
    assert apply_generator(FockState.vacuum(), ("a", 0)).is_zero()
    with pytest.raises(FockInputError):
        apply_generator(FockState.vacuum(), ("c", 1))


def test_creation_respects_normalized_basis():
    s = apply_word(FockState.vacuum(), [("a", -1), ("a", -1)])
    # a_{-1}^2 v = 2 |(1^2), 0> since |(1^2),0> = a_{-1}^2/2! v
    assert s.coefficient(P("1^2"), E) == 2
    assert s.degrees() == {2}


# ---------------------------------------------------------------- expectations


def test_expectation_examples():
    assert vacuum_expectation([("a", 1), ("b", -1)]) == 1
    assert vacuum_expectation([("a", 2), ("b", -2)]) == 2
    assert vacuum_expectation([("a", 2), ("b", -2)], refined=True) == qint(2)
    assert vacuum_expectation([("a", 1), ("a", 1), ("b", -1), ("b", -1)]) == 2
    assert len(list(feynman_pairings([("a", 1), ("a", 1), ("b", -1), ("b", -1)]))) == 2


def test_same_family_does_not_pair():
    assert vacuum_expectation([("a", 1), ("a", -1)]) == 0
    assert vacuum_expectation([("b", 2), ("b", -2)]) == 0


def test_monomial_shape_is_checked():
    # nested lists are monomials; inside one, creators come first
    assert vacuum_expectation([[("a", 1)], [("b", -1)]]) == 1
    assert vacuum_expectation([[("b", -1), ("a", 1)]]) == 0
    with pytest.raises(FockInputError):
        vacuum_expectation([[("a", 1), ("b", -1)]])


def test_short_words_agree_per_word():
    rep = wick_agreement(4, 3, False, balanced_only=False)
    assert rep.ok and rep.checked == sum(12 ** L for L in range(1, 5))


@pytest.mark.parametrize("refined", [False, True])
def test_balanced_words_length_six(refined):
    rep = wick_agreement(6, 3, refined)
    assert rep.ok
    assert rep.checked == 12 + 396 + 19920


def test_table_matches_single_word_pairings():
    table = feynman_table(4, 2)
    for word, value in table.items():
        assert expectation_wick(list(word)) == value
    assert expectation_wick([("a", 1), ("b", 1)]) == 0


def test_deformed_engine_at_q_one():
    table_q = feynman_table(6, 2, refined=True)
    table = feynman_table(6, 2)
    assert table.keys() == table_q.keys()
    for word in list(table)[:400]:
        assert table_q[word].at_one() == table[word]
        assert expectation_sequential(list(word), True).at_one() == expectation_sequential(list(word))


@pytest.mark.parametrize("left,right,expected", [
    (("1^2", ""), ("", "1^2"), Fraction(1, 2)),
    (("2^1", "1^1"), ("1^1", "2^1"), 2),
    (("2^2", ""), ("", "2^2"), 2),
    (("1^2", ""), ("1^2", ""), 0),
    (("1^1", "1^1"), ("2^1", ""), 0),
])
def test_scalar_product(left, right, expected):
    l = (P(left[0]), P(left[1]))
    r = (P(right[0]), P(right[1]))
    assert scalar_product(l, r) == expected


def test_scalar_product_refined():
    v = scalar_product((P("2^2"), E), (E, P("2^2")), refined=True)
    assert v == qint(2) * qint(2) * Fraction(1, 2)


# ---------------------------------------------------------------- H operator


def test_build_h_without_floors():
    H = build_h(0, 0, 4)
    assert list(H) == [0]
    assert [t.k for _, t in H[0]] == [1, 2, 3, 4]
    assert all(t.kind == "marked" and c == 1 for c, t in H[0])


def test_build_h_smallest_floor():
    H = build_h(1, 1, 3)
    empty = [(c, t) for c, t in H[1] if t.mu.length == 0 and t.nu.length == 0]
    assert len(empty) == 1
    c, t = empty[0]
    assert t.kind == "A" and t.k == 1 and c == 1


@pytest.mark.parametrize("delta", [0, 1, 2])
def test_build_h_grading(delta):
    H = build_h(delta, 3, 5)
    for s, terms in H.items():
        for _, t in terms:
            assert t.degree_shift() == -delta * s


def test_build_h_bad_input():
    with pytest.raises(FockInputError):
        build_h(0, -1, 3)
    with pytest.raises(FockInputError):
        build_h(0, 1, 0)


def test_build_h_refined_specializes():
    H = build_h(1, 2, 3)
    Hq = build_h(1, 2, 3, refined=True)
    assert [t for _, t in H[2]] == [t for _, t in Hq[2]]
    for (c, _), (cq, _) in zip(H[2], Hq[2]):
        assert cq.at_one() == c


@pytest.mark.parametrize("term", [
    HTerm("A", 1, 1, P("1^1"), E),
    HTerm("A", 1, 2, P("1^2"), P("1^1")),
    HTerm("B", 1, 1, E, P("2^1")),
    HTerm("B", 2, 1, P("1^1"), P("1^2")),
    HTerm("marked", 0, 2, E, E),
])
def test_apply_term_matches_generator_word(term):
    """apply_term works with (a-part, b-part) where the a-part is read by b_k,
    i.e. the state's thin family is the one the generators call ``b``."""
    from ellifloor.arith import partition_factorial
    states = [(P("1^1"), P("1^2")), (P("2^1"), P("2^1,1^1")), (P("1^2"), P("1^1"))]
    norm = Fraction(1, partition_factorial(term.mu) * partition_factorial(term.nu))
    for amu, bnu in states:
        out: dict = {}
        apply_term({(0, amu, bnu): Fraction(1)}, term, Fraction(1), False, out)
        # generator picture with the families exchanged: the state |amu, bnu> is b_{-amu} a_{-bnu} v
        swap = {"a": "b", "b": "a"}
        word = [(swap[f], n) for f, n in term.word()]
        st = apply_word(FockState.basis(bnu, amu), word).scale(norm)
        expect = {(0, b, a): c for (a, b), c in st.terms.items()}
        assert out == expect


# ---------------------------------------------------------------- invariants


def _prob(delta, d1, d2, g, mu0="", nu0="", muinf="", nuinf="", refined=False, connected=False):
    if not (mu0 or nu0 or muinf or nuinf):
        prof = TangencyProfile.absolute(delta, d1, d2)
    else:
        prof = TangencyProfile(P(mu0), P(nu0), P(muinf), P(nuinf))
    return Problem(delta, d1, d2, g, prof, refined, connected)


def test_connected_request_rejected():
    with pytest.raises(FockInputError):
        fock_invariant(_prob(1, 2, 1, 2, connected=True))


def test_small_values():
    assert fock_invariant(_prob(1, 2, 0, 2)) == 1
    assert fock_invariant(_prob(1, 2, 1, 2)) == 36
    assert fock_invariant(_prob(0, 1, 1, 1)) == relative_invariant(_prob(0, 1, 1, 1)).value


def test_grading_shortcut():
    # ||in|| - ||out|| = 3 while delta*d1 = 2
    assert h_power_matrix_element(1, 2, 3, (P("1^3"), E), (E, E)) == 0
    assert h_power_matrix_element(1, 2, 3, (P("1^3"), E), (P("1^1"), E)) != 0


def test_refined_specializes():
    v = fock_invariant(_prob(1, 2, 1, 2, refined=True))
    assert v.at_one() == 36
    assert v == QLaurent({2: 5, 0: 26, -2: 5})


@pytest.mark.parametrize("cell", [
    (0, 1, 2, 1), (0, 2, 1, 1), (0, 2, 1, 2), (1, 1, 1, 1), (1, 2, 2, 1), (2, 1, 1, 1),
])
def test_matches_enumeration(cell):
    for refined in (False, True):
        pr = _prob(*cell, refined=refined)
        assert fock_invariant(pr) == relative_invariant(pr).value
