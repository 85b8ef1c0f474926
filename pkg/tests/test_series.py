import random
from fractions import Fraction

import pytest

from ellifloor.arith import Partition, sigma
from ellifloor.diagrams import FloorDiagram, Elevator, MarkedDiagram, TangencyProfile, enumerate_marked_diagrams
from ellifloor.series import (
    FitError,
    MultiSeries,
    PowerSeries,
    SeriesError,
    diagram_series,
    eisenstein,
    exp_log_transform,
    invariant_multiseries,
    invariant_series,
    poly_fit,
    quasi_modular_check,
    series_exp,
    series_log,
    skeletons,
)


# ---------------------------------------------------------------- Eisenstein


def test_g2_coefficients():
    g2 = eisenstein(2, 6)
    assert [g2[n] for n in range(1, 7)] == [1, 3, 4, 7, 6, 12]
    assert g2[0] == 0


def test_derivative():
    assert eisenstein(2, 6).D()[3] == 12
    assert eisenstein(2, 6).D(2)[2] == 12


def test_higher_eisenstein():
    g4 = eisenstein(4, 5)
    assert [g4[n] for n in range(1, 6)] == [sigma(3, n) for n in range(1, 6)]


def test_order_zero_and_bad_weight():
    assert eisenstein(2, 0).to_json() == ["0"]
    with pytest.raises(SeriesError):
        eisenstein(3, 4)
    with pytest.raises(SeriesError):
        eisenstein(0, 4)


def test_truncation_is_respected():
    a = PowerSeries.from_list([1, 1, 1, 1], 3)
    b = PowerSeries.from_list([1, 2], 5)
    prod = a * b
    assert prod.order == 3
    assert [prod[n] for n in range(4)] == [1, 3, 3, 3]


# ---------------------------------------------------------------- per diagram


def _one_floor_marked(mark_bottom: bool) -> MarkedDiagram:
    D = FloorDiagram(0, (1,), (Elevator(None, 0, 1), Elevator(0, None, 1)))
    marks = (("elevator", 0), ("floor", 0)) if mark_bottom else (("floor", 0), ("elevator", 1))
    return MarkedDiagram(D, marks)


def test_single_floor_series():
    M = _one_floor_marked(True)
    s = diagram_series(M, 6)
    assert [s[n] for n in range(7)] == [0] + [n * sigma(1, n) for n in range(1, 7)]


def test_zero_floors_is_constant():
    D = FloorDiagram(0, (), (Elevator(None, None, 3),))
    M = MarkedDiagram(D, (("elevator", 0),))
    s = diagram_series(M, 4)
    assert s.to_json() == ["1", "0", "0", "0", "0"]


def test_genus_one_series_is_twice_dg2():
    rep = quasi_modular_check(1, 1, d1_max=6)
    assert rep.ok and rep.n_skeletons == 2
    target = eisenstein(2, 6).D() * 2
    assert rep.direct.first_difference(target) is None


def test_skeleton_shapes_forget_floor_weights():
    sk = skeletons(1, 1, None, 4)
    assert all(w == 1 for M in sk for w in M.diagram.floors)
    assert len(sk) == 2


@pytest.mark.parametrize("g,d2", [(0, 1), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_quasi_modular(g, d2):
    rep = quasi_modular_check(g, d2, d1_max=5)
    assert rep.ok, rep.to_json()


def test_genus_two_degree_two_series():
    direct = invariant_series(2, 2, 5)
    assert [direct[d] for d in range(2, 6)] == [40, 1080, 9600, 50000]


def test_rejections():
    with pytest.raises(SeriesError):
        quasi_modular_check(1, 0, d1_max=4)
    with pytest.raises(SeriesError):
        quasi_modular_check(1, 1, delta=1)
    M = next(enumerate_marked_diagrams(1, 1, 1, 1))
    with pytest.raises(SeriesError):
        diagram_series(M, 3)


def test_mismatch_reports_first_coefficient():
    a = PowerSeries.from_list([0, 1, 2, 3], 3)
    b = PowerSeries.from_list([0, 1, 5, 3], 3)
    assert a.first_difference(b) == 2


# ---------------------------------------------------------------- exp / log


def test_exp_of_zero():
    z = MultiSeries.make({}, 4)
    assert series_exp(z) == MultiSeries.one(4)


def _random_series(rng, order):
    terms = {}
    for _ in range(rng.randint(1, 6)):
        e = [0, 0, 0]
        for _ in range(rng.randint(1, order)):
            e[rng.randrange(3)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return MultiSeries.make(terms, order)


@pytest.mark.parametrize("seed", range(8))
def test_log_exp_round_trip(seed):
    rng = random.Random(seed)
    S = _random_series(rng, 4)
    assert series_log(series_exp(S)) == S
    assert exp_log_transform(exp_log_transform(S, "exp"), "log") == S


def test_exp_log_preconditions():
    with pytest.raises(SeriesError):
        series_exp(MultiSeries.one(3))
    with pytest.raises(SeriesError):
        series_log(MultiSeries.make({}, 3))
    with pytest.raises(SeriesError):
        exp_log_transform(MultiSeries.make({}, 3), "sideways")


@pytest.mark.parametrize("delta", [0, 1])
def test_disconnected_is_exp_of_connected(delta):
    conn = invariant_multiseries(delta, 4, connected=True)
    disc = invariant_multiseries(delta, 4, connected=False)
    assert series_exp(conn) == disc
    assert series_log(disc) == conn


def test_exp_relation_at_order_six():
    conn = invariant_multiseries(0, 6, connected=True)
    disc = invariant_multiseries(0, 6, connected=False)
    # a fiber times a genus-one curve: disconnected only
    assert (3, 1, 2) not in conn.terms and disc.terms[(3, 1, 2)] == 1
    assert series_exp(conn) == disc


# ---------------------------------------------------------------- interpolation


def test_constant_fit():
    rep = poly_fit([1, 2, 3, 4], [7, 7, 7, 7], 2, heldout=[(9, 7)])
    assert rep.exact and rep.predicts and rep.degree == 0


def test_cubic_fit_two_variables():
    pts = [(a, b) for a in range(5) for b in range(5)]
    vals = [a ** 3 - 2 * a * b + Fraction(b, 3) for a, b in pts]
    rep = poly_fit(pts, vals, 3, heldout=[((7, 9), 343 - 126 + 3)])
    assert rep.exact and rep.predicts and rep.degree == 3


def test_non_polynomial_data_is_flagged():
    ws = list(range(1, 9))
    rep = poly_fit(ws, [sigma(1, w) for w in ws], 3, heldout=[(11, sigma(1, 11)), (12, sigma(1, 12))])
    assert not rep.predicts
    assert any(r != 0 for r in rep.heldout_residuals)


def test_fit_errors():
    with pytest.raises(FitError):
        poly_fit([1, 2, 3], [1, 2, 3], 2)
    with pytest.raises(FitError):
        poly_fit([1, 1, 1, 1, 1], [1, 1, 1, 1, 1], 2)
    with pytest.raises(FitError):
        poly_fit([1, 2, 3, 4], [1, 2, 3], 1)
