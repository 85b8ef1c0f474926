"""Generating series: Eisenstein series, per-diagram quasi-modular pieces,
exp/log between connected and disconnected counts, and exact polynomial fits.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import sympy

from .arith import partitions_of, sigma
from .diagrams import ProfileError, TangencyProfile, enumerate_marked_diagrams, MarkedDiagram
from .invariants import Problem, relative_invariant
from .multiplicities import _CLASSICAL_POWER, elevator_class


class SeriesError(ValueError):
    pass


# --------------------------------------------------------------------------
# one-variable truncated series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_order of a series in one variable, truncated at ``order``."""

    coeffs: tuple
    order: int
    var: str = "y"

    @classmethod
    def from_list(cls, coeffs: Sequence, order: int | None = None, var: str = "y") -> "PowerSeries":
        if order is None:
            order = len(coeffs) - 1
        c = [Fraction(x) for x in coeffs[: order + 1]]
        c += [Fraction(0)] * (order + 1 - len(c))
        return cls(tuple(c), order, var)

    @classmethod
    def constant(cls, x, order: int, var: str = "y") -> "PowerSeries":
        return cls.from_list([x], order, var)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.order else Fraction(0)

    def _align(self, other: "PowerSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        m = self._align(other)
        return PowerSeries(tuple(self[i] + other[i] for i in range(m + 1)), m, self.var)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        m = self._align(other)
        return PowerSeries(tuple(self[i] - other[i] for i in range(m + 1)), m, self.var)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(tuple(c * other for c in self.coeffs), self.order, self.var)
        m = self._align(other)
        out = [Fraction(0)] * (m + 1)
        for i in range(m + 1):
            if self[i]:
                for j in range(m + 1 - i):
                    out[i + j] += self[i] * other[j]
        return PowerSeries(tuple(out), m, self.var)

    __rmul__ = __mul__

    def D(self, times: int = 1) -> "PowerSeries":
        """The operator y d/dy applied ``times`` times."""
        return PowerSeries(tuple(c * n ** times for n, c in enumerate(self.coeffs)), self.order, self.var)

    def first_difference(self, other: "PowerSeries") -> int | None:
        for i in range(self._align(other) + 1):
            if self[i] != other[i]:
                return i
        return None

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def eisenstein(k: int, order: int) -> PowerSeries:
    """G_k without constant term: coefficient of y^n is sigma_{k-1}(n)."""
    if k < 2 or k % 2:
        raise SeriesError("weight must be an even integer >= 2")
    if order < 1:
        return PowerSeries.from_list([0], 0)
    return PowerSeries.from_list([0] + [sigma(k - 1, n) for n in range(1, order + 1)], order)


# --------------------------------------------------------------------------
# quasi-modularity, one diagram at a time
# --------------------------------------------------------------------------


def skeleton_key(M: MarkedDiagram) -> tuple:
    """Marked diagram with the floor weights forgotten."""
    from .diagrams import marked_canonical_form
    delta, floors, elevs = marked_canonical_form(M)
    return (delta, tuple(l for l, _ in floors), elevs)


def elevator_weight_factor(M: MarkedDiagram) -> Fraction:
    """W: the product of elevator weights to the power fixed by their class."""
    out = Fraction(1)
    for j, e in enumerate(M.diagram.elevators):
        out *= Fraction(e.weight) ** _CLASSICAL_POWER[elevator_class(M, j)]
    return out


def diagram_series(M: MarkedDiagram, order: int) -> PowerSeries:
    """W * prod_i D^(val_i - 1) G_2, summing over all weights of the floors of M.

    Only the shape of M is used; its own floor weights are ignored.  This is
    meaningful for delta = 0, where floor weights do not enter the divergence.
    """
    if M.diagram.delta != 0:
        raise SeriesError("floor weights decouple from elevator weights only for delta = 0")
    out = PowerSeries.constant(elevator_weight_factor(M), order)
    g2 = eisenstein(2, order)
    for i in range(len(M.diagram.floors)):
        val = M.diagram.valence(i)
        if val < 1:
            raise SeriesError("floor without elevators")
        out = out * g2.D(val - 1)
    return out


def skeletons(g: int, d2: int, profile: TangencyProfile | None, d1_max: int,
              connected: bool = True) -> list[MarkedDiagram]:
    """Marked diagram shapes with at most d1_max floors (found with all floor weights 1)."""
    out = {}
    for r in range(0, d1_max + 1):
        prof = profile if profile is not None else TangencyProfile.absolute(0, r, d2)
        for M in enumerate_marked_diagrams(0, r, d2, g, prof, connected):
            if all(w == 1 for w in M.diagram.floors):
                out.setdefault(skeleton_key(M), M)
    return [out[k] for k in sorted(out)]


def invariant_series(g: int, d2: int, d1_max: int, profile: TangencyProfile | None = None,
                     connected: bool = True) -> PowerSeries:
    """sum_{d1 <= d1_max} N_{g,(d1,d2)} y^{d1} for delta = 0, from the enumerator."""
    coeffs = []
    for d1 in range(d1_max + 1):
        prof = profile if profile is not None else TangencyProfile.absolute(0, d1, d2)
        coeffs.append(relative_invariant(Problem(0, d1, d2, g, prof, False, connected)).value)
    return PowerSeries.from_list(coeffs, d1_max)


@dataclass
class QuasiModularReport:
    g: int
    d2: int
    d1_max: int
    direct: PowerSeries
    structural: PowerSeries
    n_skeletons: int
    first_mismatch: int | None = field(default=None)

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None

    def to_json(self) -> dict:
        return {
            "g": self.g, "d2": self.d2, "d1_max": self.d1_max, "ok": self.ok,
            "skeletons": self.n_skeletons, "first_mismatch": self.first_mismatch,
            "direct": self.direct.to_json(), "structural": self.structural.to_json(),
        }


def quasi_modular_check(g: int, d2: int, delta: int = 0, profile: TangencyProfile | None = None,
                        d1_max: int = 6, connected: bool = True) -> QuasiModularReport:
    """Compare the enumerated series with the sum of per-diagram D^k G_2 products."""
    if delta != 0:
        raise SeriesError("the per-diagram structure holds for delta = 0 only")
    if d2 == 0 and profile is None:
        raise SeriesError("d2 = 0 gives floors without marked neighbours; not an integral family")
    if profile is not None and profile.muInf.size + profile.nuInf.size != d2:
        raise ProfileError("profile does not have degree d2 at infinity")
    direct = invariant_series(g, d2, d1_max, profile, connected)
    structural = PowerSeries.constant(0, d1_max)
    sk = skeletons(g, d2, profile, d1_max, connected)
    for M in sk:
        structural = structural + diagram_series(M, d1_max)
    return QuasiModularReport(g, d2, d1_max, direct, structural, len(sk), direct.first_difference(structural))


# --------------------------------------------------------------------------
# multivariate series and the exp/log relation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiSeries:
    """Sparse series in several variables, truncated at a total order."""

    terms: dict
    order: int
    nvars: int = 3

    @classmethod
    def make(cls, terms: dict, order: int, nvars: int = 3) -> "MultiSeries":
        clean = {tuple(e): c for e, c in terms.items() if c and sum(e) <= order}
        return cls(clean, order, nvars)

    @classmethod
    def one(cls, order: int, nvars: int = 3) -> "MultiSeries":
        return cls.make({(0,) * nvars: Fraction(1)}, order, nvars)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiSeries.make(out, min(self.order, other.order), self.nvars)

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + other.scale(-1)

    def scale(self, x) -> "MultiSeries":
        return MultiSeries.make({e: c * x for e, c in self.terms.items()}, self.order, self.nvars)

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        order = min(self.order, other.order)
        out: dict = {}
        for e1, c1 in self.terms.items():
            s1 = sum(e1)
            for e2, c2 in other.terms.items():
                if s1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiSeries.make(out, order, self.nvars)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self - other).terms == {}

    def to_json(self) -> list:
        return [{"exponent": list(e), "coefficient": str(c)} for e, c in sorted(self.terms.items())]


def series_exp(S: MultiSeries) -> MultiSeries:
    if S.constant_term():
        raise SeriesError("exp needs a series without constant term")
    out = MultiSeries.one(S.order, S.nvars)
    power = MultiSeries.one(S.order, S.nvars)
    for k in range(1, S.order + 1):
        power = power * S
        out = out + power.scale(Fraction(1, factorial(k)))
    return out


def series_log(S: MultiSeries) -> MultiSeries:
    if S.constant_term() != 1:
        raise SeriesError("log needs constant term 1")
    T = S - MultiSeries.one(S.order, S.nvars)
    out = MultiSeries.make({}, S.order, S.nvars)
    power = MultiSeries.one(S.order, S.nvars)
    for k in range(1, S.order + 1):
        power = power * T
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


def exp_log_transform(S: MultiSeries, direction: str) -> MultiSeries:
    if direction == "exp":
        return series_exp(S)
    if direction == "log":
        return series_log(S)
    raise SeriesError("direction must be 'exp' or 'log'")


def invariant_multiseries(delta: int, order: int, connected: bool, refined: bool = False) -> MultiSeries:
    """sum N^(.)_{g,(d1,d2)} Q^n/n! E0^d1 F^d2 over n + d1 + d2 <= order.

    n = delta*d1 + 2*d2 + g - 1 is the number of point conditions, so the
    genus is read off from the exponent of Q.
    """
    terms: dict = {}
    for total in range(order + 1):
        for n in range(total + 1):
            for d1 in range(total - n + 1):
                d2 = total - n - d1
                if n == 0 and d1 == 0 and d2 == 0:
                    continue
                g = n + 1 - delta * d1 - 2 * d2
                value = relative_invariant(Problem(delta, d1, d2, g, None, refined, connected)).value
                if value:
                    terms[(n, d1, d2)] = value * Fraction(1, factorial(n))
    if not connected:
        terms[(0, 0, 0)] = Fraction(1)
    return MultiSeries.make(terms, order)


# --------------------------------------------------------------------------
# exact polynomial interpolation
# --------------------------------------------------------------------------


class FitError(ValueError):
    pass


@dataclass
class FitReport:
    variables: tuple
    polynomial: sympy.Expr
    degree: int
    residuals: list
    heldout_residuals: list

    @property
    def exact(self) -> bool:
        return all(r == 0 for r in self.residuals)

    @property
    def predicts(self) -> bool:
        return self.exact and all(r == 0 for r in self.heldout_residuals)

    def __call__(self, *point) -> Fraction:
        val = self.polynomial.subs(dict(zip(self.variables, point)))
        return Fraction(int(sympy.numer(val)), int(sympy.denom(val)))

    def to_json(self) -> dict:
        return {
            "polynomial": str(self.polynomial),
            "degree": self.degree,
            "exact": self.exact,
            "residuals": [str(r) for r in self.residuals],
            "heldout_residuals": [str(r) for r in self.heldout_residuals],
        }


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = [e for e in itertools.product(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    return sorted(out, key=lambda e: (sum(e), e))


def poly_fit(inputs: Sequence[Sequence[int]], values: Sequence, degree_bound: int,
             heldout: Iterable[tuple[Sequence[int], object]] = ()) -> FitReport:
    """Exact least-squares polynomial of total degree <= degree_bound through the samples.

    The residual on the samples is zero exactly when the data is polynomial of
    that degree; held-out samples measure prediction.
    """
    pts = [tuple(int(x) for x in (p if isinstance(p, (tuple, list)) else (p,))) for p in inputs]
    if len(pts) != len(values):
        raise FitError("inputs and values differ in length")
    nvars = len(pts[0]) if pts else 1
    mons = _monomials(nvars, degree_bound)
    if len(pts) <= len(mons):
        raise FitError("need more samples than monomials (%d <= %d)" % (len(pts), len(mons)))
    A = sympy.Matrix([[sympy.prod(sympy.Integer(x) ** k for x, k in zip(p, e)) for e in mons] for p in pts])
    b = sympy.Matrix([sympy.Rational(str(Fraction(v))) for v in values])
    if A.rank() < len(mons):
        raise FitError("sample points do not determine a polynomial of this degree")
    c = (A.T * A).LUsolve(A.T * b)
    xs = sympy.symbols("x0:%d" % nvars) if nvars > 1 else (sympy.Symbol("w"),)
    poly = sympy.expand(sum(ci * sympy.prod(x ** k for x, k in zip(xs, e)) for ci, e in zip(c, mons)))
    residuals = [Fraction(str(r)) for r in (A * c - b)]
    deg = sympy.Poly(poly, *xs).total_degree() if poly != 0 else 0
    report = FitReport(tuple(xs), poly, deg, residuals, [])
    for p, v in heldout:
        p = tuple(p) if isinstance(p, (tuple, list)) else (p,)
        report.heldout_residuals.append(report(*p) - Fraction(v))
    return report
