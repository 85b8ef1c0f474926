"""Exact arithmetic: partitions, divisor sums, q-integers and Laurent polynomials in q^(1/2).

A :class:`QLaurent` stores its coefficients keyed by *half exponents*, i.e.
the key ``h`` stands for ``q**(h/2)``.  Refined quantities that need division
by q-integers (the ``1/I_q`` normalisations) are held as :class:`QRational`,
a Laurent numerator over a product of q-integers.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Iterator, Mapping


# --------------------------------------------------------------------------
# Partitions
# --------------------------------------------------------------------------


class Partition(Mapping[int, int]):
    """Multiset of positive integers, stored as ``{part: count}``.

    ``len(p)`` is deliberately the number of *distinct* parts (Mapping
    semantics); use :attr:`length` for the number of parts and :attr:`size`
    for their sum.
    """

    __slots__ = ("_m", "_key")

    def __init__(self, data: Mapping[int, int] | Iterable[int] | None = None):
        if data is None:
            m: dict[int, int] = {}
        elif isinstance(data, Mapping):
            m = {}
            for part, count in data.items():
                part, count = int(part), int(count)
                if part < 1 or count < 0:
                    raise ValueError(f"invalid partition entry {part}:{count}")
                if count:
                    m[part] = m.get(part, 0) + count
        else:
            m = dict(Counter(int(x) for x in data))
            if any(p < 1 for p in m):
                raise ValueError("partition parts must be positive")
        self._m = m
        self._key = tuple(sorted(m.items()))

    @classmethod
    def single(cls, k: int) -> "Partition":
        return cls({k: 1})

    @classmethod
    def ones(cls, n: int) -> "Partition":
        return cls({1: n}) if n else cls()

    def __getitem__(self, part: int) -> int:
        return self._m[part]

    def get(self, part, default=0):
        return self._m.get(part, default)

    def __iter__(self):
        return iter(sorted(self._m))

    def __len__(self) -> int:
        return len(self._m)

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other) -> bool:
        if isinstance(other, Partition):
            return self._key == other._key
        if isinstance(other, Mapping):
            return self == Partition(other)
        return NotImplemented

    def __lt__(self, other: "Partition") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        return f"Partition({dict(self._key)})"

    def __str__(self) -> str:
        return format_partition(self)

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        return self._key

    @property
    def length(self) -> int:
        return sum(self._m.values())

    @property
    def size(self) -> int:
        return sum(p * c for p, c in self._m.items())

    def parts(self) -> list[int]:
        """Parts in non-increasing order."""
        return [p for p, c in sorted(self._m.items(), reverse=True) for _ in range(c)]

    def __add__(self, other: "Partition") -> "Partition":
        m = dict(self._m)
        for p, c in other._m.items():
            m[p] = m.get(p, 0) + c
        return Partition(m)

    def __sub__(self, other: "Partition") -> "Partition":
        m = dict(self._m)
        for p, c in other._m.items():
            left = m.get(p, 0) - c
            if left < 0:
                raise ValueError(f"{other!r} is not contained in {self!r}")
            m[p] = left
        return Partition(m)

    def contains(self, other: "Partition") -> bool:
        return all(self.get(p) >= c for p, c in other._m.items())

    def add_part(self, k: int) -> "Partition":
        return self + Partition.single(k)

    def remove_part(self, k: int) -> "Partition":
        return self - Partition.single(k)

    def sub_multisets(self) -> Iterator["Partition"]:
        """Every sub-partition, each exactly once."""
        items = sorted(self._m.items())

        def rec(i):
            if i == len(items):
                yield {}
                return
            part, count = items[i]
            for rest in rec(i + 1):
                for c in range(count + 1):
                    d = dict(rest)
                    if c:
                        d[part] = c
                    yield d

        for d in rec(0):
            yield Partition(d)

    def to_json(self) -> dict[str, int]:
        return {str(p): c for p, c in self._key}

    @classmethod
    def from_json(cls, obj: Mapping[str, int]) -> "Partition":
        return cls({int(k): int(v) for k, v in obj.items()})


def parse_partition(text: str) -> Partition:
    """Parse the compact ``"1^2,3^1"`` notation (``"3"`` means ``3^1``)."""
    text = text.strip()
    if text in ("", "0", "-", "empty"):
        return Partition()
    m: dict[int, int] = {}
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "^" in token:
            part, count = token.split("^", 1)
        else:
            part, count = token, "1"
        p, c = int(part), int(count)
        if p < 1 or c < 0:
            raise ValueError(f"bad partition token {token!r}")
        m[p] = m.get(p, 0) + c
    return Partition(m)


def format_partition(mu: Partition) -> str:
    if not mu.key:
        return "0"
    return ",".join(f"{p}^{c}" for p, c in mu.key)


@lru_cache(maxsize=None)
def _partitions(n: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of ``n`` (optionally with parts ``<= max_part``)."""
    if n < 0:
        return
    for parts in _partitions(n, n if max_part is None else min(max_part, n)):
        yield Partition(parts)


def partitions_up_to(n: int, max_part: int | None = None) -> Iterator[Partition]:
    for m in range(n + 1):
        yield from partitions_of(m, max_part)


# --------------------------------------------------------------------------
# Integer helpers
# --------------------------------------------------------------------------


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors needs n >= 1")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def sigma(k: int, n: int) -> int:
    """Divisor power sum: sum of d**k over the divisors d of n."""
    if k < 0:
        raise ValueError("sigma needs k >= 0")
    return sum(d**k for d in divisors(n))


def partition_binomial(mu: Partition, nu: Partition) -> int:
    """Product of binomial(mu_i, nu_i); zero unless nu <= mu."""
    if not mu.contains(nu):
        return 0
    return prod(comb(mu.get(p), c) for p, c in nu.items())


def partition_factorial(mu: Partition) -> int:
    return prod(factorial(c) for c in mu.values())


def partition_weight_product(mu: Partition) -> int:
    """``I^mu``: product of i**mu_i."""
    return prod(p**c for p, c in mu.items())


# --------------------------------------------------------------------------
# Laurent polynomials in q^(1/2)
# --------------------------------------------------------------------------


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


class QLaurent:
    """Laurent polynomial in q^(1/2) with rational coefficients (immutable)."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, int | Fraction] | None = None):
        c: dict[int, Fraction] = {}
        if coeffs:
            for h, v in coeffs.items():
                v = _as_fraction(v)
                if v:
                    c[int(h)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict[int, Fraction]) -> "QLaurent":
        obj = object.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def const(cls, x) -> "QLaurent":
        x = _as_fraction(x)
        return cls._raw({0: x} if x else {})

    @classmethod
    def monomial(cls, half_exp: int, coeff=1) -> "QLaurent":
        return cls({half_exp: coeff})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def is_zero(self) -> bool:
        return not self._c

    def at_one(self) -> Fraction:
        """Value at q = 1."""
        return sum(self._c.values(), Fraction(0))

    def bar(self) -> "QLaurent":
        """Image under q -> 1/q."""
        return QLaurent._raw({-h: v for h, v in self._c.items()})

    def is_symmetric(self) -> bool:
        return self == self.bar()

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())

    def min_exp(self) -> int:
        return min(self._c) if self._c else 0

    def max_exp(self) -> int:
        return max(self._c) if self._c else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, QLaurent):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: Fraction(other)} if other else {})
        if isinstance(other, QRational):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._c.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._c)

    @staticmethod
    def _lift(x) -> "QLaurent":
        if isinstance(x, QLaurent):
            return x
        if isinstance(x, (int, Fraction)):
            return QLaurent.const(x)
        raise TypeError(f"unsupported operand {type(x).__name__}")

    def __add__(self, other):
        if isinstance(other, QRational):
            return NotImplemented
        other = self._lift(other)
        c = dict(self._c)
        for h, v in other._c.items():
            s = c.get(h, 0) + v
            if s:
                c[h] = s
            else:
                c.pop(h, None)
        return QLaurent._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent._raw({h: -v for h, v in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, QRational):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, QRational):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if not other:
                return QLaurent._raw({})
            return QLaurent._raw({h: v * other for h, v in self._c.items()})
        other = self._lift(other)
        c: dict[int, Fraction] = {}
        for h1, v1 in self._c.items():
            for h2, v2 in other._c.items():
                h = h1 + h2
                c[h] = c.get(h, 0) + v1 * v2
        return QLaurent._raw({h: v for h, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            raise ValueError("negative powers need QRational")
        result = QLaurent.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divexact(self, other) -> "QLaurent":
        """Exact division; raises ``ArithmeticError`` if a remainder is left."""
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if self.is_zero():
            return self
        if len(other._c) == 1:
            (h0, v0), = other._c.items()
            return QLaurent._raw({h - h0: v / v0 for h, v in self._c.items()})
        # long division on the polynomial parts, in the variable q^(1/2)
        a_lo, b_lo = self.min_exp(), other.min_exp()
        a = {h - a_lo: v for h, v in self._c.items()}
        b = {h - b_lo: v for h, v in other._c.items()}
        db = max(b)
        lead = b[db]
        quotient: dict[int, Fraction] = {}
        while a and max(a) >= db:
            da = max(a)
            factor = a[da] / lead
            shift = da - db
            quotient[shift] = factor
            for h, v in b.items():
                key = h + shift
                s = a.get(key, 0) - factor * v
                if s:
                    a[key] = s
                else:
                    a.pop(key, None)
        if a:
            raise ArithmeticError("Laurent division leaves a remainder")
        return QLaurent._raw({h + a_lo - b_lo: v for h, v in quotient.items()})

    def __repr__(self) -> str:
        return f"QLaurent({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        terms = []
        for h, v in sorted(self._c.items(), reverse=True):
            if h == 0:
                mono = ""
            elif h % 2 == 0:
                e = h // 2
                mono = "q" if e == 1 else f"q^{e}"
            else:
                mono = f"q^({h}/2)"
            if not mono:
                terms.append(str(v))
            elif v == 1:
                terms.append(mono)
            elif v == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{v}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> dict[str, str]:
        return {str(h): str(v) for h, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> "QLaurent":
        return cls({int(h): Fraction(v) for h, v in obj.items()})


@lru_cache(maxsize=None)
def qint(n: int) -> QLaurent:
    """The q-integer [n]_q = q^((n-1)/2) + q^((n-3)/2) + ... + q^(-(n-1)/2)."""
    if n < 1:
        raise ValueError(f"q-integer needs n >= 1, got {n}")
    return QLaurent._raw({n - 1 - 2 * j: Fraction(1) for j in range(n)})


@lru_cache(maxsize=None)
def qint_ratio(m: int, n: int) -> QLaurent:
    """[m]_q / [n]_q for n dividing m (always a Laurent polynomial)."""
    if m % n:
        raise ValueError(f"[{m}]/[{n}] is not a Laurent polynomial")
    return qint(m).divexact(qint(n))


def qint_weight_product(mu: Partition) -> QLaurent:
    """``I_q^mu``: product of [i]_q**mu_i."""
    out = QLaurent.const(1)
    for p, c in mu.items():
        out = out * qint(p) ** c
    return out


def partition_stats(mu: Partition) -> tuple[int, int, int, QLaurent, int]:
    """(length, size, I^mu, I_q^mu, mu!) of a partition."""
    return (
        mu.length,
        mu.size,
        partition_weight_product(mu),
        qint_weight_product(mu),
        partition_factorial(mu),
    )


class QRational:
    """A Laurent polynomial divided by a product of q-integers.

    ``den`` maps k to the power of [k]_q in the denominator.  Equality is
    decided by cross multiplication, so two representations of the same value
    always compare equal even when they are not fully reduced.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den: Mapping[int, int] | None = None):
        self.num = QLaurent._lift(num) if not isinstance(num, QLaurent) else num
        d = {int(k): int(e) for k, e in (den or {}).items() if e and k != 1}
        if any(e < 0 for e in d.values()):
            raise ValueError("denominator powers must be non-negative")
        self.den = d
        self._reduce()

    def _reduce(self) -> None:
        if self.num.is_zero():
            self.den = {}
            return
        for k in sorted(self.den, reverse=True):
            while self.den.get(k):
                try:
                    self.num = self.num.divexact(qint(k))
                except ArithmeticError:
                    break
                self.den[k] -= 1
                if not self.den[k]:
                    del self.den[k]

    @classmethod
    def lift(cls, x) -> "QRational":
        if isinstance(x, QRational):
            return x
        return cls(QLaurent._lift(x))

    @staticmethod
    def _den_poly(den: Mapping[int, int]) -> QLaurent:
        out = QLaurent.const(1)
        for k, e in den.items():
            out = out * qint(k) ** e
        return out

    def _over(self, den: Mapping[int, int]) -> QLaurent:
        missing = {k: e - self.den.get(k, 0) for k, e in den.items()}
        return self.num * self._den_poly(missing)

    @staticmethod
    def _join(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
        keys = set(a) | set(b)
        return {k: max(a.get(k, 0), b.get(k, 0)) for k in keys}

    def __add__(self, other):
        other = QRational.lift(other)
        den = self._join(self.den, other.den)
        return QRational(self._over(den) + other._over(den), den)

    __radd__ = __add__

    def __neg__(self):
        return QRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-QRational.lift(other))

    def __rsub__(self, other):
        return QRational.lift(other) - self

    def __mul__(self, other):
        other = QRational.lift(other)
        den = dict(self.den)
        for k, e in other.den.items():
            den[k] = den.get(k, 0) + e
        return QRational(self.num * other.num, den)

    __rmul__ = __mul__

    def divide_by_qints(self, den: Mapping[int, int]) -> "QRational":
        d = dict(self.den)
        for k, e in den.items():
            d[k] = d.get(k, 0) + e
        return QRational(self.num, d)

    def __eq__(self, other) -> bool:
        if isinstance(other, (QLaurent, int, Fraction)):
            other = QRational.lift(other)
        if not isinstance(other, QRational):
            return NotImplemented
        den = self._join(self.den, other.den)
        return self._over(den) == other._over(den)

    __hash__ = None  # not canonical

    def is_laurent(self) -> bool:
        return not self.den

    def to_laurent(self) -> QLaurent:
        if self.den:
            raise ArithmeticError(f"{self} is not a Laurent polynomial")
        return self.num

    def at_one(self) -> Fraction:
        return self.num.at_one() / prod(k**e for k, e in self.den.items())

    def bar(self) -> "QRational":
        # [k]_q is bar-invariant
        return QRational(self.num.bar(), self.den)

    def is_symmetric(self) -> bool:
        return self == self.bar()

    def __repr__(self) -> str:
        return f"QRational({self})"

    def __str__(self) -> str:
        if not self.den:
            return str(self.num)
        den = "*".join(f"[{k}]^{e}" if e > 1 else f"[{k}]" for k, e in sorted(self.den.items()))
        return f"({self.num})/({den})"

    def to_json(self):
        out = {"num": self.num.to_json()}
        if self.den:
            out["den"] = {str(k): e for k, e in sorted(self.den.items())}
        return out


# --------------------------------------------------------------------------
# Scalar helpers shared by the classical and refined code paths
# --------------------------------------------------------------------------


def ring_int(k: int, refined: bool):
    """k, or [k]_q in the refined setting."""
    return qint(k) if refined else k


def ring_zero(refined: bool):
    return QRational(QLaurent.const(0)) if refined else Fraction(0)


def ring_one(refined: bool):
    return QRational(QLaurent.const(1)) if refined else Fraction(1)


def divide_by_weights(x, mu: Partition, refined: bool):
    """x / I^mu (classical) or x / I_q^mu (refined)."""
    if refined:
        return QRational.lift(x).divide_by_qints(dict(mu.items()))
    return Fraction(x) / partition_weight_product(mu)


def normalize_scalar(x, refined: bool):
    """Collapse to int / QLaurent when the value is integral / polynomial."""
    if refined:
        x = QRational.lift(x)
        return x.num if x.is_laurent() else x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def scalar_to_json(x):
    if isinstance(x, (int, Fraction)):
        return str(x)
    if isinstance(x, QLaurent):
        return x.to_json()
    if isinstance(x, QRational):
        return x.to_json()
    raise TypeError(type(x))


def scalar_at_one(x) -> Fraction:
    if isinstance(x, (QLaurent, QRational)):
        return x.at_one()
    return Fraction(x)
