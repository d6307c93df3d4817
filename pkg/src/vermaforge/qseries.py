"""Truncated power series in q whose coefficients are polynomials in a marker a."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Sequence, Tuple

from .exact import Poly

MARKER = "a"
_ZERO = Poly()
_ONE = Poly.const(1)


class OrderMismatch(ValueError):
    """Raised when two series of different truncation orders are combined."""


class Series:
    """c_0 + c_1 q + ... + c_N q^N, each c_k a Poly in the marker ``a``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[object] | None = None):
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = [Poly.coerce(c) for c in (coeffs or [])][: order + 1]
        cs += [_ZERO] * (order + 1 - len(cs))
        self.order = order
        self.coeffs: List[Poly] = cs

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls(order, [_ONE])

    @classmethod
    def monomial(cls, order: int, k: int, coeff=1) -> "Series":
        s = cls(order)
        if k <= order:
            s.coeffs[k] = Poly.coerce(coeff)
        return s

    def _check(self, other: "Series"):
        if not isinstance(other, Series):
            raise TypeError("expected a Series")
        if other.order != self.order:
            raise OrderMismatch(f"orders differ: {self.order} vs {other.order}")

    def __add__(self, other):
        self._check(other)
        return Series(self.order, [x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return Series(self.order, [x - y for x, y in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Series(self.order, [-x for x in self.coeffs])

    def scale(self, c) -> "Series":
        c = Poly.coerce(c)
        return Series(self.order, [x * c for x in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self.scale(other)
        self._check(other)
        N = self.order
        out = [_ZERO] * (N + 1)
        for i, x in enumerate(self.coeffs):
            if x.is_zero():
                continue
            for j in range(N + 1 - i):
                y = other.coeffs[j]
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return Series(N, out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Series":
        """Multiply by q^k (k may be negative if the low terms vanish)."""
        N = self.order
        if k >= 0:
            return Series(N, [_ZERO] * k + self.coeffs[: N + 1 - k])
        if any(not c.is_zero() for c in self.coeffs[:-k]):
            raise ValueError("shift would create negative powers of q")
        return Series(N, self.coeffs[-k:])

    def inv(self) -> "Series":
        c0 = self.coeffs[0]
        if not c0.is_constant() or c0.is_zero():
            raise ZeroDivisionError("constant term must be a nonzero rational")
        inv0 = 1 / c0.constant_value()
        N = self.order
        out = [_ZERO] * (N + 1)
        out[0] = Poly.const(inv0)
        for k in range(1, N + 1):
            acc = _ZERO
            for j in range(1, k + 1):
                if not self.coeffs[j].is_zero():
                    acc = acc + self.coeffs[j] * out[k - j]
            out[k] = acc.scale(-inv0)
        return Series(N, out)

    def __eq__(self, other):
        return isinstance(other, Series) and self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def at_a(self, value) -> "Series":
        return Series(self.order, [c.subs({MARKER: value}) for c in self.coeffs])

    def to_json(self) -> str:
        return json.dumps({"order": self.order, "coeffs": [str(c) for c in self.coeffs]},
                          sort_keys=True, separators=(",", ":"))

    def __repr__(self):
        terms = [f"({c})q^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return f"Series[{self.order}](" + " + ".join(terms) + ")"


def series_arith(x: Series, y: Series | None, op: str) -> Series:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class ProductSpec:
    """Product of factors (1 - a^c q^g)^(-m).

    ``factors`` is an explicit list of (c, g, m); ``rule`` optionally maps a
    level g to a list of (c, m) pairs for every g = 1..N (a structured family
    such as "i factors at level i").
    """

    factors: Tuple[Tuple[int, int, int], ...] = ()
    rule: Callable[[int], Iterable[Tuple[int, int]]] | None = field(default=None, compare=False)

    def triples(self, N: int) -> List[Tuple[int, int, int]]:
        out = []
        for c, g, m in self.factors:
            if g < 1:
                raise ValueError("every factor needs q-exponent g >= 1")
            if c < 0:
                raise ValueError("a-exponents must be nonnegative")
            if g <= N and m:
                out.append((c, g, m))
        if self.rule is not None:
            for g in range(1, N + 1):
                for c, m in self.rule(g):
                    if m:
                        out.append((c, g, m))
        return out

    def inverted(self) -> "ProductSpec":
        rule = self.rule
        return ProductSpec(
            tuple((c, g, -m) for c, g, m in self.factors),
            None if rule is None else (lambda g: [(c, -m) for c, m in rule(g)]),
        )


def series_from_product(spec: ProductSpec, N: int) -> Series:
    """Expand the product to order N by repeated one-factor recurrences."""
    coeffs = [_ONE] + [_ZERO] * N
    for c, g, m in spec.triples(N):
        mono = Poly.var(MARKER, c) if c else _ONE
        if m > 0:
            for _ in range(m):
                # divide by (1 - mono q^g): c_k += mono * c_{k-g}, ascending
                for k in range(g, N + 1):
                    if not coeffs[k - g].is_zero():
                        coeffs[k] = coeffs[k] + mono * coeffs[k - g]
        else:
            for _ in range(-m):
                # multiply by (1 - mono q^g): descending
                for k in range(N, g - 1, -1):
                    if not coeffs[k - g].is_zero():
                        coeffs[k] = coeffs[k] - mono * coeffs[k - g]
    return Series(N, coeffs)


def d_da_at_one(x: Series) -> Series:
    """Apply d/da and then set a = 1, coefficientwise."""
    return Series(x.order, [c.derivative(MARKER).subs({MARKER: 1}) for c in x.coeffs])


@dataclass
class CoefficientRow:
    k: int
    lhs: Poly
    rhs: Poly

    @property
    def match(self) -> bool:
        return self.lhs == self.rhs


def equals_to_order(x: Series, y: Series) -> List[CoefficientRow]:
    """Per-coefficient comparison of two series of the same order."""
    x._check(y)
    return [CoefficientRow(k, a, b) for k, (a, b) in enumerate(zip(x.coeffs, y.coeffs))]


def first_mismatch(rows: List[CoefficientRow]):
    for r in rows:
        if not r.match:
            return r.k
    return None
