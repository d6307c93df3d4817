"""The algebras U_lambda and U_lambda(t), band-matrix realizations, and
contravariant forms on generalized Verma modules over gl(lambda), the
hyperboloid algebra and the cone.

Elements of U_lambda(t) are kept in the normal form
    sum_k e^k p_k(h) + p_0(h) + sum_k f^k q_k(h)
with powers of e, f on the LEFT.  Internally a graded piece is indexed by an
integer k: k > 0 means e^k, k < 0 means f^{-k}.  Commuting h past a power
of the generators is uniform in this notation: p(h) g^k = g^k p(h + 2kt).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .exact import Poly, bareiss_det, poly_gcd, rank_q, root_multiplicity

H = "h"
Value = Union[int, Fraction, Poly]


def _p(x) -> Poly:
    return Poly.coerce(x)


def shift_h(p: Poly, amount) -> Poly:
    """p(h) -> p(h + amount)."""
    amount = _p(amount)
    if amount.is_zero() or H not in p.variables():
        return p
    return p.subs({H: Poly.var(H) + amount})


@dataclass(frozen=True)
class UParams:
    """lambda and t; either may be a rational or a Poly (symbol)."""

    lam: Value = Fraction(0)
    t: Value = Fraction(1)

    @property
    def c(self) -> Poly:
        lam = _p(self.lam)
        return (lam * (lam + 2)).scale(Fraction(1, 2))

    def T1(self, arg: Optional[Poly] = None) -> Poly:
        h = Poly.var(H) if arg is None else _p(arg)
        t = _p(self.t)
        return (t * h - (h * h).scale(Fraction(1, 2)) + self.c).scale(Fraction(1, 2))

    def T2(self, arg: Optional[Poly] = None) -> Poly:
        h = Poly.var(H) if arg is None else _p(arg)
        return self.T1(h) - _p(self.t) * h

    def check_generic(self):
        """Reject lambda whose T_1 roots differ by an even integer."""
        lam = self.lam
        if isinstance(lam, Poly):
            return
        # roots of T_1 at t=1 are -lam and lam+2; their difference is 2 lam + 2
        diff = 2 * Fraction(lam) + 2
        if diff.denominator == 1 and diff.numerator % 2 == 0:
            raise ValueError(f"lambda = {lam} is degenerate (T_1 roots differ by an even integer)")


class UElement:
    """Normal-form element: dict k -> Poly in h (and parameter symbols)."""

    __slots__ = ("parts",)

    def __init__(self, parts: Optional[Dict[int, Poly]] = None):
        self.parts: Dict[int, Poly] = {k: _p(v) for k, v in (parts or {}).items() if not _p(v).is_zero()}

    @classmethod
    def e(cls, k: int = 1, p=1) -> "UElement":
        return cls({k: _p(p)})

    @classmethod
    def f(cls, k: int = 1, p=1) -> "UElement":
        return cls({-k: _p(p)})

    @classmethod
    def poly(cls, p) -> "UElement":
        return cls({0: _p(p)})

    @classmethod
    def h(cls, j: int = 1) -> "UElement":
        return cls({0: Poly.var(H, j)})

    def is_zero(self) -> bool:
        return not self.parts

    def __add__(self, other: "UElement") -> "UElement":
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = out[k] + v if k in out else v
        return UElement(out)

    def __sub__(self, other: "UElement") -> "UElement":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "UElement":
        c = _p(c)
        return UElement({k: v * c for k, v in self.parts.items()})

    def map_coeffs(self, fn) -> "UElement":
        return UElement({k: fn(v) for k, v in self.parts.items()})

    def __eq__(self, other):
        return isinstance(other, UElement) and self.parts == other.parts

    def __hash__(self):
        return hash(frozenset(self.parts.items()))

    def __str__(self):
        if not self.parts:
            return "0"
        out = []
        for k in sorted(self.parts, reverse=True):
            g = "" if k == 0 else (f"e^{k}" if k > 0 else f"f^{-k}")
            out.append(f"{g}({self.parts[k]})" if g else f"({self.parts[k]})")
        return " + ".join(out)

    __repr__ = __str__


def _word(p: UParams, a: int, b: int) -> Tuple[int, Poly]:
    """g^a g^b = g^k M(h)."""
    t = _p(p.t)
    h = Poly.var(H)
    if a * b >= 0:
        return a + b, Poly.const(1)
    if a > 0:
        c = -b
        m = min(a, c)
        M = Poly.const(1)
        for l in range(m):
            M = M * p.T1(h - t.scale(2 * l))  # e^m f^m
        if a >= c:
            return a - c, M
        # e^a f^c = (e^a f^a) f^{c-a} = f^{c-a} M(h - 2(c-a)t)
        return -(c - a), shift_h(M, t.scale(-2 * (c - a)))
    c = -a
    m = min(c, b)
    M = Poly.const(1)
    for l in range(m):
        M = M * p.T2(h + t.scale(2 * l))  # f^m e^m
    if c >= b:
        return -(c - b), M
    return b - c, shift_h(M, t.scale(2 * (b - c)))


def u_product(p: UParams, x: UElement, y: UElement) -> UElement:
    """Associative product in U_lambda(t)."""
    t = _p(p.t)
    out: Dict[int, Poly] = {}
    for a, P in x.parts.items():
        for b, Q in y.parts.items():
            k, M = _word(p, a, b)
            val = M * shift_h(P, t.scale(2 * b)) * Q
            out[k] = out[k] + val if k in out else val
    return UElement(out)


def commutator(p: UParams, x: UElement, y: UElement) -> UElement:
    return u_product(p, x, y) - u_product(p, y, x)


def lie_bracket(p: UParams, x: UElement, y: UElement, at_zero: bool = False) -> UElement:
    """(xy - yx)/t with symbolic t; ``at_zero`` sets t = 0 afterwards."""
    if not isinstance(p.t, Poly):
        raise ValueError("lie_bracket needs a symbolic t")
    tname = p.t.variables()[0]
    c = commutator(p, x, y)
    out = {}
    for k, v in c.parts.items():
        q = v.exact_div(p.t)
        out[k] = q.subs({tname: 0}) if at_zero else q
    return UElement(out)


def tau(p_t: Value, x: UElement) -> UElement:
    """Anti-automorphism e <-> f fixing h:  g^k p(h) -> g^{-k} p(h - 2kt)."""
    t = _p(p_t)
    return UElement({-k: shift_h(v, t.scale(-2 * k)) for k, v in x.parts.items()})


# -- Lie algebra instances ---------------------------------------------------------

class LieInstance:
    """gl(lambda) (t = 1, bracket = commutator) or the leaf algebra (t -> 0)."""

    def __init__(self, kind: str, lam: Value):
        if kind not in ("gl-lambda", "hyperboloid", "cone"):
            raise ValueError(f"unknown algebra {kind!r}")
        self.kind = kind
        if kind == "cone":
            lam = Fraction(0)
        self.lam = lam
        if kind == "gl-lambda":
            self.params = UParams(lam, Fraction(1))
            self.t0 = Fraction(1)
        else:
            self.params = UParams(lam, Poly.var("t"))
            self.t0 = Fraction(0)
        self._cache: Dict[Tuple[int, int, int, int], UElement] = {}

    @property
    def c(self) -> Poly:
        return self.params.c

    def basis_bracket(self, a: int, i: int, b: int, j: int) -> UElement:
        """[g^a h^i, g^b h^j]."""
        key = (a, i, b, j)
        if key not in self._cache:
            x = UElement({a: Poly.var(H, i)})
            y = UElement({b: Poly.var(H, j)})
            if self.kind == "gl-lambda":
                val = commutator(self.params, x, y)
            else:
                val = lie_bracket(self.params, x, y, at_zero=True)
            self._cache[key] = val
        return self._cache[key]

    def bracket(self, x: UElement, y: UElement) -> UElement:
        out = UElement()
        for a, P in x.parts.items():
            for b, Q in y.parts.items():
                for i, cp in P.coeffs_in(H).items():
                    for j, cq in Q.coeffs_in(H).items():
                        out = out + self.basis_bracket(a, i, b, j).scale(cp * cq)
        return out

    def tau(self, x: UElement) -> UElement:
        return tau(self.t0, x)

    def ideal_generator(self, l: int, beta: Value) -> Poly:
        """g_l(h) with f^l g_l(h) C[h] the level-l part of the parabolic lowering subalgebra."""
        h = Poly.var(H)
        out = Poly.const(1)
        for r in range(l):
            out = out * (h - _p(beta) - _p(self.t0).scale(2 * r))
        return out


def closure_generator(inst: LieInstance, beta: Fraction, levels: int, degree: int = 3):
    """Derive g_l by closing f (h - beta) C[h] under brackets (numeric parameters).

    Returns, per level l, (monic gcd of the generated polynomials,
    codimension of their span inside the polynomials of degree <= max degree).
    """
    h = Poly.var(H)
    level1 = [(h - beta) * h ** i for i in range(degree + 1)]
    spans = {1: level1}
    out = []
    for l in range(1, levels + 1):
        polys = spans[l]
        g = Poly()
        for q in polys:
            g = poly_gcd(g, q, H) if not g.is_zero() else q.scale(1 / q.leading()[1])
        top = max(q.degree(H) for q in polys)
        rows = [[q.univariate_coeffs(H)[k] if k <= q.degree(H) else Fraction(0) for k in range(top + 1)]
                for q in polys]
        codim = top + 1 - rank_q(rows)
        out.append((g, codim))
        if l < levels:
            new = []
            for A in level1[:2]:
                for B in polys:
                    br = inst.bracket(UElement.f(1, A), UElement.f(l, B))
                    val = br.parts.get(-(l + 1))
                    if val is not None and not val.is_zero():
                        new.append(val)
            spans[l + 1] = new
    return out


# -- generalized Verma modules --------------------------------------------------------

Label = Tuple[int, int]                 # (l, j): f^l h^j with j < l
PMono = Tuple[Label, ...]                # sorted PBW monomial


@dataclass
class GVMContext:
    """Generalized Verma module data.

    ``beta`` is the internal parabolic root: the level-one lowering part of
    the parabolic is f (h - beta) C[h].  For gl(lambda) this is the usual
    alpha + 2; for the leaf algebras it equals alpha.
    """

    algebra: str
    lam: Value
    beta: Value
    chi_h: Value
    chi_one: Value = Fraction(1)
    max_level: int = 3

    def __post_init__(self):
        self.inst = LieInstance(self.algebra, self.lam)
        if self.algebra == "gl-lambda":
            self.inst.params.check_generic()
        self._chi: List[Poly] = [_p(self.chi_one), _p(self.chi_h)]
        self._act_memo: Dict = {}
        self._gen: Dict[int, Poly] = {}

    # -- character -------------------------------------------------------------
    def constraint(self, m: int) -> Poly:
        """[e, f (h - beta) h^m], an element of C[h] on which chi must vanish."""
        h = Poly.var(H)
        A = (h - _p(self.beta)) * h ** m
        br = self.inst.bracket(UElement.e(1), UElement.f(1, A))
        return br.parts.get(0, Poly())

    def chi_value(self, k: int) -> Poly:
        while len(self._chi) <= k:
            m = len(self._chi) - 2
            C = self.constraint(m)
            coeffs = C.coeffs_in(H)
            top = m + 2
            lead = coeffs.get(top, Poly())
            if C.degree(H) != top or not lead.is_constant() or lead.is_zero():
                raise ArithmeticError("character extension system is inconsistent")
            acc = Poly()
            for j, cj in coeffs.items():
                if j < top:
                    acc = acc + cj * self._chi[j]
            self._chi.append(acc.scale(-1 / lead.constant_value()))
        return self._chi[k]

    def chi(self, p: Poly) -> Poly:
        out = Poly()
        for j, cj in p.coeffs_in(H).items():
            out = out + cj * self.chi_value(j)
        return out

    def g(self, l: int) -> Poly:
        if l not in self._gen:
            self._gen[l] = self.inst.ideal_generator(l, self.beta)
        return self._gen[l]

    # -- adapted basis ------------------------------------------------------------
    def decompose(self, x: UElement) -> Dict[tuple, Poly]:
        """Coordinates in the adapted basis.

        keys: ('e', k, j) = e^k h^j, ('h', j) = h^j, ('a', l, j) = f^l h^j with
        j < l (complement), ('n', l, i) = f^l g_l(h) h^i (parabolic part).
        """
        out: Dict[tuple, Poly] = {}

        def add(key, c):
            if c.is_zero():
                return
            if key in out:
                s = out[key] + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = c

        for k, P in x.parts.items():
            if k > 0:
                for j, c in P.coeffs_in(H).items():
                    add(("e", k, j), c)
            elif k == 0:
                for j, c in P.coeffs_in(H).items():
                    add(("h", j), c)
            else:
                l = -k
                quot, rem = _divmod_h(P, self.g(l))
                for j, c in rem.coeffs_in(H).items():
                    add(("a", l, j), c)
                for i, c in quot.coeffs_in(H).items():
                    add(("n", l, i), c)
        return out

    def element(self, key: tuple) -> UElement:
        if key[0] == "e":
            return UElement.e(key[1], Poly.var(H, key[2]))
        if key[0] == "h":
            return UElement.h(key[1])
        if key[0] == "a":
            return UElement.f(key[1], Poly.var(H, key[2]))
        return UElement.f(key[1], self.g(key[1]) * Poly.var(H, key[2]))

    # -- action on PBW monomials -------------------------------------------------
    def act_key(self, key: tuple, mono: PMono) -> Dict[PMono, Poly]:
        memo_key = (key, mono)
        if memo_key in self._act_memo:
            return self._act_memo[memo_key]
        out: Dict[PMono, Poly] = {}
        if key[0] == "a":
            label = (key[1], key[2])
            if not mono or label <= mono[0]:
                out[(label,) + mono] = Poly.const(1)
            else:
                a1, rest = mono[0], mono[1:]
                inner = self.act_key(key, rest)
                _accumulate(out, self.act_vec(("a",) + a1, inner))
                _accumulate(out, self.act_elem(self.inst.bracket(self.element(key), self.element(("a",) + a1)), rest))
        elif not mono:
            if key[0] == "h":
                val = self.chi_value(key[1])
                if not val.is_zero():
                    out[()] = val
        else:
            a1, rest = mono[0], mono[1:]
            inner = self.act_key(key, rest)
            _accumulate(out, self.act_vec(("a",) + a1, inner))
            _accumulate(out, self.act_elem(self.inst.bracket(self.element(key), self.element(("a",) + a1)), rest))
        self._act_memo[memo_key] = out
        return out

    def act_vec(self, key: tuple, vec: Dict[PMono, Poly]) -> Dict[PMono, Poly]:
        out: Dict[PMono, Poly] = {}
        for m, c in vec.items():
            _accumulate(out, self.act_key(key, m), c)
        return out

    def act_elem(self, x: UElement, mono: PMono) -> Dict[PMono, Poly]:
        out: Dict[PMono, Poly] = {}
        for key, c in self.decompose(x).items():
            _accumulate(out, self.act_key(key, mono), c)
        return out

    # -- Gram matrix ---------------------------------------------------------------
    def basis(self, level: int) -> List[PMono]:
        labels = [(l, j) for l in range(1, level + 1) for j in range(l)]
        out: List[PMono] = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for idx in range(start, len(labels)):
                l, j = labels[idx]
                if l <= remaining:
                    rec(idx, remaining - l, acc + [labels[idx]])

        rec(0, level, [])
        return sorted(out)

    def pairing(self, m1: PMono, m2: PMono) -> Poly:
        vec: Dict[PMono, Poly] = {m2: Poly.const(1)}
        for label in m1:
            x = self.inst.tau(UElement.f(label[0], Poly.var(H, label[1])))
            nxt: Dict[PMono, Poly] = {}
            for m, c in vec.items():
                _accumulate(nxt, self.act_elem(x, m), c)
            vec = nxt
        return vec.get((), Poly())

    def gram_matrix(self, level: int):
        if level > self.max_level:
            raise ValueError(f"level {level} exceeds the configured bound {self.max_level}")
        B = self.basis(level)
        G = [[self.pairing(a, b) for b in B] for a in B]
        return B, G


def _divmod_h(P: Poly, g: Poly) -> Tuple[Poly, Poly]:
    """Division in h by a polynomial monic in h (coefficients may hold symbols)."""
    d = g.degree(H)
    gc = g.coeffs_in(H)
    if gc.get(d) != Poly.const(1):
        raise ValueError("divisor must be monic in h")
    rem = dict(P.coeffs_in(H))
    quot: Dict[int, Poly] = {}
    for k in range(max(rem, default=-1), d - 1, -1):
        c = rem.pop(k, Poly())
        if c.is_zero():
            continue
        quot[k - d] = c
        for j, gj in gc.items():
            if j != d:
                rem[k - d + j] = rem.get(k - d + j, Poly()) - c * gj
    h = Poly.var(H)
    Q = Poly()
    for k, c in quot.items():
        Q = Q + c * h ** k
    R = Poly()
    for k, c in rem.items():
        if k < d:
            R = R + c * h ** k
    return Q, R


def _accumulate(acc: Dict, vec: Dict, scale: Poly | None = None):
    for m, c in vec.items():
        if scale is not None:
            c = c * scale
        if c.is_zero():
            continue
        if m in acc:
            s = acc[m] + c
            if s.is_zero():
                del acc[m]
            else:
                acc[m] = s
        else:
            acc[m] = c


@dataclass
class GVMGramReport:
    algebra: str
    level: int
    basis: List[PMono]
    matrix: List[List[Poly]]
    det: Poly

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "level": self.level,
            "basis": ["*".join(f"f^{l}h^{j}" for l, j in m) for m in self.basis],
            "det": str(self.det),
        }


def gvm_gram(ctx: GVMContext, level: int) -> GVMGramReport:
    B, G = ctx.gram_matrix(level)
    return GVMGramReport(ctx.algebra, level, B, G, bareiss_det(G))


def strip_factor(p: Poly, f: Poly) -> Tuple[int, Poly]:
    """Largest k with f^k | p, and the cofactor."""
    k = 0
    while not p.is_zero():
        try:
            p = p.exact_div(f)
        except ArithmeticError:
            break
        k += 1
    return k, p


# -- band matrices -----------------------------------------------------------------------

class WindowError(ValueError):
    """An operation needed band entries outside the stored window."""


class BandAlgebra:
    """Band matrices with e f = diag(E), f e = diag(F), F_i = E_{i-1}.

    ``E`` is a function of the index.  Mat_inf has E = 1; Mat_{inf,s} has
    E_i = T_1(s - 2i); the degenerate algebra gl_{inf,(i0)} has E = 1 except
    E_{i0} = 0.
    """

    def __init__(self, E, name: str = ""):
        self.E = E
        self.name = name

    def F(self, i):
        return self.E(i - 1)

    @classmethod
    def undeformed(cls):
        return cls(lambda i: Fraction(1), "Mat_inf")

    @classmethod
    def deformed(cls, p: UParams, s):
        s = Fraction(s)
        return cls(lambda i: p.T1(Poly.const(s - 2 * i)).constant_value(), f"Mat_inf,s={s}")

    @classmethod
    def degenerate(cls, i0: int):
        return cls(lambda i: Fraction(0) if i == i0 else Fraction(1), f"gl_inf,({i0})")

    def word(self, a: int, b: int):
        """g^a g^b = g^k M with M a function of the index."""
        if a * b >= 0:
            return a + b, (lambda i: Fraction(1))
        E, F = self.E, self.F
        if a > 0:
            c = -b
            m = min(a, c)
            # e^a f^c: peel one e f at a time from the middle
            shifts = [c - 1 - l for l in range(m)]

            def M(i, shifts=shifts):
                out = Fraction(1)
                for sh in shifts:
                    out *= E(i + sh)
                return out
            return a - c, M
        c = -a
        m = min(c, b)
        shifts = [b - 1 - l for l in range(m)]

        def M2(i, shifts=shifts):
            out = Fraction(1)
            for sh in shifts:
                out *= F(i - sh)
            return out
        return b - c, M2


@dataclass
class BandElement:
    """sum_k g^k diag(A_k), A_k stored on the index range [lo, hi]."""

    alg: BandAlgebra
    lo: int
    hi: int
    comps: Dict[int, Dict[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowError("empty index range")
        clean = {}
        for k, seq in self.comps.items():
            seq = {i: Fraction(v) for i, v in seq.items() if self.lo <= i <= self.hi}
            if any(seq.values()):
                clean[k] = seq
        self.comps = clean

    def value(self, k: int, i: int) -> Fraction:
        if not self.lo <= i <= self.hi:
            raise WindowError(f"index {i} outside [{self.lo}, {self.hi}]")
        return self.comps.get(k, {}).get(i, Fraction(0))

    def __add__(self, other: "BandElement") -> "BandElement":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        ks = set(self.comps) | set(other.comps)
        return BandElement(self.alg, lo, hi, {k: {i: self.value(k, i) + other.value(k, i)
                                                  for i in range(lo, hi + 1)} for k in ks})

    def scale(self, c) -> "BandElement":
        return BandElement(self.alg, self.lo, self.hi,
                           {k: {i: v * c for i, v in seq.items()} for k, seq in self.comps.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other: "BandElement") -> "BandElement":
        # (g^a A)(g^b B) = g^a g^b D^b(A) B with D^b(A)_i = A_{i-b}
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        for a in self.comps:
            for b in other.comps:
                lo = max(lo, self.lo + b)
                hi = min(hi, self.hi + b)
        if lo > hi:
            raise WindowError("product leaves no valid indices in the window")
        out: Dict[int, Dict[int, Fraction]] = {}
        for a, A in self.comps.items():
            for b, B in other.comps.items():
                k, M = self.alg.word(a, b)
                seq = out.setdefault(k, {})
                for i in range(lo, hi + 1):
                    v = A.get(i - b, Fraction(0)) * B.get(i, Fraction(0))
                    if v:
                        seq[i] = seq.get(i, Fraction(0)) + M(i) * v
        return BandElement(self.alg, lo, hi, out)

    def bracket(self, other: "BandElement") -> "BandElement":
        return self * other - other * self

    def restrict(self, lo: int, hi: int) -> "BandElement":
        if lo < self.lo or hi > self.hi:
            raise WindowError("cannot widen a band element")
        return BandElement(self.alg, lo, hi, self.comps)

    def agrees_with(self, other: "BandElement") -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise WindowError("no common indices")
        ks = set(self.comps) | set(other.comps)
        return all(self.value(k, i) == other.value(k, i) for k in ks for i in range(lo, hi + 1))

    def left_coeffs(self, k: int) -> Dict[int, Fraction]:
        """Coefficients written as diag(C) g^k: C_j = A_{j+k}."""
        A = self.comps.get(k, {})
        return {j: A.get(j + k, Fraction(0)) for j in range(self.lo - k, self.hi - k + 1)
                if self.lo <= j + k <= self.hi}


def _window_values(p: Poly, s: Fraction, W: int) -> Dict[int, Fraction]:
    return {i: p.subs({H: s - 2 * i}).constant_value() for i in range(-W, W + 1)}


def _require_numeric(x: UElement):
    for v in x.parts.values():
        if [n for n in v.variables() if n != H]:
            raise ValueError("band images need numeric parameters")


def gamma_s(p: UParams, x: UElement, s, W: int) -> BandElement:
    """Image of x under e -> diag(T_1(s-2i)) e, f -> f, p(h) -> diag(p(s-2i))."""
    if _p(p.t) != Poly.const(1):
        raise ValueError("gamma_s is defined at t = 1")
    _require_numeric(x)
    s = Fraction(s)
    T = {i: p.T1(Poly.const(s - 2 * i)).constant_value() for i in range(-W - 64, W + 65)}
    comps: Dict[int, Dict[int, Fraction]] = {}
    for k, P in x.parts.items():
        vals = _window_values(P, s, W)
        if k > 0:
            # (T e)^k = e^k prod_{m=1..k} D^m(T), (D^m T)_i = T_{i-m}
            seq = {}
            for i in range(-W, W + 1):
                prod = Fraction(1)
                for m in range(1, k + 1):
                    prod *= T[i - m]
                seq[i] = prod * vals[i]
            comps[k] = seq
        else:
            comps[k] = vals
    return BandElement(BandAlgebra.undeformed(), -W, W, comps)


def phi_s(p: UParams, x: UElement, s, W: int) -> BandElement:
    """Image in Mat_{inf,s}: e -> e, f -> f, p(h) -> diag(p(s-2i))."""
    _require_numeric(x)
    s = Fraction(s)
    comps = {k: _window_values(P, s, W) for k, P in x.parts.items()}
    return BandElement(BandAlgebra.deformed(p, s), -W, W, comps)


def psi_s(p: UParams, y: BandElement, s) -> BandElement:
    """Mat_{inf,s} -> Mat_inf: diagonals and f fixed, e -> diag(T_1(s-2i)) e."""
    s = Fraction(s)
    comps = {}
    for k, A in y.comps.items():
        if k > 0:
            seq = {}
            for i, v in A.items():
                prod = Fraction(1)
                for m in range(1, k + 1):
                    prod *= p.T1(Poly.const(s - 2 * (i - m))).constant_value()
                seq[i] = prod * v
            comps[k] = seq
        else:
            comps[k] = dict(A)
    return BandElement(BandAlgebra.undeformed(), y.lo, y.hi, comps)


def delta_poly(j: int, s, W: int) -> Poly:
    """Polynomial in h equal to 1 at s - 2j and 0 at s - 2i for the other |i| <= W."""
    s = Fraction(s)
    h = Poly.var(H)
    out = Poly.const(1)
    for i in range(-W, W + 1):
        if i != j:
            out = out * (h - (s - 2 * i)).scale(Fraction(1, 2 * (i - j)))
    return out


def random_uelement(rng: random.Random, max_deg: int = 4, max_h: int = 2) -> UElement:
    parts = {}
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(-max_deg, max_deg)
        coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(rng.randint(1, max_h + 1))]
        p = Poly.from_coeffs(H, coeffs)
        parts[k] = parts[k] + p if k in parts else p
    return UElement(parts)


# -- degenerate singular vector -------------------------------------------------------------

def _unit(alg: BandAlgebra, k: int, idx: int, W: int) -> BandElement:
    return BandElement(alg, -W, W, {k: {idx: Fraction(1)}})


def degenerate_singular_check(i: int, W: int) -> bool:
    """x = [...[f_0, f_1], ..., f_i] (or the mirror for i < 0) in gl_{inf,(i)}.

    Returns True when every simple raising e_j in the window kills x.v: the
    bracket [e_j, x] may not have entries crossing between indices <= 0 and
    >= 1 (those are the only lowering directions not killing v), and a
    diagonal result must vanish together with its central term.
    """
    if abs(i) + 2 > W:
        raise WindowError("window too small")
    alg = BandAlgebra.degenerate(i)

    def f_(l):   # E_{l+1, l} = f . 1_l
        return _unit(alg, -1, l, W)

    def e_(l):   # E_{l, l+1} = e . 1_{l+1}
        return _unit(alg, 1, l + 1, W)

    if i >= 0:
        x = f_(0)
        for l in range(1, i + 1):
            x = x.bracket(f_(l))
    else:
        x = f_(i)
        for l in range(i + 1, 1):
            x = x.bracket(f_(l))
    depth = abs(i) + 1
    if not _acts_nontrivially(x, depth):
        return False
    for j in range(-W + depth + 1, W - depth - 1):
        y = e_(j).bracket(x)
        if not _kills_vacuum(y, alg, j, x):
            return False
    return True


def _acts_nontrivially(x: BandElement, depth: int) -> bool:
    seq = x.comps.get(-depth, {})
    return any(seq.get(i, 0) for i in range(1 - depth, 1))


def _kills_vacuum(y: BandElement, alg: BandAlgebra, j: int, x: BandElement) -> bool:
    for k, seq in y.comps.items():
        if k < 0:
            c = -k
            # entry (i + c, i) crosses the centre when i <= 0 < i + c
            if any(seq.get(i, 0) for i in range(1 - c, 1)):
                return False
        elif k == 0:
            if any(seq.values()):
                return False
            # central term from the crossing pair (E_01, E_10): coefficient of f_0 in x times E_0
            if j == 0 and x.comps.get(-1, {}).get(0, 0) * alg.E(0):
                return False
    return True


def nondegenerate_counterpart(i: int, W: int) -> bool:
    """Same nested bracket in the undeformed algebra with nonzero central charge.

    Used as a negative control: there x.v is not singular."""
    alg = BandAlgebra.undeformed()
    f_ = lambda l: _unit(alg, -1, l, W)  # noqa: E731
    e_ = lambda l: _unit(alg, 1, l + 1, W)  # noqa: E731
    x = f_(0)
    for l in range(1, i + 1):
        x = x.bracket(f_(l))
    depth = i + 1
    for j in range(-W + depth + 1, W - depth - 1):
        if not _kills_vacuum(e_(j).bracket(x), alg, j, x):
            return False
    return True


# -- determinant factorization through the band realization ------------------------------

def delta_basis(level: int) -> List[Tuple[Tuple[int, int], ...]]:
    """Multisets of generators (i, j), j in [-i+1, 0], with sum of i equal to level.

    The generator (i, j) stands for f^i delta_{j,s}; the count per level is
    the coefficient of q^level in prod (1 - q^i)^{-i}.
    """
    gens = [(i, j) for i in range(1, level + 1) for j in range(-i + 1, 1)]
    out = []

    def rec(idx, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for k in range(idx, len(gens)):
            if gens[k][0] <= remaining:
                rec(k, remaining - gens[k][0], acc + [gens[k]])

    rec(0, level, [])
    return out


def eq29_factor(p: UParams, level: int) -> Poly:
    """prod over the delta basis, over generators (i, j), of prod_{l<i} T_1(s - 2j - 2l), in s."""
    s = Poly.var("s")
    out = Poly.const(1)
    for w in delta_basis(level):
        for i, j in w:
            for l in range(i):
                out = out * p.T1(s - (2 * j + 2 * l))
    return out


def _root_poly(roots: Iterable[int]) -> Poly:
    mu = Poly.var("mu")
    out = Poly.const(1)
    for r in roots:
        out = out * (mu - r)
    return out


def verify_eq29(level: int, s, lam, n: Optional[int] = None):
    """Check det = (T_1-product in s) * det Phi_inf(mu) level by level.

    Rows of the returned report:
      k=0  mu-degree of det Phi  vs  local-identity coefficient at q^level
      k=1  number of delta-basis generators  vs  the same coefficient
      k=2  monic polynomial on the mu-roots of the product at s  vs  the one on
           the contents of diagrams of weight <= level (s non-exceptional);
           at an exceptional s this row checks that the factor vanishes there
      k=3  zero order of the s-factor at the exceptional point  vs  mu-degree
    The exceptional point is s itself when T_1(s) = 0, otherwise -lambda.
    """
    from .glmod import AlgebraContext, gram
    from .identities import VerificationReport, plane_product
    from .qseries import CoefficientRow, d_da_at_one
    from .young import enumerate_diagrams

    lam, s = Fraction(lam), Fraction(s)
    n = level if n is None else n
    if n < level:
        raise ValueError("need n >= level")
    p = UParams(lam, Fraction(1))
    p.check_generic()
    rep = gram(AlgebraContext(n), level)
    deg = rep.det.degree("mu")
    local = d_da_at_one(plane_product(level, marker=True)).coeffs[level].constant_value()
    basis = delta_basis(level)
    gens = sum(len(w) for w in basis)
    factor = eq29_factor(p, level)
    fs = factor.subs({"s": s}).constant_value()
    predicted = sorted({c for d in enumerate_diagrams(level) for c in d.contents()})
    exceptional = p.T1(Poly.const(s)).is_zero()
    point = s if exceptional else -lam
    order = root_multiplicity(factor, point, "s")
    if exceptional:
        row2 = CoefficientRow(2, Poly.const(fs), Poly.const(0))
    elif fs == 0:
        row2 = CoefficientRow(2, Poly(), _root_poly(predicted))
    else:
        row2 = CoefficientRow(2, _root_poly(r for r, _ in rep.roots), _root_poly(predicted))
    rows = [
        CoefficientRow(0, Poly.const(deg), Poly.const(local)),
        CoefficientRow(1, Poly.const(gens), Poly.const(local)),
        row2,
        CoefficientRow(3, Poly.const(order), Poly.const(deg)),
    ]
    notes = {
        "basis_size": len(basis),
        "exceptional": exceptional,
        "factor_at_s_is_zero": fs == 0,
        "mu_roots": [r for r, _ in rep.roots],
        "zero_order_point": str(point),
    }
    return VerificationReport("eq29", {"level": level, "s": str(s), "lambda": str(lam), "n": n},
                              level, rows, notes)
