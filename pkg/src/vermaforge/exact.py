"""Exact sparse multivariate polynomials over the rationals, plus the few
pieces of exact linear algebra the rest of the package needs (fraction-free
determinants, ranks, nullspaces and t-adic invariant factors).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Sequence, Tuple, Union

# Fixed symbol order used for the graded lexicographic term order.  Names not
# in this list sort after it, alphabetically.
SYMBOLS = ("mu", "t", "a", "s", "x", "beta", "lam", "c", "h", "q")
_RANK = {name: i for i, name in enumerate(SYMBOLS)}

Monomial = Tuple[Tuple[str, int], ...]
Number = Union[int, Fraction]


def _rank(name: str):
    r = _RANK.get(name)
    if r is None:
        return (1, name)
    return (0, r)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda it: _rank(it[0])))


def _mono_key(m: Monomial):
    return (sum(e for _, e in m), tuple((_rank(v), -e) for v, e in m))


class Poly:
    """Sparse polynomial: a dict from monomials to nonzero Fractions.

    A monomial is a tuple of ``(variable, exponent)`` pairs sorted by the
    fixed symbol order.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms: Dict[Monomial, Fraction] = clean

    # -- construction -----------------------------------------------------
    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls._raw({(): Fraction(c)} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        if power == 0:
            return cls.const(1)
        return cls._raw({((name, power),): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        raise TypeError(f"cannot turn {type(x).__name__} into a Poly")

    @classmethod
    def from_coeffs(cls, name: str, coeffs: Sequence[Number]) -> "Poly":
        """Univariate polynomial sum(coeffs[k] * name^k)."""
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                terms[((name, k),) if k else ()] = Fraction(c)
        return cls._raw(terms)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> List[str]:
        names = {v for m in self.terms for v, _ in m}
        return sorted(names, key=_rank)

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``.  The zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def coeffs_in(self, var: str) -> Dict[int, "Poly"]:
        """Split as sum over k of (coefficient Poly) * var^k."""
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for v, e in m:
                if v == var:
                    k = e
                else:
                    rest.append((v, e))
            out.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly._raw(t) for k, t in out.items()}

    def univariate_coeffs(self, var: str) -> List[Fraction]:
        """Dense coefficient list of a polynomial in ``var`` alone."""
        extra = [v for v in self.variables() if v != var]
        if extra:
            raise ValueError(f"{self} involves {extra} besides {var}")
        deg = max(self.degree(var), 0)
        out = [Fraction(0)] * (deg + 1)
        for m, c in self.terms.items():
            out[m[0][1] if m else 0] = c
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda it: _mono_key(it[0]), reverse=True)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s += c
                if s:
                    t[m] = s
                else:
                    del t[m]
        return Poly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "Poly":
        if not c:
            return Poly._raw({})
        c = Fraction(c)
        if c == 1:
            return self
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly._raw({})
        if len(other.terms) == 1 and () in other.terms:
            return self.scale(other.terms[()])
        if len(self.terms) == 1 and () in self.terms:
            return other.scale(self.terms[()])
        t: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = t.get(m, 0) + c1 * c2
                if v:
                    t[m] = v
                else:
                    t.pop(m, None)
        return Poly._raw(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(c))
        if isinstance(c, Poly):
            return self.exact_div(c)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution -------------------------------------------
    def derivative(self, var: str) -> "Poly":
        t: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if not e:
                continue
            if e == 1:
                del d[var]
            else:
                d[var] = e - 1
            nm = tuple(sorted(d.items(), key=lambda it: _rank(it[0])))
            t[nm] = t.get(nm, 0) + c * e
        return Poly(t)

    def subs(self, values: Mapping[str, object]) -> "Poly":
        """Substitute numbers or polynomials for variables (simultaneously)."""
        values = {k: Poly.coerce(v) for k, v in values.items()}
        powers: Dict[Tuple[str, int], Poly] = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = values[v] ** e
            return powers[key]

        out = Poly()
        acc: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            keep = []
            factor = None
            for v, e in m:
                if v in values:
                    f = power(v, e)
                    factor = f if factor is None else factor * f
                else:
                    keep.append((v, e))
            if factor is None:
                acc[tuple(keep)] = acc.get(tuple(keep), 0) + c
            else:
                out = out + Poly._raw({tuple(keep): c}) * factor
        return out + Poly(acc)

    def eval(self, values: Mapping[str, object]) -> Fraction:
        """Value at a full assignment of rationals; unbound variables are an error."""
        missing = [v for v in self.variables() if v not in values]
        if missing:
            raise KeyError(f"no value for variable(s) {', '.join(missing)}")
        return self.subs(values).constant_value()

    # -- division ------------------------------------------------------------
    def leading(self):
        return max(self.terms.items(), key=lambda it: _mono_key(it[0]))

    def exact_div(self, other) -> "Poly":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        other = Poly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lm, lc = other.leading()
        ld = dict(lm)
        rem = self
        quot: Dict[Monomial, Fraction] = {}
        while rem.terms:
            m, c = rem.leading()
            d = dict(m)
            q = {}
            for v, e in ld.items():
                if d.get(v, 0) < e:
                    raise ArithmeticError(f"{other} does not divide {self}")
            for v, e in d.items():
                r = e - ld.get(v, 0)
                if r:
                    q[v] = r
            qm = tuple(sorted(q.items(), key=lambda it: _rank(it[0])))
            qc = c / lc
            quot[qm] = quot.get(qm, 0) + qc
            rem = rem - other * Poly._raw({qm: qc})
        return Poly(quot)

    def divides(self, other) -> bool:
        try:
            Poly.coerce(other).exact_div(self)
            return True
        except ArithmeticError:
            return False

    # -- printing ------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            mag = abs(c)
            if not mono:
                body = _frac_str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_frac_str(mag)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({self})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rat_str(x) -> str:
    """Canonical text for a rational: "p" or "p/q"."""
    x = Fraction(x)
    return _frac_str(x) if x >= 0 else "-" + _frac_str(-x)


def poly_arith(x, y, op: str, var: str | None = None):
    """Dispatcher over the basic operations, mirroring the operation table.

    ``op`` is one of add, mul, eval, subst, derivative.  For eval/subst, ``y``
    is a mapping of variable values; for derivative, ``y`` is the variable.
    """
    x = Poly.coerce(x)
    if op == "add":
        return x + Poly.coerce(y)
    if op == "mul":
        return x * Poly.coerce(y)
    if op == "eval":
        return x.eval(y)
    if op == "subst":
        return x.subs(y)
    if op == "derivative":
        return x.derivative(y)
    raise ValueError(f"unknown operation {op!r}")


def root_multiplicity(p, r, var: str | None = None) -> int:
    """Multiplicity of the rational root ``r`` of a univariate polynomial."""
    p = Poly.coerce(p)
    if p.is_zero():
        raise ValueError("the zero polynomial has no root multiplicity")
    names = p.variables()
    if var is None:
        if len(names) > 1:
            raise ValueError(f"{p} is not univariate")
        if not names:
            return 0
        var = names[0]
    coeffs = p.univariate_coeffs(var)
    r = Fraction(r)
    mult = 0
    while len(coeffs) > 1:
        # synthetic division by (var - r)
        out = [Fraction(0)] * (len(coeffs) - 1)
        acc = Fraction(0)
        for k in range(len(coeffs) - 1, 0, -1):
            acc = coeffs[k] + acc * r
            out[k - 1] = acc
        remainder = coeffs[0] + acc * r
        if remainder:
            break
        mult += 1
        coeffs = out
    return mult


def bareiss_det(M: Sequence[Sequence[object]]) -> Poly:
    """Determinant by fraction-free (Bareiss) elimination with exact division."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    if n == 0:
        return Poly.const(1)
    A = [[Poly.coerce(x) for x in row] for row in M]
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if A[k][k].is_zero():
            for i in range(k + 1, n):
                if not A[i][k].is_zero():
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Poly()
        piv = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                val = piv * row_i[j] - aik * row_k[j]
                row_i[j] = val.exact_div(prev) if not prev.is_constant() or prev.constant_value() != 1 else val
            row_i[k] = Poly()
        prev = piv
    det = A[n - 1][n - 1]
    return -det if sign < 0 else det


def cofactor_det(M: Sequence[Sequence[object]]) -> Poly:
    """Determinant by Laplace expansion along the first row (small matrices only)."""
    n = len(M)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return Poly.coerce(M[0][0])
    total = Poly()
    for j in range(n):
        if Poly.coerce(M[0][j]).is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = Poly.coerce(M[0][j]) * cofactor_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


# -- linear algebra over Q ------------------------------------------------------

def row_reduce(rows: List[List[Fraction]]):
    """Reduced row echelon form.  Returns (rref rows, pivot columns)."""
    A = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank_q(rows) -> int:
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    return len(row_reduce(rows)[1])


def nullspace_q(rows, ncols: int | None = None) -> List[List[Fraction]]:
    """Basis of {u : rows . u = 0} over Q."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = row_reduce(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        u = [Fraction(0)] * ncols
        u[f] = Fraction(1)
        for row, pc in zip(R, piv):
            u[pc] = -row[f]
        basis.append(u)
    return basis


# -- t-adic invariant factors ---------------------------------------------------

def _series(p: Poly, var: str, prec: int) -> List[Fraction]:
    coeffs = [Fraction(0)] * prec
    for k, c in p.coeffs_in(var).items():
        if not c.is_constant():
            raise ValueError(f"entry {p} involves variables other than {var}")
        if k < prec:
            coeffs[k] = c.constant_value()
    return coeffs


def _val(s: List[Fraction]) -> int:
    for k, c in enumerate(s):
        if c:
            return k
    return len(s)


def _ser_mul(x, y, prec):
    out = [Fraction(0)] * prec
    for i, a in enumerate(x):
        if a:
            for j in range(prec - i):
                if y[j]:
                    out[i + j] += a * y[j]
    return out


def _ser_inv(u, prec):
    inv = [Fraction(0)] * prec
    inv[0] = 1 / u[0]
    for k in range(1, prec):
        acc = sum((u[j] * inv[k - j] for j in range(1, k + 1) if u[j]), Fraction(0))
        inv[k] = -acc * inv[0]
    return inv


def invariant_factor_t_valuations(M, var: str = "t", method: str = "local") -> List[int]:
    """t-adic valuations of the invariant factors of a nonsingular polynomial matrix.

    ``method="local"`` eliminates over Q[[t]] truncated just above the
    valuation of the determinant; ``method="minors"`` uses determinantal
    divisors (minimum valuation of k x k minors), which is only practical for
    small matrices.
    """
    n = len(M)
    if n == 0:
        return []
    M = [[Poly.coerce(x) for x in row] for row in M]
    det = bareiss_det(M)
    if det.is_zero():
        raise ValueError("matrix is singular over the fraction field")
    total = root_multiplicity(det, 0, var) if det.variables() else 0
    if method == "minors":
        return _minor_valuations(M, var)
    if method != "local":
        raise ValueError(f"unknown method {method!r}")
    prec = total + 1
    A = [[_series(x, var, prec) for x in row] for row in M]
    vals = []
    size = n
    for k in range(n):
        best = None
        for i in range(k, size):
            for j in range(k, size):
                v = _val(A[i][j])
                if v < prec and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            raise ArithmeticError("truncation precision exhausted; determinant valuation inconsistent")
        v, pi, pj = best
        A[k], A[pi] = A[pi], A[k]
        for row in A:
            row[k], row[pj] = row[pj], row[k]
        piv = A[k][k]
        unit_inv = _ser_inv(piv[v:] + [Fraction(0)] * v, prec)
        # clear column k below and row k to the right
        for i in range(k + 1, n):
            if _val(A[i][k]) >= prec:
                continue
            shifted = A[i][k][v:] + [Fraction(0)] * v
            factor = _ser_mul(shifted, unit_inv, prec)
            for j in range(k, n):
                prod = _ser_mul(factor, A[k][j], prec)
                A[i][j] = [a - b for a, b in zip(A[i][j], prod)]
        for j in range(k + 1, n):
            if _val(A[k][j]) >= prec:
                continue
            shifted = A[k][j][v:] + [Fraction(0)] * v
            factor = _ser_mul(shifted, unit_inv, prec)
            for i in range(k, n):
                prod = _ser_mul(factor, A[i][k], prec)
                A[i][j] = [a - b for a, b in zip(A[i][j], prod)]
        vals.append(v)
    if sum(vals) != total:
        raise ArithmeticError("valuation sum does not match the determinant")
    return sorted(vals)


def _minor_valuations(M, var):
    n = len(M)
    d = [0]
    for k in range(1, n + 1):
        best = None
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                minor = bareiss_det([[M[i][j] for j in cols] for i in rows])
                if minor.is_zero():
                    continue
                v = root_multiplicity(minor, 0, var) if minor.variables() else 0
                if best is None or v < best:
                    best = v
                if best == d[-1]:
                    break
            if best == d[-1]:
                break
        d.append(best)
    return sorted(d[k] - d[k - 1] for k in range(1, n + 1))


def t_expansion(M, var: str, order: int) -> List[List[List[Fraction]]]:
    """Coefficient matrices G_0, ..., G_{order-1} of M = sum G_k var^k."""
    rows = [[_series(Poly.coerce(x), var, order) for x in row] for row in M]
    return [[[rows[i][j][k] for j in range(len(M))] for i in range(len(M))] for k in range(order)]


def poly_gcd(p, q, var: str) -> Poly:
    """Monic gcd of two univariate polynomials over Q."""
    a = Poly.coerce(p).univariate_coeffs(var) if not Poly.coerce(p).is_zero() else []
    b = Poly.coerce(q).univariate_coeffs(var) if not Poly.coerce(q).is_zero() else []

    def trim(x):
        while x and not x[-1]:
            x.pop()
        return x

    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[i + shift] -= f * c
            r = trim(r)
        a, b = b, r
    if not a:
        return Poly()
    lead = a[-1]
    return Poly.from_coeffs(var, [c / lead for c in a])
