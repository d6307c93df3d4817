"""The gl(2n)-module Ind_mu induced from the maximal parabolic gl_n + A_+ + gl_n.

Vectors are polynomials xi(y) applied to the highest vector v, where the
abelian lowering block A_- is spanned by y_ij = E_{n+i, n+1-j} (grading
i+j-1).  The raising block A_+ is spanned by x_ij = E_{n+1-j, n+i} and the
Levi part gl_n + gl_n acts by derivations plus the character chi_mu.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import (Poly, bareiss_det, invariant_factor_t_valuations, nullspace_q,
                    rank_q, root_multiplicity, row_reduce, t_expansion)
from .young import Diagram, enumerate_diagrams, p_poly

MU = "mu"
Var = Tuple[int, int]
Mono = Tuple[Var, ...]          # sorted, with repetition
Elem = Tuple[int, int]          # E_ab


class JantzenMismatch(ArithmeticError):
    """Two independent routes to the Jantzen dimensions disagree."""


@dataclass(frozen=True)
class AlgebraContext:
    """gl(2n) with the index conventions used throughout.

    ``normalization`` selects the Cartan character: "trace" puts mu on E_mm
    for m <= n and 0 above; "shifted" puts 0 below and -mu above.  Both give
    chi(E_nn - E_{n+1,n+1}) = mu.
    """

    n: int
    normalization: str = "trace"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.normalization not in ("trace", "shifted"):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    # index maps
    def y(self, i: int, j: int) -> Elem:
        return (self.n + i, self.n + 1 - j)

    def x(self, i: int, j: int) -> Elem:
        return (self.n + 1 - j, self.n + i)

    def y_of(self, e: Elem) -> Var:
        a, b = e
        return (a - self.n, self.n + 1 - b)

    def kind(self, e: Elem) -> str:
        a, b = e
        n = self.n
        if a > n >= b:
            return "lower"
        if a <= n < b:
            return "raise"
        return "levi"

    def variables(self) -> List[Var]:
        return [(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)]

    def chi(self, a: int) -> Poly:
        """Value of the character on E_aa."""
        mu = Poly.var(MU)
        if self.normalization == "trace":
            return mu if a <= self.n else Poly()
        return Poly() if a <= self.n else -mu

    def simple_raisings(self) -> List[Elem]:
        return [(m, m + 1) for m in range(1, 2 * self.n)]

    def levi_raisings(self) -> List[Elem]:
        return [(m, m + 1) for m in range(1, 2 * self.n) if m != self.n]

    def levi_lowerings(self) -> List[Elem]:
        return [(m + 1, m) for m in range(1, 2 * self.n) if m != self.n]


def var_degree(v: Var) -> int:
    return v[0] + v[1] - 1


def mono_level(m: Mono) -> int:
    return sum(var_degree(v) for v in m)


def bracket(e1: Elem, e2: Elem) -> List[Tuple[int, Elem]]:
    """[E_ab, E_cd] = delta_bc E_ad - delta_da E_cb."""
    a, b = e1
    c, d = e2
    out = []
    if b == c:
        out.append((1, (a, d)))
    if d == a:
        out.append((-1, (c, b)))
    return out


def _insert(m: Mono, v: Var) -> Mono:
    return tuple(sorted(m + (v,)))


def _remove(m: Mono, v: Var) -> Mono:
    lst = list(m)
    lst.remove(v)
    return tuple(lst)


class ModuleElement:
    """A vector xi.v of Ind_mu: dict monomial -> Poly in mu."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Mono, Poly]] = None):
        self.terms: Dict[Mono, Poly] = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def monomial(cls, m: Iterable[Var], coeff=1) -> "ModuleElement":
        return cls({tuple(sorted(m)): Poly.coerce(coeff)})

    @classmethod
    def vacuum(cls) -> "ModuleElement":
        return cls({(): Poly.const(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t[m] + c if m in t else c
        return ModuleElement(t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "ModuleElement":
        c = Poly.coerce(c)
        return ModuleElement({m: x * c for m, x in self.terms.items()})

    def __mul__(self, other: "ModuleElement") -> "ModuleElement":
        """Product of the underlying polynomials in y."""
        t: Dict[Mono, Poly] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                t[m] = t[m] + c1 * c2 if m in t else c1 * c2
        return ModuleElement(t)

    def __pow__(self, k: int) -> "ModuleElement":
        out = ModuleElement.vacuum()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.terms == other.terms

    def at(self, mu0) -> "ModuleElement":
        return ModuleElement({m: c.subs({MU: mu0}) for m, c in self.terms.items()})

    def vacuum_coeff(self) -> Poly:
        return self.terms.get((), Poly())

    def levels(self) -> set:
        return {mono_level(m) for m in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"y{i}{j}" for i, j in m) or "1"
            parts.append(f"({c})*{mono}")
        return " + ".join(parts)


def _add_term(acc: Dict[Mono, Poly], m: Mono, c: Poly):
    if c.is_zero():
        return
    if m in acc:
        s = acc[m] + c
        if s.is_zero():
            del acc[m]
        else:
            acc[m] = s
    else:
        acc[m] = c


def _act_mono(ctx: AlgebraContext, X: Elem, m: Mono) -> Dict[Mono, Poly]:
    """X . (m v) as a dict; cached per context."""
    return _act_cache(ctx, X, m)


@lru_cache(maxsize=None)
def _act_cache(ctx: AlgebraContext, X: Elem, m: Mono):
    out: Dict[Mono, Poly] = {}
    kind = ctx.kind(X)
    if kind == "lower":
        out[_insert(m, ctx.y_of(X))] = Poly.const(1)
        return out
    counts = Counter(m)
    if kind == "levi":
        a, b = X
        if a == b:
            _add_term(out, m, ctx.chi(a))
        for v, k in counts.items():
            for coef, e in bracket(X, ctx.y(*v)):
                # Levi brackets keep A_- inside A_-
                nm = _insert(_remove(m, v), ctx.y_of(e))
                _add_term(out, nm, Poly.const(coef * k))
        return out
    # raising: second-order operator
    items = list(counts.items())
    for idx, (v, k) in enumerate(items):
        rest = _remove(m, v)
        for coef, z in bracket(X, ctx.y(*v)):
            # z lies in the Levi part
            if z[0] == z[1]:
                _add_term(out, rest, ctx.chi(z[0]) * (coef * k))
            for idx2, (w, k2) in enumerate(items):
                if idx2 < idx:
                    continue
                if idx2 == idx:
                    if k < 2:
                        continue
                    weight = Fraction(k * (k - 1), 2)
                    base = _remove(rest, v)
                else:
                    weight = Fraction(k * k2)
                    base = _remove(rest, w)
                for coef2, e in bracket(z, ctx.y(*w)):
                    nm = _insert(base, ctx.y_of(e))
                    _add_term(out, nm, Poly.const(coef * coef2 * weight))
    return out


def act(ctx: AlgebraContext, X: Elem, v: ModuleElement) -> ModuleElement:
    """Action of the matrix unit E_ab on a module vector."""
    if not all(1 <= i <= 2 * ctx.n for i in X):
        raise ValueError(f"E_{X} is not a gl({2 * ctx.n}) matrix unit")
    acc: Dict[Mono, Poly] = {}
    for m, c in v.terms.items():
        for nm, d in _act_mono(ctx, X, m).items():
            _add_term(acc, nm, d * c)
    return ModuleElement(acc)


def basis(ctx: AlgebraContext, level: int) -> List[Mono]:
    """Monomials in y_ij of the given level, in a fixed order."""
    vars_by_deg = sorted(ctx.variables(), key=lambda v: (var_degree(v), v))
    out: List[Mono] = []

    def rec(start: int, remaining: int, acc: List[Var]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for idx in range(start, len(vars_by_deg)):
            v = vars_by_deg[idx]
            d = var_degree(v)
            if d > remaining:
                break
            rec(idx, remaining - d, acc + [v])

    rec(0, level, [])
    return sorted(tuple(sorted(m)) for m in out)


def weight_of(ctx: AlgebraContext, m: Mono) -> Tuple[int, ...]:
    """gl_n + gl_n weight of y^m, as an integer vector of length 2n."""
    w = [0] * (2 * ctx.n)
    for i, j in m:
        a, b = ctx.y(i, j)
        w[a - 1] += 1
        w[b - 1] -= 1
    return tuple(w)


def det_element(ctx: AlgebraContext, k: int) -> ModuleElement:
    """Det_k = (-1)^{k(k-1)/2} det(y_ij)_{i,j <= k}.

    This is the determinant of the k x k corner as it sits inside gl(2n)
    (columns read left to right), so Det_2 = y12 y21 - y11 y22.
    """
    if not 1 <= k <= ctx.n:
        raise ValueError(f"Det_{k} needs 1 <= k <= n = {ctx.n}")
    terms: Dict[Mono, Poly] = {}
    sign0 = -1 if (k * (k - 1) // 2) % 2 else 1
    for perm in itertools.permutations(range(1, k + 1)):
        inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
        s = sign0 * (-1 if inv % 2 else 1)
        m = tuple(sorted((i + 1, perm[i]) for i in range(k)))
        _add_term(terms, m, Poly.const(s))
    return ModuleElement(terms)


def diagram_element(ctx: AlgebraContext, d: Diagram) -> ModuleElement:
    out = ModuleElement.vacuum()
    for h, m in d.blocks:
        out = out * det_element(ctx, h) ** m
    return out


def is_singular(ctx: AlgebraContext, v: ModuleElement, mu0=None) -> bool:
    """True if v is nonzero and killed by every simple raising operator."""
    if mu0 is not None:
        v = v.at(mu0)
    if v.is_zero():
        return False
    for X in ctx.simple_raisings():
        w = act(ctx, X, v)
        if mu0 is not None:
            w = w.at(mu0)
        if not w.is_zero():
            return False
    return True


# -- Gram matrices -------------------------------------------------------------

def weight_blocks(ctx: AlgebraContext, level: int) -> Dict[Tuple[int, ...], List[Mono]]:
    blocks: Dict[Tuple[int, ...], List[Mono]] = {}
    for m in basis(ctx, level):
        blocks.setdefault(weight_of(ctx, m), []).append(m)
    return dict(sorted(blocks.items()))


def pairing(ctx: AlgebraContext, m1: Mono, m2: Mono, _memo=None) -> Poly:
    """<m1 v, m2 v>: coefficient of v in tau(m1) m2 v, tau(E_ab) = E_ba."""
    if mono_level(m1) != mono_level(m2):
        return Poly()
    memo = {} if _memo is None else _memo

    def apply(xs: Mono) -> ModuleElement:
        key = (xs, m2)
        if key in memo:
            return memo[key]
        if not xs:
            res = ModuleElement.monomial(m2)
        else:
            prev = apply(xs[1:])
            a, b = ctx.y(*xs[0])
            res = act(ctx, (b, a), prev)
        memo[key] = res
        return res

    return apply(m1).vacuum_coeff()


def gram_matrix(ctx: AlgebraContext, monos: Sequence[Mono]) -> List[List[Poly]]:
    memo: dict = {}
    n = len(monos)
    G = [[Poly()] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            val = pairing(ctx, monos[i], monos[j], memo)
            G[i][j] = val
            G[j][i] = val
    return G


def full_gram_matrix(ctx: AlgebraContext, level: int) -> Tuple[List[Mono], List[List[Poly]]]:
    """The unblocked Gram matrix on the whole level (used to test orthogonality)."""
    monos = basis(ctx, level)
    memo: dict = {}
    G = [[pairing(ctx, a, b, memo) for b in monos] for a in monos]
    return monos, G


@dataclass
class GramReport:
    n: int
    level: int
    basis: List[Mono]
    blocks: List[Tuple[Tuple[int, ...], List[Mono], List[List[Poly]], Poly]]
    det: Poly
    roots: List[Tuple[int, int]]
    constant: Fraction
    residual: Poly

    def factored(self) -> str:
        return factored_string(self.roots, self.residual)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "level": self.level,
            "det": self.factored(),
            "det_expanded": str(self.det),
            "roots": [{"mu": r, "mult": k} for r, k in self.roots],
            "basis_size": len(self.basis),
            "blocks": len(self.blocks),
        }


def factored_string(roots: Sequence[Tuple[int, int]], residual: Poly, var: str = "mu") -> str:
    parts = []
    for r, k in roots:
        if r == 0:
            base = var
        elif r > 0:
            base = f"({var}-{r})"
        else:
            base = f"({var}+{-r})"
        parts.append(base if k == 1 else f"{base}^{k}")
    if not residual.is_constant():
        parts.append(f"({residual})")
    return "*".join(parts) if parts else "1"


def integer_roots(p: Poly, lo: int, hi: int, var: str = MU):
    """Split p into integer roots in [lo, hi] (with multiplicities) and a cofactor."""
    roots = []
    rest = p
    x = Poly.var(var)
    for r in range(lo, hi + 1):
        if rest.is_constant():
            break
        k = root_multiplicity(rest, r, var)
        if k:
            roots.append((r, k))
            rest = rest.exact_div((x - r) ** k)
    return roots, rest


_GRAM_CACHE: Dict[Tuple[AlgebraContext, int], GramReport] = {}


def gram(ctx: AlgebraContext, level: int) -> GramReport:
    key = (ctx, level)
    if key in _GRAM_CACHE:
        return _GRAM_CACHE[key]
    blocks = []
    det = Poly.const(1)
    for w, monos in weight_blocks(ctx, level).items():
        G = gram_matrix(ctx, monos)
        d = bareiss_det(G)
        blocks.append((w, monos, G, d))
        det = det * d
    if det.is_zero():
        raise ArithmeticError("Gram determinant vanishes identically")
    roots, rest = integer_roots(det, -ctx.n - level, level + 1)
    const = rest.constant_value() if rest.is_constant() else Fraction(0)
    monic = rest.scale(1 / rest.leading()[1])
    rep = GramReport(ctx.n, level, basis(ctx, level), blocks, det, roots, const, monic)
    _GRAM_CACHE[key] = rep
    return rep


# -- Jantzen filtration -----------------------------------------------------------

def _shifted_block(G, a) -> List[List[Poly]]:
    t = Poly.var("t")
    return [[x.subs({MU: t + a}) for x in row] for row in G]


def smith_dims(ctx: AlgebraContext, a: int, level: int) -> List[int]:
    """dim(V_level cap Ind_a^{(k)}) for k = 1, 2, ... via invariant factors."""
    vals: List[int] = []
    for _, _, G, _ in gram(ctx, level).blocks:
        vals += invariant_factor_t_valuations(_shifted_block(G, a), "t")
    top = max(vals, default=0)
    return [sum(1 for v in vals if v >= k) for k in range(1, top + 1)]


def _lift_space(Gs: List[List[List[Fraction]]], k: int):
    """Solutions u_0..u_{k-1} of sum_{i+j=r} G_i u_j = 0 for r < k.

    Returns a list of lifts (each a list of k vectors)."""
    m = len(Gs[0])
    rows = []
    for r in range(k):
        for row_idx in range(m):
            row = [Fraction(0)] * (m * k)
            for j in range(r + 1):
                Gi = Gs[r - j]
                for col in range(m):
                    row[j * m + col] = Gi[row_idx][col]
            rows.append(row)
    sols = nullspace_q(rows, m * k) if rows else []
    return [[s[j * m:(j + 1) * m] for j in range(k)] for s in sols]


def lifting_dims_and_layer_ranks(G: List[List[Poly]], a: int, kmax: int):
    """Jantzen pieces of one block straight from the definition.

    M^(k) = {u(0) : G(a+t) u(t) = O(t^k)}; returns dims of M^(k) for
    k = 1..kmax+1 and the ranks of the induced forms <,>_k on M^(k).
    """
    m = len(G)
    Gs = t_expansion(_shifted_block(G, a), "t", kmax + 2)
    dims, ranks = [], []
    for k in range(1, kmax + 2):
        lifts = _lift_space(Gs, k)
        u0s = [lift[0] for lift in lifts]
        if u0s:
            R, piv = row_reduce(u0s)
            space = R
        else:
            space = []
        dims.append(len(space))
        if k > kmax:
            break
        # induced form: lifts of a basis of M^(k), <u, u'>_k = u0 . (sum_{i>=1} G_i u'_{k-i})
        chosen = []
        if space:
            # pick lifts whose u0 span the space
            rows_so_far: List[List[Fraction]] = []
            for lift in lifts:
                trial = rows_so_far + [lift[0]]
                if rank_q(trial) > len(rows_so_far):
                    rows_so_far = trial
                    chosen.append(lift)
        F = []
        for lu in chosen:
            row = []
            for lw in chosen:
                s = Fraction(0)
                for i in range(1, k + 1):
                    Gi = Gs[i]
                    w = lw[k - i] if k - i < len(lw) else [Fraction(0)] * m
                    for p in range(m):
                        if lu[0][p]:
                            s += lu[0][p] * sum(Gi[p][q] * w[q] for q in range(m))
                row.append(s)
            F.append(row)
        ranks.append(rank_q(F) if F else 0)
    return dims, ranks


_SLICE_CACHE: Dict[Tuple[int, Diagram, int], List[int]] = {}


def slice_dims(ctx: AlgebraContext, d: Diagram, depth: int) -> List[int]:
    """Dimensions of the levels weight(d)+e, e = 0..depth, of L_w (x) L_w.

    Computed by closing w.v under the simple lowering operators of gl_n + gl_n.
    """
    key = (ctx.n, d, depth)
    if key in _SLICE_CACHE:
        return _SLICE_CACHE[key]
    w = diagram_element(ctx, d)
    layer = [w]
    dims = [1]
    for _ in range(depth):
        new = []
        for vec in layer:
            for X in ctx.levi_lowerings():
                new.append(act(ctx, X, vec))
        layer = _independent(new)
        dims.append(len(layer))
    _SLICE_CACHE[key] = dims
    return dims


def _independent(vecs: List[ModuleElement]) -> List[ModuleElement]:
    monos = sorted({m for v in vecs for m in v.terms})
    index = {m: i for i, m in enumerate(monos)}
    out, rows = [], []
    for v in vecs:
        row = [Fraction(0)] * len(monos)
        for m, c in v.terms.items():
            row[index[m]] = c.constant_value()
        if rank_q(rows + [row]) > len(rows):
            rows.append(row)
            out.append(v)
    return out


def lemma14_dims(ctx: AlgebraContext, a: int, level: int) -> List[int]:
    """Jantzen dims predicted from diagrams: sum over w with mult_a(p_w) >= k."""
    contributions = []
    for d in enumerate_diagrams(level):
        if d.max_height > ctx.n:
            continue
        mult = root_multiplicity(p_poly(d), a) if d.blocks else 0
        if mult:
            dim = slice_dims(ctx, d, level - d.weight)[level - d.weight]
            contributions.append((mult, dim))
    top = max((m for m, _ in contributions), default=0)
    return [sum(dim for m, dim in contributions if m >= k) for k in range(1, top + 1)]


def block_prediction(ctx: AlgebraContext, level: int) -> Dict[int, int]:
    """Root multiplicities of the level-`level` determinant predicted from diagrams."""
    pred: Dict[int, int] = {}
    for d in enumerate_diagrams(level):
        if not d.blocks or d.max_height > ctx.n:
            continue
        dim = slice_dims(ctx, d, level - d.weight)[level - d.weight]
        if not dim:
            continue
        for r, k in integer_roots(p_poly(d), -d.max_height, d.width)[0]:
            pred[r] = pred.get(r, 0) + k * dim
    return dict(sorted(pred.items()))


@dataclass
class JantzenReport:
    n: int
    a: int
    level: int
    smith: List[int]
    lemma14: List[int]
    lifting: List[int]
    layer_ranks: List[int]
    root_multiplicity: int

    @property
    def consistent(self) -> bool:
        layers_ok = all(r == self.lifting[k] - (self.lifting[k + 1] if k + 1 < len(self.lifting) else 0)
                        for k, r in enumerate(self.layer_ranks))
        return (self.smith == self.lemma14 == self.lifting
                and sum(self.smith) == self.root_multiplicity and layers_ok)

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "level": self.level, "smith": self.smith,
                "lemma14": self.lemma14, "lifting": self.lifting,
                "layer_ranks": self.layer_ranks, "root_multiplicity": self.root_multiplicity,
                "consistent": self.consistent}


def jantzen_report(ctx: AlgebraContext, a: int, level: int) -> JantzenReport:
    rep = gram(ctx, level)
    smith = smith_dims(ctx, a, level)
    lem = lemma14_dims(ctx, a, level)
    kmax = len(smith)
    lift_total = [0] * (kmax + 1)
    ranks_total = [0] * kmax
    for _, _, G, d in rep.blocks:
        if kmax == 0:
            break
        dims, ranks = lifting_dims_and_layer_ranks(G, a, kmax)
        for k in range(kmax + 1):
            lift_total[k] += dims[k]
        for k in range(kmax):
            ranks_total[k] += ranks[k]
    lifting = [x for x in lift_total[:kmax]]
    if kmax and lift_total[kmax]:
        lifting.append(lift_total[kmax])
    mult = root_multiplicity(rep.det, a)
    # trim trailing zeros for comparison
    while lifting and lifting[-1] == 0:
        lifting.pop()
    return JantzenReport(ctx.n, a, level, smith, lem, lifting, ranks_total, mult)


def jantzen_dims(ctx: AlgebraContext, a: int, level: int) -> List[int]:
    rep = jantzen_report(ctx, a, level)
    if not rep.consistent:
        raise JantzenMismatch(str(rep.to_dict()))
    return rep.smith


def irr_quotient_dims(ctx: AlgebraContext, a, max_level: int) -> List[int]:
    """Ranks of the Gram matrices at mu = a for levels 1..max_level."""
    out = []
    for level in range(1, max_level + 1):
        r = 0
        for _, _, G, _ in gram(ctx, level).blocks:
            r += rank_q([[x.eval({MU: a}) if not x.is_constant() else x.constant_value() for x in row]
                         for row in G])
        out.append(r)
    return out


def singular_vectors(ctx: AlgebraContext, mu0: int) -> List[Tuple[str, int, int]]:
    """The listed singular vectors Det_p^q (q - p = mu0, p <= n) with their levels."""
    out = []
    for p in range(1, ctx.n + 1):
        q = mu0 + p
        if q >= 1:
            out.append((f"Det_{p}" + (f"^{q}" if q > 1 else ""), p, q))
    return out


def levi_kernel_dim(ctx: AlgebraContext, level: int) -> Tuple[int, List[Mono]]:
    """Dimension of the joint kernel of the Levi raising operators on a level."""
    monos = basis(ctx, level)
    rows = []
    for X in ctx.levi_raisings():
        images = [act(ctx, X, ModuleElement.monomial(m)) for m in monos]
        targets = sorted({t for im in images for t in im.terms})
        tindex = {t: i for i, t in enumerate(targets)}
        block = [[Fraction(0)] * len(monos) for _ in targets]
        for col, im in enumerate(images):
            for t, c in im.terms.items():
                block[tindex[t]][col] = c.constant_value()
        rows += block
    null = nullspace_q(rows, len(monos)) if rows else nullspace_q([], len(monos))
    return len(null), monos
