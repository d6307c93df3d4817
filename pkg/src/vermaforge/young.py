"""Young diagrams built from blocks: l_i columns of height i.

A diagram corresponds to the monomial Det_1^{l_1} ... Det_k^{l_k}; its
partition has rows lambda_r = sum_{j >= r} l_j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .exact import Poly
from .qseries import ProductSpec, Series, series_from_product

MU = "mu"


@dataclass(frozen=True)
class Diagram:
    """Block multiplicities, stored as sorted (height, multiplicity) pairs."""

    blocks: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        clean = []
        for h, m in sorted(dict(self.blocks).items()):
            if h < 1 or m < 0:
                raise ValueError(f"bad block ({h}, {m})")
            if m:
                clean.append((h, m))
        object.__setattr__(self, "blocks", tuple(clean))

    @classmethod
    def from_blocks(cls, blocks: Mapping[int, int]) -> "Diagram":
        return cls(tuple((int(h), int(m)) for h, m in blocks.items()))

    @classmethod
    def det(cls, k: int, power: int = 1) -> "Diagram":
        return cls(((k, power),))

    def mult(self, h: int) -> int:
        return dict(self.blocks).get(h, 0)

    @property
    def size(self) -> int:
        return sum(h * m for h, m in self.blocks)

    @property
    def weight(self) -> int:
        return sum(h * h * m for h, m in self.blocks)

    @property
    def max_height(self) -> int:
        return max((h for h, _ in self.blocks), default=0)

    @property
    def width(self) -> int:
        return sum(m for _, m in self.blocks)

    def partition(self) -> Tuple[int, ...]:
        return tuple(sum(m for h, m in self.blocks if h >= r) for r in range(1, self.max_height + 1))

    def column_heights(self) -> List[int]:
        out = []
        for h, m in sorted(self.blocks, reverse=True):
            out += [h] * m
        return out

    def cells(self) -> List[Tuple[int, int]]:
        return [(r, c) for r, length in enumerate(self.partition(), 1) for c in range(1, length + 1)]

    def contents(self) -> List[int]:
        return [c - r for r, c in self.cells()]

    def hooks(self) -> List[int]:
        lam = self.partition()
        cols = self.column_heights()
        return [lam[r - 1] - c + cols[c - 1] - r + 1 for r, c in self.cells()]

    def to_json(self) -> str:
        return json.dumps({"blocks": {str(h): m for h, m in self.blocks}}, sort_keys=True, separators=(",", ":"))

    def label(self) -> str:
        if not self.blocks:
            return "1"
        return "*".join(f"Det_{h}" + (f"^{m}" if m > 1 else "") for h, m in self.blocks)

    def __str__(self):
        return self.label()


def stats(d: Diagram) -> dict:
    diag: Dict[int, int] = {}
    for x in d.contents():
        diag[x] = diag.get(x, 0) + 1
    return {
        "partition": d.partition(),
        "size": d.size,
        "weight": d.weight,
        "max_height": d.max_height,
        "central_diagonal": diag.get(0, 0),
        "diagonal_counts": dict(sorted(diag.items())),
    }


def p_poly(d: Diagram) -> Poly:
    """Monic p_w(mu) from the diagonal counts.

    Diagonals are cut from the lowest (content 1 - k(D)) upwards; the i-th one
    carries n_i cells and contributes (mu + k(D) - i)^{n_i}.
    """
    mu = Poly.var(MU)
    k = d.max_height
    counts = stats(d)["diagonal_counts"]
    out = Poly.const(1)
    for i in range(1, len(counts) + 1):
        n_i = counts.get(i - k, 0)
        if n_i:
            out = out * (mu + (k - i)) ** n_i
    return out


def p_poly_technique1(d: Diagram) -> Poly:
    """p_w(mu) by moving every Det_k factor to the right end of the word.

    The word is Det_1^{l_1} ... Det_n^{l_n}; a factor sitting ``s`` places
    from the end contributes p_k(mu - s) with p_k(mu) = mu (mu+1) ... (mu+k-1).
    """
    mu = Poly.var(MU)
    word = [h for h, m in d.blocks for _ in range(m)]
    out = Poly.const(1)
    for pos, k in enumerate(word):
        shift = len(word) - 1 - pos
        for j in range(k):
            out = out * (mu + (j - shift))
    return out


def chi_spec(d: Diagram, n: Optional[int] = None) -> ProductSpec:
    """Hook-length (or hook-content for finite n) product for chi(D)."""
    factors = [(0, h, 1) for h in d.hooks()]
    if n is not None:
        if d.max_height > n:
            raise ValueError(f"diagram of height {d.max_height} does not fit n = {n}")
        factors += [(0, n + c, -1) for c in d.contents()]
    return ProductSpec(tuple(factors))


def chi_series(d: Diagram, N: int, n: Optional[int] = None) -> Series:
    return series_from_product(chi_spec(d, n), N)


def chi_fig4_printed(i: int, j: int, N: int) -> Series:
    """The closed form printed for chi(Det_i Det_j), i <= j, kept for comparison.

    Numerator (1-q^{j-i+1})...(1-q^j), denominator
    (1-q)...(1-q^i) (1-q)...(1-q^{j+1}).  Agrees with the hook formula for i = 1.
    """
    factors = [(0, g, -1) for g in range(j - i + 1, j + 1)]
    factors += [(0, g, 1) for g in range(1, i + 1)]
    factors += [(0, g, 1) for g in range(1, j + 2)]
    return series_from_product(ProductSpec(tuple(factors)), N)


@dataclass(frozen=True)
class DiagramFilter:
    """Constraints lo <= sum_{s >= b} l_s <= hi, given as (b, lo, hi); hi may be None."""

    constraints: Tuple[Tuple[int, int, Optional[int]], ...] = ()

    def accepts(self, d: Diagram) -> bool:
        for b, lo, hi in self.constraints:
            s = sum(m for h, m in d.blocks if h >= b)
            if s < lo or (hi is not None and s > hi):
                return False
        return True


def filter_at_most_rows(l: int) -> DiagramFilter:
    """Diagrams with sum l_i <= l (at most l columns, i.e. lambda_1 <= l)."""
    return DiagramFilter(((1, 0, l),))


def filter_heights_at_most(l: int) -> DiagramFilter:
    """The set W_l: only blocks of height <= l."""
    return DiagramFilter(((l + 1, 0, 0),))


def filter_layer_minus(k: int, l: int) -> DiagramFilter:
    """W_l^- at a = -k: sum_{s>=k+l} >= l and sum_{s>=k+l+1} <= l."""
    return DiagramFilter(((k + l, l, None), (k + l + 1, 0, l)))


def filter_layer_plus(k: int, l: int) -> DiagramFilter:
    """W_l^+ at a = k: sum_{s>=l} >= k+l and sum_{s>=l+1} <= k+l."""
    return DiagramFilter(((l, k + l, None), (l + 1, 0, k + l)))


def enumerate_diagrams(max_weight: int, flt: Optional[DiagramFilter] = None) -> List[Diagram]:
    """All diagrams of weight <= max_weight passing the filter, sorted by (weight, blocks)."""
    out: List[Diagram] = []
    top = math.isqrt(max(max_weight, 0))

    def rec(h: int, remaining: int, acc: List[Tuple[int, int]]):
        if h > top:
            out.append(Diagram(tuple(acc)))
            return
        for m in range(remaining // (h * h) + 1):
            rec(h + 1, remaining - m * h * h, acc + ([(h, m)] if m else []))

    rec(1, max_weight, [])
    if flt is not None:
        out = [d for d in out if flt.accepts(d)]
    return sorted(out, key=lambda d: (d.weight, d.blocks))


def diagram_sum(N: int, flt: Optional[DiagramFilter] = None, weight_fn=None,
                n: Optional[int] = None, shift: int = 0) -> Series:
    """Sum over diagrams of weight_fn(D) * q^{weight - shift} * chi(D)^2 to order N."""
    total = Series(N)
    for d in enumerate_diagrams(N + shift, flt):
        if n is not None and d.max_height > n:
            continue
        w = d.weight - shift
        if w < 0:
            raise ValueError(f"diagram {d} sits below the shift {shift}")
        c = 1 if weight_fn is None else weight_fn(d)
        if isinstance(c, int) and c == 0:
            continue
        chi = chi_series(d, N - w, n)
        sq = chi * chi
        c = Poly.coerce(c)
        total = total + Series(N, [Poly()] * w + [x * c for x in sq.coeffs])
    return total
