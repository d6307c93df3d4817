"""Registry of q-series identities: each id builds a left and a right side as
Series and the two are compared coefficient by coefficient.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Dict, List, Optional, Tuple

from .exact import Poly, root_multiplicity
from .qseries import (CoefficientRow, ProductSpec, Series, d_da_at_one, equals_to_order,
                      first_mismatch, series_from_product)
from .young import (Diagram, diagram_sum, filter_at_most_rows,
                    filter_heights_at_most, filter_layer_minus, filter_layer_plus, p_poly, stats)


class UnknownIdentity(KeyError):
    pass


@dataclass
class VerificationReport:
    identity: str
    params: Dict[str, object]
    order: int
    rows: List[CoefficientRow]
    notes: Dict[str, object] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.match for r in self.rows)

    @property
    def first_mismatch(self) -> Optional[int]:
        return first_mismatch(self.rows)

    def to_dict(self) -> dict:
        # wall time is left out so the output is byte-deterministic
        return {
            "id": self.identity,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "order": self.order,
            "pass": self.passed,
            "first_mismatch": self.first_mismatch,
            "rows": [{"k": r.k, "lhs": str(r.lhs), "rhs": str(r.rhs), "match": r.match} for r in self.rows],
            "notes": self.notes,
        }


# -- product sides ---------------------------------------------------------------------

def _prod(rule: Callable[[int], List[Tuple[int, int]]], N: int) -> Series:
    return series_from_product(ProductSpec((), rule), N)


def partitions_product(N: int) -> Series:
    return _prod(lambda g: [(0, 1)], N)


def truncated_plane_product(l: int, N: int) -> Series:
    """1 / prod_i (1 - q^i)^{min(i, l)}."""
    return _prod(lambda g: [(0, min(g, l))], N)


def plane_product(N: int, marker: bool = False) -> Series:
    """prod_i (1 - a q^i)^{-i}, with a = 1 unless ``marker``."""
    return _prod(lambda g: [(1 if marker else 0, g)], N)


def chern_product(N: int, scale: int = 1) -> Series:
    """prod_i prod_{j = i-1}^{2i-2} (1 - a^{scale j} q^i)^{-1}."""
    return _prod(lambda g: [(scale * j, 1) for j in range(g - 1, 2 * g - 1)], N)


def split_product(kp: int, N: int) -> Series:
    """prod_{i<=k+} (1-q^i)^{-i} * prod_{i>k+} (1-q^i)^{-k+} (1-a q^i)^{-(i-k+)}."""
    def rule(g):
        if g <= kp:
            return [(0, g)]
        return [(0, kp), (1, g - kp)]
    return _prod(rule, N)


# -- diagram helpers ---------------------------------------------------------------------

def central_diagonal(d: Diagram) -> int:
    return stats(d)["central_diagonal"]


def pbw_chern_series(N: int, scale: int = 1) -> Series:
    """Sum over PBW monomials in generators f^p h^q (q < p) of a^{scale * chern} q^{grading}.

    Each generator has grading p and Chern class p + q - 1; the sum is an
    explicit enumeration of multisets of generators.
    """
    gens = [(p, p + q - 1) for p in range(1, N + 1) for q in range(p)]
    counts: Dict[Tuple[int, int], int] = {}

    def rec(idx: int, grade: int, chern: int):
        if idx == len(gens):
            counts[(grade, chern)] = counts.get((grade, chern), 0) + 1
            return
        p, c = gens[idx]
        m = 0
        while grade + m * p <= N:
            rec(idx + 1, grade + m * p, chern + m * c)
            m += 1

    rec(0, 0, 0)
    coeffs = [Poly() for _ in range(N + 1)]
    for (g, c), n in counts.items():
        coeffs[g] = coeffs[g] + Poly.var("a", scale * c).scale(n)
    return Series(N, coeffs)


def explicit_chi_neg1(N: int) -> Series:
    """1 + sum_k q^k / ((1-q)^2 ... (1-q^k)^2)."""
    total = Series.one(N)
    for k in range(1, N + 1):
        term = series_from_product(ProductSpec(tuple((0, i, 2) for i in range(1, k + 1))), N - k)
        total = total + Series(N, [Poly()] * k + term.coeffs)
    return total


def printed_eq15_rhs(N: int) -> Series:
    """The right side of the l = 2 identity with the printed two-column character."""
    from .young import chi_fig4_printed, chi_series
    total = Series.one(N)
    k = 1
    while k * k <= N:
        sq = chi_series(Diagram.det(k), N - k * k)
        sq = sq * sq
        total = total + Series(N, [Poly()] * (k * k) + sq.coeffs)
        k += 1
    i = 1
    while 2 * i * i <= N:
        j = i
        while i * i + j * j <= N:
            w = i * i + j * j
            c = chi_fig4_printed(i, j, N - w)
            c = c * c
            total = total + Series(N, [Poly()] * w + c.coeffs)
            j += 1
        i += 1
    return total


# -- layer characters from the Gram side -----------------------------------------------

LAYER_N = 5


def layer_series(sign: int, k: int, l: int, N: int, n: int = LAYER_N) -> Tuple[Series, int]:
    """Brute-force character of the l-th Jantzen layer at mu = a (a = -k or +k).

    Returns the series (shifted by the layer's lowest level) and the
    effective order actually computed, limited by levels <= n.
    """
    from .glmod import AlgebraContext, smith_dims
    a = -k if sign < 0 else k
    shift = l * (k + l) ** 2 if sign < 0 else (k + l) * l * l
    ctx = AlgebraContext(n)
    eff = min(N, n - shift)
    if eff < 0:
        raise ValueError(f"layer starts at level {shift}, beyond the feasible bound {n}")
    coeffs = []
    for m in range(shift, shift + eff + 1):
        dims = smith_dims(ctx, a, m) if m else []
        dl = dims[l - 1] if len(dims) >= l else 0
        dl1 = dims[l] if len(dims) >= l + 1 else 0
        coeffs.append(Poly.const(dl - dl1))
    return Series(eff, coeffs), eff


# -- registry -------------------------------------------------------------------------------

def _euler10(N, p):
    return partitions_product(N), diagram_sum(N, filter_at_most_rows(1)), {}


def _finite13(N, p):
    n = int(p["n"])
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = series_from_product(ProductSpec(tuple((0, g, -1) for g in range(n + 1, 2 * n + 1))
                                          + tuple((0, g, 1) for g in range(1, n + 1))), N)
    return lhs, diagram_sum(N, filter_at_most_rows(1), n=n), {}


def _higher14(N, p):
    l = int(p["l"])
    if l < 1:
        raise ValueError("l must be >= 1")
    return truncated_plane_product(l, N), diagram_sum(N, filter_at_most_rows(l)), {}


def _higher15(N, p):
    # (1 - q) / prod_s (1 - q^s)^2
    reading_a = series_from_product(ProductSpec(((0, 1, -1),), lambda g: [(0, 2)]), N)
    reading_b = truncated_plane_product(2, N)
    rhs = diagram_sum(N, filter_at_most_rows(2))
    printed = printed_eq15_rhs(N)
    notes = {
        "reading_product_form_matches": reading_a == rhs,
        "reading_l2_form_matches": reading_b == rhs,
        "printed_two_column_rhs_first_mismatch": first_mismatch(equals_to_order(reading_a, printed)),
    }
    return reading_a, rhs, notes


def _all16(N, p):
    return plane_product(N), diagram_sum(N), {}


def _chi_neg17(N, p):
    return explicit_chi_neg1(N), diagram_sum(N, filter_heights_at_most(1)), {}


def _chi_neg18(N, p):
    l = int(p["l"])
    if l < 1:
        raise ValueError("l must be >= 1")
    # character of the irreducible quotient: all diagrams minus those whose
    # highest-weight vector lies in the radical (p_w(-l) = 0)
    radical = diagram_sum(N, weight_fn=lambda d: 1 if root_multiplicity(p_poly(d), -l) else 0)
    lhs = plane_product(N) - radical
    return lhs, diagram_sum(N, filter_heights_at_most(l)), {}


def _layer(sign):
    def build(N, p):
        k, l = int(p["k"]), int(p["l"])
        if k < 0 or l < 1:
            raise ValueError("need k >= 0, l >= 1")
        lhs, eff = layer_series(sign, k, l, N)
        if sign < 0:
            rhs = diagram_sum(eff, filter_layer_minus(k, l), shift=l * (k + l) ** 2)
        else:
            rhs = diagram_sum(eff, filter_layer_plus(k, l), shift=(k + l) * l * l)
        return lhs, rhs, {"effective_order": eff, "gram_n": LAYER_N}
    return build


def _local_ch2(N, p):
    return d_da_at_one(plane_product(N, marker=True)), diagram_sum(N, weight_fn=lambda d: d.size), {}


def _chern1(N, p):
    return chern_product(N), pbw_chern_series(N), {}


def _chern2(N, p):
    lhs = d_da_at_one(chern_product(N, scale=2))
    return lhs, d_da_at_one(pbw_chern_series(N, scale=2)), {}


def _kplus_sum(N) -> Series:
    total = Series(N)
    for kp in range(1, N + 1):
        total = total + d_da_at_one(split_product(kp, N))
    return total


def _global12(N, p):
    lhs = d_da_at_one(chern_product(N))
    rhs = (d_da_at_one(plane_product(N, marker=True)) + _kplus_sum(N).scale(2)
           - diagram_sum(N, weight_fn=central_diagonal))
    return lhs, rhs, {"kplus_bound": N}


def _global11(N, p):
    lhs = d_da_at_one(chern_product(N, scale=2))
    # 2 sum_{mu != 0} mult + 2 local - 2 deg + 4 sum_{k+}
    noncentral = diagram_sum(N, weight_fn=lambda d: d.size - central_diagonal(d))
    degree = diagram_sum(N, weight_fn=lambda d: d.size)
    rhs = (noncentral.scale(2) + d_da_at_one(plane_product(N, marker=True)).scale(2)
           - degree.scale(2) + _kplus_sum(N).scale(4))
    return lhs, rhs, {"kplus_bound": N, "printed_constant_dropped": True}


def _appendixB(N, p):
    return plane_product(N, marker=True), diagram_sum(N, weight_fn=lambda d: Poly.var("a", d.size)), {}


REGISTRY: Dict[str, Tuple[Callable, Tuple[str, ...]]] = {
    "euler10": (_euler10, ()),
    "finite13": (_finite13, ("n",)),
    "higher14": (_higher14, ("l",)),
    "higher15": (_higher15, ()),
    "all16": (_all16, ()),
    "chi_neg17": (_chi_neg17, ()),
    "chi_neg18": (_chi_neg18, ("l",)),
    "layer20": (_layer(-1), ("k", "l")),
    "layer22": (_layer(+1), ("k", "l")),
    "local_ch2": (_local_ch2, ()),
    "chern1_ch3": (_chern1, ()),
    "chern2_ch3": (_chern2, ()),
    "global11_ch3": (_global11, ()),
    "global12_ch3": (_global12, ()),
    "appendixB": (_appendixB, ()),
}


def parse_id(text: str) -> Tuple[str, Dict[str, int]]:
    """'higher14(3)' -> ('higher14', {'l': 3}); 'layer20(0,1)' -> ('layer20', {'k': 0, 'l': 1})."""
    text = text.strip()
    name, _, rest = text.partition("(")
    if name not in REGISTRY:
        raise UnknownIdentity(name)
    keys = REGISTRY[name][1]
    values = [v for v in rest.rstrip(")").split(",") if v.strip()] if rest else []
    if len(values) != len(keys):
        raise ValueError(f"{name} takes parameters {keys}")
    return name, {k: int(v) for k, v in zip(keys, values)}


def build_sides(identity: str, N: int, params: Optional[Dict[str, int]] = None):
    if N < 0:
        raise ValueError("order must be >= 0")
    if identity not in REGISTRY:
        raise UnknownIdentity(identity)
    builder, keys = REGISTRY[identity]
    params = dict(params or {})
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValueError(f"{identity} needs parameters {missing}")
    return builder(N, params)


def verify(identity: str, N: int, params: Optional[Dict[str, int]] = None) -> VerificationReport:
    start = time.perf_counter()
    lhs, rhs, notes = build_sides(identity, N, params)
    rows = equals_to_order(lhs, rhs)
    return VerificationReport(identity, dict(params or {}), N, rows, notes, time.perf_counter() - start)


def load_manifest(path: Optional[str] = None) -> List[dict]:
    if path is None:
        text = resources.files("vermaforge").joinpath("data/default_manifest.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    entries = json.loads(text)
    if not isinstance(entries, list):
        raise ValueError("manifest must be a JSON list")
    for e in entries:
        if not isinstance(e, dict) or "id" not in e or "order" not in e:
            raise ValueError(f"bad manifest entry {e!r}")
    return entries


def verify_all(manifest: Optional[List[dict]] = None) -> List[VerificationReport]:
    if manifest is None:
        manifest = load_manifest()
    reports = [verify(e["id"], int(e["order"]), e.get("params") or {}) for e in manifest]
    return sorted(reports, key=lambda r: (r.identity, json.dumps(r.params, sort_keys=True)))
