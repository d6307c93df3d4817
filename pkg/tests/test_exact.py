from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vermaforge.exact import (
    Poly, bareiss_det, cofactor_det, invariant_factor_t_valuations, poly_arith,
    poly_gcd, rank_q, nullspace_q, rat_str, root_multiplicity,
)
from vermaforge.glmod import AlgebraContext, full_gram_matrix

mu = Poly.var("mu")
t = Poly.var("t")
a = Poly.var("a")
q = Poly.var("q")


def test_poly_arith_examples():
    assert poly_arith(mu + 1, mu - 1, "mul") == mu ** 2 - 1
    assert poly_arith(mu ** 3 * (mu - 1), {"mu": 2}, "eval") == 8
    assert poly_arith(a * q ** 2, "a", "derivative") == q ** 2
    assert poly_arith(mu, 1, "add") == mu + 1
    assert poly_arith(mu ** 2, {"mu": t + 1}, "subst") == t ** 2 + 2 * t + 1


def test_eval_rejects_unbound_variable():
    with pytest.raises((KeyError, ValueError)):
        (mu * t).eval({"mu": 1})


def test_unknown_operation():
    with pytest.raises(ValueError):
        poly_arith(mu, mu, "div")


def test_canonical_string():
    assert str(2 * mu ** 4 - 2 * mu ** 3) == "2*mu^4 - 2*mu^3"
    assert str(Poly()) == "0"
    assert str(mu * t + Fraction(1, 2)) == "mu*t + 1/2"
    assert rat_str(Fraction(-3, 6)) == "-1/2"


def test_no_zero_terms_stored():
    p = (mu + 1) - (mu + 1)
    assert p.is_zero() and p.terms == {}


def test_root_multiplicity_examples():
    assert root_multiplicity(mu ** 3 * (mu - 1), 0) == 3
    assert root_multiplicity((mu - 1) * mu ** 2 * (mu + 1) * (mu + 2), 0) == 2
    assert root_multiplicity(mu * (mu + 1), 5) == 0
    with pytest.raises(ValueError):
        root_multiplicity(Poly(), 0)


def test_bareiss_examples():
    assert bareiss_det([[mu]]) == mu
    assert bareiss_det([[mu, 0], [0, mu - 1]]) == mu * (mu - 1)
    with pytest.raises(ValueError):
        bareiss_det([[mu, 1]])


def test_bareiss_gram_level2():
    _, G = full_gram_matrix(AlgebraContext(2), 2)
    d = bareiss_det(G)
    monic = d.scale(1 / Fraction(d.univariate_coeffs("mu")[-1]))
    assert monic == mu ** 3 * (mu - 1)


def test_valuation_examples():
    assert invariant_factor_t_valuations([[1, 0, 0], [0, t, 0], [0, 0, t ** 2]]) == [0, 1, 2]
    assert invariant_factor_t_valuations([[t, 0], [0, t]]) == [1, 1]
    with pytest.raises(ValueError):
        invariant_factor_t_valuations([[t, t], [t, t]])


def test_valuations_gram_at_zero():
    _, G = full_gram_matrix(AlgebraContext(2), 2)
    Gt = [[x.subs({"mu": t}) for x in row] for row in G]
    vals = invariant_factor_t_valuations(Gt)
    assert sum(vals) == 3
    assert vals == invariant_factor_t_valuations(Gt, method="minors")


def test_poly_gcd():
    g = poly_gcd((mu - 1) * (mu + 2) ** 2, (mu + 2) * (mu - 3), "mu")
    assert g == mu + 2
    assert poly_gcd(2 * mu, Poly(), "mu") == mu


def test_rank_and_nullspace():
    rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert rank_q(rows) == 1
    (v,) = nullspace_q(rows)
    assert v[0] + 2 * v[1] == 0


small_poly = st.builds(
    lambda c0, c1, c2: Poly.from_coeffs("mu", [c0, c1, c2]),
    st.integers(-3, 3), st.integers(-3, 3), st.integers(-2, 2),
)


@settings(max_examples=25, deadline=None)
@given(st.lists(small_poly, min_size=16, max_size=16))
def test_bareiss_matches_cofactor(entries):
    M = [entries[4 * i:4 * i + 4] for i in range(4)]
    assert bareiss_det(M) == cofactor_det(M)


@settings(max_examples=25, deadline=None)
@given(st.lists(small_poly, min_size=9, max_size=9))
def test_row_swap_flips_sign(entries):
    M = [entries[3 * i:3 * i + 3] for i in range(3)]
    assert bareiss_det([M[1], M[0], M[2]]) == -bareiss_det(M)


def _t_matrix(draw_diag, draw_upper, unimod):
    # U * diag(t^e) * V with unimodular-ish integer U, V keeps the valuations
    n = len(draw_diag)
    D = [[t ** draw_diag[i] * (1 + t) if i == j else Poly() for j in range(n)] for i in range(n)]
    U = [[Poly.const(1) if i == j else (Poly.const(draw_upper[i * n + j]) if j > i else Poly())
          for j in range(n)] for i in range(n)]
    V = [[Poly.const(1) if i == j else (Poly.const(unimod[i * n + j]) if j < i else Poly())
          for j in range(n)] for i in range(n)]

    def mul(A, B):
        return [[sum((A[i][k] * B[k][j] for k in range(n)), Poly()) for j in range(n)] for i in range(n)]
    return mul(mul(U, D), V)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=3, max_size=3),
       st.lists(st.integers(-2, 2), min_size=9, max_size=9),
       st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_valuations_recover_diagonal(exps, up, low):
    M = _t_matrix(exps, up, low)
    vals = invariant_factor_t_valuations(M)
    assert vals == sorted(exps)
    assert vals == invariant_factor_t_valuations(M, method="minors")
    assert sum(vals) == root_multiplicity(bareiss_det(M), 0, "t")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.builds(lambda c0, c1: Poly.from_coeffs("t", [c0, c1]),
                          st.integers(-2, 2), st.integers(-2, 2)), min_size=9, max_size=9))
def test_valuation_sum_equals_root_multiplicity(entries):
    M = [entries[3 * i:3 * i + 3] for i in range(3)]
    det = bareiss_det(M)
    if det.is_zero():
        with pytest.raises(ValueError):
            invariant_factor_t_valuations(M)
        return
    vals = invariant_factor_t_valuations(M)
    expected = root_multiplicity(det, 0, "t") if det.variables() else 0
    assert sum(vals) == expected
    assert vals == invariant_factor_t_valuations(M, method="minors")


@settings(max_examples=40, deadline=None)
@given(small_poly, small_poly, small_poly)
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y).derivative("mu") == x.derivative("mu") + y.derivative("mu")
    assert (x * y).eval({"mu": 3}) == x.eval({"mu": 3}) * y.eval({"mu": 3})
