import pytest
from hypothesis import given, settings, strategies as st

from vermaforge.exact import Poly, root_multiplicity
from vermaforge.qseries import ProductSpec, series_from_product
from vermaforge.young import (
    Diagram, chi_fig4_printed, chi_series, diagram_sum, enumerate_diagrams,
    filter_heights_at_most, p_poly, p_poly_technique1, stats,
)

mu = Poly.var("mu")


def rising(k, start=0):
    out = Poly.const(1)
    for j in range(k):
        out = out * (mu + start + j)
    return out


def test_stats_examples():
    s = stats(Diagram.from_blocks({2: 1, 3: 1}))
    assert s["partition"] == (2, 2, 1)
    assert (s["size"], s["weight"], s["central_diagonal"]) == (5, 13, 2)
    for k in range(1, 5):
        s = stats(Diagram.det(k))
        assert s["partition"] == (1,) * k and s["weight"] == k * k and s["central_diagonal"] == 1
    empty = stats(Diagram(()))
    assert empty["size"] == 0 and empty["weight"] == 0


def test_p_poly_examples():
    for k in range(1, 6):
        assert p_poly(Diagram.det(k)) == rising(k)
    d23 = Diagram.from_blocks({2: 1, 3: 1})
    assert p_poly(d23) == (mu - 1) * mu ** 2 * (mu + 1) * (mu + 2)
    assert p_poly(Diagram.det(1, 2)) == mu * (mu - 1)
    assert p_poly_technique1(Diagram.det(1, 2)) == mu * (mu - 1)
    assert p_poly_technique1(d23) == p_poly(d23)


def test_chi_examples():
    N = 10
    for k in range(1, 5):
        spec = ProductSpec(tuple((0, g, 1) for g in range(1, k + 1)))
        assert chi_series(Diagram.det(k), N) == series_from_product(spec, N)
        fin = ProductSpec(tuple((0, g, 1) for g in range(1, k + 1))
                          + tuple((0, g, -1) for g in range(6 - k + 1, 7)))
        assert chi_series(Diagram.det(k), N, n=6) == series_from_product(fin, N)
    d12 = Diagram.from_blocks({1: 1, 2: 1})
    assert chi_series(d12, N) == series_from_product(ProductSpec(((0, 1, 2), (0, 3, 1))), N)
    with pytest.raises(ValueError):
        chi_series(Diagram.det(4), N, n=3)


def test_fig4_printed_form_only_agrees_for_i_equal_1():
    N = 12
    for j in range(2, 6):
        assert chi_fig4_printed(1, j, N) == chi_series(Diagram.from_blocks({1: 1, j: 1}), N)
    assert chi_fig4_printed(2, 3, N) != chi_series(Diagram.from_blocks({2: 1, 3: 1}), N)


def test_enumerate_examples():
    assert enumerate_diagrams(2) == [Diagram(()), Diagram.det(1), Diagram.det(1, 2)]
    four = enumerate_diagrams(4)
    assert set(four) == {Diagram(())} | {Diagram.det(1, m) for m in range(1, 5)} | {Diagram.det(2)}
    assert enumerate_diagrams(4, filter_heights_at_most(1)) == \
        [Diagram(())] + [Diagram.det(1, m) for m in range(1, 5)]
    assert len(four) == len(set(four))


def test_json_and_invalid():
    assert Diagram.from_blocks({3: 1, 2: 1}).to_json() == '{"blocks":{"2":1,"3":1}}'
    with pytest.raises(ValueError):
        Diagram.from_blocks({0: 1})
    with pytest.raises(ValueError):
        Diagram.from_blocks({2: -1})


def test_sum_of_squared_characters():
    N = 14
    spec = ProductSpec(rule=lambda g: [(0, g)])
    assert diagram_sum(N) == series_from_product(spec, N)


diagrams = st.dictionaries(st.integers(1, 4), st.integers(1, 3), max_size=3).map(Diagram.from_blocks)


@settings(max_examples=60, deadline=None)
@given(diagrams)
def test_diagram_invariants(d):
    p = p_poly(d)
    assert (p.degree("mu") if d.blocks else 0) == d.size
    assert p == p_poly_technique1(d)
    if d.blocks:
        assert root_multiplicity(p, 0) == stats(d)["central_diagonal"]
    lam = d.partition()
    assert list(lam) == sorted(lam, reverse=True)
    assert sum(lam) == d.size


@settings(max_examples=30, deadline=None)
@given(diagrams, st.integers(0, 3))
def test_finite_characters_converge(d, extra):
    n = d.max_height + extra + 3
    N = 8
    fin = chi_series(d, N, n)
    inf = chi_series(d, N)
    bound = min(N, n - d.max_height)
    assert fin.coeffs[:bound + 1] == inf.coeffs[:bound + 1]
