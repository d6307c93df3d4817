import json

import pytest

from vermaforge import identities
from vermaforge.exact import Poly
from vermaforge.glmod import AlgebraContext, gram, irr_quotient_dims
from vermaforge.identities import (
    REGISTRY, UnknownIdentity, build_sides, load_manifest, parse_id, verify, verify_all,
)
from vermaforge.qseries import Series
from vermaforge.young import diagram_sum, filter_at_most_rows


def ints(s):
    return [c.constant_value() for c in s.coeffs]


def test_registry_names():
    expected = {"euler10", "finite13", "higher14", "higher15", "all16", "chi_neg17", "chi_neg18",
                "layer20", "layer22", "local_ch2", "chern1_ch3", "chern2_ch3", "global11_ch3",
                "global12_ch3", "appendixB"}
    assert set(REGISTRY) == expected


def test_parse_id():
    assert parse_id("euler10") == ("euler10", {})
    assert parse_id("higher14(3)") == ("higher14", {"l": 3})
    assert parse_id("layer20(0,1)") == ("layer20", {"k": 0, "l": 1})
    with pytest.raises(UnknownIdentity):
        parse_id("nosuch")
    with pytest.raises(ValueError):
        parse_id("higher14")


def test_invalid_parameters():
    with pytest.raises(ValueError):
        build_sides("higher14", 5, {"l": 0})
    with pytest.raises(ValueError):
        build_sides("finite13", 5, {})
    with pytest.raises(ValueError):
        build_sides("euler10", -1)
    with pytest.raises(UnknownIdentity):
        build_sides("nosuch", 3)


def test_build_sides_examples():
    lhs, rhs, _ = build_sides("euler10", 4)
    assert ints(lhs) == ints(rhs) == [1, 1, 2, 3, 5]
    lhs, rhs, _ = build_sides("finite13", 3, {"n": 1})
    assert ints(lhs) == ints(rhs) == [1, 1, 0, 0]
    lhs, rhs, _ = build_sides("local_ch2", 3)
    assert ints(lhs) == ints(rhs) == [0, 1, 4, 10]


def test_euler_to_30():
    assert verify("euler10", 30).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_finite_forms(n):
    assert verify("finite13", 25, {"n": n}).passed


@pytest.mark.parametrize("l", [2, 3])
def test_higher(l):
    assert verify("higher14", 20, {"l": l}).passed


def test_eq15_readings():
    rep = verify("higher15", 20)
    assert rep.passed
    assert rep.notes["reading_product_form_matches"]
    assert rep.notes["reading_l2_form_matches"]
    assert rep.notes["printed_two_column_rhs_first_mismatch"] == 10


def test_all_diagrams():
    assert verify("all16", 20).passed


def test_negative_charge():
    assert verify("chi_neg17", 20).passed
    for l in (1, 2, 3):
        assert verify("chi_neg18", 20, {"l": l}).passed


def test_negative_charge_matches_gram_ranks():
    ctx = AlgebraContext(10)
    lhs, _, _ = build_sides("chi_neg17", 5)
    assert ints(lhs)[1:] == irr_quotient_dims(ctx, -1, 5)
    for l in (1, 2, 3):
        lhs, _, _ = build_sides("chi_neg18", 5, {"l": l})
        assert ints(lhs)[1:] == irr_quotient_dims(ctx, -l, 5)


@pytest.mark.parametrize("kl", [(0, 1), (1, 1)])
def test_layer_minus(kl):
    rep = verify("layer20", 5, {"k": kl[0], "l": kl[1]})
    assert rep.passed
    assert rep.notes["effective_order"] >= 1


@pytest.mark.parametrize("kl", [(0, 1), (1, 1), (2, 1)])
def test_layer_plus(kl):
    rep = verify("layer22", 5, {"k": kl[0], "l": kl[1]})
    assert rep.passed
    assert rep.notes["effective_order"] >= 1


def test_local_identity():
    assert verify("local_ch2", 20).passed


def test_local_identity_is_determinant_degree():
    lhs, _, _ = build_sides("local_ch2", 5)
    ctx = AlgebraContext(5)
    for k in range(1, 6):
        assert lhs.coeffs[k].constant_value() == gram(ctx, k).det.degree("mu")


def test_chern_series():
    assert verify("chern1_ch3", 15).passed
    assert verify("chern2_ch3", 15).passed


def test_appendix_b():
    rep = verify("appendixB", 15)
    assert rep.passed
    a = Poly.var("a")
    assert rep.rows[3].lhs == a ** 3 + 2 * a ** 2 + 3 * a


def test_restricted_all16_is_higher14():
    for l in (1, 2, 3):
        restricted = diagram_sum(12, filter_at_most_rows(l))
        _, rhs, _ = build_sides("higher14", 12, {"l": l})
        assert restricted == rhs


def test_order_zero_manifest(tmp_path):
    manifest = [{"id": name, "order": 0, "params": {k: 1 for k in keys}}
                for name, (_, keys) in sorted(REGISTRY.items())]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest))
    reports = verify_all(load_manifest(str(path)))
    assert len(reports) == len(REGISTRY)
    assert all(r.passed for r in reports)


def test_bad_manifest(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"id": "euler10"}')
    with pytest.raises(ValueError):
        load_manifest(str(path))
    path.write_text("[{\"order\": 3}]")
    with pytest.raises(ValueError):
        load_manifest(str(path))


def test_default_manifest_loads():
    entries = load_manifest()
    ids = {e["id"] for e in entries}
    assert ids == set(REGISTRY)


def test_mutation_is_located(monkeypatch):
    builder, keys = REGISTRY["euler10"]

    def broken(N, p):
        lhs, rhs, notes = builder(N, p)
        return lhs, rhs + Series.monomial(N, 7), notes

    monkeypatch.setitem(identities.REGISTRY, "euler10", (broken, keys))
    rep = verify("euler10", 12)
    assert not rep.passed
    assert rep.first_mismatch == 7
    assert rep.to_dict()["first_mismatch"] == 7


def test_report_dict_is_deterministic():
    d = verify("euler10", 3).to_dict()
    assert set(d) == {"id", "params", "order", "pass", "first_mismatch", "rows", "notes"}
    assert d["rows"][2] == {"k": 2, "lhs": "2", "rhs": "2", "match": True}
    assert verify("appendixB", 2).to_dict()["rows"][2]["lhs"] == "a^2 + 2*a"
