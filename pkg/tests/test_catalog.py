import json

import pytest

from oracles import commutator, count_automorphisms, pair, power
from reidemeister.catalog import (
    DEFAULT_CATALOG,
    AffineSpec,
    GpnSpec,
    build_affine,
    build_gpn,
    catalog_listing,
    geometric_sum,
    inner_parameters,
    load_spec_file,
    multiplicative_order,
    parse_selector,
    reproduce_paper_examples,
    resolve,
    verify_7pr,
    verify_lincom,
    verify_nux,
)
from reidemeister.errors import GroupError, SpecError, TooLargeError
from reidemeister.groups import center, check_axioms, is_metabelian


def parse_label(text):
    return tuple(int(v) for v in text.strip("()").split(","))


def test_gpn_relation(g33):
    x, y = g33.generators
    assert g33.order == 243
    assert g33.mul[g33.mul[y, x], g33.inv[y]] == power(g33, x, 4)
    assert g33.orders[x] == 27 and g33.orders[y] == 9


@pytest.mark.parametrize("p,n", [(2, 3), (9, 3), (3, 2), (1, 4)])
def test_gpn_rejects(p, n):
    with pytest.raises(SpecError):
        build_gpn(GpnSpec(p, n))


def test_gpn_over_cap():
    with pytest.raises(TooLargeError):
        build_gpn(GpnSpec(7, 3))
    row = next(r for r in catalog_listing() if r["selector"] == "gpn:7:3")
    assert "4096" in row["error"]


def test_nux_formula(g33):
    assert geometric_sum(4, 3, 27) == 21
    # (x y)^3 = x^21 y^3
    g = pair(g33, 1, 1)
    assert power(g33, g, 3) == pair(g33, 21, 3)
    r = verify_nux(g33)
    assert r.verdict == "pass" and r.details["commutator_chain"]


@pytest.mark.parametrize("selector", ["gpn:3:3", "gpn:5:3"])
def test_7pr(selector):
    G = parse_selector(selector).group
    r = verify_7pr(G)
    assert r.verdict == "pass"
    assert r.details["all_b_divisible_by_p"]
    p = G.cache["construction"].p
    # one row per distinct inner automorphism, i.e. |G / Z(G)|
    assert r.details["inner_automorphisms"] == G.order // len(center(G))
    assert r.details["inner_automorphisms"] == len(inner_parameters(G))
    assert all(b % p == 0 for _, _, b in inner_parameters(G))


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("n", [3, 4])
def test_multiplicative_order(p, n):
    mod = p**n
    k, v = 1, (p + 1) % mod
    while v != 1:
        v, k = (v * (p + 1)) % mod, k + 1
    assert multiplicative_order(p, n) == k == p ** (n - 1)


def test_affine_orders():
    assert build_affine(AffineSpec(7)).order == 42
    assert parse_selector("affine:9:1,4,7").group.order == 27
    G = parse_selector("affine:5:1").group
    assert G.order == 5 and G.is_abelian
    with pytest.raises(SpecError):
        parse_selector("affine:9:1,2")
    with pytest.raises(SpecError):
        parse_selector("affine:9:1,3")


@pytest.mark.parametrize("selector", ["affine:7:units", "affine:9:1,4,7", "affine:9:units"])
def test_affine_matches_matrices(selector):
    G = parse_selector(selector).group
    m = G.cache["construction"].m
    for u in range(G.order):
        f, h = parse_label(G.label(u))
        for v in range(0, G.order, 5):
            a, b = parse_label(G.label(v))
            # [[1,f],[0,h]] [[1,a],[0,b]]
            assert parse_label(G.label(G.mul[u, v])) == ((a + f * b) % m, (h * b) % m)


@pytest.mark.parametrize("selector", ["affine:7:units", "affine:9:units", "affine:25:units", "affine:9:1,4,7"])
def test_lincom(selector):
    G = parse_selector(selector).group
    assert verify_lincom(G).verdict == "pass"
    m = G.cache["construction"].m
    for u in range(0, G.order, 3):
        f, h = parse_label(G.label(u))
        for v in range(0, G.order, 7):
            a, b = parse_label(G.label(v))
            assert parse_label(G.label(commutator(G, u, v))) == ((a * (1 - h) + f * (b - 1)) % m, 1)


def test_lincom_example():
    G = parse_selector("affine:7:units").group
    u, v = G.index_of("(1,3)"), G.index_of("(2,5)")
    # 2(1-3) + 1(5-1) = 0
    assert G.label(commutator(G, u, v)) == "(0,1)"
    with pytest.raises(GroupError):
        verify_lincom(parse_selector("cyclic:7").group)


def test_worked_examples_report():
    r = reproduce_paper_examples()
    assert r.details["outer_class"]["ok"]
    assert all(row["ok"] for row in r.details["cyclic_intersections"])
    # the swept relative class is {e, x^9, x^18}, a subgroup
    assert sorted(r.details["relative_class"]["class"]) == ["(0,0)", "(18,0)", "(9,0)"]
    assert r.details["relative_class"]["is_subgroup"]
    assert r.verdict == "fail" and "relative_class" in r.witnesses


@pytest.mark.parametrize(
    "selector,order",
    [
        ("cyclic:9", 9),
        ("abelian:2,2,3", 12),
        ("semidirect:27:3:10", 81),
        ("heisenberg:3", 27),
        ("symmetric:4", 24),
        ("alternating:4", 12),
        ("dihedral:5", 10),
        ("direct(cyclic:3;dihedral:4)", 24),
        ("direct(gpn:3:3;cyclic:2)", 486),
    ],
)
def test_selectors(selector, order):
    e = parse_selector(selector)
    assert e.group.order == order
    assert check_axioms(e.group).verdict == "pass"


def test_every_catalog_entry_is_a_group():
    for sel in DEFAULT_CATALOG:
        try:
            e = parse_selector(sel)
        except TooLargeError:
            assert sel == "gpn:7:3"
            continue
        assert check_axioms(e.group, seed=1).verdict == "pass", sel


@pytest.mark.parametrize("bad", ["", "foo:3", "cyclic", "cyclic:x", "gpn:3", "abelian:", "direct(cyclic:2)", "symmetric:0"])
def test_bad_selectors(bad):
    with pytest.raises(SpecError):
        parse_selector(bad)


def test_small_automorphism_counts():
    # brute force over generator images
    assert count_automorphisms(parse_selector("dihedral:5").group) == 20
    assert count_automorphisms(parse_selector("alternating:4").group) == 24


def test_metabelian_families():
    for sel in ("gpn:3:3", "affine:25:units", "heisenberg:3", "dihedral:5"):
        assert is_metabelian(parse_selector(sel).group)


def test_spec_files(tmp_path):
    y = tmp_path / "g.yaml"
    y.write_text("kind: gpn\nparams: {p: 3, n: 3}\n")
    assert resolve(str(y)).group.order == 243
    j = tmp_path / "h.json"
    j.write_text(json.dumps({"kind": "affine", "params": {"m": 9, "H": [1, 4, 7]}}))
    assert load_spec_file(j).group.order == 27
    g = tmp_path / "gens.yaml"
    g.write_text("kind: cyclic\nparams: {m: 6}\ngenerators: ['2', '3']\n")
    G = load_spec_file(g).group
    assert [G.label(v) for v in G.generators] == ["2", "3"]


@pytest.mark.parametrize(
    "text",
    [
        "kind: gpn\nparams: {p: 3, n: 3}\ncolour: red\n",
        "params: {p: 3}\n",
        "kind: gpn\nparams: {p: 3}\n",
        "kind: cyclic\nparams: {m: 6}\ngenerators: ['2']\n",
        "kind: cyclic\nparams: {m: 6}\ngenerators: ['nope']\n",
        "- 1\n- 2\n",
        "kind: [\n",
    ],
)
def test_bad_spec_files(tmp_path, text):
    f = tmp_path / "bad.yaml"
    f.write_text(text)
    with pytest.raises(SpecError):
        load_spec_file(f)
