import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import burnside_reidemeister, commutator, pair, twisted_orbit_left
from reidemeister.catalog import parse_selector
from reidemeister.errors import NotNormalError, TooLargeError
from reidemeister.groups import (
    ElementSet,
    automorphism_from_images,
    build_abelian,
    build_cyclic,
    center,
    conjugacy_classes,
    enumerate_automorphisms,
    identity_automorphism,
    inner_automorphism,
    is_subgroup,
    subgroup_generated,
)
from reidemeister.twisted import (
    ALL,
    FAMILY,
    INNER,
    check_condition,
    condition_report,
    e_class,
    e_class_inner,
    e_class_relative,
    reidemeister_number,
    reidemeister_partition,
    reidemeister_report,
    twisted_class,
    twisted_class_left,
    verify_lemmas,
)


@pytest.fixture(scope="module")
def outer(g33):
    return automorphism_from_images(g33, [pair(g33, 1, 3), g33.generators[1]])


@pytest.fixture(scope="module")
def aut33(g33):
    return enumerate_automorphisms(g33)


def labels(G, members):
    return sorted(G.label(int(m)) for m in members)


def test_identity_twist_is_conjugacy(s3):
    idn = identity_automorphism(s3)
    classes = {c.members for c in reidemeister_partition(s3, idn)}
    assert classes == set(conjugacy_classes(s3))
    for y in range(6):
        assert twisted_class(s3, idn, y).members in classes


def test_abelian_identity_twist():
    G = build_abelian([2, 6])
    idn = identity_automorphism(G)
    assert all(twisted_class(G, idn, y).members.tolist() == [y] for y in range(G.order))


def test_outer_class(g33, outer):
    cls = e_class(g33, outer)
    assert cls.members.labels() == ["(0,0)", "(0,3)", "(9,6)"]
    assert not cls.is_subgroup


def test_inner_classes(g33):
    x, _ = g33.generators
    assert e_class_inner(g33, g33.identity).members.is_trivial()
    assert e_class_inner(g33, center(g33).tolist()[-1]).members.is_trivial()
    cls = e_class_inner(g33, x)
    assert cls.members == subgroup_generated(g33, [pair(g33, 3, 0)]) and len(cls) == 9
    assert cls.members.tolist() == sorted({commutator(g33, z, x) for z in range(243)})


def test_relative_class(g33):
    x, y = g33.generators
    assert e_class_relative(g33, x, g33.trivial()).is_trivial()
    assert e_class_relative(g33, x, g33.whole()) == e_class_inner(g33, x).members
    N = subgroup_generated(g33, [pair(g33, 3, 0), pair(g33, 0, 3)])
    rel = e_class_relative(g33, x, N)
    # oracle: {[h, x] : h in N} swept directly gives e, x^9, x^18
    assert rel.tolist() == sorted({commutator(g33, h, x) for h in N})
    assert labels(g33, rel) == ["(0,0)", "(18,0)", "(9,0)"]
    assert is_subgroup(g33, rel)


def test_relative_class_needs_normal(s3):
    t = next(g for g in range(6) if s3.orders[g] == 2)
    with pytest.raises(NotNormalError):
        e_class_relative(s3, t, subgroup_generated(s3, [t]))


def test_reidemeister_numbers(g33, outer):
    assert reidemeister_number(build_cyclic(1), identity_automorphism(build_cyclic(1))) == 1
    # golden from the Burnside orbit-count oracle
    assert reidemeister_number(g33, outer) == burnside_reidemeister(g33, outer.image) == 17
    assert reidemeister_number(g33, identity_automorphism(g33)) == len(conjugacy_classes(g33))


def test_partition_covers_for_every_automorphism(g33, aut33):
    for phi in aut33[::7]:
        classes = reidemeister_partition(g33, phi)
        sizes = [len(c) for c in classes]
        assert sum(sizes) == 243
        seen = np.zeros(243, dtype=int)
        for c in classes:
            seen[c.members.members] += 1
        assert (seen == 1).all()
        assert len(classes) == burnside_reidemeister(g33, phi.image)


def test_conditions(g33):
    for sel in ("abelian:2,2", "abelian:3,9", "cyclic:9"):
        G = parse_selector(sel).group
        assert check_condition(G, INNER).holds and check_condition(G, ALL).holds
    assert check_condition(g33, INNER).holds
    verdict = check_condition(g33, ALL)
    assert not verdict.holds
    assert verdict.witness.members.labels() == ["(0,0)", "(0,3)", "(9,6)"]
    assert not is_subgroup(g33, verdict.witness.members)


def test_condition_fails_with_witness_on_s3(s3):
    verdict = check_condition(s3, INNER)
    assert not verdict.holds
    g = verdict.witness.aut.inner_witness
    assert verdict.witness.members == e_class_inner(s3, g).members
    report = verdict.to_report("condition-inner")
    assert report.verdict == "fail" and report.witnesses["class_size"] == len(verdict.witness)


def test_family_mode_and_skips(g33, outer):
    assert not check_condition(g33, FAMILY, automorphisms=[outer]).holds
    assert check_condition(g33, FAMILY, automorphisms=[identity_automorphism(g33)]).holds
    with pytest.raises(TooLargeError):
        check_condition(parse_selector("gpn:3:4").group, ALL)
    assert condition_report(parse_selector("gpn:3:4").group, ALL).verdict == "skipped"


@pytest.mark.parametrize("selector", ["abelian:2,4", "gpn:3:3", "gpn:5:3", "heisenberg:3", "affine:9:1,4,7"])
def test_lemmas_pass(selector):
    report = verify_lemmas(parse_selector(selector).group, seed=0)
    assert report.verdict == "pass", report.details


def test_lemmas_not_applicable(s3):
    assert verify_lemmas(s3).verdict == "not-applicable"


def test_reidemeister_report(g33):
    report = reidemeister_report(g33)
    assert report.verdict == "pass"
    assert report.details["automorphisms"] == 486
    assert report.details["class_number"] == 35


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_left_and_right_conventions_agree(g33, aut33, data):
    phi = aut33[data.draw(st.integers(0, len(aut33) - 1))]
    y = data.draw(st.integers(0, 242))
    right = twisted_class(g33, phi, y).members
    assert set(right.tolist()) == twisted_orbit_left(g33, phi.image, y)
    assert right == twisted_class_left(g33, phi, y)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["gpn:3:3", "heisenberg:3", "affine:9:1,4,7", "dihedral:4"]), st.data())
def test_inner_class_symmetries(selector, data):
    G = parse_selector(selector).group
    h = data.draw(st.integers(0, G.order - 1))
    a = data.draw(st.integers(0, G.order - 1))
    cls = e_class_inner(G, h)
    inv = e_class_inner(G, int(G.inv[h]))
    if cls.is_subgroup and inv.is_subgroup:
        assert cls.members == inv.members
    # [e]_{h^a} = ([e]_h)^a
    conj = ElementSet(G, G.conj(cls.members.members, a))
    assert e_class_inner(G, int(G.conj(h, a))).members == conj


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_subgroup_classes_are_phi_stable(g33, aut33, data):
    phi = aut33[data.draw(st.integers(0, len(aut33) - 1))]
    cls = e_class(g33, phi)
    ar = np.arange(243)
    image_set = ElementSet(g33, g33.mul[g33.inv[ar], phi.image])
    assert cls.members == image_set
    if cls.is_subgroup:
        assert ElementSet(g33, phi.image[cls.members.members]) == cls.members
