import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import closure, commutator, pair
from reidemeister.catalog import parse_selector
from reidemeister.errors import SpecError, TooLargeError
from reidemeister.groups import build_abelian, derived_subgroup, lower_central_terms
from reidemeister.words import (
    Comm,
    Inv,
    Prod,
    Var,
    eval_word,
    gamma_word,
    is_outer_commutator,
    parse_word,
    random_outer_commutator,
    variables,
    verbal_subgroup,
    verbal_width,
    width_layers,
    word_values,
)


def test_parse_left_normed():
    assert parse_word("[x1,x2,x3]") == Comm(Comm(Var(1), Var(2)), Var(3))
    assert parse_word("[x1,x2,x3]") == gamma_word(3)
    assert parse_word("x1 x2^-1") == Prod((Var(1), Inv(Var(2))))
    assert parse_word("x1*x2") == parse_word("x1 x2")
    assert parse_word("(x1^-1)^-1") == Var(1)
    assert parse_word("[[x1,x2],[x3,x4]]") == Comm(Comm(Var(1), Var(2)), Comm(Var(3), Var(4)))


@pytest.mark.parametrize("text", ["", "[x1]", "x0", "y1", "[x1,x2", "x1)", "x1^2"])
def test_parse_errors(text):
    with pytest.raises(SpecError):
        parse_word(text)


def test_roundtrip_str():
    for text in ["[x1,x2,x3]", "x1*x2^-1", "[[x1,x2],[x3,x4]]", "[x1,x2]^-1"]:
        w = parse_word(text)
        assert parse_word(str(w)) == w


def test_outer_commutator_predicate():
    assert is_outer_commutator(parse_word("[[x1,x2],[x3,x4]]"))
    assert is_outer_commutator(Var(1))
    assert not is_outer_commutator(parse_word("[x1,x1]"))
    assert not is_outer_commutator(parse_word("[x1,x2^-1]"))
    assert not is_outer_commutator(parse_word("x1 x2"))


def test_eval(g33):
    x, y = g33.generators
    yi = int(g33.inv[y])
    assert eval_word(g33, gamma_word(2), [x, g33.identity]) == g33.identity
    assert eval_word(g33, gamma_word(3), [x, yi, yi]) == pair(g33, 9, 0)
    assert eval_word(g33, parse_word("[x1,x2]"), {1: x, 2: y}) == commutator(g33, x, y)
    with pytest.raises(KeyError):
        eval_word(g33, gamma_word(3), [x, y])


def test_verbal_subgroups(g33):
    assert len(verbal_subgroup(g33, Var(1))) == 243
    assert verbal_subgroup(g33, gamma_word(2)) == derived_subgroup(g33)
    assert verbal_subgroup(g33, gamma_word(2)).tolist() == sorted(closure(g33, [pair(g33, 3, 0)]))
    assert verbal_subgroup(build_abelian([4, 6]), gamma_word(2)).is_trivial()


def test_widths(g33):
    assert verbal_width(build_abelian([3, 3]), gamma_word(2)) == 0
    assert verbal_width(g33, gamma_word(2)) == 1
    assert verbal_width(g33, gamma_word(3)) == 1


def test_width_of_a_nontrivial_word():
    # S3: squares form A3 and every element of A3 is a square
    S3 = parse_selector("symmetric:3").group
    assert verbal_width(S3, parse_word("x1 x1")) == 1
    # A4: the derived subgroup V4 is reached by single commutators
    A4 = parse_selector("alternating:4").group
    assert verbal_width(A4, gamma_word(2)) == 1


def test_general_word_budget(g33):
    with pytest.raises(TooLargeError):
        word_values(g33, parse_word("x1 x2 x3 x4"), budget=10**6)


def test_brute_force_matches_bracket_evaluation():
    G = parse_selector("heisenberg:3").group
    w = gamma_word(2)
    fast = word_values(G, w)
    slow = np.zeros(G.order, dtype=bool)
    for a in range(G.order):
        for b in range(G.order):
            slow[commutator(G, a, b)] = True
    assert np.array_equal(fast, slow)


def test_layers_monotone(g53):
    layers = width_layers(g53, gamma_word(2))
    assert layers == sorted(layers)
    assert layers[-1] == len(lower_central_terms(g53)[1])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32))
def test_random_outer_commutators(nvars, seed):
    rng = np.random.default_rng(seed)
    w = random_outer_commutator(rng, nvars)
    assert is_outer_commutator(w)
    assert variables(w) == list(range(1, nvars + 1))


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_identity_kills_outer_commutators(g33, data):
    nvars = data.draw(st.integers(2, 4))
    w = random_outer_commutator(np.random.default_rng(data.draw(st.integers(0, 999))), nvars)
    values = [data.draw(st.integers(0, 242)) for _ in range(nvars)]
    values[data.draw(st.integers(0, nvars - 1))] = g33.identity
    assert eval_word(g33, w, values) == g33.identity
