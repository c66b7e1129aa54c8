"""Group words: a small expression tree, a text parser and exact verbal subgroups.

Text syntax: variables ``x1, x2, ...``; commutators ``[u,v]`` (left-normed,
so ``[u,v,w] = [[u,v],w]``); concatenation by juxtaposition or ``*``;
inverse by ``^-1``; parentheses for grouping.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import SpecError, TooLargeError
from .groups import ElementSet, Group, _closure

DEFAULT_BUDGET = 10**8
MAX_WIDTH_LAYERS = 64


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Inv:
    word: "WordExpr"

    def __str__(self) -> str:
        inner = str(self.word)
        return f"{inner}^-1" if isinstance(self.word, (Var, Comm)) else f"({inner})^-1"


@dataclass(frozen=True)
class Prod:
    factors: tuple["WordExpr", ...]

    def __str__(self) -> str:
        return "*".join(f"({f})" if isinstance(f, Prod) else str(f) for f in self.factors)


@dataclass(frozen=True)
class Comm:
    left: "WordExpr"
    right: "WordExpr"

    def __str__(self) -> str:
        return f"[{self.left},{self.right}]"


WordExpr = Union[Var, Inv, Prod, Comm]


def leaves(w: WordExpr) -> list[int]:
    if isinstance(w, Var):
        return [w.index]
    if isinstance(w, Inv):
        return leaves(w.word)
    if isinstance(w, Prod):
        return [v for f in w.factors for v in leaves(f)]
    return leaves(w.left) + leaves(w.right)


def variables(w: WordExpr) -> list[int]:
    return sorted(set(leaves(w)))


def is_outer_commutator(w: WordExpr) -> bool:
    def brackets_only(u: WordExpr) -> bool:
        if isinstance(u, Var):
            return True
        if isinstance(u, Comm):
            return brackets_only(u.left) and brackets_only(u.right)
        return False

    lv = leaves(w)
    return brackets_only(w) and len(lv) == len(set(lv))


def gamma_word(k: int) -> WordExpr:
    """The left-normed commutator ``[x1, x2, ..., xk]``; ``gamma_word(1) = x1``."""
    if k < 1:
        raise ValueError("gamma words start at k = 1")
    w: WordExpr = Var(1)
    for i in range(2, k + 1):
        w = Comm(w, Var(i))
    return w


# parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(x\d+)|(\^-1|\^1)|([\[\](),*]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecError(f"unexpected character in word at position {pos}: {text[pos:]!r}")
        out.append(next(g for g in m.groups() if g is not None))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse_word(text: str) -> WordExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise SpecError("empty word")
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise SpecError(f"expected {expected or 'token'} but found {tok!r} in {text!r}")
        pos += 1
        return tok

    def expr() -> WordExpr:
        factors = [term()]
        while peek() is not None and peek() not in ("]", ")", ","):
            if peek() == "*":
                take("*")
            factors.append(term())
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def term() -> WordExpr:
        w = atom()
        while peek() in ("^-1", "^1"):
            if take() == "^-1":
                w = w.word if isinstance(w, Inv) else Inv(w)
        return w

    def atom() -> WordExpr:
        tok = take()
        if tok.startswith("x"):
            idx = int(tok[1:])
            if idx < 1:
                raise SpecError("variables are numbered from x1")
            return Var(idx)
        if tok == "(":
            w = expr()
            take(")")
            return w
        if tok == "[":
            parts = [expr()]
            while peek() == ",":
                take(",")
                parts.append(expr())
            take("]")
            if len(parts) < 2:
                raise SpecError("a commutator needs at least two entries")
            w = parts[0]
            for p in parts[1:]:
                w = Comm(w, p)
            return w
        raise SpecError(f"unexpected token {tok!r} in {text!r}")

    w = expr()
    if pos != len(tokens):
        raise SpecError(f"trailing input in word {text!r}")
    return w


# evaluation -----------------------------------------------------------------


def _evaluate(G: Group, w: WordExpr, env: Mapping[int, np.ndarray]) -> np.ndarray:
    if isinstance(w, Var):
        return env[w.index]
    if isinstance(w, Inv):
        return G.inv[_evaluate(G, w.word, env)]
    if isinstance(w, Prod):
        acc = _evaluate(G, w.factors[0], env)
        for f in w.factors[1:]:
            acc = G.mul[acc, _evaluate(G, f, env)]
        return acc
    return G.comm(_evaluate(G, w.left, env), _evaluate(G, w.right, env))


def eval_word(G: Group, w: WordExpr, assignment: Sequence[int] | Mapping[int, int]) -> int:
    """Value of ``w``; a sequence assigns ``x1, x2, ...`` in order."""
    if not isinstance(assignment, Mapping):
        assignment = {i + 1: g for i, g in enumerate(assignment)}
    missing = [v for v in variables(w) if v not in assignment]
    if missing:
        raise KeyError(f"no value assigned to {', '.join(f'x{v}' for v in missing)}")
    env = {v: np.asarray(int(assignment[v])) for v in variables(w)}
    return int(_evaluate(G, w, env))


def word_values(G: Group, w: WordExpr, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean mask of every value ``w(g_1, ..., g_k)``.

    Outer commutator words have independent sub-brackets, so their value set
    is built bracket by bracket; this covers the lower central words and costs
    at most ``|G|^2`` per bracket. Other words are enumerated over all
    ``|G|^k`` assignments.
    """
    n = G.order
    if is_outer_commutator(w):
        spent = 0

        def values(u: WordExpr) -> np.ndarray:
            nonlocal spent
            if isinstance(u, Var):
                return np.arange(n)
            a, b = values(u.left), values(u.right)
            spent += a.size * b.size
            if spent > budget:
                raise TooLargeError(f"word evaluation exceeds the budget of {budget}")
            mask = np.zeros(n, dtype=bool)
            mask[G.comm(a[:, None], b[None, :]).ravel()] = True
            return np.flatnonzero(mask)

        out = np.zeros(n, dtype=bool)
        out[values(w)] = True
        return out

    vs = variables(w)
    total = n ** len(vs)
    if total > budget:
        raise TooLargeError(
            f"{n}^{len(vs)} assignments exceed the budget of {budget}; "
            "use an outer commutator form such as the gamma words for lower central terms"
        )
    out = np.zeros(n, dtype=bool)
    inner = 0
    while inner < len(vs) and n ** (inner + 1) <= 1 << 20:
        inner += 1
    outer_vars, inner_vars = vs[: len(vs) - inner], vs[len(vs) - inner :]
    grids = [g.ravel() for g in np.indices((n,) * inner)] if inner else []
    for prefix in itertools.product(range(n), repeat=len(outer_vars)):
        env = {v: np.asarray(p) for v, p in zip(outer_vars, prefix)}
        env.update({v: g for v, g in zip(inner_vars, grids)})
        out[_evaluate(G, w, env)] = True
    return out


def verbal_subgroup(G: Group, w: WordExpr, budget: int = DEFAULT_BUDGET) -> ElementSet:
    vals = np.flatnonzero(word_values(G, w, budget))
    return ElementSet(G, _closure(G, vals))


def width_layers(G: Group, w: WordExpr, budget: int = DEFAULT_BUDGET) -> list[int]:
    """Sizes of ``S_1, S_2, ...`` where ``S_1`` holds the values and their inverses."""
    vals = word_values(G, w, budget)
    target = ElementSet(G, _closure(G, np.flatnonzero(vals)))
    if target.is_trivial():
        return []
    first = vals.copy()
    first[G.inv[np.flatnonzero(vals)]] = True
    base = np.flatnonzero(first)
    layer = first
    sizes = [int(layer.sum())]
    while sizes[-1] < len(target):
        if len(sizes) >= MAX_WIDTH_LAYERS:
            raise RuntimeError(
                f"layer saturation did not reach w(G) after {MAX_WIDTH_LAYERS} layers; set arithmetic is broken"
            )
        nxt = np.zeros(G.order, dtype=bool)
        nxt[G.mul[np.flatnonzero(layer)[:, None], base[None, :]].ravel()] = True
        if int(nxt.sum()) == sizes[-1]:
            raise RuntimeError("layer saturation stalled below w(G)")
        layer = nxt
        sizes.append(int(layer.sum()))
    return sizes


def verbal_width(G: Group, w: WordExpr, budget: int = DEFAULT_BUDGET) -> int:
    """Least ``m`` with every element of ``w(G)`` a product of ``m`` values or inverses."""
    return len(width_layers(G, w, budget))


def random_outer_commutator(rng: np.random.Generator, nvars: int) -> WordExpr:
    """A random bracket arrangement of the distinct variables ``x1..x_nvars``."""
    order = [int(v) + 1 for v in rng.permutation(nvars)]

    def build(vs: list[int]) -> WordExpr:
        if len(vs) == 1:
            return Var(vs[0])
        cut = int(rng.integers(1, len(vs)))
        return Comm(build(vs[:cut]), build(vs[cut:]))

    return build(order)
