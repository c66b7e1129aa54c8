"""Lower central series, exact verbal widths, and the product decompositions of its terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import TooLargeError
from .groups import (
    ElementSet,
    Group,
    is_metabelian,
    is_normal,
    lower_central_terms,
    set_product,
)
from .report import FAIL, NOT_APPLICABLE, PASS, CheckReport, combine, render_element
from .twisted import INNER, check_condition, inner_membership
from .words import DEFAULT_BUDGET, gamma_word, verbal_width


@dataclass
class SeriesReport:
    group: Group
    terms: list[ElementSet]
    nilpotency_class: int | None
    widths: dict[int, int | None] = field(default_factory=dict)

    def gamma(self, k: int) -> ElementSet:
        """``gamma_k`` (1-based); terms past stabilisation repeat the last one."""
        if k < 1:
            raise ValueError("the series starts at gamma_1")
        return self.terms[min(k, len(self.terms)) - 1]

    @property
    def stabilizes_at(self) -> int:
        """Least ``k`` with ``gamma_k = gamma_{k+1}``."""
        return len(self.terms)

    def sizes(self) -> list[int]:
        return [len(t) for t in self.terms]


def lower_central_series(G: Group) -> SeriesReport:
    terms = lower_central_terms(G)
    cls = len(terms) - 1 if terms[-1].is_trivial() else None
    return SeriesReport(G, terms, cls)


def series_properties(G: Group) -> dict[str, bool]:
    """Monotone, normal terms, and ``gamma_k / gamma_{k+1}`` central in ``G / gamma_{k+1}``."""
    terms = lower_central_terms(G)
    chain = terms + [terms[-1]]
    ar = np.arange(G.order)
    out = {"monotone": True, "normal": True, "central_factors": True}
    for k in range(len(terms)):
        upper, lower = chain[k], chain[k + 1]
        out["monotone"] &= lower <= upper
        out["normal"] &= is_normal(G, upper)
        comms = G.comm(upper.members[:, None], ar[None, :])
        out["central_factors"] &= bool(lower.mask[comms].all())
    return out


def product_of_classes(G: Group, factors: list[ElementSet]) -> ElementSet:
    result = G.trivial()
    for f in factors:
        result = set_product(G, result, f)
    return result


def _inner_class(G: Group, g: int) -> ElementSet:
    return ElementSet.from_mask(G, inner_membership(G)[g])


def _prune(G: Group, elements: list[int]) -> list[int]:
    """Drop elements with trivial ``[e]_h`` and keep one element per distinct class."""
    kept: list[int] = []
    seen: set[bytes] = set()
    for h in elements:
        cls = _inner_class(G, h)
        key = cls.members.tobytes()
        if cls.is_trivial() or key in seen:
            continue
        seen.add(key)
        kept.append(h)
    return kept


def verify_wfin(G: Group) -> CheckReport:
    """``gamma_2 = [e]_{x_1}...[e]_{x_{n-1}}`` and the recursion ``p_ij = [x_i, h_j]``.

    Runs the recursion until the lower central series stabilises, comparing
    each product with the directly computed term.
    """
    if not check_condition(G, INNER).holds:
        return CheckReport("wfin", NOT_APPLICABLE, details={"reason": "inner condition fails"})
    gens = list(G.generators)
    series = lower_central_series(G)
    levels = []
    ok = True

    hs = _prune(G, gens[:-1])
    factors = [_inner_class(G, h) for h in hs]
    product = product_of_classes(G, factors)
    reverse = product_of_classes(G, factors[::-1])
    item1 = product == series.gamma(2)
    ok &= item1 and product == reverse
    levels.append(_level(G, 2, hs, product, series.gamma(2), product == reverse))

    k = 2
    while k < series.stabilizes_at + 1:
        ps = [int(G.comm(x, h)) for h in hs for x in gens]
        hs = _prune(G, ps)
        factors = [_inner_class(G, h) for h in hs]
        product = product_of_classes(G, factors)
        reverse = product_of_classes(G, factors[::-1])
        k += 1
        target = series.gamma(k)
        ok &= product == target and product == reverse
        levels.append(_level(G, k, hs, product, target, product == reverse))

    return CheckReport(
        "wfin",
        PASS if ok else FAIL,
        details={
            "generators": [G.label(g) for g in gens],
            "item1": bool(item1),
            "levels": levels,
            "series_sizes": series.sizes(),
        },
    )


def _level(G: Group, k: int, hs: list[int], product: ElementSet, target: ElementSet, order_free: bool) -> dict:
    return {
        "k": k,
        "factors": [render_element(G, h) for h in hs],
        "product_size": len(product),
        "gamma_size": len(target),
        "equal": product == target,
        "order_independent": bool(order_free),
    }


def lwid_bound(n: int, k: int) -> int:
    if k == 2:
        return n - 1
    return n ** (k - 2) * (n - 1) // 2


def metabelian_bound(n: int, k: int) -> int:
    """Bound for ``gamma_{j+2}`` with ``j = k - 2 >= 1``."""
    j = k - 2
    return n * (n - 1) // 2 * comb(n + j - 2, j - 1)


def stable_bound(n: int, k: int) -> int:
    return n ** (k - 1) * (n - 1)


def gamma_widths(G: Group, budget: int = DEFAULT_BUDGET) -> dict[int, int | None]:
    """Exact widths of ``gamma_k`` for ``k = 2..c+1``; ``None`` when over budget."""
    series = lower_central_series(G)
    widths: dict[int, int | None] = {}
    for k in range(2, series.stabilizes_at + 1):
        try:
            widths[k] = verbal_width(G, gamma_word(k), budget)
        except TooLargeError:
            widths[k] = None
    return widths


def verify_width_bounds(G: Group, budget: int = DEFAULT_BUDGET) -> CheckReport:
    if not check_condition(G, INNER).holds:
        return CheckReport("width-bounds", NOT_APPLICABLE, details={"reason": "inner condition fails"})
    n = len(G.generators)
    series = lower_central_series(G)
    widths = gamma_widths(G, budget)
    series.widths = widths
    metabelian = is_metabelian(G)
    rows = []
    notes = []
    for k, w in widths.items():
        if w is None:
            notes.append(f"gamma_{k}: width skipped, evaluation budget {budget} exceeded")
            continue
        row = {"k": k, "width": w, "lwid": lwid_bound(n, k), "lwid_ok": w <= lwid_bound(n, k)}
        if metabelian and k >= 3:
            row["metabelian"] = metabelian_bound(n, k)
            row["metabelian_ok"] = w <= row["metabelian"]
        rows.append(row)
    # with a finite group the stabilisation hypothesis is only ever met at gamma_k = e
    k_star = series.stabilizes_at
    stable = None
    if k_star >= 2:
        bound = stable_bound(n, k_star)
        stable = {
            "k": k_star,
            "bound": bound,
            "ok": all(w <= bound for w in widths.values() if w is not None),
            "vacuous": series.terms[-1].is_trivial(),
        }
        if stable["vacuous"]:
            notes.append(f"stabilisation gamma_{k_star} = gamma_{k_star + 1} only at the trivial subgroup")
    ok = all(r["lwid_ok"] and r.get("metabelian_ok", True) for r in rows)
    if stable is not None:
        ok &= stable["ok"]
    verdict = combine([PASS if ok else FAIL]) if rows or stable else NOT_APPLICABLE
    return CheckReport(
        "width-bounds",
        verdict,
        details={"generators": n, "metabelian": metabelian, "widths": rows, "stable_bound": stable},
        notes=notes,
    )
