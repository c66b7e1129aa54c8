"""Twisted conjugacy classes, Reidemeister numbers and the subgroup condition.

``[y]_phi = {z^-1 y phi(z) : z in G}``. For an inner automorphism by ``g`` the
class of the identity is ``[e]_g = {[x, g] : x in G}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotNormalError, TooLargeError
from .groups import (
    AUTOMORPHISM_CAP,
    Automorphism,
    ElementSet,
    Group,
    enumerate_automorphisms,
    inner_automorphism,
    is_normal,
    is_subgroup,
    lower_central_terms,
    normal_closure,
    quotient,
    set_product,
)
from .report import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    SKIPPED,
    CheckReport,
    combine,
    render_element,
    render_set,
)
from .words import eval_word, leaves, random_outer_commutator

INNER = "inner-only"
ALL = "all-automorphisms"
FAMILY = "family"

LEMMA_SAMPLES = 200
ALL_PAIRS_LIMIT = 64


@dataclass(frozen=True, eq=False)
class TwistedClass:
    group: Group
    aut: Automorphism
    base: int
    members: ElementSet

    def __len__(self) -> int:
        return len(self.members)

    @property
    def is_subgroup(self) -> bool:
        return is_subgroup(self.group, self.members)


def twisted_orbit(G: Group, phi: Automorphism, y: int) -> np.ndarray:
    """``z^-1 y phi(z)`` for every ``z``, indexed by ``z``."""
    return G.mul[G.mul[G.inv, y], phi.image]


def twisted_class(G: Group, phi: Automorphism, y: int) -> TwistedClass:
    return TwistedClass(G, phi, int(y), ElementSet(G, twisted_orbit(G, phi, y)))


def twisted_class_left(G: Group, phi: Automorphism, y: int) -> ElementSet:
    """The class under the alternative convention ``x = z y phi(z)^-1``."""
    ar = np.arange(G.order)
    return ElementSet(G, G.mul[G.mul[ar, y], G.inv[phi.image]])


def e_class(G: Group, phi: Automorphism) -> TwistedClass:
    return twisted_class(G, phi, G.identity)


def e_class_inner(G: Group, g: int) -> TwistedClass:
    members = ElementSet(G, G.commutator_table[:, g])
    return TwistedClass(G, inner_automorphism(G, g), G.identity, members)


def e_class_relative(G: Group, g: int, N: ElementSet) -> ElementSet:
    """``[e]_{g,N} = {[h, g] : h in N}``."""
    if not is_subgroup(G, N) or not is_normal(G, N):
        raise NotNormalError("[e]_{g,N} needs a normal subgroup N")
    return ElementSet(G, G.comm(N.members, g))


def reidemeister_partition(G: Group, phi: Automorphism) -> list[TwistedClass]:
    seen = np.zeros(G.order, dtype=bool)
    out = []
    for y in range(G.order):
        if seen[y]:
            continue
        cls = twisted_class(G, phi, y)
        seen[cls.members.members] = True
        out.append(cls)
    return out


def reidemeister_number(G: Group, phi: Automorphism) -> int:
    return len(reidemeister_partition(G, phi))


# inner classes, shared by several checks ------------------------------------


def inner_membership(G: Group) -> np.ndarray:
    """Boolean matrix ``M[g, v]`` saying whether ``v`` lies in ``[e]_g``."""
    if "inner_membership" not in G.cache:
        n = G.order
        M = np.zeros((n, n), dtype=bool)
        M[np.broadcast_to(np.arange(n)[None, :], (n, n)), G.commutator_table] = True
        M.setflags(write=False)
        G.cache["inner_membership"] = M
    return G.cache["inner_membership"]


def distinct_inner_classes(G: Group) -> list[tuple[ElementSet, np.ndarray]]:
    """Distinct sets ``[e]_g`` with the elements ``g`` producing each, in order of first ``g``."""
    if "inner_distinct" not in G.cache:
        M = inner_membership(G)
        packed = np.packbits(M, axis=1)
        keys = packed.view(np.dtype((np.void, packed.shape[1]))).ravel()
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        out = []
        for slot in np.argsort(first):
            owners = np.flatnonzero(inverse.ravel() == slot)
            out.append((ElementSet.from_mask(G, M[first[slot]]), owners))
        G.cache["inner_distinct"] = out
    return G.cache["inner_distinct"]


@dataclass(frozen=True, eq=False)
class ConditionVerdict:
    group: Group
    mode: str
    holds: bool
    witness: TwistedClass | None
    checked: int

    def to_report(self, name: str) -> CheckReport:
        G = self.group
        details = {"mode": self.mode, "automorphisms_checked": self.checked, "holds": self.holds}
        witnesses = {}
        if self.witness is not None:
            witnesses = {
                "automorphism": self.witness.aut.describe(),
                "class": render_set(G, self.witness.members),
                "class_size": len(self.witness),
            }
        return CheckReport(name, PASS if self.holds else FAIL, details=details, witnesses=witnesses)


def _first_failure(G: Group, automorphisms: Iterable[Automorphism]) -> tuple[TwistedClass | None, int]:
    seen: dict[bytes, bool] = {}
    count = 0
    for phi in automorphisms:
        count += 1
        cls = e_class(G, phi)
        key = cls.members.members.tobytes()
        if key not in seen:
            seen[key] = cls.is_subgroup
        if not seen[key]:
            return cls, count
    return None, count


def check_condition(
    G: Group,
    mode: str = INNER,
    automorphisms: Sequence[Automorphism] | None = None,
    cap: int = AUTOMORPHISM_CAP,
) -> ConditionVerdict:
    """Is ``[e]_phi`` a subgroup for every ``phi`` in the selected family?

    ``mode`` is ``inner-only``, ``all-automorphisms`` (enumerates Aut(G), subject
    to ``cap``) or ``family`` (the given ``automorphisms``).
    """
    if mode == INNER:
        for members, owners in distinct_inner_classes(G):
            if not is_subgroup(G, members):
                g = int(owners[0])
                witness = TwistedClass(G, inner_automorphism(G, g), G.identity, members)
                return ConditionVerdict(G, mode, False, witness, G.order)
        return ConditionVerdict(G, mode, True, None, G.order)
    if mode == ALL:
        auts = enumerate_automorphisms(G, cap=cap)
    elif mode == FAMILY:
        if automorphisms is None:
            raise ValueError("family mode needs an explicit automorphism list")
        auts = list(automorphisms)
    else:
        raise ValueError(f"unknown condition mode {mode!r}")
    witness, count = _first_failure(G, auts)
    return ConditionVerdict(G, mode, witness is None, witness, count)


def condition_report(G: Group, mode: str, cap: int = AUTOMORPHISM_CAP) -> CheckReport:
    name = "condition-inner" if mode == INNER else "condition-all"
    try:
        return check_condition(G, mode, cap=cap).to_report(name)
    except TooLargeError as exc:
        return CheckReport(name, SKIPPED, notes=[str(exc)])


# lemma suite ----------------------------------------------------------------


def normal_family(G: Group) -> list[ElementSet]:
    """Normal closures of one element per conjugacy class, plus lower central terms.

    This is a sound but partial sample of the normal subgroup lattice.
    """
    if "normal_family" not in G.cache:
        found: dict[bytes, ElementSet] = {}
        for cls in G.conjugacy_classes:
            N = normal_closure(G, cls.members[:1])
            found.setdefault(N.members.tobytes(), N)
        for term in lower_central_terms(G):
            found.setdefault(term.members.tobytes(), term)
        G.cache["normal_family"] = sorted(found.values(), key=lambda s: (len(s), s.tolist()))
    return G.cache["normal_family"]


def _pairs(count: int, rng: np.random.Generator, samples: int) -> list[tuple[int, int]]:
    if count <= ALL_PAIRS_LIMIT:
        return [(i, j) for i in range(count) for j in range(count)]
    picks = rng.integers(0, count, size=(samples, 2))
    return [(int(i), int(j)) for i, j in picks]


def verify_lemmas(
    G: Group,
    seed: int = 0,
    samples: int = LEMMA_SAMPLES,
    automorphisms: Sequence[Automorphism] | None = None,
) -> CheckReport:
    """Check the elementary lemmas about ``[e]_g`` on one group.

    Quantifiers over normal subgroups range over :func:`normal_family`; the
    pair lemma and the outer commutator lemma are sampled when large.
    """
    verdict = check_condition(G, INNER)
    if not verdict.holds:
        return CheckReport(
            "lemmas",
            NOT_APPLICABLE,
            details={"reason": "[e]_g is not a subgroup for some g"},
            witnesses=verdict.to_report("condition-inner").witnesses,
        )
    rng = np.random.default_rng(seed)
    M = inner_membership(G)
    n, e = G.order, G.identity
    results: dict[str, dict] = {}

    # g never lies in its own class unless g = e
    diag = M[np.arange(n), np.arange(n)].copy()
    diag[e] = False
    bad = np.flatnonzero(diag)
    results["easy1"] = _lemma(not bad.size, n - 1, {"g": render_element(G, bad[0])} if bad.size else None)

    family = normal_family(G)
    failure = None
    for H in family:
        outside = M[H.members] & ~H.mask
        rows = np.flatnonzero(outside.any(axis=1))
        if rows.size:
            g = int(H.members[rows[0]])
            failure = {"g": render_element(G, g), "H": render_set(G, H)}
            break
    results["easy2"] = _lemma(failure is None, len(family), failure, partial=True)

    classes = distinct_inner_classes(G)
    extra = list(automorphisms or [])
    extra_classes = [e_class(G, phi) for phi in extra]
    failure = None
    for S, owners in classes:
        if not is_normal(G, S):
            failure = {"g": render_element(G, owners[0]), "class": render_set(G, S)}
            break
    if failure is None:
        for cls in extra_classes:
            if cls.is_subgroup and not is_normal(G, cls.members):
                failure = {"automorphism": cls.aut.describe()}
                break
    results["nsub"] = _lemma(failure is None, len(classes) + len(extra_classes), failure)

    failure = None
    pairs = _pairs(n, rng, samples)
    for g, h in pairs:
        composite = int(G.mul[h, g])  # inn(g) after inn(h) is conjugation by hg
        prod = set_product(G, ElementSet.from_mask(G, M[g]), ElementSet.from_mask(G, M[h]))
        if not prod.mask[M[composite]].all():
            failure = {"g": render_element(G, g), "h": render_element(G, h)}
            break
    checked = len(pairs)
    good = [c for c in extra_classes if c.is_subgroup]
    if failure is None and good:
        for i, j in _pairs(len(good), rng, samples):
            phi, psi = good[i], good[j]
            composed = e_class(G, phi.aut.compose(psi.aut))
            prod = set_product(G, phi.members, psi.members)
            checked += 1
            if not (composed.members <= prod):
                failure = {"phi": phi.aut.describe(), "psi": psi.aut.describe()}
                break
    results["prim"] = _lemma(failure is None, checked, failure)

    failure = None
    quotients = 0
    for N in family:
        if N.is_trivial() or len(N) == n:
            continue
        Q, proj = quotient(G, N)
        quotients += 1
        QM = Q.commutator_table
        for qg in range(Q.order):
            if not is_subgroup(Q, ElementSet(Q, QM[:, qg])):
                failure = {"N": render_set(G, N), "coset": Q.label(qg)}
                break
        if failure:
            break
    results["quu"] = _lemma(failure is None, quotients, failure, partial=True)

    failure = None
    for _ in range(samples):
        k = int(rng.integers(2, 5))
        w = random_outer_commutator(rng, k)
        assignment = [int(v) for v in rng.integers(0, n, size=k)]
        value = eval_word(G, w, assignment)
        if not all(M[assignment[v - 1], value] for v in leaves(w)):
            failure = {"word": str(w), "assignment": [render_element(G, a) for a in assignment]}
            break
    results["vnesh"] = _lemma(failure is None, samples, failure)

    overall = combine(r["verdict"] for r in results.values())
    return CheckReport(
        "lemmas",
        overall,
        details={"lemmas": results, "normal_family_size": len(family), "seed": seed},
        notes=["normal subgroups sampled as normal closures of single elements and lower central terms (partial)"],
    )


def _lemma(ok: bool, checked: int, witness, partial: bool = False) -> dict:
    out = {"verdict": PASS if ok else FAIL, "checked": int(checked)}
    if partial:
        out["coverage"] = "partial"
    if witness:
        out["witness"] = witness
    return out


def reidemeister_report(G: Group, cap: int = AUTOMORPHISM_CAP) -> CheckReport:
    """Reidemeister numbers over Aut(G) when enumerable, otherwise over inner automorphisms."""
    try:
        auts = enumerate_automorphisms(G, cap=cap)
        family = ALL
    except TooLargeError:
        family = INNER
        auts = _distinct_inner(G)
    numbers = []
    partition_ok = True
    for phi in auts:
        classes = reidemeister_partition(G, phi)
        sizes = sum(len(c) for c in classes)
        if sizes != G.order:
            partition_ok = False
        numbers.append(len(classes))
    hist: dict[int, int] = {}
    for r in numbers:
        hist[r] = hist.get(r, 0) + 1
    return CheckReport(
        "reidemeister",
        PASS if partition_ok else FAIL,
        details={
            "family": family,
            "automorphisms": len(auts),
            "class_number": len(G.conjugacy_classes),
            "reidemeister_numbers": {str(k): hist[k] for k in sorted(hist)},
            "partition_covers_group": partition_ok,
        },
    )


def _distinct_inner(G: Group) -> list[Automorphism]:
    seen: dict[bytes, Automorphism] = {}
    for g in range(G.order):
        phi = inner_automorphism(G, g)
        seen.setdefault(phi.image.tobytes(), phi)
    return list(seen.values())
