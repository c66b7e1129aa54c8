"""Derivations of a cyclic group into an abelian normal subgroup.

The acting generator is ``t`` and ``psi(a) = t a t^-1``, so a derivation obeys
``d(t^{j+k}) = d(t^j) + psi^j(d(t^k))`` and induces the automorphism
``g -> d(gA) g`` of the extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import sympy

from .errors import (
    HypothesisError,
    IllDefinedActionError,
    NotExtendableError,
    NotNormalError,
    TooLargeError,
    VerificationError,
)
from .groups import (
    AUTOMORPHISM_CAP,
    Automorphism,
    ElementSet,
    Group,
    Homomorphism,
    enumerate_automorphisms,
    inner_automorphism,
    is_abelian_subset,
    is_normal,
    is_subgroup,
    semidirect_product,
    subgroup_as_group,
)
from .report import FAIL, NOT_APPLICABLE, PASS, CheckReport, render_element, render_set
from .series import lower_central_series
from .twisted import ALL, FAMILY, INNER, check_condition, e_class

MAX_DERIVATION_BASE = 1 << 16


@dataclass(frozen=True, eq=False)
class CyclicAction:
    """``Z_n`` acting on the abelian group ``A`` through ``psi``."""

    A: Group
    n: int
    psi: Automorphism

    def __post_init__(self) -> None:
        if not self.A.is_abelian:
            raise HypothesisError("the acted-on group must be abelian")
        if self.psi.group is not self.A:
            raise IllDefinedActionError("psi must be an automorphism of A")
        if not self.psi.power(self.n).is_identity:
            raise IllDefinedActionError(f"psi^{self.n} is not the identity")

    def add(self, a, b):
        return self.A.mul[a, b]

    def neg(self, a):
        return self.A.inv[a]

    def operator_sum(self, a, k: int):
        """``(id + psi + ... + psi^{k-1}) a`` by accumulation; vectorises over ``a``."""
        total = np.full(np.shape(a), self.A.identity, dtype=np.int64)
        cur = np.asarray(a, dtype=np.int64)
        for _ in range(k):
            total = self.A.mul[total, cur]
            cur = self.psi.image[cur]
        return total

    @cached_property
    def principal_values(self) -> ElementSet:
        """``{(id - psi) b : b in A}``."""
        b = np.arange(self.A.order)
        return ElementSet(self.A, self.A.mul[b, self.A.inv[self.psi.image[b]]])


@dataclass(frozen=True, eq=False)
class Derivation:
    action: CyclicAction
    generator_value: int
    values: tuple[int, ...]  # values[k] = d(t^k) for k = 0..n-1
    principal: bool

    def __call__(self, k: int) -> int:
        return self.values[k % self.action.n]

    def image(self) -> ElementSet:
        return ElementSet(self.action.A, self.values)

    def satisfies_law(self) -> bool:
        """Crossed-homomorphism law on every pair ``(t^j, t^k)``."""
        act, n = self.action, self.action.n
        vals = np.asarray(self.values)
        psi_pows = np.empty((n, act.A.order), dtype=np.int64)
        psi_pows[0] = np.arange(act.A.order)
        for j in range(1, n):
            psi_pows[j] = act.psi.image[psi_pows[j - 1]]
        j = np.arange(n)[:, None]
        k = np.arange(n)[None, :]
        lhs = vals[(j + k) % n]
        rhs = act.A.mul[vals[j], psi_pows[j, vals[k]]]
        return bool(np.array_equal(lhs, rhs))


def is_extendable(action: CyclicAction, a: int) -> bool:
    """Whether ``d(t) = a`` extends: ``(id + psi + ... + psi^{n-1}) a = 0``."""
    return int(action.operator_sum(a, action.n)) == action.A.identity


def derivation_from_value(action: CyclicAction, a: int) -> Derivation:
    if not is_extendable(action, a):
        raise NotExtendableError(f"d(t) = {action.A.label(a)} does not extend to a derivation")
    values = [action.A.identity]
    cur = action.A.identity
    power = int(a)
    for _ in range(1, action.n):
        cur = int(action.A.mul[cur, power])
        power = int(action.psi.image[power])
        values.append(cur)
    return Derivation(action, int(a), tuple(values), int(a) in action.principal_values)


def enumerate_derivations(action: CyclicAction) -> list[Derivation]:
    if action.A.order > MAX_DERIVATION_BASE:
        raise TooLargeError(f"|A| = {action.A.order} exceeds the derivation budget")
    sums = action.operator_sum(np.arange(action.A.order), action.n)
    good = np.flatnonzero(sums == action.A.identity)
    return [derivation_from_value(action, int(a)) for a in good]


# extensions -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Extension:
    """``G`` with an abelian normal subgroup ``A`` and cyclic ``G/A = <tA>``."""

    group: Group
    normal: ElementSet
    t: int
    action: CyclicAction
    embed: np.ndarray  # index in A -> index in G
    coset_power: np.ndarray  # g -> k with g in t^k A

    def lift(self, a):
        return self.embed[a]

    @property
    def quotient_order(self) -> int:
        return self.action.n


def extension_action(G: Group, A: ElementSet, t: int) -> Extension:
    """Wire the conjugation action of ``t`` on ``A`` and verify ``G/A`` is cyclic on ``tA``."""
    if not is_subgroup(G, A) or not is_normal(G, A):
        raise NotNormalError("A must be a normal subgroup")
    if not is_abelian_subset(G, A):
        raise HypothesisError("A must be abelian")
    n = G.order // len(A)
    coset_power = np.full(G.order, -1, dtype=np.int64)
    rep = G.identity
    for k in range(n):
        coset = G.mul[rep, A.members]
        if (coset_power[coset] >= 0).any():
            raise HypothesisError(f"G/A is not cyclic on the coset of {G.label(t)}")
        coset_power[coset] = k
        rep = int(G.mul[rep, t])
    if (coset_power < 0).any():
        raise HypothesisError(f"the coset of {G.label(t)} does not generate G/A")
    sub, embed = subgroup_as_group(G, A, name="A")
    lookup = np.full(G.order, -1, dtype=np.int64)
    lookup[embed] = np.arange(len(embed))
    conj = G.mul[G.mul[t, embed], G.inv[t]]  # t a t^-1
    psi = Automorphism(sub, lookup[conj], name="psi")
    return Extension(G, A, int(t), CyclicAction(sub, n, psi), embed, coset_power)


def gaschutz_automorphism(ext: Extension, d: Derivation) -> Automorphism:
    """``g -> d(gA) g``, verified bijective and multiplicative before it is returned."""
    if d.action is not ext.action:
        raise ValueError("the derivation must be defined on this extension's action")
    G = ext.group
    ar = np.arange(G.order)
    shift = ext.embed[np.asarray(d.values)[ext.coset_power]]
    try:
        return Automorphism(G, G.mul[shift, ar], name=f"phi_d(t->{d.action.A.label(d.generator_value)})")
    except VerificationError as exc:
        raise VerificationError(f"derivation does not induce an automorphism: {exc}") from exc


def derivation_automorphisms(ext: Extension) -> list[Automorphism]:
    return [gaschutz_automorphism(ext, d) for d in enumerate_derivations(ext.action)]


# p-group filtration ---------------------------------------------------------


def prime_of(order: int) -> int:
    factors = sympy.factorint(order)
    if len(factors) != 1:
        raise HypothesisError(f"order {order} is not a prime power")
    return int(next(iter(factors)))


def omega(A: Group, k: int) -> ElementSet:
    """``{a : a^(p^k) = e}`` in an abelian ``p``-group."""
    if A.order == 1:
        return A.trivial()
    p = prime_of(A.order)
    return ElementSet(A, np.flatnonzero((p**k) % A.orders == 0))


@dataclass(frozen=True, eq=False)
class ThetaResult:
    theta: Homomorphism
    p: int
    exponent: int  # acting group is Z_{p^exponent}
    image_in_omega: bool
    filtration: dict[int, bool]
    witness: dict | None

    @property
    def ok(self) -> bool:
        return self.image_in_omega and all(self.filtration.values())


def theta_map(action: CyclicAction, p: int | None = None) -> ThetaResult:
    """``theta(a) = psi(a) - a`` together with its filtration verdicts.

    Checks ``theta(A) <= Omega_m(A)`` and ``theta(Omega_k) <= Omega_{k-1}`` for
    ``k <= m`` where the acting group is ``Z_{p^m}``.
    """
    A = action.A
    if p is None:
        if A.order == 1 and action.n == 1:
            raise HypothesisError("pass the prime explicitly for a trivial action on a trivial group")
        p = prime_of(A.order if A.order > 1 else action.n)
    elif A.order > 1 and prime_of(A.order) != p:
        raise HypothesisError(f"A is not a {p}-group")
    if p == 2:
        raise HypothesisError("the theta filtration needs an odd prime")
    if action.n > 1 and prime_of(action.n) != p:
        raise HypothesisError("acting group must be a cyclic p-group for the same prime")
    m = 0
    while p**m < action.n:
        m += 1
    ar = np.arange(A.order)
    theta = Homomorphism(A, A, A.mul[action.psi.image, A.inv[ar]], verify=True)
    image = theta.image_set()
    image_ok = image <= omega(A, m)
    filtration = {}
    witness = None
    if not image_ok:
        bad = next(x for x in image if x not in omega(A, m))
        witness = {"theta_value_outside_omega": A.label(bad)}
    for k in range(1, m + 1):
        inside = ElementSet(A, theta.image[omega(A, k).members]) <= omega(A, k - 1)
        filtration[k] = bool(inside)
        if not inside and witness is None:
            lower = omega(A, k - 1)
            bad = next(a for a in omega(A, k) if int(theta.image[a]) not in lower)
            witness = {"k": k, "a": A.label(bad), "theta(a)": A.label(theta.image[bad])}
    return ThetaResult(theta, p, m, bool(image_ok), filtration, witness)


# derivation suite and class bound -----------------------------------------


def condition_family(ext: Extension, cap: int = AUTOMORPHISM_CAP) -> tuple[str, bool, dict]:
    """Run the subgroup condition over Aut(G) if enumerable, else inner plus derivation automorphisms."""
    G = ext.group
    try:
        verdict = check_condition(G, ALL, cap=cap)
        family = ALL
    except TooLargeError:
        inner = check_condition(G, INNER)
        if not inner.holds:
            return "inner+derivation", False, inner.to_report("condition").witnesses
        verdict = check_condition(G, FAMILY, automorphisms=derivation_automorphisms(ext))
        family = "inner+derivation"
    return family, verdict.holds, verdict.to_report("condition").witnesses


def derivation_family_holds(ext: Extension) -> bool:
    G = ext.group
    if not check_condition(G, INNER).holds:
        return False
    return check_condition(G, FAMILY, automorphisms=derivation_automorphisms(ext)).holds


def oracle_derivations(action: CyclicAction) -> dict[int, tuple[int, ...]]:
    """Independent route: ``d(t) = a`` extends iff ``(a, 1)^n`` is trivial in ``A ⋊ Z_n``.

    The values ``d(t^k)`` are the first coordinates of ``(a, 1)^k``.
    """
    A, n = action.A, action.n
    S = semidirect_product(A, n, action.psi)
    level = (1 % n) * A.order  # index of (e, 1)
    out = {}
    for a in range(A.order):
        s = level + a
        vals = []
        cur = S.identity
        for _ in range(n):
            vals.append(cur % A.order)
            cur = int(S.mul[cur, s])
        if cur == S.identity:
            out[a] = tuple(vals)
    return out


def verify_derivations(ext: Extension) -> CheckReport:
    """Derivation enumeration against the semidirect oracle, plus the Omega_1 and image consequences."""
    action = ext.action
    A = action.A
    ders = enumerate_derivations(action)
    found = {d.generator_value: d.values for d in ders}
    oracle = oracle_derivations(action)
    laws = all(d.satisfies_law() for d in ders)
    principal_ok = all(is_extendable(action, b) for b in action.principal_values)
    details = {
        "A_order": A.order,
        "n": action.n,
        "derivations": len(ders),
        "principal": sum(d.principal for d in ders),
        "oracle_match": found == oracle,
        "law_holds": laws,
        "principal_extendable": principal_ok,
    }
    ok = found == oracle and laws and principal_ok

    G = ext.group
    auts = [gaschutz_automorphism(ext, d) for d in ders]
    # [e]_phi_d = {d(g)^-1}, which is d(Z_n) itself once it is a subgroup
    image_matches = True
    for d, phi in zip(ders, auts):
        cls = e_class(G, phi)
        image = ext.embed[list(d.values)]
        if cls.members != ElementSet(G, G.inv[image]):
            image_matches = False
        if cls.is_subgroup and cls.members != ElementSet(G, image):
            image_matches = False
    details["gaschutz_image_matches"] = image_matches
    ok &= image_matches

    family_holds = check_condition(G, INNER).holds and check_condition(G, FAMILY, automorphisms=auts).holds
    details["derivation_family_condition"] = family_holds
    notes = []
    if family_holds and action.n > 1 and A.order > 1:
        try:
            p = prime_of(A.order)
            if prime_of(action.n) == p and p > 2:
                om1 = omega(A, 1)
                extendable = all(is_extendable(action, a) for a in om1)
                details["omega1_extendable"] = extendable
                ok &= extendable
        except HypothesisError as exc:
            notes.append(f"Omega_1 consequence not applicable: {exc}")
    return CheckReport("derivations", PASS if ok else FAIL, details=details, notes=notes)


def _sylow_components(G: Group) -> dict[int, ElementSet]:
    out = {}
    for p in sorted(sympy.factorint(G.order)):
        q = p ** sympy.factorint(G.order)[p]
        out[int(p)] = ElementSet(G, np.flatnonzero(q % G.orders == 0))
    return out


def _iterated_image(G: Group, ext: Extension, r: int) -> ElementSet:
    """``theta^r(A)`` inside ``G``, with ``theta(a) = t a t^-1 a^-1``."""
    cur = ext.normal.members
    for _ in range(r):
        cur = np.unique(G.mul[G.mul[G.mul[ext.t, cur], G.inv[ext.t]], G.inv[cur]])
    return ElementSet(G, cur)


def verify_corex(G: Group, ext: Extension, cap: int = AUTOMORPHISM_CAP) -> CheckReport:
    """Nilpotency class at most ``max n_i + 1`` for odd abelian-by-cyclic groups meeting the condition."""
    name = "corex"
    if G.order % 2 == 0:
        return CheckReport(name, NOT_APPLICABLE, details={"reason": "group order is even"})
    family, holds, witness = condition_family(ext, cap)
    details: dict = {"family": family, "quotient_order": ext.quotient_order}
    if not holds:
        details["reason"] = "the subgroup condition fails"
        return CheckReport(name, NOT_APPLICABLE, details=details, witnesses=witness)
    series = lower_central_series(G)
    if series.nilpotency_class is None:
        return CheckReport(name, FAIL, details=details, notes=["condition holds but G is not nilpotent"])
    exps = sympy.factorint(ext.quotient_order)
    bound = (max(exps.values()) if exps else 0) + 1
    details.update({"nilpotency_class": series.nilpotency_class, "bound": bound})
    ok = series.nilpotency_class <= bound
    A_sub = ext.action.A
    if A_sub.order > 1 and sympy.isprime(int(A_sub.orders.max())):
        # elementary abelian A forces G abelian
        details["elementary_abelian"] = True
        ok &= series.nilpotency_class <= 1
    components = []
    for p, Gp_set in _sylow_components(G).items():
        Gp, embed = subgroup_as_group(G, Gp_set, name=f"G_{p}")
        lookup = np.full(G.order, -1, dtype=np.int64)
        lookup[embed] = np.arange(len(embed))
        Ap = ElementSet(Gp, lookup[np.intersect1d(ext.normal.members, Gp_set.members)])
        qord = Gp.order // len(Ap)
        tp = next(
            int(lookup[g])
            for g in Gp_set
            if _coset_order(ext, g) == qord
        )
        sub_ext = extension_action(Gp, Ap, tp)
        theta = theta_map(sub_ext.action, p)
        sub_series = lower_central_series(Gp)
        contained = []
        for r in range(2, sub_series.stabilizes_at + 1):
            contained.append(sub_series.gamma(r) <= _iterated_image(Gp, sub_ext, r - 1))
        comp_ok = theta.ok and all(contained)
        ok &= comp_ok
        components.append(
            {
                "p": p,
                "order": Gp.order,
                "A_order": len(Ap),
                "t": render_element(G, embed[tp]),
                "theta_ok": theta.ok,
                "gamma_in_theta_images": [bool(c) for c in contained],
                "class": sub_series.nilpotency_class,
            }
        )
    details["components"] = components
    return CheckReport(name, PASS if ok else FAIL, details=details)


def _coset_order(ext: Extension, g: int) -> int:
    from math import gcd

    n = ext.quotient_order
    k = int(ext.coset_power[g])
    return n // gcd(n, k)
