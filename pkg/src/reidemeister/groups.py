"""Finite groups stored as dense Cayley tables.

Elements are the integers ``0..n-1``; human-readable labels are kept only for
reporting. Conjugation and commutators follow the right-action convention
``x^y = y^-1 x y`` and ``[x, y] = x^-1 y^-1 x y``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IllDefinedActionError,
    InvalidOrderError,
    NotNormalError,
    NotSubgroupError,
    TooLargeError,
    VerificationError,
)
from .report import CheckReport, render_element, verdict_of

# Largest order for which a full Cayley table is materialised.
MAX_TABLE_ORDER = 4096
# Largest order for which Aut(G) is enumerated exhaustively.
AUTOMORPHISM_CAP = 512
MAX_AUTOMORPHISMS = 250_000
EXHAUSTIVE_AXIOM_LIMIT = 512
AXIOM_SAMPLES = 10_000


def _check_table_order(n: int, max_order: int | None) -> None:
    limit = MAX_TABLE_ORDER if max_order is None else max_order
    if n > limit:
        raise TooLargeError(f"group order {n} exceeds the Cayley table cap {limit}")


class Group:
    """A finite group given by its multiplication table.

    ``mul[x, y]`` is the index of the product ``x*y``. The table is treated as
    immutable once the group is built.
    """

    def __init__(
        self,
        mul,
        identity: int | None = None,
        generators: Sequence[int] | None = None,
        labels: Sequence[str] | None = None,
        name: str = "G",
    ) -> None:
        table = np.ascontiguousarray(mul, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise InvalidOrderError("multiplication table must be a non-empty square array")
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise VerificationError("table entries out of range")
        ar = np.arange(n, dtype=np.int32)
        if identity is None:
            rows = np.flatnonzero((table == ar[None, :]).all(axis=1))
            if len(rows) != 1:
                raise VerificationError("table has no two-sided identity")
            identity = int(rows[0])
        if not (np.array_equal(table[identity], ar) and np.array_equal(table[:, identity], ar)):
            raise VerificationError(f"{identity} is not a two-sided identity")
        hits = table == identity
        inv = np.argmax(hits, axis=1).astype(np.int32)
        if not (hits.sum(axis=1) == 1).all() or not np.array_equal(table[inv, ar], np.full(n, identity)):
            raise VerificationError("some element has no inverse")
        table.setflags(write=False)
        inv.setflags(write=False)
        self.mul = table
        self.inv = inv
        self.identity = int(identity)
        self.order = n
        self.name = name
        # memo for derived analyses (twisted-class membership, series terms)
        self.cache: dict = {}
        self._labels = tuple(labels) if labels is not None else None
        if self._labels is not None and len(self._labels) != n:
            raise ValueError("labels must match the group order")
        if generators is None:
            generators = _greedy_generators(self)
        self.generators = tuple(int(g) for g in generators)
        if len(_closure(self, np.asarray(self.generators, dtype=np.int32))) != n:
            raise VerificationError("declared generators do not generate the group")

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"Group({self.name!r}, order={self.order})"

    @property
    def elements(self) -> range:
        return range(self.order)

    def label(self, x: int) -> str:
        if self._labels is None:
            return str(int(x))
        return self._labels[int(x)]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.label(x) for x in self.elements)

    def index_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"no element labelled {label!r} in {self.name}") from None

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    # arithmetic -----------------------------------------------------------

    def prod(self, *xs: int) -> int:
        acc = self.identity
        for x in xs:
            acc = int(self.mul[acc, x])
        return acc

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = int(self.inv[x]), -k
        acc, base = self.identity, int(x)
        while k:
            if k & 1:
                acc = int(self.mul[acc, base])
            base = int(self.mul[base, base])
            k >>= 1
        return acc

    def conj(self, x, g):
        """``x^g = g^-1 x g``; vectorises over array arguments."""
        return self.mul[self.mul[self.inv[g], x], g]

    def comm(self, x, y):
        """``[x, y] = x^-1 y^-1 x y``; vectorises over array arguments."""
        return self.mul[self.mul[self.inv[x], self.inv[y]], self.mul[x, y]]

    @cached_property
    def commutator_table(self) -> np.ndarray:
        """``T[x, g] = [x, g]``; column ``g`` lists the class ``[e]_g``."""
        ar = np.arange(self.order, dtype=np.int32)
        t = self.comm(ar[:, None], ar[None, :]).astype(np.int32)
        t.setflags(write=False)
        return t

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def orders(self) -> np.ndarray:
        n = self.order
        ar = np.arange(n, dtype=np.int32)
        out = np.zeros(n, dtype=np.int64)
        cur = ar.copy()
        k = 1
        while (out == 0).any():
            out[(cur == self.identity) & (out == 0)] = k
            cur = self.mul[cur, ar]
            k += 1
        out.setflags(write=False)
        return out

    @cached_property
    def conjugacy_classes(self) -> tuple["ElementSet", ...]:
        return tuple(conjugacy_classes(self))

    @cached_property
    def class_sizes(self) -> np.ndarray:
        sizes = np.zeros(self.order, dtype=np.int64)
        for cls in self.conjugacy_classes:
            sizes[cls.members] = len(cls)
        sizes.setflags(write=False)
        return sizes

    def set(self, members: Iterable[int]) -> "ElementSet":
        return ElementSet(self, members)

    def whole(self) -> "ElementSet":
        return ElementSet(self, np.arange(self.order))

    def trivial(self) -> "ElementSet":
        return ElementSet(self, [self.identity])


class ElementSet:
    """Canonical sorted subset of a group's element indices."""

    __slots__ = ("group", "members", "_key")

    def __init__(self, group: Group, members) -> None:
        arr = np.asarray(list(members) if not isinstance(members, np.ndarray) else members)
        arr = arr.astype(np.int64, copy=False).ravel()
        if arr.size and (arr.min() < 0 or arr.max() >= group.order):
            raise ValueError("element index out of range")
        mask = np.zeros(group.order, dtype=bool)
        mask[arr] = True
        self.group = group
        self.members = np.flatnonzero(mask).astype(np.int32)
        self.members.setflags(write=False)
        self._key = self.members.tobytes()

    @classmethod
    def from_mask(cls, group: Group, mask: np.ndarray) -> "ElementSet":
        return cls(group, np.flatnonzero(mask))

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.members] = True
        return m

    def __len__(self) -> int:
        return int(self.members.size)

    def __iter__(self):
        return (int(x) for x in self.members)

    def __contains__(self, x) -> bool:
        i = np.searchsorted(self.members, x)
        return bool(i < self.members.size and self.members[i] == x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.group is other.group and self._key == other._key

    def __hash__(self) -> int:
        return hash((id(self.group), self._key))

    def __le__(self, other: "ElementSet") -> bool:
        return bool(other.mask[self.members].all())

    def __lt__(self, other: "ElementSet") -> bool:
        return self <= other and len(self) < len(other)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, np.intersect1d(self.members, other.members))

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, np.union1d(self.members, other.members))

    def tolist(self) -> list[int]:
        return [int(x) for x in self.members]

    def labels(self) -> list[str]:
        return [self.group.label(x) for x in self.members]

    def is_trivial(self) -> bool:
        return len(self) == 1 and int(self.members[0]) == self.group.identity

    def __repr__(self) -> str:
        shown = ", ".join(self.labels()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"ElementSet({{{shown}{more}}}, size={len(self)})"


def _preserves_products(source: "Group", target: "Group", img: np.ndarray) -> bool:
    """``f(g s) = f(g) f(s)`` for all ``g`` and generators ``s``, with ``f(e) = e``.

    Every element is a positive word in the generators, so this column check
    is equivalent to the full table comparison.
    """
    if img[source.identity] != target.identity:
        return False
    gens = np.asarray(source.generators, dtype=np.int64)
    if gens.size == 0:
        return True
    return bool(np.array_equal(img[source.mul[:, gens]], target.mul[img[:, None], img[gens][None, :]]))


class Homomorphism:
    def __init__(self, source: Group, target: Group, image, verify: bool = True) -> None:
        img = np.asarray(image, dtype=np.int32)
        if img.shape != (source.order,):
            raise ValueError("image must list one target element per source element")
        img.setflags(write=False)
        self.source, self.target, self.image = source, target, img
        if verify and not self.is_homomorphism():
            raise VerificationError("map does not preserve multiplication")

    def is_homomorphism(self) -> bool:
        return _preserves_products(self.source, self.target, self.image)

    def __call__(self, x):
        return self.image[x]

    def kernel(self) -> ElementSet:
        return ElementSet(self.source, np.flatnonzero(self.image == self.target.identity))

    def image_set(self) -> ElementSet:
        return ElementSet(self.target, self.image)


class Automorphism:
    """A multiplication-preserving permutation of a group's elements."""

    def __init__(
        self,
        group: Group,
        image,
        inner_witness: int | None = None,
        name: str | None = None,
        verify: bool = True,
    ) -> None:
        img = np.asarray(image, dtype=np.int32)
        if img.shape != (group.order,):
            raise ValueError("image must be a permutation of the group elements")
        img.setflags(write=False)
        self.group = group
        self.image = img
        self.inner_witness = None if inner_witness is None else int(inner_witness)
        self.name = name
        if verify:
            self.verify()

    def verify(self) -> None:
        g, img = self.group, self.image
        if len(np.unique(img)) != g.order:
            raise VerificationError("automorphism image is not a bijection")
        if not _preserves_products(g, g, img):
            raise VerificationError("map does not preserve multiplication")
        if self.inner_witness is not None:
            ar = np.arange(g.order)
            if not np.array_equal(img, g.conj(ar, self.inner_witness)):
                raise VerificationError("inner witness does not induce this map")

    def __call__(self, x):
        return self.image[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.group is other.group and np.array_equal(self.image, other.image)

    def __hash__(self) -> int:
        return hash(self.image.tobytes())

    def __repr__(self) -> str:
        tag = self.name or ("inner" if self.inner_witness is not None else "aut")
        gens = ", ".join(
            f"{self.group.label(x)}->{self.group.label(self.image[x])}" for x in self.group.generators
        )
        return f"Automorphism({tag}: {gens})"

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``(self ∘ other)(x) = self(other(x))``."""
        return Automorphism(self.group, self.image[other.image], verify=False)

    def inverse(self) -> "Automorphism":
        inv = np.empty_like(self.image)
        inv[self.image] = np.arange(self.group.order, dtype=np.int32)
        witness = None if self.inner_witness is None else int(self.group.inv[self.inner_witness])
        return Automorphism(self.group, inv, inner_witness=witness, verify=False)

    def power(self, k: int) -> "Automorphism":
        g = self.group
        result = np.arange(g.order, dtype=np.int32)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = base.image[result]
        return Automorphism(g, result, verify=False)

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.image, np.arange(self.group.order)))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "inner_witness": None
            if self.inner_witness is None
            else render_element(self.group, self.inner_witness),
            "generator_images": [
                {"generator": self.group.label(x), "image": self.group.label(self.image[x])}
                for x in self.group.generators
            ],
        }


def identity_automorphism(G: Group) -> Automorphism:
    return Automorphism(G, np.arange(G.order), inner_witness=G.identity, name="id", verify=False)


# constructors ---------------------------------------------------------------


def build_cyclic(m: int) -> Group:
    if m < 1:
        raise InvalidOrderError(f"cyclic group order must be positive, got {m}")
    _check_table_order(m, None)
    ar = np.arange(m)
    mul = (ar[:, None] + ar[None, :]) % m
    return Group(mul, identity=0, generators=[1] if m > 1 else [], labels=[str(i) for i in ar], name=f"Z{m}")


def build_abelian(orders: Sequence[int]) -> Group:
    """Direct sum ``Z_{m_1} + ... + Z_{m_r}`` with mixed-radix element indices."""
    orders = [int(m) for m in orders]
    if any(m < 1 for m in orders):
        raise InvalidOrderError(f"component orders must be positive: {orders}")
    if not orders:
        return Group(np.zeros((1, 1)), identity=0, generators=[], labels=["0"], name="trivial")
    n = int(np.prod(orders))
    _check_table_order(n, None)
    coords = np.array(list(itertools.product(*[range(m) for m in orders])), dtype=np.int64).reshape(n, len(orders))
    radix = np.array([int(np.prod(orders[i + 1 :])) for i in range(len(orders))], dtype=np.int64)
    mods = np.array(orders, dtype=np.int64)
    summed = (coords[:, None, :] + coords[None, :, :]) % mods
    mul = summed @ radix
    gens = [int(radix[i]) for i, m in enumerate(orders) if m > 1]
    if len(orders) == 1:
        labels = [str(int(c[0])) for c in coords]
    else:
        labels = ["(" + ",".join(str(int(v)) for v in c) + ")" for c in coords]
    name = "Z" + "xZ".join(str(m) for m in orders)
    return Group(mul, identity=0, generators=gens, labels=labels, name=name)


def direct_product(G: Group, H: Group) -> Group:
    n = G.order * H.order
    _check_table_order(n, None)
    gi = np.repeat(np.arange(G.order), H.order)
    hi = np.tile(np.arange(H.order), G.order)
    mul = G.mul[gi[:, None], gi[None, :]] * H.order + H.mul[hi[:, None], hi[None, :]]
    e = G.identity * H.order + H.identity
    gens = [g * H.order + H.identity for g in G.generators] + [G.identity * H.order + h for h in H.generators]
    labels = [f"({G.label(a)},{H.label(b)})" for a, b in zip(gi, hi)]
    return Group(mul, identity=e, generators=gens, labels=labels, name=f"{G.name}x{H.name}")


def semidirect_product(A: Group, n: int, psi: Automorphism) -> Group:
    """``A ⋊ Z_n`` with ``(a, k)(b, l) = (a * psi^k(b), k + l mod n)``.

    The element ``(a, k)`` has index ``k*|A| + a``; generators are the
    generators of ``A`` at level 0 followed by ``y = (e, 1)``.
    """
    if n < 1:
        raise InvalidOrderError(f"acting cyclic order must be positive, got {n}")
    if psi.group is not A:
        raise IllDefinedActionError("psi must be an automorphism of A")
    if not psi.power(n).is_identity:
        raise IllDefinedActionError(f"psi^{n} is not the identity automorphism")
    m = A.order
    N = m * n
    _check_table_order(N, None)
    powers = np.empty((n, m), dtype=np.int64)
    powers[0] = np.arange(m)
    for k in range(1, n):
        powers[k] = psi.image[powers[k - 1]]
    a = np.tile(np.arange(m), n)
    k = np.repeat(np.arange(n), m)
    first = A.mul[a[:, None], powers[k[:, None], a[None, :]]]
    second = (k[:, None] + k[None, :]) % n
    mul = second * m + first
    gens = list(A.generators) + ([m + A.identity] if n > 1 else [])
    labels = [f"({A.label(ai)},{ki})" for ai, ki in zip(a, k)]
    return Group(mul, identity=A.identity, generators=gens, labels=labels, name=f"{A.name}:Z{n}")


def permutation_group(perms: Sequence[Sequence[int]], generators: Sequence[Sequence[int]], name: str) -> Group:
    """Group on an explicit list of permutations; the product applies the left factor first."""
    P = np.asarray(perms, dtype=np.int64)
    N, d = P.shape
    _check_table_order(N, None)
    radix = d ** np.arange(d - 1, -1, -1, dtype=np.int64)
    codes = P @ radix
    order = np.argsort(codes)
    composed = P[np.arange(N)[None, :, None], P[:, None, :]]  # [i, j, k] = P[j][P[i][k]]
    comp_codes = composed @ radix
    mul = order[np.searchsorted(codes[order], comp_codes)]
    if not np.array_equal(codes[mul], comp_codes):
        raise VerificationError("permutation list is not closed under composition")
    ident = int(order[np.searchsorted(codes[order], np.arange(d) @ radix)])
    gens = [int(order[np.searchsorted(codes[order], np.asarray(g) @ radix)]) for g in generators]
    labels = ["[" + " ".join(str(v) for v in p) + "]" for p in P]
    return Group(mul, identity=ident, generators=gens, labels=labels, name=name)


# subgroups ------------------------------------------------------------------


def _closure(G: Group, seed: np.ndarray) -> np.ndarray:
    """Sorted indices of the subgroup generated by ``seed``."""
    seed = np.asarray(seed, dtype=np.int64).ravel()
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    gens_mask = np.zeros(G.order, dtype=bool)
    gens_mask[seed] = True
    gens_mask[G.identity] = False
    gens = np.flatnonzero(gens_mask)
    if gens.size == 0:
        return np.array([G.identity], dtype=np.int32)
    mask[gens] = True
    frontier = gens
    while frontier.size:
        prods = G.mul[frontier[:, None], gens[None, :]].ravel()
        fresh = np.zeros(G.order, dtype=bool)
        fresh[prods] = True
        fresh &= ~mask
        mask |= fresh
        frontier = np.flatnonzero(fresh)
    return np.flatnonzero(mask).astype(np.int32)


def _greedy_generators(G: Group) -> list[int]:
    gens: list[int] = []
    span = np.zeros(G.order, dtype=bool)
    span[G.identity] = True
    for x in np.argsort(-np.asarray(_element_orders_raw(G)), kind="stable"):
        if not span[x]:
            gens.append(int(x))
            span[_closure(G, np.asarray(gens))] = True
            if span.all():
                break
    return gens


def _element_orders_raw(G: Group) -> np.ndarray:
    n = G.order
    ar = np.arange(n)
    out = np.zeros(n, dtype=np.int64)
    cur = ar.copy()
    k = 1
    while (out == 0).any():
        out[(cur == G.identity) & (out == 0)] = k
        cur = G.mul[cur, ar]
        k += 1
    return out


def subgroup_generated(G: Group, gens: Iterable[int] | ElementSet) -> ElementSet:
    seed = gens.members if isinstance(gens, ElementSet) else np.fromiter((int(g) for g in gens), dtype=np.int64)
    return ElementSet(G, _closure(G, seed))


def is_subgroup(G: Group, S: ElementSet | Iterable[int]) -> bool:
    S = S if isinstance(S, ElementSet) else ElementSet(G, S)
    m = S.mask
    if not m[G.identity]:
        return False
    s = S.members
    if not m[G.inv[s]].all():
        return False
    return bool(m[G.mul[s[:, None], s[None, :]]].all())


def is_normal(G: Group, S: ElementSet) -> bool:
    if not is_subgroup(G, S):
        raise NotSubgroupError("normality is only defined for subgroups")
    m = S.mask
    for g in G.generators:
        if not m[G.conj(S.members, g)].all():
            return False
    return True


def normal_closure(G: Group, gens: Iterable[int] | ElementSet) -> ElementSet:
    seed = gens.members if isinstance(gens, ElementSet) else np.fromiter((int(g) for g in gens), dtype=np.int64)
    ar = np.arange(G.order)
    conjugates = G.conj(seed[:, None], ar[None, :]).ravel() if seed.size else seed
    return ElementSet(G, _closure(G, conjugates))


def set_product(G: Group, S: ElementSet, T: ElementSet) -> ElementSet:
    return ElementSet(G, G.mul[S.members[:, None], T.members[None, :]].ravel())


def center(G: Group) -> ElementSet:
    return ElementSet(G, np.flatnonzero((G.mul == G.mul.T).all(axis=1)))


def commutator(G: Group, x: int, y: int) -> int:
    return int(G.comm(x, y))


def commutator_subgroup(G: Group, H: ElementSet, K: ElementSet) -> ElementSet:
    """``[H, K]``: subgroup generated by all ``[h, k]``."""
    vals = G.comm(H.members[:, None], K.members[None, :]).ravel()
    return ElementSet(G, _closure(G, np.unique(vals)))


def derived_subgroup(G: Group) -> ElementSet:
    return ElementSet(G, _closure(G, np.unique(G.commutator_table)))


def lower_central_terms(G: Group) -> list[ElementSet]:
    """``[gamma_1, gamma_2, ...]`` up to the first repeat (the repeat itself is not listed)."""
    if "lcs" not in G.cache:
        whole = G.whole()
        terms = [whole]
        while True:
            nxt = commutator_subgroup(G, terms[-1], whole)
            if nxt == terms[-1]:
                break
            terms.append(nxt)
        G.cache["lcs"] = terms
    return list(G.cache["lcs"])


def is_abelian_subset(G: Group, S: ElementSet) -> bool:
    s = S.members
    block = G.mul[s[:, None], s[None, :]]
    return bool(np.array_equal(block, block.T))


def is_metabelian(G: Group) -> bool:
    return is_abelian_subset(G, derived_subgroup(G))


def conjugacy_classes(G: Group) -> list[ElementSet]:
    seen = np.zeros(G.order, dtype=bool)
    ar = np.arange(G.order)
    out = []
    for x in range(G.order):
        if seen[x]:
            continue
        orbit = G.conj(x, ar)
        seen[orbit] = True
        out.append(ElementSet(G, orbit))
    return out


def subgroup_as_group(G: Group, S: ElementSet, name: str | None = None) -> tuple[Group, np.ndarray]:
    """Re-index a subgroup as a group of its own; returns it with the embedding into ``G``."""
    if not is_subgroup(G, S):
        raise NotSubgroupError("cannot re-index a non-subgroup")
    members = S.members
    lookup = np.full(G.order, -1, dtype=np.int64)
    lookup[members] = np.arange(len(members))
    mul = lookup[G.mul[members[:, None], members[None, :]]]
    gens = sorted({int(lookup[g]) for g in _greedy_generators_in(G, members)})
    H = Group(
        mul,
        identity=int(lookup[G.identity]),
        generators=gens,
        labels=[G.label(x) for x in members],
        name=name or f"sub({G.name})",
    )
    return H, members.astype(np.int64)


def _greedy_generators_in(G: Group, members: np.ndarray) -> list[int]:
    gens: list[int] = []
    span = np.zeros(G.order, dtype=bool)
    span[G.identity] = True
    target = len(members)
    by_order = members[np.argsort(-G.orders[members], kind="stable")]
    for x in by_order:
        if not span[x]:
            gens.append(int(x))
            closed = _closure(G, np.asarray(gens))
            span[closed] = True
            if len(closed) == target:
                break
    return gens


def quotient(G: Group, N: ElementSet) -> tuple[Group, Homomorphism]:
    if not is_subgroup(G, N) or not is_normal(G, N):
        raise NotNormalError("quotient requires a normal subgroup")
    coset = np.full(G.order, -1, dtype=np.int64)
    reps: list[int] = []
    for g in range(G.order):
        if coset[g] < 0:
            coset[G.mul[g, N.members]] = len(reps)
            reps.append(g)
    r = np.asarray(reps)
    mul = coset[G.mul[r[:, None], r[None, :]]]
    gens = []
    for g in G.generators:
        c = int(coset[g])
        if c != coset[G.identity] and c not in gens:
            gens.append(c)
    labels = [f"{G.label(x)}N" for x in r]
    Q = Group(mul, identity=int(coset[G.identity]), generators=gens, labels=labels, name=f"{G.name}/N")
    return Q, Homomorphism(G, Q, coset, verify=G.order <= MAX_TABLE_ORDER)


# automorphisms --------------------------------------------------------------


def inner_automorphism(G: Group, g: int) -> Automorphism:
    ar = np.arange(G.order)
    return Automorphism(G, G.conj(ar, g), inner_witness=int(g), name=f"inn({G.label(g)})", verify=False)


def _word_tree(G: Group, gens: Sequence[int]) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """BFS layers of ``<gens>``: each node equals ``parent * gens[gen_index]``."""
    seen = np.zeros(G.order, dtype=bool)
    seen[G.identity] = True
    frontier = np.array([G.identity])
    layers = []
    gens_arr = np.asarray(gens, dtype=np.int64)
    while frontier.size:
        prods = G.mul[frontier[:, None], gens_arr[None, :]]
        parents = np.repeat(frontier, len(gens_arr))
        which = np.tile(np.arange(len(gens_arr)), len(frontier))
        flat = prods.ravel()
        _, first = np.unique(flat, return_index=True)
        keep = first[~seen[flat[first]]]
        keep.sort()
        nodes = flat[keep]
        seen[nodes] = True
        if nodes.size:
            layers.append((nodes, parents[keep], which[keep]))
        frontier = nodes
    return layers


def _extend_images(G: Group, tree, members: np.ndarray, gens: Sequence[int], images: Sequence[int]) -> np.ndarray | None:
    img = np.full(G.order, -1, dtype=np.int64)
    img[G.identity] = G.identity
    imgs = np.asarray(images, dtype=np.int64)
    for nodes, parents, which in tree:
        img[nodes] = G.mul[img[parents], imgs[which]]
    sub = img[members]
    if len(np.unique(sub)) != len(members):
        return None
    for g, h in zip(gens, imgs):
        if not np.array_equal(img[G.mul[members, g]], G.mul[sub, h]):
            return None
    return img


def automorphism_from_images(G: Group, images: Sequence[int], name: str | None = None) -> Automorphism:
    """Extend images of ``G.generators`` to an automorphism, verifying it fully."""
    gens = G.generators
    if len(images) != len(gens):
        raise ValueError("one image per generator is required")
    tree = _word_tree(G, gens)
    img = _extend_images(G, tree, np.arange(G.order), gens, images)
    if img is None:
        raise VerificationError("generator images do not extend to an automorphism")
    return Automorphism(G, img, name=name)


def enumerate_automorphisms(
    G: Group,
    cap: int = AUTOMORPHISM_CAP,
    max_count: int = MAX_AUTOMORPHISMS,
) -> list[Automorphism]:
    """All automorphisms of ``G`` by backtracking over generator images.

    Candidates for each generator image share its element order and conjugacy
    class size. A partial assignment is kept only if it extends to an injective
    homomorphism on the subgroup generated by the generators assigned so far.
    """
    if G.order > cap:
        raise TooLargeError(f"|G| = {G.order} exceeds the automorphism enumeration cap {cap}")
    gens = list(G.generators)
    if not gens:
        return [identity_automorphism(G)]
    orders, sizes = G.orders, G.class_sizes
    candidates = [np.flatnonzero((orders == orders[g]) & (sizes == sizes[g])) for g in gens]
    trees = [_word_tree(G, gens[: j + 1]) for j in range(len(gens))]
    members = [
        np.sort(np.concatenate([[G.identity]] + [layer[0] for layer in tree])) for tree in trees
    ]
    found: list[np.ndarray] = []
    chosen: list[int] = []

    def search(j: int) -> None:
        for c in candidates[j]:
            chosen.append(int(c))
            img = _extend_images(G, trees[j], members[j], gens[: j + 1], chosen)
            if img is not None:
                if j + 1 == len(gens):
                    found.append(img)
                    if len(found) > max_count:
                        raise TooLargeError(f"more than {max_count} automorphisms")
                else:
                    search(j + 1)
            chosen.pop()

    search(0)
    return [Automorphism(G, img) for img in found]


def fingerprint(G: Group) -> tuple:
    """Isomorphism invariants: order, sorted element orders and sorted class sizes."""
    return (
        G.order,
        tuple(sorted(int(o) for o in G.orders)),
        tuple(sorted(len(c) for c in G.conjugacy_classes)),
    )


def check_axioms(G: Group, seed: int = 0, samples: int = AXIOM_SAMPLES) -> CheckReport:
    n = G.order
    ar = np.arange(n)
    failures: dict = {}
    if not (np.array_equal(G.mul[G.identity], ar) and np.array_equal(G.mul[:, G.identity], ar)):
        failures["identity"] = True
    bad_inv = np.flatnonzero(G.mul[ar, G.inv] != G.identity)
    if bad_inv.size:
        failures["inverse"] = render_element(G, bad_inv[0])
    if n <= EXHAUSTIVE_AXIOM_LIMIT:
        mode = "exhaustive"
        for x in range(n):
            left = G.mul[G.mul[x][:, None], ar[None, :]]
            right = G.mul[x][G.mul]
            bad = np.argwhere(left != right)
            if bad.size:
                y, z = bad[0]
                failures["associativity"] = [render_element(G, v) for v in (x, y, z)]
                break
    else:
        mode = f"sampled({samples})"
        rng = np.random.default_rng(seed)
        x, y, z = rng.integers(0, n, size=(3, samples))
        bad = np.flatnonzero(G.mul[G.mul[x, y], z] != G.mul[x, G.mul[y, z]])
        if bad.size:
            i = bad[0]
            failures["associativity"] = [render_element(G, v) for v in (x[i], y[i], z[i])]
    if len(_closure(G, np.asarray(G.generators, dtype=np.int64))) != n:
        failures["generators"] = True
    return CheckReport(
        "axioms",
        verdict_of(not failures),
        details={"order": n, "associativity": mode, "generators": [G.label(g) for g in G.generators]},
        witnesses=failures,
    )
