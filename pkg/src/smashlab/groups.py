"""Finite permutation groups with subgroup-lattice and double-coset machinery.

Groups act on the points 1..degree; elements are stored as 0-based one-line
image tuples.  Every value is immutable after construction, and the subgroup
lattice, conjugacy classes and canonical orderings are cached eagerly, so
groups and subgroups are safe to share between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import (
    AmbientMismatch,
    ClosureViolation,
    ElementNotInGroup,
    NotAHomomorphism,
    NotASubgroup,
    OrderCapExceeded,
)

Perm = tuple

DEFAULT_ORDER_CAP = 48


# ---------------------------------------------------------------------------
# permutation helpers


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def compose(p: Perm, q: Perm) -> Perm:
    """Function composition p ∘ q: apply q first, then p."""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def conjugate(g: Perm, h: Perm) -> Perm:
    """g h g^{-1}."""
    return compose(g, compose(h, inverse(g)))


def extend_perm(p: Perm, degree: int) -> Perm:
    """View a permutation of a smaller degree as one fixing the extra points."""
    if len(p) > degree:
        raise ValueError("cannot extend to a smaller degree")
    return tuple(p) + tuple(range(len(p), degree))


def cycles_to_perm(cycles: Iterable[tuple], degree: int) -> Perm:
    """Build a permutation from 1-based cycles, multiplied right to left."""
    result = identity_perm(degree)
    for cyc in cycles:
        img = list(range(degree))
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not (1 <= a <= degree):
                raise ValueError(f"point {a} out of range for degree {degree}")
            img[a - 1] = b - 1
        result = compose(result, tuple(img))
    return result


def perm_to_cycles(p: Perm) -> tuple:
    seen = [False] * len(p)
    cycles = []
    for start in range(len(p)):
        if seen[start] or p[start] == start:
            seen[start] = True
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i + 1)
            i = p[i]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def format_perm(p: Perm) -> str:
    cycles = perm_to_cycles(p)
    if not cycles:
        return "e"
    return "".join("(" + ",".join(str(x) for x in cyc) + ")" for cyc in cycles)


def _generate_elements(gens, degree, order_cap):
    elems = {identity_perm(degree)}
    frontier = [identity_perm(degree)]
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                b = compose(a, g)
                if b not in elems:
                    elems.add(b)
                    fresh.append(b)
                    if order_cap is not None and len(elems) > order_cap:
                        raise OrderCapExceeded(
                            f"group order exceeds the cap {order_cap}; "
                            "raise it explicitly if this is intended"
                        )
        frontier = fresh
    return frozenset(elems)


def closure_of(elems: Iterable[Perm], degree: int) -> frozenset:
    """Subgroup generated by the given permutations, as an element set."""
    return _generate_elements(tuple(set(elems)), degree, None)


def subgroup_sort_key(elems: frozenset):
    return (len(elems), tuple(sorted(elems)))


def canonical_generators(elems: frozenset, degree: int) -> tuple:
    """Deterministic small generating set: greedily add minimal new elements."""
    gens = []
    have = {identity_perm(degree)}
    for g in sorted(elems):
        if g not in have:
            gens.append(g)
            have = closure_of(gens, degree)
            if len(have) == len(elems):
                break
    return tuple(gens)


# ---------------------------------------------------------------------------
# groups and subgroups


class FiniteGroup:
    """A concrete permutation group with eagerly cached structure.

    ``literal`` is the source form used by the printer; ``name`` is the
    display label used in tables and JSON output.
    """

    def __init__(self, generators, degree, name=None, literal=None,
                 order_cap: Optional[int] = DEFAULT_ORDER_CAP):
        gens = tuple(tuple(g) for g in generators)
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g}")
        self.degree = degree
        self.generators = gens
        self.order_cap = order_cap if order_cap is not None else DEFAULT_ORDER_CAP
        self.elements = _generate_elements(gens, degree, self.order_cap)
        self.order = len(self.elements)
        self.identity = identity_perm(degree)
        gens_text = ",".join(format_perm(g) for g in gens) or "e"
        self.name = name if name is not None else f"<{gens_text}>"
        self.literal = literal if literal is not None else self.name
        self.elements_sorted = tuple(sorted(self.elements))
        self.is_abelian = all(
            compose(a, b) == compose(b, a)
            for a in gens
            for b in gens
        )
        self._subgroup_sets = self._enumerate_subgroup_sets()
        self._subgroups = tuple(Subgroup(self, s) for s in self._subgroup_sets)
        self._by_elements = {s.elements: s for s in self._subgroups}
        self._class_rep = {}
        classes = []
        for s in self._subgroup_sets:
            if s in self._class_rep:
                continue
            orbit = {
                frozenset(conjugate(g, h) for h in s)
                for g in self.elements_sorted
            }
            for t in orbit:
                self._class_rep[t] = s
            classes.append(tuple(sorted(orbit, key=subgroup_sort_key)))
        self._conjugacy_classes = tuple(classes)
        self._as_group_cache = {}

    # eq/hash identify a group with its underlying permutation set
    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and self.degree == other.degree
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.degree, self.elements))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def __contains__(self, perm):
        return perm in self.elements

    def _enumerate_subgroup_sets(self):
        subs = {frozenset({self.identity})}
        for g in self.elements_sorted:
            subs.add(closure_of((g,), self.degree))
        frontier = set(subs)
        while frontier:
            fresh = set()
            for s in frontier:
                if len(s) == self.order:
                    continue
                for g in self.elements_sorted:
                    if g in s:
                        continue
                    t = closure_of(tuple(s) + (g,), self.degree)
                    if t not in subs:
                        subs.add(t)
                        fresh.add(t)
            frontier = fresh
        return tuple(sorted(subs, key=subgroup_sort_key))

    @property
    def subgroup_list(self):
        return self._subgroups

    @property
    def conjugacy_classes(self):
        """Conjugacy classes of subgroups, each a sorted tuple of element sets."""
        return self._conjugacy_classes

    def class_reps(self):
        """Canonical subgroup representatives, one per conjugacy class."""
        return tuple(self._by_elements[cls[0]] for cls in self._conjugacy_classes)

    def subgroup(self, elems: Iterable[Perm]) -> "Subgroup":
        elems = frozenset(elems)
        sub = self._by_elements.get(elems)
        if sub is None:
            raise NotASubgroup(f"{sorted(elems)} is not a subgroup of {self.name}")
        return sub

    def canonical_rep(self, elems: frozenset) -> frozenset:
        rep = self._class_rep.get(frozenset(elems))
        if rep is None:
            raise NotASubgroup(f"not a subgroup element set of {self.name}")
        return rep

    def trivial_subgroup(self) -> "Subgroup":
        return self._subgroups[0]

    def whole_subgroup(self) -> "Subgroup":
        return self._by_elements[self.elements]


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a fixed parent group, identified by its element set."""

    parent: FiniteGroup
    elements: frozenset

    @property
    def order(self):
        return len(self.elements)

    @property
    def is_trivial(self):
        return self.order == 1

    @property
    def is_whole(self):
        return self.order == self.parent.order

    def __le__(self, other):
        return self.elements <= other.elements

    def __contains__(self, perm):
        return perm in self.elements

    def sort_key(self):
        return subgroup_sort_key(self.elements)

    def generators(self):
        return canonical_generators(self.elements, self.parent.degree)

    def is_cyclic(self):
        return any(
            len(closure_of((g,), self.parent.degree)) == self.order
            for g in self.elements
        )

    def is_normal(self):
        return all(
            frozenset(conjugate(g, h) for h in self.elements) == self.elements
            for g in self.parent.generators
        )

    def as_group(self) -> FiniteGroup:
        """The subgroup viewed as a group in its own right (same degree)."""
        if self.is_whole:
            return self.parent
        cached = self.parent._as_group_cache.get(self.elements)
        if cached is None:
            cached = FiniteGroup(
                self.generators(),
                self.parent.degree,
                name=display_name(self),
                literal=subgroup_literal(self),
                order_cap=self.parent.order_cap,
            )
            self.parent._as_group_cache[self.elements] = cached
        return cached

    def __repr__(self):
        return f"Subgroup({display_name(self)} <= {self.parent.name})"


def display_name(sub: Subgroup) -> str:
    """Stable human label: 'e', the parent name, C<n> when unambiguous, or generators."""
    if sub.is_trivial:
        return "e"
    if sub.is_whole:
        return sub.parent.name
    if sub.is_cyclic():
        same = [
            cls
            for cls in sub.parent.conjugacy_classes
            if len(cls[0]) == sub.order
            and sub.parent._by_elements[cls[0]].is_cyclic()
        ]
        if len(same) == 1:
            return f"C{sub.order}"
    gens = ",".join(format_perm(g) for g in sub.generators())
    return f"<{gens}>"


def subgroup_literal(sub: Subgroup) -> str:
    gens = ",".join(format_perm(g) for g in sub.generators())
    return f"sub[{sub.parent.literal}]{{{gens}}}"


# ---------------------------------------------------------------------------
# constructors


def trivial_group(order_cap=DEFAULT_ORDER_CAP) -> FiniteGroup:
    return FiniteGroup((), 1, name="e", literal="C(1)", order_cap=order_cap)


def cyclic(n: int, order_cap=DEFAULT_ORDER_CAP) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    if n == 1:
        return trivial_group(order_cap)
    gen = cycles_to_perm([tuple(range(1, n + 1))], n)
    return FiniteGroup((gen,), n, name=f"C{n}", literal=f"C({n})", order_cap=order_cap)


def symmetric(n: int, order_cap=DEFAULT_ORDER_CAP) -> FiniteGroup:
    if n < 1:
        raise ValueError("symmetric group degree must be positive")
    if n == 1:
        return FiniteGroup((), 1, name="S1", literal="S(1)", order_cap=order_cap)
    gens = [cycles_to_perm([(1, 2)], n)]
    if n > 2:
        gens.append(cycles_to_perm([tuple(range(1, n + 1))], n))
    return FiniteGroup(gens, n, name=f"S{n}", literal=f"S({n})", order_cap=order_cap)


def dihedral8(order_cap=DEFAULT_ORDER_CAP) -> FiniteGroup:
    """The order-8 dihedral group <(1,2,3,4),(1,3)> inside S4."""
    gens = (
        cycles_to_perm([(1, 2, 3, 4)], 4),
        cycles_to_perm([(1, 3)], 4),
    )
    return FiniteGroup(
        gens, 4, name="D8", literal="sub[S(4)]{(1,2,3,4),(1,3)}", order_cap=order_cap
    )


def direct_product(a: FiniteGroup, b: FiniteGroup, order_cap=None) -> FiniteGroup:
    """Direct product by disjoint-support embedding."""
    cap = order_cap if order_cap is not None else max(a.order_cap, b.order_cap)
    degree = a.degree + b.degree
    gens = [extend_perm(g, degree) for g in a.generators]
    shift = a.degree
    for g in b.generators:
        img = list(range(degree))
        for i, j in enumerate(g):
            img[shift + i] = shift + j
        gens.append(tuple(img))
    return FiniteGroup(
        gens,
        degree,
        name=f"{a.name}x{b.name}",
        literal=f"{a.literal}x{b.literal}",
        order_cap=cap,
    )


# ---------------------------------------------------------------------------
# lattice operations


def subgroups(G: FiniteGroup) -> list:
    """All subgroups, duplicate-free, sorted by (order, canonical encoding)."""
    return list(G.subgroup_list)


def conjugate_subgroup(g: Perm, H: Subgroup) -> Subgroup:
    """The conjugate g H g^{-1} inside H's parent."""
    if g not in H.parent.elements:
        raise ElementNotInGroup(
            f"{format_perm(g)} is not an element of {H.parent.name}"
        )
    return H.parent.subgroup(conjugate(g, h) for h in H.elements)


def intersect(H: Subgroup, K: Subgroup) -> Subgroup:
    if H.parent != K.parent:
        raise AmbientMismatch("intersection needs a common ambient group")
    return H.parent.subgroup(H.elements & K.elements)


def double_coset_reps_elems(universe, K_elems, H_elems) -> list:
    """Minimal representatives of K\\U/H for an arbitrary finite universe U."""
    remaining = set(universe)
    reps = []
    for g in sorted(universe):
        if g not in remaining:
            continue
        reps.append(g)
        coset = {compose(k, compose(g, h)) for k in K_elems for h in H_elems}
        remaining -= coset
    return reps


def double_cosets(K: Subgroup, G: FiniteGroup, H: Subgroup) -> list:
    """Canonical (minimal) representatives of the double cosets K\\G/H."""
    if K.parent != G or H.parent != G:
        raise AmbientMismatch("double cosets need subgroups of the given group")
    return double_coset_reps_elems(G.elements_sorted, K.elements, H.elements)


def double_coset(K: Subgroup, g: Perm, H: Subgroup) -> frozenset:
    return frozenset(
        compose(k, compose(g, h)) for k in K.elements for h in H.elements
    )


def is_subconjugate(K: Subgroup, H: Subgroup) -> bool:
    """True when some conjugate of K lies inside H."""
    if K.parent != H.parent:
        raise AmbientMismatch("subconjugacy needs a common ambient group")
    if H.order % K.order != 0:
        return False
    return any(
        frozenset(conjugate(g, k) for k in K.elements) <= H.elements
        for g in K.parent.elements_sorted
    )


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Family:
    """A subconjugacy-closed set of subgroups of an ambient group."""

    ambient: FiniteGroup
    members: frozenset  # frozenset of element sets

    @classmethod
    def make(cls, ambient: FiniteGroup, members) -> "Family":
        members = frozenset(
            m.elements if isinstance(m, Subgroup) else frozenset(m) for m in members
        )
        fam = cls(ambient, members)
        fam.check_closed()
        return fam

    def check_closed(self):
        for m in self.members:
            if m not in self.ambient._by_elements:
                raise NotASubgroup("family member is not a subgroup of the ambient")
        have = self.members
        for m in self.members:
            for s in self.ambient._subgroup_sets:
                if s <= m and s not in have:
                    raise ClosureViolation(
                        "family is not closed under passing to subgroups"
                    )
            for g in self.ambient.generators:
                if frozenset(conjugate(g, x) for x in m) not in have:
                    raise ClosureViolation("family is not closed under conjugation")

    def contains(self, sub: Union[Subgroup, frozenset]) -> bool:
        elems = sub.elements if isinstance(sub, Subgroup) else frozenset(sub)
        return elems in self.members

    def member_subgroups(self):
        return tuple(
            self.ambient._by_elements[m]
            for m in sorted(self.members, key=subgroup_sort_key)
        )

    def maximal_class_reps(self):
        """One canonical representative per conjugacy class of maximal members."""
        maximal = [
            m
            for m in self.members
            if not any(m < other for other in self.members)
        ]
        reps = {self.ambient.canonical_rep(m) for m in maximal}
        return tuple(
            self.ambient._by_elements[r] for r in sorted(reps, key=subgroup_sort_key)
        )


def family_generated(H: Subgroup) -> Family:
    """Smallest family containing H: everything subconjugate to H."""
    members = [
        s for s in H.parent.subgroup_list if is_subconjugate(s, H)
    ]
    return Family(H.parent, frozenset(s.elements for s in members))


def family_from_subgroups(ambient: FiniteGroup, subs) -> Family:
    members = set()
    for sub in subs:
        members.update(m.elements for m in family_generated(sub).member_subgroups())
    return Family(ambient, frozenset(members))


def family_all(G: FiniteGroup) -> Family:
    return Family(G, frozenset(G._subgroup_sets))


def family_proper(G: FiniteGroup) -> Family:
    return Family(G, frozenset(s for s in G._subgroup_sets if len(s) < G.order))


def family_trivial(G: FiniteGroup) -> Family:
    return Family(G, frozenset({frozenset({G.identity})}))


# ---------------------------------------------------------------------------
# homomorphisms


class Homomorphism:
    """A group homomorphism given by generator images, validated exhaustively."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, gen_images):
        self.source = source
        self.target = target
        self.gen_images = tuple((tuple(g), tuple(v)) for g, v in gen_images)
        for g, v in self.gen_images:
            if g not in source.elements:
                raise ElementNotInGroup(f"{format_perm(g)} not in {source.name}")
            if v not in target.elements:
                raise ElementNotInGroup(f"{format_perm(v)} not in {target.name}")
        emap = {source.identity: target.identity}
        frontier = [source.identity]
        while frontier:
            fresh = []
            for a in frontier:
                fa = emap[a]
                for g, fg in self.gen_images:
                    b = compose(a, g)
                    fb = compose(fa, fg)
                    known = emap.get(b)
                    if known is None:
                        emap[b] = fb
                        fresh.append(b)
                    elif known != fb:
                        raise NotAHomomorphism(
                            "generator images are inconsistent on "
                            f"{format_perm(a)}*{format_perm(g)}",
                            witness=(a, g),
                        )
            frontier = fresh
        if len(emap) != source.order:
            raise NotAHomomorphism(
                "the given generators do not generate the source group"
            )
        for a in source.elements_sorted:
            for b in source.elements_sorted:
                if emap[compose(a, b)] != compose(emap[a], emap[b]):
                    raise NotAHomomorphism(
                        f"f({format_perm(a)}*{format_perm(b)}) != "
                        f"f({format_perm(a)})*f({format_perm(b)})",
                        witness=(a, b),
                    )
        self.elem_map = emap
        self._image_cache = {}
        for sub in source.subgroup_list:
            self.image_elems(sub.elements)

    def apply(self, g: Perm) -> Perm:
        img = self.elem_map.get(tuple(g))
        if img is None:
            raise ElementNotInGroup(f"{format_perm(g)} not in {self.source.name}")
        return img

    def image_elems(self, elems: frozenset) -> frozenset:
        elems = frozenset(elems)
        cached = self._image_cache.get(elems)
        if cached is None:
            cached = frozenset(self.elem_map[g] for g in elems)
            self._image_cache[elems] = cached
        return cached

    def image_subgroup(self, sub: Subgroup) -> Subgroup:
        return self.target.subgroup(self.image_elems(sub.elements))

    @classmethod
    def identity(cls, G: FiniteGroup) -> "Homomorphism":
        return cls(G, G, [(g, g) for g in G.generators])

    @classmethod
    def conjugation(cls, G: FiniteGroup, g: Perm) -> "Homomorphism":
        """x -> g^{-1} x g, as a self-map of a group normalized by g."""
        gi = inverse(g)
        return cls(G, G, [(x, compose(gi, compose(x, g))) for x in G.generators])

    def __eq__(self, other):
        return (
            isinstance(other, Homomorphism)
            and self.source == other.source
            and self.target == other.target
            and self.elem_map == other.elem_map
        )

    def __hash__(self):
        return hash(
            (self.source, self.target, tuple(sorted(self.elem_map.items())))
        )

    def __repr__(self):
        return f"Homomorphism({self.source.name} -> {self.target.name})"


def check_homomorphism(source, target, gen_images) -> Homomorphism:
    """Validate generator images and return the (fully cached) homomorphism."""
    return Homomorphism(source, target, gen_images)
