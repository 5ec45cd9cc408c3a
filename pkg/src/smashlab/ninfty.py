"""Finite G-sets, indexing systems, coinduced admissibility, and the
norm-closure criterion for localization of equivariant algebras.

Indexing systems are stored as explicit (H, K) pair sets, closed under
conjugation and restriction; no operad spaces are represented.  Every
NotClosed verdict ships a counterexample that has been re-checked by the
support engine before being reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from .chrom import TOP
from .errors import (
    AmbientMismatch,
    ClosureViolation,
    InvariantViolation,
    MissingPremise,
    ShapeNotCovered,
)
from .expr import (
    EG,
    ER,
    Atom,
    EFplus,
    EFtilde,
    FamilySpec,
    Ind,
    Norm,
    Res,
    SpectrumExpr,
    annotate,
    strip_inserted,
    to_text,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    compose,
    conjugate,
    display_name,
    double_coset_reps_elems,
    inverse,
    subgroup_sort_key,
)
from .support import is_acyclic, support


# ---------------------------------------------------------------------------
# finite G-sets


@dataclass(frozen=True)
class GSet:
    """A finite G-set presented as a multiset of orbit stabilizers."""

    ambient: FiniteGroup
    orbits: Tuple[frozenset, ...]  # stabilizer element sets, canonically sorted

    @classmethod
    def make(cls, ambient: FiniteGroup, stabilizers: Iterable) -> "GSet":
        sets = []
        for s in stabilizers:
            elems = s.elements if isinstance(s, Subgroup) else frozenset(s)
            if elems not in ambient._by_elements:
                raise AmbientMismatch(
                    "orbit stabilizer is not a subgroup of the ambient group"
                )
            sets.append(elems)
        return cls(ambient, tuple(sorted(sets, key=subgroup_sort_key)))

    @classmethod
    def orbit(cls, ambient: FiniteGroup, stabilizer) -> "GSet":
        return cls.make(ambient, [stabilizer])

    @property
    def size(self) -> int:
        return sum(self.ambient.order // len(s) for s in self.orbits)

    def describe(self) -> str:
        G = self.ambient
        parts = [
            f"{G.name}/{display_name(G._by_elements[s])}" for s in self.orbits
        ]
        return " + ".join(parts) if parts else "empty"


def restrict_gset(T: GSet, K: Subgroup) -> GSet:
    """Orbit decomposition of the restriction of T to K, by double cosets."""
    if K.parent != T.ambient:
        raise AmbientMismatch("restriction subgroup must live in the ambient group")
    G = T.ambient
    k_group = K.as_group()
    stabs = []
    for H_elems in T.orbits:
        for g in double_coset_reps_elems(G.elements_sorted, K.elements, H_elems):
            gH = frozenset(conjugate(g, h) for h in H_elems)
            stabs.append(K.elements & gH)
    return GSet.make(k_group, stabs)


# ---------------------------------------------------------------------------
# indexing systems


@dataclass(frozen=True)
class IndexingSystem:
    """Admissibility data: pairs (H, K) meaning H/K is an admissible H-set."""

    ambient: FiniteGroup
    pairs: frozenset  # of (H element set, K element set)

    @classmethod
    def from_pairs(cls, ambient: FiniteGroup, pairs) -> "IndexingSystem":
        norm = set()
        for h, k in pairs:
            h = h.elements if isinstance(h, Subgroup) else frozenset(h)
            k = k.elements if isinstance(k, Subgroup) else frozenset(k)
            norm.add((h, k))
        system = cls(ambient, frozenset(norm))
        system.validate()
        return system

    @classmethod
    def trivial(cls, ambient: FiniteGroup) -> "IndexingSystem":
        return cls(
            ambient, frozenset((s, s) for s in ambient._subgroup_sets)
        )

    @classmethod
    def complete(cls, ambient: FiniteGroup) -> "IndexingSystem":
        pairs = set()
        for h in ambient._subgroup_sets:
            for k in ambient._subgroup_sets:
                if k <= h:
                    pairs.add((h, k))
        return cls(ambient, frozenset(pairs))

    @classmethod
    def generate(cls, ambient: FiniteGroup, seeds) -> "IndexingSystem":
        """Smallest indexing system containing the seed pairs."""
        pairs = {(s, s) for s in ambient._subgroup_sets}
        for h, k in seeds:
            h = h.elements if isinstance(h, Subgroup) else frozenset(h)
            k = k.elements if isinstance(k, Subgroup) else frozenset(k)
            if not k <= h:
                raise ClosureViolation("seed pair is not nested")
            if h not in ambient._by_elements or k not in ambient._by_elements:
                raise ClosureViolation("seed pair is not made of subgroups")
            pairs.add((h, k))
        changed = True
        while changed:
            changed = False
            for h, k in list(pairs):
                for g in ambient.elements_sorted:
                    conj_pair = (
                        frozenset(conjugate(g, x) for x in h),
                        frozenset(conjugate(g, x) for x in k),
                    )
                    if conj_pair not in pairs:
                        pairs.add(conj_pair)
                        changed = True
                for l_elems in ambient._subgroup_sets:
                    if not l_elems <= h:
                        continue
                    for stab in _restricted_stabilizers(ambient, l_elems, h, k):
                        if (l_elems, stab) not in pairs:
                            pairs.add((l_elems, stab))
                            changed = True
        return cls(ambient, frozenset(pairs))

    def validate(self):
        by_elems = self.ambient._by_elements
        for h, k in self.pairs:
            if h not in by_elems or k not in by_elems or not k <= h:
                raise ClosureViolation("pair is not a nested pair of subgroups")
        have = self.pairs
        for s in self.ambient._subgroup_sets:
            if (s, s) not in have:
                raise ClosureViolation(
                    "indexing system must admit every trivial orbit"
                )
        for h, k in have:
            for g in self.ambient.generators:
                conj_pair = (
                    frozenset(conjugate(g, x) for x in h),
                    frozenset(conjugate(g, x) for x in k),
                )
                if conj_pair not in have:
                    raise ClosureViolation(
                        "indexing system is not closed under conjugation"
                    )
            for l_elems in self.ambient._subgroup_sets:
                if not l_elems <= h:
                    continue
                for stab in _restricted_stabilizers(self.ambient, l_elems, h, k):
                    if (l_elems, stab) not in have:
                        raise ClosureViolation(
                            "indexing system is not closed under restriction"
                        )
        return self

    def admits(self, H, K) -> bool:
        h = H.elements if isinstance(H, Subgroup) else frozenset(H)
        k = K.elements if isinstance(K, Subgroup) else frozenset(K)
        return (h, k) in self.pairs

    def restrict_to(self, H: Subgroup) -> "IndexingSystem":
        if H.parent != self.ambient:
            raise AmbientMismatch("restriction subgroup has the wrong ambient")
        pairs = frozenset(
            (h, k) for h, k in self.pairs if h <= H.elements
        )
        return IndexingSystem(H.as_group(), pairs)

    def is_complete(self) -> bool:
        return self == IndexingSystem.complete(self.ambient)

    def sorted_pairs(self):
        return sorted(
            self.pairs,
            key=lambda hk: (subgroup_sort_key(hk[0]), subgroup_sort_key(hk[1])),
        )

    def to_json(self):
        by = self.ambient._by_elements
        return [
            {"H": display_name(by[h]), "K": display_name(by[k])}
            for h, k in self.sorted_pairs()
        ]


def _restricted_stabilizers(ambient, l_elems, h_elems, k_elems):
    """Stabilizers of the orbits of res_L(H/K), as subgroups of L."""
    for g in double_coset_reps_elems(sorted(h_elems), l_elems, k_elems):
        yield l_elems & frozenset(conjugate(g, x) for x in k_elems)


def is_admissible(I: IndexingSystem, H: Subgroup, T: GSet) -> bool:
    """Whether every orbit of the H-set T is admissible for I."""
    h_group = H.as_group()
    if T.ambient != h_group:
        raise AmbientMismatch("the G-set does not live over the given subgroup")
    return all(I.admits(H.elements, stab) for stab in T.orbits)


# ---------------------------------------------------------------------------
# coinduction


def coinduce(
    I: IndexingSystem, H: Subgroup, G: FiniteGroup
) -> IndexingSystem:
    """Admissibility data of the coinduced operad along H <= G.

    A pair (K, K') is admissible exactly when, for every g, the restriction
    of the conjugated orbit gK/gK' to H meet gKg^{-1} is admissible for I.
    """
    if H.parent != G:
        raise AmbientMismatch("the subgroup must live in the target group")
    if I.ambient != H.as_group():
        raise AmbientMismatch(
            "the input indexing system must live over the given subgroup"
        )
    I.validate()
    pairs = set()
    for K in G.subgroup_list:
        for Kp_elems in G._subgroup_sets:
            if not Kp_elems <= K.elements:
                continue
            if _coinduced_admits(I, H, G, K.elements, Kp_elems):
                pairs.add((K.elements, Kp_elems))
    out = IndexingSystem(G, frozenset(pairs))
    out.validate()
    return out


def _coinduced_admits(I, H, G, k_elems, kp_elems) -> bool:
    for g in G.elements_sorted:
        gk = frozenset(conjugate(g, x) for x in k_elems)
        gkp = frozenset(conjugate(g, x) for x in kp_elems)
        m = H.elements & gk
        for h in double_coset_reps_elems(sorted(gk), m, gkp):
            stab = m & frozenset(conjugate(h, x) for x in gkp)
            if (m, stab) not in I.pairs:
                return False
    return True


# ---------------------------------------------------------------------------
# norm closure criterion


@dataclass(frozen=True)
class Counterexample:
    """An engine-verified witness that a norm fails to preserve acyclics."""

    expr: SpectrumExpr  # annotated test object over H
    expr_text: str
    norm_text: str
    acyclic_before: bool
    acyclic_after_norm: bool

    def to_json(self):
        return {
            "acyclic": self.expr_text,
            "norm_expansion": self.norm_text,
            "is_acyclic": self.acyclic_before,
            "norm_is_acyclic": self.acyclic_after_norm,
        }


@dataclass(frozen=True)
class ClosureVerdict:
    status: str  # "Closed" | "NotClosed" | "Unknown"
    citations: Tuple[str, ...]
    pair: Optional[Tuple[str, str]] = None
    at_subgroup: Optional[str] = None
    counterexample: Optional[Counterexample] = None
    reason: Optional[str] = None

    def to_json(self):
        out = {"status": self.status, "citations": list(self.citations)}
        if self.pair:
            out["pair"] = {"H": self.pair[0], "K": self.pair[1]}
        if self.at_subgroup:
            out["at_subgroup"] = self.at_subgroup
        if self.counterexample:
            out["counterexample"] = self.counterexample.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


def norm_closure_check(e: SpectrumExpr, I: IndexingSystem) -> ClosureVerdict:
    """Decide whether every admissible norm preserves the acyclics of e.

    Only family-type supports (bot/top valued) are decided; level values put
    the quantification over acyclics outside the exact fragment, and the
    verdict is then Unknown.
    """
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    if I.ambient != e.ambient:
        raise AmbientMismatch(
            "indexing system and expression have different ambient groups"
        )
    supp = support(e)
    if any(not (v.is_bot or v.is_top) for _, v in supp.values):
        return ClosureVerdict(
            "Unknown",
            ("Thm 5.2",),
            reason="support carries chromatic levels; the closure criterion "
            "is only exact for family-type (bot/top) supports",
        )
    G = e.ambient
    for h_elems, k_elems in I.sorted_pairs():
        failure = _pair_failure(supp, G, h_elems, k_elems)
        if failure is not None:
            counter = _build_counterexample(e, supp, G, h_elems, k_elems)
            by = G._by_elements
            return ClosureVerdict(
                "NotClosed",
                ("Thm 5.2",),
                pair=(display_name(by[h_elems]), display_name(by[k_elems])),
                at_subgroup=display_name(by[failure]),
                counterexample=counter,
            )
    return ClosureVerdict("Closed", ("Thm 5.2",))


def _pair_failure(supp, G, h_elems, k_elems) -> Optional[frozenset]:
    """First subgroup of H with full support but no double-coset witness."""
    for l_elems in G._subgroup_sets:
        if not l_elems <= h_elems:
            continue
        if not supp.value_at(l_elems).is_top:
            continue
        witness = False
        for g in double_coset_reps_elems(sorted(h_elems), l_elems, k_elems):
            gi = inverse(g)
            lg = frozenset(compose(gi, compose(x, g)) for x in l_elems)
            if supp.value_at(lg & k_elems).is_top:
                witness = True
                break
        if not witness:
            return l_elems
    return None


def _build_counterexample(e, supp, G, h_elems, k_elems) -> Counterexample:
    h_sub = G._by_elements[h_elems]
    h_group = h_sub.as_group()
    top_classes = []
    bot_classes = []
    for cls in h_group.conjugacy_classes:
        if supp.value_at(cls[0]).is_bot:
            top_classes.append(cls)  # maximal acyclic is top where e vanishes
        else:
            bot_classes.append(cls)
    top_members = frozenset(m for cls in top_classes for m in cls)
    bot_members = frozenset(m for cls in bot_classes for m in cls)
    z = _realize_support(h_group, top_members, bot_members)
    z = annotate(z, order_cap=G.order_cap)
    res_e = annotate(Res(h_sub, e), order_cap=G.order_cap)
    k_in_h = h_group.subgroup(k_elems)
    norm_expansion = annotate(
        Norm(h_group, Res(k_in_h, z)), order_cap=G.order_cap
    )
    before = is_acyclic(z, res_e)
    after = is_acyclic(norm_expansion, res_e)
    if not before or after:
        raise InvariantViolation(
            "norm-closure counterexample failed its engine verification"
        )
    return Counterexample(
        expr=z,
        expr_text=to_text(strip_inserted(z)),
        norm_text=to_text(strip_inserted(norm_expansion)),
        acyclic_before=before,
        acyclic_after_norm=after,
    )


def _realize_support(h_group, top_members, bot_members):
    """An expression over h_group with top exactly on the given members."""
    if _is_family(h_group, top_members):
        return EFplus(_explicit_spec(h_group, top_members), h_group)
    if _is_family(h_group, bot_members):
        return EFtilde(_explicit_spec(h_group, bot_members), h_group)
    entries = []
    for cls in h_group.conjugacy_classes:
        value = TOP if cls[0] in top_members else _bot()
        entries.append((h_group._by_elements[cls[0]], value))
    return Atom("z", h_group, tuple(entries))


def _bot():
    from .chrom import BOT

    return BOT


def _is_family(G, members) -> bool:
    for m in members:
        for s in G._subgroup_sets:
            if s <= m and s not in members:
                return False
        for g in G.generators:
            if frozenset(conjugate(g, x) for x in m) not in members:
                return False
    return True


def _explicit_spec(G, members) -> FamilySpec:
    maximal = [m for m in members if not any(m < o for o in members)]
    reps = sorted({G.canonical_rep(m) for m in maximal}, key=subgroup_sort_key)
    if reps == [frozenset({G.identity})]:
        return FamilySpec("triv")
    return FamilySpec("explicit", tuple(G._by_elements[r] for r in reps))


# ---------------------------------------------------------------------------
# preservation propagation


@dataclass(frozen=True)
class PropagationStatement:
    preserves: str
    upgraded: IndexingSystem
    new_norms: Tuple[Tuple[str, str], ...]
    complete: bool
    premise: str
    citations: Tuple[str, ...]

    def to_json(self):
        return {
            "statement": self.preserves,
            "premise": self.premise,
            "complete": self.complete,
            "new_norms": [{"H": h, "K": k} for h, k in self.new_norms],
            "upgraded_system": self.upgraded.to_json(),
            "citations": list(self.citations),
        }


def preservation_propagation(
    e: SpectrumExpr,
    I: IndexingSystem,
    premise: Optional[ClosureVerdict] = None,
    assert_premise: bool = False,
) -> PropagationStatement:
    """Propagate algebra preservation through an induced localization.

    Needs a certified premise that the restricted localization preserves
    algebras over the restricted system; for induction from the trivial
    subgroup the premise is automatic.
    """
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    G = e.ambient
    if I.ambient != G:
        raise AmbientMismatch("indexing system lives over the wrong group")
    extra_citations: Tuple[str, ...] = ()
    if isinstance(e, Ind):
        H = e.sub
    elif isinstance(e, ER):
        H = G.trivial_subgroup()
        extra_citations = ("Ex 2.4",)
    elif isinstance(e, EG):
        H = G.trivial_subgroup()
        extra_citations = ("Cor 4.6", "Ex 5.9")
    else:
        raise ShapeNotCovered(
            "propagation applies to induced classes (and the built-in "
            "induced-class atoms)"
        )
    if premise is not None:
        if premise.status != "Closed":
            raise MissingPremise(
                f"the supplied closure verdict is {premise.status}, not Closed"
            )
        premise_label = "norm-closure check on the restricted class"
    elif H.is_trivial:
        premise_label = "automatic: induction from the trivial subgroup"
    elif assert_premise:
        premise_label = "asserted by the caller"
    else:
        raise MissingPremise(
            "no certified premise that the restricted localization preserves "
            "algebras over the restricted system"
        )
    upgraded = coinduce(I.restrict_to(H), H, G)
    new_norms = tuple(
        (display_name(G._by_elements[h]), display_name(G._by_elements[k]))
        for h, k in sorted(
            upgraded.pairs - I.pairs,
            key=lambda hk: (subgroup_sort_key(hk[0]), subgroup_sort_key(hk[1])),
        )
    )
    complete = upgraded.is_complete()
    name = to_text(strip_inserted(e))
    if complete:
        text = (
            f"localization at ({name}) preserves algebras over the given "
            f"system and sends them to genuine {G.name}-commutative rings"
        )
        citations = ("Prop 5.3", "Cor 5.5", "Prop 5.6", "Cor 5.7", "Cor 5.8")
    else:
        text = (
            f"localization at ({name}) preserves algebras over the given "
            f"system, and the localized object is an algebra over the "
            f"coinduced system"
        )
        citations = ("Prop 5.3", "Cor 5.5", "Prop 5.6", "Cor 5.7")
    return PropagationStatement(
        preserves=text,
        upgraded=upgraded,
        new_norms=new_norms,
        complete=complete,
        premise=premise_label,
        citations=citations + extra_citations,
    )
