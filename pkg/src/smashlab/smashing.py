"""Smashing verdicts, localization-formula emission, local-object
characterizations, idempotent bookkeeping, and the fixed-points class rule.

Verdicts are three-valued.  The decider only answers when one of its cited
rules applies; everything else is reported as Unknown together with the
unmet obligation, never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .chrom import BOT, TOP, ChromLevel, join_all, tate_entry
from .errors import AmbientMismatch, InvariantViolation, ShapeNotCovered
from .expr import (
    EG,
    ER,
    Atom,
    EFplus,
    EFtilde,
    En,
    FamilySpec,
    Ind,
    Norm,
    Pt,
    Pull,
    Res,
    S0,
    Smash,
    SpectrumExpr,
    Triv,
    Wedge,
    annotate,
    strip_inserted,
    to_text,
)
from .groups import (
    Family,
    FiniteGroup,
    Subgroup,
    display_name,
    family_generated,
    family_proper,
    family_trivial,
    is_subconjugate,
    subgroup_sort_key,
)
from .support import Evaluator, support


@dataclass(frozen=True)
class Witness:
    """The subgroup and oracle entry behind a negative verdict."""

    subgroup: str
    oracle: str

    def to_json(self):
        return {"subgroup": self.subgroup, "oracle": self.oracle}


@dataclass(frozen=True)
class Verdict:
    status: str  # "Smashing" | "NotSmashing" | "Unknown"
    citations: Tuple[str, ...] = ()
    witness: Optional[Witness] = None
    reason: Optional[str] = None

    @property
    def is_smashing(self):
        return self.status == "Smashing"

    def to_json(self):
        out = {"status": self.status, "citations": list(self.citations)}
        out["witness"] = self.witness.to_json() if self.witness else None
        if self.reason:
            out["reason"] = self.reason
        return out


def _smashing(*citations):
    return Verdict("Smashing", tuple(citations))


def _not_smashing(witness, *citations):
    return Verdict("NotSmashing", tuple(citations), witness=witness)


def _unknown(reason, *citations):
    return Verdict("Unknown", tuple(citations), reason=reason)


def _induced_verdict(
    G: FiniteGroup,
    H: Subgroup,
    operand: Verdict,
    class_value: Callable[[frozenset], ChromLevel],
    prime: int,
    citations: Tuple[str, ...],
) -> Verdict:
    """Decide an induced class from H up to G via the Tate oracle.

    ``class_value`` reports the support of the induced class itself; the
    obligation at each class K outside the family of H is the vanishing of
    the oracle entry at the level carried by K meet H, for the quotient
    group of order |K| / |K meet H|.
    """
    if operand.status != "Smashing":
        return _unknown(
            "induction criterion needs a derivably smashing operand; operand is "
            + operand.status,
            *citations,
        )
    if not H.is_normal():
        return _unknown(
            "induction from a non-normal subgroup: the required geometric "
            "fixed points of the localized unit are outside the oracle table",
            "Prop 3.18",
        )
    fam = family_generated(H)
    for K in G.class_reps():
        if fam.contains(K.elements):
            continue
        meet_h = K.elements & H.elements
        quotient_order = K.order // len(meet_h)
        value = class_value(frozenset(meet_h))
        entry = tate_entry(value, quotient_order, prime)
        if not entry.vanishes:
            return _not_smashing(
                Witness(display_name(K), entry.witness),
                *(citations + (entry.citation,)),
            )
    return _smashing(*citations)


class SmashingDecider:
    def __init__(self, prime: int = 2):
        self.prime = prime
        self.evaluator = Evaluator()

    def derive(self, e: SpectrumExpr) -> Verdict:
        if isinstance(e, (S0, Pt)):
            return _smashing("Cor 2.11")
        if isinstance(e, En):
            return _smashing("smash product theorem")
        if isinstance(e, EFtilde):
            return _smashing("Cor 2.11")
        if isinstance(e, EFplus):
            return self._efplus(e)
        if isinstance(e, ER):
            verdict = self._induced_from_level(e.ambient, e.n, ("Ex 2.4",))
            if verdict.status == "NotSmashing":
                return Verdict(
                    "NotSmashing", verdict.citations + ("Thm 4.1",), verdict.witness
                )
            return verdict
        if isinstance(e, EG):
            h = 2 ** (e.k - 1) * e.m
            verdict = self._induced_from_level(e.ambient, h, ("Cor 4.6",))
            if verdict.status == "NotSmashing":
                return Verdict(
                    "NotSmashing", verdict.citations + ("Thm 4.7",), verdict.witness
                )
            return verdict
        if isinstance(e, Atom):
            return _unknown(
                f"atom {e.name} carries a declared support only; no structural rule applies"
            )
        if isinstance(e, Triv):
            inner = self.derive(e.child)
            if inner.is_smashing:
                return _smashing(*(inner.citations + ("Prop 3.12(1)",)))
            return _unknown(
                "inflation of a class not derivably smashing", *inner.citations
            )
        if isinstance(e, Res):
            inner = self.derive(e.child)
            if inner.is_smashing:
                return _smashing(*(inner.citations + ("Prop 3.12(2)",)))
            return _unknown(
                "restriction of a class not derivably smashing", "Rmk 3.13"
            )
        if isinstance(e, Norm):
            inner = self.derive(e.child)
            if inner.is_smashing:
                return _smashing(*(inner.citations + ("Prop 3.12(5)",)))
            return _unknown("norm of a class not derivably smashing")
        if isinstance(e, Pull):
            inner = self.derive(e.child)
            if inner.is_smashing:
                return _smashing(*(inner.citations + ("Prop 3.12(4)",)))
            return _unknown("pullback of a class not derivably smashing")
        if isinstance(e, (Smash, Wedge)):
            left, right = self.derive(e.left), self.derive(e.right)
            if left.is_smashing and right.is_smashing:
                return _smashing(
                    *dict.fromkeys(left.citations + right.citations + ("Cor 2.12",))
                )
            return _unknown(
                "a wedge/smash factor is not derivably smashing; the combined "
                "class is not decided by the available rules"
            )
        if isinstance(e, Ind):
            inner = self.derive(e.child)
            G, H = e.ambient, e.sub
            if H.is_trivial:
                citations = ("Prop 3.21", "Cor 3.22")
                if isinstance(_strip_pull(e.child), En):
                    citations = citations + ("Cor 3.23",)
            else:
                citations = ("Cor 3.19", "Prop 3.20")
            return _induced_verdict(
                G,
                H,
                inner,
                lambda k: self.evaluator.value(e, k),
                self.prime,
                citations,
            )
        raise TypeError(f"cannot derive a verdict for {type(e).__name__}")

    def _induced_from_level(self, G, n, base_citations):
        """Verdict for the class of (G induced from the trivial subgroup at E(n))."""
        from .chrom import level

        H = G.trivial_subgroup()
        return _induced_verdict(
            G,
            H,
            _smashing("smash product theorem"),
            lambda _k: level(n),
            self.prime,
            base_citations + ("Prop 3.21", "Cor 3.22", "Cor 3.23"),
        )

    def _efplus(self, e: EFplus) -> Verdict:
        from .expr import resolve_family

        fam = resolve_family(e.fam, e.ambient)
        if len(fam.members) == len(e.ambient._subgroup_sets):
            return _smashing("Cor 2.11")
        maximal = fam.maximal_class_reps()
        if len(maximal) == 1:
            K = maximal[0]
            verdict = _induced_verdict(
                e.ambient,
                K,
                _smashing("Cor 2.11"),
                lambda k: TOP
                if is_subconjugate(e.ambient.subgroup(k), K)
                else BOT,
                self.prime,
                ("Lemma 3.5",)
                + (("Prop 3.21", "Cor 3.22") if K.is_trivial else ("Cor 3.19", "Prop 3.20")),
            )
            return verdict
        verdicts = [
            _induced_verdict(
                e.ambient,
                K,
                _smashing("Cor 2.11"),
                lambda k, K=K: TOP
                if is_subconjugate(e.ambient.subgroup(k), K)
                else BOT,
                self.prime,
                ("Lemma 3.5",),
            )
            for K in maximal
        ]
        if all(v.is_smashing for v in verdicts):
            cites = ["Lemma 3.5", "Cor 2.12"]
            for v in verdicts:
                for c in v.citations:
                    if c not in cites:
                        cites.append(c)
            return _smashing(*cites)
        return _unknown(
            "universal-space class with several maximal isotropy classes and an "
            "undecided induced factor",
            "Prop 3.18",
        )


def _strip_pull(e: SpectrumExpr) -> SpectrumExpr:
    while isinstance(e, Pull):
        e = e.child
    return e


def derive_smashing(e: SpectrumExpr, prime: int = 2) -> Verdict:
    """Three-valued smashing verdict with its citation chain."""
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    return SmashingDecider(prime).derive(e)


# ---------------------------------------------------------------------------
# localization formulas


def _family_space_name(fam: Family) -> str:
    G = fam.ambient
    if fam == family_trivial(G):
        return f"E{G.name}"
    if fam == family_proper(G):
        return "EP"
    maximal = fam.maximal_class_reps()
    if len(maximal) == 1:
        return f"EF[{display_name(maximal[0])}]"
    names = ",".join(display_name(K) for K in maximal)
    return f"EF{{{names}}}"


@dataclass(frozen=True)
class Formula:
    """A cofree localization formula F(<space>+, <factor> ^ X)."""

    ambient: FiniteGroup
    family: Family
    factor: str
    citations: Tuple[str, ...]

    @property
    def text(self) -> str:
        return f"F({_family_space_name(self.family)}+, {self.factor} ^ X)"

    def to_json(self):
        return {
            "group": self.ambient.name,
            "formula": self.text,
            "citations": list(self.citations),
        }


def _nonequivariant_unit(value: ChromLevel) -> str:
    if value.is_top:
        return "i_*L_{S0}(S0)"
    if value.is_bot:
        return "pt"
    return f"i_*L_{{E({value.n})}}(S0)"


def emit_localization_formula(e: SpectrumExpr, prime: int = 2) -> Formula:
    """Emit the induced-localization formula for a covered shape."""
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    if isinstance(e, ER):
        G = e.ambient
        return Formula(
            G,
            family_trivial(G),
            _nonequivariant_unit(_level_of(e.n)),
            ("Thm 4.1",),
        )
    if isinstance(e, EG):
        G = e.ambient
        h = 2 ** (e.k - 1) * e.m
        return Formula(
            G,
            family_trivial(G),
            _nonequivariant_unit(_level_of(h)),
            ("Thm 4.7", "Cor 4.6"),
        )
    if isinstance(e, Ind):
        G, H = e.ambient, e.sub
        inner = SmashingDecider(prime).derive(e.child)
        if not inner.is_smashing:
            raise ShapeNotCovered(
                "localization formula needs a derivably smashing operand; got "
                + inner.status
            )
        if H.is_trivial:
            value = Evaluator().value(e.child, frozenset({e.child.ambient.identity}))
            return Formula(
                G, family_trivial(G), _nonequivariant_unit(value), ("Prop 3.21",)
            )
        if not H.is_normal():
            raise ShapeNotCovered(
                "induced localization formula needs a normal subgroup"
            )
        fam = family_generated(H)
        factor = _normal_unit_factor(e, G, H)
        return Formula(G, fam, factor, ("Prop 3.20",))
    raise ShapeNotCovered(
        f"no localization formula shape matches {type(e).__name__}"
    )


def _level_of(n: int) -> ChromLevel:
    from .chrom import level

    return level(n)


def _normal_unit_factor(e: Ind, G: FiniteGroup, H: Subgroup) -> str:
    """Name the localized-unit factor, as a universal space when possible."""
    ev = Evaluator()
    h_group = H.as_group()
    values = {}
    for cls in h_group.conjugacy_classes:
        rep = cls[0]
        values[rep] = ev.value(e, rep)
    if all(v.is_bot or v.is_top for v in values.values()):
        bot_members = set()
        for cls in h_group.conjugacy_classes:
            if values[cls[0]].is_bot:
                bot_members.update(cls)
        lifted = {
            s.elements
            for rep in bot_members
            for s in family_generated(_subgroup_in(G, rep)).member_subgroups()
        }
        if not bot_members:
            return "S0"
        fam = Family(G, frozenset(lifted))
        return "~" + _family_space_name(fam)
    return f"L_{{{to_text(strip_inserted(e))}}}(S0)"


def _subgroup_in(G: FiniteGroup, elems: frozenset) -> Subgroup:
    return G.subgroup(elems)


# ---------------------------------------------------------------------------
# local-object characterizations


@dataclass(frozen=True)
class Statement:
    """A structured characterization of the local objects of a class."""

    shape: str
    text: str
    citations: Tuple[str, ...]
    ring_hypothesis: bool = False

    def to_json(self):
        out = {
            "shape": self.shape,
            "statement": self.text,
            "citations": list(self.citations),
        }
        if self.ring_hypothesis:
            out["ring_hypothesis"] = True
        return out


def characterize_locals(
    e: SpectrumExpr, prime: int = 2, fixed_points: bool = False
) -> Statement:
    """The sharpest applicable description of the local objects."""
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    name = to_text(strip_inserted(e))
    if fixed_points:
        return Statement(
            "fixed-points",
            f"X is ({name})^G-local iff triv[G](X) is ({name})-local "
            f"(recorded hypothesis: acyclics of the G-fixed points are contained "
            f"in those of every H-fixed points, e.g. a ring class)",
            ("Cor 3.14(5)",),
            ring_hypothesis=True,
        )
    if isinstance(e, Ind):
        G, H = e.ambient, e.sub
        hname = display_name(H)
        child_name = to_text(strip_inserted(e.child))
        if G.is_abelian:
            return Statement(
                "cofree+restricted",
                f"X is ({name})-local iff X is {hname}-cofree and "
                f"res[{hname}](X) is ({child_name})-local",
                ("Cor 3.10",),
            )
        if H.is_normal():
            conjugates = _weyl_wedge_text(e, G, H)
            return Statement(
                "cofree+weyl-wedge",
                f"X is ({name})-local iff X is {hname}-cofree and "
                f"res[{hname}](X) is ({conjugates})-local",
                ("Cor 3.9",),
            )
        return Statement(
            "cofree+induced-restriction",
            f"X is ({name})-local iff X is {hname}-cofree and "
            f"res[{hname}](X) is (res[{hname}]({name}))-local",
            ("Prop 3.7",),
        )
    decider = SmashingDecider(prime)
    if isinstance(e, Triv) and decider.derive(e.child).is_smashing:
        return Statement(
            "inflation",
            f"X is ({name})-local iff Phi^H(X) is ({to_text(strip_inserted(e.child))})-local "
            f"for every subgroup H",
            ("Cor 3.14(2)",),
        )
    if isinstance(e, Pull) and decider.derive(e.child).is_smashing:
        return Statement(
            "pullback",
            f"X is ({name})-local iff Phi^H(X) is Phi^f(H)({to_text(strip_inserted(e.child))})-local "
            f"for every subgroup H",
            ("Cor 3.14(3)",),
        )
    if isinstance(e, Norm) and decider.derive(e.child).is_smashing:
        return Statement(
            "norm",
            f"X is ({name})-local iff for every subgroup K and every double coset "
            f"[g] of K\\{e.ambient.name}/{display_name(e.sub)}, Phi^K(X) is "
            f"Phi^(K^g meet {display_name(e.sub)})({to_text(strip_inserted(e.child))})-local",
            ("Cor 3.14(4)",),
        )
    verdict = decider.derive(e)
    if verdict.is_smashing:
        return Statement(
            "smashing",
            f"X is ({name})-local iff Phi^H(X) is Phi^H({name})-local "
            f"for every subgroup H",
            ("Cor 3.14(1)",),
        )
    raise ShapeNotCovered(
        f"no characterization shape matches {type(e).__name__} "
        f"(smashing status: {verdict.status})"
    )


def _weyl_wedge_text(e: Ind, G: FiniteGroup, H: Subgroup) -> str:
    reps = []
    seen = set()
    for g in G.elements_sorted:
        coset = frozenset(
            _compose_many(g, h) for h in H.elements
        )
        if coset in seen:
            continue
        seen.add(coset)
        reps.append(g)
    from .groups import Homomorphism, format_perm

    parts = []
    h_group = H.as_group()
    child_name = to_text(strip_inserted(e.child))
    for g in reps:
        if g == G.identity:
            parts.append(child_name)
        else:
            parts.append(f"pull[{_hom_label(g)}]({child_name})")
    return " v ".join(parts)


def _hom_label(g) -> str:
    from .groups import format_perm

    return f"conj({format_perm(g)})"


def _compose_many(g, h):
    from .groups import compose

    return compose(g, h)


# ---------------------------------------------------------------------------
# idempotent pairs


@dataclass(frozen=True)
class IdempotentPair:
    """Left/right idempotent expressions with pointwise-disjoint supports."""

    left: SpectrumExpr
    right: SpectrumExpr

    def check(self):
        ev = _pair_evaluator(self)
        sl, sr = ev.support(self.left), ev.support(self.right)
        for (key, lval), (_, rval) in zip(sl.values, sr.values):
            if not (lval.is_bot or rval.is_bot):
                raise InvariantViolation(
                    "idempotent pair has a class where neither side vanishes"
                )
            if not (lval.is_top or rval.is_top):
                raise InvariantViolation(
                    "idempotent pair has a class where neither side is the unit; "
                    "only family-type idempotents are supported"
                )
        return self


def _pair_evaluator(pair: IdempotentPair):
    if pair.left.ambient != pair.right.ambient:
        raise AmbientMismatch("idempotent pair sides have different ambients")
    return Evaluator()


def _pair_family(pair: IdempotentPair) -> Family:
    """The family on which the left idempotent is the unit."""
    ev = _pair_evaluator(pair)
    sl = ev.support(pair.left)
    G = pair.left.ambient
    members = set()
    for cls in G.conjugacy_classes:
        if sl.value_at(cls[0]).is_top:
            members.update(cls)
    return Family(G, frozenset(members))


def combine_idempotents(pairs, mode: str) -> IdempotentPair:
    """Join or meet a family of idempotent pairs, recomputing the other side."""
    pairs = list(pairs)
    if not pairs:
        raise InvariantViolation("need at least one idempotent pair")
    ambient = pairs[0].left.ambient
    for pair in pairs:
        if pair.left.ambient != ambient or pair.right.ambient != ambient:
            raise AmbientMismatch("idempotent pairs live over different ambients")
        pair.check()
    families = [_pair_family(pair) for pair in pairs]
    if mode == "join":
        members = frozenset.intersection(*[f.members for f in families])
        left = pairs[0].left
        for pair in pairs[1:]:
            left = Smash(left, pair.left, ambient=ambient)
        right = annotate(
            EFtilde(_family_spec_of(ambient, members), ambient),
            order_cap=ambient.order_cap,
        )
        return IdempotentPair(left, right).check()
    if mode == "meet":
        members = frozenset.union(*[f.members for f in families])
        right = pairs[0].right
        for pair in pairs[1:]:
            right = Smash(right, pair.right, ambient=ambient)
        left = annotate(
            EFplus(_family_spec_of(ambient, members), ambient),
            order_cap=ambient.order_cap,
        )
        return IdempotentPair(left, right).check()
    raise ValueError("mode must be 'join' or 'meet'")


def _family_spec_of(G: FiniteGroup, members: frozenset) -> FamilySpec:
    maximal = [
        m for m in members if not any(m < other for other in members)
    ]
    reps = sorted(
        {G.canonical_rep(m) for m in maximal}, key=subgroup_sort_key
    )
    return FamilySpec("explicit", tuple(G._by_elements[r] for r in reps))


# ---------------------------------------------------------------------------
# fixed-points class


@dataclass(frozen=True)
class FixedPointsClass:
    """Nonequivariant class of the genuine fixed points, with the ring flag."""

    value: ChromLevel
    ring_hypothesis: bool
    citations: Tuple[str, ...]

    def to_json(self):
        from .chrom import level_to_json

        return {
            "value": level_to_json(self.value),
            "ring_hypothesis": self.ring_hypothesis,
            "citations": list(self.citations),
        }


def fixed_points_class(e: SpectrumExpr) -> FixedPointsClass:
    """Join of the support over all conjugacy classes."""
    if e.ambient is None:
        raise AmbientMismatch("expression must be typechecked first")
    s = support(e)
    return FixedPointsClass(
        join_all(v for _, v in s.values),
        ring_hypothesis=True,
        citations=("Prop 3.12(7)",),
    )
