"""Evaluation of expressions to chromatic supports, and Bousfield comparisons.

The support of an expression assigns a chain value to every conjugacy class
of subgroups of its ambient group.  Evaluation is a pure bottom-up fold,
memoized per (node, conjugacy class); the memo table only ever receives
idempotent inserts, so per-class evaluations could run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .chrom import BOT, TOP, ChromLevel, join, join_all, level, level_to_json, level_text, meet, meet_all
from .errors import AmbientMismatch
from .expr import (
    EG,
    ER,
    Atom,
    EFplus,
    EFtilde,
    En,
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
    resolve_family,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    compose,
    display_name,
    double_coset_reps_elems,
    inverse,
    subgroup_sort_key,
)


@dataclass(frozen=True)
class ChromSupport:
    """A total chain-valued function on conjugacy classes of subgroups."""

    ambient: FiniteGroup
    values: Tuple[Tuple[frozenset, ChromLevel], ...]  # keyed by class reps

    def value_at(self, sub) -> ChromLevel:
        elems = sub.elements if isinstance(sub, Subgroup) else frozenset(sub)
        rep = self.ambient.canonical_rep(elems)
        for key, val in self.values:
            if key == rep:
                return val
        raise AmbientMismatch("support has no value for the given class")

    def as_dict(self) -> Dict[frozenset, ChromLevel]:
        return dict(self.values)

    def leq(self, other: "ChromSupport") -> bool:
        if self.ambient != other.ambient:
            raise AmbientMismatch("supports live over different ambient groups")
        theirs = other.as_dict()
        return all(
            val.sort_key() <= theirs[key].sort_key() for key, val in self.values
        )

    def is_all_bot(self) -> bool:
        return all(val is BOT or val.is_bot for _, val in self.values)

    def rows(self):
        for key, val in self.values:
            yield display_name(self.ambient._by_elements[key]), val

    def to_json(self):
        return {
            "group": self.ambient.name,
            "classes": [
                {"subgroup": name, "value": level_to_json(val)}
                for name, val in self.rows()
            ],
        }

    def pretty(self) -> str:
        return "{" + ", ".join(
            f"{name}: {level_text(val)}" for name, val in self.rows()
        ) + "}"


class Evaluator:
    """Memoizing support evaluator for annotated expressions."""

    def __init__(self):
        self._memo = {}
        self._families = {}

    def _family(self, node):
        fam = self._families.get(id(node))
        if fam is None:
            fam = resolve_family(node.fam, node.ambient)
            self._families[id(node)] = fam
        return fam

    def value(self, node: SpectrumExpr, k_elems: frozenset) -> ChromLevel:
        if node.ambient is None:
            raise AmbientMismatch("expression must be typechecked before evaluation")
        rep = node.ambient.canonical_rep(frozenset(k_elems))
        key = (id(node), rep)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._value(node, rep)
        self._memo[key] = val
        return val

    def _value(self, node: SpectrumExpr, k: frozenset) -> ChromLevel:
        if isinstance(node, S0):
            return TOP
        if isinstance(node, Pt):
            return BOT
        if isinstance(node, En):
            return level(node.n)
        if isinstance(node, ER):
            return level(node.n) if len(k) == 1 else BOT
        if isinstance(node, EG):
            return level(2 ** (node.k - 1) * node.m) if len(k) == 1 else BOT
        if isinstance(node, EFplus):
            return TOP if self._family(node).contains(k) else BOT
        if isinstance(node, EFtilde):
            return BOT if self._family(node).contains(k) else TOP
        if isinstance(node, Atom):
            for key, val in node.support_entries:
                if key == k:
                    return val
            raise AmbientMismatch(f"atom {node.name}: no value on the given class")
        if isinstance(node, Triv):
            inner = node.child
            return self.value(inner, frozenset({inner.ambient.identity}))
        if isinstance(node, Res):
            return self.value(node.child, k)
        if isinstance(node, Ind):
            G, H = node.ambient, node.sub
            parts = []
            for g in double_coset_reps_elems(G.elements_sorted, k, H.elements):
                gi = inverse(g)
                kg = frozenset(compose(gi, compose(x, g)) for x in k)
                if kg <= H.elements:
                    parts.append(self.value(node.child, kg))
            return join_all(parts)
        if isinstance(node, Norm):
            G, H = node.ambient, node.sub
            parts = []
            for g in double_coset_reps_elems(G.elements_sorted, k, H.elements):
                gi = inverse(g)
                kg = frozenset(compose(gi, compose(x, g)) for x in k)
                parts.append(self.value(node.child, kg & H.elements))
            return meet_all(parts)
        if isinstance(node, Pull):
            return self.value(node.child, node.hom.image_elems(k))
        if isinstance(node, Smash):
            return meet(self.value(node.left, k), self.value(node.right, k))
        if isinstance(node, Wedge):
            return join(self.value(node.left, k), self.value(node.right, k))
        raise TypeError(f"cannot evaluate {type(node).__name__}")

    def support(self, node: SpectrumExpr) -> ChromSupport:
        if node.ambient is None:
            raise AmbientMismatch("expression must be typechecked before evaluation")
        reps = [cls[0] for cls in node.ambient.conjugacy_classes]
        values = tuple(
            (rep, self.value(node, rep))
            for rep in sorted(reps, key=subgroup_sort_key)
        )
        return ChromSupport(node.ambient, values)


def support(e: SpectrumExpr) -> ChromSupport:
    """Chromatic support of a typechecked expression."""
    return Evaluator().support(e)


def _common_evaluator(e1, e2):
    if e1.ambient is None or e2.ambient is None:
        raise AmbientMismatch("expressions must be typechecked first")
    if e1.ambient != e2.ambient:
        raise AmbientMismatch(
            f"ambient groups differ: {e1.ambient.name} vs {e2.ambient.name}"
        )
    return Evaluator()


def bousfield_equal(e1: SpectrumExpr, e2: SpectrumExpr) -> bool:
    """Equality of supports on every conjugacy class (chromatic-fragment equality)."""
    ev = _common_evaluator(e1, e2)
    return ev.support(e1) == ev.support(e2)


def class_leq(e1: SpectrumExpr, e2: SpectrumExpr) -> bool:
    """Pointwise comparison: every e2-acyclic is then e1-acyclic in the fragment."""
    ev = _common_evaluator(e1, e2)
    return ev.support(e1).leq(ev.support(e2))


def is_acyclic(z: SpectrumExpr, e: SpectrumExpr) -> bool:
    """Whether z lands in the acyclics of e: the pointwise meet vanishes."""
    ev = _common_evaluator(z, e)
    sz, se = ev.support(z), ev.support(e)
    return all(
        meet(val, se.as_dict()[key]).is_bot for key, val in sz.values
    )
