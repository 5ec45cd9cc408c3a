"""Syntax trees for formal equivariant spectrum expressions.

Nodes are immutable.  ``annotate`` returns a fresh tree in which every node
carries its ambient group and all binder references are resolved to concrete
subgroups; when an operand's ambient group is merely isomorphic to the
resolved subgroup (a cyclic literal like ``C(2)`` used inside ``C(4)``), the
operand is transported by inserting a pullback along the canonical
isomorphism rather than by rewriting the subtree.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

from .chrom import ChromLevel
from .errors import (
    AmbientMismatch,
    HomTargetMismatch,
    NotASubgroup,
    SessionPrimeError,
)
from .groups import (
    DEFAULT_ORDER_CAP,
    Family,
    FiniteGroup,
    Homomorphism,
    Subgroup,
    closure_of,
    cyclic,
    extend_perm,
    family_all,
    family_from_subgroups,
    family_generated,
    family_proper,
    family_trivial,
    subgroup_literal,
    subgroup_sort_key,
)

GroupRef = Union[FiniteGroup, Subgroup]


def group_of(ref: GroupRef) -> FiniteGroup:
    return ref.as_group() if isinstance(ref, Subgroup) else ref


def _ref_sort_key(ref: GroupRef):
    elems = ref.elements
    return (len(elems), tuple(sorted(elems)))


# ---------------------------------------------------------------------------
# nodes


class SpectrumExpr:
    """Base class for all expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class FamilySpec:
    """Unresolved family reference, kept symbolic so trees print faithfully."""

    kind: str  # "triv" | "proper" | "all" | "famsub" | "explicit"
    args: Tuple[GroupRef, ...] = ()


@dataclass(frozen=True)
class S0(SpectrumExpr):
    at: Optional[GroupRef] = None
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Pt(SpectrumExpr):
    at: Optional[GroupRef] = None
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class En(SpectrumExpr):
    n: int
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class ER(SpectrumExpr):
    n: int
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class EG(SpectrumExpr):
    k: int
    m: int
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class EFplus(SpectrumExpr):
    fam: FamilySpec
    at: GroupRef = None
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class EFtilde(SpectrumExpr):
    fam: FamilySpec
    at: GroupRef = None
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Atom(SpectrumExpr):
    name: str
    at: GroupRef = None
    entries: Tuple[Tuple[GroupRef, ChromLevel], ...] = ()
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)
    support_entries: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda kv: _ref_sort_key(kv[0])))
        object.__setattr__(self, "entries", ordered)


@dataclass(frozen=True)
class Triv(SpectrumExpr):
    group: GroupRef
    child: SpectrumExpr
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Res(SpectrumExpr):
    sub_ref: GroupRef
    child: SpectrumExpr
    sub: Optional[Subgroup] = field(default=None, compare=False)
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Ind(SpectrumExpr):
    group: GroupRef
    child: SpectrumExpr
    sub: Optional[Subgroup] = field(default=None, compare=False)
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Norm(SpectrumExpr):
    group: GroupRef
    child: SpectrumExpr
    sub: Optional[Subgroup] = field(default=None, compare=False)
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Pull(SpectrumExpr):
    hom: Homomorphism
    child: SpectrumExpr
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)
    inserted: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class Smash(SpectrumExpr):
    left: SpectrumExpr
    right: SpectrumExpr
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


@dataclass(frozen=True)
class Wedge(SpectrumExpr):
    left: SpectrumExpr
    right: SpectrumExpr
    ambient: Optional[FiniteGroup] = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# pretty printer


def group_text(ref: GroupRef) -> str:
    if isinstance(ref, Subgroup):
        return subgroup_literal(ref)
    return ref.literal


def _key_text(ref: GroupRef) -> str:
    if isinstance(ref, FiniteGroup) and ref.order == 1:
        return "e"
    return group_text(ref)


def family_text(spec: FamilySpec) -> str:
    if spec.kind in ("triv", "proper", "all"):
        return spec.kind
    if spec.kind == "famsub":
        return f"famsub({group_text(spec.args[0])})"
    return "{" + ",".join(group_text(r) for r in spec.args) + "}"


def _level_src(a: ChromLevel) -> str:
    if a.kind == "level":
        return str(a.n)
    return a.kind


def hom_text(f: Homomorphism) -> str:
    pairs = ",".join(
        f"{_perm_src(g, f.source.degree)}->{_perm_src(v, f.target.degree)}"
        for g, v in f.gen_images
    )
    return f"hom[{f.source.literal}->{f.target.literal}]{{{pairs}}}"


def _perm_src(p, degree) -> str:
    from .groups import format_perm

    return format_perm(p)


def to_text(e: SpectrumExpr) -> str:
    return _pp(e, 0)


def _pp(e: SpectrumExpr, min_prec: int) -> str:
    if isinstance(e, Wedge):
        text, prec = f"{_pp(e.left, 1)} v {_pp(e.right, 2)}", 1
    elif isinstance(e, Smash):
        text, prec = f"{_pp(e.left, 2)} ^ {_pp(e.right, 3)}", 2
    else:
        text, prec = _pp_atom(e), 3
    if prec < min_prec:
        return f"({text})"
    return text


def _pp_atom(e: SpectrumExpr) -> str:
    if isinstance(e, S0):
        return "S0" if e.at is None else f"S0@{group_text(e.at)}"
    if isinstance(e, Pt):
        return "pt" if e.at is None else f"pt@{group_text(e.at)}"
    if isinstance(e, En):
        return f"E({e.n})"
    if isinstance(e, ER):
        return f"ER({e.n})"
    if isinstance(e, EG):
        return f"EG({e.k},{e.m})"
    if isinstance(e, EFplus):
        return f"EF[{family_text(e.fam)}]@{group_text(e.at)}"
    if isinstance(e, EFtilde):
        return f"tEF[{family_text(e.fam)}]@{group_text(e.at)}"
    if isinstance(e, Atom):
        body = ", ".join(
            f"{_key_text(k)}: {_level_src(v)}" for k, v in e.entries
        )
        return f"atom {e.name}@{group_text(e.at)}{{{body}}}"
    if isinstance(e, Triv):
        return f"triv[{group_text(e.group)}]({to_text(e.child)})"
    if isinstance(e, Res):
        return f"res[{group_text(e.sub_ref)}]({to_text(e.child)})"
    if isinstance(e, Ind):
        return f"ind[{group_text(e.group)}]({to_text(e.child)})"
    if isinstance(e, Norm):
        return f"norm[{group_text(e.group)}]({to_text(e.child)})"
    if isinstance(e, Pull):
        return f"pull[{hom_text(e.hom)}]({to_text(e.child)})"
    raise TypeError(f"cannot print {type(e).__name__}")


# ---------------------------------------------------------------------------
# subgroup resolution


def resolve_subgroup_in(parent: FiniteGroup, ref: GroupRef) -> Subgroup:
    """Resolve a group reference as a concrete subgroup of ``parent``.

    Literal containment (after extending by fixed points) wins; a cyclic
    reference with no literal embedding falls back to the unique conjugacy
    class of cyclic subgroups of its order, when there is exactly one.
    """
    if isinstance(ref, Subgroup):
        if ref.parent == parent:
            return parent.subgroup(ref.elements)
        if ref.parent.degree <= parent.degree:
            elems = frozenset(
                extend_perm(g, parent.degree) for g in ref.elements
            )
            if elems <= parent.elements:
                return parent.subgroup(elems)
        raise NotASubgroup(
            f"{subgroup_literal(ref)} does not resolve inside {parent.name}"
        )
    if ref.order == 1:
        return parent.trivial_subgroup()
    if ref.degree <= parent.degree:
        elems = frozenset(extend_perm(g, parent.degree) for g in ref.elements)
        if elems <= parent.elements:
            return parent.subgroup(elems)
    if _is_cyclic_group(ref):
        matches = [
            cls
            for cls in parent.conjugacy_classes
            if len(cls[0]) == ref.order
            and parent._by_elements[cls[0]].is_cyclic()
        ]
        if len(matches) == 1:
            return parent._by_elements[matches[0][0]]
        if len(matches) > 1:
            raise NotASubgroup(
                f"{ref.name} is ambiguous inside {parent.name}: "
                f"{len(matches)} conjugacy classes of cyclic subgroups of order {ref.order}"
            )
    raise NotASubgroup(f"{ref.name} does not resolve inside {parent.name}")


def _is_cyclic_group(G: FiniteGroup) -> bool:
    return any(
        len(closure_of((g,), G.degree)) == G.order for g in G.elements
    )


def _min_generator(G: FiniteGroup):
    for g in G.elements_sorted:
        if len(closure_of((g,), G.degree)) == G.order:
            return g
    raise NotASubgroup(f"{G.name} is not cyclic")


def iso_to_abstract(sub: Subgroup, abstract: FiniteGroup) -> Optional[Homomorphism]:
    """Isomorphism ``sub.as_group() -> abstract``, or None when they coincide."""
    concrete = sub.as_group()
    if concrete == abstract:
        return None
    if abstract.degree <= concrete.degree:
        images = []
        ok = True
        for g in concrete.generators:
            if all(g[i] == i for i in range(abstract.degree, len(g))) and all(
                g[i] < abstract.degree for i in range(abstract.degree)
            ):
                trimmed = tuple(g[: abstract.degree])
                if trimmed in abstract.elements:
                    images.append((g, trimmed))
                    continue
            ok = False
            break
        if ok:
            return Homomorphism(concrete, abstract, images)
    if (
        concrete.order == abstract.order
        and _is_cyclic_group(concrete)
        and _is_cyclic_group(abstract)
    ):
        return Homomorphism(
            concrete, abstract, [(_min_generator(concrete), _min_generator(abstract))]
        )
    raise NotASubgroup(
        f"cannot transport expressions from {abstract.name} to {concrete.name}"
    )


# ---------------------------------------------------------------------------
# families


def resolve_family(spec: FamilySpec, ambient: FiniteGroup) -> Family:
    if spec.kind == "triv":
        return family_trivial(ambient)
    if spec.kind == "proper":
        return family_proper(ambient)
    if spec.kind == "all":
        return family_all(ambient)
    if spec.kind == "famsub":
        return family_generated(resolve_subgroup_in(ambient, spec.args[0]))
    if spec.kind == "explicit":
        return family_from_subgroups(
            ambient, [resolve_subgroup_in(ambient, r) for r in spec.args]
        )
    raise ValueError(f"unknown family kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# typechecking


_builtins = {}


def builtin_cyclic(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    key = (n, order_cap)
    if key not in _builtins:
        _builtins[key] = cyclic(n, order_cap=order_cap)
    return _builtins[key]


def builtin_trivial() -> FiniteGroup:
    return builtin_cyclic(1)


class Typechecker:
    def __init__(self, prime: int = 2, order_cap: int = DEFAULT_ORDER_CAP):
        self.prime = prime
        self.order_cap = order_cap

    def annotate(self, e: SpectrumExpr) -> SpectrumExpr:
        if isinstance(e, S0):
            amb = group_of(e.at) if e.at is not None else builtin_trivial()
            return replace(e, ambient=amb)
        if isinstance(e, Pt):
            amb = group_of(e.at) if e.at is not None else builtin_trivial()
            return replace(e, ambient=amb)
        if isinstance(e, En):
            return replace(e, ambient=builtin_trivial())
        if isinstance(e, ER):
            return replace(e, ambient=builtin_cyclic(2, self.order_cap))
        if isinstance(e, EG):
            if self.prime != 2:
                raise SessionPrimeError(
                    f"EG({e.k},{e.m}) is only available at the prime 2 "
                    f"(session prime is {self.prime})"
                )
            if e.k < 1:
                raise AmbientMismatch("EG needs a positive first argument")
            return replace(e, ambient=builtin_cyclic(2 ** e.k, self.order_cap))
        if isinstance(e, (EFplus, EFtilde)):
            amb = group_of(e.at)
            resolve_family(e.fam, amb)  # validates the reference
            return replace(e, ambient=amb)
        if isinstance(e, Atom):
            amb = group_of(e.at)
            resolved = {}
            for ref, value in e.entries:
                sub = resolve_subgroup_in(amb, ref)
                rep = amb.canonical_rep(sub.elements)
                if rep in resolved and resolved[rep] != value:
                    raise AmbientMismatch(
                        f"atom {e.name}: conflicting values on the class of "
                        f"{subgroup_literal(amb._by_elements[rep])}"
                    )
                resolved[rep] = value
            missing = [
                cls[0]
                for cls in amb.conjugacy_classes
                if cls[0] not in resolved
            ]
            if missing:
                raise AmbientMismatch(
                    f"atom {e.name}: support is not total on {amb.name} "
                    f"({len(missing)} conjugacy classes missing)"
                )
            entries = tuple(
                (rep, resolved[rep])
                for rep in sorted(resolved, key=subgroup_sort_key)
            )
            return replace(e, ambient=amb, support_entries=entries)
        if isinstance(e, Triv):
            child = self.annotate(e.child)
            if child.ambient.order != 1:
                raise AmbientMismatch(
                    "triv expects a nonequivariant operand, got ambient "
                    + child.ambient.name
                )
            return replace(e, child=child, ambient=group_of(e.group))
        if isinstance(e, Res):
            child = self.annotate(e.child)
            sub = resolve_subgroup_in(child.ambient, e.sub_ref)
            return replace(e, child=child, sub=sub, ambient=sub.as_group())
        if isinstance(e, (Ind, Norm)):
            child = self.annotate(e.child)
            target = group_of(e.group)
            sub = resolve_subgroup_in(target, child.ambient)
            iso = iso_to_abstract(sub, child.ambient)
            if iso is not None:
                child = Pull(hom=iso, child=child, ambient=sub.as_group(),
                             inserted=True)
            return replace(e, child=child, sub=sub, ambient=target)
        if isinstance(e, Pull):
            child = self.annotate(e.child)
            if child.ambient != e.hom.target:
                raise HomTargetMismatch(
                    f"pull: operand ambient {child.ambient.name} is not the "
                    f"homomorphism target {e.hom.target.name}"
                )
            return replace(e, child=child, ambient=e.hom.source)
        if isinstance(e, (Smash, Wedge)):
            left = self.annotate(e.left)
            right = self.annotate(e.right)
            if left.ambient != right.ambient:
                raise AmbientMismatch(
                    f"{type(e).__name__.lower()}: ambients "
                    f"{left.ambient.name} and {right.ambient.name} differ"
                )
            return replace(e, left=left, right=right, ambient=left.ambient)
        raise TypeError(f"cannot typecheck {type(e).__name__}")


def annotate(
    e: SpectrumExpr, prime: int = 2, order_cap: int = DEFAULT_ORDER_CAP
) -> SpectrumExpr:
    """Typecheck: resolve binders and stamp every node with its ambient group."""
    return Typechecker(prime, order_cap).annotate(e)


def strip_inserted(e: SpectrumExpr) -> SpectrumExpr:
    """Drop transport pullbacks added by the typechecker, for display."""
    if isinstance(e, Pull) and e.inserted:
        return strip_inserted(e.child)
    if isinstance(e, (Triv, Res, Ind, Norm, Pull)):
        return replace(e, child=strip_inserted(e.child))
    if isinstance(e, (Smash, Wedge)):
        return replace(e, left=strip_inserted(e.left), right=strip_inserted(e.right))
    return e
