from __future__ import annotations

import pytest

from smashlab.errors import (
    AmbientMismatch,
    HomTargetMismatch,
    NotASubgroup,
    SessionPrimeError,
)
from smashlab.expr import Pull, annotate, resolve_subgroup_in, strip_inserted, to_text
from smashlab.groups import cyclic, dihedral8, symmetric
from smashlab.parser import parse_expr
from smashlab.support import support


def test_ind_annotates_with_target_ambient(env):
    d8 = "sub[S(4)]{(1,2,3,4),(1,3)}"
    e = annotate(parse_expr(f"ind[S(4)](S0@{d8})", env))
    assert e.ambient == symmetric(4)
    assert e.sub.order == 8


def test_smash_ambient_mismatch(env):
    with pytest.raises(AmbientMismatch):
        annotate(parse_expr("S0@C(2) ^ S0@C(4)", env))


def test_pull_sets_source_ambient(env):
    e = annotate(
        parse_expr("pull[hom[C(4)->C(2)]{(1,2,3,4)->(1,2)}](tEF[triv]@C(2))", env)
    )
    assert e.ambient == cyclic(4)


def test_pull_target_mismatch(env):
    with pytest.raises(HomTargetMismatch):
        annotate(
            parse_expr("pull[hom[C(4)->C(2)]{(1,2,3,4)->(1,2)}](S0@C(4))", env)
        )


def test_res_not_a_subgroup(env):
    with pytest.raises(NotASubgroup):
        annotate(parse_expr("res[C(3)](S0@C(4))", env))


def test_ambiguous_cyclic_resolution(env):
    # S4 has two conjugacy classes of order-2 cyclic subgroups, so a bare
    # C(2) with no literal embedding... (1,2) embeds literally, so this works
    e = annotate(parse_expr("ind[S(4)](tEF[triv]@C(2))", env))
    assert e.sub.order == 2


def test_cyclic_transport_inserts_pullback(env):
    e = annotate(parse_expr("ind[C(4)](tEF[triv]@C(2))", env))
    assert isinstance(e.child, Pull) and e.child.inserted
    stripped = strip_inserted(e)
    assert to_text(stripped) == "ind[C(4)](tEF[triv]@C(2))"


def test_triv_rejects_equivariant_operand(env):
    with pytest.raises(AmbientMismatch):
        annotate(parse_expr("triv[C(4)](S0@C(2))", env))


def test_eg_refuses_odd_prime(env):
    with pytest.raises(SessionPrimeError):
        annotate(parse_expr("EG(2,1)", env), prime=3)


def test_atom_support_must_be_total(env):
    with pytest.raises(AmbientMismatch):
        annotate(parse_expr("atom a@C(4){e: top}", env))
    with pytest.raises(AmbientMismatch):
        annotate(parse_expr("atom a@C(2){e: top, e: bot, C(2): bot}", env))


def test_typechecking_is_idempotent(env):
    for text in (
        "ind[C(4)](tEF[triv]@C(2))",
        "norm[S(3)](tEF[triv]@C(2)) v triv[S(3)](E(1))",
        "res[sub[S(4)]{(1,2,3,4),(1,3)}](ind[S(4)](E(2)))",
    ):
        once = annotate(parse_expr(text, env))
        twice = annotate(once)
        assert once.ambient == twice.ambient
        assert support(once) == support(twice)


def test_resolution_prefers_literal_embedding():
    s4 = symmetric(4)
    c2 = cyclic(2)
    sub = resolve_subgroup_in(s4, c2)
    # (1,2) extends by fixed points and lands on the transposition class
    assert any(g[:2] == (1, 0) for g in sub.elements)


def test_resolution_unique_cyclic():
    d8 = dihedral8()
    sub = resolve_subgroup_in(d8, cyclic(4))
    assert sub.order == 4 and sub.is_cyclic()
    with pytest.raises(NotASubgroup):
        resolve_subgroup_in(cyclic(4), cyclic(3))
