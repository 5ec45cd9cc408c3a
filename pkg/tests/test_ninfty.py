from __future__ import annotations

import random

import pytest

from smashlab.errors import AmbientMismatch, ClosureViolation, MissingPremise, ShapeNotCovered
from smashlab.groups import cyclic, dihedral8, subgroups, symmetric
from smashlab.ninfty import (
    ClosureVerdict,
    GSet,
    IndexingSystem,
    coinduce,
    is_admissible,
    norm_closure_check,
    preservation_propagation,
    restrict_gset,
)
from smashlab.support import is_acyclic


def sub_of_order(G, order, index=0):
    return [s for s in subgroups(G) if s.order == order][index]


# ---------------------------------------------------------------------------
# G-sets


def test_restrict_gset_examples():
    c4 = cyclic(4)
    c2 = sub_of_order(c4, 2)
    t = restrict_gset(GSet.orbit(c4, c2), c2)
    assert [len(s) for s in t.orbits] == [2, 2]  # two trivial orbits
    t = restrict_gset(GSet.orbit(c4, c4.trivial_subgroup()), c2)
    assert [len(s) for s in t.orbits] == [1, 1]  # two free orbits
    s4 = symmetric(4)
    d8 = s4.subgroup(dihedral8().elements)
    t = restrict_gset(GSet.orbit(s4, s4.whole_subgroup()), d8)
    assert t.orbits == (d8.elements,)  # one fixed point


def test_restrict_gset_preserves_cardinality():
    rng = random.Random(13)
    for G in (symmetric(4), dihedral8(), cyclic(8)):
        subs = subgroups(G)
        for _ in range(12):
            orbits = [rng.choice(subs) for _ in range(rng.randint(1, 3))]
            t = GSet.make(G, orbits)
            k = rng.choice(subs)
            assert restrict_gset(t, k).size == t.size


def test_restrict_counts_match_element_action():
    # |K\G/H| many orbits, with stabilizer orders |K meet gHg^-1|
    G = symmetric(3)
    k = sub_of_order(G, 2)
    h = sub_of_order(G, 2, 1)
    t = restrict_gset(GSet.orbit(G, h), k)
    assert sorted(len(s) for s in t.orbits) == [1, 2]


# ---------------------------------------------------------------------------
# indexing systems


def test_trivial_and_complete_systems():
    g = cyclic(4)
    triv = IndexingSystem.trivial(g)
    comp = IndexingSystem.complete(g)
    assert triv.pairs < comp.pairs
    triv.validate()
    comp.validate()
    assert comp.is_complete() and not triv.is_complete()


def test_validation_rejects_unclosed_data():
    g = cyclic(4)
    c2 = sub_of_order(g, 2)
    with pytest.raises(ClosureViolation):
        IndexingSystem.from_pairs(
            g, [(g.whole_subgroup(), g.trivial_subgroup())]
        )  # missing the (C2, e) restriction and the diagonal


def test_generate_closes_under_restriction_and_conjugation():
    s4 = symmetric(4)
    d8 = s4.subgroup(dihedral8().elements)
    system = IndexingSystem.generate(
        s4, [(s4.whole_subgroup(), d8)]
    )
    system.validate()
    assert system.admits(s4.whole_subgroup(), d8)
    # conjugates of restricted orbits show up
    assert len(system.pairs) > 31


def test_is_admissible():
    g = cyclic(4)
    c2 = sub_of_order(g, 2)
    triv = IndexingSystem.trivial(g)
    comp = IndexingSystem.complete(g)
    free = GSet.orbit(c2.as_group(), c2.as_group().trivial_subgroup())
    fixed = GSet.orbit(c2.as_group(), c2.as_group().whole_subgroup())
    assert is_admissible(triv, c2, fixed)
    assert not is_admissible(triv, c2, free)
    assert is_admissible(comp, c2, free)


# ---------------------------------------------------------------------------
# coinduction


@pytest.mark.parametrize("group_builder", [lambda: cyclic(4), lambda: symmetric(3), lambda: symmetric(4)])
def test_coinduce_from_trivial_subgroup_is_complete(group_builder):
    G = group_builder()
    H = G.trivial_subgroup()
    out = coinduce(IndexingSystem.trivial(H.as_group()), H, G)
    assert out.is_complete()


def test_coinduce_c4_from_c2():
    c4 = cyclic(4)
    c2 = sub_of_order(c4, 2)
    h_group = c2.as_group()
    full = IndexingSystem.complete(h_group)
    out = coinduce(full, c2, c4)
    assert out.is_complete()
    # with only trivial norms downstairs, C4/C2 stays admissible (restriction
    # to C2 is a pair of fixed points) but C4/e and C2/e do not appear
    out2 = coinduce(IndexingSystem.trivial(h_group), c2, c4)
    assert out2.admits(c4.whole_subgroup(), c2)
    assert not out2.admits(c4.whole_subgroup(), c4.trivial_subgroup())
    assert not out2.admits(c2, c4.trivial_subgroup())
    out2.validate()


def test_coinduce_monotone_randomized():
    rng = random.Random(31337)
    pool = [cyclic(4), symmetric(3), dihedral8(), cyclic(8)]
    cases = 0
    while cases < 50:
        G = rng.choice(pool)
        H = rng.choice([s for s in subgroups(G) if not s.is_trivial])
        h_group = H.as_group()
        h_subs = subgroups(h_group)
        seeds1 = [
            (a, b)
            for a in h_subs
            for b in h_subs
            if b.elements <= a.elements and rng.random() < 0.2
        ]
        extra = [
            (a, b)
            for a in h_subs
            for b in h_subs
            if b.elements <= a.elements and rng.random() < 0.2
        ]
        small = IndexingSystem.generate(h_group, seeds1)
        large = IndexingSystem.generate(h_group, seeds1 + extra)
        assert small.pairs <= large.pairs
        out_small = coinduce(small, H, G)
        out_large = coinduce(large, H, G)
        assert out_small.pairs <= out_large.pairs
        cases += 1


def test_coinduce_of_complete_is_complete_randomized():
    rng = random.Random(7)
    for G in (cyclic(8), symmetric(3), dihedral8()):
        for H in subgroups(G):
            out = coinduce(IndexingSystem.complete(H.as_group()), H, G)
            assert out.is_complete()


def test_coinduce_ambient_checks():
    c4 = cyclic(4)
    c2 = sub_of_order(c4, 2)
    with pytest.raises(AmbientMismatch):
        coinduce(IndexingSystem.complete(cyclic(2)), c2, c4)
    with pytest.raises(AmbientMismatch):
        coinduce(
            IndexingSystem.complete(c2.as_group()),
            sub_of_order(cyclic(8), 2),
            c4,
        )


# ---------------------------------------------------------------------------
# norm closure


def test_closure_borel_class(check):
    verdict = norm_closure_check(
        check("EF[triv]@C(2)"), IndexingSystem.complete(cyclic(2))
    )
    assert verdict.status == "Closed"
    assert verdict.citations == ("Thm 5.2",)


def test_closure_unit_class(check):
    for group in ("C(4)", "S(3)"):
        g = check(f"S0@{group}")
        verdict = norm_closure_check(g, IndexingSystem.complete(g.ambient))
        assert verdict.status == "Closed"


def test_closure_tilde_fails_with_verified_counterexample(check):
    e = check("tEF[triv]@C(2)")
    verdict = norm_closure_check(e, IndexingSystem.complete(cyclic(2)))
    assert verdict.status == "NotClosed"
    assert verdict.pair == ("C2", "e")
    assert verdict.at_subgroup == "C2"
    ce = verdict.counterexample
    assert ce is not None
    assert ce.acyclic_before and not ce.acyclic_after_norm
    assert ce.expr_text == "EF[triv]@C(2)"


def test_closure_trivial_system_always_closed(check):
    for text in ("tEF[triv]@C(4)", "EF[triv]@S(3)", "tEF[proper]@S(4)"):
        e = check(text)
        verdict = norm_closure_check(e, IndexingSystem.trivial(e.ambient))
        assert verdict.status == "Closed"


def test_closure_level_support_unknown(check):
    e = check("triv[C(2)](E(1))")
    verdict = norm_closure_check(e, IndexingSystem.complete(cyclic(2)))
    assert verdict.status == "Unknown"
    assert "Thm 5.2" in verdict.citations


def test_every_not_closed_has_engine_checked_counterexample(check):
    from smashlab.expr import Res, annotate
    from smashlab.groups import display_name

    pool_texts = ["C(4)", "S(3)", "sub[S(4)]{(1,2,3,4),(1,3)}"]
    found = 0
    for group_text in pool_texts:
        for fam in ("triv", "proper"):
            for shape in ("EF", "tEF"):
                e = check(f"{shape}[{fam}]@{group_text}")
                verdict = norm_closure_check(e, IndexingSystem.complete(e.ambient))
                if verdict.status != "NotClosed":
                    continue
                found += 1
                ce = verdict.counterexample
                assert ce is not None
                assert ce.acyclic_before and not ce.acyclic_after_norm
                h_sub = next(
                    s
                    for s in e.ambient.subgroup_list
                    if display_name(s) == verdict.pair[0]
                )
                res_e = annotate(Res(h_sub, e))
                assert is_acyclic(ce.expr, res_e)
    assert found >= 3


# ---------------------------------------------------------------------------
# propagation


def test_propagation_eg_gives_commutative_rings(check):
    e = check("EG(2,1)")
    statement = preservation_propagation(e, IndexingSystem.trivial(e.ambient))
    assert statement.complete
    assert "commutative ring" in statement.preserves
    assert "Cor 5.8" in statement.citations
    assert "Ex 5.9" in statement.citations


def test_propagation_trivial_h_completes_any_input(check):
    for group in ("C(4)", "S(3)"):
        e = check(f"ind[{group}](E(1))")
        statement = preservation_propagation(
            e, IndexingSystem.trivial(e.ambient)
        )
        assert statement.complete
        assert statement.premise.startswith("automatic")
        assert statement.new_norms  # strictly more norms than the trivial system


def test_propagation_needs_premise(check):
    e = check("ind[C(4)](tEF[triv]@C(2))")
    with pytest.raises(MissingPremise):
        preservation_propagation(e, IndexingSystem.trivial(e.ambient))
    statement = preservation_propagation(
        e, IndexingSystem.trivial(e.ambient), assert_premise=True
    )
    assert statement.premise == "asserted by the caller"


def test_propagation_rejects_unclosed_premise(check):
    e = check("ind[C(4)](tEF[triv]@C(2))")
    bad = ClosureVerdict("NotClosed", ("Thm 5.2",))
    with pytest.raises(MissingPremise):
        preservation_propagation(e, IndexingSystem.trivial(e.ambient), premise=bad)


def test_propagation_shape(check):
    with pytest.raises(ShapeNotCovered):
        preservation_propagation(
            check("S0@C(4)"), IndexingSystem.trivial(cyclic(4))
        )
