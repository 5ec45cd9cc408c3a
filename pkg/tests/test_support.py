from __future__ import annotations

import random

import pytest

from smashlab.chrom import BOT, TOP, join, level, meet
from smashlab.errors import AmbientMismatch
from smashlab.expr import (
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
    Triv,
    Wedge,
    annotate,
)
from smashlab.groups import (
    Homomorphism,
    compose,
    cyclic,
    dihedral8,
    direct_product,
    inverse,
    subgroups,
    symmetric,
)
from smashlab.support import Evaluator, bousfield_equal, class_leq, is_acyclic, support


def as_map(supp):
    """Support keyed by subgroup order lists for easy literal comparison."""
    out = {}
    for key, val in supp.values:
        out[tuple(sorted(map(len, [key])))[0], key] = val
    return out


def values_by_order(supp):
    """For ambients whose classes are determined by order (cyclic groups)."""
    return {len(key): val for key, val in supp.values}


def test_er_support(check):
    supp = support(check("ER(1)"))
    assert values_by_order(supp) == {1: level(1), 2: BOT}


def test_eg_support(check):
    supp = support(check("EG(3,1)"))
    assert values_by_order(supp) == {1: level(4), 2: BOT, 4: BOT, 8: BOT}


def test_triv_support(check):
    supp = support(check("triv[C(2)](E(0))"))
    assert values_by_order(supp) == {1: level(0), 2: level(0)}


def test_norm_s3_support(check):
    supp = support(check("norm[S(3)](tEF[triv]@C(2))"))
    assert {name: val for name, val in supp.rows()} == {
        "e": BOT,
        "C2": BOT,
        "C3": BOT,
        "S3": TOP,
    }


def test_ind_c4_support(check):
    supp = support(check("ind[C(4)](tEF[triv]@C(2))"))
    assert values_by_order(supp) == {1: BOT, 2: TOP, 4: BOT}


def test_bousfield_equal_er_ind(check):
    for n in range(5):
        assert bousfield_equal(check(f"ER({n})"), check(f"ind[C(2)](E({n}))"))


def test_bousfield_equal_prop_3_24_reduction(check):
    d8 = "sub[S(4)]{(1,2,3,4),(1,3)}"
    c4 = "sub[S(4)]{(1,2,3,4)}"
    lhs = check(
        f"res[{c4}](res[{d8}](ind[S(4)](tEF[famsub({c4})]@{d8})))"
    )
    rhs = check("ind[C(4)](tEF[triv]@C(2))")
    assert bousfield_equal(lhs, rhs)


def test_bousfield_unequal_levels(check):
    assert not bousfield_equal(check("triv[C(2)](E(1))"), check("triv[C(2)](E(2))"))


def test_class_leq(check):
    assert class_leq(check("EG(3,1)"), check("EG(3,2)"))
    assert class_leq(check("pt@C(8)"), check("EG(3,2)"))
    assert not class_leq(
        check("atom t@C(2){e: top, C(2): top}"),
        check("atom b@C(2){e: bot, C(2): bot}"),
    )


def test_class_leq_ambient_mismatch(check):
    with pytest.raises(AmbientMismatch):
        class_leq(check("S0@C(2)"), check("S0@C(4)"))


def test_is_acyclic_examples(check):
    assert is_acyclic(check("EF[triv]@C(2)"), check("tEF[triv]@C(2)"))
    assert not is_acyclic(check("S0"), check("S0"))
    d8 = "sub[S(4)]{(1,2,3,4),(1,3)}"
    z = check(f"tEF[famsub({d8})]@S(4)")
    e = check(f"ind[S(4)](S0@{d8})")
    assert is_acyclic(z, e)


def test_wedge_join_smash_meet_pointwise(check):
    e1 = check("atom a@C(2){e: 1, C(2): top}")
    e2 = check("atom b@C(2){e: 3, C(2): bot}")
    both = annotate(Wedge(e1, e2))
    sm = annotate(Smash(e1, e2))
    assert values_by_order(support(both)) == {1: level(3), 2: TOP}
    assert values_by_order(support(sm)) == {1: level(1), 2: BOT}


def test_wedge_with_self_and_smash_with_pt(check):
    rng = random.Random(5)
    for _ in range(10):
        e = _random_typed_expr(rng, cyclic(4), 3)
        assert bousfield_equal(annotate(Wedge(e, e)), e)
        smashed = annotate(Smash(e, Pt(at=e.ambient)))
        assert support(smashed).is_all_bot()


def test_norm_of_restricted_inflation_is_constant(check):
    e = check("norm[C(4)](res[C(2)](triv[C(2)](E(2))))")
    assert values_by_order(support(e)) == {1: level(2), 2: level(2), 4: level(2)}
    assert bousfield_equal(e, check("triv[C(4)](E(2))"))


def test_ind_from_proper_subgroup_kills_top_class(check):
    for text in ("ind[C(4)](S0@C(2))", "ind[S(4)](E(1))", "ind[C(8)](ER(1))"):
        e = check(text)
        supp = support(e)
        whole = e.ambient.elements
        assert supp.value_at(whole) == BOT


def test_pull_along_quotient(check):
    e = check("pull[hom[C(4)->C(2)]{(1,2,3,4)->(1,2)}](tEF[triv]@C(2))")
    # kernel classes see the trivial-subgroup value of the target
    assert values_by_order(support(e)) == {1: BOT, 2: BOT, 4: TOP}


def test_evaluation_requires_annotation():
    with pytest.raises(AmbientMismatch):
        support(En(1))


# ---------------------------------------------------------------------------
# randomized oracle equivalence for the induction and norm rules


def _groups_pool():
    return [
        cyclic(4),
        cyclic(8),
        symmetric(3),
        symmetric(4),
        dihedral8(),
        direct_product(cyclic(2), cyclic(2)),
    ]


def _random_family_spec(rng, G):
    kind = rng.choice(["triv", "proper", "all", "famsub"])
    if kind == "famsub":
        return FamilySpec("famsub", (rng.choice(subgroups(G)),))
    return FamilySpec(kind)


def _parents_of(G, pool):
    """Pool groups containing a subgroup whose group view is exactly G."""
    out = []
    for parent in pool:
        if parent.order <= G.order or parent.degree != G.degree:
            continue
        for sub in parent.subgroup_list:
            if sub.order == G.order and sub.as_group() == G:
                out.append((parent, sub))
    return out


def _random_typed_expr(rng, G, depth):
    """A typechecked expression with ambient exactly G."""
    if depth == 0:
        roll = rng.randrange(6)
        if roll == 0:
            return annotate(S0(at=G))
        if roll == 1:
            return annotate(Pt(at=G))
        if roll == 2:
            return annotate(EFplus(_random_family_spec(rng, G), G))
        if roll == 3:
            return annotate(EFtilde(_random_family_spec(rng, G), G))
        if roll == 4:
            return annotate(Triv(G, En(rng.randrange(4))))
        levels = [BOT, level(0), level(1), level(2), level(3), TOP]
        entries = tuple(
            (G._by_elements[cls[0]], rng.choice(levels))
            for cls in G.conjugacy_classes
        )
        return annotate(Atom(f"a{rng.randrange(1000)}", G, entries))
    roll = rng.randrange(5)
    if roll == 0:
        parents = _parents_of(G, _groups_pool())
        if parents:
            parent, sub = rng.choice(parents)
            inner = _random_typed_expr(rng, parent, depth - 1)
            return annotate(Res(sub, inner))
        roll = rng.randrange(1, 5)
    if roll == 1:
        sub = rng.choice(subgroups(G))
        return annotate(Ind(G, _random_typed_expr(rng, sub.as_group(), depth - 1)))
    if roll == 2:
        sub = rng.choice(subgroups(G))
        return annotate(Norm(G, _random_typed_expr(rng, sub.as_group(), depth - 1)))
    left = _random_typed_expr(rng, G, depth - 1)
    right = _random_typed_expr(rng, G, rng.randrange(depth))
    node = Smash(left, right) if roll == 3 else Wedge(left, right)
    return annotate(node)


def _double_coset_partition(universe, k_elems, h_elems):
    """Independent element-level partition of K\\U/H."""
    remaining = set(universe)
    parts = []
    while remaining:
        g = min(remaining)
        coset = {compose(k, compose(g, h)) for k in k_elems for h in h_elems}
        parts.append(coset)
        remaining -= coset
    return parts


def _conjugated_operand(child, g, gh_group):
    """The operand conjugated by g, as a pullback along x -> g^{-1} x g."""
    gi = inverse(g)
    conj = Homomorphism(
        gh_group,
        child.ambient,
        [(x, compose(gi, compose(x, g))) for x in gh_group.generators],
    )
    return Pull(conj, child, ambient=gh_group)


def _oracle_ind_value(e, K):
    """Expand the restriction to K as a wedge of inductions, then evaluate."""
    G, H, child = e.ambient, e.sub, e.child
    k_group = K.as_group()
    total = BOT
    for coset in _double_coset_partition(G.elements_sorted, K.elements, H.elements):
        g = min(coset)
        gh = frozenset(compose(g, compose(h, inverse(g))) for h in H.elements)
        gh_group = G.subgroup(gh).as_group()
        meet_elems = K.elements & gh
        conj_child = _conjugated_operand(child, g, gh_group)
        factor = annotate(
            Ind(k_group, Res(gh_group.subgroup(meet_elems), conj_child))
        )
        total = join(total, Evaluator().value(factor, K.elements))
    return total


def _oracle_norm_value(e, K, rng):
    """Element-by-element double cosets; a random member represents each."""
    G, H, child = e.ambient, e.sub, e.child
    ev = Evaluator()
    total = TOP
    for coset in _double_coset_partition(G.elements_sorted, K.elements, H.elements):
        g = rng.choice(sorted(coset))
        gi = inverse(g)
        kg = frozenset(compose(gi, compose(x, g)) for x in K.elements)
        total = meet(total, ev.value(child, kg & H.elements))
    return total


def test_induction_rule_oracle_equivalence():
    rng = random.Random(424242)
    pool = _groups_pool()
    cases = 0
    while cases < 110:
        G = rng.choice(pool)
        H = rng.choice(subgroups(G))
        e = annotate(Ind(G, _random_typed_expr(rng, H.as_group(), rng.randrange(4))))
        ev = Evaluator()
        for K in G.class_reps():
            assert ev.value(e, K.elements) == _oracle_ind_value(e, K)
        cases += 1


def test_norm_rule_oracle_equivalence():
    rng = random.Random(171717)
    pool = _groups_pool()
    cases = 0
    while cases < 110:
        G = rng.choice(pool)
        H = rng.choice(subgroups(G))
        e = annotate(Norm(G, _random_typed_expr(rng, H.as_group(), rng.randrange(4))))
        ev = Evaluator()
        for K in G.class_reps():
            assert ev.value(e, K.elements) == _oracle_norm_value(e, K, rng)
        cases += 1


def test_equalities_are_equivalence_and_order(check):
    rng = random.Random(99)
    exprs = [_random_typed_expr(rng, cyclic(4), 2) for _ in range(8)]
    for a in exprs:
        assert bousfield_equal(a, a)
        assert class_leq(a, a)
        for b in exprs:
            if bousfield_equal(a, b):
                assert bousfield_equal(b, a)
                assert class_leq(a, b) and class_leq(b, a)
            if class_leq(a, b) and class_leq(b, a):
                assert bousfield_equal(a, b)
