from __future__ import annotations

import itertools

import pytest

from smashlab.chrom import (
    BOT,
    TOP,
    Prime,
    join,
    leq,
    level,
    level_from_json,
    level_to_json,
    meet,
    tate_entry,
    tate_vanishes,
)
from smashlab.errors import TrivialSubgroup
from smashlab.groups import cyclic, subgroups

CHAIN = [BOT] + [level(n) for n in range(9)] + [TOP]


def test_total_order():
    for a, b in itertools.combinations(CHAIN, 2):
        assert leq(a, b) and not leq(b, a)


@pytest.mark.parametrize("op", [join, meet])
def test_associative_commutative_idempotent(op):
    for a, b, c in itertools.product(CHAIN, repeat=3):
        assert op(op(a, b), c) == op(a, op(b, c))
    for a, b in itertools.product(CHAIN, repeat=2):
        assert op(a, b) == op(b, a)
    for a in CHAIN:
        assert op(a, a) == a


def test_absorption_and_distributivity():
    for a, b in itertools.product(CHAIN, repeat=2):
        assert join(a, meet(a, b)) == a
        assert meet(a, join(a, b)) == a
    for a, b, c in itertools.product(CHAIN, repeat=3):
        assert meet(a, join(b, c)) == join(meet(a, b), meet(a, c))


def test_bounds():
    for a in CHAIN:
        assert join(BOT, a) == a
        assert meet(TOP, a) == a
        assert join(TOP, a) == TOP
        assert meet(BOT, a) == BOT


def test_monotone():
    for a, b, c in itertools.product(CHAIN, repeat=3):
        if leq(a, b):
            assert leq(join(a, c), join(b, c))
            assert leq(meet(a, c), meet(b, c))


def test_examples():
    assert join(level(1), level(3)) == level(3)
    assert meet(level(1), level(3)) == level(1)
    assert meet(level(2), TOP) == level(2)


def test_json_roundtrip():
    for a in CHAIN:
        assert level_from_json(level_to_json(a)) == a
    assert level_to_json(level(3)) == {"level": 3}
    assert level_to_json(BOT) == "bot"
    assert level_to_json(TOP) == "top"


def test_prime_validation():
    assert Prime(2).p == 2
    assert Prime(7).p == 7
    with pytest.raises(ValueError):
        Prime(6)
    with pytest.raises(ValueError):
        Prime(1)


def test_tate_oracle_table():
    c2 = cyclic(2).whole_subgroup()
    assert tate_vanishes(level(0), c2, 2)
    assert not tate_vanishes(level(1), c2, 2)
    assert not tate_vanishes(TOP, c2, 2)
    assert tate_vanishes(BOT, c2, 2)
    # p'-group entries are axioms and flagged as such
    c3 = cyclic(3).whole_subgroup()
    assert tate_vanishes(level(4), c3, 2)
    assert tate_entry(level(4), 3, 2).axiom
    assert not tate_entry(level(4), 6, 2).vanishes
    assert not tate_vanishes(TOP, c2, 2)
    assert tate_vanishes(TOP, c3, 2)


def test_tate_oracle_at_odd_prime():
    c2 = cyclic(2).whole_subgroup()
    c3 = cyclic(3).whole_subgroup()
    assert tate_vanishes(level(2), c2, 3)
    assert not tate_vanishes(level(2), c3, 3)


def test_tate_rejects_trivial_subgroup():
    e = [s for s in subgroups(cyclic(2)) if s.order == 1][0]
    with pytest.raises(TrivialSubgroup):
        tate_vanishes(level(1), e, 2)


def test_witness_strings():
    assert tate_entry(TOP, 2, 2).witness == "(S^0)^{tC2} ≄ *"
    assert tate_entry(level(1), 2, 2).witness == "(L_1(S^0))^{tC2} ≄ *"
    assert tate_entry(level(1), 2, 2).citation == "Hovey"
