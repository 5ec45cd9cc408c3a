"""The chain lattice of chromatic Bousfield levels and the Tate-vanishing oracle.

Values form the chain  bot < level 0 < level 1 < ... < top,  with join and
meet given by max and min.  The Tate oracle is a closed table, not a
computation: each entry carries its citation tag, and the odd-order
vanishing entries are recorded as axioms and flagged as such.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import TrivialSubgroup
from .groups import Subgroup


@dataclass(frozen=True)
class ChromLevel:
    kind: str  # "bot" | "level" | "top"
    n: Optional[int] = None

    def sort_key(self):
        if self.kind == "bot":
            return (0, 0)
        if self.kind == "level":
            return (1, self.n)
        return (2, 0)

    @property
    def is_bot(self):
        return self.kind == "bot"

    @property
    def is_top(self):
        return self.kind == "top"

    def __repr__(self):
        if self.kind == "level":
            return f"ChromLevel(E({self.n}))"
        return f"ChromLevel({self.kind})"


BOT = ChromLevel("bot")
TOP = ChromLevel("top")


def level(n: int) -> ChromLevel:
    if not isinstance(n, int) or n < 0:
        raise ValueError("chromatic level must be a natural number")
    return ChromLevel("level", n)


def leq(a: ChromLevel, b: ChromLevel) -> bool:
    return a.sort_key() <= b.sort_key()


def join(a: ChromLevel, b: ChromLevel) -> ChromLevel:
    return a if a.sort_key() >= b.sort_key() else b


def meet(a: ChromLevel, b: ChromLevel) -> ChromLevel:
    return a if a.sort_key() <= b.sort_key() else b


def join_all(values) -> ChromLevel:
    out = BOT
    for v in values:
        out = join(out, v)
    return out


def meet_all(values) -> ChromLevel:
    out = TOP
    for v in values:
        out = meet(out, v)
    return out


def level_to_json(a: ChromLevel) -> Union[str, dict]:
    if a.kind == "level":
        return {"level": a.n}
    return a.kind


def level_from_json(data) -> ChromLevel:
    if data == "bot":
        return BOT
    if data == "top":
        return TOP
    if isinstance(data, dict) and set(data) == {"level"}:
        return level(int(data["level"]))
    raise ValueError(f"not a chromatic level encoding: {data!r}")


def level_text(a: ChromLevel) -> str:
    if a.kind == "level":
        return f"E({a.n})"
    return a.kind


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Prime:
    p: int = 2

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")


# ---------------------------------------------------------------------------
# Tate oracle


@dataclass(frozen=True)
class TateEntry:
    """One row of the oracle: does (L_a(S^0))^{tK} vanish for |K| = group_order?"""

    vanishes: bool
    citation: str
    axiom: bool = False
    witness: Optional[str] = None


def tate_entry(a: ChromLevel, group_order: int, p: int = 2) -> TateEntry:
    if group_order <= 1:
        raise TrivialSubgroup("the Tate oracle is only defined for nontrivial groups")
    if a.is_bot:
        return TateEntry(True, "trivial: localized unit is contractible")
    if a == level(0):
        return TateEntry(True, "Cor 3.23")
    p_divides = group_order % p == 0
    if a.is_top:
        if p_divides:
            return TateEntry(
                False, "Prop 3.24", witness=f"(S^0)^{{tC{p}}} ≄ *"
            )
        return TateEntry(True, "p'-group Tate vanishing (oracle axiom)", axiom=True)
    if p_divides:
        return TateEntry(
            False, "Hovey", witness=f"(L_{a.n}(S^0))^{{tC{p}}} ≄ *"
        )
    return TateEntry(True, "p'-group Tate vanishing (oracle axiom)", axiom=True)


def tate_vanishes(a: ChromLevel, K: Subgroup, p: int = 2) -> bool:
    """Whether the oracle declares (L_a(S^0))^{tK} contractible."""
    if K.order <= 1:
        raise TrivialSubgroup("Tate vanishing is asked of nontrivial subgroups only")
    return tate_entry(a, K.order, p).vanishes
