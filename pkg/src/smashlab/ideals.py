"""Admissible level sequences over cyclic p-groups: validation, construction
of the split smashing representatives, independent verification, enumeration.

A sequence m_0,...,m_n (index i attached to the subgroup of order p^i) is
admissible when m_i <= m_{i+j} + 1 for all 0 <= i <= n-1 and 1 <= j <= n-i.
The constructed expression is a wedge of induced, inflated, normed and
pulled-back pieces; its smashing status is carried as provenance from the
construction theorems, while ``verify`` recomputes every geometric
fixed-point class with the support engine as an independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .chrom import is_prime, level, level_to_json
from .errors import InvalidSequence
from .expr import (
    EFtilde,
    En,
    FamilySpec,
    Ind,
    Norm,
    Pull,
    Smash,
    SpectrumExpr,
    Triv,
    Wedge,
    annotate,
    builtin_cyclic,
    strip_inserted,
    to_text,
)
from .groups import DEFAULT_ORDER_CAP, Homomorphism, closure_of
from .support import Evaluator


@dataclass(frozen=True)
class IdealSequence:
    p: int
    entries: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    def label(self) -> str:
        return ",".join(str(m) for m in self.entries)


def validate_sequence(entries, p: int = 2) -> IdealSequence:
    """Check the admissibility inequalities; report the first violation."""
    entries = tuple(int(m) for m in entries)
    if not entries:
        raise InvalidSequence("sequence must be nonempty")
    if any(m < 0 for m in entries):
        raise InvalidSequence("entries must be natural numbers")
    if not is_prime(p):
        raise InvalidSequence(f"{p} is not prime")
    n = len(entries) - 1
    for i in range(n):
        for j in range(1, n - i + 1):
            if entries[i] > entries[i + j] + 1:
                raise InvalidSequence(
                    f"m_{i} = {entries[i]} exceeds m_{i + j} + 1 = "
                    f"{entries[i + j] + 1}",
                    position=(i, j),
                )
    return IdealSequence(p, entries)


def is_valid(entries, p: int = 2) -> bool:
    try:
        validate_sequence(entries, p)
        return True
    except InvalidSequence:
        return False


@dataclass(frozen=True)
class ConstructedSpectrum:
    sequence: IdealSequence
    expr: SpectrumExpr  # annotated, ambient the cyclic group of order p^n
    cases: Tuple[str, ...]  # which construction case fired at each stage
    citations: Tuple[str, ...]
    notes: Tuple[str, ...]

    def to_json(self):
        return {
            "sequence": list(self.sequence.entries),
            "p": self.sequence.p,
            "expr": to_text(strip_inserted(self.expr)),
            "cases": list(self.cases),
            "citations": list(self.citations),
            "notes": list(self.notes),
        }


_NORM_NOTE = (
    "the norm in the top-level wedge lands in the ambient cyclic group; the "
    "stated superscript one power higher is treated as a typo"
)


def _quotient_hom(p: int, k: int, order_cap: int) -> Homomorphism:
    """The quotient map from the cyclic group of order p^k onto order p^(k-1)."""
    source = builtin_cyclic(p ** k, order_cap)
    target = builtin_cyclic(p ** (k - 1), order_cap)
    src_gen = _cyclic_generator(source)
    tgt_gen = _cyclic_generator(target)
    return Homomorphism(source, target, [(src_gen, tgt_gen)])


def _cyclic_generator(G):
    for g in G.elements_sorted:
        if len(closure_of((g,), G.degree)) == G.order:
            return g
    raise ValueError(f"{G.name} is not cyclic")


def _build(entries: Tuple[int, ...], p: int, order_cap: int, cases: List[str]):
    n = len(entries) - 1
    ambient = builtin_cyclic(p ** n, order_cap)
    if n == 1:
        m0, m1 = entries
        cases.append("base")
        return Wedge(
            Ind(ambient, En(m0)),
            Smash(EFtilde(FamilySpec("triv"), ambient), Triv(ambient, En(m1))),
        )
    m0, m1 = entries[0], entries[1]
    tail = _build(entries[1:], p, order_cap, cases)
    q = _quotient_hom(p, n, order_cap)
    if m0 == m1:
        cases.append(f"(i) pull @ n={n}")
        return Pull(q, tail)
    pulled_tail = Smash(EFtilde(FamilySpec("triv"), ambient), Pull(q, tail))
    if m0 < m1:
        cases.append(f"(ii) inflate-wedge @ n={n}")
        return Wedge(Triv(ambient, En(m0)), pulled_tail)
    # admissibility forces m0 == m1 + 1 here
    cases.append(f"(iii) norm-wedge @ n={n}")
    head_cases: List[str] = []
    head = _build((m0, m1), p, order_cap, head_cases)
    return Wedge(Norm(ambient, head), pulled_tail)


def construct(s: IdealSequence, order_cap: int = DEFAULT_ORDER_CAP) -> ConstructedSpectrum:
    """Build the split smashing representative for a validated sequence."""
    if s.n < 1:
        raise InvalidSequence("construction needs a sequence of length at least 2")
    cases: List[str] = []
    raw = _build(s.entries, s.p, order_cap, cases)
    expr = annotate(raw, prime=s.p, order_cap=order_cap)
    notes = tuple(
        [_NORM_NOTE] if any(c.startswith("(iii)") for c in cases) else []
    )
    citations = ("Prop 4.9",) if s.n == 1 else ("Prop 4.9", "Thm 4.10")
    return ConstructedSpectrum(s, expr, tuple(cases), citations, notes)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failing_index: Optional[int]
    computed: Tuple[Tuple[int, object], ...]  # (i, level at the order-p^i subgroup)

    def to_json(self):
        return {
            "ok": self.ok,
            "failing_index": self.failing_index,
            "classes": [
                {"i": i, "value": level_to_json(v)} for i, v in self.computed
            ],
        }


def verify(s: IdealSequence, order_cap: int = DEFAULT_ORDER_CAP) -> VerifyResult:
    """Recompute every geometric fixed-point class of the construction.

    Independent of the construction's own bookkeeping: the support engine
    evaluates the expression and the result is compared entrywise against
    the sequence, join-collapses and smash-power collapses included.
    """
    built = construct(s, order_cap)
    ambient = built.expr.ambient
    ev = Evaluator()
    computed = []
    failing = None
    for i, m in enumerate(s.entries):
        order = s.p ** i
        matching = [
            sub for sub in ambient.subgroup_list if sub.order == order
        ]
        value = ev.value(built.expr, matching[0].elements)
        computed.append((i, value))
        if value != level(m) and failing is None:
            failing = i
    return VerifyResult(failing is None, failing, tuple(computed))


def enumerate_sequences(
    n: int, max_entry: int, p: int = 2
) -> List[IdealSequence]:
    """All valid sequences of length n+1 with entries <= max_entry, lex order."""
    if n < 1:
        raise InvalidSequence("need n >= 1")
    out = []
    for entries in itertools.product(range(max_entry + 1), repeat=n + 1):
        if is_valid(entries, p):
            out.append(IdealSequence(p, entries))
    return out
