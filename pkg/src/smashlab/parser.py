"""Tokenizer and recursive-descent parser for the expression DSL.

Grammar sketch (``^`` binds tighter than ``v``, both left-associative)::

    expr   := smash ('v' smash)*
    smash  := prim ('^' prim)*
    prim   := 'S0' ['@' group] | 'pt' ['@' group]
            | 'E(n)' | 'ER(n)' | 'EG(k,m)'
            | 'EF[family]@group' | 'tEF[family]@group'
            | 'atom' name '@' group '{' key: level, ... '}'
            | ('triv'|'res'|'ind'|'norm') '[' group ']' '(' expr ')'
            | 'pull' '[' hom ']' '(' expr ')' | '(' expr ')' | name
    group  := gatom ('x' gatom)* ;  gatom := C(n) | S(n) | sub[group]{perms} | name
    family := triv | proper | all | famsub(group) | '{' group, ... '}'
    hom    := 'hom[' group '->' group ']{' perm '->' perm, ... '}' | name

Cycles are comma-separated 1-based points, e.g. ``(1,2,3,4)`` or
``(1,2)(3,4)``; ``e`` is the identity.  Because ``x`` separates direct
factors, identifiers may not begin with the letter ``x``.  A definitions
file is a sequence of ``let name = expr;`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import DslSyntaxError
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
    group_of,
)
from .chrom import BOT, TOP, ChromLevel, level
from .groups import (
    DEFAULT_ORDER_CAP,
    FiniteGroup,
    Homomorphism,
    closure_of,
    cycles_to_perm,
    cyclic,
    dihedral8,
    direct_product,
    symmetric,
    trivial_group,
)

_PUNCT = {"(", ")", "[", "]", "{", "}", "@", ",", ":", ";", "=", "^"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "nat" | punctuation/operator | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("nat", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            if ch == "x":
                # direct-product separator; identifiers may not start with x
                tokens.append(Token("x", "x", line, col))
                i += 1
                col += 1
                continue
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token("ident", word, line, col))
            col += j - i
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class Environment:
    """Named groups, homomorphisms and expression definitions."""

    groups: Dict[str, FiniteGroup] = field(default_factory=dict)
    homs: Dict[str, Homomorphism] = field(default_factory=dict)
    defs: Dict[str, SpectrumExpr] = field(default_factory=dict)

    @classmethod
    def standard(cls, order_cap: int = DEFAULT_ORDER_CAP) -> "Environment":
        v4 = FiniteGroup(
            (cycles_to_perm([(1, 2), (3, 4)], 4), cycles_to_perm([(1, 3), (2, 4)], 4)),
            4,
            name="V4",
            literal="sub[S(4)]{(1,2)(3,4),(1,3)(2,4)}",
            order_cap=order_cap,
        )
        groups = {
            "C2": cyclic(2, order_cap),
            "C3": cyclic(3, order_cap),
            "C4": cyclic(4, order_cap),
            "C8": cyclic(8, order_cap),
            "S3": symmetric(3, order_cap),
            "S4": symmetric(4, order_cap),
            "D8": dihedral8(order_cap),
            "V4": v4,
        }
        return cls(groups=groups)


_EXPR_KEYWORDS = {
    "S0", "pt", "E", "ER", "EG", "EF", "tEF", "atom",
    "triv", "res", "ind", "norm", "pull", "let", "hom", "sub", "v",
}


class Parser:
    def __init__(self, tokens: List[Token], env: Optional[Environment] = None,
                 order_cap: int = DEFAULT_ORDER_CAP):
        self.tokens = tokens
        self.pos = 0
        self.env = env if env is not None else Environment.standard(order_cap)
        self.order_cap = order_cap

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected_desc: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise DslSyntaxError(
                f"expected {expected_desc or kind!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
                expected=(expected_desc or kind,),
            )
        return self.next()

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise DslSyntaxError(
                f"expected {word!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
                expected=(word,),
            )
        return self.next()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def fail(self, message, expected=()):
        tok = self.peek()
        raise DslSyntaxError(message, tok.line, tok.col, expected=expected)

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> SpectrumExpr:
        node = self.parse_smash()
        while self.at_word("v"):
            self.next()
            node = Wedge(node, self.parse_smash())
        return node

    def parse_smash(self) -> SpectrumExpr:
        node = self.parse_primary()
        while self.peek().kind == "^":
            self.next()
            node = Smash(node, self.parse_primary())
        return node

    def parse_primary(self) -> SpectrumExpr:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind != "ident":
            self.fail(
                f"expected an expression, found {tok.text or 'end of input'!r}",
                expected=("expression",),
            )
        word = tok.text
        if word == "S0":
            self.next()
            return S0(at=self._optional_at())
        if word == "pt":
            self.next()
            return Pt(at=self._optional_at())
        if word == "E":
            self.next()
            self.expect("(")
            n = self._nat()
            self.expect(")")
            return En(n)
        if word == "ER":
            self.next()
            self.expect("(")
            n = self._nat()
            self.expect(")")
            return ER(n)
        if word == "EG":
            self.next()
            self.expect("(")
            k = self._nat()
            self.expect(",")
            m = self._nat()
            self.expect(")")
            return EG(k, m)
        if word in ("EF", "tEF"):
            self.next()
            self.expect("[")
            fam = self.parse_family()
            self.expect("]")
            self.expect("@")
            at = self.parse_group()
            return (EFplus if word == "EF" else EFtilde)(fam, at)
        if word == "atom":
            self.next()
            name_tok = self.expect("ident", "atom name")
            self.expect("@")
            at = self.parse_group()
            self.expect("{")
            entries = self.parse_support()
            self.expect("}")
            return Atom(name_tok.text, at, tuple(entries))
        if word in ("triv", "res", "ind", "norm"):
            self.next()
            self.expect("[")
            ref = self.parse_group()
            self.expect("]")
            self.expect("(")
            child = self.parse_expr()
            self.expect(")")
            ctor = {"triv": Triv, "res": Res, "ind": Ind, "norm": Norm}[word]
            return ctor(ref, child)
        if word == "pull":
            self.next()
            self.expect("[")
            hom = self.parse_hom()
            self.expect("]")
            self.expect("(")
            child = self.parse_expr()
            self.expect(")")
            return Pull(hom, child)
        if word in self.env.defs:
            self.next()
            return self.env.defs[word]
        if word in _EXPR_KEYWORDS:
            self.fail(f"misplaced keyword {word!r}", expected=("expression",))
        self.fail(f"unbound name {word!r}", expected=("expression",))

    def _optional_at(self):
        if self.peek().kind == "@":
            self.next()
            return self.parse_group()
        return None

    def _nat(self) -> int:
        return int(self.expect("nat", "a natural number").text)

    # -- groups ------------------------------------------------------------

    def parse_group(self):
        node = self.parse_group_atom()
        while self.peek().kind == "x":
            self.next()
            rhs = self.parse_group_atom()

            node = direct_product(group_of(node), group_of(rhs),
                                  order_cap=self.order_cap)
        return node

    def parse_group_atom(self):
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(
                f"expected a group, found {tok.text or 'end of input'!r}",
                expected=("group",),
            )
        word = tok.text
        if word in ("C", "S"):
            self.next()
            self.expect("(")
            n = self._nat()
            self.expect(")")
            builder = cyclic if word == "C" else symmetric
            return builder(n, order_cap=self.order_cap)
        if word == "sub":
            self.next()
            self.expect("[")
            parent = self.parse_group()
            self.expect("]")

            parent_group = group_of(parent)
            self.expect("{")
            gens = []
            if self.peek().kind != "}":
                gens.append(self.parse_perm(parent_group.degree))
                while self.peek().kind == ",":
                    self.next()
                    gens.append(self.parse_perm(parent_group.degree))
            self.expect("}")
            elems = closure_of(
                gens or [tuple(range(parent_group.degree))], parent_group.degree
            )
            if not elems <= parent_group.elements:
                self.fail(f"generators are not elements of {parent_group.name}")
            return parent_group.subgroup(elems)
        if word in self.env.groups:
            self.next()
            return self.env.groups[word]
        self.fail(f"unknown group {word!r}", expected=("group",))

    def parse_perm(self, degree: int):
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "e":
            self.next()
            return tuple(range(degree))
        cycles = []
        if self.peek().kind != "(":
            self.fail("expected a permutation", expected=("cycle", "e"))
        while self.peek().kind == "(":
            self.next()
            points = [self._nat()]
            while self.peek().kind == ",":
                self.next()
                points.append(self._nat())
            self.expect(")")
            if max(points) > degree:
                self.fail(f"point {max(points)} exceeds degree {degree}")
            if len(set(points)) != len(points):
                self.fail("cycle repeats a point")
            cycles.append(tuple(points))
        return cycles_to_perm(cycles, degree)

    # -- families, supports, homomorphisms ---------------------------------

    def parse_family(self) -> FamilySpec:
        tok = self.peek()
        if tok.kind == "ident" and tok.text in ("triv", "proper", "all"):
            self.next()
            return FamilySpec(tok.text)
        if tok.kind == "ident" and tok.text == "famsub":
            self.next()
            self.expect("(")
            ref = self.parse_group()
            self.expect(")")
            return FamilySpec("famsub", (ref,))
        if tok.kind == "{":
            self.next()
            refs = [self.parse_group()]
            while self.peek().kind == ",":
                self.next()
                refs.append(self.parse_group())
            self.expect("}")
            return FamilySpec("explicit", tuple(refs))
        self.fail(
            "expected a family",
            expected=("triv", "proper", "all", "famsub", "{"),
        )

    def parse_support(self) -> List[Tuple[object, ChromLevel]]:
        entries = []
        if self.peek().kind == "}":
            return entries
        entries.append(self.parse_support_entry())
        while self.peek().kind == ",":
            self.next()
            entries.append(self.parse_support_entry())
        return entries

    def parse_support_entry(self):
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "e":
            self.next()
            key = trivial_group()
        else:
            key = self.parse_group()
        self.expect(":")
        return (key, self.parse_level())

    def parse_level(self) -> ChromLevel:
        tok = self.peek()
        if tok.kind == "nat":
            self.next()
            return level(int(tok.text))
        if tok.kind == "ident" and tok.text == "bot":
            self.next()
            return BOT
        if tok.kind == "ident" and tok.text == "top":
            self.next()
            return TOP
        self.fail("expected a level", expected=("bot", "top", "nat"))

    def parse_hom(self) -> Homomorphism:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "hom":
            self.next()
            self.expect("[")
            source = self.parse_group()
            self.expect("->")
            target = self.parse_group()
            self.expect("]")

            source_group = group_of(source)
            target_group = group_of(target)
            self.expect("{")
            pairs = []
            if self.peek().kind != "}":
                pairs.append(self._parse_perm_pair(source_group, target_group))
                while self.peek().kind == ",":
                    self.next()
                    pairs.append(self._parse_perm_pair(source_group, target_group))
            self.expect("}")
            return Homomorphism(source_group, target_group, pairs)
        if tok.kind == "ident" and tok.text in self.env.homs:
            self.next()
            return self.env.homs[tok.text]
        self.fail("expected a homomorphism", expected=("hom", "name"))

    def _parse_perm_pair(self, source, target):
        g = self.parse_perm(source.degree)
        self.expect("->")
        v = self.parse_perm(target.degree)
        return (g, v)


def parse_expr(text: str, env: Optional[Environment] = None,
               order_cap: int = DEFAULT_ORDER_CAP) -> SpectrumExpr:
    """Parse a single expression; the whole input must be consumed."""
    parser = Parser(tokenize(text), env, order_cap)
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "eof":
        raise DslSyntaxError(
            f"unexpected trailing input {tok.text!r}", tok.line, tok.col,
            expected=("end of input",),
        )
    return node


def parse_definitions(text: str, env: Optional[Environment] = None,
                      order_cap: int = DEFAULT_ORDER_CAP) -> Environment:
    """Read ``let name = expr;`` lines into the given environment."""
    env = env if env is not None else Environment.standard(order_cap)
    parser = Parser(tokenize(text), env, order_cap)
    while parser.peek().kind != "eof":
        parser.expect_word("let")
        name = parser.expect("ident", "definition name").text
        parser.expect("=")
        node = parser.parse_expr()
        parser.expect(";")
        env.defs[name] = node
    return env
