"""Command-line interface: one binary exposing every operation.

Exit codes: 0 for success / affirmative results, 1 for mathematically
negative or undecided results (``equal`` false, ``smashing`` NotSmashing or
Unknown, ``verify`` false, ``closure`` NotClosed), 2 for usage, parse and
typecheck errors.  All output is deterministic; ``--json`` switches every
command to its machine-readable schema.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field

from . import ideals as ideals_mod
from . import ninfty as ninfty_mod
from .chrom import level_text
from .errors import SmashlabError
from .expr import SpectrumExpr, annotate, strip_inserted, to_text
from .groups import (
    DEFAULT_ORDER_CAP,
    FiniteGroup,
    cycles_to_perm,
    double_coset,
    double_cosets,
    intersect,
    conjugate_subgroup,
)
from .parser import Environment, Parser, parse_definitions, parse_expr, tokenize
from .smashing import (
    characterize_locals,
    derive_smashing,
    emit_localization_formula,
    fixed_points_class,
)
from .support import bousfield_equal, class_leq, is_acyclic, support


@dataclass
class Session:
    """Per-invocation state: prime, order cap, names, output mode."""

    prime: int = 2
    order_cap: int = DEFAULT_ORDER_CAP
    json_output: bool = False
    env: Environment = dc_field(default=None)

    def __post_init__(self):
        if self.env is None:
            self.env = standard_environment(self.order_cap)

    def load_defs(self, path: str):
        with open(path, "r", encoding="utf-8") as handle:
            parse_definitions(handle.read(), self.env, self.order_cap)

    def expr(self, text: str) -> SpectrumExpr:
        if text == "-":
            text = sys.stdin.read()
        raw = parse_expr(text, self.env, self.order_cap)
        return annotate(raw, prime=self.prime, order_cap=self.order_cap)

    def group(self, text: str):
        parser = Parser(tokenize(text), self.env, self.order_cap)
        ref = parser.parse_group()
        if parser.peek().kind != "eof":
            tok = parser.peek()
            raise SmashlabError(f"trailing input after group: {tok.text!r}")
        return ref


def standard_environment(order_cap: int) -> Environment:
    """Preseeded names, skipping any whose order exceeds the session cap."""
    try:
        return Environment.standard(order_cap)
    except SmashlabError:
        env = Environment.standard(max(order_cap, DEFAULT_ORDER_CAP))
        env.groups = {
            name: grp for name, grp in env.groups.items() if grp.order <= order_cap
        }
        return env


def emit(session: Session, human_lines, payload) -> None:
    if session.json_output:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        for line in human_lines:
            print(line)


# ---------------------------------------------------------------------------
# commands


def cmd_support(session: Session, args) -> int:
    supp = support(session.expr(args.expr))
    lines = [f"group: {supp.ambient.name}"]
    width = max(len(name) for name, _ in supp.rows())
    for name, value in supp.rows():
        lines.append(f"  {name.ljust(width)}  {level_text(value)}")
    emit(session, lines, supp.to_json())
    return 0


def cmd_equal(session: Session, args) -> int:
    result = bousfield_equal(session.expr(args.expr1), session.expr(args.expr2))
    emit(
        session,
        [f"equal in the chromatic fragment: {str(result).lower()}"],
        {"equal": result, "scope": "chromatic fragment"},
    )
    return 0 if result else 1


def cmd_leq(session: Session, args) -> int:
    result = class_leq(session.expr(args.expr1), session.expr(args.expr2))
    emit(
        session,
        [f"class_leq in the chromatic fragment: {str(result).lower()}"],
        {"leq": result, "scope": "chromatic fragment"},
    )
    return 0 if result else 1


def cmd_acyclic(session: Session, args) -> int:
    result = is_acyclic(session.expr(args.zexpr), session.expr(args.expr))
    emit(
        session,
        [f"acyclic in the chromatic fragment: {str(result).lower()}"],
        {"acyclic": result, "scope": "chromatic fragment"},
    )
    return 0 if result else 1


def cmd_smashing(session: Session, args) -> int:
    verdict = derive_smashing(session.expr(args.expr), prime=session.prime)
    lines = [f"status: {verdict.status}"]
    if verdict.citations:
        lines.append("citations: " + ", ".join(verdict.citations))
    if verdict.witness:
        lines.append(
            f"witness: {verdict.witness.subgroup} — {verdict.witness.oracle}"
        )
    if verdict.reason:
        lines.append(f"reason: {verdict.reason}")
    emit(session, lines, verdict.to_json())
    return 0 if verdict.is_smashing else 1


def cmd_localize(session: Session, args) -> int:
    formula = emit_localization_formula(session.expr(args.expr), prime=session.prime)
    emit(
        session,
        [
            f"L(X) = {formula.text}  over {formula.ambient.name}",
            "citations: " + ", ".join(formula.citations),
        ],
        formula.to_json(),
    )
    return 0


def cmd_locals(session: Session, args) -> int:
    statement = characterize_locals(
        session.expr(args.expr),
        prime=session.prime,
        fixed_points=args.fixed_points,
    )
    emit(
        session,
        [statement.text, "citations: " + ", ".join(statement.citations)],
        statement.to_json(),
    )
    return 0


def cmd_fixclass(session: Session, args) -> int:
    fc = fixed_points_class(session.expr(args.expr))
    emit(
        session,
        [
            f"fixed-points class: {level_text(fc.value)}",
            "recorded hypothesis: acyclics of the G-fixed points contained in "
            "those of every subgroup (ring classes qualify)",
            "citations: " + ", ".join(fc.citations),
        ],
        fc.to_json(),
    )
    return 0


def _parse_sequence(text: str):
    return [int(part) for part in text.split(",") if part != ""]


def cmd_ideals(session: Session, args) -> int:
    p = args.p
    if args.ideals_command == "enumerate":
        seqs = ideals_mod.enumerate_sequences(args.n, args.max, p)
        emit(
            session,
            [seq.label() for seq in seqs] + [f"count: {len(seqs)}"],
            {"count": len(seqs), "sequences": [list(s.entries) for s in seqs]},
        )
        return 0
    seq = ideals_mod.validate_sequence(_parse_sequence(args.sequence), p)
    if args.ideals_command == "construct":
        built = ideals_mod.construct(seq, order_cap=session.order_cap)
        lines = [to_text(strip_inserted(built.expr))]
        lines.append("cases: " + "; ".join(built.cases))
        lines.append("citations: " + ", ".join(built.citations))
        lines.extend(f"note: {note}" for note in built.notes)
        emit(session, lines, built.to_json())
        return 0
    if args.ideals_command == "verify":
        result = ideals_mod.verify(seq, order_cap=session.order_cap)
        lines = [f"verified: {str(result.ok).lower()}"]
        for i, value in result.computed:
            lines.append(f"  order p^{i}: {level_text(value)}")
        if result.failing_index is not None:
            lines.append(f"first failure at index {result.failing_index}")
        emit(session, lines, result.to_json())
        return 0 if result.ok else 1
    raise SmashlabError(f"unknown ideals command {args.ideals_command!r}")


def _load_indexing_system(session: Session, spec: str, ambient) -> "ninfty_mod.IndexingSystem":
    if spec == "complete":
        return ninfty_mod.IndexingSystem.complete(ambient)
    if spec == "trivial":
        return ninfty_mod.IndexingSystem.trivial(ambient)
    with open(spec, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    pairs = []
    for item in data:
        h = _subgroup_from_gens(session, ambient, item["H"])
        k = _subgroup_from_gens(session, ambient, item["K"])
        pairs.append((h, k))
    return ninfty_mod.IndexingSystem.generate(ambient, pairs)


def _subgroup_from_gens(session: Session, ambient: FiniteGroup, gens_text: str):
    from .groups import closure_of

    if gens_text.strip() in ("e", ""):
        return frozenset({ambient.identity})
    parser = Parser(tokenize(gens_text), session.env, session.order_cap)
    gens = [parser.parse_perm(ambient.degree)]
    while parser.peek().kind == ",":
        parser.next()
        gens.append(parser.parse_perm(ambient.degree))
    return closure_of(gens, ambient.degree)


def cmd_ninfty(session: Session, args) -> int:
    from .expr import group_of

    if args.ninfty_command == "coinduce":
        G = group_of(session.group(args.group))
        from .expr import resolve_subgroup_in

        H = resolve_subgroup_in(G, session.group(args.sub))
        inner = _load_indexing_system(session, args.admissible, H.as_group())
        out = ninfty_mod.coinduce(inner, H, G)
        lines = [f"{h} / {k}" for h, k in
                 ((p["H"], p["K"]) for p in out.to_json())]
        lines.append(f"complete: {str(out.is_complete()).lower()}")
        emit(session, lines, {"pairs": out.to_json(),
                              "complete": out.is_complete()})
        return 0
    expr = session.expr(args.expr)
    system = _load_indexing_system(session, args.admissible, expr.ambient)
    if args.ninfty_command == "closure":
        verdict = ninfty_mod.norm_closure_check(expr, system)
        lines = [f"status: {verdict.status}"]
        if verdict.pair:
            lines.append(f"failing norm: {verdict.pair[0]}/{verdict.pair[1]}")
        if verdict.at_subgroup:
            lines.append(f"at subgroup: {verdict.at_subgroup}")
        if verdict.counterexample:
            ce = verdict.counterexample
            lines.append(f"counterexample acyclic: {ce.expr_text}")
            lines.append(f"norm expansion: {ce.norm_text}")
            lines.append(
                "engine checks: acyclic before = "
                f"{str(ce.acyclic_before).lower()}, after norm = "
                f"{str(ce.acyclic_after_norm).lower()}"
            )
        if verdict.reason:
            lines.append(f"reason: {verdict.reason}")
        lines.append("citations: " + ", ".join(verdict.citations))
        emit(session, lines, verdict.to_json())
        return 0 if verdict.status == "Closed" else 1
    if args.ninfty_command == "propagate":
        premise = None
        if args.premise_from_closure:
            restricted_expr, restricted_system = _restricted_premise(
                session, expr, system
            )
            premise = ninfty_mod.norm_closure_check(
                restricted_expr, restricted_system
            )
        statement = ninfty_mod.preservation_propagation(
            expr, system, premise=premise, assert_premise=args.assert_premise
        )
        lines = [
            statement.preserves,
            f"premise: {statement.premise}",
            f"new norms: {len(statement.new_norms)}",
            "citations: " + ", ".join(statement.citations),
        ]
        emit(session, lines, statement.to_json())
        return 0
    raise SmashlabError(f"unknown ninfty command {args.ninfty_command!r}")


def _restricted_premise(session: Session, expr, system):
    from .expr import Ind, Res

    if not isinstance(expr, Ind):
        raise SmashlabError(
            "--premise-from-closure needs an explicit induced expression"
        )
    restricted = annotate(
        Res(expr.sub, expr), prime=session.prime, order_cap=session.order_cap
    )
    return restricted, system.restrict_to(expr.sub)


# ---------------------------------------------------------------------------
# selftest


def _selftest_steps(session: Session):
    env = session.env
    S4 = env.groups["S4"]
    d8_elems = frozenset(
        cycles_to_perm(c, 4)
        for c in (
            [],
            [(1, 3), (2, 4)],
            [(1, 2), (3, 4)],
            [(1, 4), (2, 3)],
            [(1, 2, 3, 4)],
            [(1, 4, 3, 2)],
            [(1, 3)],
            [(2, 4)],
        )
    )
    D8 = S4.subgroup(d8_elems)
    yield (
        "D8 = <(1,2,3,4),(1,3)> inside S4 has the expected eight elements",
        "Prop 3.24",
        lambda: session.group("sub[S(4)]{(1,2,3,4),(1,3)}").elements == d8_elems,
    )

    t12 = cycles_to_perm([(1, 2)], 4)

    def check_double_cosets():
        reps = double_cosets(D8, S4, D8)
        cosets = {double_coset(D8, g, D8) for g in reps}
        return len(reps) == 2 and cosets == {
            d8_elems,
            double_coset(D8, t12, D8),
        }

    yield (
        "the double cosets D8\\S4/D8 are exactly D8 and D8(12)D8",
        "Prop 3.24",
        check_double_cosets,
    )

    conj_elems = frozenset(
        cycles_to_perm(c, 4)
        for c in (
            [],
            [(1, 3), (2, 4)],
            [(1, 2), (3, 4)],
            [(1, 4), (2, 3)],
            [(1, 3, 4, 2)],
            [(1, 2, 4, 3)],
            [(1, 4)],
            [(2, 3)],
        )
    )
    yield (
        "the conjugate of D8 by (1,2) has the expected eight elements",
        "Prop 3.24",
        lambda: conjugate_subgroup(t12, D8).elements == conj_elems,
    )

    v4_elems = frozenset(
        cycles_to_perm(c, 4)
        for c in ([], [(1, 3), (2, 4)], [(1, 2), (3, 4)], [(1, 4), (2, 3)])
    )
    yield (
        "D8 meets its (1,2)-conjugate in V4, element for element",
        "Prop 3.24",
        lambda: intersect(D8, conjugate_subgroup(t12, D8)).elements == v4_elems,
    )

    d8_lit = "sub[S(4)]{(1,2,3,4),(1,3)}"
    c4_lit = "sub[S(4)]{(1,2,3,4)}"
    v4_lit = "sub[S(4)]{(1,2)(3,4),(1,3)(2,4)}"
    lhs_text = f"res[{d8_lit}](ind[S(4)](tEF[famsub({c4_lit})]@{d8_lit}))"
    rhs_text = (
        f"tEF[famsub({c4_lit})]@{d8_lit}"
        f" v ind[{d8_lit}](tEF[famsub(sub[S(4)]{{(1,4)(2,3)}})]@{v4_lit})"
    )
    yield (
        "restricting the induced class to D8 splits as the expected wedge",
        "Prop 3.24",
        lambda: bousfield_equal(session.expr(lhs_text), session.expr(rhs_text)),
    )

    D8_group = D8.as_group()
    c4_in_d8 = D8_group.subgroup(
        frozenset(
            cycles_to_perm(c, 4)
            for c in ([], [(1, 2, 3, 4)], [(1, 3), (2, 4)], [(1, 4, 3, 2)])
        )
    )
    v4_in_d8 = D8_group.subgroup(v4_elems)
    yield (
        "<(1,2,3,4)>\\D8/V4 is a single double coset",
        "Prop 3.24",
        lambda: len(double_cosets(c4_in_d8, D8_group, v4_in_d8)) == 1,
    )
    yield (
        "<(1,2,3,4)> meets V4 in <(1,3)(2,4)>",
        "Prop 3.24",
        lambda: intersect(c4_in_d8, v4_in_d8).elements
        == frozenset(cycles_to_perm(c, 4) for c in ([], [(1, 3), (2, 4)])),
    )

    final_text = f"res[{c4_lit}]({lhs_text})"
    reduced_text = "ind[C(4)](tEF[triv]@C(2))"
    yield (
        "the fully restricted class agrees with ind[C4](tEF[triv]@C2)",
        "Prop 3.24",
        lambda: bousfield_equal(
            session.expr(final_text), session.expr(reduced_text)
        ),
    )

    def check_verdict():
        verdict = derive_smashing(session.expr(reduced_text), prime=session.prime)
        return (
            verdict.status == "NotSmashing"
            and verdict.witness is not None
            and verdict.witness.subgroup == "C4"
            and verdict.witness.oracle == "(S^0)^{tC2} ≄ *"
        )

    yield (
        "the reduced class is NotSmashing, witnessed by (S^0)^{tC2} ≄ *",
        "Cor 3.19 / Prop 3.20",
        check_verdict,
    )


def cmd_selftest(session: Session, args) -> int:
    results = []
    ok = True
    for description, citation, check in _selftest_steps(session):
        passed = bool(check())
        ok = ok and passed
        results.append(
            {"check": description, "citation": citation, "pass": passed}
        )
    lines = [
        f"{'ok  ' if item['pass'] else 'FAIL'} {item['check']} [{item['citation']}]"
        for item in results
    ]
    lines.append("selftest: " + ("pass" if ok else "FAIL"))
    emit(session, lines, {"pass": ok, "steps": results})
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--prime", type=int, default=2, help="session prime")
    parser.add_argument(
        "--order-cap",
        type=int,
        default=DEFAULT_ORDER_CAP,
        help="largest group order the session will enumerate",
    )
    parser.add_argument("--json", action="store_true", help="JSON output")
    parser.add_argument("--defs", help="definitions file of let-bindings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smashlab",
        description="calculator for equivariant Bousfield classes in the "
        "chromatic fragment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        _add_common(p)
        p.set_defaults(fn=fn)
        return p

    p = add("support", cmd_support, help="chromatic support of an expression")
    p.add_argument("expr")
    p = add("equal", cmd_equal, help="Bousfield equality in the fragment")
    p.add_argument("expr1")
    p.add_argument("expr2")
    p = add("leq", cmd_leq, help="pointwise class comparison")
    p.add_argument("expr1")
    p.add_argument("expr2")
    p = add("acyclic", cmd_acyclic, help="is the first class acyclic for the second")
    p.add_argument("zexpr")
    p.add_argument("expr")
    p = add("smashing", cmd_smashing, help="three-valued smashing verdict")
    p.add_argument("expr")
    p = add("localize", cmd_localize, help="emit the induced-localization formula")
    p.add_argument("expr")
    p = add("locals", cmd_locals, help="characterize the local objects")
    p.add_argument("expr")
    p.add_argument(
        "--fixed-points",
        action="store_true",
        help="characterize locals of the genuine fixed points instead",
    )
    p = add("fixclass", cmd_fixclass, help="class of the genuine fixed points")
    p.add_argument("expr")

    p = add("ideals", cmd_ideals, help="admissible sequence tooling")
    psub = p.add_subparsers(dest="ideals_command", required=True)
    pe = psub.add_parser("enumerate")
    _add_common(pe)
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--max", type=int, required=True)
    pe.add_argument("--p", type=int, default=2)
    pe.set_defaults(fn=cmd_ideals, ideals_command="enumerate")
    for name in ("construct", "verify"):
        pc = psub.add_parser(name)
        _add_common(pc)
        pc.add_argument("sequence", help="comma-separated entries, e.g. 1,0")
        pc.add_argument("--p", type=int, default=2)
        pc.set_defaults(fn=cmd_ideals, ideals_command=name)

    p = add("ninfty", cmd_ninfty, help="indexing-system tooling")
    nsub = p.add_subparsers(dest="ninfty_command", required=True)
    nc = nsub.add_parser("coinduce")
    _add_common(nc)
    nc.add_argument("--group", required=True)
    nc.add_argument("--sub", required=True)
    nc.add_argument(
        "--admissible",
        required=True,
        help="JSON file of {H, K} generator pairs, or 'complete'/'trivial'",
    )
    nc.set_defaults(fn=cmd_ninfty, ninfty_command="coinduce")
    for name in ("closure", "propagate"):
        np_ = nsub.add_parser(name)
        _add_common(np_)
        np_.add_argument("--expr", required=True)
        np_.add_argument("--admissible", required=True)
        if name == "propagate":
            np_.add_argument("--assert-premise", action="store_true")
            np_.add_argument(
                "--premise-from-closure",
                action="store_true",
                help="certify the premise by running the closure check on the "
                "restricted class",
            )
        np_.set_defaults(fn=cmd_ninfty, ninfty_command=name)

    add("selftest", cmd_selftest, help="run the built-in regression pipeline")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        session = Session(
            prime=args.prime,
            order_cap=args.order_cap,
            json_output=args.json,
        )
        if args.defs:
            session.load_defs(args.defs)
        return args.fn(session, args)
    except SmashlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
