"""Command line interface.

Exit codes: 0 = yes / success, 1 = no, 2 = unknown or unsupported input,
64 = usage error, 65 = unreadable or malformed input file.  All output
is deterministic: equal inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .terms import (
    BadEncodingError,
    ParseError,
    RankedAlphabet,
    Symbol,
    Term,
    TermError,
    alphabet_of,
    is_ground,
    parse_term,
    term_key,
    term_text,
)
from .rewriting import (
    Trs,
    TrsClassification,
    TrsError,
    bounded_closure,
    classify,
    gsm_violation_text,
    is_gsm,
    parse_language,
    parse_trs,
)
from .automata import (
    AutomatonError,
    Bta,
    accepts,
    bta_text,
    eliminate_lambda,
    transition_text,
    trim,
)
from .completion import UnsupportedTrsError, descendants, saturate
from .decide import (
    NO,
    UNKNOWN,
    YES,
    Decision,
    compare,
    compare_thue,
    convertible_confluent,
    ground_minimal,
    ground_relation_included,
    joinable,
    locally_confluent,
    minimal,
    reachable,
    relation_included,
    witness_text,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract here is 64.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _load_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load_trs(path: str) -> Trs:
    try:
        return parse_trs(_load_text(path))
    except ParseError:
        raise
    except (TermError, TrsError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _load_language(path: str) -> list[Term]:
    try:
        return parse_language(_load_text(path))
    except ParseError:
        raise
    except TermError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _parse_term_arg(text: str, flag: str) -> Term:
    try:
        return parse_term(text)
    except TermError as exc:
        raise ParseError(f"{flag}: {exc}") from exc


def _emit(ns: argparse.Namespace, text: str) -> None:
    out: Optional[str] = getattr(ns, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _yn(value: bool) -> str:
    return "yes" if value else "no"


def _decision_output(d: Decision) -> tuple[str, int]:
    lines = [d.verdict.upper()]
    if d.witness is not None:
        lines.append("witness " + witness_text(d.witness))
    if d.verdict == UNKNOWN:
        lines.append("reason " + d.reason)
    code = {YES: 0, NO: 1, UNKNOWN: 2}[d.verdict]
    return "\n".join(lines) + "\n", code


def _resolve_symbol(alpha: RankedAlphabet, name: str, default_arity: int) -> Symbol:
    sym = alpha.get(name)
    if sym is not None:
        return sym
    try:
        return Symbol(name, default_arity)
    except TermError as exc:
        raise ParseError(str(exc)) from exc


def _cmd_classify(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    shape = classify(trs)
    lines = [
        f"{name:<13} {_yn(getattr(shape, name))}" for name in TrsClassification.FIELDS
    ]
    if not shape.gsm:
        _, violation = is_gsm(trs)
        assert violation is not None
        lines.append("gsm_violation " + gsm_violation_text(violation))
    _emit(ns, "\n".join(lines) + "\n")
    return 0


def _trace_text(result) -> str:
    lines = ["% injected"]
    lines += [term_text(t) for t in sorted(result.injected, key=term_key)]
    lines.append("% support")
    lines += [term_text(t) for t in sorted(result.support, key=term_key)]
    lines.append("% initial")
    base = Bta(
        result.automaton.alphabet,
        result.automaton.states,
        result.initial_transitions,
        result.automaton.finals,
    )
    lines += bta_text(base).splitlines()
    for i, increment in enumerate(result.rounds, start=1):
        lines.append(f"% round {i}")
        lines += sorted(transition_text(tr) for tr in increment)
    lines.append(f"% rounds {result.round_count}")
    return "\n".join(lines) + "\n"


def _cmd_descendants(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    language = _load_language(ns.language)
    result = saturate(trs, language)
    automaton = trim(eliminate_lambda(result.automaton))
    text = bta_text(automaton)
    if ns.trace:
        sys.stdout.write(_trace_text(result))
        if ns.out:
            _emit(ns, text)
        else:
            sys.stdout.write("% automaton\n" + text)
    else:
        _emit(ns, text)
    return 0


def _cmd_member(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    language = _load_language(ns.language)
    target = _parse_term_arg(ns.target, "--to")
    if not is_ground(target):
        raise ParseError("--to: the term must be ground")
    automaton = descendants(trs, language, alphabet_of([target]))
    ok = accepts(automaton, target)
    _emit(ns, ("YES" if ok else "NO") + "\n")
    return 0 if ok else 1


def _cmd_reachable(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    source = _parse_term_arg(ns.source, "--from")
    target = _parse_term_arg(ns.target, "--to")
    text, code = _decision_output(reachable(trs, source, target, ns.bound))
    _emit(ns, text)
    return code


def _cmd_joinable(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    source = _parse_term_arg(ns.source, "--from")
    target = _parse_term_arg(ns.target, "--to")
    text, code = _decision_output(joinable(trs, source, target, ns.bound))
    _emit(ns, text)
    return code


def _cmd_convertible(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    source = _parse_term_arg(ns.source, "--from")
    target = _parse_term_arg(ns.target, "--to")
    if not ns.confluent:
        decision = Decision(
            UNKNOWN,
            "unsupported-trs: convertibility is decided only under the "
            "confluence assumption; pass --confluent to assert it",
        )
    else:
        decision = convertible_confluent(trs, source, target, ns.bound)
    text, code = _decision_output(decision)
    _emit(ns, text)
    return code


def _cmd_local_confluence(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    text, code = _decision_output(locally_confluent(trs, ns.bound))
    _emit(ns, text)
    return code


def _cmd_include(ns: argparse.Namespace) -> int:
    first = _load_trs(ns.trs)
    second = _load_trs(ns.trs2)
    text, code = _decision_output(relation_included(first, second, ns.bound))
    _emit(ns, text)
    return code


def _comparison_output(c) -> tuple[str, int]:
    if c.order is not None:
        return c.order.value.upper() + "\n", 0
    lines = [
        "UNKNOWN",
        f"forward {c.forward.verdict}: {c.forward.reason}",
        f"backward {c.backward.verdict}: {c.backward.reason}",
    ]
    return "\n".join(lines) + "\n", 2


def _cmd_compare(ns: argparse.Namespace) -> int:
    first = _load_trs(ns.trs)
    second = _load_trs(ns.trs2)
    text, code = _comparison_output(compare(first, second, ns.bound))
    _emit(ns, text)
    return code


def _cmd_compare_thue(ns: argparse.Namespace) -> int:
    first = _load_trs(ns.trs)
    second = _load_trs(ns.trs2)
    text, code = _comparison_output(compare_thue(first, second, ns.bound))
    _emit(ns, text)
    return code


def _cmd_minimal(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    text, code = _decision_output(minimal(trs, ns.bound))
    _emit(ns, text)
    return code


def _cmd_ground_include(ns: argparse.Namespace) -> int:
    first = _load_trs(ns.trs)
    second = _load_trs(ns.trs2)
    alpha = first.alphabet.union(second.alphabet)
    g = _resolve_symbol(alpha, ns.g, 1)
    sharp = _resolve_symbol(alpha, ns.sharp, 0)
    decision = ground_relation_included(first, second, g, sharp, ns.bound)
    text, code = _decision_output(decision)
    _emit(ns, text)
    return code


def _cmd_ground_minimal(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    g = _resolve_symbol(trs.alphabet, ns.g, 1)
    sharp = _resolve_symbol(trs.alphabet, ns.sharp, 0)
    text, code = _decision_output(ground_minimal(trs, g, sharp, ns.bound))
    _emit(ns, text)
    return code


def _cmd_closure(ns: argparse.Namespace) -> int:
    trs = _load_trs(ns.trs)
    language = _load_language(ns.language)
    bound = ns.bound if ns.bound is not None else 1000
    terms, complete = bounded_closure(trs, language, bound)
    lines = [term_text(t) for t in sorted(terms, key=term_key)]
    if not complete:
        lines.append("% incomplete")
    _emit(ns, "\n".join(lines) + "\n")
    return 0 if complete else 2


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _add_trs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trs", required=True, metavar="FILE", help="rewrite system file")


def _add_trs2(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--trs2", required=True, metavar="FILE", help="second rewrite system file"
    )


def _add_language(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--language",
        required=True,
        metavar="FILE",
        help="language file: one ground term per line",
    )


def _add_from_to(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="source", required=True, metavar="TERM")
    p.add_argument("--to", dest="target", required=True, metavar="TERM")


def _add_bound(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--bound",
        type=_nonneg,
        metavar="N",
        help="budget for the fallback closure search",
    )


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="FILE", help="write the output to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treedescent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="report the syntactic classes of a system")
    _add_trs(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser(
        "descendants", help="build the automaton of all descendants of a language"
    )
    _add_trs(p)
    _add_language(p)
    p.add_argument(
        "--trace", action="store_true", help="show the construction stages"
    )
    _add_out(p)
    p.set_defaults(handler=_cmd_descendants)

    p = sub.add_parser("member", help="is a ground term a descendant of the language")
    _add_trs(p)
    _add_language(p)
    p.add_argument("--to", dest="target", required=True, metavar="TERM")
    _add_out(p)
    p.set_defaults(handler=_cmd_member)

    p = sub.add_parser("reachable", help="does one term rewrite to another")
    _add_trs(p)
    _add_from_to(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_reachable)

    p = sub.add_parser("joinable", help="do two terms share a descendant")
    _add_trs(p)
    _add_from_to(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_joinable)

    p = sub.add_parser(
        "convertible", help="are two terms convertible (assuming confluence)"
    )
    _add_trs(p)
    _add_from_to(p)
    p.add_argument(
        "--confluent",
        action="store_true",
        help="assert that the system is confluent",
    )
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_convertible)

    p = sub.add_parser(
        "local-confluence", help="is every critical pair joinable"
    )
    _add_trs(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_local_confluence)

    p = sub.add_parser(
        "include", help="is the first relation included in the second"
    )
    _add_trs(p)
    _add_trs2(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_include)

    p = sub.add_parser("compare", help="compare two rewrite relations")
    _add_trs(p)
    _add_trs2(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser(
        "compare-thue", help="compare the congruences of two systems"
    )
    _add_trs(p)
    _add_trs2(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_compare_thue)

    p = sub.add_parser("minimal", help="is no rule simulated by the others")
    _add_trs(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_minimal)

    p = sub.add_parser(
        "ground-include",
        help="is the first ground relation included in the second",
    )
    _add_trs(p)
    _add_trs2(p)
    p.add_argument("--g", required=True, metavar="NAME", help="fresh encoding symbol")
    p.add_argument(
        "--sharp", required=True, metavar="NAME", help="irreducible anchor constant"
    )
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_ground_include)

    p = sub.add_parser(
        "ground-minimal", help="is no rule redundant on ground terms"
    )
    _add_trs(p)
    p.add_argument("--g", required=True, metavar="NAME", help="fresh encoding symbol")
    p.add_argument(
        "--sharp", required=True, metavar="NAME", help="irreducible anchor constant"
    )
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_ground_minimal)

    p = sub.add_parser(
        "closure", help="list the rewrite closure of a language, up to a budget"
    )
    _add_trs(p)
    _add_language(p)
    _add_bound(p)
    _add_out(p)
    p.set_defaults(handler=_cmd_closure)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return ns.handler(ns)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 65
    except (
        UnsupportedTrsError,
        BadEncodingError,
        TrsError,
        AutomatonError,
        TermError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
