"""End-to-end acceptance suite.

Each test checks one numbered acceptance criterion and reports a PASS or
FAIL line in the terminal summary.  The expected values are hand-derived
or come from independent oracles (exhaustive rewrite search, direct
enumeration), never from the code under test.
"""

import random
import time

import pytest

from treedescent import (
    Apply,
    Lambda,
    RankedAlphabet,
    Symbol,
    accepts,
    bta_text,
    classify,
    compare,
    compare_thue,
    convertible_confluent,
    bounded_closure,
    descendants,
    enumerate_terms,
    equivalent,
    fundamental_bta,
    ground_minimal,
    ground_relation_included,
    joinable,
    locally_confluent,
    minimal,
    parse_term,
    parse_trs,
    reachable,
    relation_included,
    saturate,
    state_for_term,
    successors,
    validate,
)
from treedescent.cli import main
from treedescent.decide import NO, UNKNOWN, YES, RelOrder
from treedescent.terms import App, Var, is_ground, is_linear, term_text, variables
from treedescent.rewriting import Rule

from conftest import (
    GOLDEN_LANGUAGE_TEXT,
    GOLDEN_TRS_TEXT,
    golden_expected_automaton,
    golden_language_upto,
    growing_systems,
    oracle_systems,
    random_ground_term,
    random_term,
    record_criterion,
)

MOVE_UP_TRS = "sig f:1 q:1 #:0\nf(q(x1)) -> q(f(x1))\n"


def t(text):
    return parse_term(text)


def s(text):
    return state_for_term(parse_term(text))


def test_criterion_1_golden_saturation():
    failures = []
    trs = parse_trs(GOLDEN_TRS_TEXT)
    start = time.perf_counter()
    result = saturate(trs, [t("g(#,#,#)")])
    elapsed = time.perf_counter() - start

    if result.injected != {t("#")}:
        failures.append(f"injected set is {sorted(map(term_text, result.injected))}")

    expected_support = {
        "#",
        "f(#)",
        "f(f(#))",
        "g(#,#,#)",
        "f(g(#,#,#))",
        "f(f(g(#,#,#)))",
        "g(g(#,#,#),#,g(#,#,#))",
        "f(g(g(#,#,#),#,g(#,#,#)))",
    }
    got_support = {term_text(u) for u in result.support}
    if got_support != expected_support:
        failures.append(f"support set differs: {sorted(got_support)}")

    sharp, f, g = Symbol("#", 0), Symbol("f", 1), Symbol("g", 3)
    expected_initial = {
        Apply(sharp, (), s("#")),
        Apply(f, (s("#"),), s("f(#)")),
        Apply(f, (s("f(#)"),), s("f(f(#))")),
        Apply(f, (s("g(#,#,#)"),), s("f(g(#,#,#))")),
        Apply(f, (s("f(g(#,#,#))"),), s("f(f(g(#,#,#)))")),
        Apply(
            f,
            (s("g(g(#,#,#),#,g(#,#,#))"),),
            s("f(g(g(#,#,#),#,g(#,#,#)))"),
        ),
        Apply(g, (s("#"), s("#"), s("#")), s("g(#,#,#)")),
        Apply(
            g,
            (s("g(#,#,#)"), s("#"), s("g(#,#,#)")),
            s("g(g(#,#,#),#,g(#,#,#))"),
        ),
    }
    if set(result.initial_transitions) != expected_initial:
        failures.append("initial transitions differ from the support automaton")

    expected_rounds = (
        frozenset(
            {
                Lambda(s("f(f(#))"), s("f(f(g(#,#,#)))")),
                Lambda(s("f(g(#,#,#))"), s("g(#,#,#)")),
            }
        ),
        frozenset(
            {
                Lambda(s("f(f(#))"), s("f(g(#,#,#))")),
                Lambda(s("f(f(#))"), s("g(#,#,#)")),
            }
        ),
        frozenset(),
    )
    if result.rounds != expected_rounds:
        failures.append(f"rounds differ: {result.rounds}")
    if result.round_count != 2:
        failures.append(f"round count is {result.round_count}, expected 2")
    if result.automaton.finals != {s("g(#,#,#)")}:
        failures.append("final states are not exactly the language state")
    if elapsed >= 1.0:
        failures.append(f"saturation took {elapsed:.2f}s, limit 1s")

    record_criterion(
        1,
        "golden system saturates to the hand-derived support, rounds, "
        "and fixpoint within 1s",
        failures,
    )


def test_criterion_2_golden_descendant_automaton():
    failures = []
    trs = parse_trs(GOLDEN_TRS_TEXT)
    start = time.perf_counter()
    aut = descendants(trs, [t("g(#,#,#)")])
    language = enumerate_terms(aut, 8)
    elapsed = time.perf_counter() - start

    expected = golden_expected_automaton()
    if bta_text(aut) != bta_text(expected):
        failures.append("trimmed automaton differs from the hand-coded one")
    if not equivalent(aut, expected):
        failures.append("languages of built and hand-coded automata differ")
    if language != golden_language_upto(8):
        failures.append(f"descendants up to height 8 differ ({len(language)} terms)")
    if elapsed >= 5.0:
        failures.append(f"construction took {elapsed:.2f}s, limit 5s")

    record_criterion(
        2,
        "golden descendant automaton equals the expected three-state "
        "automaton and its language to height 8 is exact within 5s",
        failures,
    )


def test_criterion_3_random_base_automata():
    failures = []
    rng = random.Random(321)
    pool = [
        Symbol("#", 0),
        Symbol("a", 0),
        Symbol("b", 0),
        Symbol("f", 1),
        Symbol("h", 1),
        Symbol("k", 2),
    ]
    for case in range(100):
        chosen = rng.sample(pool, rng.randint(1, 5))
        if not any(sym.arity == 0 for sym in chosen):
            chosen[0] = Symbol("#", 0)
        language = {
            random_ground_term(rng, chosen, rng.randint(0, 4))
            for _ in range(rng.randint(1, 6))
        }
        aut = fundamental_bta(sorted(language, key=term_text), RankedAlphabet(chosen))
        if not aut.is_deterministic:
            failures.append(f"case {case}: base automaton is nondeterministic")
        if enumerate_terms(aut, 4) != language:
            failures.append(f"case {case}: accepted language differs")
        if not all(accepts(aut, u) for u in language):
            failures.append(f"case {case}: a language term is rejected")
    record_criterion(
        3,
        "base automata of 100 random finite languages are deterministic "
        "and accept exactly the language",
        failures,
    )


def test_criterion_4_descendants_match_exhaustive_search():
    failures = []
    systems = oracle_systems()
    if len(systems) < 10:
        failures.append("fewer than 10 oracle systems")
    for name, trs, language in systems:
        closure, complete = bounded_closure(trs, language, 500)
        if not complete:
            failures.append(f"{name}: oracle closure not exhausted")
            continue
        aut = descendants(trs, language)
        oracle = fundamental_bta(sorted(closure, key=term_text), aut.alphabet)
        if not equivalent(aut, oracle):
            failures.append(f"{name}: descendant automaton differs from closure")
    record_criterion(
        4,
        "descendant automata agree with exhaustive rewrite closures on "
        "all finite oracle systems",
        failures,
    )


def test_criterion_5_descendant_languages_closed_under_rewriting():
    failures = []
    for name, trs, language in oracle_systems() + growing_systems():
        aut = descendants(trs, language)
        for u in language:
            if not accepts(aut, u):
                failures.append(f"{name}: input term {term_text(u)} rejected")
        for u in sorted(enumerate_terms(aut, 5), key=term_text):
            for v in successors(trs, u):
                if not accepts(aut, v):
                    failures.append(
                        f"{name}: successor {term_text(v)} of accepted "
                        f"{term_text(u)} rejected"
                    )
    record_criterion(
        5,
        "every descendant language contains the input terms and is "
        "closed under one-step rewriting",
        failures,
    )


def test_criterion_6_decision_suite():
    failures = []

    def expect(label, condition):
        if not condition:
            failures.append(label)

    golden = parse_trs(GOLDEN_TRS_TEXT)
    mover = parse_trs(MOVE_UP_TRS)
    join = parse_trs("a -> b\nc -> b")
    fork = parse_trs("a -> b\nc -> d")
    swap = parse_trs("k(x1,x2) -> k(x2,x1)")
    g1, anchor = Symbol("g1", 1), Symbol("$", 0)

    expect(
        "reachable yes",
        reachable(golden, t("g(#,#,#)"), t("f(f(f(#)))")).verdict == YES,
    )
    expect("reachable no", reachable(golden, t("g(#,#,#)"), t("f(#)")).verdict == NO)
    d = reachable(mover, t("f(q(#))"), t("q(f(#))"))
    expect(
        "reachable unknown",
        d.verdict == UNKNOWN and d.reason.startswith("unsupported-trs"),
    )
    expect(
        "reachable bounded",
        reachable(mover, t("f(q(#))"), t("q(f(#))"), bound=10).verdict == YES,
    )

    d = joinable(join, t("a"), t("c"))
    expect("joinable yes with witness", d.verdict == YES and d.witness == t("b"))
    expect("joinable no", joinable(fork, t("a"), t("c")).verdict == NO)
    d = convertible_confluent(join, t("a"), t("c"))
    expect(
        "convertible reason prefix",
        d.verdict == YES and d.reason.startswith("assuming confluence:"),
    )

    d = locally_confluent(golden)
    expect(
        "local confluence counterexample",
        d.verdict == NO
        and term_text(d.witness.left) == "f(f(x1))"
        and term_text(d.witness.right) == "f(f(f(g(x1,#,x1))))",
    )

    expect("golden minimal", minimal(golden).verdict == YES)
    expect("duplicate not minimal", minimal(parse_trs("a -> b\na -> b")).verdict == NO)

    expect(
        "inclusion through intermediate steps",
        relation_included(parse_trs("a -> b"), parse_trs("a -> c\nc -> b")).verdict
        == YES,
    )
    ab, abc = parse_trs("a -> b"), parse_trs("a -> b\nb -> c")
    expect("compare equal", compare(ab, ab).order is RelOrder.EQUAL)
    expect("compare subset", compare(ab, abc).order is RelOrder.SUBSET)
    expect("compare superset", compare(abc, ab).order is RelOrder.SUPERSET)
    expect(
        "compare incomparable",
        compare(ab, parse_trs("b -> a")).order is RelOrder.INCOMPARABLE,
    )
    expect(
        "congruence comparison",
        compare_thue(ab, parse_trs("b -> a")).order is RelOrder.EQUAL,
    )

    expect(
        "ground inclusion reflexive",
        ground_relation_included(swap, swap, g1, anchor).verdict == YES,
    )
    expect(
        "ground inclusion negative",
        ground_relation_included(
            swap, parse_trs("k(x1,x2) -> k(x1,x1)"), g1, anchor
        ).verdict
        == NO,
    )
    expect(
        "ground minimality",
        ground_minimal(parse_trs("f(x1) -> a\nf(a) -> a"), g1, anchor).verdict == NO,
    )

    record_criterion(
        6,
        "the fixed suite of reachability, joinability, confluence, "
        "inclusion, and minimality questions is answered correctly",
        failures,
    )


def test_criterion_7_classifier_lattice():
    failures = []

    def flags_tuple(trs_text):
        shape = classify(parse_trs(trs_text))
        return tuple(getattr(shape, name) for name in shape.FIELDS)

    # (left_linear, linear, ground, monadic, right_ground, murg,
    #  collapse_free, gsm)
    fixed = [
        (GOLDEN_TRS_TEXT, (True, False, False, False, False, False, True, True)),
        ("f(a) -> a", (True, True, True, True, True, True, True, True)),
        ("f(k(x1,x2)) -> f(x1)", (True, True, False, True, False, True, True, True)),
        ("f(x1) -> x1", (True, True, False, True, False, True, False, True)),
        (MOVE_UP_TRS, (True, True, False, False, False, False, True, False)),
        (
            "sig f:1 g:2 h:2 b:0 #:0 $:0\n# -> f(#)\n# -> b\n$ -> f($)\n"
            "$ -> b\ng(x1,x1) -> h(x1,x1)",
            (False, False, False, False, False, True, True, True),
        ),
    ]
    for text, expected in fixed:
        got = flags_tuple(text)
        if got != expected:
            failures.append(f"fixed system {text.splitlines()[-1]!r}: {got}")

    rng = random.Random(7)
    symbols = [Symbol("#", 0), Symbol("a", 0), Symbol("f", 1), Symbol("k", 2)]
    for case in range(1000):
        rules = []
        for _ in range(rng.randint(1, 3)):
            lhs = random_term(rng, symbols, 2, (1, 2))
            while isinstance(lhs, Var):
                lhs = random_term(rng, symbols, 2, (1, 2))
            allowed = tuple(sorted(variables(lhs)))
            rhs = random_term(rng, symbols, 2, allowed)
            rules.append(Rule(lhs, rhs))
        trs = validate(rules)
        shape = classify(trs)
        implications = [
            ("linear implies left_linear", shape.linear, shape.left_linear),
            ("ground implies right_ground", shape.ground, shape.right_ground),
            ("ground implies collapse_free", shape.ground, shape.collapse_free),
            ("monadic implies murg", shape.monadic, shape.murg),
            ("right_ground implies murg", shape.right_ground, shape.murg),
            ("murg implies gsm", shape.murg, shape.gsm),
        ]
        for label, premise, conclusion in implications:
            if premise and not conclusion:
                failures.append(f"case {case}: {label} fails for {trs.rules}")
        direct_collapse_free = all(
            not isinstance(r.rhs, Var) for r in trs.rules
        )
        if shape.collapse_free != direct_collapse_free:
            failures.append(f"case {case}: collapse_free flag wrong")
        direct_ground = all(
            is_ground(r.lhs) and is_ground(r.rhs) for r in trs.rules
        )
        if shape.ground != direct_ground:
            failures.append(f"case {case}: ground flag wrong")
        direct_left_linear = all(is_linear(r.lhs) for r in trs.rules)
        if shape.left_linear != direct_left_linear:
            failures.append(f"case {case}: left_linear flag wrong")
    record_criterion(
        7,
        "classifier satisfies the implication lattice on fixed systems "
        "and 1000 random systems",
        failures,
    )


def test_criterion_8_cli_determinism(tmp_path_factory, capsys):
    failures = []
    root = tmp_path_factory.mktemp("acceptance-cli")
    contents = {
        "golden.trs": GOLDEN_TRS_TEXT,
        "golden.lang": GOLDEN_LANGUAGE_TEXT,
        "ab.trs": "a -> b\n",
        "abc.trs": "a -> b\nb -> c\n",
        "ba.trs": "b -> a\n",
        "join.trs": "a -> b\nc -> b\n",
        "dup.trs": "a -> b\na -> b\n",
        "swap.trs": "k(x1,x2) -> k(x2,x1)\n",
        "redundant.trs": "f(x1) -> a\nf(a) -> a\n",
        "moveup.trs": MOVE_UP_TRS,
        "pump.trs": "# -> f(#)\n",
        "sharp.lang": "#\n",
        "a.lang": "a\n",
    }
    files = {}
    for name, text in contents.items():
        path = root / name
        path.write_text(text, encoding="utf-8")
        files[name] = str(path)

    matrix = [
        (["classify", "--trs", files["golden.trs"]], 0),
        (
            [
                "descendants",
                "--trs",
                files["golden.trs"],
                "--language",
                files["golden.lang"],
            ],
            0,
        ),
        (
            [
                "descendants",
                "--trs",
                files["golden.trs"],
                "--language",
                files["golden.lang"],
                "--trace",
            ],
            0,
        ),
        (
            [
                "member",
                "--trs",
                files["golden.trs"],
                "--language",
                files["golden.lang"],
                "--to",
                "f(f(#))",
            ],
            0,
        ),
        (
            [
                "member",
                "--trs",
                files["golden.trs"],
                "--language",
                files["golden.lang"],
                "--to",
                "f(#)",
            ],
            1,
        ),
        (
            ["reachable", "--trs", files["golden.trs"], "--from", "g(#,#,#)", "--to", "f(f(#))"],
            0,
        ),
        (
            ["reachable", "--trs", files["golden.trs"], "--from", "g(#,#,#)", "--to", "f(#)"],
            1,
        ),
        (
            ["reachable", "--trs", files["moveup.trs"], "--from", "f(q(#))", "--to", "q(f(#))"],
            2,
        ),
        (["joinable", "--trs", files["join.trs"], "--from", "a", "--to", "c"], 0),
        (
            ["convertible", "--trs", files["join.trs"], "--from", "a", "--to", "c"],
            2,
        ),
        (
            [
                "convertible",
                "--trs",
                files["join.trs"],
                "--from",
                "a",
                "--to",
                "c",
                "--confluent",
            ],
            0,
        ),
        (["local-confluence", "--trs", files["golden.trs"]], 1),
        (["include", "--trs", files["ab.trs"], "--trs2", files["abc.trs"]], 0),
        (["include", "--trs", files["abc.trs"], "--trs2", files["ab.trs"]], 1),
        (["compare", "--trs", files["ab.trs"], "--trs2", files["abc.trs"]], 0),
        (["compare", "--trs", files["ab.trs"], "--trs2", files["moveup.trs"]], 2),
        (["compare-thue", "--trs", files["ab.trs"], "--trs2", files["ba.trs"]], 0),
        (["minimal", "--trs", files["golden.trs"]], 0),
        (["minimal", "--trs", files["dup.trs"]], 1),
        (
            [
                "ground-include",
                "--trs",
                files["swap.trs"],
                "--trs2",
                files["swap.trs"],
                "--g",
                "g",
                "--sharp",
                "#",
            ],
            0,
        ),
        (
            [
                "ground-minimal",
                "--trs",
                files["redundant.trs"],
                "--g",
                "g",
                "--sharp",
                "$",
            ],
            1,
        ),
        (["closure", "--trs", files["ab.trs"], "--language", files["a.lang"]], 0),
        (
            [
                "closure",
                "--trs",
                files["pump.trs"],
                "--language",
                files["sharp.lang"],
                "--bound",
                "3",
            ],
            2,
        ),
    ]

    def run(argv):
        code = main(argv)
        out, err = capsys.readouterr()
        return code, out, err

    for argv, expected_code in matrix:
        label = " ".join(argv[:1] + argv[-2:])
        first = run(argv)
        second = run(argv)
        if first != second:
            failures.append(f"{label}: two runs differ")
        if first[0] != expected_code:
            failures.append(
                f"{label}: exit code {first[0]}, expected {expected_code}"
            )
        if not first[1].endswith("\n"):
            failures.append(f"{label}: output does not end with a newline")
    record_criterion(
        8,
        "all CLI commands are byte-deterministic across repeated runs "
        "and use the documented exit codes",
        failures,
    )
