"""Shared fixtures: the golden example, oracle systems, term strategies."""

from __future__ import annotations

import random

import pytest
from hypothesis import settings
import hypothesis.strategies as st

from treedescent import (
    App,
    Apply,
    Bta,
    RankedAlphabet,
    Symbol,
    Term,
    Trs,
    Var,
    parse_term,
    parse_trs,
    validate,
)
from treedescent.automata import state_for_term
from treedescent.terms import variables

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")


# One saturation round of this system feeds the next: the first rule peels
# a g below two f's, the second rebuilds an f above a g.
GOLDEN_TRS_TEXT = """\
f(f(g(x1,#,#))) -> f(f(x1))
g(x1,x2,#) -> f(g(x1,#,x1))
"""

GOLDEN_LANGUAGE_TEXT = "g(#,#,#)\n"


@pytest.fixture
def golden_trs() -> Trs:
    return parse_trs(GOLDEN_TRS_TEXT)


@pytest.fixture
def golden_language() -> list[Term]:
    return [parse_term("g(#,#,#)")]


def golden_expected_automaton() -> Bta:
    """Hand-coded automaton for the golden descendant language.

    Accepts f^n(g(#,#,#)) for n >= 0 and f^n(#) for n >= 2.
    """
    sharp = Symbol("#", 0)
    f = Symbol("f", 1)
    g = Symbol("g", 3)
    q_sharp = state_for_term(parse_term("#"))
    q_f = state_for_term(parse_term("f(#)"))
    q_g = state_for_term(parse_term("g(#,#,#)"))
    return Bta(
        RankedAlphabet([sharp, f, g]),
        [q_sharp, q_f, q_g],
        [
            Apply(sharp, (), q_sharp),
            Apply(f, (q_sharp,), q_f),
            Apply(f, (q_f,), q_g),
            Apply(f, (q_g,), q_g),
            Apply(g, (q_sharp, q_sharp, q_sharp), q_g),
        ],
        [q_g],
    )


def golden_language_upto(max_height: int) -> set[Term]:
    """The golden descendant terms up to the given height."""

    def wrap(n: int, core: str) -> Term:
        text = core
        for _ in range(n):
            text = f"f({text})"
        return parse_term(text)

    out = {wrap(n, "g(#,#,#)") for n in range(max_height)}
    out |= {wrap(n, "#") for n in range(2, max_height + 1)}
    return out


# Left-linear GSM systems whose closures of the paired languages are
# finite, so an exhaustive rewrite search is an independent oracle.
ORACLE_FIXTURES: list[tuple[str, str, list[str]]] = [
    ("duplicate-right", "f(x1,#) -> f(x1,x1)", ["f(f(#,#),#)"]),
    ("single-step", "a -> b", ["a"]),
    ("chain", "a -> b\nb -> c", ["a", "c"]),
    ("under-context", "a -> b", ["k(a,a)"]),
    ("collapse-to-constant", "f(x1) -> a", ["f(f(a))"]),
    ("peel", "f(g(x1)) -> g(x1)", ["f(g(a))"]),
    ("erase-wrapper", "f(x1) -> x1", ["f(f(a))"]),
    ("grow-then-crush", "a -> f(b)\nf(x1) -> b", ["a"]),
    ("branch", "a -> b\na -> c", ["a"]),
    ("swap", "k(x1,x2) -> k(x2,x1)", ["k(a,b)"]),
    ("duplicate-under", "f(x1) -> k(x1,x1)", ["f(a)"]),
]


def oracle_systems() -> list[tuple[str, Trs, list[Term]]]:
    return [
        (name, parse_trs(rules), [parse_term(t) for t in terms])
        for name, rules, terms in ORACLE_FIXTURES
    ]


# Systems with infinite descendant languages, for closure properties.
GROWING_FIXTURES: list[tuple[str, str, list[str]]] = [
    ("golden", GOLDEN_TRS_TEXT, ["g(#,#,#)"]),
    ("pump", "# -> f(#)", ["#"]),
    ("two-seeds", "a -> f(a)\nb -> f(f(b))", ["k(a,b)"]),
]


def growing_systems() -> list[tuple[str, Trs, list[Term]]]:
    return [
        (name, parse_trs(rules), [parse_term(t) for t in terms])
        for name, rules, terms in GROWING_FIXTURES
    ]


# --- hypothesis strategies ---------------------------------------------

_SHARP = Symbol("#", 0)
_A = Symbol("a", 0)
_F = Symbol("f", 1)
_K = Symbol("k", 2)


def terms(var_indices: tuple[int, ...] = (1, 2, 3)) -> st.SearchStrategy[Term]:
    """Random terms over #/0, a/0, f/1, k/2 and the given variables."""
    leaves = [st.just(App(_SHARP)), st.just(App(_A))]
    if var_indices:
        leaves.append(st.sampled_from(var_indices).map(Var))
    base = st.one_of(*leaves)

    def extend(children: st.SearchStrategy[Term]) -> st.SearchStrategy[Term]:
        return st.one_of(
            children.map(lambda t: App(_F, (t,))),
            st.tuples(children, children).map(lambda p: App(_K, p)),
        )

    return st.recursive(base, extend, max_leaves=6)


def ground_terms() -> st.SearchStrategy[Term]:
    return terms(var_indices=())


@st.composite
def rule_systems(draw) -> Trs:
    """Random small systems with valid rules over the shared alphabet."""
    count = draw(st.integers(min_value=1, max_value=3))
    rules = []
    for _ in range(count):
        lhs = draw(terms().filter(lambda t: isinstance(t, App)))
        allowed = tuple(sorted(variables(lhs)))
        rhs = draw(terms(var_indices=allowed))
        rules.append((lhs, rhs))
    return validate(rules)


# --- plain random generators (seeded, for exact-count checks) ----------


def random_ground_term(
    rng: random.Random, symbols: list[Symbol], max_height: int
) -> Term:
    constants = [s for s in symbols if s.arity == 0]
    if max_height == 0:
        return App(rng.choice(constants))
    sym = rng.choice(symbols)
    if sym.arity == 0:
        return App(sym)
    children = tuple(
        random_ground_term(rng, symbols, max_height - 1) for _ in range(sym.arity)
    )
    return App(sym, children)


def random_term(
    rng: random.Random,
    symbols: list[Symbol],
    max_height: int,
    var_indices: tuple[int, ...],
) -> Term:
    if max_height == 0:
        leaves: list[Term] = [App(s) for s in symbols if s.arity == 0]
        leaves += [Var(i) for i in var_indices]
        return rng.choice(leaves)
    if var_indices and rng.random() < 0.25:
        return Var(rng.choice(var_indices))
    sym = rng.choice(symbols)
    children = tuple(
        random_term(rng, symbols, max_height - 1, var_indices)
        for _ in range(sym.arity)
    )
    return App(sym, children)


# --- acceptance criterion reporting ------------------------------------

_criteria: list[tuple[int, str, bool]] = []


def record_criterion(number: int, description: str, failures: list[str]) -> None:
    """Record a criterion outcome and fail the test on any failure."""
    _criteria.append((number, description, not failures))
    assert not failures, f"criterion {number} ({description}): " + "; ".join(failures)


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, ok in sorted(_criteria):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number}: {description}")
