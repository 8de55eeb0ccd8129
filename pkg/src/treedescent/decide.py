"""Decision procedures on top of the descendant-set construction.

Each procedure returns a Decision with verdict yes, no or unknown; an
unknown decision carries a machine-readable reason starting with
"unsupported-trs" (the system falls outside the decidable class and no
search bound was given) or "bound-exhausted" (the bounded search ran
out of budget).  Questions about terms with variables are reduced to
ground questions by replacing each variable with a fresh constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

from .terms import (
    App,
    ArityMismatchError,
    BadEncodingError,
    RankedAlphabet,
    Symbol,
    Term,
    alphabet_of,
    from_ground_z,
    fresh_symbol_pool,
    height,
    is_linear,
    max_var_index,
    term_key,
    term_text,
    to_ground_g,
    to_ground_z,
)
from .rewriting import (
    CriticalPair,
    Rule,
    Trs,
    bounded_closure,
    critical_pair_text,
    critical_pairs,
    gsm_violation_text,
    invert,
    is_gsm,
    rule_text,
    union,
)
from .automata import accepts, intersection, is_empty, shortest_accepted
from .completion import descendants

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

Witness = Union[Term, CriticalPair, Rule, None]


@dataclass(frozen=True)
class Decision:
    """Outcome of a decision procedure."""

    verdict: str
    reason: str
    witness: Witness = None


def _yes(reason: str, witness: Witness = None) -> Decision:
    return Decision(YES, reason, witness)


def _no(reason: str, witness: Witness = None) -> Decision:
    return Decision(NO, reason, witness)


def _unknown(reason: str) -> Decision:
    return Decision(UNKNOWN, reason)


class RelOrder(Enum):
    """How two rewrite relations compare."""

    EQUAL = "equal"
    SUBSET = "subset"
    SUPERSET = "superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Comparison:
    """Four-way comparison of two rewrite relations.

    order is None when one of the inclusions is unknown; forward is the
    decision for first-included-in-second, backward for the converse.
    """

    order: Optional[RelOrder]
    forward: Decision
    backward: Decision


def witness_text(witness: Witness) -> str:
    if isinstance(witness, CriticalPair):
        return critical_pair_text(witness)
    if isinstance(witness, Rule):
        return rule_text(witness)
    if isinstance(witness, Term):
        return term_text(witness)
    return str(witness)


def _gsm_reason(trs: Trs) -> Optional[str]:
    # None when the exact construction applies, else why it does not.
    for k, rule in enumerate(trs.rules, start=1):
        if not is_linear(rule.lhs):
            return f"rule {k} is not left-linear"
    ok, violation = is_gsm(trs)
    if not ok:
        assert violation is not None
        return "not generalized semi-monadic: " + gsm_violation_text(violation)
    return None


def _grounded(
    trs: Trs, terms: Sequence[Term]
) -> tuple[Trs, list[Term], list[Symbol]]:
    # Replace the variables of the given terms by fresh shared constants
    # so that reachability and joinability questions become ground.
    count = max((max_var_index(t) for t in terms), default=0)
    alpha = trs.alphabet.union(alphabet_of(terms))
    pool = fresh_symbol_pool(alpha, count)
    alpha = alpha.union(RankedAlphabet(pool))
    grounded = [to_ground_z(t, pool) for t in terms]
    return Trs(trs.rules, alpha), grounded, pool


def reachable(
    trs: Trs, source: Term, target: Term, bound: Optional[int] = None
) -> Decision:
    """Can source rewrite to target in any number of steps?

    Variables are treated as shared fresh constants.  For a left-linear
    GSM system the answer is exact; otherwise a bounded closure search
    is attempted when a bound is given.
    """
    system, (src, dst), _ = _grounded(trs, [source, target])
    why = _gsm_reason(trs)
    if why is None:
        automaton = descendants(system, [src])
        if accepts(automaton, dst):
            return _yes("the descendant automaton accepts the target")
        return _no("the descendant automaton rejects the target")
    if bound is None:
        return _unknown(f"unsupported-trs: {why}")
    closure, complete = bounded_closure(system, [src], bound)
    if dst in closure:
        return _yes("the target appeared in the bounded closure")
    if complete:
        return _no("the full closure was explored and misses the target")
    return _unknown(f"bound-exhausted: closure cut off after {bound} new terms")


def joinable(
    trs: Trs, left: Term, right: Term, bound: Optional[int] = None
) -> Decision:
    """Do left and right rewrite to some common term?

    On yes, the witness is a smallest common descendant (with the
    original variables restored).
    """
    system, (lt, rt), pool = _grounded(trs, [left, right])
    why = _gsm_reason(trs)
    if why is None:
        common = intersection(descendants(system, [lt]), descendants(system, [rt]))
        if is_empty(common):
            return _no("the descendant languages do not intersect")
        meet = shortest_accepted(common)
        assert meet is not None
        return _yes(
            "the descendant languages intersect", from_ground_z(meet, pool)
        )
    if bound is None:
        return _unknown(f"unsupported-trs: {why}")
    left_closure, left_done = bounded_closure(system, [lt], bound)
    right_closure, right_done = bounded_closure(system, [rt], bound)
    meet_set = left_closure & right_closure
    if meet_set:
        meet = min(meet_set, key=lambda u: (height(u), term_key(u)))
        return _yes("the bounded closures intersect", from_ground_z(meet, pool))
    if left_done and right_done:
        return _no("the full closures were explored and do not intersect")
    return _unknown(f"bound-exhausted: closures cut off after {bound} new terms")


def convertible_confluent(
    trs: Trs, left: Term, right: Term, bound: Optional[int] = None
) -> Decision:
    """Are left and right convertible, assuming the system is confluent?

    Under confluence, convertibility coincides with joinability.
    """
    d = joinable(trs, left, right, bound)
    return Decision(d.verdict, "assuming confluence: " + d.reason, d.witness)


def locally_confluent(trs: Trs, bound: Optional[int] = None) -> Decision:
    """Is every one-step divergence joinable?

    Checks joinability of all critical pairs; on no, the witness is a
    non-joinable critical pair.
    """
    pairs = sorted(critical_pairs(trs), key=lambda cp: cp.origin)
    pending: Optional[str] = None
    for cp in pairs:
        d = joinable(trs, cp.left, cp.right, bound)
        if d.verdict == NO:
            return _no(
                f"critical pair {critical_pair_text(cp)} is not joinable", cp
            )
        if d.verdict == UNKNOWN and pending is None:
            pending = d.reason
    if pending is not None:
        return _unknown(pending)
    return _yes(f"all {len(pairs)} critical pairs are joinable")


def relation_included(
    first: Trs, second: Trs, bound: Optional[int] = None
) -> Decision:
    """Is every rewrite of the first system also a rewrite of the second?

    Inclusion of the reflexive-transitive relations holds exactly when
    for every rule of the first system, the grounded right-hand side is
    a descendant of the grounded left-hand side under the second system.
    On no, the witness is a first-system rule that is not simulated.
    """
    alpha = first.alphabet.union(second.alphabet)
    count = max((max_var_index(r.lhs) for r in first.rules), default=0)
    pool = fresh_symbol_pool(alpha, count)
    alpha = alpha.union(RankedAlphabet(pool))
    simulator = Trs(second.rules, alpha)
    why = _gsm_reason(second)
    if why is not None and bound is None:
        return _unknown(f"unsupported-trs: {why}")
    pending: Optional[str] = None
    for k, rule in enumerate(first.rules, start=1):
        lhs = to_ground_z(rule.lhs, pool)
        rhs = to_ground_z(rule.rhs, pool)
        if why is None:
            if not accepts(descendants(simulator, [lhs]), rhs):
                return _no(f"rule {k} is not simulated", rule)
            continue
        assert bound is not None
        closure, complete = bounded_closure(simulator, [lhs], bound)
        if rhs in closure:
            continue
        if complete:
            return _no(f"rule {k} is not simulated", rule)
        if pending is None:
            pending = f"bound-exhausted: rule {k} undecided within {bound} new terms"
    if pending is not None:
        return _unknown(pending)
    return _yes("every rule of the first system is simulated by the second")


def _order_of(forward: Decision, backward: Decision) -> Optional[RelOrder]:
    if UNKNOWN in (forward.verdict, backward.verdict):
        return None
    table = {
        (YES, YES): RelOrder.EQUAL,
        (YES, NO): RelOrder.SUBSET,
        (NO, YES): RelOrder.SUPERSET,
        (NO, NO): RelOrder.INCOMPARABLE,
    }
    return table[(forward.verdict, backward.verdict)]


def compare(first: Trs, second: Trs, bound: Optional[int] = None) -> Comparison:
    """Compare the reflexive-transitive rewrite relations of two systems."""
    forward = relation_included(first, second, bound)
    backward = relation_included(second, first, bound)
    return Comparison(_order_of(forward, backward), forward, backward)


def compare_thue(first: Trs, second: Trs, bound: Optional[int] = None) -> Comparison:
    """Compare the congruences generated by two systems.

    Each system is symmetrized by adding the reversed rules, so the
    comparison is between the induced convertibility relations.  A system
    whose reversal is not a valid system cannot be symmetrized.
    """
    sym_first = union(first, invert(first))
    sym_second = union(second, invert(second))
    return compare(sym_first, sym_second, bound)


def minimal(trs: Trs, bound: Optional[int] = None) -> Decision:
    """Is no rule redundant?

    A rule is redundant when the remaining rules already simulate it; on
    no, the witness is such a rule.
    """
    pending: Optional[str] = None
    for k, rule in enumerate(trs.rules):
        rest = Trs(trs.rules[:k] + trs.rules[k + 1 :], trs.alphabet)
        single = Trs((rule,), trs.alphabet)
        d = relation_included(single, rest, bound)
        if d.verdict == YES:
            return _no(
                f"rule {k + 1} ({rule_text(rule)}) is simulated by the others",
                rule,
            )
        if d.verdict == UNKNOWN and pending is None:
            pending = d.reason
    if pending is not None:
        return _unknown(pending)
    return _yes("no rule is simulated by the remaining rules")


def _check_ground_encoding(first: Trs, second: Trs, g: Symbol, sharp: Symbol) -> None:
    if g.arity < 1:
        raise BadEncodingError(f"encoding symbol {g.name} must have arity >= 1")
    if sharp.arity != 0:
        raise BadEncodingError(f"anchor symbol {sharp.name} must be a constant")
    used = {s.name for s in first.sign} | {s.name for s in second.sign}
    if g.name in used:
        raise BadEncodingError(
            f"encoding symbol {g.name} occurs in the rewrite rules"
        )
    for side in (first, second):
        for rule in side.rules:
            if rule.lhs == App(sharp):
                raise BadEncodingError(
                    f"anchor symbol {sharp.name} is rewritten by a rule"
                )


def ground_relation_included(
    first: Trs,
    second: Trs,
    g: Symbol,
    sharp: Symbol,
    bound: Optional[int] = None,
) -> Decision:
    """Is the first ground rewrite relation included in the second's?

    Variables are encoded as towers of the fresh symbol g over the
    irreducible constant sharp, which captures inclusion of the rewrite
    relations restricted to ground terms.  g must not occur in either
    system and sharp must not be rewritten.
    """
    _check_ground_encoding(first, second, g, sharp)
    try:
        alpha = first.alphabet.union(second.alphabet).union(
            RankedAlphabet([g, sharp])
        )
    except ArityMismatchError as exc:
        raise BadEncodingError(str(exc)) from exc
    simulator = Trs(second.rules, alpha)
    why = _gsm_reason(second)
    if why is not None and bound is None:
        return _unknown(f"unsupported-trs: {why}")
    pending: Optional[str] = None
    for k, rule in enumerate(first.rules, start=1):
        lhs = to_ground_g(rule.lhs, g, sharp)
        rhs = to_ground_g(rule.rhs, g, sharp)
        if why is None:
            if not accepts(descendants(simulator, [lhs]), rhs):
                return _no(f"rule {k} is not simulated on ground terms", rule)
            continue
        assert bound is not None
        closure, complete = bounded_closure(simulator, [lhs], bound)
        if rhs in closure:
            continue
        if complete:
            return _no(f"rule {k} is not simulated on ground terms", rule)
        if pending is None:
            pending = f"bound-exhausted: rule {k} undecided within {bound} new terms"
    if pending is not None:
        return _unknown(pending)
    return _yes("every rule of the first system is simulated on ground terms")


def ground_minimal(
    trs: Trs, g: Symbol, sharp: Symbol, bound: Optional[int] = None
) -> Decision:
    """Is no rule redundant for rewriting ground terms?"""
    pending: Optional[str] = None
    for k, rule in enumerate(trs.rules):
        rest = Trs(trs.rules[:k] + trs.rules[k + 1 :], trs.alphabet)
        single = Trs((rule,), trs.alphabet)
        d = ground_relation_included(single, rest, g, sharp, bound)
        if d.verdict == YES:
            return _no(
                f"rule {k + 1} ({rule_text(rule)}) is simulated on ground "
                "terms by the others",
                rule,
            )
        if d.verdict == UNKNOWN and pending is None:
            pending = d.reason
    if pending is not None:
        return _unknown(pending)
    return _yes("no rule is simulated on ground terms by the remaining rules")
