"""Descendant-set automata for left-linear generalized semi-monadic systems.

Given such a system and a finite set of ground terms, the functions here
build a bottom-up tree automaton accepting exactly the descendants: all
terms reachable from the set by any number of rewrite steps.  The
construction starts from the automaton of a finite support set and adds
epsilon transitions round by round until nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Optional

from .terms import (
    RankedAlphabet,
    Term,
    Var,
    alphabet_of,
    apply,
    is_ground,
    is_linear,
    max_var_index,
    mgu,
    positions,
    subterm_at,
    subterms,
    supertrees,
    term_key,
)
from .rewriting import (
    GsmViolation,
    Trs,
    classify,
    disjoint_union,
    gsm_violation_text,
    is_gsm,
)
from .automata import (
    Bta,
    Lambda,
    StateLeaf,
    Transition,
    eliminate_lambda,
    fundamental_bta,
    is_finite_language,
    language_terms,
    reachable_states,
    state_for_term,
    trim,
)


class UnsupportedTrsError(Exception):
    """The system falls outside the class this construction handles."""

    def __init__(self, reason: str, violation: Optional[GsmViolation] = None):
        super().__init__(reason)
        self.reason = reason
        self.violation = violation


def _require_left_linear(trs: Trs) -> None:
    for k, rule in enumerate(trs.rules, start=1):
        if not is_linear(rule.lhs):
            raise UnsupportedTrsError(f"rule {k} is not left-linear")


def _require_gsm(trs: Trs) -> None:
    _require_left_linear(trs)
    ok, violation = is_gsm(trs)
    if not ok:
        assert violation is not None
        raise UnsupportedTrsError(
            "the system is not generalized semi-monadic: "
            + gsm_violation_text(violation),
            violation,
        )


def injected_ground_terms(trs: Trs) -> set[Term]:
    """Ground terms that rule overlaps can push under a left-hand side.

    For every pair of rules, every pairing of a right-hand-side position
    with a left-hand-side position where one of the two is the root, and
    every supertree of the covered left-hand-side part: if the right-hand
    side piece unifies with the supertree, collect the ground terms the
    unifier assigns to supertree positions that cover a variable.  These
    terms can sit below a redex even when no input term put them there,
    so the support set must account for them.
    """
    _require_left_linear(trs)
    out: set[Term] = set()
    for source in trs.rules:
        fresh_from = max_var_index(source.lhs) + 1
        rhs_positions = sorted(positions(source.rhs))
        for target in trs.rules:
            lhs_positions = sorted(positions(target.lhs))
            pairings = [(a, ()) for a in rhs_positions]
            pairings += [((), b) for b in lhs_positions if b != ()]
            for alpha, beta in pairings:
                covered = subterm_at(target.lhs, beta)
                if isinstance(covered, Var):
                    continue
                var_positions = [
                    g
                    for g in sorted(positions(covered))
                    if isinstance(subterm_at(covered, g), Var)
                ]
                if not var_positions:
                    continue
                piece = subterm_at(source.rhs, alpha)
                for tree in supertrees(covered, fresh_from):
                    sigma = mgu(piece, tree)
                    if sigma is None:
                        continue
                    tree_positions = positions(tree)
                    for gamma in var_positions:
                        if gamma not in tree_positions:
                            continue
                        image = apply(sigma, subterm_at(tree, gamma))
                        if is_ground(image):
                            out.add(image)
    return out


def _filler_pool(language: Iterable[Term], injected: Iterable[Term]) -> list[Term]:
    # All subterms of the language and of the injected ground terms, in
    # canonical order: the values a left-hand-side variable may take.
    pool: set[Term] = set()
    for t in language:
        pool |= subterms(t)
    for e in injected:
        pool |= subterms(e)
    return sorted(pool, key=term_key)


def support_terms(
    trs: Trs, language: Iterable[Term], injected: Optional[set[Term]] = None
) -> set[Term]:
    """The finite support set whose subterms index the automaton states.

    It contains every subterm of the language, plus every instance of a
    right-hand-side subtree whose variables are filled with subterms of
    the language or of the injected ground terms.
    """
    _require_left_linear(trs)
    if injected is None:
        injected = injected_ground_terms(trs)
    terms = list(language)
    pool = _filler_pool(terms, injected)
    out: set[Term] = set()
    for t in terms:
        out |= subterms(t)
    for rule in trs.rules:
        n = max_var_index(rule.lhs)
        pieces = sorted(subterms(rule.rhs), key=term_key)
        for combo in product(pool, repeat=n):
            sigma = {i + 1: e for i, e in enumerate(combo)}
            for piece in pieces:
                out.add(apply(sigma, piece))
    return out


@dataclass(frozen=True)
class SaturationResult:
    """The saturated automaton together with how it was built.

    automaton accepts the descendants of the language; rounds holds the
    epsilon transitions added per saturation round, ending with the empty
    round that witnesses the fixpoint; injected and support are the
    auxiliary term sets the construction is based on.
    """

    automaton: Bta
    rounds: tuple[frozenset[Lambda], ...]
    injected: frozenset[Term]
    support: frozenset[Term]

    @cached_property
    def initial_transitions(self) -> frozenset[Transition]:
        """The transitions of the support automaton, before any round."""
        added: set[Transition] = set()
        for inc in self.rounds:
            added |= inc
        return frozenset(self.automaton.transitions - added)

    @property
    def round_count(self) -> int:
        """Number of rounds that added transitions."""
        return len(self.rounds) - 1


def saturate(
    trs: Trs,
    language: Iterable[Term],
    alphabet: Optional[RankedAlphabet] = None,
) -> SaturationResult:
    """Saturate the support automaton of a left-linear GSM system.

    Starting from the automaton of the support set (final states: the
    language terms), each round evaluates every left-hand side whose
    variables are filled with states of support subterms; whenever the
    filled left-hand side reaches a state c, an epsilon transition from
    the state of the correspondingly filled right-hand side to c is
    added.  The language of the fixpoint automaton is the descendant set.
    """
    _require_gsm(trs)
    terms = list(language)
    injected = injected_ground_terms(trs)
    support = support_terms(trs, terms, injected)
    alpha = trs.alphabet.union(alphabet_of(support))
    alpha = alpha.union(alphabet_of(terms))
    if alphabet is not None:
        alpha = alpha.union(alphabet)
    base = fundamental_bta(sorted(support, key=term_key), alpha)
    finals = [state_for_term(t) for t in terms]
    fillers = _filler_pool(terms, injected)
    for e in fillers:
        # support_terms must cover every filler subterm
        assert state_for_term(e) in base.states, f"support misses {term_key(e)}"
    current: set[Transition] = set(base.transitions)
    rounds: list[frozenset[Lambda]] = []
    while True:
        automaton = Bta(alpha, base.states, current, finals)
        fresh: set[Lambda] = set()
        for rule in trs.rules:
            n = max_var_index(rule.lhs)
            for combo in product(fillers, repeat=n):
                staged = apply(
                    {i + 1: StateLeaf(state_for_term(e)) for i, e in enumerate(combo)},
                    rule.lhs,
                )
                targets = reachable_states(automaton, staged)
                if not targets:
                    continue
                filled = apply({i + 1: e for i, e in enumerate(combo)}, rule.rhs)
                source = state_for_term(filled)
                for target in targets:
                    if target == source:
                        continue  # a self-loop never changes the language
                    lam = Lambda(source, target)
                    if lam not in current:
                        fresh.add(lam)
        rounds.append(frozenset(fresh))
        if not fresh:
            break
        current |= fresh
    automaton = Bta(alpha, base.states, current, finals)
    return SaturationResult(
        automaton, tuple(rounds), frozenset(injected), frozenset(support)
    )


def descendants(
    trs: Trs,
    language: Iterable[Term],
    alphabet: Optional[RankedAlphabet] = None,
) -> Bta:
    """A trimmed epsilon-free automaton accepting the descendant set."""
    result = saturate(trs, language, alphabet)
    return trim(eliminate_lambda(result.automaton))


def descendants_disjoint_union(
    first: Trs,
    second: Trs,
    language: Iterable[Term],
    alphabet: Optional[RankedAlphabet] = None,
) -> Bta:
    """Descendants under the union of two signature-disjoint systems.

    Both systems must be linear and collapse-free; then rewriting with
    the union equals rewriting with the first system followed by the
    second, so the descendants can be computed in two stages when the
    first stage yields a finite language, and in one saturation of the
    combined system when that system is itself left-linear GSM.
    """
    for name, side in (("first", first), ("second", second)):
        shape = classify(side)
        if not shape.linear:
            raise UnsupportedTrsError(f"the {name} system is not linear")
        if not shape.collapse_free:
            raise UnsupportedTrsError(f"the {name} system is not collapse-free")
    combined = disjoint_union(first, second)  # checks signature disjointness
    terms = list(language)
    gamma = first.alphabet.union(second.alphabet).union(alphabet_of(terms))
    if alphabet is not None:
        gamma = gamma.union(alphabet)
    if is_linear_gsm(first):
        stage_one = descendants(first, terms, gamma)
        if is_finite_language(stage_one):
            middle = sorted(language_terms(stage_one), key=term_key)
            return descendants(second, middle, gamma)
    ok, violation = is_gsm(combined)
    if ok:
        return descendants(combined, terms, gamma)
    assert violation is not None
    raise UnsupportedTrsError(
        "the combined system is not generalized semi-monadic: "
        + gsm_violation_text(violation),
        violation,
    )


def is_linear_gsm(trs: Trs) -> bool:
    """Whether the construction applies to the system directly."""
    return all(is_linear(r.lhs) for r in trs.rules) and is_gsm(trs)[0]
