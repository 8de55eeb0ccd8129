"""Term rewrite systems: validation, classification, rewriting, overlaps.

A rewrite system is a finite sequence of rules l -> r where l is not a
variable and every variable of r occurs in l.  Rules are stored with
normalized variable names: x1, x2, ... in order of first occurrence in
the left-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .terms import (
    ArityMismatchError,
    ParseError,
    Position,
    RankedAlphabet,
    Symbol,
    Term,
    Var,
    alphabet_of,
    apply,
    height,
    is_ground,
    is_linear,
    match,
    max_var_index,
    mgu,
    parse_term,
    positions,
    replace_at,
    shift_variables,
    subterm_at,
    supertrees,
    symbols_in,
    term_key,
    term_text,
    variable_occurrences,
    variables,
)


class TrsError(Exception):
    """Base class for rewrite-system errors."""


class VariableLhsError(TrsError):
    """A rule's left-hand side is a bare variable."""


class FreeVariableError(TrsError):
    """A rule's right-hand side uses a variable absent from the left."""


class UnknownSymbolError(TrsError):
    """A rule uses a symbol missing from the declared alphabet."""


class NotInvertibleError(TrsError):
    """The reversed rules would not form a valid rewrite system."""


class AlphabetsNotDisjointError(TrsError):
    """Two systems required to have disjoint signatures share a symbol."""


@dataclass(frozen=True)
class Rule:
    """A rewrite rule lhs -> rhs."""

    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        return rule_text(self)


def rule_text(rule: Rule) -> str:
    return f"{term_text(rule.lhs)} -> {term_text(rule.rhs)}"


@dataclass(frozen=True)
class Trs:
    """A rewrite system: an ordered tuple of rules over an alphabet.

    Duplicate rules are kept; order is preserved for deterministic
    iteration and for naming rules in messages (1-based indices).
    """

    rules: tuple[Rule, ...]
    alphabet: RankedAlphabet

    @cached_property
    def sign(self) -> frozenset[Symbol]:
        """Symbols that actually occur in some rule."""
        out: set[Symbol] = set()
        for rule in self.rules:
            out |= symbols_in(rule.lhs) | symbols_in(rule.rhs)
        return frozenset(out)


def _normalize_rule(lhs: Term, rhs: Term) -> Rule:
    order: list[int] = []
    for i in variable_occurrences(lhs):
        if i not in order:
            order.append(i)
    renaming = {old: Var(new) for new, old in enumerate(order, start=1)}
    return Rule(apply(renaming, lhs), apply(renaming, rhs))


def validate(
    rules: Iterable[Union[Rule, tuple[Term, Term]]],
    alphabet: Optional[RankedAlphabet] = None,
) -> Trs:
    """Build a Trs, checking rule shape and symbol arities.

    Variables are renamed per rule to x1, x2, ... by first occurrence in
    the left-hand side.  With an explicit alphabet every rule symbol must
    be declared in it; otherwise the alphabet is inferred from the rules.
    """
    normalized: list[Rule] = []
    used: set[Symbol] = set()
    for k, item in enumerate(rules, start=1):
        lhs, rhs = (item.lhs, item.rhs) if isinstance(item, Rule) else item
        if isinstance(lhs, Var):
            raise VariableLhsError(f"rule {k}: left-hand side is a variable")
        extra = variables(rhs) - variables(lhs)
        if extra:
            names = ", ".join(f"x{i}" for i in sorted(extra))
            raise FreeVariableError(
                f"rule {k}: right-hand side uses unbound {names}"
            )
        rule = _normalize_rule(lhs, rhs)
        used |= symbols_in(rule.lhs) | symbols_in(rule.rhs)
        normalized.append(rule)
    inferred = RankedAlphabet(used)  # raises on conflicting arities
    if alphabet is None:
        alphabet = inferred
    else:
        for sym in sorted(used):
            declared = alphabet.get(sym.name)
            if declared is None:
                raise UnknownSymbolError(f"symbol {sym.name} is not declared")
            if declared.arity != sym.arity:
                raise ArityMismatchError(
                    f"symbol {sym.name} declared with arity {declared.arity} "
                    f"but used with arity {sym.arity}"
                )
    return Trs(tuple(normalized), alphabet)


@dataclass(frozen=True)
class TrsClassification:
    """Syntactic classes of a rewrite system; each field is a yes/no."""

    left_linear: bool
    linear: bool
    ground: bool
    monadic: bool
    right_ground: bool
    murg: bool
    collapse_free: bool
    gsm: bool

    FIELDS = (
        "left_linear",
        "linear",
        "ground",
        "monadic",
        "right_ground",
        "murg",
        "collapse_free",
        "gsm",
    )


def _monadic_shaped(rule: Rule) -> bool:
    return height(rule.lhs) >= 1 and height(rule.rhs) <= 1


def classify(trs: Trs) -> TrsClassification:
    """Classify a rewrite system into the standard syntactic classes.

    murg holds when every rule is monadic-shaped or has a ground
    right-hand side, i.e. the system splits into a monadic part and a
    right-ground part.
    """
    rules = trs.rules
    left_linear = all(is_linear(r.lhs) for r in rules)
    return TrsClassification(
        left_linear=left_linear,
        linear=left_linear and all(is_linear(r.rhs) for r in rules),
        ground=all(is_ground(r.lhs) and is_ground(r.rhs) for r in rules),
        monadic=all(_monadic_shaped(r) for r in rules),
        right_ground=all(is_ground(r.rhs) for r in rules),
        murg=all(_monadic_shaped(r) or is_ground(r.rhs) for r in rules),
        collapse_free=all(
            not isinstance(r.lhs, Var) and not isinstance(r.rhs, Var)
            for r in rules
        ),
        gsm=is_gsm(trs)[0],
    )


@dataclass(frozen=True)
class GsmViolation:
    """Witness that a system is not generalized semi-monadic.

    Rule source_index's right-hand side at position alpha unifies with
    supertree (a generalization of rule target_index's left-hand side at
    position beta), yet the unifier sends the supertree's subterm at
    gamma, which covers a left-hand-side variable, to image: a term that
    is neither a variable nor ground.
    """

    source_index: int
    target_index: int
    alpha: Position
    beta: Position
    supertree: Term
    gamma: Position
    image: Term


def position_text(pos: Position) -> str:
    return ".".join(str(i) for i in pos) if pos else "root"


def gsm_violation_text(v: GsmViolation) -> str:
    return (
        f"rule {v.source_index + 1} rhs at {position_text(v.alpha)} unifies "
        f"with {term_text(v.supertree)} covering rule {v.target_index + 1} "
        f"lhs at {position_text(v.beta)}, but maps its subterm at "
        f"{position_text(v.gamma)} to {term_text(v.image)}"
    )


def is_gsm(trs: Trs) -> tuple[bool, Optional[GsmViolation]]:
    """Decide whether the system is generalized semi-monadic.

    For every pair of rules (including a rule against a fresh variant of
    itself), every pairing of a right-hand-side position alpha with a
    left-hand-side position beta where alpha or beta is the root, and
    every supertree of the left-hand side at beta with fresh variables:
    if the right-hand side at alpha unifies with the supertree, then the
    unifier must send every supertree position that covers a left-hand
    side variable to a variable or a ground term.
    """
    for i, source in enumerate(trs.rules):
        fresh_from = max_var_index(source.lhs) + 1
        rhs_positions = sorted(positions(source.rhs))
        for j, target in enumerate(trs.rules):
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
                for tree in sorted(supertrees(covered, fresh_from), key=term_key):
                    sigma = mgu(piece, tree)
                    if sigma is None:
                        continue
                    tree_positions = positions(tree)
                    for gamma in var_positions:
                        if gamma not in tree_positions:
                            continue
                        image = apply(sigma, subterm_at(tree, gamma))
                        if not isinstance(image, Var) and not is_ground(image):
                            return False, GsmViolation(
                                i, j, alpha, beta, tree, gamma, image
                            )
    return True, None


def successors(trs: Trs, t: Term) -> set[Term]:
    """All terms reachable from t in exactly one rewrite step."""
    out: set[Term] = set()
    for pos in positions(t):
        sub = subterm_at(t, pos)
        for rule in trs.rules:
            sigma = match(rule.lhs, sub)
            if sigma is not None:
                out.add(replace_at(t, pos, apply(sigma, rule.rhs)))
    return out


def bounded_closure(
    trs: Trs, language: Iterable[Term], max_new: int
) -> tuple[set[Term], bool]:
    """Close a set of terms under one-step rewriting, up to a budget.

    Returns (terms, complete).  complete is True when the closure was
    exhausted after adding at most max_new terms beyond the input; on
    False the returned set is the partial closure found so far.
    Exploration order is deterministic.
    """
    seen = set(language)
    frontier = sorted(seen, key=term_key)
    added = 0
    while frontier:
        fresh: list[Term] = []
        for t in frontier:
            for s in sorted(successors(trs, t), key=term_key):
                if s not in seen:
                    if added >= max_new:
                        return seen, False
                    seen.add(s)
                    added += 1
                    fresh.append(s)
        frontier = fresh
    return seen, True


@dataclass(frozen=True)
class CriticalPair:
    """The two one-step results of an overlap, variables normalized.

    origin records (outer rule index, inner rule index, overlap position
    in the outer left-hand side); it does not take part in equality.
    """

    left: Term
    right: Term
    origin: tuple[int, int, Position] = field(compare=False, default=(0, 0, ()))


def critical_pair_text(cp: CriticalPair) -> str:
    return f"({term_text(cp.left)}, {term_text(cp.right)})"


def _canonical_terms(ts: Sequence[Term]) -> list[Term]:
    order: list[int] = []
    for t in ts:
        for i in variable_occurrences(t):
            if i not in order:
                order.append(i)
    renaming = {old: Var(new) for new, old in enumerate(order, start=1)}
    return [apply(renaming, t) for t in ts]


def critical_peaks(trs: Trs) -> list[tuple[Term, CriticalPair]]:
    """Critical pairs with their common ancestor term (the peak).

    The inner rule rewrites the peak at the overlap position, the outer
    rule at the root.  Root overlaps of a rule with itself are skipped,
    and each unordered root overlap of two distinct rules is taken once;
    proper overlaps are taken for every ordered pair, including a rule
    with a fresh variant of itself.  One representative is kept per
    variant class.
    """
    out: list[tuple[Term, CriticalPair]] = []
    seen: set[tuple[Term, Term]] = set()
    for o, outer in enumerate(trs.rules):
        shift = max_var_index(outer.lhs)
        for i, inner in enumerate(trs.rules):
            inner_lhs = shift_variables(inner.lhs, shift)
            inner_rhs = shift_variables(inner.rhs, shift)
            for beta in sorted(positions(outer.lhs)):
                if beta == () and not o < i:
                    continue
                sub = subterm_at(outer.lhs, beta)
                if isinstance(sub, Var):
                    continue
                sigma = mgu(sub, inner_lhs)
                if sigma is None:
                    continue
                left = apply(sigma, outer.rhs)
                right = apply(sigma, replace_at(outer.lhs, beta, inner_rhs))
                peak = apply(sigma, outer.lhs)
                left, right, peak = _canonical_terms([left, right, peak])
                if (left, right) in seen:
                    continue
                seen.add((left, right))
                out.append((peak, CriticalPair(left, right, (o, i, beta))))
    return out


def critical_pairs(trs: Trs) -> set[CriticalPair]:
    """One critical pair per variant class of overlap results."""
    return {cp for _, cp in critical_peaks(trs)}


def invert(trs: Trs) -> Trs:
    """The reversed system with every rule flipped to rhs -> lhs."""
    flipped: list[tuple[Term, Term]] = []
    for k, rule in enumerate(trs.rules, start=1):
        if isinstance(rule.rhs, Var):
            raise NotInvertibleError(
                f"rule {k}: reversed left-hand side would be a variable"
            )
        if variables(rule.lhs) - variables(rule.rhs):
            raise NotInvertibleError(
                f"rule {k}: reversing drops variables of the left-hand side"
            )
        flipped.append((rule.rhs, rule.lhs))
    return validate(flipped, trs.alphabet)


def union(first: Trs, second: Trs) -> Trs:
    """Set union of two systems over the merged alphabet."""
    alphabet = first.alphabet.union(second.alphabet)
    rules: list[Rule] = []
    for rule in first.rules + second.rules:
        if rule not in rules:
            rules.append(rule)
    return validate(rules, alphabet)


def disjoint_union(first: Trs, second: Trs) -> Trs:
    """Union of two systems whose rule signatures must not intersect."""
    shared = {s.name for s in first.sign} & {s.name for s in second.sign}
    if shared:
        names = ", ".join(sorted(shared))
        raise AlphabetsNotDisjointError(f"shared rule symbols: {names}")
    alphabet = first.alphabet.union(second.alphabet)
    return validate(first.rules + second.rules, alphabet)


def _strip_comment(line: str) -> str:
    return line.split("%", 1)[0].strip()


def parse_trs(text: str) -> Trs:
    """Parse a rewrite system from its textual format.

    An optional first line 'sig name:arity ...' declares the alphabet
    (it may declare symbols beyond those used); every other non-empty
    line is a rule 'lhs -> rhs'.  '%' starts a comment.  Without a sig
    line the alphabet is inferred from the rules.
    """
    alphabet: Optional[RankedAlphabet] = None
    pairs: list[tuple[Term, Term]] = []
    seen_rule = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "sig" and not seen_rule and alphabet is None:
            symbols = []
            for tok in tokens[1:]:
                name, sep, arity_text = tok.rpartition(":")
                if not sep or not arity_text.isdigit():
                    raise ParseError(
                        f"line {lineno}: expected name:arity, got {tok!r}"
                    )
                symbols.append(Symbol(name, int(arity_text)))
            alphabet = RankedAlphabet(symbols)
            continue
        if line.count("->") != 1:
            raise ParseError(f"line {lineno}: expected exactly one '->'")
        lhs_text, rhs_text = line.split("->")
        try:
            pairs.append((parse_term(lhs_text), parse_term(rhs_text)))
        except (ParseError, ArityMismatchError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        seen_rule = True
    return validate(pairs, alphabet)


def parse_language(text: str) -> list[Term]:
    """Parse a language file: one ground term per line, '%' comments.

    Duplicates are dropped; input order is preserved.
    """
    terms: list[Term] = []
    seen: set[Term] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        try:
            t = parse_term(line)
        except (ParseError, ArityMismatchError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if not is_ground(t):
            raise ParseError(f"line {lineno}: language terms must be ground")
        if t not in seen:
            seen.add(t)
            terms.append(t)
    return terms
