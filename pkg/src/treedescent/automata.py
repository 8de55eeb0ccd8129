"""Bottom-up tree automata with epsilon transitions.

An automaton has apply transitions f(q1,...,qn) -> q and epsilon
transitions q -> q'.  Runs are bottom-up: a ground term evaluates to the
set of states reachable at its root; it is accepted when that set meets
the final states.  All values are immutable; the construction functions
below (product, determinization, trimming, ...) return new automata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Optional, Union

from .terms import (
    App,
    ArityMismatchError,
    ParseError,
    RankedAlphabet,
    Symbol,
    Term,
    Var,
    alphabet_of,
    height,
    is_ground,
    parse_term,
    subterms,
    term_key,
    term_text,
)


class AutomatonError(Exception):
    """Base class for automaton-level errors."""


class ForeignSymbolError(AutomatonError):
    """A term to evaluate uses a symbol outside the automaton alphabet."""


class AlphabetMismatchError(AutomatonError):
    """Two automata cannot be combined over one alphabet."""


@dataclass(frozen=True, order=True)
class State:
    """An automaton state, identified by its name.

    term_tag optionally records the term a state stands for (states of
    the form ⟨t⟩); it does not take part in equality or ordering.
    """

    name: str
    term_tag: Optional[Term] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.name or any(c.isspace() for c in self.name):
            raise AutomatonError(f"invalid state name: {self.name!r}")
        if "->" in self.name or "%" in self.name:
            raise AutomatonError(f"invalid state name: {self.name!r}")


def state_for_term(t: Term) -> State:
    """The canonical state ⟨t⟩ standing for the ground term t."""
    return State(f"⟨{term_text(t)}⟩", t)


@dataclass(frozen=True)
class Apply:
    """A transition symbol(args...) -> target."""

    symbol: Symbol
    args: tuple[State, ...]
    target: State

    def __post_init__(self) -> None:
        if len(self.args) != self.symbol.arity:
            raise ArityMismatchError(
                f"transition for {self.symbol!r} has {len(self.args)} arguments"
            )

    def __repr__(self) -> str:
        return transition_text(self)


@dataclass(frozen=True)
class Lambda:
    """An epsilon transition source -> target."""

    source: State
    target: State

    def __repr__(self) -> str:
        return transition_text(self)


Transition = Union[Apply, Lambda]


def transition_text(tr: Transition) -> str:
    if isinstance(tr, Lambda):
        return f"{tr.source.name} -> {tr.target.name}"
    if tr.args:
        inner = ",".join(q.name for q in tr.args)
        return f"{tr.symbol.name}({inner}) -> {tr.target.name}"
    return f"{tr.symbol.name} -> {tr.target.name}"


@dataclass(frozen=True)
class StateLeaf(Term):
    """A state embedded as a leaf in a term, for mixed evaluation."""

    state: State

    children = ()  # behaves as a leaf for the term utilities


@dataclass(frozen=True)
class Bta:
    """A bottom-up tree automaton."""

    alphabet: RankedAlphabet
    states: frozenset[State]
    transitions: frozenset[Transition]
    finals: frozenset[State]

    def __init__(
        self,
        alphabet: RankedAlphabet,
        states: Iterable[State],
        transitions: Iterable[Transition],
        finals: Iterable[State],
    ) -> None:
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "transitions", frozenset(transitions))
        object.__setattr__(self, "finals", frozenset(finals))
        self._check()

    def _check(self) -> None:
        missing = self.finals - self.states
        if missing:
            name = sorted(missing)[0].name
            raise AutomatonError(f"final state {name} is not declared")
        symbol_names = set(self.alphabet.by_name)
        for q in self.states:
            if q.name in symbol_names:
                raise AutomatonError(
                    f"state name {q.name} collides with an alphabet symbol"
                )
        for tr in self.transitions:
            if isinstance(tr, Apply):
                involved = tr.args + (tr.target,)
                if self.alphabet.get(tr.symbol.name) != tr.symbol:
                    raise ForeignSymbolError(
                        f"transition symbol {tr.symbol!r} is not in the alphabet"
                    )
            else:
                involved = (tr.source, tr.target)
            for q in involved:
                if q not in self.states:
                    raise AutomatonError(f"state {q.name} is not declared")

    @cached_property
    def lambda_closure(self) -> dict[State, frozenset[State]]:
        """Reflexive-transitive closure of the epsilon transitions."""
        reach: dict[State, set[State]] = {q: {q} for q in self.states}
        for tr in self.transitions:
            if isinstance(tr, Lambda):
                reach[tr.source].add(tr.target)
        changed = True
        while changed:
            changed = False
            for outs in reach.values():
                extra = set().union(*(reach[r] for r in outs)) - outs
                if extra:
                    outs |= extra
                    changed = True
        return {q: frozenset(outs) for q, outs in reach.items()}

    @cached_property
    def apply_index(self) -> dict[tuple[Symbol, tuple[State, ...]], frozenset[State]]:
        idx: dict[tuple[Symbol, tuple[State, ...]], set[State]] = {}
        for tr in self.transitions:
            if isinstance(tr, Apply):
                idx.setdefault((tr.symbol, tr.args), set()).add(tr.target)
        return {k: frozenset(v) for k, v in idx.items()}

    @cached_property
    def is_deterministic(self) -> bool:
        """No epsilon transitions and at most one target per left side."""
        if any(isinstance(tr, Lambda) for tr in self.transitions):
            return False
        return all(len(ts) == 1 for ts in self.apply_index.values())


def reachable_states(a: Bta, t: Union[Term, State]) -> frozenset[State]:
    """States reachable at the root of t, closed under epsilon moves.

    t is a ground term, possibly with StateLeaf leaves (or a bare state,
    treated as a leaf).  A symbol outside the alphabet is an error.
    """
    if isinstance(t, State):
        t = StateLeaf(t)
    closure = a.lambda_closure
    index = a.apply_index

    def walk(u: Term) -> frozenset[State]:
        if isinstance(u, StateLeaf):
            if u.state not in a.states:
                raise AutomatonError(f"state {u.state.name} is not declared")
            return closure[u.state]
        if isinstance(u, Var):
            raise ForeignSymbolError("cannot evaluate a term with variables")
        if a.alphabet.get(u.symbol.name) != u.symbol:
            raise ForeignSymbolError(
                f"symbol {u.symbol!r} is not in the automaton alphabet"
            )
        pools = [walk(c) for c in u.children]
        out: set[State] = set()
        for combo in product(*pools):
            for q in index.get((u.symbol, combo), ()):
                out |= closure[q]
        return frozenset(out)

    return walk(t)


def accepts(a: Bta, t: Term) -> bool:
    """Whether the automaton accepts the ground term t."""
    return bool(reachable_states(a, t) & a.finals)


def fundamental_bta(
    language: Iterable[Term], alphabet: Optional[RankedAlphabet] = None
) -> Bta:
    """The deterministic automaton accepting exactly a finite language.

    Its states are ⟨p⟩ for the subterms p of the language, with one
    transition per subterm decomposition; a ground term evaluates to its
    own state ⟨t⟩ when t is a subterm, and to nothing otherwise.
    """
    terms = list(language)
    for t in terms:
        if not is_ground(t):
            raise AutomatonError("language terms must be ground")
    subs: set[Term] = set()
    for t in terms:
        subs |= subterms(t)
    if alphabet is None:
        alphabet = alphabet_of(subs)
    states = {p: state_for_term(p) for p in subs}
    transitions = [
        Apply(p.symbol, tuple(states[c] for c in p.children), states[p])
        for p in subs
        if isinstance(p, App)
    ]
    finals = [states[t] for t in terms]
    return Bta(alphabet, states.values(), transitions, finals)


def eliminate_lambda(a: Bta) -> Bta:
    """An equivalent automaton without epsilon transitions."""
    closure = a.lambda_closure
    transitions = [
        Apply(tr.symbol, tr.args, q)
        for tr in a.transitions
        if isinstance(tr, Apply)
        for q in closure[tr.target]
    ]
    return Bta(a.alphabet, a.states, transitions, a.finals)


def _accessible(a: Bta) -> set[State]:
    acc: set[State] = set()
    changed = True
    while changed:
        changed = False
        for tr in a.transitions:
            if tr.target in acc:
                continue
            if isinstance(tr, Apply):
                ready = all(q in acc for q in tr.args)
            else:
                ready = tr.source in acc
            if ready:
                acc.add(tr.target)
                changed = True
    return acc


def trim(a: Bta) -> Bta:
    """Drop states that are unreachable or cannot reach acceptance.

    The language is preserved.  An automaton with empty language trims
    to one with no states at all.
    """
    acc = _accessible(a)
    keep = {q for q in a.finals if q in acc}
    changed = True
    while changed:
        changed = False
        for tr in a.transitions:
            if tr.target not in keep:
                continue
            if isinstance(tr, Apply):
                if not all(q in acc for q in tr.args):
                    continue
                sources = tr.args
            else:
                sources = (tr.source,)
            for q in sources:
                if q in acc and q not in keep:
                    keep.add(q)
                    changed = True
    transitions = []
    for tr in a.transitions:
        involved = (
            tr.args + (tr.target,) if isinstance(tr, Apply) else (tr.source, tr.target)
        )
        if all(q in keep for q in involved):
            transitions.append(tr)
    return Bta(a.alphabet, keep, transitions, a.finals & keep)


def _merged_alphabet(a: Bta, b: Bta) -> RankedAlphabet:
    try:
        return a.alphabet.union(b.alphabet)
    except ArityMismatchError as exc:
        raise AlphabetMismatchError(str(exc)) from exc


def intersection(a: Bta, b: Bta) -> Bta:
    """Product automaton accepting the intersection of the languages."""
    alphabet = _merged_alphabet(a, b)
    a2, b2 = eliminate_lambda(a), eliminate_lambda(b)

    def pair(x: State, y: State) -> State:
        return State(f"({x.name},{y.name})")

    states = [pair(x, y) for x in a2.states for y in b2.states]
    by_symbol: dict[Symbol, list[Apply]] = {}
    for tb in b2.transitions:
        assert isinstance(tb, Apply)
        by_symbol.setdefault(tb.symbol, []).append(tb)
    transitions = []
    for ta in a2.transitions:
        assert isinstance(ta, Apply)
        for tb in by_symbol.get(ta.symbol, ()):
            args = tuple(pair(x, y) for x, y in zip(ta.args, tb.args))
            transitions.append(Apply(ta.symbol, args, pair(ta.target, tb.target)))
    finals = [pair(x, y) for x in a2.finals for y in b2.finals]
    return Bta(alphabet, states, transitions, finals)


def is_empty(a: Bta) -> bool:
    """Whether the accepted language is empty."""
    return not (_accessible(a) & a.finals)


def determinize(a: Bta) -> Bta:
    """An equivalent deterministic automaton (subset construction).

    Only nonempty subsets reachable bottom-up become states, so the
    result is not necessarily complete.
    """
    a2 = eliminate_lambda(a)
    by_symbol: dict[Symbol, list[Apply]] = {}
    for tr in a2.transitions:
        assert isinstance(tr, Apply)
        by_symbol.setdefault(tr.symbol, []).append(tr)
    subsets: list[frozenset[State]] = []
    found: set[frozenset[State]] = set()
    moves: dict[tuple[Symbol, tuple[frozenset[State], ...]], frozenset[State]] = {}
    changed = True
    while changed:
        changed = False
        for sym in a.alphabet:
            rules = by_symbol.get(sym, [])
            if not rules:
                continue
            for combo in list(product(subsets, repeat=sym.arity)):
                key = (sym, combo)
                if key in moves:
                    continue
                target = frozenset(
                    r.target
                    for r in rules
                    if all(r.args[i] in combo[i] for i in range(sym.arity))
                )
                if not target:
                    continue
                moves[key] = target
                if target not in found:
                    found.add(target)
                    subsets.append(target)
                    changed = True

    def subset_state(fs: frozenset[State]) -> State:
        return State("{" + ",".join(sorted(q.name for q in fs)) + "}")

    state_of = {fs: subset_state(fs) for fs in subsets}
    if len(set(state_of.values())) != len(subsets):
        raise AutomatonError("state names too ambiguous to determinize")
    transitions = [
        Apply(sym, tuple(state_of[c] for c in combo), state_of[target])
        for (sym, combo), target in moves.items()
    ]
    finals = [state_of[fs] for fs in subsets if fs & a2.finals]
    return Bta(a.alphabet, state_of.values(), transitions, finals)


def _complete(a: Bta) -> Bta:
    # Requires an epsilon-free automaton; adds a sink so every left side
    # has at least one transition.
    sink_name = "⊥"
    taken = {q.name for q in a.states}
    while sink_name in taken:
        sink_name += "_"
    sink = State(sink_name)
    states = set(a.states) | {sink}
    existing = {
        (tr.symbol, tr.args) for tr in a.transitions if isinstance(tr, Apply)
    }
    transitions = list(a.transitions)
    ordered = sorted(states)
    for sym in a.alphabet:
        for combo in product(ordered, repeat=sym.arity):
            if (sym, combo) not in existing:
                transitions.append(Apply(sym, combo, sink))
    return Bta(a.alphabet, states, transitions, a.finals)


def complement(a: Bta) -> Bta:
    """Automaton accepting exactly the alphabet terms a rejects."""
    d = _complete(determinize(a))
    return Bta(d.alphabet, d.states, d.transitions, d.states - d.finals)


class _SubsetDfa:
    # Lazy total deterministic view of an automaton: states are subsets
    # of original states (the empty subset is the sink), discovered and
    # numbered on demand.
    def __init__(self, a: Bta, alphabet: RankedAlphabet) -> None:
        a2 = eliminate_lambda(Bta(alphabet, a.states, a.transitions, a.finals))
        self.by_symbol: dict[Symbol, list[Apply]] = {}
        for tr in a2.transitions:
            assert isinstance(tr, Apply)
            self.by_symbol.setdefault(tr.symbol, []).append(tr)
        self.finals = a2.finals
        self.sets: list[frozenset[State]] = []
        self.ids: dict[frozenset[State], int] = {}
        self._moves: dict[tuple[Symbol, tuple[int, ...]], int] = {}

    def id_of(self, fs: frozenset[State]) -> int:
        if fs not in self.ids:
            self.ids[fs] = len(self.sets)
            self.sets.append(fs)
        return self.ids[fs]

    def move(self, sym: Symbol, arg_ids: tuple[int, ...]) -> int:
        key = (sym, arg_ids)
        if key not in self._moves:
            pools = [self.sets[i] for i in arg_ids]
            target = frozenset(
                r.target
                for r in self.by_symbol.get(sym, ())
                if all(r.args[i] in pools[i] for i in range(len(pools)))
            )
            self._moves[key] = self.id_of(target)
        return self._moves[key]

    def is_final(self, i: int) -> bool:
        return bool(self.sets[i] & self.finals)


def equivalent(a: Bta, b: Bta) -> bool:
    """Whether two automata accept the same language.

    The check runs over the merged alphabet, so automata built over
    different but compatible alphabets compare by language alone; a
    symbol with two arities is an alphabet-mismatch error.
    """
    alphabet = _merged_alphabet(a, b)
    da, db = _SubsetDfa(a, alphabet), _SubsetDfa(b, alphabet)
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    changed = True
    while changed:
        changed = False
        for sym in alphabet:
            for combo in list(product(pairs, repeat=sym.arity)):
                pa = da.move(sym, tuple(x for x, _ in combo))
                pb = db.move(sym, tuple(y for _, y in combo))
                if da.is_final(pa) != db.is_final(pb):
                    return False
                if (pa, pb) not in seen:
                    seen.add((pa, pb))
                    pairs.append((pa, pb))
                    changed = True
    return True


def enumerate_terms(a: Bta, max_height: int) -> set[Term]:
    """All accepted ground terms of height at most max_height."""
    a2 = eliminate_lambda(a)
    rules = [tr for tr in a2.transitions if isinstance(tr, Apply)]
    cum: dict[State, set[Term]] = {q: set() for q in a2.states}
    old: dict[State, set[Term]] = {q: set() for q in a2.states}
    for level in range(max_height + 1):
        pending: dict[State, set[Term]] = {}
        for tr in rules:
            if level == 0:
                if not tr.args:
                    pending.setdefault(tr.target, set()).add(App(tr.symbol))
                continue
            if not tr.args:
                continue
            pools = [cum[q] for q in tr.args]
            if any(not pool for pool in pools):
                continue
            for combo in product(*pools):
                if all(c in old[q] for c, q in zip(combo, tr.args)):
                    continue  # height below this level, already built
                pending.setdefault(tr.target, set()).add(App(tr.symbol, combo))
        old = {q: set(ts) for q, ts in cum.items()}
        for q, ts in pending.items():
            cum[q] |= ts
    out: set[Term] = set()
    for q in a2.finals:
        out |= cum[q]
    return out


def shortest_accepted(a: Bta) -> Optional[Term]:
    """A smallest accepted term (by height, ties by text), or None."""
    t = trim(a)
    if not t.finals:
        return None
    best: Optional[Term] = None
    for bound in range(len(t.states) + 1):
        hits = enumerate_terms(t, bound)
        if hits:
            best = min(hits, key=lambda u: (height(u), term_key(u)))
            break
    assert best is not None  # trimmed with finals: some term is accepted
    return best


def is_finite_language(a: Bta) -> bool:
    """Whether the accepted language is finite."""
    t = eliminate_lambda(trim(a))
    # Finite iff the graph of useful transitions (argument -> target) is
    # acyclic.
    edges: dict[State, set[State]] = {q: set() for q in t.states}
    for tr in t.transitions:
        assert isinstance(tr, Apply)
        for q in tr.args:
            edges[q].add(tr.target)
    color: dict[State, int] = {}

    def cyclic(q: State) -> bool:
        color[q] = 1
        for r in edges[q]:
            c = color.get(r)
            if c == 1 or (c is None and cyclic(r)):
                return True
        color[q] = 2
        return False

    return not any(color.get(q) is None and cyclic(q) for q in sorted(edges))


def language_terms(a: Bta) -> set[Term]:
    """The accepted language as a set; the language must be finite."""
    if not is_finite_language(a):
        raise AutomatonError("the accepted language is infinite")
    t = eliminate_lambda(trim(a))
    return enumerate_terms(t, len(t.states))


def bta_text(a: Bta) -> str:
    """Serialize an automaton; states and transitions sorted by name."""
    lines = [
        " ".join(["states"] + sorted(q.name for q in a.states)),
        " ".join(["final"] + sorted(q.name for q in a.finals)),
    ]
    lines += sorted(transition_text(tr) for tr in a.transitions)
    return "\n".join(lines) + "\n"


def _split_state_names(text: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    current = ""
    for ch in text:
        if ch in "(⟨{":
            depth += 1
        elif ch in ")⟩}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    parts.append(current)
    return [p.strip() for p in parts]


def parse_bta(text: str) -> Bta:
    """Parse the textual automaton format produced by bta_text.

    Line one declares the states, line two the final states; every other
    non-empty line is a transition.  A left side that is a declared state
    name is an epsilon transition; otherwise it is symbol(args...) and
    the symbol arities define the (inferred) alphabet.  '%' starts a
    comment.
    """
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if len(lines) < 2:
        raise ParseError("expected a states line and a final line")
    first = lines[0][1].split()
    second = lines[1][1].split()
    if not first or first[0] != "states":
        raise ParseError(f"line {lines[0][0]}: expected 'states ...'")
    if not second or second[0] != "final":
        raise ParseError(f"line {lines[1][0]}: expected 'final ...'")
    states: dict[str, State] = {}
    for name in first[1:]:
        if name in states:
            raise ParseError(f"state {name} declared twice")
        tag: Optional[Term] = None
        if name.startswith("⟨") and name.endswith("⟩"):
            try:
                tag = parse_term(name[1:-1])
            except (ParseError, ArityMismatchError):
                tag = None
        try:
            states[name] = State(name, tag)
        except AutomatonError as exc:
            raise ParseError(str(exc)) from exc
    finals = []
    for name in second[1:]:
        if name not in states:
            raise ParseError(f"final state {name} is not declared")
        finals.append(states[name])
    transitions: list[Transition] = []
    arities: dict[str, int] = {}
    for lineno, line in lines[2:]:
        if line.count("->") != 1:
            raise ParseError(f"line {lineno}: expected exactly one '->'")
        lhs, rhs = (part.strip() for part in line.split("->"))
        if rhs not in states:
            raise ParseError(f"line {lineno}: unknown state {rhs!r}")
        target = states[rhs]
        if lhs in states:
            transitions.append(Lambda(states[lhs], target))
            continue
        paren = lhs.find("(")
        if paren < 0:
            name, args = lhs, []
        else:
            if not lhs.endswith(")"):
                raise ParseError(f"line {lineno}: malformed left side {lhs!r}")
            name = lhs[:paren]
            args = _split_state_names(lhs[paren + 1 : -1])
        for arg in args:
            if arg not in states:
                raise ParseError(f"line {lineno}: unknown state {arg!r}")
        seen = arities.setdefault(name, len(args))
        if seen != len(args):
            raise ArityMismatchError(
                f"line {lineno}: symbol {name} used with arities "
                f"{seen} and {len(args)}"
            )
        try:
            symbol = Symbol(name, len(args))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        transitions.append(Apply(symbol, tuple(states[q] for q in args), target))
    alphabet = RankedAlphabet(Symbol(n, k) for n, k in arities.items())
    try:
        return Bta(alphabet, states.values(), transitions, finals)
    except AutomatonError as exc:
        raise ParseError(str(exc)) from exc
