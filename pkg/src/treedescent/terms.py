"""First-order terms over a ranked alphabet.

Terms are immutable trees built from ranked function symbols and the
numbered variables x1, x2, ...  Positions are tuples of 1-based child
indices; the root position is the empty tuple.  Substitutions are plain
mappings from variable indices to terms.
"""

from __future__ import annotations

import re
from abc import ABC
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence

Position = tuple[int, ...]
Substitution = Mapping[int, "Term"]

ROOT: Position = ()


class TermError(Exception):
    """Base class for term-level errors."""


class ParseError(TermError):
    """Malformed textual input."""


class ArityMismatchError(TermError):
    """A symbol is used with two different arities."""


class InvalidPositionError(TermError):
    """A position does not exist in the given term."""


class BadEncodingError(TermError):
    """Ground-encoding preconditions are violated."""


_VAR_RE = re.compile(r"x[0-9]+\Z")
# Symbol names must survive the textual formats: no whitespace, no
# parentheses/commas (term syntax), no '%' (comments), no ':' (signature
# lines), no angle brackets (state names), no '->' (rule/transition arrows).
_NAME_RE = re.compile(r"[^\s(),%:⟨⟩]+\Z")


@dataclass(frozen=True, order=True)
class Symbol:
    """A function symbol with a fixed arity."""

    name: str
    arity: int

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name) or "->" in self.name:
            raise ParseError(f"invalid symbol name: {self.name!r}")
        if _VAR_RE.match(self.name):
            raise ParseError(f"symbol name {self.name!r} would shadow a variable")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class RankedAlphabet:
    """A finite set of symbols with pairwise distinct names."""

    symbols: frozenset[Symbol]

    def __init__(self, symbols: Iterable[Symbol] = ()) -> None:
        object.__setattr__(self, "symbols", frozenset(symbols))
        names: dict[str, int] = {}
        for sym in sorted(self.symbols):
            if sym.name in names:
                raise ArityMismatchError(
                    f"symbol {sym.name} declared with arities "
                    f"{names[sym.name]} and {sym.arity}"
                )
            names[sym.name] = sym.arity

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "RankedAlphabet":
        return cls(Symbol(name, arity) for name, arity in pairs)

    @cached_property
    def by_name(self) -> dict[str, Symbol]:
        return {sym.name: sym for sym in self.symbols}

    @cached_property
    def sorted_symbols(self) -> tuple[Symbol, ...]:
        return tuple(sorted(self.symbols))

    def get(self, name: str) -> Optional[Symbol]:
        return self.by_name.get(name)

    def __contains__(self, sym: Symbol) -> bool:
        return sym in self.symbols

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.sorted_symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        """Merge two alphabets; a name with two arities is an error."""
        return RankedAlphabet(self.symbols | other.symbols)


class Term(ABC):
    """Base class for terms; see Var and App."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    """The variable x<index>; indices start at 1."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"variable indices start at 1, got {self.index}")

    def __repr__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class App(Term):
    """An application of a symbol to exactly arity-many child terms."""

    symbol: Symbol
    children: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if len(self.children) != self.symbol.arity:
            raise ArityMismatchError(
                f"{self.symbol.name} has arity {self.symbol.arity}, "
                f"got {len(self.children)} arguments"
            )

    def __repr__(self) -> str:
        return term_text(self)


def app(symbol: Symbol, *children: Term) -> App:
    """Convenience constructor: app(f, s, t) == App(f, (s, t))."""
    return App(symbol, tuple(children))


def term_text(t: Term) -> str:
    """Canonical text for a term: no whitespace, variables as x<i>.

    >>> f, a = Symbol("f", 2), Symbol("a", 0)
    >>> term_text(app(f, app(a), Var(3)))
    'f(a,x3)'
    """
    if isinstance(t, Var):
        return f"x{t.index}"
    if isinstance(t, App):
        if not t.children:
            return t.symbol.name
        return f"{t.symbol.name}({','.join(term_text(c) for c in t.children)})"
    raise TypeError(f"not a plain term: {t!r}")


def term_key(t: Term) -> str:
    """Sort key used wherever sets of terms are ordered for output."""
    return term_text(t)


_TOKEN_RE = re.compile(r"[()\,]|[^\s(),%:⟨⟩]+|\S")


def parse_term(text: str) -> Term:
    """Parse the canonical term syntax; whitespace is insignificant.

    Tokens of shape x<digits> are variables; every other name is a
    function symbol whose arity is the number of arguments it is applied
    to.  A symbol used with two different arities in one term is an
    arity-mismatch error.

    >>> parse_term("f( g(x1 , #), # )")
    f(g(x1,#),#)
    """
    tokens = _TOKEN_RE.findall(text)
    pos = 0
    arities: dict[str, int] = {}

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError(f"unexpected end of term: {text!r}")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse() -> Term:
        name = take()
        if name in ("(", ")", ","):
            raise ParseError(f"unexpected {name!r} in term: {text!r}")
        if not _NAME_RE.match(name) or "->" in name:
            raise ParseError(f"invalid token {name!r} in term: {text!r}")
        if _VAR_RE.match(name):
            index = int(name[1:])
            if index < 1:
                raise ParseError(f"invalid variable {name!r}: indices start at 1")
            if peek() == "(":
                raise ParseError(f"variable {name} cannot take arguments")
            return Var(index)
        args: list[Term] = []
        if peek() == "(":
            take()
            args.append(parse())
            while peek() == ",":
                take()
                args.append(parse())
            if take() != ")":
                raise ParseError(f"expected ')' in term: {text!r}")
        seen = arities.setdefault(name, len(args))
        if seen != len(args):
            raise ArityMismatchError(
                f"symbol {name} used with arities {seen} and {len(args)}"
            )
        return App(Symbol(name, len(args)), tuple(args))

    result = parse()
    if pos != len(tokens):
        raise ParseError(f"trailing input after term: {text!r}")
    return result


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(c) for c in t.children)


def variables(t: Term) -> set[int]:
    """The set of variable indices occurring in t."""
    return set(variable_occurrences(t))


def variable_occurrences(t: Term) -> list[int]:
    """Variable indices in left-to-right (pre-order) occurrence order."""
    out: list[int] = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.append(u.index)
        else:
            stack.extend(reversed(u.children))
    return out


def is_linear(t: Term) -> bool:
    """True when no variable occurs twice in t."""
    occ = variable_occurrences(t)
    return len(occ) == len(set(occ))


def max_var_index(t: Term) -> int:
    """Largest variable index in t, or 0 when t is ground."""
    return max(variables(t), default=0)


def height(t: Term) -> int:
    """Height of a term: variables and constants have height 0."""
    if isinstance(t, Var) or not t.children:
        return 0
    return 1 + max(height(c) for c in t.children)


def size(t: Term) -> int:
    """Number of nodes in t."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(c) for c in t.children)


def subterms(t: Term) -> set[Term]:
    """All subterms of t, including t itself."""
    out: set[Term] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u not in out:
            out.add(u)
            if isinstance(u, App):
                stack.extend(u.children)
    return out


def symbols_in(t: Term) -> set[Symbol]:
    out: set[Symbol] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            out.add(u.symbol)
            stack.extend(u.children)
    return out


def alphabet_of(terms: Iterable[Term]) -> RankedAlphabet:
    """The alphabet of all symbols occurring in the given terms."""
    syms: set[Symbol] = set()
    for t in terms:
        syms |= symbols_in(t)
    return RankedAlphabet(syms)


def positions(t: Term) -> set[Position]:
    """All positions of t as tuples of 1-based child indices."""
    out: set[Position] = set()

    def walk(u: Term, at: Position) -> None:
        out.add(at)
        if isinstance(u, App):
            for i, c in enumerate(u.children, start=1):
                walk(c, at + (i,))

    walk(t, ROOT)
    return out


def sorted_positions(t: Term) -> list[Position]:
    """Positions in pre-order (lexicographic tuple order)."""
    return sorted(positions(t))


def subterm_at(t: Term, pos: Position) -> Term:
    """The subterm of t at pos; raises InvalidPositionError if absent."""
    u = t
    for i in pos:
        if not isinstance(u, App) or not 1 <= i <= len(u.children):
            raise InvalidPositionError(f"no position {pos} in {term_text(t)}")
        u = u.children[i - 1]
    return u


def replace_at(t: Term, pos: Position, replacement: Term) -> Term:
    """The term t with the subterm at pos replaced."""
    if not pos:
        return replacement
    if not isinstance(t, App) or not 1 <= pos[0] <= len(t.children):
        raise InvalidPositionError(f"no position {pos} in {term_text(t)}")
    i = pos[0] - 1
    children = list(t.children)
    children[i] = replace_at(children[i], pos[1:], replacement)
    return App(t.symbol, tuple(children))


def apply(sigma: Substitution, t: Term) -> Term:
    """Apply a substitution to t; unbound variables stay in place."""
    if isinstance(t, Var):
        return sigma.get(t.index, t)
    if not t.children:
        return t
    return App(t.symbol, tuple(apply(sigma, c) for c in t.children))


def match(pattern: Term, subject: Term) -> Optional[dict[int, Term]]:
    """A substitution sigma with apply(sigma, pattern) == subject, or None.

    A repeated pattern variable must bind to equal subterms.

    >>> r = match(parse_term("f(x1,x1)"), parse_term("f(a,a)"))
    >>> r == {1: parse_term("a")}
    True
    >>> match(parse_term("f(x1,x1)"), parse_term("f(a,b)")) is None
    True
    """
    bindings: dict[int, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p.index)
            if bound is None:
                bindings[p.index] = s
            elif bound != s:
                return None
        else:
            if not isinstance(s, App) or s.symbol != p.symbol:
                return None
            stack.extend(zip(p.children, s.children))
    return bindings


def mgu(s: Term, t: Term) -> Optional[dict[int, Term]]:
    """Most general unifier of s and t as an idempotent substitution.

    Returns None when the terms do not unify (symbol clash or occurs
    check).  When two distinct variables meet, the higher index is bound
    to the lower one, so unifying a pattern with a fresh variant keeps
    the original variable names.

    >>> got = mgu(parse_term("g(x1,#,x1)"), parse_term("g(x4,x5,x6)"))
    >>> got == {4: Var(1), 5: parse_term("#"), 6: Var(1)}
    True
    """
    sigma: dict[int, Term] = {}

    def bind(index: int, value: Term) -> None:
        one = {index: value}
        for k in list(sigma):
            sigma[k] = apply(one, sigma[k])
        sigma[index] = value

    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = apply(sigma, a)
        b = apply(sigma, b)
        if a == b:
            continue
        if isinstance(a, Var) and isinstance(b, Var):
            hi, lo = (a, b) if a.index > b.index else (b, a)
            bind(hi.index, lo)
        elif isinstance(a, Var):
            if a.index in variables(b):
                return None
            bind(a.index, b)
        elif isinstance(b, Var):
            if b.index in variables(a):
                return None
            bind(b.index, a)
        else:
            if a.symbol != b.symbol:
                return None
            stack.extend(zip(a.children, b.children))
    return sigma


def shift_variables(t: Term, offset: int) -> Term:
    """Rename every variable x<i> to x<i+offset>."""
    if isinstance(t, Var):
        return Var(t.index + offset)
    if not t.children:
        return t
    return App(t.symbol, tuple(shift_variables(c, offset) for c in t.children))


def _leaf_offsets(t: Term) -> dict[Position, int]:
    # Number of leaves strictly to the left of each position's subtree.
    offsets: dict[Position, int] = {}
    count = 0

    def walk(u: Term, at: Position) -> None:
        nonlocal count
        offsets[at] = count
        if isinstance(u, Var) or not u.children:
            count += 1
        else:
            for i, c in enumerate(u.children, start=1):
                walk(c, at + (i,))

    walk(t, ROOT)
    return offsets


def _cut_sets(t: Term, at: Position) -> list[list[Position]]:
    # Antichains of positions that cover every variable position: each
    # subtree is either cut (replaced by a fresh variable) or kept, and a
    # variable leaf must be cut.
    options: list[list[Position]] = [[at]]
    if isinstance(t, Var):
        return options
    child_options = [
        _cut_sets(c, at + (i,)) for i, c in enumerate(t.children, start=1)
    ]
    for combo in product(*child_options):
        options.append([p for part in combo for p in part])
    return options


def supertrees(v: Term, fresh_from: int) -> set[Term]:
    """One representative per supertree class of v, up to renaming.

    A supertree of v is obtained by cutting a set of pairwise disjoint
    subtrees that together cover all variables of v and replacing each
    cut subtree with a distinct fresh variable.  The fresh index of a cut
    at position p is fresh_from plus the number of leaves of v strictly
    left of p, so a position receives the same variable in every
    supertree it is cut in.

    >>> got = {term_text(s) for s in supertrees(parse_term("g(x1,#,#)"), 4)}
    >>> sorted(got)
    ['g(x4,#,#)', 'g(x4,#,x6)', 'g(x4,x5,#)', 'g(x4,x5,x6)', 'x4']
    """
    offsets = _leaf_offsets(v)
    out: set[Term] = set()
    for cuts in _cut_sets(v, ROOT):
        u = v
        for p in cuts:
            u = replace_at(u, p, Var(fresh_from + offsets[p]))
        out.add(u)
    return out


def fresh_symbol_pool(
    alphabet: RankedAlphabet, count: int, base: str = "z", arity: int = 0
) -> list[Symbol]:
    """count symbols named base1..base<count> absent from alphabet.

    A name already taken gets underscores appended until it is free.
    """
    taken = set(alphabet.by_name)
    pool: list[Symbol] = []
    for i in range(1, count + 1):
        name = f"{base}{i}"
        while name in taken:
            name += "_"
        taken.add(name)
        pool.append(Symbol(name, arity))
    return pool


def to_ground_z(t: Term, pool: Sequence[Symbol]) -> Term:
    """Replace each variable x<i> with the i-th pool constant.

    The pool must supply a constant for every variable of t.
    """
    if isinstance(t, Var):
        if t.index > len(pool):
            raise BadEncodingError(
                f"no fresh constant for x{t.index}: pool has {len(pool)}"
            )
        sym = pool[t.index - 1]
        if sym.arity != 0:
            raise BadEncodingError(f"pool symbol {sym!r} is not a constant")
        return App(sym)
    if not t.children:
        return t
    return App(t.symbol, tuple(to_ground_z(c, pool) for c in t.children))


def from_ground_z(t: Term, pool: Sequence[Symbol]) -> Term:
    """Invert to_ground_z: pool constants become variables again."""
    if isinstance(t, Var):
        return t
    if not t.children:
        for i, sym in enumerate(pool, start=1):
            if t.symbol == sym:
                return Var(i)
        return t
    return App(t.symbol, tuple(from_ground_z(c, pool) for c in t.children))


def to_ground_g(t: Term, g: Symbol, sharp: Symbol) -> Term:
    """Replace each variable x<i> with g applied i times to sharp.

    g must have arity at least 1 and sharp must be a constant; when g is
    not unary its remaining argument slots are filled with sharp.

    >>> g, sharp = Symbol("g", 1), Symbol("#", 0)
    >>> term_text(to_ground_g(parse_term("f(x2,x1)"), g, sharp))
    'f(g(g(#)),g(#))'
    """
    if g.arity < 1:
        raise BadEncodingError(f"encoding symbol {g!r} must have arity >= 1")
    if sharp.arity != 0:
        raise BadEncodingError(f"anchor symbol {sharp!r} must be a constant")

    def tower(n: int) -> Term:
        u: Term = App(sharp)
        for _ in range(n):
            u = App(g, (u,) + tuple(App(sharp) for _ in range(g.arity - 1)))
        return u

    def walk(u: Term) -> Term:
        if isinstance(u, Var):
            return tower(u.index)
        if not u.children:
            return u
        return App(u.symbol, tuple(walk(c) for c in u.children))

    return walk(t)
