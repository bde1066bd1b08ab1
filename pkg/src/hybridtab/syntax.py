"""Hybrid formulas: AST, parser, printer, negation normal form and subformulas.

The concrete syntax is ASCII with Unicode aliases::

    ~ (¬)   & (∧)   | (∨)   -> (→)   <-> (↔)   <> (◇)   [] (□)   @i

Unary operators bind tightest, then ``&``, ``|``, ``->`` and ``<->``; binary
operators associate to the right.  An identifier is a nominal when it appears
directly after ``@`` anywhere in the input, or when it is declared via the
``nominals`` argument of :func:`parse`; every other identifier is a
proposition.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Prop", "Nom", "Neg", "And", "Or", "Dia", "Box", "At",
    "ParseError", "NamespaceError",
    "parse", "to_text", "to_nnf", "is_nnf", "complement", "implies", "iff",
    "subformulas", "nominals", "props", "size", "modal_depth",
    "prefixed_subformula", "fresh_nominal", "is_reserved", "check_namespaces",
]

_RESERVED = re.compile(r"^n(\d+)$")


class Formula:
    """Base class of the immutable formula AST.

    Nodes compare structurally and cache their hash, so they can be used as
    set members and dictionary keys cheaply.
    """

    __slots__ = ("_key", "_hash")

    def _init(self, key: tuple) -> None:
        self._key = key
        self._hash = hash(key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __setattr__(self, name, value):
        if hasattr(self, "_hash"):
            raise AttributeError(f"{type(self).__name__} is immutable")
        object.__setattr__(self, name, value)

    def __reduce__(self):
        return (type(self), self._key[1:])

    def __repr__(self) -> str:
        args = ", ".join(repr(a) for a in self._key[1:])
        return f"{type(self).__name__}({args})"

    def __str__(self) -> str:
        return to_text(self)

    # Operator sugar, mostly for tests and interactive use.
    def __and__(self, other: Formula) -> And:
        return And(self, other)

    def __or__(self, other: Formula) -> Or:
        return Or(self, other)

    def __invert__(self) -> Neg:
        return Neg(self)

    def __rshift__(self, other: Formula) -> Or:
        return implies(self, other)


class Prop(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(("p", name))


class Nom(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(("n", name))


class Neg(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        object.__setattr__(self, "sub", sub)
        self._init(("~", sub))


class And(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._init(("&", left, right))


class Or(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        self._init(("|", left, right))


class Dia(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        object.__setattr__(self, "sub", sub)
        self._init(("<>", sub))


class Box(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula):
        object.__setattr__(self, "sub", sub)
        self._init(("[]", sub))


class At(Formula):
    """Satisfaction operator ``@nominal sub``; ``nominal`` is a plain name."""

    __slots__ = ("nominal", "sub")

    def __init__(self, nominal: str, sub: Formula):
        if isinstance(nominal, Nom):
            nominal = nominal.name
        object.__setattr__(self, "nominal", nominal)
        object.__setattr__(self, "sub", sub)
        self._init(("@", nominal, sub))


def implies(a: Formula, b: Formula) -> Or:
    return Or(Neg(a), b)


def iff(a: Formula, b: Formula) -> And:
    return And(implies(a, b), implies(b, a))


# --------------------------------------------------------------------------
# Printing

_PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4

_ASCII = {"neg": "~", "and": " & ", "or": " | ", "dia": "<>", "box": "[]"}
_UNICODE = {"neg": "¬", "and": " ∧ ", "or": " ∨ ", "dia": "◇", "box": "□"}


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Prop, Nom)):
        return _PREC_ATOM
    return _PREC_UNARY


def to_text(f: Formula, unicode: bool = False) -> str:
    """Render ``f`` with the minimum parentheses needed to parse it back."""
    sym = _UNICODE if unicode else _ASCII

    def wrap(g: Formula, needed: bool) -> str:
        s = go(g)
        return f"({s})" if needed else s

    def go(g: Formula) -> str:
        if isinstance(g, (Prop, Nom)):
            return g.name
        if isinstance(g, Neg):
            return sym["neg"] + wrap(g.sub, _prec(g.sub) < _PREC_UNARY)
        if isinstance(g, Dia):
            return sym["dia"] + wrap(g.sub, _prec(g.sub) < _PREC_UNARY)
        if isinstance(g, Box):
            return sym["box"] + wrap(g.sub, _prec(g.sub) < _PREC_UNARY)
        if isinstance(g, At):
            body = wrap(g.sub, _prec(g.sub) < _PREC_UNARY)
            sep = "" if body.startswith("(") else " "
            return f"@{g.nominal}{sep}{body}"
        if isinstance(g, And):
            return (wrap(g.left, _prec(g.left) <= _PREC_AND) + sym["and"]
                    + wrap(g.right, _prec(g.right) < _PREC_AND))
        if isinstance(g, Or):
            return (wrap(g.left, _prec(g.left) <= _PREC_OR) + sym["or"]
                    + wrap(g.right, _prec(g.right) < _PREC_OR))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# --------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NamespaceError(ParseError):
    """An identifier is used both as a proposition and as a nominal."""


_TOKEN = re.compile(
    r"""\s*(?:
      (?P<iff><->|↔)
    | (?P<imp>->|→)
    | (?P<dia><>|◇)
    | (?P<box>\[\]|□)
    | (?P<neg>~|¬|!)
    | (?P<and>&|∧)
    | (?P<or>\||∨)
    | (?P<at>@_?)
    | (?P<lp>\()
    | (?P<rp>\))
    | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, nominal_names: set[str]):
        self.tokens = tokens
        self.i = 0
        self.nominal_names = nominal_names

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind}, found {what!r}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.implication()
        if self.peek() == "iff":
            self.i += 1
            return iff(left, self.formula())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "imp":
            self.i += 1
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.peek() == "or":
            self.i += 1
            return Or(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        if self.peek() == "and":
            self.i += 1
            return And(left, self.conjunction())
        return left

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "neg":
            self.i += 1
            return Neg(self.unary())
        if kind == "dia":
            self.i += 1
            return Dia(self.unary())
        if kind == "box":
            self.i += 1
            return Box(self.unary())
        if kind == "at":
            self.i += 1
            name = self.take("ident")[1]
            return At(name, self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, value, _ = self.tokens[self.i]
        if kind == "ident":
            self.i += 1
            return Nom(value) if value in self.nominal_names else Prop(value)
        if kind == "lp":
            self.i += 1
            inner = self.formula()
            self.take("rp")
            return inner
        tok = self.tokens[self.i]
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse(text: str, nominals: Iterable[str] = (), props: Iterable[str] = (),
          allow_reserved: bool = False) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    ``nominals`` declares extra nominal names (identifiers that never follow
    ``@`` in ``text``); ``props`` declares names that must be propositions.
    Names of the form ``n<digits>`` are reserved for fresh nominals and are
    rejected unless ``allow_reserved`` is set.
    """
    tokens = _tokenize(text)
    declared_props = set(props)
    nominal_names = set(nominals)
    clash = nominal_names & declared_props
    if clash:
        raise NamespaceError(f"{sorted(clash)[0]!r} declared as both nominal "
                             "and proposition", 0)
    for n, (kind, value, pos) in enumerate(tokens):
        if kind == "at" and tokens[n + 1][0] == "ident":
            name = tokens[n + 1][1]
            if name in declared_props:
                raise NamespaceError(
                    f"proposition {name!r} used as a nominal", tokens[n + 1][2])
            nominal_names.add(name)
        if kind == "ident" and not allow_reserved and _RESERVED.match(value):
            raise ParseError(f"identifier {value!r} is reserved for fresh "
                             "nominals", pos)
    parser = _Parser(tokens, nominal_names)
    result = parser.formula()
    parser.take("eof")
    return result


def check_namespaces(f: Formula) -> None:
    """Raise :class:`NamespaceError` if a name is both a prop and a nominal."""
    clash = set(props(f)) & set(nominals(f))
    if clash:
        raise NamespaceError(f"{sorted(clash)[0]!r} used as both nominal and "
                             "proposition", 0)


# --------------------------------------------------------------------------
# Normal forms and structural queries


@lru_cache(maxsize=None)
def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms; ``~@i f`` becomes ``@i ~f``."""
    if isinstance(f, (Prop, Nom)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Dia):
        return Dia(to_nnf(f.sub))
    if isinstance(f, Box):
        return Box(to_nnf(f.sub))
    if isinstance(f, At):
        return At(f.nominal, to_nnf(f.sub))
    g = f.sub
    if isinstance(g, (Prop, Nom)):
        return f
    if isinstance(g, Neg):
        return to_nnf(g.sub)
    if isinstance(g, And):
        return Or(to_nnf(Neg(g.left)), to_nnf(Neg(g.right)))
    if isinstance(g, Or):
        return And(to_nnf(Neg(g.left)), to_nnf(Neg(g.right)))
    if isinstance(g, Dia):
        return Box(to_nnf(Neg(g.sub)))
    if isinstance(g, Box):
        return Dia(to_nnf(Neg(g.sub)))
    if isinstance(g, At):
        return At(g.nominal, to_nnf(Neg(g.sub)))
    raise TypeError(f"not a formula: {g!r}")


def is_nnf(f: Formula) -> bool:
    return all(not isinstance(g, Neg) or isinstance(g.sub, (Prop, Nom))
               for g in _walk(f))


@lru_cache(maxsize=None)
def complement(f: Formula) -> Formula:
    """The NNF of the negation of ``f``."""
    return to_nnf(Neg(f))


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Prop, Nom)):
        return ()
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    return (f.sub,)


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(_children(g)))


@lru_cache(maxsize=None)
def subformulas(f: Formula) -> frozenset[Formula]:
    """All subformulas of ``f``, including ``f`` itself."""
    return frozenset(_walk(f))


def size(f: Formula) -> int:
    return sum(1 for _ in _walk(f))


def nominals(f: Formula) -> tuple[str, ...]:
    """Nominal names of ``f`` in left-to-right order of first occurrence."""
    seen: dict[str, None] = {}
    for g in _walk(f):
        if isinstance(g, Nom):
            seen.setdefault(g.name)
        elif isinstance(g, At):
            seen.setdefault(g.nominal)
    return tuple(seen)


def props(f: Formula) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for g in _walk(f):
        if isinstance(g, Prop):
            seen.setdefault(g.name)
    return tuple(seen)


@lru_cache(maxsize=None)
def modal_depth(f: Formula) -> int:
    if isinstance(f, (Prop, Nom)):
        return 0
    if isinstance(f, (Dia, Box)):
        return 1 + modal_depth(f.sub)
    return max(modal_depth(g) for g in _children(f))


def prefixed_subformula(a, b) -> bool:
    """True iff the payload of ``a`` is a subformula of the payload of ``b``.

    ``a`` and ``b`` are anything with a ``payload`` attribute, or
    :class:`At` formulas.  Prefixes are ignored.
    """
    return _payload(a) in subformulas(_payload(b))


def _payload(x) -> Formula:
    if isinstance(x, At):
        return x.sub
    return x.payload


def is_reserved(name: str) -> bool:
    return _RESERVED.match(name) is not None


def fresh_nominal(used: Iterable[str]) -> str:
    """Return ``n<k>`` with ``k`` one past the largest reserved index used."""
    top = -1
    for name in used:
        m = _RESERVED.match(name)
        if m:
            top = max(top, int(m.group(1)))
    return f"n{top + 1}"
