"""Loop checking for transitive calculi.

Every nominal ``i`` on a branch gets a signature ``T(i)``: the formulas ``f``
with ``@i f`` on the branch that are either subformulas of the root payload or
subformulas of a per-root-nominal "extra" formula (``[]~j`` for the strict
calculi, ``[](j | []~j)`` for the partial-order one).  Nominals with equal
signatures are twins.  A nominal is a quasi-urfather when no two distinct
nominals on its ancestor path (itself included) in the generation forest are
twins; only quasi-urfathers may expand diamonds.  The identity urfather of
``i`` is the earliest-introduced quasi-urfather twin of ``i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import Box, Formula, Neg, Nom, Or, subformulas, to_text


class TSetVariant(enum.Enum):
    I4 = "I4"
    PO = "PO"


def extra_formula(j: str, variant: TSetVariant) -> Formula:
    if variant is TSetVariant.PO:
        return Box(Or(Nom(j), Box(Neg(Nom(j)))))
    return Box(Neg(Nom(j)))


def t2_universe(root_nominals: Iterable[str], variant: TSetVariant) -> frozenset:
    out: set[Formula] = set()
    for j in root_nominals:
        out |= subformulas(extra_formula(j, variant))
    return frozenset(out)


@dataclass(frozen=True)
class TSet:
    owner: str
    t1: frozenset
    t2: frozenset
    variant: TSetVariant

    @property
    def members(self) -> frozenset:
        return self.t1 | self.t2

    def __eq__(self, other):
        if isinstance(other, TSet):
            return self.members == other.members
        if isinstance(other, (set, frozenset)):
            return self.members == other
        return NotImplemented

    def __hash__(self):
        return hash(self.members)


class TSetIndex:
    """Incrementally maintained signatures for one branch."""

    def __init__(self, root_payload: Formula, root_nominals: Iterable[str],
                 variant: TSetVariant):
        self.variant = variant
        self.t1_universe = subformulas(root_payload)
        self.t2_universe = t2_universe(root_nominals, variant)
        self.sets: dict[str, set] = {}
        self._frozen: dict[str, frozenset] = {}

    def note(self, prefix: str, payload: Formula) -> None:
        if payload in self.t1_universe or payload in self.t2_universe:
            self.sets.setdefault(prefix, set()).add(payload)
            self._frozen.pop(prefix, None)

    def get(self, i: str) -> frozenset:
        try:
            return self._frozen[i]
        except KeyError:
            fs = self._frozen[i] = frozenset(self.sets.get(i, ()))
            return fs

    def copy(self) -> "TSetIndex":
        new = object.__new__(TSetIndex)
        new.variant = self.variant
        new.t1_universe = self.t1_universe
        new.t2_universe = self.t2_universe
        new.sets = {k: set(v) for k, v in self.sets.items()}
        new._frozen = dict(self._frozen)
        return new


def _variant(b, variant: Optional[TSetVariant]) -> TSetVariant:
    if variant is not None:
        return variant
    return b.calculus.tset_variant or TSetVariant.I4


def t_set(b, i: str, variant: Optional[TSetVariant] = None) -> TSet:
    """Recompute ``T(i)`` on branch ``b`` from its entries."""
    variant = _variant(b, variant)
    t1u = subformulas(b.root.payload)
    t2u = t2_universe(b.root_nominals, variant)
    t1, t2 = set(), set()
    for e in b.entries:
        if e.prefix != i:
            continue
        if e.payload in t1u:
            t1.add(e.payload)
        if e.payload in t2u:
            t2.add(e.payload)
    return TSet(i, frozenset(t1), frozenset(t2), variant)


def _signature(b, i: str, variant: Optional[TSetVariant]) -> frozenset:
    index = getattr(b, "tsets", None)
    if index is not None and (variant is None or variant is index.variant):
        return index.get(i)
    return t_set(b, i, variant).members


def twins(b, i: str, j: str, variant: Optional[TSetVariant] = None) -> bool:
    return _signature(b, i, variant) == _signature(b, j, variant)


@dataclass(frozen=True)
class GenerationGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def parents(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for a, b in self.edges:
            out.setdefault(b, []).append(a)
        return out

    def shape_violations(self) -> list[str]:
        """Problems preventing the graph from being a forest."""
        problems = []
        for node, ps in self.parents().items():
            if len(ps) > 1:
                problems.append(f"{node} has {len(ps)} parents")
        succ: dict[str, list[str]] = {}
        for a, b in self.edges:
            succ.setdefault(a, []).append(b)
        state: dict[str, int] = {}
        for start in self.nodes:
            if start in state:
                continue
            stack = [(start, iter(succ.get(start, ())))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                elif state.get(nxt) == 1:
                    problems.append(f"cycle through {nxt}")
                elif nxt not in state:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ.get(nxt, ()))))
        return problems

    def to_dot(self, labels: Optional[dict[str, str]] = None) -> str:
        lines = ["digraph generation {"]
        for n in self.nodes:
            label = labels.get(n, n) if labels else n
            lines.append(f'  "{n}" [label="{_dot_escape(label)}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def generation_graph(b) -> GenerationGraph:
    edges = tuple((e.prefix, e.payload.sub.name) for e in b.entries
                  if e.accessibility and e.payload.sub.name != e.prefix)
    return GenerationGraph(tuple(b.nominal_order), edges)


def ancestors_or_self(b, i: str) -> list[str]:
    path = [i]
    seen = {i}
    while path[-1] in b.parent:
        nxt = b.parent[path[-1]]
        if nxt in seen:
            break
        path.append(nxt)
        seen.add(nxt)
    return path


def quasi_urfather(b, i: str, variant: Optional[TSetVariant] = None) -> bool:
    seen: set[frozenset] = set()
    for j in ancestors_or_self(b, i):
        sig = _signature(b, j, variant)
        if sig in seen:
            return False
        seen.add(sig)
    return True


def identity_urfather(b, i: str, variant: Optional[TSetVariant] = None) -> Optional[str]:
    target = _signature(b, i, variant)
    for j in b.nominal_order:
        if _signature(b, j, variant) == target and quasi_urfather(b, j, variant):
            return j
    return None


def urfather_map(b, variant: Optional[TSetVariant] = None) -> dict[str, str]:
    """``v(i)`` for every nominal ``i`` in its domain, in introduction order."""
    out = {}
    for i in b.nominal_order:
        v = identity_urfather(b, i, variant)
        if v is not None:
            out[i] = v
    return out


def dump_tsets(b, variant: Optional[TSetVariant] = None, unicode: bool = False) -> str:
    lines = []
    for i in b.nominal_order:
        ts = t_set(b, i, variant)
        body = ", ".join(sorted(to_text(f, unicode) for f in ts.members))
        flag = "" if quasi_urfather(b, i, variant) else "  (blocked)"
        lines.append(f"T({i}) = {{{body}}}{flag}")
    return "\n".join(lines) + "\n"
