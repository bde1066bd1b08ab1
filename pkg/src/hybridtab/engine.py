"""Branches, tableaux and the proof-search driver.

A :class:`Branch` owns its entries plus the indices the scheduler needs.
Rule instances sit on a priority agenda; instances of the nominal-generating
rules that fail restriction (D) when popped are parked and retried once the
agenda runs dry, since quasi-urfather status can change as signatures grow.
"""

from __future__ import annotations

import enum
import heapq
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .calculi import (RULES, CalculusSpec, RuleInstance, conclusions,
                      get_calculus, is_applicable, premise_ok)
from .loopcheck import TSetIndex
from .syntax import (At, Box, Dia, Formula, Neg, Nom, complement, fresh_nominal,
                     nominals, to_nnf)

DEFAULT_BUDGET = 50_000


@dataclass(frozen=True, slots=True)
class Entry:
    seq: int
    prefix: str
    payload: Formula
    accessibility: bool = False
    rule: str = "root"
    premises: tuple = ()

    @property
    def formula(self) -> At:
        return At(self.prefix, self.payload)


class Status(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"
    BUDGET = "budget"
    PENDING = "pending"


class Branch:
    def __init__(self, root: At, calculus: CalculusSpec,
                 seed: Optional[int] = None):
        self.calculus = calculus
        self.entries: list[Entry] = []
        self.index: dict[tuple, int] = {}
        self.by_prefix: dict[str, list[int]] = {}
        self.boxes: dict[str, list[int]] = {}
        self.dias: dict[str, list[int]] = {}
        self.noms: dict[str, list[int]] = {}
        self.plain: dict[str, list[int]] = {}
        self.nominal_order: list[str] = []
        self.intro: dict[str, tuple[int, int]] = {}
        self.parent: dict[str, str] = {}
        self.fired_dia: set = set()
        self.fired_ser: set = set()
        self.firings = 0
        self.closed_by: Optional[tuple[int, int]] = None
        self.agenda: list = []
        self.blocked: list[RuleInstance] = []
        self._counter = 0
        self.rng = random.Random(seed) if seed is not None else None
        self.root_nominals = nominals(root)
        self._fresh = int(fresh_nominal(self.root_nominals)[1:])
        self.tsets = (TSetIndex(root.sub, self.root_nominals, calculus.tset_variant)
                      if calculus.tset_variant is not None else None)
        self._append(root.nominal, root.sub, False, "root", ())

    # -- queries ------------------------------------------------------------

    @property
    def root(self) -> Entry:
        return self.entries[0]

    def has(self, prefix: str, payload: Formula) -> bool:
        return (prefix, payload) in self.index

    def find(self, prefix: str, payload: Formula) -> Optional[Entry]:
        n = self.index.get((prefix, payload))
        return None if n is None else self.entries[n]

    @property
    def closed(self) -> bool:
        return self.closed_by is not None

    def peek_fresh(self) -> str:
        return f"n{self._fresh}"

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def saturated(self) -> bool:
        """True when the agenda is drained and no parked instance applies."""
        if self.closed:
            return False
        return not any(is_applicable(self, inst) for _, _, inst in self.agenda) and \
            not any(is_applicable(self, inst) for inst in self.blocked)

    # -- mutation -----------------------------------------------------------

    def copy(self) -> "Branch":
        new = object.__new__(Branch)
        new.__dict__.update(self.__dict__)
        new.entries = list(self.entries)
        new.index = dict(self.index)
        for name in ("by_prefix", "boxes", "dias", "noms", "plain"):
            setattr(new, name, {k: list(v) for k, v in getattr(self, name).items()})
        new.nominal_order = list(self.nominal_order)
        new.intro = dict(self.intro)
        new.parent = dict(self.parent)
        new.fired_dia = set(self.fired_dia)
        new.fired_ser = set(self.fired_ser)
        new.agenda = list(self.agenda)
        new.blocked = list(self.blocked)
        if self.rng is not None:
            new.rng = random.Random()
            new.rng.setstate(self.rng.getstate())
        if self.tsets is not None:
            new.tsets = self.tsets.copy()
        return new

    def _push(self, inst: RuleInstance) -> None:
        if inst.rule not in self.calculus.rules:
            return
        tie = self.rng.random() if self.rng is not None else self._counter
        self._counter += 1
        heapq.heappush(self.agenda, (RULES[inst.rule].priority, tie, inst))

    def _append(self, prefix: str, payload: Formula, accessibility: bool,
                rule: str, premises: tuple) -> Optional[Entry]:
        key = (prefix, payload)
        if key in self.index:
            return None
        n = len(self.entries)
        e = Entry(n, prefix, payload, accessibility, rule, premises)
        self.entries.append(e)
        self.index[key] = n
        if self.tsets is not None:
            self.tsets.note(prefix, payload)
        if accessibility and payload.sub.name != prefix:
            self.parent.setdefault(payload.sub.name, prefix)
        other = self.index.get((prefix, complement(payload)))
        if other is not None and self.closed_by is None:
            self.closed_by = (other, n)
        self._register(e)
        return e

    def _register(self, e: Entry) -> None:
        n, i, f = e.seq, e.prefix, e.payload
        names = (i,) + tuple(x for x in nominals(f) if x != i)
        for pos, name in enumerate(names):
            if name not in self.intro:
                self.intro[name] = (n, pos)
                self.nominal_order.append(name)
                for tag, schema in RULES.items():
                    if schema.kind == "nominal":
                        self._push(RuleInstance(tag, (), name))
        self.by_prefix.setdefault(i, []).append(n)
        for tag in ("and", "or", "at", "neg", "dia"):
            if premise_ok(self, tag, (n,)):
                self._push(RuleInstance(tag, (n,)))
        if isinstance(f, Box):
            self.boxes.setdefault(i, []).append(n)
            for d in self.dias.get(i, ()):
                self._push(RuleInstance("box", (n, d)))
                self._push(RuleInstance("trs", (n, d)))
        if isinstance(f, Dia) and isinstance(f.sub, Nom):
            self.dias.setdefault(i, []).append(n)
            for bx in self.boxes.get(i, ()):
                self._push(RuleInstance("box", (bx, n)))
                self._push(RuleInstance("trs", (bx, n)))
        if not e.accessibility:
            self.plain.setdefault(i, []).append(n)
            for k in self.noms.get(i, ()):
                self._push(RuleInstance("id", (k, n)))
        if isinstance(f, Nom):
            self.noms.setdefault(i, []).append(n)
            for m in self.plain.get(i, ()):
                self._push(RuleInstance("id", (n, m)))

    def fire(self, inst: RuleInstance) -> Optional["Branch"]:
        """Apply ``inst``.  For a branching rule, returns the sibling branch
        carrying the right alternative; this branch takes the left one."""
        tag = inst.rule
        fresh = None
        if RULES[tag].generating:
            fresh = self.peek_fresh()
            self._fresh += 1
            if tag == "dia":
                e = self.entries[inst.premises[0]]
                self.fired_dia.add((e.prefix, e.payload))
            else:
                self.fired_ser.add(inst.nominal)
        alts = conclusions(self, tag, inst.premises, inst.nominal, fresh)
        self.firings += 1
        sibling = None
        if len(alts) > 1:
            sibling = self.copy()
            for c in alts[1]:
                sibling._append(*c, tag, inst.premises)
        for c in alts[0]:
            self._append(*c, tag, inst.premises)
        return sibling

    def run(self, budget: int = DEFAULT_BUDGET) -> tuple[Status, Optional["Branch"]]:
        """Fire instances until the branch closes, saturates, exceeds the
        budget, or splits (then the sibling is returned alongside OPEN)."""
        gated = self.calculus.gated
        while not self.closed:
            if self.firings >= budget:
                return Status.BUDGET, None
            if self.agenda:
                inst = heapq.heappop(self.agenda)[2]
                if not is_applicable(self, inst):
                    if inst.rule in gated and not self._spent(inst):
                        self.blocked.append(inst)
                    continue
            else:
                inst = self._unblock()
                if inst is None:
                    return Status.OPEN, None
            sibling = self.fire(inst)
            if sibling is not None:
                return Status.OPEN, sibling
        return Status.CLOSED, None

    def _spent(self, inst: RuleInstance) -> bool:
        if inst.rule == "dia":
            e = self.entries[inst.premises[0]]
            return (e.prefix, e.payload) in self.fired_dia
        return inst.nominal in self.fired_ser

    def _unblock(self) -> Optional[RuleInstance]:
        keep = []
        chosen = None
        for inst in self.blocked:
            if chosen is None and is_applicable(self, inst):
                chosen = inst
            elif not self._spent(inst):
                keep.append(inst)
        self.blocked = keep
        return chosen


# --------------------------------------------------------------------------
# Tableaux


@dataclass(eq=False)
class Node:
    start: int
    branch: Optional[Branch] = None
    status: Status = Status.PENDING
    entries: tuple = ()
    children: list = field(default_factory=list)
    # firings already spent on the shared prefix when this node was split off
    inherited: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            node = stack.pop()
            if node.children:
                stack.extend(reversed(node.children))
            else:
                yield node


@dataclass(eq=False)
class Tableau:
    root_formula: At
    calculus: CalculusSpec
    root: Node
    seed: Optional[int] = None

    @classmethod
    def for_root(cls, root: At, calculus: CalculusSpec | str,
                 seed: Optional[int] = None) -> "Tableau":
        if isinstance(calculus, str):
            calculus = get_calculus(calculus)
        root = At(root.nominal, to_nnf(root.sub))
        b = Branch(root, calculus, seed)
        return cls(root, calculus, Node(0, b), seed)

    def leaves(self) -> list[Node]:
        return list(self.root.leaves())

    @property
    def closed(self) -> bool:
        return all(n.status is Status.CLOSED for n in self.leaves())

    def open_branches(self) -> list[Branch]:
        return [n.branch for n in self.leaves() if n.status is Status.OPEN]

    @property
    def firings(self) -> int:
        """Rule firings over the whole tableau, shared prefixes counted once."""
        total = 0
        stack = [(self.root, 0)]
        while stack:
            node, inherited = stack.pop()
            if node.children:
                here = node.children[0].inherited
                total += here - inherited
                stack.extend((c, here) for c in node.children)
            elif node.branch is not None:
                total += node.branch.firings - inherited
        return total


def expand(t: Tableau, budget: int = DEFAULT_BUDGET,
           stop_at_open: bool = False) -> Tableau:
    """Expand pending leaves depth first, left alternative first."""
    stack = [n for n in reversed(t.leaves()) if n.status is Status.PENDING]
    while stack:
        node = stack.pop()
        b = node.branch
        status, sibling = b.run(budget)
        if sibling is not None:
            split = len(sibling.entries) - 1
            node.entries = tuple(b.entries[node.start:split])
            left = Node(split, b, inherited=b.firings - 1)
            right = Node(split, sibling, inherited=b.firings - 1)
            node.branch = None
            node.children = [left, right]
            stack.append(right)
            stack.append(left)
            continue
        node.status = status
        node.entries = tuple(b.entries[node.start:])
        if status is Status.OPEN and stop_at_open:
            break
    return t


class Verdict(enum.Enum):
    PROVABLE = "provable"
    NOT_PROVABLE = "not provable"
    BUDGET = "budget exceeded"


@dataclass(eq=False)
class Decision:
    formula: Formula
    calculus: CalculusSpec
    verdict: Verdict
    tableau: Tableau
    branch: Optional[Branch] = None

    @property
    def provable(self) -> bool:
        return self.verdict is Verdict.PROVABLE

    @property
    def firings(self) -> int:
        return self.tableau.firings


def refutation_root(f: Formula) -> At:
    """``@i nnf(~f)`` with ``i`` a reserved nominal not occurring in ``f``."""
    return At(fresh_nominal(nominals(f)), to_nnf(Neg(f)))


def decide(f: Formula, calculus: CalculusSpec | str = "k",
           budget: int = DEFAULT_BUDGET, seed: Optional[int] = None,
           full: bool = False) -> Decision:
    """Decide provability of ``f``.  Search stops at the first open saturated
    branch unless ``full`` is set."""
    t = Tableau.for_root(refutation_root(f), calculus, seed)
    return settle(f, t, budget, full)


def satisfy(root: At, calculus: CalculusSpec | str = "k",
            budget: int = DEFAULT_BUDGET, seed: Optional[int] = None,
            full: bool = False) -> Decision:
    """Run a tableau on ``root`` itself: PROVABLE here means the root is
    unsatisfiable."""
    t = Tableau.for_root(root, calculus, seed)
    return settle(root, t, budget, full)


def settle(f: Formula, t: Tableau, budget: int, full: bool) -> Decision:
    expand(t, budget, stop_at_open=not full)
    leaves = t.leaves()
    open_leaf = next((n for n in leaves if n.status is Status.OPEN), None)
    if open_leaf is not None:
        return Decision(f, t.calculus, Verdict.NOT_PROVABLE, t, open_leaf.branch)
    if any(n.status is Status.BUDGET for n in leaves):
        return Decision(f, t.calculus, Verdict.BUDGET, t)
    return Decision(f, t.calculus, Verdict.PROVABLE, t)


def is_closed(b: Branch) -> Optional[tuple[Entry, Entry]]:
    """The contradicting pair on ``b``, found by a full scan, or None."""
    for e in b.entries:
        other = b.find(e.prefix, complement(e.payload))
        if other is not None:
            return (e, other) if e.seq < other.seq else (other, e)
    return None
