"""Finite Kripke models, satisfaction, frame-class checks and a brute-force
countermodel oracle."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Hashable, Iterable, Mapping, Optional

from .syntax import And, At, Box, Dia, Formula, Neg, Nom, Or, Prop, nominals, props

World = Hashable


class ModelError(ValueError):
    pass


class OracleBudgetExceeded(RuntimeError):
    pass


class FrameClass(enum.Enum):
    ALL = "All"
    SPO = "SPO"
    USPO = "USPO"
    PO = "PO"


# Properties each class demands, in reporting order.
CLASS_PROPERTIES = {
    FrameClass.ALL: (),
    FrameClass.SPO: ("irreflexive", "transitive"),
    FrameClass.USPO: ("serial", "irreflexive", "transitive"),
    FrameClass.PO: ("reflexive", "antisymmetric", "transitive"),
}


@dataclass(frozen=True, eq=False)
class KripkeModel:
    """A finite model.  ``worlds`` keeps its given order; it fixes the
    layout of serialised output."""

    worlds: tuple
    rel: frozenset = frozenset()
    props: Mapping[str, frozenset] = field(default_factory=dict)
    noms: Mapping[str, World] = field(default_factory=dict)

    def __post_init__(self):
        worlds = tuple(dict.fromkeys(self.worlds))
        if not worlds:
            raise ModelError("a model needs at least one world")
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "rel", frozenset(tuple(p) for p in self.rel))
        object.__setattr__(self, "props",
                           {k: frozenset(v) for k, v in self.props.items()})
        object.__setattr__(self, "noms", dict(self.noms))
        ws = set(worlds)
        for a, b in self.rel:
            if a not in ws or b not in ws:
                raise ModelError(f"edge ({a!r}, {b!r}) leaves the world set")
        for p, ext in self.props.items():
            if not ext <= ws:
                raise ModelError(f"valuation of {p!r} leaves the world set")
        for i, w in self.noms.items():
            if w not in ws:
                raise ModelError(f"nominal {i!r} names unknown world {w!r}")

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (set(self.worlds) == set(other.worlds) and self.rel == other.rel
                and _nonempty(self.props) == _nonempty(other.props)
                and self.noms == other.noms)

    __hash__ = None

    @cached_property
    def successors(self) -> dict:
        succ = {w: [] for w in self.worlds}
        for a, b in self.rel:
            succ[a].append(b)
        return succ

    def __contains__(self, w) -> bool:
        return w in self.successors


def _nonempty(valuation: Mapping[str, frozenset]) -> dict:
    return {k: v for k, v in valuation.items() if v}


def evaluate(m: KripkeModel, w: World, f: Formula) -> bool:
    """Truth of ``f`` at world ``w`` of ``m``.

    Propositions missing from the valuation are false everywhere; a nominal
    missing from it is an error.
    """
    if w not in m:
        raise ModelError(f"unknown world {w!r}")
    return _eval(m, w, f)


def _eval(m: KripkeModel, w, f: Formula) -> bool:
    if isinstance(f, Prop):
        return w in m.props.get(f.name, ())
    if isinstance(f, Nom):
        return w == _named(m, f.name)
    if isinstance(f, Neg):
        return not _eval(m, w, f.sub)
    if isinstance(f, And):
        return _eval(m, w, f.left) and _eval(m, w, f.right)
    if isinstance(f, Or):
        return _eval(m, w, f.left) or _eval(m, w, f.right)
    if isinstance(f, Dia):
        return any(_eval(m, v, f.sub) for v in m.successors[w])
    if isinstance(f, Box):
        return all(_eval(m, v, f.sub) for v in m.successors[w])
    if isinstance(f, At):
        return _eval(m, _named(m, f.nominal), f.sub)
    raise TypeError(f"not a formula: {f!r}")


def _named(m: KripkeModel, name: str):
    try:
        return m.noms[name]
    except KeyError:
        raise ModelError(f"nominal {name!r} is not interpreted") from None


def extension(m: KripkeModel, f: Formula) -> frozenset:
    """The set of worlds where ``f`` holds, computed bottom-up on sets."""
    everything = frozenset(m.worlds)
    if isinstance(f, Prop):
        return frozenset(m.props.get(f.name, ()))
    if isinstance(f, Nom):
        return frozenset([_named(m, f.name)])
    if isinstance(f, Neg):
        return everything - extension(m, f.sub)
    if isinstance(f, And):
        return extension(m, f.left) & extension(m, f.right)
    if isinstance(f, Or):
        return extension(m, f.left) | extension(m, f.right)
    if isinstance(f, Dia):
        inner = extension(m, f.sub)
        return frozenset(a for a, b in m.rel if b in inner)
    if isinstance(f, Box):
        inner = extension(m, f.sub)
        bad = frozenset(a for a, b in m.rel if b not in inner)
        return everything - bad
    if isinstance(f, At):
        return everything if _named(m, f.nominal) in extension(m, f.sub) else frozenset()
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Relation properties


def serial_witness(worlds: Iterable, rel) -> Optional[tuple]:
    has_succ = {a for a, _ in rel}
    for w in worlds:
        if w not in has_succ:
            return (w,)
    return None


def reflexive_witness(worlds: Iterable, rel) -> Optional[tuple]:
    for w in worlds:
        if (w, w) not in rel:
            return (w, w)
    return None


def irreflexive_witness(worlds: Iterable, rel) -> Optional[tuple]:
    for w in worlds:
        if (w, w) in rel:
            return (w, w)
    return None


def antisymmetric_witness(worlds: Iterable, rel) -> Optional[tuple]:
    for a, b in rel:
        if a != b and (b, a) in rel:
            return (a, b)
    return None


def transitive_witness(worlds: Iterable, rel) -> Optional[tuple]:
    """A triple ``(x, y, z)`` with ``xRy``, ``yRz`` but not ``xRz``."""
    succ: dict = {}
    for a, b in rel:
        succ.setdefault(a, set()).add(b)
    for a, bs in succ.items():
        for b in bs:
            for c in succ.get(b, ()):
                if c not in bs:
                    return (a, b, c)
    return None


PROPERTY_CHECKS = {
    "serial": serial_witness,
    "reflexive": reflexive_witness,
    "irreflexive": irreflexive_witness,
    "antisymmetric": antisymmetric_witness,
    "transitive": transitive_witness,
}


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    witness: Optional[tuple] = None
    note: str = ""


@dataclass(frozen=True)
class ClassReport:
    frame_class: FrameClass
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[PropertyCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        lines = [f"{self.frame_class.value}: {'pass' if self.passed else 'FAIL'}"]
        for c in self.checks:
            extra = "" if c.passed else f" (witness {c.witness})"
            lines.append(f"  {c.name}: {'ok' if c.passed else 'fail'}{extra}")
        return "\n".join(lines)


def relation_class_check(m: KripkeModel, c: FrameClass) -> ClassReport:
    checks = []
    for name in CLASS_PROPERTIES[c]:
        witness = PROPERTY_CHECKS[name](m.worlds, m.rel)
        checks.append(PropertyCheck(name, witness is None, witness))
    return ClassReport(c, tuple(checks))


# --------------------------------------------------------------------------
# Brute-force oracle


def _in_class(n: int, rel: frozenset, c: FrameClass) -> bool:
    worlds = range(n)
    return all(PROPERTY_CHECKS[p](worlds, rel) is None for p in CLASS_PROPERTIES[c])


def _canonical(n: int, rel: frozenset) -> tuple:
    return min(tuple(sorted((perm[a], perm[b]) for a, b in rel))
               for perm in itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def class_frames(n: int, c: FrameClass) -> tuple[frozenset, ...]:
    """Relations on worlds ``0..n-1`` in class ``c``, one per isomorphism type."""
    if n > 5 or (c is FrameClass.ALL and n > 4):
        raise OracleBudgetExceeded(f"frame enumeration for {c.value} on {n} "
                                   "worlds is too large")
    off = [(a, b) for a in range(n) for b in range(n) if a < b]
    if c is FrameClass.ALL:
        pairs = [(a, b) for a in range(n) for b in range(n)]
        candidates = (frozenset(p for p, bit in zip(pairs, bits) if bit)
                      for bits in itertools.product((0, 1), repeat=len(pairs)))
    else:
        # Order classes are antisymmetric: at most one direction per pair.
        diag = ([(a, a) for a in range(n)] if c is FrameClass.PO else [])
        options = [((), ((a, b),), ((b, a),)) for a, b in off]
        candidates = (frozenset(diag + [e for choice in combo for e in choice])
                      for combo in itertools.product(*options))
    seen: dict[tuple, frozenset] = {}
    for rel in candidates:
        if _in_class(n, rel, c):
            seen.setdefault(_canonical(n, rel), rel)
    return tuple(seen.values())


def _compile(f: Formula, n: int, succ: list[int], nom_masks: dict, prop_masks: dict) -> int:
    full = (1 << n) - 1
    if isinstance(f, Prop):
        return prop_masks.get(f.name, 0)
    if isinstance(f, Nom):
        return nom_masks[f.name]
    if isinstance(f, Neg):
        return full & ~_compile(f.sub, n, succ, nom_masks, prop_masks)
    if isinstance(f, And):
        return (_compile(f.left, n, succ, nom_masks, prop_masks)
                & _compile(f.right, n, succ, nom_masks, prop_masks))
    if isinstance(f, Or):
        return (_compile(f.left, n, succ, nom_masks, prop_masks)
                | _compile(f.right, n, succ, nom_masks, prop_masks))
    if isinstance(f, Dia):
        inner = _compile(f.sub, n, succ, nom_masks, prop_masks)
        return sum(1 << w for w in range(n) if succ[w] & inner)
    if isinstance(f, Box):
        inner = _compile(f.sub, n, succ, nom_masks, prop_masks)
        return sum(1 << w for w in range(n) if not succ[w] & ~inner)
    if isinstance(f, At):
        inner = _compile(f.sub, n, succ, nom_masks, prop_masks)
        return full if nom_masks[f.nominal] & inner else 0
    raise TypeError(f"not a formula: {f!r}")


def oracle_countermodel(f: Formula, c: FrameClass, max_worlds: int,
                        budget: int = 20_000_000) -> Optional[tuple[KripkeModel, int]]:
    """Search class-``c`` models with at most ``max_worlds`` worlds for one
    falsifying ``f``; return ``(model, world)`` or ``None``.

    ``None`` is not a validity proof: it only covers finite models of the
    given size, and serial strict partial orders have no finite models at all.
    ``budget`` caps the number of (frame, valuation) pairs examined.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    ps, ns = props(f), nominals(f)
    examined = 0
    for n in range(1, max_worlds + 1):
        frames = class_frames(n, c)
        for rel in frames:
            succ = [0] * n
            for a, b in rel:
                succ[a] |= 1 << b
            for nom_choice in itertools.product(range(n), repeat=len(ns)):
                nom_masks = {name: 1 << w for name, w in zip(ns, nom_choice)}
                for prop_choice in itertools.product(range(2 ** n), repeat=len(ps)):
                    examined += 1
                    if examined > budget:
                        raise OracleBudgetExceeded(
                            f"more than {budget} models examined")
                    prop_masks = dict(zip(ps, prop_choice))
                    true_at = _compile(f, n, succ, nom_masks, prop_masks)
                    if true_at != (1 << n) - 1:
                        w = next(x for x in range(n) if not true_at >> x & 1)
                        model = KripkeModel(
                            worlds=tuple(range(n)), rel=rel,
                            props={p: {x for x in range(n) if mask >> x & 1}
                                   for p, mask in prop_masks.items()},
                            noms=dict(zip(ns, nom_choice)))
                        return model, w
    return None


# --------------------------------------------------------------------------
# JSON model format


def _world_to_json(w) -> Any:
    if isinstance(w, tuple):
        return [_world_to_json(x) for x in w]
    return w


def _world_from_json(w) -> World:
    if isinstance(w, list):
        return tuple(_world_from_json(x) for x in w)
    return w


def model_to_dict(m: KripkeModel) -> dict:
    order = {w: k for k, w in enumerate(m.worlds)}
    rel = sorted(m.rel, key=lambda e: (order[e[0]], order[e[1]]))
    return {
        "worlds": [_world_to_json(w) for w in m.worlds],
        "rel": [[_world_to_json(a), _world_to_json(b)] for a, b in rel],
        "props": {p: [_world_to_json(w) for w in m.worlds if w in ext]
                  for p, ext in sorted(m.props.items())},
        "noms": {i: _world_to_json(w) for i, w in sorted(m.noms.items())},
    }


def model_from_dict(d: Mapping) -> KripkeModel:
    try:
        return KripkeModel(
            worlds=tuple(_world_from_json(w) for w in d["worlds"]),
            rel=frozenset((_world_from_json(a), _world_from_json(b)) for a, b in d["rel"]),
            props={p: frozenset(_world_from_json(w) for w in ws)
                   for p, ws in d.get("props", {}).items()},
            noms={i: _world_from_json(w) for i, w in d.get("noms", {}).items()},
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model document: {exc}") from None


def dump_model(m: KripkeModel) -> str:
    return json.dumps(model_to_dict(m), indent=2, ensure_ascii=False) + "\n"


def load_model(text: str) -> KripkeModel:
    return model_from_dict(json.loads(text))
