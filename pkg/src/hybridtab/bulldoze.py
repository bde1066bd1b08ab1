"""Bulldozing clusters into infinite ascending chains.

A cluster of a transitive model is replaced by countably many copies of its
members, ordered lexicographically by (copy index, member order).  The
result is presented finitely: the base model, the worlds left alone, and the
ordered clusters.  Points of the infinite model are base worlds (outside
clusters) or :class:`Copy` pairs.

All copies with index at least one are bisimilar to each other, so
evaluation runs on a folded truncation: copies ``0 .. k-1`` where the last
copy stands for every later one and is related to itself throughout.  For
``k >= 2`` this truncation is a bounded morphic image of the infinite model
and evaluation on it is exact.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

from .extract import ExtractedModel, transitive_closure
from .semantics import (ClassReport, FrameClass, KripkeModel, PropertyCheck,
                        _compile, evaluate, model_to_dict, relation_class_check,
                        transitive_witness)
from .syntax import Formula, modal_depth, nominals, props


class BulldozeError(ValueError):
    pass


class Copy(NamedTuple):
    world: object
    index: int

    def __str__(self) -> str:
        return f"({self.world},{self.index})"


@dataclass(frozen=True)
class Cluster:
    index: int
    members: tuple

    def rank(self, w) -> int:
        return self.members.index(w)

    @property
    def simple(self) -> bool:
        return len(self.members) == 1


def detect_clusters(m: KripkeModel | ExtractedModel, variant: str = "I4"):
    """``(w_minus, clusters)`` for a transitive model.  In the partial-order
    variant only clusters with two or more members are reported."""
    model = m.model if isinstance(m, ExtractedModel) else m
    if transitive_witness(model.worlds, model.rel) is not None:
        raise BulldozeError("relation is not transitive")
    rel = model.rel
    seen: set = set()
    clusters = []
    for w in model.worlds:
        if w in seen or (w, w) not in rel:
            continue
        members = tuple(v for v in model.worlds
                        if v == w or ((w, v) in rel and (v, w) in rel))
        seen.update(members)
        if variant == "PO" and len(members) < 2:
            continue
        clusters.append(Cluster(len(clusters), members))
    inside = {w for c in clusters for w in c.members}
    w_minus = tuple(w for w in model.worlds if w not in inside)
    return w_minus, clusters


@dataclass(frozen=True, eq=False)
class BulldozedModel:
    base: KripkeModel
    w_minus: tuple
    clusters: tuple
    variant: str = "I4"

    @cached_property
    def cluster_of(self) -> dict:
        return {w: c for c in self.clusters for w in c.members}

    def alpha(self, x):
        return x.world if isinstance(x, Copy) else x

    def point(self, w):
        """Where base world ``w`` lives in the bulldozed model."""
        return Copy(w, 0) if w in self.cluster_of else w

    def related(self, x, y) -> bool:
        a, b = self.alpha(x), self.alpha(y)
        if not (isinstance(x, Copy) and isinstance(y, Copy)):
            return (a, b) in self.base.rel
        cx, cy = self.cluster_of[a], self.cluster_of[b]
        if cx is not cy:
            return (a, b) in self.base.rel
        if x.index != y.index:
            return x.index < y.index
        if self.variant == "PO":
            return cx.rank(a) <= cx.rank(b)
        return cx.rank(a) < cx.rank(b)

    def points(self, copies: int) -> tuple:
        tail = tuple(Copy(w, n) for n in range(copies)
                     for c in self.clusters for w in c.members)
        return self.w_minus + tail

    def nominal_point(self, name: str):
        return self.point(self.base.noms[name])

    def _model(self, copies: int, folded: bool) -> KripkeModel:
        cache = self.__dict__.setdefault("_models", {})
        if (copies, folded) not in cache:
            cache[copies, folded] = self._build(copies, folded)
        return cache[copies, folded]

    def _build(self, copies: int, folded: bool) -> KripkeModel:
        pts = self.points(copies)
        last = copies - 1
        rel = set()
        for x in pts:
            for y in pts:
                if self.related(x, y):
                    rel.add((x, y))
                elif (folded and isinstance(x, Copy) and isinstance(y, Copy)
                      and x.index == y.index == last
                      and self.cluster_of[x.world] is self.cluster_of[y.world]):
                    rel.add((x, y))
        valuation = {p: {x for x in pts if self.alpha(x) in ext}
                     for p, ext in self.base.props.items()}
        noms = {i: self.nominal_point(i) for i in self.base.noms}
        return KripkeModel(pts, frozenset(rel), valuation, noms)

    def truncate(self, copies: int) -> KripkeModel:
        """Induced submodel on copies ``0 .. copies-1``."""
        if copies < 1:
            raise ValueError("need at least one copy")
        return self._model(copies, folded=False)

    def folded(self, copies: int) -> KripkeModel:
        if copies < 2:
            raise ValueError("folding needs at least two copies")
        return self._model(copies, folded=True)


def bulldoze(m: ExtractedModel | KripkeModel, variant: Optional[str] = None) -> BulldozedModel:
    if variant is None:
        variant = "PO" if getattr(m, "variant", "I4") == "PO" else "I4"
    base = m.model if isinstance(m, ExtractedModel) else m
    w_minus, clusters = detect_clusters(base, variant)
    return BulldozedModel(base, w_minus, tuple(clusters), variant)


class TruncationTooShallow(ValueError):
    pass


def required_copies(f: Formula) -> int:
    return max(2, modal_depth(f) + 1)


def eval_truncated(bm: BulldozedModel, w, f: Formula, copies: int) -> bool:
    """Truth of ``f`` at point ``w`` of the bulldozed model, computed on the
    folded truncation with ``copies`` copies.  A plain base world that lies
    in a cluster is read as its copy ``0``."""
    need = required_copies(f)
    if copies < need:
        raise TruncationTooShallow(f"{copies} copies given, {need} needed")
    if not isinstance(w, Copy):
        w = bm.point(w)
    if isinstance(w, Copy) and w.index >= copies:
        raise TruncationTooShallow(f"point {w} lies beyond {copies} copies")
    return evaluate(bm.folded(copies), w, f)


def certify_class(bm: BulldozedModel, c: FrameClass, copies: int = 3) -> ClassReport:
    """Class properties of the infinite model: structural checks on the
    presentation plus exhaustive checks on a plain truncation."""
    if copies < 2:
        raise ValueError("need at least two copies")
    checks = []
    trunc = bm.truncate(copies)

    bad = next(((x, y) for x, y in trunc.rel
                if (bm.alpha(x), bm.alpha(y)) not in bm.base.rel), None)
    checks.append(PropertyCheck("edges inherited", bad is None, bad,
                                "every edge projects onto a base edge"))
    bad = next(((x, y) for x, y in trunc.rel
                if isinstance(x, Copy) and isinstance(y, Copy)
                and bm.cluster_of[x.world] is bm.cluster_of[y.world]
                and x.index > y.index), None)
    checks.append(PropertyCheck("copy monotone", bad is None, bad,
                                "no edge runs back to an earlier copy"))
    bad = next(((Copy(w, 0), Copy(v, 0)) for cl in bm.clusters
                for w in cl.members for v in cl.members
                if w != v and bm.related(Copy(w, 0), Copy(v, 0))
                == bm.related(Copy(v, 0), Copy(w, 0))), None)
    checks.append(PropertyCheck("cluster order total", bad is None, bad,
                                "exactly one direction between distinct members"))

    report = relation_class_check(trunc, c)
    for chk in report.checks:
        if chk.name == "serial":
            continue
        checks.append(chk)
    if c is FrameClass.USPO:
        # Copies always advance to the next copy; worlds left alone need a
        # successor in the base model.
        dead = next((w for w in bm.w_minus
                     if not any((w, v) in bm.base.rel for v in bm.base.worlds)), None)
        checks.append(PropertyCheck("serial", dead is None,
                                    None if dead is None else (dead,),
                                    "(w,n) R (w,n+1) covers every copy"))
    return ClassReport(c, tuple(checks))


# --------------------------------------------------------------------------
# Certificates


def _pt(x):
    return [x.world, x.index] if isinstance(x, Copy) else x


def certificate(em: ExtractedModel, bm: BulldozedModel, formula: Optional[Formula] = None,
                world=None, truncate: Optional[int] = None, unicode: bool = False) -> dict:
    from .syntax import to_text
    doc = {
        "variant": bm.variant,
        "base": model_to_dict(em.model),
        "root": em.root,
        "w_minus": list(bm.w_minus),
        "clusters": [{"index": c.index, "members": list(c.members)}
                     for c in bm.clusters],
        "urfather_map": dict(em.urfather_map),
        "r_e": sorted([list(e) for e in em.r_e],
                      key=lambda e: (em.worlds.index(e[0]), em.worlds.index(e[1]))),
        "closure": em.closure,
    }
    if formula is not None:
        doc["formula"] = to_text(formula, unicode)
    if world is not None:
        doc["world"] = _pt(bm.point(world))
    if truncate is not None:
        doc["truncation"] = {"copies": truncate,
                             "model": model_to_dict(bm.truncate(truncate))}
    return doc


def dump_certificate(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def bulldozed_from_certificate(doc: dict) -> BulldozedModel:
    from .semantics import model_from_dict
    base = model_from_dict(doc["base"])
    clusters = tuple(Cluster(c["index"], tuple(c["members"])) for c in doc["clusters"])
    return BulldozedModel(base, tuple(doc["w_minus"]), clusters, doc["variant"])


def truncation_dot(m: KripkeModel, name: str = "model") -> str:
    lines = [f"digraph {name} {{"]
    ids = {w: f"w{k}" for k, w in enumerate(m.worlds)}
    for w in m.worlds:
        true = sorted(p for p, ext in m.props.items() if w in ext)
        named = sorted(i for i, v in m.noms.items() if v == w)
        label = str(w)
        if named or true:
            label += "\\n" + " ".join(named + true)
        lines.append(f'  {ids[w]} [label="{label}"];')
    order = {w: k for k, w in enumerate(m.worlds)}
    for a, b in sorted(m.rel, key=lambda e: (order[e[0]], order[e[1]])):
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# A countermodel search for serial strict partial orders.  Those have no
# finite models, so instead of enumerating them we enumerate small finite
# serial transitive frames and bulldoze each; every result is a genuine
# infinite model of the class, evaluated exactly on its folded truncation.


def _serial_transitive_frames(n: int) -> list[frozenset]:
    pairs = [(a, b) for a in range(n) for b in range(n)]
    seen = {}
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = frozenset(p for p, bit in zip(pairs, bits) if bit)
        if any(not any((a, b) in rel for b in range(n)) for a in range(n)):
            continue
        if transitive_closure(range(n), rel) != rel:
            continue
        key = min(tuple(sorted((p[a], p[b]) for a, b in rel))
                  for p in itertools.permutations(range(n)))
        seen.setdefault(key, rel)
    return list(seen.values())


def uspo_countermodel(f: Formula, max_worlds: int = 3):
    """``(bulldozed model, point)`` falsifying ``f``, or None."""
    if max_worlds > 3:
        raise ValueError("at most 3 base worlds")
    ps, ns = props(f), nominals(f)
    for n in range(1, max_worlds + 1):
        for rel in _serial_transitive_frames(n):
            frame = bulldoze(KripkeModel(tuple(range(n)), rel))
            folded = frame.folded(2)
            pts = folded.worlds
            pos = {x: k for k, x in enumerate(pts)}
            succ = [0] * len(pts)
            for a, b in folded.rel:
                succ[pos[a]] |= 1 << pos[b]
            lift = [sum(1 << pos[x] for x in pts if frame.alpha(x) == w)
                    for w in range(n)]
            full = (1 << len(pts)) - 1
            for nom_choice in itertools.product(range(n), repeat=len(ns)):
                nom_masks = {i: 1 << pos[frame.point(w)]
                             for i, w in zip(ns, nom_choice)}
                for prop_choice in itertools.product(range(2 ** n), repeat=len(ps)):
                    prop_masks = {p: sum(lift[w] for w in range(n) if mask >> w & 1)
                                  for p, mask in zip(ps, prop_choice)}
                    true_at = _compile(f, len(pts), succ, nom_masks, prop_masks)
                    if true_at != full:
                        base = KripkeModel(
                            tuple(range(n)), rel,
                            {p: {w for w in range(n) if mask >> w & 1}
                             for p, mask in zip(ps, prop_choice)},
                            dict(zip(ns, nom_choice)))
                        bm = BulldozedModel(base, frame.w_minus, frame.clusters)
                        x = next(x for x in pts if not true_at >> pos[x] & 1)
                        return bm, x
    return None
