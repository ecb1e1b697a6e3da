"""Coverings of quivers with relations.

A morphism of bound quivers is a relation covering when it is a covering of
quivers, sends the source ideal into the target ideal, and every minimal or
zero generator of the target lifts to a relation of the source at every
fibre vertex, anchored at either end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import InputError, LiftError
from .quiver import Path, QuiverMorphism, is_quiver_covering, lift_path
from .relations import IdealPresentation, Relation


@dataclass(frozen=True)
class BoundQuiverMorphism:
    f: QuiverMorphism
    source_ideal: IdealPresentation
    target_ideal: IdealPresentation

    def __post_init__(self):
        if self.source_ideal.ambient != self.f.source or self.target_ideal.ambient != self.f.target:
            raise InputError("ideals do not live on the morphism's quivers")

    def image(self, rho: Relation) -> Dict[Path, Fraction]:
        out: Dict[Path, Fraction] = {}
        for c, p in rho.terms:
            img = self.f.map_path(p)
            out[img] = out.get(img, Fraction(0)) + c
        return {p: c for p, c in out.items() if c != 0}


@dataclass
class RelationCoveringReport:
    ok: bool
    quiver_covering: bool
    images_in_ideal: bool
    failures: List[Tuple[str, str, str]] = field(default_factory=list)  # (generator, fibre vertex, side)
    incomplete: List[Tuple[str, str, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "quiver_covering": self.quiver_covering,
            "images_in_ideal": self.images_in_ideal,
            "failures": [list(t) for t in self.failures],
            "incomplete": [list(t) for t in self.incomplete],
        }


def lift_relation(m: BoundQuiverMorphism, rho: Relation, anchor: str, anchor_end: str = "start") -> Relation:
    """Lift every term of ``rho`` at ``anchor``; raise if the lifts are not parallel."""
    terms = []
    for c, p in rho.terms:
        terms.append((c, lift_path(m.f, p, anchor, anchor_end)))
    ends = {(p.start, p.end) for _, p in terms}
    if len(ends) != 1:
        raise LiftError(f"lifts of {rho} at {anchor} are not parallel")
    return Relation.from_terms(terms)


def is_relation_covering(m: BoundQuiverMorphism, vertices: Optional[Iterable[str]] = None) -> RelationCoveringReport:
    """Relation-covering test; ``vertices`` restricts anchors (for truncated covers)."""
    allowed: Optional[Set[str]] = None if vertices is None else set(vertices)
    qc = is_quiver_covering(m.f, allowed)
    if not qc.ok:
        if allowed is None:
            raise InputError(f"underlying map is not a quiver covering: {qc.violations}")
        return RelationCoveringReport(False, False, False, [("", v, d) for v, d in qc.violations])
    images_ok = True
    failures: List[Tuple[str, str, str]] = []
    incomplete: List[Tuple[str, str, str]] = []
    for rho in m.source_ideal.generators:
        if allowed is not None and rho.source not in allowed:
            continue
        if not m.target_ideal.membership(m.image(rho)):
            images_ok = False
            failures.append((str(rho), rho.source, "image"))
    for kind, rho in m.target_ideal.minimal_generators():
        for side, fibre_of in (("start", rho.source), ("end", rho.target)):
            for x in m.f.fibre(fibre_of):
                if allowed is not None and x not in allowed:
                    continue
                try:
                    lifted = lift_relation(m, rho, x, side)
                except LiftError:
                    if allowed is not None:
                        incomplete.append((str(rho), x, side))
                    else:
                        failures.append((str(rho), x, side))
                    continue
                if not m.source_ideal.membership(lifted):
                    failures.append((str(rho), x, side))
    return RelationCoveringReport(images_ok and not failures, True, images_ok, failures, incomplete)


def lift_minimal_relation(m: BoundQuiverMorphism, rho: Relation, anchor: str, anchor_end: str = "start") -> Relation:
    kind = m.target_ideal.classify_relation(rho)
    if kind not in ("minimal", "zero"):
        raise InputError(f"relation is {kind}, not minimal or zero")
    try:
        lifted = lift_relation(m, rho, anchor, anchor_end)
    except LiftError as exc:
        raise LiftError(f"no coherent lift: {exc}; the morphism is not a relation covering") from None
    got = m.source_ideal.classify_relation(lifted)
    if got != kind:
        raise LiftError(f"lift classifies as {got} but the relation is {kind}")
    return lifted


@dataclass
class DimensionTable:
    ok: bool
    rows: List[dict]
    incomplete: List[Tuple[str, str]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows, "incomplete": [list(t) for t in self.incomplete]}


def verify_quotient_covering_dims(
    m: BoundQuiverMorphism,
    window: Optional[Iterable[str]] = None,
    incomplete_stars: Iterable[str] = (),
) -> DimensionTable:
    """Compare fibre sums of source hom dimensions with target hom dimensions.

    ``incomplete_stars`` names source vertices whose arrow stars are cut off
    (frontier of a truncated cover).  A pair is skipped, and listed as
    incomplete, when a path that might carry a nonzero morphism reaches one.
    """
    src, tgt = m.f.source, m.f.target
    window = sorted(src.vertices if window is None else window)
    cut = set(incomplete_stars)
    si, ti = m.source_ideal, m.target_ideal
    rows: List[dict] = []
    bad: List[Tuple[str, str]] = []
    ok = True

    def touches_cut(x: str, reverse: bool) -> bool:
        q = src.opposite() if reverse else src
        return any(p.end in cut for p in q.paths_from(x, max(si.basis_length - 1, 0))) if cut else False

    for x in window:
        fx = m.f.vertex_map[x]
        for b in tgt.vertices:
            if touches_cut(x, False):
                bad.append((x, b))
                continue
            lhs = sum(si.quotient_dim(x, y) for y in m.f.fibre(b))
            rhs = ti.quotient_dim(fx, b)
            rows.append({"anchor": x, "side": "start", "other": b, "fibre_sum": lhs, "base": rhs})
            ok &= lhs == rhs
    for y in window:
        fy = m.f.vertex_map[y]
        for a in tgt.vertices:
            if touches_cut(y, True):
                bad.append((y, a))
                continue
            lhs = sum(si.quotient_dim(x, y) for x in m.f.fibre(a))
            rhs = ti.quotient_dim(a, fy)
            rows.append({"anchor": y, "side": "end", "other": a, "fibre_sum": lhs, "base": rhs})
            ok &= lhs == rhs
    return DimensionTable(bool(ok), rows, bad)
