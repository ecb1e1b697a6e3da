"""Walk homotopy and truncated universal covers.

Two walks are homotopic when one can be turned into the other by inserting
or deleting a cancelling pair ``a,-a`` and by swapping two paths of a
minimal relation inside any context (also in inverted form).
:class:`HomotopyEngine` explores this move graph with a length bound.

The cover is grown by BFS from the trivial walk at the base.  Two walks with
the same end are identified through the fundamental group: when the
simplified presentation is free, free reduction of the image word decides
equality exactly; otherwise the bounded engine is asked and an undecided
answer aborts the build.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError, Refusal
from .pi1 import SimplifiedGroup, WalkWords, fundamental_group, pi1_presentation, simplify
from .quiver import (
    FORWARD,
    Path,
    Quiver,
    QuiverMorphism,
    Step,
    Walk,
    is_quiver_covering,
)
from .relations import IdealPresentation, Relation

YES = "yes"
NO = "no"
UNDECIDED = "undecided"

CLASS_CAP = 10_000

State = Tuple[str, Tuple[Step, ...]]


def _inv_steps(steps: Sequence[Step]) -> Tuple[Step, ...]:
    return tuple((a, -s) for a, s in reversed(steps))


class HomotopyEngine:
    """Bounded search in the move graph of walks.

    The length bound for a query is ``max(len(w1), len(w2)) + slack``.  By
    default the slack is ``2 * (l - 1 + d)`` where ``l`` is the longest path
    and ``d`` the largest length difference inside one minimal relation:
    room to insert the missing part of a relation path before swapping it.
    """

    def __init__(self, q: Quiver, ideal: IdealPresentation, slack: Optional[int] = None, class_cap: int = CLASS_CAP):
        self.quiver = q
        self.ideal = ideal
        self.class_cap = class_cap
        swaps: List[Tuple[Tuple[Step, ...], Tuple[Step, ...]]] = []
        gap = overhang = 0
        for rho in ideal.minimal_relations():
            paths = [tuple((a, FORWARD) for a in p.arrows) for p in rho.paths]
            lens = [len(p) for p in paths]
            gap = max(gap, max(lens) - min(lens))
            overhang = max(overhang, max(lens) - 1)
            for i, pi in enumerate(paths):
                for j, pj in enumerate(paths):
                    if i != j:
                        swaps.append((pi, pj))
                        swaps.append((_inv_steps(pi), _inv_steps(pj)))
        self.swaps = swaps
        self._swaps_from: Dict[Step, List[Tuple[Tuple[Step, ...], Tuple[Step, ...]]]] = {}
        for old, new in swaps:
            self._swaps_from.setdefault(old[0], []).append((old, new))
        self.slack = 2 * (overhang + gap) if slack is None else slack
        self._pairs_at = {v: [(s, (s[0], -s[1])) for s, _ in q.steps_from(v)] for v in q.vertices}
        self._end_of = {}
        for v in q.vertices:
            for s, w in q.steps_from(v):
                self._end_of[s] = w
        # (bound, state) -> component id, only for fully explored components
        self._component: Dict[Tuple[int, State], int] = {}
        self._members: List[FrozenSet[State]] = []

    # move graph ---------------------------------------------------------------

    def _vertices(self, start: str, steps: Tuple[Step, ...]) -> List[str]:
        out = [start]
        for s in steps:
            out.append(self._end_of[s])
        return out

    def neighbours(self, state: State, bound: int) -> Iterable[State]:
        start, steps = state
        n = len(steps)
        for i in range(n - 1):
            a, b = steps[i], steps[i + 1]
            if a[0] == b[0] and a[1] == -b[1]:
                yield (start, steps[:i] + steps[i + 2 :])
        if n + 2 <= bound:
            verts = self._vertices(start, steps)
            pairs_at = self._pairs_at
            for k in range(n + 1):
                head, tail = steps[:k], steps[k:]
                for pair in pairs_at[verts[k]]:
                    yield (start, head + pair + tail)
        swaps_from = self._swaps_from
        for k in range(n):
            for old, new in swaps_from.get(steps[k], ()):
                m = len(old)
                if steps[k : k + m] == old and n - m + len(new) <= bound:
                    yield (start, steps[:k] + new + steps[k + m :])

    # queries --------------------------------------------------------------------

    @staticmethod
    def _state(w: Walk) -> State:
        return (w.start, tuple(w.steps))

    def bound_for(self, *walks: Walk) -> int:
        return max(len(w) for w in walks) + self.slack

    def closure(self, w: Walk, bound: Optional[int] = None) -> Tuple[FrozenSet[State], bool]:
        """Component of ``w`` in the bounded move graph and whether it is complete."""
        bound = self.bound_for(w) if bound is None else bound
        st = self._state(w)
        cid = self._component.get((bound, st))
        if cid is not None:
            return self._members[cid], True
        seen = {st}
        queue = deque([st])
        while queue:
            cur = queue.popleft()
            for nb in self.neighbours(cur, bound):
                if nb not in seen:
                    seen.add(nb)
                    if len(seen) > self.class_cap:
                        return frozenset(seen), False
                    queue.append(nb)
        members = frozenset(seen)
        self._remember(bound, members)
        return members, True

    def _remember(self, bound: int, members: FrozenSet[State]) -> None:
        cid = len(self._members)
        self._members.append(members)
        for m in members:
            self._component[(bound, m)] = cid

    def walks_equivalent(self, w1: Walk, w2: Walk) -> str:
        if w1.start != w2.start or w1.end != w2.end:
            return NO
        n1, n2 = len(w1.steps), len(w2.steps)
        bound = (n1 if n1 > n2 else n2) + self.slack
        s1, s2 = (w1.start, w1.steps), (w2.start, w2.steps)
        if s1 == s2:
            return YES
        comp = self._component
        c1 = comp.get((bound, s1))
        c2 = comp.get((bound, s2))
        if c1 is not None or c2 is not None:
            return YES if c1 == c2 else NO
        # a complete closure answers every later query on the same component
        members, complete = self.closure(w1, bound)
        if s2 in members:
            return YES
        if complete:
            return NO
        return self._bidirectional(s1, s2, bound)

    def _bidirectional(self, s1: State, s2: State, bound: int) -> str:
        seen = [{s1}, {s2}]
        frontier = [deque([s1]), deque([s2])]
        while frontier[0] and frontier[1]:
            side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
            other = seen[1 - side]
            layer = frontier[side]
            nxt: deque = deque()
            while layer:
                cur = layer.popleft()
                for nb in self.neighbours(cur, bound):
                    if nb in other:
                        return YES
                    if nb not in seen[side]:
                        seen[side].add(nb)
                        nxt.append(nb)
            frontier[side] = nxt
            if len(seen[0]) + len(seen[1]) > 2 * self.class_cap:
                return UNDECIDED
        # one side ran dry without meeting the other: its component is complete
        done = 0 if not frontier[0] else 1
        self._remember(bound, frozenset(seen[done]))
        return NO


# truncated cover ---------------------------------------------------------------


def class_id(q: Quiver, w: Walk) -> str:
    return f"[{w}]" if w.steps else f"[e_{w.start}]"


@dataclass
class TruncatedCover:
    base_quiver: Quiver
    base_ideal: IdealPresentation
    base: str
    radius: int
    cover: Quiver
    projection: QuiverMorphism
    base_class: str
    frontier: FrozenSet[str]
    cover_ideal: IdealPresentation
    representatives: Dict[str, Walk]
    distance: Dict[str, int]
    group: SimplifiedGroup
    _classifier: "_Classifier" = field(repr=False, default=None)

    @property
    def interior(self) -> List[str]:
        return [v for v in self.cover.vertices if v not in self.frontier]

    def class_of(self, w: Walk) -> Optional[str]:
        """Cover vertex of the class of a walk from the base, if inside the truncation."""
        return self._classifier.lookup(w)

    def to_json(self) -> dict:
        out = self.cover.to_json()
        out.update(
            {
                "projection": self.projection.to_json(),
                "frontier": sorted(self.frontier),
                "base_class": self.base_class,
                "radius": self.radius,
                "relations": self.cover_ideal.to_json()["relations"],
                "truncation_length": self.cover_ideal.truncation_length,
            }
        )
        if self.cover_ideal.nilpotency_bound is not None:
            out["nilpotency_bound"] = self.cover_ideal.nilpotency_bound
        return out

    def to_dot(self) -> str:
        return self.cover.to_dot("cover", labels=self.projection.arrow_map)

    def verify(self) -> dict:
        """Covering checks restricted to the interior."""
        from .covering import BoundQuiverMorphism, is_relation_covering

        quiver_ok = is_quiver_covering(self.projection, self.interior)
        rel = is_relation_covering(
            BoundQuiverMorphism(self.projection, self.cover_ideal, self.base_ideal), vertices=self.interior
        )
        return {"quiver_covering": quiver_ok.ok, "relation_covering": rel.ok, "violations": rel.failures}


class _Classifier:
    """Decides which known cover vertex (if any) a walk from the base reaches."""

    def __init__(self, q: Quiver, ideal: IdealPresentation, base: str, group: SimplifiedGroup, engine: HomotopyEngine):
        self.quiver = q
        self.words = WalkWords(q, base)
        self.group = group
        self.engine = engine
        self.by_key: Dict[Tuple[str, tuple], str] = {}
        self.by_end: Dict[str, List[Tuple[Walk, str]]] = {}

    def key(self, w: Walk):
        nf = self.group.normal_form(self.words.word(w))
        return None if nf is None else (w.end, nf)

    def lookup(self, w: Walk) -> Optional[str]:
        w = w.reduced()
        k = self.key(w)
        if k is not None:
            return self.by_key.get(k)
        candidates = self.by_end.get(w.end, [])
        if not candidates:
            return None
        bound = self.engine.bound_for(w, *(r for r, _ in candidates))
        members, complete = self.engine.closure(w, bound)
        for rep, vid in candidates:
            if (rep.start, tuple(rep.steps)) in members:
                return vid
        if not complete:
            raise Refusal(f"cannot decide the class of walk {w or 'e_' + w.start!s} within the closure cap")
        return None

    def add(self, w: Walk, vid: str) -> None:
        k = self.key(w)
        if k is not None:
            self.by_key[k] = vid
        self.by_end.setdefault(w.end, []).append((w, vid))


def build_universal_cover(
    q: Quiver,
    ideal: IdealPresentation,
    base: Optional[str] = None,
    radius: int = 3,
    engine: Optional[HomotopyEngine] = None,
) -> TruncatedCover:
    if radius < 0:
        raise InputError("radius must be nonnegative")
    base = q.vertices[0] if base is None else base
    if not q.has_vertex(base):
        raise InputError(f"unknown base vertex {base!r}")
    if not q.is_connected():
        raise InputError("quiver is not connected")
    group = fundamental_group(q, ideal, base)
    engine = engine or HomotopyEngine(q, ideal)
    cls = _Classifier(q, ideal, base, group, engine)

    start = Walk(base, base, ())
    base_id = class_id(q, start)
    reps: Dict[str, Walk] = {base_id: start}
    dist: Dict[str, int] = {base_id: 0}
    cls.add(start, base_id)
    order = [base_id]
    layer = [base_id]
    for d in range(1, radius + 1):
        nxt = []
        for vid in layer:
            u = reps[vid]
            for step, _ in q.steps_from(u.end):
                w = Walk(u.start, _end(q, u.end, step), u.steps + (step,)).reduced()
                if cls.lookup(w) is not None:
                    continue
                wid = class_id(q, w)
                reps[wid] = w
                dist[wid] = d
                cls.add(w, wid)
                nxt.append(wid)
                order.append(wid)
        layer = nxt
    frontier = frozenset(v for v, d in dist.items() if d == radius)

    arrows = []
    vmap = {}
    amap = {}
    for vid in order:
        u = reps[vid]
        vmap[vid] = u.end
        for a in q.out_arrows(u.end):
            w = Walk(u.start, q.target(a), u.steps + ((a, FORWARD),)).reduced()
            tid = cls.lookup(w)
            if tid is None:
                if vid not in frontier:
                    raise AssertionError("interior vertex with a missing neighbour")
                continue
            aid = f"({vid},{a})"
            arrows.append((aid, vid, tid))
            amap[aid] = a
    cover = Quiver(order, arrows)
    projection = QuiverMorphism(cover, q, vmap, amap)
    interior = [v for v in order if v not in frontier]
    rep = is_quiver_covering(projection, interior)
    if not rep.ok:
        raise AssertionError(f"projection fails the covering test at {rep.violations}")
    cover_ideal = _lift_ideal(cover, projection, ideal)
    out = TruncatedCover(
        q, ideal, base, radius, cover, projection, base_id, frontier, cover_ideal, reps, dist, group, cls
    )
    return out


def _end(q: Quiver, v: str, step: Step) -> str:
    a = q.arrow(step[0])
    return a.target if step[1] == FORWARD else a.source


def _lift_ideal(cover: Quiver, projection: QuiverMorphism, ideal: IdealPresentation) -> IdealPresentation:
    gens: List[Relation] = []
    for kind, rho in ideal.minimal_generators():
        for x in projection.fibre(rho.source):
            lifted = []
            for c, p in rho.terms:
                lp = _lift_in(cover, projection, p, x)
                if lp is None:
                    break
                lifted.append((c, lp))
            else:
                if len({lp.end for _, lp in lifted}) != 1:
                    raise AssertionError(f"lift of {rho} at {x} is not parallel")
                gens.append(Relation.from_terms(lifted))
    return IdealPresentation(cover, gens, ideal.nilpotency_bound, ideal.truncation_length)


def _lift_in(cover: Quiver, projection: QuiverMorphism, p: Path, x: str) -> Optional[Path]:
    cur = x
    arrows = []
    for a in p.arrows:
        hits = projection.star_lifts(cur, a, FORWARD)
        if not hits:
            return None
        arrows.append(hits[0])
        cur = cover.target(hits[0])
    return Path(x, cur, tuple(arrows))


# deck transformations --------------------------------------------------------------


@dataclass
class PartialAutomorphism:
    """Vertex and arrow maps of a cover element, defined on an explicit domain."""

    vertex_map: Dict[str, str]
    arrow_map: Dict[str, str]
    word: str

    @property
    def domain(self) -> List[str]:
        return sorted(self.vertex_map)

    def fixed_points(self) -> List[str]:
        return [v for v, w in self.vertex_map.items() if v == w]

    def to_json(self) -> dict:
        return {"vertex_map": dict(sorted(self.vertex_map.items())), "arrow_map": dict(sorted(self.arrow_map.items()))}


def deck_action(cov: TruncatedCover, v: Walk) -> PartialAutomorphism:
    """Action of the class of the closed walk ``v`` at the base: ``[u] -> [v^-1 u]``."""
    if v.start != cov.base or v.end != cov.base:
        raise InputError("deck element must be a closed walk at the base")
    vinv = v.inverse()
    vm: Dict[str, str] = {}
    for vid, u in cov.representatives.items():
        img = cov.class_of(vinv.then(u))
        if img is not None:
            vm[vid] = img
    am: Dict[str, str] = {}
    for a in cov.cover.arrows:
        if a.source in vm and a.target in vm:
            base_arrow = cov.projection.arrow_map[a.id]
            hits = [
                b
                for b in cov.cover.out_arrows(vm[a.source])
                if cov.projection.arrow_map[b] == base_arrow and cov.cover.target(b) == vm[a.target]
            ]
            if hits:
                am[a.id] = hits[0]
    return PartialAutomorphism(vm, am, str(v))


def check_trivial_pi1_of_cover(cov: TruncatedCover) -> dict:
    group = simplify(pi1_presentation(cov.cover, cov.cover_ideal, cov.base_class))
    tree_like = len(cov.cover.arrows) == len(cov.cover.vertices) - 1
    return {
        "verdict": group.verdict,
        "tree": tree_like,
        "within_radius": cov.radius,
        "caveat": "truncated cover: triviality is certified only within the radius",
        "group": group.to_json(),
    }
