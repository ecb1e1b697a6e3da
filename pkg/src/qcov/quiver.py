"""Quivers, paths, walks and quiver morphisms.

Ids are opaque strings and every deterministic ordering is lexicographic on
them.  Paths and walks list their steps in traversal order (first step
first); the right-to-left composite notation is only produced by
:meth:`Path.composite`, for reports.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InputError, LiftError

FORWARD = 1
INVERSE = -1

Step = Tuple[str, int]


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


class Quiver:
    """Finite directed multigraph; loops and parallel arrows allowed."""

    def __init__(self, vertices: Iterable[str], arrows: Iterable[Tuple[str, str, str]] = ()):
        verts = [str(v) for v in vertices]
        if len(set(verts)) != len(verts):
            raise InputError("duplicate vertex id")
        self.vertices: Tuple[str, ...] = tuple(sorted(verts))
        vset = set(verts)
        table: Dict[str, Arrow] = {}
        for item in arrows:
            a = item if isinstance(item, Arrow) else Arrow(*map(str, item))
            if a.id in table:
                raise InputError(f"duplicate arrow id {a.id!r}")
            for end in (a.source, a.target):
                if end not in vset:
                    raise InputError(f"arrow {a.id!r} uses undeclared vertex {end!r}")
            table[a.id] = a
        self._arrows = dict(sorted(table.items()))
        out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        inc: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for a in self._arrows.values():
            out[a.source].append(a.id)
            inc[a.target].append(a.id)
        self._out = {v: tuple(ids) for v, ids in out.items()}
        self._in = {v: tuple(ids) for v, ids in inc.items()}

    # basic accessors -----------------------------------------------------

    @property
    def arrows(self) -> Tuple[Arrow, ...]:
        return tuple(self._arrows.values())

    @property
    def arrow_ids(self) -> Tuple[str, ...]:
        return tuple(self._arrows)

    def arrow(self, aid: str) -> Arrow:
        try:
            return self._arrows[aid]
        except KeyError:
            raise InputError(f"unknown arrow {aid!r}") from None

    def has_arrow(self, aid: str) -> bool:
        return aid in self._arrows

    def has_vertex(self, v: str) -> bool:
        return v in self._out

    def source(self, aid: str) -> str:
        return self.arrow(aid).source

    def target(self, aid: str) -> str:
        return self.arrow(aid).target

    def out_arrows(self, v: str) -> Tuple[str, ...]:
        return self._out[v]

    def in_arrows(self, v: str) -> Tuple[str, ...]:
        return self._in[v]

    def steps_from(self, v: str) -> List[Tuple[Step, str]]:
        """All walk steps leaving ``v`` with their end vertex, in step order."""
        steps = [((a, FORWARD), self.target(a)) for a in self._out[v]]
        steps += [((a, INVERSE), self.source(a)) for a in self._in[v]]
        return sorted(steps, key=lambda s: step_key(s[0]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Quiver)
            and self.vertices == other.vertices
            and self.arrows == other.arrows
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.arrows))

    def __repr__(self) -> str:
        return f"Quiver({len(self.vertices)} vertices, {len(self._arrows)} arrows)"

    # graph structure -------------------------------------------------------

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        todo = [self.vertices[0]]
        while todo:
            v = todo.pop()
            for _, w in self.steps_from(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def has_oriented_cycle(self) -> bool:
        indeg = {v: len(self._in[v]) for v in self.vertices}
        queue = [v for v in self.vertices if indeg[v] == 0]
        removed = 0
        while queue:
            v = queue.pop()
            removed += 1
            for a in self._out[v]:
                t = self.target(a)
                indeg[t] -= 1
                if indeg[t] == 0:
                    queue.append(t)
        return removed < len(self.vertices)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [(a.id, a.target, a.source) for a in self.arrows])

    def full_subquiver(self, vertices: Iterable[str]) -> "Quiver":
        keep = set(vertices)
        return Quiver(
            keep, [(a.id, a.source, a.target) for a in self.arrows if a.source in keep and a.target in keep]
        )

    # paths -------------------------------------------------------------------

    def trivial_path(self, v: str) -> "Path":
        if v not in self._out:
            raise InputError(f"unknown vertex {v!r}")
        return Path(v, v, ())

    def path(self, arrows: Sequence[str], start: Optional[str] = None) -> "Path":
        arrows = tuple(arrows)
        if not arrows:
            if start is None:
                raise InputError("a trivial path needs its vertex")
            return self.trivial_path(start)
        cur = self.source(arrows[0])
        if start is not None and start != cur:
            raise InputError(f"path starts at {cur!r}, not {start!r}")
        first = cur
        for a in arrows:
            if self.source(a) != cur:
                raise InputError(f"arrows not composable at {a!r}")
            cur = self.target(a)
        return Path(first, cur, arrows)

    def paths_from(self, v: str, max_len: int) -> List["Path"]:
        """All paths starting at ``v`` of length at most ``max_len`` (BFS order)."""
        out = [Path(v, v, ())]
        frontier = out[:]
        for _ in range(max_len):
            nxt = []
            for p in frontier:
                for a in self._out[p.end]:
                    nxt.append(Path(p.start, self.target(a), p.arrows + (a,)))
            out.extend(nxt)
            frontier = nxt
        return out

    def paths_between(self, x: str, y: str, max_len: int) -> List["Path"]:
        return [p for p in self.paths_from(x, max_len) if p.end == y]

    # walks -------------------------------------------------------------------

    def walk(self, steps: Sequence[Step], start: Optional[str] = None) -> "Walk":
        steps = tuple((str(a), int(s)) for a, s in steps)
        if not steps:
            if start is None:
                raise InputError("a trivial walk needs its vertex")
            if start not in self._out:
                raise InputError(f"unknown vertex {start!r}")
            return Walk(start, start, ())
        cur = _step_start(self, steps[0])
        if start is not None and start != cur:
            raise InputError(f"walk starts at {cur!r}, not {start!r}")
        first = cur
        for st in steps:
            if st[1] not in (FORWARD, INVERSE):
                raise InputError(f"bad orientation in step {st!r}")
            if _step_start(self, st) != cur:
                raise InputError(f"walk not composable at step {format_step(st)!r}")
            cur = _step_end(self, st)
        return Walk(first, cur, steps)

    def parse_walk(self, text: str, start: Optional[str] = None) -> "Walk":
        """Parse ``"a,-b"`` (first step first, ``-`` marks an inverse step)."""
        text = text.strip()
        if not text:
            return self.walk((), start)
        steps = []
        for tok in text.split(","):
            tok = tok.strip()
            if tok.startswith("-"):
                steps.append((tok[1:], INVERSE))
            else:
                steps.append((tok.lstrip("+"), FORWARD))
        return self.walk(steps, start)

    # serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"id": a.id, "from": a.source, "to": a.target} for a in self.arrows],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Quiver":
        try:
            verts = data["vertices"]
            arrows = [(a["id"], a["from"], a["to"]) for a in data.get("arrows", [])]
        except (KeyError, TypeError) as exc:
            raise InputError(f"quiver JSON: missing field {exc}") from None
        if not isinstance(verts, list):
            raise InputError("quiver JSON: 'vertices' must be a list")
        return cls(verts, arrows)

    def to_dot(self, name: str = "Q", labels: Optional[Mapping[str, str]] = None) -> str:
        lines = [f"digraph {_dot_id(name)} {{"]
        for v in self.vertices:
            lines.append(f"  {_dot_id(v)};")
        for a in self.arrows:
            lab = labels.get(a.id, a.id) if labels else a.id
            lines.append(f"  {_dot_id(a.source)} -> {_dot_id(a.target)} [label={_dot_id(lab)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def step_key(step: Step) -> Tuple[str, int]:
    # forward before inverse for the same arrow
    return (step[0], 0 if step[1] == FORWARD else 1)


def format_step(step: Step) -> str:
    return step[0] if step[1] == FORWARD else "-" + step[0]


def _step_start(q: Quiver, step: Step) -> str:
    a = q.arrow(step[0])
    return a.source if step[1] == FORWARD else a.target


def _step_end(q: Quiver, step: Step) -> str:
    a = q.arrow(step[0])
    return a.target if step[1] == FORWARD else a.source


@dataclass(frozen=True)
class Path:
    start: str
    end: str
    arrows: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.arrows)

    def then(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise InputError("paths not composable")
        return Path(self.start, other.end, self.arrows + other.arrows)

    def as_walk(self) -> "Walk":
        return Walk(self.start, self.end, tuple((a, FORWARD) for a in self.arrows))

    def key(self) -> Tuple[int, Tuple[str, ...], str]:
        return (len(self.arrows), self.arrows, self.start)

    def composite(self) -> str:
        """Right-to-left composite notation used in reports (``e_x`` if trivial)."""
        return "".join(reversed(self.arrows)) if self.arrows else f"e_{self.start}"

    def __str__(self) -> str:
        return ",".join(self.arrows) if self.arrows else f"e_{self.start}"


@dataclass(frozen=True)
class Walk:
    start: str
    end: str
    steps: Tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def inverse(self) -> "Walk":
        return Walk(self.end, self.start, tuple((a, -s) for a, s in reversed(self.steps)))

    def then(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise InputError("walks not composable")
        return Walk(self.start, other.end, self.steps + other.steps)

    def is_reduced(self) -> bool:
        return all(
            not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(self.steps, self.steps[1:])
        )

    def reduced(self) -> "Walk":
        """Free reduction: cancel adjacent ``a,-a`` / ``-a,a`` pairs."""
        stack: List[Step] = []
        for st in self.steps:
            if stack and stack[-1][0] == st[0] and stack[-1][1] == -st[1]:
                stack.pop()
            else:
                stack.append(st)
        return Walk(self.start, self.end, tuple(stack))

    def is_path(self) -> bool:
        return all(s == FORWARD for _, s in self.steps)

    def as_path(self) -> Path:
        if not self.is_path():
            raise InputError("walk has inverse steps")
        return Path(self.start, self.end, tuple(a for a, _ in self.steps))

    def key(self) -> Tuple[int, Tuple[Tuple[str, int], ...]]:
        return (len(self.steps), tuple(step_key(s) for s in self.steps))

    def __str__(self) -> str:
        return ",".join(format_step(s) for s in self.steps)


def vertices_of_walk(q: Quiver, w: Walk) -> List[str]:
    out = [w.start]
    for st in w.steps:
        out.append(_step_end(q, st))
    return out


# morphisms ---------------------------------------------------------------------


@dataclass(frozen=True)
class QuiverMorphism:
    source: Quiver
    target: Quiver
    vertex_map: Mapping[str, str]
    arrow_map: Mapping[str, str]

    def __post_init__(self):
        vm = dict(self.vertex_map)
        am = dict(self.arrow_map)
        for v in self.source.vertices:
            if v not in vm:
                raise InputError(f"vertex {v!r} has no image")
            if not self.target.has_vertex(vm[v]):
                raise InputError(f"image {vm[v]!r} of vertex {v!r} is not a target vertex")
        for a in self.source.arrows:
            if a.id not in am:
                raise InputError(f"arrow {a.id!r} has no image")
            img = am[a.id]
            if not self.target.has_arrow(img):
                raise InputError(f"image {img!r} of arrow {a.id!r} is not a target arrow")
            b = self.target.arrow(img)
            if vm[a.source] != b.source or vm[a.target] != b.target:
                raise InputError(f"incidence violated at arrow {a.id!r}")
        extra = (set(vm) - set(self.source.vertices)) | (set(am) - set(self.source.arrow_ids))
        if extra:
            raise InputError(f"map mentions unknown ids {sorted(extra)!r}")
        object.__setattr__(self, "vertex_map", dict(sorted(vm.items())))
        object.__setattr__(self, "arrow_map", dict(sorted(am.items())))

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(self.vertex_map.items()), tuple(self.arrow_map.items())))

    @classmethod
    def identity(cls, q: Quiver) -> "QuiverMorphism":
        return cls(q, q, {v: v for v in q.vertices}, {a: a for a in q.arrow_ids})

    @classmethod
    def from_json(cls, source: Quiver, target: Quiver, data: Mapping) -> "QuiverMorphism":
        try:
            return cls(source, target, dict(data["vertex_map"]), dict(data["arrow_map"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"morphism JSON: missing field {exc}") from None

    def to_json(self) -> dict:
        return {"vertex_map": dict(self.vertex_map), "arrow_map": dict(self.arrow_map)}

    def compose(self, after: "QuiverMorphism") -> "QuiverMorphism":
        """``after ∘ self``."""
        return QuiverMorphism(
            self.source,
            after.target,
            {v: after.vertex_map[w] for v, w in self.vertex_map.items()},
            {a: after.arrow_map[b] for a, b in self.arrow_map.items()},
        )

    def map_path(self, p: Path) -> Path:
        return Path(self.vertex_map[p.start], self.vertex_map[p.end], tuple(self.arrow_map[a] for a in p.arrows))

    def map_walk(self, w: Walk) -> Walk:
        return Walk(
            self.vertex_map[w.start], self.vertex_map[w.end], tuple((self.arrow_map[a], s) for a, s in w.steps)
        )

    def fibre(self, v: str) -> Tuple[str, ...]:
        return self._fibres.get(v, ())

    @cached_property
    def _fibres(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {}
        for x, v in self.vertex_map.items():
            out.setdefault(v, []).append(x)
        return {v: tuple(sorted(xs)) for v, xs in out.items()}

    @cached_property
    def _star_index(self) -> Dict[Tuple[str, str, int], List[str]]:
        # (source vertex, target arrow, direction) -> source arrows
        idx: Dict[Tuple[str, str, int], List[str]] = {}
        for a in self.source.arrows:
            img = self.arrow_map[a.id]
            idx.setdefault((a.source, img, FORWARD), []).append(a.id)
            idx.setdefault((a.target, img, INVERSE), []).append(a.id)
        return idx

    def star_lifts(self, x: str, image_arrow: str, direction: int) -> List[str]:
        return self._star_index.get((x, image_arrow, direction), [])

    def is_surjective(self) -> bool:
        return set(self.vertex_map.values()) == set(self.target.vertices) and set(
            self.arrow_map.values()
        ) == set(self.target.arrow_ids)


@dataclass
class CoveringReport:
    ok: bool
    violations: List[Tuple[str, str]] = field(default_factory=list)
    surjective: Optional[bool] = None

    def __bool__(self) -> bool:
        return self.ok


def is_quiver_covering(f: QuiverMorphism, vertices: Optional[Iterable[str]] = None) -> CoveringReport:
    """Check the arrow-star bijections at every source vertex.

    ``vertices`` restricts the check (used for truncated covers, whose frontier
    stars are incomplete by construction).
    """
    check = f.source.vertices if vertices is None else sorted(vertices)
    bad: List[Tuple[str, str]] = []
    for x in check:
        fx = f.vertex_map[x]
        for direction, name, here, there in (
            ("out", "out", f.source.out_arrows(x), f.target.out_arrows(fx)),
            ("in", "in", f.source.in_arrows(x), f.target.in_arrows(fx)),
        ):
            images = sorted(f.arrow_map[a] for a in here)
            if images != sorted(there):
                bad.append((x, direction))
    return CoveringReport(not bad, bad, f.is_surjective())


def lift_path(f: QuiverMorphism, p: Path, anchor: str, anchor_end: str = "start") -> Path:
    """Unique path ``q`` of the source with ``f(q) = p`` anchored at ``anchor``."""
    w = lift_walk(f, p.as_walk(), anchor, anchor_end)
    return w.as_path()


def lift_walk(f: QuiverMorphism, w: Walk, anchor: str, anchor_end: str = "start") -> Walk:
    if anchor_end not in ("start", "end"):
        raise InputError("anchor_end must be 'start' or 'end'")
    if not f.source.has_vertex(anchor):
        raise InputError(f"unknown anchor {anchor!r}")
    if anchor_end == "end":
        return lift_walk(f, w.inverse(), anchor, "start").inverse()
    if f.vertex_map[anchor] != w.start:
        raise LiftError(f"anchor {anchor!r} maps to {f.vertex_map[anchor]!r}, walk starts at {w.start!r}")
    cur = anchor
    steps: List[Step] = []
    for img, sign in w.steps:
        cands = f.star_lifts(cur, img, sign)
        if len(cands) != 1:
            raise LiftError(
                f"step {format_step((img, sign))!r} has {len(cands)} lifts at {cur!r}"
            )
        a = cands[0]
        steps.append((a, sign))
        cur = f.source.target(a) if sign == FORWARD else f.source.source(a)
    return Walk(anchor, cur, tuple(steps))


# spanning trees ------------------------------------------------------------------


@dataclass(frozen=True)
class SpanningTree:
    base: str
    tree_arrows: Tuple[str, ...]
    non_tree_arrows: Tuple[str, ...]
    parent: Mapping[str, Tuple[str, int, str]]  # vertex -> (arrow, orientation from parent, parent)

    @property
    def free_rank(self) -> int:
        return len(self.non_tree_arrows)

    def walk_to(self, v: str) -> Walk:
        """Tree walk from the base to ``v``."""
        steps: List[Step] = []
        cur = v
        while cur != self.base:
            a, sign, par = self.parent[cur]
            steps.append((a, sign))
            cur = par
        return Walk(self.base, v, tuple(reversed(steps)))


def spanning_tree(q: Quiver, base: str) -> SpanningTree:
    """BFS spanning tree; neighbours are visited in lexicographic arrow order."""
    if not q.has_vertex(base):
        raise InputError(f"unknown base vertex {base!r}")
    parent: Dict[str, Tuple[str, int, str]] = {}
    seen = {base}
    tree: List[str] = []
    queue = deque([base])
    while queue:
        v = queue.popleft()
        incident = sorted(set(q.out_arrows(v)) | set(q.in_arrows(v)))
        for a in incident:
            arr = q.arrow(a)
            if arr.source == arr.target:
                continue
            if arr.source == v:
                w, sign = arr.target, FORWARD
            else:
                w, sign = arr.source, INVERSE
            if w not in seen:
                seen.add(w)
                parent[w] = (a, sign, v)
                tree.append(a)
                queue.append(w)
    if len(seen) != len(q.vertices):
        raise InputError("quiver is not connected")
    tree_set = set(tree)
    return SpanningTree(
        base,
        tuple(sorted(tree)),
        tuple(a for a in q.arrow_ids if a not in tree_set),
        parent,
    )
