"""String algebras: strings, bands, their modules, and lines in covers.

A string is a reduced walk none of whose direct or inverse runs is a zero
path.  Bands are cyclic strings all of whose powers stay strings and which
are not proper powers.  Words use the walk syntax ``a,-b`` (first step
first, minus marks an inverse step).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .errors import InputError
from .quiver import FORWARD, Path, Quiver, QuiverMorphism, Step, Walk, lift_walk, step_key, vertices_of_walk
from .relations import IdealPresentation
from .reps import Representation, are_isomorphic, translate


# recognition ---------------------------------------------------------------------


def is_string_presentation(q: Quiver, ideal: IdealPresentation) -> Tuple[bool, dict]:
    """Monomial ideal, at most two arrows in/out per vertex, and (R2)."""
    if not ideal.is_monomial():
        bad = next(str(r) for r in ideal.generators if not r.is_monomial())
        return False, {"reason": "ideal is not generated by paths", "relation": bad}
    for v in q.vertices:
        if len(q.out_arrows(v)) > 2:
            return False, {"reason": "more than two arrows start at a vertex", "vertex": v}
        if len(q.in_arrows(v)) > 2:
            return False, {"reason": "more than two arrows end at a vertex", "vertex": v}
    for a in q.arrows:
        after = [b for b in q.out_arrows(a.target) if not ideal.path_is_zero(Path(a.source, q.target(b), (a.id, b)))]
        if len(after) > 1:
            return False, {"reason": "two relation-free continuations", "arrow": a.id, "continuations": after}
        before = [c for c in q.in_arrows(a.source) if not ideal.path_is_zero(Path(q.source(c), a.target, (c, a.id)))]
        if len(before) > 1:
            return False, {"reason": "two relation-free predecessors", "arrow": a.id, "predecessors": before}
    return True, {}


def _runs(q: Quiver, w: Walk) -> List[Path]:
    """Maximal direct runs of ``w``, inverse runs turned into forward paths."""
    out: List[Path] = []
    verts = vertices_of_walk(q, w)
    i = 0
    n = len(w.steps)
    while i < n:
        sign = w.steps[i][1]
        j = i
        while j < n and w.steps[j][1] == sign:
            j += 1
        arrows = tuple(a for a, _ in w.steps[i:j])
        if sign == FORWARD:
            out.append(Path(verts[i], verts[j], arrows))
        else:
            out.append(Path(verts[j], verts[i], tuple(reversed(arrows))))
        i = j
    return out


def is_string(q: Quiver, ideal: IdealPresentation, w: Walk) -> bool:
    if not w.is_reduced():
        return False
    # for monomial ideals a path is zero as soon as a subpath is
    return not any(ideal.path_is_zero(p) for p in _runs(q, w))


def canonical_string(w: Walk) -> Walk:
    if not w.steps:
        return w
    inv = w.inverse()
    return min(w, inv, key=Walk.key)


def _require_string_algebra(q: Quiver, ideal: IdealPresentation) -> None:
    ok, why = is_string_presentation(q, ideal)
    if not ok:
        raise InputError(f"not a string algebra presentation: {why['reason']}")


def _reduced_walks(q: Quiver, max_len: int) -> List[Walk]:
    out: List[Walk] = []
    layer = [Walk(v, v, ()) for v in q.vertices]
    out += layer
    for _ in range(max_len):
        nxt = []
        for u in layer:
            for st, e in q.steps_from(u.end):
                if u.steps and u.steps[-1] == (st[0], -st[1]):
                    continue
                nxt.append(Walk(u.start, e, u.steps + (st,)))
        out += nxt
        layer = nxt
    return out


def enumerate_strings(q: Quiver, ideal: IdealPresentation, max_len: int) -> List[Walk]:
    """All strings of length at most ``max_len``, one per inverse pair."""
    _require_string_algebra(q, ideal)
    found = {}
    for w in _reduced_walks(q, max_len):
        if is_string(q, ideal, w):
            c = canonical_string(w)
            found[(c.start, c.steps)] = c
    return sorted(found.values(), key=lambda w: (len(w), w.key(), w.start))


# bands ------------------------------------------------------------------------------


def _rotate(q: Quiver, w: Walk, k: int) -> Walk:
    steps = w.steps[k:] + w.steps[:k]
    start = vertices_of_walk(q, w)[k]
    return Walk(start, start, steps)


def _is_power(steps: Tuple[Step, ...]) -> bool:
    n = len(steps)
    return any(n % d == 0 and steps == steps[:d] * (n // d) for d in range(1, n))


def _longest_generator(ideal: IdealPresentation) -> int:
    return max((r.max_len for r in ideal.generators), default=0)


def is_band(q: Quiver, ideal: IdealPresentation, w: Walk) -> bool:
    if not w.steps or w.start != w.end:
        return False
    first, last = w.steps[0], w.steps[-1]
    if first[0] == last[0] and first[1] == -last[1]:
        return False
    if _is_power(w.steps):
        return False
    # every zero path has a zero subpath of generator length, so enough
    # repetitions of the cycle cover every window of the periodic word
    n = len(w.steps)
    reps = 2 + (_longest_generator(ideal) + n - 1) // n
    if ideal.nilpotency_bound is not None:
        reps = max(reps, 2 + (ideal.nilpotency_bound + n - 1) // n)
    power = Walk(w.start, w.end, w.steps * reps)
    return is_string(q, ideal, power)


def canonical_band(q: Quiver, w: Walk) -> Walk:
    cands = []
    for base in (w, w.inverse()):
        for k in range(len(base.steps)):
            cands.append(_rotate(q, base, k))
    return min(cands, key=lambda c: (c.key(), c.start))


def enumerate_bands(q: Quiver, ideal: IdealPresentation, max_len: int) -> List[Walk]:
    _require_string_algebra(q, ideal)
    found = {}
    for w in _reduced_walks(q, max_len):
        if w.steps and w.start == w.end and is_band(q, ideal, w):
            c = canonical_band(q, w)
            found[(c.start, c.steps)] = c
    return sorted(found.values(), key=lambda w: (len(w), w.key(), w.start))


# modules ----------------------------------------------------------------------------


def _positions(q: Quiver, verts: Sequence[str]) -> Tuple[Dict[str, int], List[int]]:
    """Multiplicity per vertex and the index of each position inside its vertex."""
    count: Dict[str, int] = {}
    index = []
    for v in verts:
        index.append(count.get(v, 0))
        count[v] = count.get(v, 0) + 1
    return count, index


def _blank(q: Quiver, dims: Dict[str, int]) -> Dict[str, List[List[Fraction]]]:
    return {
        a.id: [[Fraction(0)] * dims.get(a.target, 0) for _ in range(dims.get(a.source, 0))] for a in q.arrows
    }


def string_module(q: Quiver, w: Walk, ideal: Optional[IdealPresentation] = None) -> Representation:
    """One basis vector per position of ``w``; each step maps one to the next."""
    verts = vertices_of_walk(q, w)
    dims, index = _positions(q, verts)
    mats = _blank(q, dims)
    for i, (a, sign) in enumerate(w.steps):
        # the arrow's matrix goes from its target copy to its source copy
        src, tgt = (i, i + 1) if sign == FORWARD else (i + 1, i)
        mats[a][index[src]][index[tgt]] = Fraction(1)
    return Representation(q, dims, mats, ideal)


def jordan_block(n: int, lam: Fraction) -> List[List[Fraction]]:
    """``J_n(lam)``: ``lam`` on the diagonal and ones just below it."""
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = lam
        if i:
            out[i][i - 1] = Fraction(1)
    return out


def twisted_position(w: Walk) -> int:
    """Position of the least forward step, where the Jordan block goes."""
    forward = [(step_key(s), i) for i, s in enumerate(w.steps) if s[1] == FORWARD]
    if forward:
        return min(forward)[1]
    return min((step_key(s), i) for i, s in enumerate(w.steps))[1]


def band_module(
    q: Quiver, b: Walk, n: int, lam, ideal: Optional[IdealPresentation] = None, canonical: bool = True
) -> Representation:
    lam = la.frac(lam)
    if lam == 0:
        raise InputError("band parameter must be nonzero")
    if n < 1:
        raise InputError("band multiplicity must be positive")
    if not b.steps or b.start != b.end:
        raise InputError("a band is a nontrivial closed walk")
    if canonical:
        b = canonical_band(q, b)
    m = len(b.steps)
    verts = vertices_of_walk(q, b)[:m]
    mult, index = _positions(q, verts)
    dims = {v: n * k for v, k in mult.items()}
    mats = _blank(q, dims)
    twist = twisted_position(b)
    J = jordan_block(n, lam)
    for i, (a, sign) in enumerate(b.steps):
        j = (i + 1) % m
        src, tgt = (i, j) if sign == FORWARD else (j, i)
        block = J if i == twist else [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        r0, c0 = n * index[src], n * index[tgt]
        for r in range(n):
            for c in range(n):
                mats[a][r0 + r][c0 + c] = block[r][c]
    return Representation(q, dims, mats, ideal)


# lines ------------------------------------------------------------------------------


@dataclass
class Line:
    """An ordered chain of cover vertices; ``infinite`` marks a window of a longer line."""

    quiver: Quiver
    vertices: Tuple[str, ...]
    infinite: bool = False

    @property
    def kind(self) -> str:
        if self.infinite:
            return "A_inf_inf (windowed)"
        return f"A_{len(self.vertices)}"


def make_line(q: Quiver, vertices: Sequence[str], infinite: bool = False) -> Line:
    """Validate shape and convexity; the vertices may be given in any order."""
    vs = set(vertices)
    if not vs:
        raise InputError("a line needs at least one vertex")
    for v in vs:
        if not q.has_vertex(v):
            raise InputError(f"unknown vertex {v!r}")
    sub = q.full_subquiver(vs)
    nbrs: Dict[str, List[str]] = {v: [] for v in sub.vertices}
    for a in sub.arrows:
        if a.source == a.target:
            raise InputError("a line has no loops")
        nbrs[a.source].append(a.target)
        nbrs[a.target].append(a.source)
    if len(sub.arrows) != len(vs) - 1 or not sub.is_connected() or any(len(x) > 2 for x in nbrs.values()):
        raise InputError("vertices do not span a linear quiver")
    _check_convex(q, vs)
    ends = sorted(v for v, x in nbrs.items() if len(x) <= 1)
    order = [ends[0]]
    while len(order) < len(vs):
        order.append(next(u for u in nbrs[order[-1]] if u not in order[-2:-1] and u not in order))
    return Line(q, tuple(order), infinite)


def _reach(q: Quiver, starts, forward: bool) -> set:
    seen = set(starts)
    stack = list(starts)
    while stack:
        v = stack.pop()
        nxt = [q.target(a) for a in q.out_arrows(v)] if forward else [q.source(a) for a in q.in_arrows(v)]
        for u in nxt:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _check_convex(q: Quiver, vs: set) -> None:
    # a path leaving the set and coming back passes through a vertex
    # reachable from the set and reaching it
    out = _reach(q, vs, True) - vs
    back = _reach(q, vs, False) - vs
    bad = sorted(out & back)
    if bad:
        raise InputError(f"not convex: a path between line vertices passes through {bad[0]!r}")


def line_module(L: Line, ideal: Optional[IdealPresentation] = None) -> Representation:
    q = L.quiver
    vs = set(L.vertices)
    mats = {a.id: [[1]] for a in q.arrows if a.source in vs and a.target in vs}
    M = Representation(q, {v: 1 for v in vs}, mats, ideal)
    ok, bad = M.check()
    if not ok:
        raise InputError(f"the line module violates the relation {bad}")
    return M


def string_line(f: QuiverMorphism, w: Walk, anchor: str) -> Line:
    """The finite line traced by lifting the string ``w`` from ``anchor``."""
    lifted = lift_walk(f, w, anchor)
    verts = vertices_of_walk(f.source, lifted)
    if len(set(verts)) != len(verts):
        raise InputError("the lifted walk revisits a vertex")
    return make_line(f.source, verts)


@dataclass
class Stabilizer:
    elements: List[str]
    generator: Optional[str]
    period: Optional[int]
    checked_iso: bool

    @property
    def trivial(self) -> bool:
        return self.generator is None

    def to_json(self) -> dict:
        return {
            "elements": self.elements,
            "generator": self.generator,
            "period": self.period,
            "trivial": self.trivial,
            "translates_isomorphic": self.checked_iso,
        }


def line_stabilizer(L: Line, A, seed: int = 0) -> Stabilizer:
    """Ball elements preserving ``L``.

    For a finite line an element must map the vertex set onto itself.  For a
    window of an infinite line an element qualifies when it shifts the chain
    by a constant offset wherever both ends of the shift lie in the window;
    the least positive offset is the period.
    """
    order = L.vertices
    pos = {v: i for i, v in enumerate(order)}
    hits = []
    for el in A.ball():
        vm = el.vmap
        if el.is_identity():
            continue
        if not L.infinite:
            if all(v in vm for v in order) and {vm[v] for v in order} == set(order):
                hits.append((0, el))
            continue
        shifts = {pos[vm[v]] - pos[v] for v in order if v in vm and vm[v] in pos}
        if len(shifts) != 1:
            continue
        (k,) = shifts
        overlap = sum(1 for v in order if v in vm and vm[v] in pos)
        expected = len(order) - abs(k)
        if k != 0 and overlap == expected and overlap * 2 >= len(order):
            hits.append((k, el))
    words = sorted(el.word_text(A.names) for _, el in hits)
    checked = all(_translate_matches(L, el, pos, seed) for _, el in hits)
    if not hits:
        return Stabilizer([], None, None, True)
    if L.infinite:
        positive = [(k, el.word_text(A.names)) for k, el in hits if k > 0]
        k, word = min(positive) if positive else min((-k, el.word_text(A.names)) for k, el in hits)
        return Stabilizer(words, word, k, checked)
    return Stabilizer(words, words[0], None, checked)


def _on_cover(q: Quiver, vs: Sequence[str]) -> Representation:
    keep = set(vs)
    mats = {a.id: [[1]] for a in q.arrows if a.source in keep and a.target in keep}
    return Representation(q, {v: 1 for v in keep}, mats)


def _translate_matches(L: Line, el, pos: Dict[str, int], seed: int) -> bool:
    """The translate of B_L agrees with B_L where both are visible."""
    vm, am = el.vmap, el.amap
    keep = [v for v in L.vertices if v in vm and vm[v] in pos]
    if not keep:
        return True
    moved = translate(_on_cover(L.quiver, keep), vm, am)
    return bool(are_isomorphic(moved, _on_cover(L.quiver, [vm[v] for v in keep]), seed=seed))
