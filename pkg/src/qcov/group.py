"""Groups of bound-quiver automorphisms given by generators.

Elements are stored as vertex and arrow maps.  Generators may be partial
(defined on a window of a truncated cover); compositions are then defined
wherever both factors are.  Only the ball of words of length at most ``W``
is materialised.  When that ball is closed under the generators the group
is finite and every verdict is exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .covering import BoundQuiverMorphism, is_relation_covering
from .errors import InputError, Refusal
from .quiver import Path, Quiver, QuiverMorphism
from .relations import IdealPresentation, Relation

AUT_NODE_CAP = 1_000_000


@dataclass(frozen=True)
class Element:
    vertex_map: Tuple[Tuple[str, str], ...]
    arrow_map: Tuple[Tuple[str, str], ...]
    word: Tuple[Tuple[int, int], ...] = field(default=(), compare=False, hash=False)

    @classmethod
    def of(cls, vm: Mapping[str, str], am: Mapping[str, str], word=()) -> "Element":
        return cls(tuple(sorted(vm.items())), tuple(sorted(am.items())), tuple(word))

    @property
    def vmap(self) -> Dict[str, str]:
        return dict(self.vertex_map)

    @property
    def amap(self) -> Dict[str, str]:
        return dict(self.arrow_map)

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.vertex_map) and all(a == b for a, b in self.arrow_map)

    def inverse(self) -> "Element":
        return Element.of({b: a for a, b in self.vertex_map}, {b: a for a, b in self.arrow_map}, _inv_word(self.word))

    def then(self, other: "Element") -> "Element":
        """``other ∘ self`` (apply ``self`` first)."""
        ov, oa = other.vmap, other.amap
        vm = {x: ov[y] for x, y in self.vertex_map if y in ov}
        am = {x: oa[y] for x, y in self.arrow_map if y in oa}
        return Element.of(vm, am, self.word + other.word)

    def word_text(self, names: Sequence[str]) -> str:
        if not self.word:
            return "1"
        return " ".join(names[g] + ("" if e == 1 else "^-1") for g, e in self.word)


def _inv_word(word):
    return tuple((g, -e) for g, e in reversed(word))


def _check_partial(q: Quiver, vm: Mapping[str, str], am: Mapping[str, str]) -> None:
    for v, w in vm.items():
        if not q.has_vertex(v) or not q.has_vertex(w):
            raise InputError(f"vertex map mentions unknown vertex {v!r} -> {w!r}")
    if len(set(vm.values())) != len(vm) or len(set(am.values())) != len(am):
        raise InputError("automorphism is not injective")
    for a, b in am.items():
        src, dst = q.arrow(a), q.arrow(b)
        if vm.get(src.source) != dst.source or vm.get(src.target) != dst.target:
            raise InputError(f"incidence violated at arrow {a!r}")


def automorphism(q: Quiver, vm: Mapping[str, str], am: Mapping[str, str], ideal: Optional[IdealPresentation] = None) -> Element:
    """Validated (possibly partial) automorphism; total ones must preserve the ideal."""
    _check_partial(q, vm, am)
    el = Element.of(vm, am)
    if ideal is not None and len(vm) == len(q.vertices) and len(am) == len(q.arrow_ids):
        if set(vm.values()) != set(q.vertices):
            raise InputError("automorphism is not surjective")
        bad = ideal_violation(el, ideal)
        if bad is not None:
            raise InputError(f"automorphism does not preserve the ideal: {bad}")
    return el


def map_relation(el: Element, rho: Relation) -> Optional[Dict[Path, Fraction]]:
    am, vm = el.amap, el.vmap
    out: Dict[Path, Fraction] = {}
    for c, p in rho.terms:
        if any(a not in am for a in p.arrows):
            return None
        img = Path(vm[p.start], vm[p.end], tuple(am[a] for a in p.arrows))
        out[img] = out.get(img, Fraction(0)) + c
    return out


def ideal_violation(el: Element, ideal: IdealPresentation) -> Optional[str]:
    for rho in ideal.generators:
        img = map_relation(el, rho)
        if img is not None and not ideal.membership(img):
            return str(rho)
    return None


class ActionPresentation:
    def __init__(self, quiver: Quiver, generators: Sequence[Element], enumeration_bound: int, ideal: Optional[IdealPresentation] = None):
        if enumeration_bound < 0:
            raise InputError("enumeration bound must be nonnegative")
        self.quiver = quiver
        self.ideal = ideal
        self.generators = [Element.of(g.vmap, g.amap, ((i, 1),)) for i, g in enumerate(generators)]
        self.names = [f"g{i}" for i in range(len(self.generators))]
        self.enumeration_bound = enumeration_bound
        self.total = all(
            len(g.vertex_map) == len(quiver.vertices) and len(g.arrow_map) == len(quiver.arrow_ids) for g in self.generators
        )
        self._ball: Optional[List[Element]] = None
        self._closed = False

    @classmethod
    def from_json(cls, q: Quiver, data: Mapping, ideal: Optional[IdealPresentation] = None) -> "ActionPresentation":
        try:
            gens = [automorphism(q, g["vertex_map"], g["arrow_map"], ideal) for g in data["generators"]]
            w = data.get("enumeration_bound", 8)
        except (KeyError, TypeError) as exc:
            raise InputError(f"group JSON: missing field {exc}") from None
        if not isinstance(w, int) or isinstance(w, bool):
            raise InputError("enumeration_bound must be an integer")
        return cls(q, gens, w, ideal)

    def _letters(self) -> List[Element]:
        out = []
        for i, g in enumerate(self.generators):
            out.append(g)
            out.append(Element.of({b: a for a, b in g.vertex_map}, {b: a for a, b in g.arrow_map}, ((i, -1),)))
        return out

    def ball(self) -> List[Element]:
        """Distinct elements given by words of length at most ``W``, identity first."""
        if self._ball is not None:
            return self._ball
        ident = Element.of({v: v for v in self.quiver.vertices}, {a: a for a in self.quiver.arrow_ids})
        elems = {ident: ident}
        layer = [ident]
        letters = self._letters()
        closed = False
        for _ in range(self.enumeration_bound):
            nxt = []
            for el in layer:
                for s in letters:
                    new = el.then(s)
                    if not new.vertex_map:
                        continue
                    if new not in elems:
                        elems[new] = new
                        nxt.append(new)
            if not nxt:
                closed = True
                break
            layer = nxt
        if not closed and self.total:
            # the last layer may still be closed under the letters
            closed = all(el.then(s) in elems for el in layer for s in letters)
        self._closed = closed and self.total
        self._ball = list(elems.values())
        return self._ball

    @property
    def is_finite(self) -> bool:
        self.ball()
        return self._closed

    def orbit(self, v: str) -> List[str]:
        return sorted({el.vmap[v] for el in self.ball() if v in el.vmap})

    def arrow_orbit(self, a: str) -> List[str]:
        return sorted({el.amap[a] for el in self.ball() if a in el.amap})


@dataclass
class ActionVerdict:
    ok: bool
    exact: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok

    @property
    def label(self) -> str:
        if self.ok:
            return "true" if self.exact else "true within ball"
        return "false"

    def to_json(self) -> dict:
        return {"ok": self.ok, "exact": self.exact, "label": self.label, "witness": self.witness}


def acts_freely(A: ActionPresentation) -> ActionVerdict:
    for el in A.ball():
        if el.is_identity():
            continue
        for v, w in el.vertex_map:
            if v == w:
                return ActionVerdict(False, True, {"element": el.word_text(A.names), "vertex": v})
    return ActionVerdict(True, A.is_finite)


def is_admissible(A: ActionPresentation) -> ActionVerdict:
    q = A.quiver
    orbit_of: Dict[str, set] = {}
    for v in q.vertices:
        orbit_of[v] = set(A.orbit(v))
    for x in q.vertices:
        for kind, nbrs in (("successors", {q.target(a) for a in q.out_arrows(x)}), ("predecessors", {q.source(a) for a in q.in_arrows(x)})):
            nb = sorted(nbrs)
            for i, y1 in enumerate(nb):
                for y2 in nb[i + 1 :]:
                    if y2 in orbit_of[y1]:
                        return ActionVerdict(False, True, {"vertex": x, "side": kind, "pair": [y1, y2]})
    return ActionVerdict(True, A.is_finite)


def admissible_implies_free_check(A: ActionPresentation) -> Optional[bool]:
    """The implication admissible => free; ``None`` when the hypotheses fail."""
    q = A.quiver
    if not q.is_connected():
        return None
    pairs = [(a.source, a.target) for a in q.arrows]
    if len(pairs) != len(set(pairs)):
        return None
    return (not is_admissible(A).ok) or acts_freely(A).ok


@dataclass
class OrbitQuiver:
    quiver: Quiver
    projection: QuiverMorphism
    ideal: Optional[IdealPresentation]
    covering_report: Optional[dict] = None


def orbit_quiver(A: ActionPresentation) -> OrbitQuiver:
    if not A.is_finite:
        raise Refusal("the ball is not closed: group not finite within the enumeration bound")
    q = A.quiver
    vrep = {v: A.orbit(v)[0] for v in q.vertices}
    arep = {a: A.arrow_orbit(a)[0] for a in q.arrow_ids}
    verts = sorted(set(vrep.values()))
    arrows = []
    for a in sorted(set(arep.values())):
        arr = q.arrow(a)
        arrows.append((a, vrep[arr.source], vrep[arr.target]))
    oq = Quiver(verts, arrows)
    proj = QuiverMorphism(q, oq, vrep, arep)
    induced = None
    report = None
    if A.ideal is not None:
        gens: List[Relation] = []
        seen = set()
        for rho in A.ideal.generators:
            img: Dict[Path, Fraction] = {}
            for c, p in rho.terms:
                ip = proj.map_path(p)
                img[ip] = img.get(ip, Fraction(0)) + c
            img = {p: c for p, c in img.items() if c != 0}
            if not img:
                continue
            r = Relation.from_terms((c, p) for p, c in img.items())
            key = _projective_key(r)
            if key not in seen:
                seen.add(key)
                gens.append(r)
        induced = IdealPresentation(oq, gens, A.ideal.nilpotency_bound, A.ideal.truncation_length)
        if acts_freely(A).ok:
            rep = is_relation_covering(BoundQuiverMorphism(proj, A.ideal, induced))
            if not rep.ok:
                raise AssertionError(f"orbit projection is not a relation covering: {rep.failures}")
            report = rep.to_json()
    return OrbitQuiver(oq, proj, induced, report)


def _projective_key(r: Relation):
    # relations differing by a nonzero scalar generate the same ideal
    c0 = r.terms[0][0]
    return tuple((c / c0, p) for c, p in r.terms)


@dataclass
class GaloisReport:
    ok: bool
    free: bool
    reasons: List[str]

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "free": self.free, "reasons": self.reasons}


def is_galois_covering(m: BoundQuiverMorphism, A: ActionPresentation) -> GaloisReport:
    """Galois test.  The comparison map from the orbit quiver is forced by ``nu ∘ pi = f``."""
    if not A.is_finite:
        raise Refusal("the ball is not closed: group not finite within the enumeration bound")
    reasons: List[str] = []
    free = acts_freely(A).ok
    if not free:
        reasons.append("action is not free")
    f = m.f
    for el in A.ball():
        vm, am = el.vmap, el.amap
        if any(f.vertex_map[vm[v]] != f.vertex_map[v] for v in vm) or any(f.arrow_map[am[a]] != f.arrow_map[a] for a in am):
            reasons.append(f"f is not constant on the orbit of element {el.word_text(A.names)}")
            break
        bad = ideal_violation(el, m.source_ideal)
        if bad is not None:
            reasons.append(f"element {el.word_text(A.names)} does not preserve the ideal at {bad}")
            break
    if not reasons or reasons == ["action is not free"]:
        for v in f.target.vertices:
            fibre = list(f.fibre(v))
            if not fibre or sorted(A.orbit(fibre[0])) != sorted(fibre):
                reasons.append(f"fibre over {v} is not a single orbit")
                break
        for a in f.target.arrow_ids:
            fibre = sorted(x for x, y in f.arrow_map.items() if y == a)
            if not fibre or A.arrow_orbit(fibre[0]) != fibre:
                reasons.append(f"fibre over arrow {a} is not a single orbit")
                break
    if not reasons:
        oq = orbit_quiver(A)
        nu_v = {oq.projection.vertex_map[x]: y for x, y in f.vertex_map.items()}
        nu_a = {oq.projection.arrow_map[x]: y for x, y in f.arrow_map.items()}
        nu = QuiverMorphism(oq.quiver, f.target, nu_v, nu_a)
        for rho in oq.ideal.generators:
            if not m.target_ideal.membership(_image(nu, rho)):
                reasons.append(f"induced relation {rho} is not in the target ideal")
        back_v = {y: x for x, y in nu_v.items()}
        back_a = {y: x for x, y in nu_a.items()}
        inv = QuiverMorphism(f.target, oq.quiver, back_v, back_a)
        for rho in m.target_ideal.generators:
            if not oq.ideal.membership(_image(inv, rho)):
                reasons.append(f"target relation {rho} is not induced")
    return GaloisReport(not reasons, free, reasons)


def _image(f: QuiverMorphism, rho: Relation) -> Dict[Path, Fraction]:
    out: Dict[Path, Fraction] = {}
    for c, p in rho.terms:
        ip = f.map_path(p)
        out[ip] = out.get(ip, Fraction(0)) + c
    return out


# automorphism groups ---------------------------------------------------------------


def automorphism_group(q: Quiver, ideal: Optional[IdealPresentation] = None, cap: int = AUT_NODE_CAP) -> List[Element]:
    """All automorphisms of ``(Q, I)`` by backtracking over vertex assignments."""
    verts = list(q.vertices)
    count: Dict[Tuple[str, str], List[str]] = {}
    for a in q.arrows:
        count.setdefault((a.source, a.target), []).append(a.id)

    def sig(v):
        loops = len(count.get((v, v), []))
        return (len(q.out_arrows(v)), len(q.in_arrows(v)), loops)

    nodes = 0
    found: List[Element] = []
    assign: Dict[str, str] = {}
    used = set()

    def extend(i: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise Refusal(f"automorphism search exceeded {cap} nodes")
        if i == len(verts):
            _arrow_choices(assign)
            return
        v = verts[i]
        for w in verts:
            if w in used or sig(w) != sig(v):
                continue
            ok = True
            for u, img in assign.items():
                if len(count.get((v, u), [])) != len(count.get((w, img), [])) or len(count.get((u, v), [])) != len(
                    count.get((img, w), [])
                ):
                    ok = False
                    break
            if ok and len(count.get((v, v), [])) != len(count.get((w, w), [])):
                ok = False
            if not ok:
                continue
            assign[v] = w
            used.add(w)
            extend(i + 1)
            del assign[v]
            used.discard(w)

    def _arrow_choices(vm: Dict[str, str]) -> None:
        nonlocal nodes
        groups = sorted(count.items())
        options = []
        for (s, t), ids in groups:
            tgt = count[(vm[s], vm[t])]
            options.append([dict(zip(ids, perm)) for perm in permutations(tgt)])
        for combo in product(*options):
            nodes += 1
            if nodes > cap:
                raise Refusal(f"automorphism search exceeded {cap} nodes")
            am: Dict[str, str] = {}
            for part in combo:
                am.update(part)
            el = Element.of(vm, am)
            if ideal is None or ideal_violation(el, ideal) is None:
                found.append(el)

    extend(0)
    return found


def subgroups(elements: Sequence[Element], cap: int = 4096) -> List[List[Element]]:
    """Every subgroup of a finite group, by closing generating sets incrementally."""
    ident = next(e for e in elements if e.is_identity())

    def close(gens) -> frozenset:
        out = {ident}
        todo = [ident]
        while todo:
            x = todo.pop()
            for g in gens:
                y = x.then(g)
                if y not in out:
                    out.add(y)
                    todo.append(y)
        return frozenset(out)

    start = close([])
    seen = {start}
    queue = deque([start])
    while queue:
        h = queue.popleft()
        for e in elements:
            if e in h:
                continue
            k = close(list(h) + [e])
            if k not in seen:
                if len(seen) >= cap:
                    raise Refusal("too many subgroups")
                seen.add(k)
                queue.append(k)
    return [sorted(h, key=lambda e: (not e.is_identity(), e.vertex_map, e.arrow_map)) for h in seen]


def galois_over_subgroups(m: BoundQuiverMorphism, cap: int = AUT_NODE_CAP) -> dict:
    """Try every subgroup of ``Aut(Q, I)``; the covering is Galois iff one works."""
    auts = automorphism_group(m.f.source, m.source_ideal, cap)
    results = []
    hit = None
    for h in subgroups(auts):
        A = ActionPresentation(m.f.source, [e for e in h if not e.is_identity()], len(h), m.source_ideal)
        rep = is_galois_covering(m, A)
        results.append({"order": len(h), "ok": rep.ok, "reasons": rep.reasons})
        if rep.ok and hit is None:
            hit = len(h)
    return {"galois": hit is not None, "aut_order": len(auts), "subgroups": results}
