"""Certificate-level representation-type verdicts.

Nothing here decides tame versus wild in general.  Each positive verdict
comes with a certificate that can be re-checked: a Dynkin or Euclidean
classification of the underlying graph, an embedding of one of the six
wild patterns, a zigzag walk for the two-in two-out criterion, or a tree
embedded in a truncated universal cover.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InputError
from .quiver import Quiver, Walk
from .relations import IdealPresentation, radical_square_ideal

FINITE = "finite"
TAME = "tame"
WILD = "wild_certified"
INFINITE = "infinite_type"
INCONCLUSIVE = "inconclusive"


@dataclass
class TypeVerdict:
    verdict: str
    certificate: Optional[dict] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "certificate": self.certificate, "notes": list(self.notes)}


# underlying graphs ------------------------------------------------------------------


def _edges(q: Quiver) -> List[Tuple[str, str, str]]:
    return [(a.id, a.source, a.target) for a in q.arrows]


def _adjacency(q: Quiver) -> Dict[str, List[Tuple[str, str]]]:
    adj: Dict[str, List[Tuple[str, str]]] = {v: [] for v in q.vertices}
    for aid, s, t in _edges(q):
        adj[s].append((t, aid))
        if s != t:
            adj[t].append((s, aid))
    return adj


def _arms(adj: Dict[str, List[Tuple[str, str]]], centre: str) -> List[List[str]]:
    """Vertex sequences of the arms leaving ``centre`` in a tree."""
    arms = []
    for nb, _ in sorted(adj[centre]):
        arm = [nb]
        prev, cur = centre, nb
        while True:
            nxt = [u for u, _ in adj[cur] if u != prev]
            if len(nxt) != 1:
                break
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    return arms


def _graph_type(q: Quiver) -> Tuple[Optional[str], Optional[str]]:
    """(``dynkin``/``euclidean``/None, type name) for a connected quiver."""
    n = len(q.vertices)
    m = len(q.arrows)
    if n == 0:
        return None, None
    adj = _adjacency(q)
    loops = [a for a, s, t in _edges(q) if s == t]
    pairs = Counter(frozenset((s, t)) for _, s, t in _edges(q) if s != t)
    if loops:
        if n == 1 and m == 1:
            return "euclidean", "A~0"
        return None, None
    if any(c > 1 for c in pairs.values()):
        if n == 2 and m == 2:
            return "euclidean", "A~1"
        return None, None
    deg = {v: len(adj[v]) for v in q.vertices}
    if m == n:
        if all(d == 2 for d in deg.values()):
            return "euclidean", f"A~{n - 1}"
        return None, None
    if m != n - 1:
        return None, None
    # a tree
    branch = sorted(v for v, d in deg.items() if d >= 3)
    if not branch:
        return "dynkin", f"A{n}"
    if len(branch) == 1:
        c = branch[0]
        if deg[c] == 4:
            arms = sorted(len(a) for a in _arms(adj, c))
            return ("euclidean", "D~4") if arms == [1, 1, 1, 1] else (None, None)
        if deg[c] > 4:
            return None, None
        a, b, l = sorted(len(x) for x in _arms(adj, c))
        if a == 1 and b == 1:
            return "dynkin", f"D{n}"
        if (a, b) == (1, 2) and l in (2, 3, 4):
            return "dynkin", f"E{n}"
        if (a, b, l) == (2, 2, 2):
            return "euclidean", "E~6"
        if (a, b, l) == (1, 3, 3):
            return "euclidean", "E~7"
        if (a, b, l) == (1, 2, 5):
            return "euclidean", "E~8"
        return None, None
    if len(branch) == 2 and all(deg[v] == 3 for v in branch):
        leaves_ok = all(sum(1 for u, _ in adj[c] if deg[u] == 1) >= 2 for c in branch)
        if leaves_ok:
            return "euclidean", f"D~{n - 1}"
    return None, None


def _sub(q: Quiver, arrows: Sequence[str], vertices: Sequence[str] = ()) -> Quiver:
    vs = set(vertices)
    arr = []
    for aid in sorted(set(arrows)):
        a = q.arrow(aid)
        vs.update((a.source, a.target))
        arr.append((a.id, a.source, a.target))
    return Quiver(sorted(vs), arr)


def _tree_path(adj, x: str, y: str) -> List[Tuple[str, str]]:
    """(vertex, arrow) steps of the unique path x -> y in a tree."""
    prev: Dict[str, Tuple[str, str]] = {x: (None, None)}
    stack = [x]
    while stack:
        v = stack.pop()
        for u, aid in adj[v]:
            if u not in prev:
                prev[u] = (v, aid)
                stack.append(u)
    out = []
    cur = y
    while cur != x:
        p, aid = prev[cur]
        out.append((cur, aid))
        cur = p
    return list(reversed(out))


def _euclidean_subgraph(q: Quiver) -> Optional[Quiver]:
    """A proper Euclidean subquiver of a connected non-Dynkin, non-Euclidean quiver."""
    edges = _edges(q)
    for aid, s, t in edges:
        if s == t:
            return _sub(q, [aid])
    by_pair: Dict[frozenset, List[str]] = {}
    for aid, s, t in edges:
        by_pair.setdefault(frozenset((s, t)), []).append(aid)
    for pair in sorted(by_pair, key=sorted):
        if len(by_pair[pair]) > 1:
            return _sub(q, sorted(by_pair[pair])[:2])
    cycle = _shortest_cycle(q)
    if cycle is not None:
        return _sub(q, cycle)
    adj = _adjacency(q)
    deg = {v: len(adj[v]) for v in q.vertices}
    for v in q.vertices:
        if deg[v] >= 4:
            return _sub(q, sorted(aid for _, aid in adj[v])[:4])
    branch = sorted(v for v in q.vertices if deg[v] >= 3)
    if len(branch) >= 2:
        # two branch points joined by a path with no branch point in between
        best = None
        for i, x in enumerate(branch):
            for y in branch[i + 1 :]:
                path = _tree_path(adj, x, y)
                inner = [v for v, _ in path[:-1]]
                if any(deg[v] >= 3 for v in inner):
                    continue
                if best is None or len(path) < len(best[2]):
                    best = (x, y, path)
        x, y, path = best
        arrows = [aid for _, aid in path]
        used = {x, y} | {v for v, _ in path}
        for c in (x, y):
            extra = [aid for u, aid in sorted(adj[c]) if u not in used][:2]
            arrows += extra
        return _sub(q, arrows)
    c = branch[0]
    arms = sorted(_arms(adj, c), key=lambda a: (len(a), a))
    lens = [len(a) for a in arms]
    want = None
    if lens[0] >= 2:
        want = (2, 2, 2)
    elif lens[1] >= 3:
        want = (1, 3, 3)
    elif lens[2] >= 5:
        want = (1, 2, 5)
    if want is None:
        return None
    arrows = []
    for arm, k in zip(arms, want):
        prev = c
        for v in arm[:k]:
            aid = next(a for u, a in adj[prev] if u == v)
            arrows.append(aid)
            prev = v
    return _sub(q, arrows)


def _shortest_cycle(q: Quiver) -> Optional[List[str]]:
    adj = _adjacency(q)
    best = None
    for aid, s, t in _edges(q):
        # shortest path s -> t avoiding this edge
        prev = {s: None}
        queue = [s]
        for v in queue:
            for u, b in sorted(adj[v]):
                if b != aid and u not in prev:
                    prev[u] = (v, b)
                    queue.append(u)
        if t in prev:
            cyc = [aid]
            cur = t
            while cur != s:
                v, b = prev[cur]
                cyc.append(b)
                cur = v
            if best is None or len(cyc) < len(best):
                best = sorted(cyc)
    return best


def classify_path_algebra(q: Quiver) -> TypeVerdict:
    """Finite for Dynkin, tame for Euclidean, wild when a Euclidean subquiver is strictly contained."""
    if not q.vertices or not q.is_connected():
        raise InputError("classification needs a nonempty connected quiver")
    kind, name = _graph_type(q)
    if kind == "dynkin":
        return TypeVerdict(FINITE, {"graph": "dynkin", "type": name})
    if kind == "euclidean":
        return TypeVerdict(TAME, {"graph": "euclidean", "type": name})
    sub = _euclidean_subgraph(q)
    if sub is None:
        return TypeVerdict(INCONCLUSIVE, None, ["no Euclidean subquiver found"])
    _, subname = _graph_type(sub)
    cert = {
        "graph": "strictly contains a euclidean subquiver",
        "type": subname,
        "vertices": list(sub.vertices),
        "arrows": list(sub.arrow_ids),
    }
    return TypeVerdict(WILD, cert)


def validate_euclidean_certificate(q: Quiver, cert: dict) -> bool:
    arrows = cert["arrows"]
    if not all(q.has_arrow(a) for a in arrows):
        return False
    sub = _sub(q, arrows, cert["vertices"])
    kind, name = _graph_type(sub)
    proper = len(sub.arrows) < len(q.arrows) or len(sub.vertices) < len(q.vertices)
    return kind == "euclidean" and name == cert["type"] and proper


# the six wild patterns --------------------------------------------------------------------

PATTERNS: Dict[str, Quiver] = {
    "i": Quiver(["1", "2"], [("alpha", "1", "1"), ("beta", "1", "1"), ("gamma", "1", "2")]),
    "ii": Quiver(["1", "2"], [("alpha", "1", "1"), ("beta", "1", "2"), ("beta'", "1", "2")]),
    "iii": Quiver(["1", "2", "3"], [("beta", "1", "2"), ("beta'", "1", "2"), ("alpha", "3", "2")]),
    "iv": Quiver(
        ["1", "2", "3"],
        [("alpha", "1", "1"), ("beta", "1", "2"), ("eta", "2", "2"), ("gamma", "2", "1"), ("rho", "3", "1")],
    ),
    "v": Quiver(
        ["1", "2", "3"],
        [("alpha", "1", "1"), ("beta", "1", "2"), ("gamma", "2", "1"), ("delta", "2", "3"), ("rho", "1", "3")],
    ),
    "vi": Quiver(
        ["1", "2", "3"],
        [("alpha", "1", "1"), ("beta", "1", "2"), ("rho", "2", "2"), ("gamma", "3", "1"), ("delta", "3", "2")],
    ),
}


def embed(pattern: Quiver, host: Quiver) -> Optional[Tuple[Dict[str, str], Dict[str, str]]]:
    """First injective incidence-preserving map of ``pattern`` into ``host``.

    Vertex assignments are tried in lexicographic order of host ids, and
    arrows are matched greedily by id, which is enough because parallel
    pattern arrows only need distinct parallel host arrows.
    """
    pv = list(pattern.vertices)
    need = Counter((a.source, a.target) for a in pattern.arrows)
    have: Dict[Tuple[str, str], List[str]] = {}
    for a in host.arrows:
        have.setdefault((a.source, a.target), []).append(a.id)
    for image in permutations(host.vertices, len(pv)):
        vm = dict(zip(pv, image))
        if all(len(have.get((vm[s], vm[t]), ())) >= k for (s, t), k in need.items()):
            am: Dict[str, str] = {}
            used: Dict[Tuple[str, str], int] = {}
            for a in pattern.arrows:
                key = (vm[a.source], vm[a.target])
                i = used.get(key, 0)
                am[a.id] = sorted(have[key])[i]
                used[key] = i + 1
            return vm, am
    return None


def validate_embedding(pattern: Quiver, host: Quiver, vm: Dict[str, str], am: Dict[str, str]) -> bool:
    if sorted(vm) != list(pattern.vertices) or len(set(vm.values())) != len(vm):
        return False
    if sorted(am) != sorted(pattern.arrow_ids) or len(set(am.values())) != len(am):
        return False
    for a in pattern.arrows:
        if not host.has_arrow(am[a.id]):
            return False
        h = host.arrow(am[a.id])
        if (h.source, h.target) != (vm[a.source], vm[a.target]):
            return False
    return True


def detect_wild_patterns(q: Quiver) -> TypeVerdict:
    for name, pat in PATTERNS.items():
        for dual, p in ((False, pat), (True, pat.opposite())):
            hit = embed(p, q)
            if hit is not None:
                vm, am = hit
                cert = {"pattern": name, "dual": dual, "vertex_map": vm, "arrow_map": am}
                return TypeVerdict(WILD, cert)
    return TypeVerdict(INCONCLUSIVE, None, ["none of the six patterns or their duals embeds"])


def validate_pattern_certificate(q: Quiver, cert: dict) -> bool:
    pat = PATTERNS[cert["pattern"]]
    if cert["dual"]:
        pat = pat.opposite()
    return validate_embedding(pat, q, cert["vertex_map"], cert["arrow_map"])


# two arrows in, two arrows out ------------------------------------------------------------


def two_in_two_out_criterion(q: Quiver) -> TypeVerdict:
    table = {v: (len(q.in_arrows(v)), len(q.out_arrows(v))) for v in q.vertices}
    short = sorted(v for v, (i, o) in table.items() if i < 2 or o < 2)
    if short or not q.vertices:
        return TypeVerdict(INCONCLUSIVE, None, [f"criterion not met at {short}"])
    w = zigzag_walk(q)
    cert = {
        "degrees": {v: {"in": i, "out": o} for v, (i, o) in table.items()},
        "zigzag_walk": str(w),
        "start": w.start,
        "witness": "the walk alternates forward and inverse steps without cancelling, so it "
        "lifts to an infinite zigzag line in the universal cover of the radical-square-zero algebra",
    }
    return TypeVerdict(INFINITE, cert)


def zigzag_walk(q: Quiver) -> Walk:
    """Periodic alternating walk: out by one arrow, back in by a different arrow, repeated."""
    start = q.vertices[0]
    v = start
    steps = []
    seen = {}
    prev = None
    while True:
        state = (v, prev, len(steps) % 2)
        if state in seen:
            break
        seen[state] = len(steps)
        if len(steps) % 2 == 0:
            choices = [a for a in q.out_arrows(v) if a != prev]
            a = choices[0]
            steps.append((a, 1))
            v = q.target(a)
        else:
            choices = [a for a in q.in_arrows(v) if a != prev]
            a = choices[0]
            steps.append((a, -1))
            v = q.source(a)
        prev = a
    # close up one more period so the repetition is visible
    return q.walk(steps, start)


# trees in universal covers ---------------------------------------------------------------

# the tree of the displays: chain c1..c8 with an extra vertex on c4.  Arms
# leave c4 towards c3..c1, towards c5..c8, and to the branch vertex.  Edge
# directions: +1 points away from c4, -1 points towards it.
ARM_LENGTHS = (3, 4, 1)
ORIENTATIONS: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    # c4 a source, alternating chain, branch arrow leaving c4: displays (i), (ii), (v)
    "chain_source_branch_out": ((1, -1, 1), (1, -1, 1, -1), (1,)),
    # the opposite orientation: displays (iii), (iv), (vi)
    "chain_sink_branch_in": ((-1, 1, -1), (-1, 1, -1, 1), (-1,)),
    # tree forced by relation-free compositions: branch arrow entering c4
    "chain_source_branch_in": ((1, -1, 1), (1, -1, 1, -1), (-1,)),
}


# labels of the displayed trees per arm (towards c1, towards c8, branch)
DISPLAYS: Dict[str, Tuple[str, Tuple[Tuple[str, ...], ...]]] = {
    "i": ("chain_source_branch_out", (("alpha", "beta", "alpha"), ("beta", "alpha", "beta", "alpha"), ("gamma",))),
    "ii": ("chain_source_branch_out", (("beta", "beta'", "beta"), ("beta'", "beta", "beta'", "beta"), ("alpha",))),
    "iii": ("chain_sink_branch_in", (("beta", "beta'", "beta"), ("beta'", "beta", "beta'", "beta"), ("alpha",))),
    "iv": ("chain_sink_branch_in", (("alpha", "beta", "eta"), ("gamma", "eta", "beta", "alpha"), ("rho",))),
    "v": ("chain_source_branch_out", (("rho", "delta", "gamma"), ("alpha", "gamma", "delta", "rho"), ("beta",))),
    "vi": ("chain_sink_branch_in", (("beta", "alpha", "gamma"), ("delta", "gamma", "alpha", "beta"), ("rho",))),
}


def _tree_search(
    cover: Quiver,
    orient: Optional[Tuple[Tuple[int, ...], ...]],
    labels: Optional[Tuple[Tuple[str, ...], ...]] = None,
    label_of: Optional[Dict[str, str]] = None,
) -> Optional[dict]:
    nbrs: Dict[str, List[Tuple[str, int, str]]] = {v: [] for v in cover.vertices}
    for a in cover.arrows:
        if a.source == a.target:
            continue
        nbrs[a.source].append((a.target, 1, a.id))
        nbrs[a.target].append((a.source, -1, a.id))
    for v in nbrs:
        nbrs[v].sort()

    def arms_from(centre, lengths, dirs, labs, used):
        if not lengths:
            return []
        k, d, lab = lengths[0], dirs[0], labs[0]
        for first in nbrs[centre]:
            for arm in _arm(centre, first, k, d, lab):
                vs = {x for x, _ in arm}
                if vs & used:
                    continue
                rest = arms_from(centre, lengths[1:], dirs[1:], labs[1:], used | vs)
                if rest is not None:
                    return [arm] + rest
        return None

    def _arm(prev, first, k, d, lab):
        # simple path of k vertices starting with the edge to ``first``
        u, sign, aid = first
        if d is not None and sign != d[0]:
            return
        if lab is not None and label_of[aid] != lab[0]:
            return
        if k == 1:
            yield [(u, aid)]
            return
        for nxt in nbrs[u]:
            if nxt[0] == prev:
                continue
            for tail in _arm(u, nxt, k - 1, None if d is None else d[1:], None if lab is None else lab[1:]):
                if u not in {x for x, _ in tail}:
                    yield [(u, aid)] + tail

    dirs = orient if orient is not None else (None, None, None)
    labs = labels if labels is not None else (None, None, None)
    for centre in cover.vertices:
        if len(nbrs[centre]) < 3:
            continue
        got = arms_from(centre, ARM_LENGTHS, dirs, labs, {centre})
        if got is not None:
            left, right, branch = got
            chain = [x for x, _ in reversed(left)] + [centre] + [x for x, _ in right]
            arrows = [a for _, a in left] + [a for _, a in right] + [a for _, a in branch]
            return {"chain": chain, "branch": branch[0][0], "arrows": sorted(arrows)}
    return None


def validate_tree_certificate(cover: Quiver, cert: dict) -> bool:
    chain, b = cert["chain"], cert["branch"]
    verts = chain + [b]
    if len(chain) != 8 or len(set(verts)) != 9 or not all(cover.has_vertex(v) for v in verts):
        return False
    want = {frozenset((chain[i], chain[i + 1])) for i in range(7)} | {frozenset((chain[3], b))}
    got = Counter()
    for aid in cert["arrows"]:
        a = cover.arrow(aid)
        got[frozenset((a.source, a.target))] += 1
    return set(got) == want and all(c == 1 for c in got.values())


def e7tt_tree_certificate(
    q: Quiver,
    radius: int = 6,
    ideal: Optional[IdealPresentation] = None,
    base: Optional[str] = None,
) -> dict:
    """Search the truncated universal cover of ``(Q, I)`` for the 9-vertex tree.

    ``I`` defaults to the radical-square ideal.  The undirected shape and each
    displayed orientation are searched separately, and so is an exact match
    of the arrow labels of a displayed tree when the labels are arrows of Q.
    """
    from .universal_cover import build_universal_cover

    if ideal is None:
        ideal = radical_square_ideal(q)
    if not ideal.is_monomial():
        raise InputError("the tree search needs an ideal generated by paths")
    bases = [base] if base is not None else list(q.vertices)
    result = {"radius": radius, "undirected": None, "displayed": None, "labelled": None, "base": None}
    for b in bases:
        cov = build_universal_cover(q, ideal, b, radius)
        undirected = _tree_search(cov.cover, None)
        if undirected is None:
            continue
        result["undirected"] = _with_labels(cov, undirected)
        result["base"] = b
        for name, orient in ORIENTATIONS.items():
            hit = _tree_search(cov.cover, orient)
            if hit is not None:
                result["displayed"] = dict(_with_labels(cov, hit), orientation=name)
                break
        label_of = cov.projection.arrow_map
        for name, (oname, labels) in DISPLAYS.items():
            if not all(q.has_arrow(x) for arm in labels for x in arm):
                continue
            hit = _tree_search(cov.cover, ORIENTATIONS[oname], labels, label_of)
            if hit is not None:
                result["labelled"] = dict(_with_labels(cov, hit), display=name, orientation=oname)
                break
        result["cover_vertices"] = len(cov.cover.vertices)
        return result
    return result


def _with_labels(cov, cert: dict) -> dict:
    out = dict(cert)
    out["labels"] = {a: cov.projection.arrow_map[a] for a in cert["arrows"]}
    return out


def representation_type(q: Quiver, ideal: Optional[IdealPresentation] = None, radius: Optional[int] = None) -> dict:
    """Run every applicable check and combine them into one report."""
    report: Dict[str, object] = {}
    hereditary = ideal is None or not ideal.generators
    verdicts = []
    if hereditary and q.vertices and q.is_connected():
        v = classify_path_algebra(q)
        report["path_algebra"] = v.to_json()
        verdicts.append(v.verdict)
    pat = detect_wild_patterns(q)
    report["wild_patterns"] = pat.to_json()
    verdicts.append(pat.verdict)
    tt = two_in_two_out_criterion(q)
    report["two_in_two_out"] = tt.to_json()
    verdicts.append(tt.verdict)
    if radius is not None:
        report["e7tt_tree"] = e7tt_tree_certificate(q, radius)
    for v in (WILD, TAME, FINITE, INFINITE):
        if v in verdicts:
            report["verdict"] = v
            break
    else:
        report["verdict"] = INCONCLUSIVE
    return report
