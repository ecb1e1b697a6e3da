"""Fundamental groups of bound quivers.

The graph group is free on the arrows outside a BFS spanning tree; a closed
walk maps to its sequence of non-tree steps.  Each minimal relation
contributes the relators ``word(p_j) word(p_i)^-1`` for every ordered pair of
its paths.  Simplification uses Tietze eliminations and reports either a
structural verdict or "unresolved" together with the abelianization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .quiver import FORWARD, Quiver, SpanningTree, Walk, spanning_tree
from .relations import IdealPresentation

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]

TRIVIAL = "trivial"
INFINITE_CYCLIC = "infinite_cyclic"
FREE = "free"
UNRESOLVED = "unresolved"


def free_reduce(word: Iterable[Letter]) -> Word:
    out: List[Letter] = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def cyclic_reduce(word: Iterable[Letter]) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def invert(word: Sequence[Letter]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def format_word(word: Sequence[Letter]) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in word)


def _cyclic_canon(word: Word) -> Word:
    # least rotation of the word or its inverse, so duplicates collapse
    if not word:
        return word
    cands = []
    for w in (word, invert(word)):
        cands.extend(w[i:] + w[:i] for i in range(len(w)))
    return min(cands)


@dataclass
class GroupPresentation:
    generators: List[str]
    relators: List[Word] = field(default_factory=list)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator names must be unique")
        self.relators = [free_reduce(r) for r in self.relators]
        self.relators = [r for r in self.relators if r]

    def abelianization(self) -> List[int]:
        """Invariant factors (> 1) followed by one 0 per free summand."""
        n = len(self.generators)
        if n == 0:
            return []
        pos = {g: i for i, g in enumerate(self.generators)}
        rows = []
        for r in self.relators:
            row = [0] * n
            for g, e in r:
                row[pos[g]] += e
            rows.append(row)
        rows = [r for r in rows if any(r)]
        if not rows:
            return [0] * n
        factors = [abs(int(d)) for d in invariant_factors(Matrix(rows), domain=ZZ)]
        nonzero = [d for d in factors if d != 0]
        return [d for d in nonzero if d != 1] + [0] * (n - len(nonzero))

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [format_word(r) for r in self.relators],
        }


@dataclass
class SimplifiedGroup:
    original: GroupPresentation
    presentation: GroupPresentation
    verdict: str
    rank: Optional[int]
    substitution: Dict[str, Word]
    abelianization: List[int]

    @property
    def is_free(self) -> bool:
        return self.verdict in (TRIVIAL, INFINITE_CYCLIC, FREE)

    def image(self, word: Sequence[Letter]) -> Word:
        """Image of a word over the original generators in the simplified group."""
        out: List[Letter] = []
        for g, e in word:
            sub = self.substitution[g]
            out.extend(sub if e == 1 else invert(sub))
        return free_reduce(out)

    def normal_form(self, word: Sequence[Letter]) -> Optional[Word]:
        """Exact normal form when the simplified group is free, else ``None``."""
        return self.image(word) if self.is_free else None

    def describe(self) -> str:
        if self.verdict == TRIVIAL:
            return "trivial"
        if self.verdict == INFINITE_CYCLIC:
            return f"infinite_cyclic, generator [{self.presentation.generators[0]}]"
        if self.verdict == FREE:
            return f"free({self.rank}) on " + ", ".join(f"[{g}]" for g in self.presentation.generators)
        return "unresolved, abelianization " + str(self.abelianization)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "presentation": self.original.to_json(),
            "simplified": self.presentation.to_json(),
            "substitution": {g: format_word(w) for g, w in sorted(self.substitution.items())},
            "abelianization": self.abelianization,
        }


def simplify(p: GroupPresentation) -> SimplifiedGroup:
    gens = list(p.generators)
    rels = [cyclic_reduce(r) for r in p.relators]
    subst: Dict[str, Word] = {g: ((g, 1),) for g in gens}
    while True:
        rels = _dedupe([r for r in (cyclic_reduce(r) for r in rels) if r])
        choice = None
        for g in sorted(gens):
            for i, r in enumerate(rels):
                if sum(1 for h, _ in r if h == g) == 1:
                    choice = (g, i)
                    break
            if choice:
                break
        if choice is None:
            break
        g, i = choice
        r = rels.pop(i)
        k = next(j for j, (h, _) in enumerate(r) if h == g)
        rot = r[k:] + r[:k]
        e, rest = rot[0][1], rot[1:]
        # g^e rest = 1  =>  g = rest^-1 (e = 1) or g = rest (e = -1)
        value = invert(rest) if e == 1 else tuple(rest)
        gens.remove(g)

        def put(word: Word) -> Word:
            out: List[Letter] = []
            for h, s in word:
                if h == g:
                    out.extend(value if s == 1 else invert(value))
                else:
                    out.append((h, s))
            return free_reduce(out)

        rels = [put(w) for w in rels]
        subst = {h: put(w) for h, w in subst.items()}
    simplified = GroupPresentation(sorted(gens), rels)
    if not gens:
        verdict, rank = TRIVIAL, 0
    elif not rels:
        verdict, rank = (INFINITE_CYCLIC if len(gens) == 1 else FREE), len(gens)
    else:
        verdict, rank = UNRESOLVED, None
    return SimplifiedGroup(p, simplified, verdict, rank, subst, p.abelianization())


def _dedupe(rels: List[Word]) -> List[Word]:
    seen = set()
    out = []
    for r in rels:
        c = _cyclic_canon(r)
        if c not in seen:
            seen.add(c)
            out.append(r)
    return out


# quiver side ----------------------------------------------------------------


class WalkWords:
    """Tree collapse: map walks to words over the non-tree arrows."""

    def __init__(self, q: Quiver, base: str):
        self.quiver = q
        self.tree: SpanningTree = spanning_tree(q, base)
        self._non_tree = set(self.tree.non_tree_arrows)

    @property
    def base(self) -> str:
        return self.tree.base

    def word(self, w: Walk) -> Word:
        return free_reduce((a, 1 if s == FORWARD else -1) for a, s in w.steps if a in self._non_tree)


def graph_pi1(q: Quiver, base: str) -> GroupPresentation:
    return GroupPresentation(list(WalkWords(q, base).tree.non_tree_arrows))


def relators(ideal: IdealPresentation, words: WalkWords) -> List[Word]:
    out = []
    for rho in ideal.minimal_relations():
        ws = [words.word(p.as_walk()) for p in rho.paths]
        for i, wi in enumerate(ws):
            for j, wj in enumerate(ws):
                if i != j:
                    r = free_reduce(wj + invert(wi))
                    if r:
                        out.append(r)
    return out


def pi1_presentation(q: Quiver, ideal: IdealPresentation, base: str) -> GroupPresentation:
    words = WalkWords(q, base)
    return GroupPresentation(list(words.tree.non_tree_arrows), relators(ideal, words))


def fundamental_group(q: Quiver, ideal: IdealPresentation, base: Optional[str] = None) -> SimplifiedGroup:
    base = q.vertices[0] if base is None else base
    return simplify(pi1_presentation(q, ideal, base))


def simply_connected_criterion(q: Quiver, ideal: IdealPresentation) -> Tuple[bool, dict]:
    """No oriented cycles, trivial group, and every arrow is the only path between its ends."""
    report: dict = {"oriented_cycle": q.has_oriented_cycle()}
    if report["oriented_cycle"]:
        return False, report
    group = fundamental_group(q, ideal)
    report["pi1"] = group.verdict
    bad = []
    longest = max(len(q.vertices) - 1, 1)
    for a in q.arrows:
        paths = q.paths_between(a.source, a.target, longest)
        if len(paths) != 1:
            bad.append(a.id)
    report["non_unique_arrows"] = bad
    return group.verdict == TRIVIAL and not bad, report
