"""Relations, ideal presentations and truncated ideal membership.

An ideal is given by generators plus a truncation length ``L``.  Membership
is decided inside the span of all products ``p . rho . q`` whose paths have
length at most ``L``.  When a nilpotency bound ``N`` is known, every path of
length ``>= N`` is zero and the answer is exact; otherwise it is a sound
under-approximation (a "yes" is always true).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InputError, Refusal
from .linalg import RowSpace, format_frac, frac
from .quiver import Path, Quiver

Combination = Dict[Path, Fraction]

SUBSET_CAP = 20

ZERO = "zero"
MINIMAL = "minimal"
DECOMPOSABLE = "decomposable"
NOT_IN_IDEAL = "not_in_ideal"


def combine(terms: Iterable[Tuple[Fraction, Path]]) -> Combination:
    """Collect terms, dropping zero coefficients."""
    out: Combination = {}
    for c, p in terms:
        c = frac(c)
        out[p] = out.get(p, Fraction(0)) + c
    return {p: c for p, c in out.items() if c != 0}


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    terms: Tuple[Tuple[Fraction, Path], ...]

    def __post_init__(self):
        if not self.terms:
            raise InputError("a relation needs at least one term")
        seen = set()
        for c, p in self.terms:
            if c == 0:
                raise InputError("relation coefficients must be nonzero")
            if len(p) == 0:
                raise InputError("relation paths must have length >= 1")
            if p.start != self.source or p.end != self.target:
                raise InputError("relation paths must be parallel")
            if p in seen:
                raise InputError(f"repeated path {p} in relation")
            seen.add(p)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[object, Path]]) -> "Relation":
        combo = combine((frac(c), p) for c, p in terms)
        if not combo:
            raise InputError("relation collapses to zero")
        p0 = next(iter(combo))
        ordered = tuple(sorted(((c, p) for p, c in combo.items()), key=lambda t: t[1].key()))
        return cls(p0.start, p0.end, ordered)

    @classmethod
    def from_json(cls, q: Quiver, data: Mapping) -> "Relation":
        try:
            raw = data["terms"]
            terms = [(frac(t["coeff"]), q.path(t["path"])) for t in raw]
        except (KeyError, TypeError) as exc:
            raise InputError(f"relation JSON: missing field {exc}") from None
        except ValueError as exc:
            raise InputError(f"relation JSON: {exc}") from None
        return cls.from_terms(terms)

    def to_json(self) -> dict:
        return {"terms": [{"coeff": format_frac(c), "path": list(p.arrows)} for c, p in self.terms]}

    @property
    def paths(self) -> Tuple[Path, ...]:
        return tuple(p for _, p in self.terms)

    @property
    def max_len(self) -> int:
        return max(len(p) for p in self.paths)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def combination(self) -> Combination:
        return {p: c for c, p in self.terms}

    def __str__(self) -> str:
        parts = []
        for c, p in self.terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coef = "" if mag == 1 else format_frac(mag) + "*"
            parts.append(f"{sign} {coef}{p.composite()}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def relation(q: Quiver, *terms: Tuple[object, Sequence[str]]) -> Relation:
    """Shorthand: ``relation(q, (1, ["a","a"]), (-1, ["b","b"]))``."""
    return Relation.from_terms((frac(c), q.path(p)) for c, p in terms)


class IdealPresentation:
    def __init__(
        self,
        ambient: Quiver,
        generators: Iterable[Relation] = (),
        nilpotency_bound: Optional[int] = None,
        truncation_length: Optional[int] = None,
    ):
        self.ambient = ambient
        self.generators: Tuple[Relation, ...] = tuple(generators)
        for g in self.generators:
            for p in g.paths:
                ambient.path(p.arrows)
        if nilpotency_bound is not None and nilpotency_bound < 1:
            raise InputError("nilpotency bound must be positive")
        longest = max((g.max_len for g in self.generators), default=1)
        if truncation_length is None:
            truncation_length = max(2 * longest, nilpotency_bound or 0)
        if truncation_length < 1:
            raise InputError("truncation length must be positive")
        if nilpotency_bound is not None and truncation_length < nilpotency_bound:
            raise InputError("truncation length must be at least the nilpotency bound")
        self.nilpotency_bound = nilpotency_bound
        self.truncation_length = truncation_length
        self._spaces: Dict[str, Tuple[Dict[Path, int], RowSpace]] = {}

    # construction helpers -------------------------------------------------

    @classmethod
    def from_json(cls, q: Quiver, data: Mapping) -> "IdealPresentation":
        rels = [Relation.from_json(q, r) for r in data.get("relations", [])]
        n = data.get("nilpotency_bound")
        length = data.get("truncation_length")
        for name, val in (("nilpotency_bound", n), ("truncation_length", length)):
            if val is not None and (not isinstance(val, int) or isinstance(val, bool)):
                raise InputError(f"{name} must be an integer")
        return cls(q, rels, n, length)

    def to_json(self) -> dict:
        out = {"relations": [g.to_json() for g in self.generators], "truncation_length": self.truncation_length}
        if self.nilpotency_bound is not None:
            out["nilpotency_bound"] = self.nilpotency_bound
        return out

    def with_truncation(self, length: int) -> "IdealPresentation":
        return IdealPresentation(self.ambient, self.generators, self.nilpotency_bound, length)

    @property
    def exact(self) -> bool:
        """Whether membership answers are exact rather than L-truncated."""
        return self.nilpotency_bound is not None

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.generators)

    @property
    def basis_length(self) -> int:
        # longest path that can be nonzero in the working space
        if self.nilpotency_bound is not None:
            return min(self.truncation_length, self.nilpotency_bound - 1)
        return self.truncation_length

    # the span of p.rho.q ------------------------------------------------------

    def _space(self, x: str) -> Tuple[Dict[Path, int], RowSpace]:
        hit = self._spaces.get(x)
        if hit is not None:
            return hit
        q = self.ambient
        top = self.basis_length
        index = {p: i for i, p in enumerate(q.paths_from(x, top))}
        space = RowSpace()
        prefixes: Dict[str, List[Path]] = {}
        for p in index:
            prefixes.setdefault(p.end, []).append(p)
        suffix_cache: Dict[str, List[Path]] = {}
        for g in self.generators:
            shortest = min(len(t) for t in g.paths)
            for pre in prefixes.get(g.source, []):
                if len(pre) + shortest > top:
                    continue
                room = top - len(pre) - shortest
                if g.target not in suffix_cache:
                    suffix_cache[g.target] = q.paths_from(g.target, top)
                for suf in suffix_cache[g.target]:
                    if len(suf) > room:
                        break
                    vec: Dict[int, Fraction] = {}
                    fits = True
                    for c, t in g.terms:
                        full = len(pre) + len(t) + len(suf)
                        if full > top:
                            if self.nilpotency_bound is not None:
                                continue  # a long path is zero
                            fits = False
                            break
                        vec[index[Path(x, suf.end, pre.arrows + t.arrows + suf.arrows)]] = c
                    if fits and vec:
                        space.add(vec)
        self._spaces[x] = (index, space)
        return index, space

    def _vector(self, combo: Mapping[Path, Fraction]) -> Tuple[Optional[str], Dict[int, Fraction]]:
        combo = {p: frac(c) for p, c in combo.items() if c != 0}
        if not combo:
            return None, {}
        starts = {p.start for p in combo}
        ends = {p.end for p in combo}
        if len(starts) != 1 or len(ends) != 1:
            raise InputError("combination paths are not parallel")
        x = starts.pop()
        for p in combo:
            if len(p) > self.truncation_length:
                raise InputError(f"path {p} exceeds truncation length {self.truncation_length}")
        index, _ = self._space(x)
        vec = {}
        for p, c in combo.items():
            if p not in index:
                # only possible for paths of length >= N, which are zero
                continue
            vec[index[p]] = c
        return x, vec

    def membership(self, combo) -> bool:
        """Whether a parallel combination lies in the (truncated) ideal."""
        if isinstance(combo, Relation):
            combo = combo.combination()
        x, vec = self._vector(combo)
        if x is None or not vec:
            return True
        return self._space(x)[1].contains(vec)

    def reduce(self, combo: Mapping[Path, Fraction]) -> Combination:
        """Normal form of a combination modulo the truncated ideal."""
        x, vec = self._vector(combo)
        if x is None or not vec:
            return {}
        index, space = self._space(x)
        paths = {i: p for p, i in index.items()}
        return {paths[i]: c for i, c in space.reduce(vec).items()}

    def quotient_dim(self, x: str, y: str) -> int:
        """``dim (kQ/I)(x, y)`` computed on paths of length at most the working bound."""
        index, space = self._space(x)
        total = sum(1 for p in index if p.end == y)
        paths = {i: p for p, i in index.items()}
        in_ideal = sum(1 for row in space.basis() if paths[min(row)].end == y)
        return total - in_ideal

    def path_is_zero(self, p: Path) -> bool:
        if self.nilpotency_bound is not None and len(p) >= self.nilpotency_bound:
            return True
        if len(p) > self.truncation_length:
            raise InputError(f"path {p} exceeds truncation length")
        return self.membership({p: Fraction(1)})

    # classification -------------------------------------------------------

    def classify_relation(self, rho: Relation, cap: int = SUBSET_CAP) -> str:
        if not self.membership(rho):
            return NOT_IN_IDEAL
        if len(rho.terms) == 1:
            return ZERO
        if len(rho.terms) > cap:
            raise Refusal(f"relation has {len(rho.terms)} terms, above the subset cap {cap}")
        if self._proper_subset_in_ideal(rho) is None:
            return MINIMAL
        return DECOMPOSABLE

    def _proper_subset_in_ideal(self, rho: Relation) -> Optional[Tuple[int, ...]]:
        n = len(rho.terms)
        for size in range(1, n):
            for idx in combinations(range(n), size):
                part = {rho.terms[i][1]: rho.terms[i][0] for i in idx}
                if self.membership(part):
                    return idx
        return None

    def minimal_generators(self, cap: int = SUBSET_CAP) -> List[Tuple[str, Relation]]:
        """Generators split into minimal and zero relations, in generator order."""
        out: List[Tuple[str, Relation]] = []
        for g in self.generators:
            out.extend(self._split(g, cap))
        return out

    def _split(self, rho: Relation, cap: int) -> List[Tuple[str, Relation]]:
        kind = self.classify_relation(rho, cap)
        if kind in (ZERO, MINIMAL):
            return [(kind, rho)]
        if kind == NOT_IN_IDEAL:
            raise InputError(f"generator {rho} is not in its own ideal")
        # smallest subset first, combinations() gives lexicographic tie-break
        idx = self._proper_subset_in_ideal(rho)
        part = Relation.from_terms(rho.terms[i] for i in idx)
        rest = Relation.from_terms(t for i, t in enumerate(rho.terms) if i not in idx)
        return self._split(part, cap) + self._split(rest, cap)

    def minimal_relations(self) -> List[Relation]:
        return [r for k, r in self.minimal_generators() if k == MINIMAL]

    def zero_relations(self) -> List[Relation]:
        return [r for k, r in self.minimal_generators() if k == ZERO]


def zero_ideal(q: Quiver, truncation_length: int = 2) -> IdealPresentation:
    return IdealPresentation(q, (), None, truncation_length)


def radical_square_ideal(q: Quiver) -> IdealPresentation:
    """All paths of length two are zero."""
    gens = []
    for a in q.arrows:
        for b in q.out_arrows(a.target):
            gens.append(Relation.from_terms([(1, q.path([a.id, b]))]))
    return IdealPresentation(q, gens, 2, 2)
