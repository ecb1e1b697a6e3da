"""Representations of bound quivers and the push-down / pull-up functors.

Representations are contravariant: an arrow ``a: s -> t`` carries a map
``V_t -> V_s``, stored as a ``dim(s) x dim(t)`` matrix.  A path
``a1, ..., an`` (first traversed first) therefore acts by the product
``M_a1 M_a2 ... M_an``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from . import linalg as la
from .errors import InputError, Refusal
from .linalg import Matrix
from .quiver import Path, Quiver, QuiverMorphism, is_quiver_covering
from .relations import IdealPresentation

DIM_CAP = 64
RANDOM_TRIALS = 64
GRID_CAP = 200_000

YES = "yes"
NO = "no"
UNRESOLVED = "unresolved"


def mm(a: Matrix, b: Matrix, r: int, k: int, c: int) -> Matrix:
    if k == 0 or r == 0 or c == 0:
        return la.zeros(r, c)
    return la.mul(a, b)


def _zero_shape(r: int, c: int) -> Matrix:
    return la.zeros(r, c)


class Representation:
    def __init__(
        self,
        quiver: Quiver,
        dims: Mapping[str, int],
        mats: Mapping[str, Sequence[Sequence]] = (),
        ideal: Optional[IdealPresentation] = None,
    ):
        self.quiver = quiver
        self.ideal = ideal
        for v in dims:
            if not quiver.has_vertex(v):
                raise InputError(f"dimension given for unknown vertex {v!r}")
        self.dims: Dict[str, int] = {v: int(dims.get(v, 0)) for v in quiver.vertices}
        if any(d < 0 for d in self.dims.values()):
            raise InputError("negative dimension")
        mats = dict(mats)
        for a in mats:
            if not quiver.has_arrow(a):
                raise InputError(f"matrix given for unknown arrow {a!r}")
        self.mats: Dict[str, Matrix] = {}
        for a in quiver.arrows:
            r, c = self.dims[a.source], self.dims[a.target]
            if a.id in mats and r and c:
                m = la.matrix(mats[a.id])
                if la.shape(m) != (r, c):
                    raise InputError(f"matrix of {a.id!r} has shape {la.shape(m)}, expected {(r, c)}")
            else:
                if a.id in mats and _nonempty(mats[a.id]) and not (r and c):
                    raise InputError(f"matrix of {a.id!r} must be empty")
                m = _zero_shape(r, c)
            self.mats[a.id] = m

    # basics -----------------------------------------------------------------

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    @property
    def support(self) -> List[str]:
        return [v for v in self.quiver.vertices if self.dims[v]]

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def path_map(self, p: Path) -> Matrix:
        cur = la.identity(self.dims[p.start])
        rows = self.dims[p.start]
        for a in p.arrows:
            arr = self.quiver.arrow(a)
            cur = mm(cur, self.mats[a], rows, self.dims[arr.source], self.dims[arr.target])
        return cur

    def check(self) -> Tuple[bool, Optional[str]]:
        """Whether every ideal generator acts by zero; returns a violating relation."""
        if self.ideal is None:
            return True, None
        for rho in self.ideal.generators:
            r, c = self.dims[rho.source], self.dims[rho.target]
            acc = la.zeros(r, c)
            for coeff, p in rho.terms:
                acc = la.add(acc, la.scale(coeff, self.path_map(p)))
            if not la.is_zero(acc):
                return False, str(rho)
        return True, None

    def __eq__(self, other) -> bool:
        return isinstance(other, Representation) and self.quiver == other.quiver and self.dims == other.dims and self.mats == other.mats

    def __repr__(self) -> str:
        return f"Representation(dims={ {v: d for v, d in self.dims.items() if d} })"

    def restrict(self, vertices: Iterable[str]) -> "Representation":
        keep = set(vertices)
        sub = self.quiver.full_subquiver(keep)
        return Representation(sub, {v: self.dims[v] for v in sub.vertices}, {a: self.mats[a] for a in sub.arrow_ids})

    # serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dims": dict(self.dims),
            "mats": {a: [[la.format_frac(x) for x in row] for row in m] for a, m in self.mats.items() if m and m[0]},
        }

    @classmethod
    def from_json(cls, q: Quiver, data: Mapping, ideal: Optional[IdealPresentation] = None) -> "Representation":
        try:
            dims = data["dims"]
            mats = data.get("mats", {})
        except (KeyError, TypeError) as exc:
            raise InputError(f"representation JSON: missing field {exc}") from None
        if not isinstance(dims, dict) or not isinstance(mats, dict):
            raise InputError("representation JSON: 'dims' and 'mats' must be objects")
        for v, d in dims.items():
            if not isinstance(d, int) or isinstance(d, bool):
                raise InputError(f"representation JSON: dimension at {v!r} must be an integer")
        try:
            return cls(q, dims, mats, ideal)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"representation JSON: {exc}") from None


def _nonempty(m) -> bool:
    return any(len(row) for row in m)


def simple(q: Quiver, v: str, ideal: Optional[IdealPresentation] = None) -> Representation:
    return Representation(q, {v: 1}, {}, ideal)


def direct_sum(*reps: Representation) -> Representation:
    q = reps[0].quiver
    dims = {v: sum(r.dims[v] for r in reps) for v in q.vertices}
    mats = {}
    for a in q.arrows:
        mats[a.id] = la.block_diag([(r.mats[a.id], r.dims[a.source], r.dims[a.target]) for r in reps])
    return Representation(q, dims, mats, reps[0].ideal)


def conjugate(M: Representation, change: Mapping[str, Matrix]) -> Representation:
    """``P_s M_a P_t^-1``: an isomorphic copy under invertible base changes."""
    q = M.quiver
    change = {v: la.matrix(m) for v, m in change.items()}
    inv = {v: la.inverse(change[v]) if M.dims[v] else () for v in q.vertices}
    mats = {}
    for a in q.arrows:
        s, t = a.source, a.target
        ds, dt = M.dims[s], M.dims[t]
        mats[a.id] = mm(mm(change[s] if ds else (), M.mats[a.id], ds, ds, dt), inv[t], ds, dt, dt)
    return Representation(q, M.dims, mats, M.ideal)


# hom spaces ------------------------------------------------------------------


Hom = Dict[str, Matrix]


def _hom_layout(M: Representation, N: Representation):
    offsets = {}
    n = 0
    for v in M.quiver.vertices:
        offsets[v] = n
        n += N.dims[v] * M.dims[v]
    return offsets, n


def hom_basis(M: Representation, N: Representation) -> List[Hom]:
    """Basis of ``Hom(M, N)``: families ``f_v: M_v -> N_v`` with ``f_s M_a = N_a f_t``."""
    if M.quiver != N.quiver:
        raise InputError("representations live on different quivers")
    q = M.quiver
    offsets, n = _hom_layout(M, N)
    rows: List[List[Fraction]] = []
    zero = Fraction(0)
    for a in q.arrows:
        s, t = a.source, a.target
        ms, mt, ns, nt = M.dims[s], M.dims[t], N.dims[s], N.dims[t]
        if not (ns and mt):
            continue
        Ma, Na = M.mats[a.id], N.mats[a.id]
        for i in range(ns):
            for j in range(mt):
                row = [zero] * n
                # (f_s M_a)_{ij} = sum_k f_s[i][k] M_a[k][j]
                for k in range(ms):
                    if Ma[k][j]:
                        row[offsets[s] + i * ms + k] += Ma[k][j]
                # (N_a f_t)_{ij} = sum_k N_a[i][k] f_t[k][j]
                for k in range(nt):
                    if Na[i][k]:
                        row[offsets[t] + k * mt + j] -= Na[i][k]
                if any(row):
                    rows.append(row)
    basis = la.nullspace(rows, n) if n else []
    out = []
    for vec in basis:
        h: Hom = {}
        for v in q.vertices:
            r, c = N.dims[v], M.dims[v]
            o = offsets[v]
            h[v] = tuple(tuple(vec[o + i * c + j] for j in range(c)) for i in range(r))
        out.append(h)
    return out


def compose(g: Hom, f: Hom, L: Representation, M: Representation, N: Representation) -> Hom:
    """``g ∘ f`` for ``f: L -> M`` and ``g: M -> N``."""
    return {v: mm(g[v], f[v], N.dims[v], M.dims[v], L.dims[v]) for v in L.quiver.vertices}


def combination(coeffs: Sequence[Fraction], basis: Sequence[Hom], M: Representation, N: Representation) -> Hom:
    out: Hom = {}
    for v in M.quiver.vertices:
        acc = la.zeros(N.dims[v], M.dims[v])
        for c, h in zip(coeffs, basis):
            if c:
                acc = la.add(acc, la.scale(Fraction(c), h[v]))
        out[v] = acc
    return out


def hom_trace(h: Hom) -> Fraction:
    return sum((la.trace(m) for m in h.values() if m), Fraction(0))


def is_invertible(h: Hom, M: Representation) -> bool:
    return all(la.det(h[v]) != 0 for v in M.quiver.vertices if M.dims[v])


def _as_block(h: Hom, M: Representation) -> Matrix:
    return la.block_diag([(h[v], M.dims[v], M.dims[v]) for v in M.quiver.vertices if M.dims[v]])


# isomorphism -------------------------------------------------------------------


@dataclass
class IsoResult:
    iso: bool
    method: str
    witness: Optional[Hom] = None
    seed: Optional[int] = None

    def __bool__(self) -> bool:
        return self.iso


def are_isomorphic(M: Representation, N: Representation, seed: int = 0, cap: int = DIM_CAP) -> IsoResult:
    if M.dims != N.dims:
        return IsoResult(False, "dimension vectors differ")
    if M.total_dim > cap:
        raise Refusal(f"total dimension {M.total_dim} exceeds the cap {cap}")
    if M.total_dim == 0:
        return IsoResult(True, "zero", {v: () for v in M.quiver.vertices})
    hmn = hom_basis(M, N)
    hnm = hom_basis(N, M)
    em, en = len(hom_basis(M, M)), len(hom_basis(N, N))
    if not (len(hmn) == len(hnm) == em == en):
        return IsoResult(False, "hom dimensions differ")
    for h in hmn:
        if is_invertible(h, M):
            return IsoResult(True, "basis element", h)
    rng = random.Random(seed)
    for _ in range(RANDOM_TRIALS):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in hmn]
        h = combination(coeffs, hmn, M, N)
        if is_invertible(h, M):
            return IsoResult(True, "random combination", h, seed)
    if is_indecomposable(M).verdict == YES and is_indecomposable(N).verdict == YES:
        # local endomorphism rings: iso iff some composite N -> M -> N has nonzero trace
        for h in hmn:
            for g in hnm:
                if hom_trace(compose(g, h, M, N, M)) != 0:
                    return IsoResult(True, "trace test")
        return IsoResult(False, "trace test")
    return _grid_certificate(M, hmn)


def _grid_certificate(M: Representation, hmn: List[Hom]) -> IsoResult:
    # det of a generic combination is a polynomial of degree total_dim in len(hmn) variables;
    # vanishing on a (deg+1)^d grid means it is identically zero
    deg = M.total_dim
    d = len(hmn)
    if (deg + 1) ** d > GRID_CAP:
        raise Refusal("isomorphism undecided: determinant grid too large")
    for point in product(range(deg + 1), repeat=d):
        h = combination([Fraction(x) for x in point], hmn, M, M)
        if is_invertible(h, M):
            return IsoResult(True, "grid", h)
    return IsoResult(False, "determinant vanishes on grid")


# indecomposability --------------------------------------------------------------------


@dataclass
class IndecResult:
    verdict: str
    splitting: Optional[Tuple[Dict[str, Matrix], Dict[str, Matrix]]] = None
    end_dim: int = 0

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "end_dim": self.end_dim}
        if self.splitting is not None:
            out["splitting_dims"] = [
                {v: len(b) for v, b in part.items() if len(b)} for part in self.splitting
            ]
        return out


def is_indecomposable(M: Representation, seed: int = 0, cap: int = DIM_CAP) -> IndecResult:
    """Exact test over the algebraic closure.

    M is indecomposable iff it is nonzero and the traceless endomorphisms
    generate a nilpotent algebra (then End M is local).  For a decomposable M
    a rational splitting is returned when a Fitting decomposition is found.
    """
    if M.total_dim == 0:
        return IndecResult(NO, None, 0)
    if M.total_dim > cap:
        raise Refusal(f"total dimension {M.total_dim} exceeds the cap {cap}")
    end = hom_basis(M, M)
    if len(end) == 1:
        return IndecResult(YES, None, 1)
    n = M.total_dim
    blocks = [_as_block(h, M) for h in end]
    ident = la.identity(n)
    traceless = [la.sub(b, la.scale(la.trace(b) / n, ident)) for b in blocks]
    if _generates_nilpotent(traceless, n):
        return IndecResult(YES, None, len(end))
    return IndecResult(NO, _fitting_split(M, end, seed), len(end))


def _flatten(m: Matrix) -> Dict[int, Fraction]:
    n = len(m)
    return {i * n + j: x for i, row in enumerate(m) for j, x in enumerate(row) if x}


def _unflatten(v: Dict[int, Fraction], n: int) -> Matrix:
    return tuple(tuple(v.get(i * n + j, Fraction(0)) for j in range(n)) for i in range(n))


def _generates_nilpotent(gens: List[Matrix], n: int) -> bool:
    space = la.RowSpace()
    for g in gens:
        space.add(_flatten(g))
    current = [_unflatten(v, n) for v in space.basis()]
    for _ in range(n + 1):
        if not current:
            return True
        nxt = la.RowSpace()
        for a in current:
            for b in gens:
                nxt.add(_flatten(la.mul(a, b)))
        if len(nxt) >= len(current):
            # the chain of products stopped shrinking before reaching zero
            return len(nxt) == 0
        current = [_unflatten(v, n) for v in nxt.basis()]
    return not current


def _fitting_split(M: Representation, end: List[Hom], seed: int):
    rng = random.Random(seed)
    t = sympy.Symbol("t")
    candidates = list(end) + [
        combination([Fraction(rng.randint(-9, 9)) for _ in end], end, M, M) for _ in range(RANDOM_TRIALS)
    ]
    for h in candidates:
        block = _as_block(h, M)
        coeffs = la.charpoly(block)
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], t)
        factors = sympy.factor_list(poly)[1]
        if len(factors) < 2:
            continue
        (f1, e1), rest = factors[0], factors[1:]
        p1 = sympy.Poly(f1, t) ** e1
        p2 = sympy.Poly(1, t)
        for f, e in rest:
            p2 = p2 * sympy.Poly(f, t) ** e
        parts = []
        for p in (p1, p2):
            cs = [Fraction(int(c.p), int(c.q)) for c in p.all_coeffs()]
            parts.append(_generalized_kernel(M, h, cs))
        return tuple(parts)
    return None


def _generalized_kernel(M: Representation, h: Hom, coeffs: List[Fraction]) -> Dict[str, Matrix]:
    out = {}
    for v in M.quiver.vertices:
        d = M.dims[v]
        if not d:
            out[v] = ()
            continue
        pv = la.poly_eval_matrix(coeffs, h[v])
        pv = la.power(pv, d)
        out[v] = tuple(tuple(x) for x in la.nullspace(pv, d))
    return out


# translates and the covering functors -----------------------------------------------------


def translate(M: Representation, vertex_map: Mapping[str, str], arrow_map: Mapping[str, str]) -> Representation:
    """``(^g M)_{g y} = M_y`` for a (partial) automorphism ``g`` defined on the support."""
    q = M.quiver
    dims: Dict[str, int] = {}
    for v in M.support:
        if v not in vertex_map:
            raise InputError(f"translation undefined at support vertex {v!r}")
        dims[vertex_map[v]] = M.dims[v]
    mats = {}
    for a in q.arrows:
        if M.dims[a.source] and M.dims[a.target]:
            if a.id not in arrow_map:
                raise InputError(f"translation undefined at arrow {a.id!r}")
            mats[arrow_map[a.id]] = M.mats[a.id]
    return Representation(q, dims, mats, M.ideal)


def push_down(f: QuiverMorphism, M: Representation, ideal: Optional[IdealPresentation] = None) -> Representation:
    """Fibre sums; blocks follow the lexicographic order of cover vertex ids."""
    cover, base = f.source, f.target
    if M.quiver != cover:
        raise InputError("representation does not live on the cover")
    blocks: Dict[str, List[str]] = {v: [] for v in base.vertices}
    for x in M.support:
        blocks[f.vertex_map[x]].append(x)
    offset: Dict[str, int] = {}
    dims: Dict[str, int] = {}
    for v, xs in blocks.items():
        o = 0
        for x in sorted(xs):
            offset[x] = o
            o += M.dims[x]
        dims[v] = o
    mats: Dict[str, List[List[Fraction]]] = {
        a.id: [[Fraction(0)] * dims[a.target] for _ in range(dims[a.source])] for a in base.arrows
    }
    for a in cover.arrows:
        s, t = a.source, a.target
        if not (M.dims[s] and M.dims[t]):
            continue
        target = mats[f.arrow_map[a.id]]
        blk = M.mats[a.id]
        for i in range(M.dims[s]):
            for j in range(M.dims[t]):
                target[offset[s] + i][offset[t] + j] = blk[i][j]
    return Representation(base, dims, mats, ideal)


@dataclass
class PullUp:
    rep: Representation
    windowed: bool
    window: List[str]
    note: str = ""


def pull_up(f: QuiverMorphism, V: Representation, window: Optional[Iterable[str]] = None, ideal=None) -> PullUp:
    cover = f.source
    window = sorted(cover.vertices if window is None else set(window))
    for x in window:
        if not cover.has_vertex(x):
            raise InputError(f"window vertex {x!r} is not in the cover")
    win = set(window)
    dims = {x: V.dims[f.vertex_map[x]] for x in window}
    mats = {
        a.id: V.mats[f.arrow_map[a.id]]
        for a in cover.arrows
        if a.source in win and a.target in win
    }
    full = Representation(cover, dims, mats, ideal)
    note = "pull-up of a module is infinite-dimensional on an infinite cover; only the window is materialised"
    return PullUp(full, True, window, note)


def adjunction_check(f: QuiverMorphism, M: Representation, V: Representation, window: Optional[Iterable[str]] = None) -> dict:
    cover = f.source
    window = set(cover.vertices if window is None else window)
    # Hom(M, F.V) sees F.V on supp M and on the neighbours of supp M
    supp = set(M.support)
    need = set(supp)
    for a in cover.arrows:
        if a.source in supp or a.target in supp:
            need.update((a.source, a.target))
    # the support stars must also be complete in the (possibly truncated) cover
    stars_ok = is_quiver_covering(f, supp).ok
    complete = need <= window and stars_ok
    left = len(hom_basis(push_down(f, M), V))
    right = len(hom_basis(M, pull_up(f, V, window).rep))
    return {"hom_pushdown": left, "hom_pullup": right, "equal": left == right, "complete": complete}
