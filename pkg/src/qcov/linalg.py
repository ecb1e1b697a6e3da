"""Exact linear algebra over the rationals.

Matrices are row-major tuples of tuples of :class:`fractions.Fraction`.
Everything here is small dense Gaussian elimination; the sizes that occur in
covering computations (hom spaces of desk-scale representations, truncated
path spaces) never justify anything fancier.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Matrix = Tuple[Tuple[Fraction, ...], ...]
Vector = Dict[int, Fraction]


def frac(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, ints or Fractions into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"not an exact scalar: {value!r}")


def format_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix(rows: Iterable[Iterable], ncols: Optional[int] = None) -> Matrix:
    out = tuple(tuple(frac(v) for v in row) for row in rows)
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    if ncols is not None and out and len(out[0]) != ncols:
        raise ValueError("column count mismatch")
    return out


def zeros(m: int, n: int) -> Matrix:
    z = Fraction(0)
    return tuple(tuple(z for _ in range(n)) for _ in range(m))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def shape(a: Matrix, ncols: int = 0) -> Tuple[int, int]:
    # an m x 0 matrix has no way to remember its width, callers pass it
    return (len(a), len(a[0]) if a else ncols)


def mul(a: Matrix, b: Matrix, inner: Optional[int] = None, ncols: Optional[int] = None) -> Matrix:
    """Product ``a @ b``; ``ncols`` is needed only when ``b`` has no rows."""
    k = len(b) if inner is None else inner
    n = len(b[0]) if b else (ncols or 0)
    if a and len(a[0]) != k:
        raise ValueError(f"shape mismatch {len(a[0])} vs {k}")
    cols = list(zip(*b)) if b else [()] * n
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a
    )


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def scale(c: Fraction, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


def transpose(a: Matrix, ncols: int = 0) -> Matrix:
    if not a:
        return tuple(() for _ in range(ncols))
    return tuple(zip(*a))


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def block_diag(blocks: Sequence[Tuple[Matrix, int, int]]) -> Matrix:
    """Block diagonal matrix from ``(block, rows, cols)`` triples."""
    m = sum(r for _, r, _ in blocks)
    n = sum(c for _, _, c in blocks)
    out = [[Fraction(0)] * n for _ in range(m)]
    r0 = c0 = 0
    for blk, r, c in blocks:
        for i in range(r):
            for j in range(c):
                out[r0 + i][c0 + j] = blk[i][j]
        r0 += r
        c0 += c
    return tuple(tuple(row) for row in out)


def rref(a: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in a]
    n = len(rows[0]) if rows else (ncols or 0)
    pivots: List[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(a: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(a)[1])


def nullspace(a: Sequence[Sequence[Fraction]], ncols: int) -> List[List[Fraction]]:
    """Basis of ``{x : a x = 0}`` as a list of vectors of length ``ncols``."""
    reduced, pivots = rref(a, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + list(e) for row, e in zip(a, identity(n))]
    reduced, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return tuple(tuple(row[n:]) for row in reduced)


def det(a: Matrix) -> Fraction:
    rows = [list(r) for r in a]
    n = len(rows)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        d *= rows[c][c]
        inv = 1 / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return d


def power(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = mul(out, a)
    return out


def is_nilpotent(a: Matrix) -> bool:
    n = len(a)
    return n == 0 or is_zero(power(a, n))


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def charpoly(a: Matrix) -> List[Fraction]:
    """Coefficients of ``det(tI - a)``, highest degree first (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [Fraction(1)]
    m = zeros(n, n)
    ident = identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = add(mul(a, m), scale(c, ident)) if n else m
        am = mul(a, m)
        c = -trace(am) / k
        coeffs.append(c)
    return coeffs


def poly_eval_matrix(coeffs: Sequence[Fraction], a: Matrix) -> Matrix:
    """Horner evaluation of a polynomial (highest degree first) at a matrix."""
    n = len(a)
    out = zeros(n, n)
    ident = identity(n)
    for c in coeffs:
        out = add(mul(out, a), scale(c, ident))
    return out


class RowSpace:
    """Incrementally maintained echelon basis of a subspace of ``Q^n``.

    Vectors are sparse ``{index: value}`` dicts.  ``add`` returns whether the
    vector enlarged the span, ``contains`` tests membership exactly.
    """

    def __init__(self) -> None:
        self._rows: Dict[int, Vector] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Vector) -> Vector:
        # rows are kept in reduced echelon form, so one pass over pivots suffices
        v = {k: x for k, x in vec.items() if x != 0}
        for p, row in self._rows.items():
            f = v.get(p)
            if not f:
                continue
            for k, x in row.items():
                nv = v.get(k, Fraction(0)) - f * x
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv
        return v

    def add(self, vec: Vector) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        inv = 1 / v[lead]
        row = {k: x * inv for k, x in v.items()}
        # keep rows fully reduced against the new pivot
        for p, other in self._rows.items():
            f = other.get(lead)
            if f:
                for k, x in row.items():
                    nv = other.get(k, Fraction(0)) - f * x
                    if nv == 0:
                        other.pop(k, None)
                    else:
                        other[k] = nv
        self._rows[lead] = row
        return True

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def basis(self) -> List[Vector]:
        return [dict(self._rows[k]) for k in sorted(self._rows)]
