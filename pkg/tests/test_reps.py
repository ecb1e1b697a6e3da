import random

import pytest

from fixtures import kronecker, kronecker_line, loop_line, loop_square_zero, random_rep, riedtmann
from oracles import hom_dim_sympy
from qcov.errors import InputError
from qcov.reps import (
    NO,
    YES,
    Representation,
    adjunction_check,
    are_isomorphic,
    conjugate,
    direct_sum,
    hom_basis,
    is_indecomposable,
    pull_up,
    push_down,
    simple,
)
from qcov.strings import band_module, enumerate_strings, string_module


def window(lo, hi):
    return [str(i) for i in range(lo, hi + 1)]


def test_loop_non_fullness():
    cover, cI, f = loop_line(-3, 3)
    base, I = loop_square_zero()
    M = simple(cover, "0", cI)
    N = simple(cover, "1", cI)
    assert len(hom_basis(M, N)) == 0
    FM, FN = push_down(f, M, I), push_down(f, N, I)
    assert FM.dims == {"x": 1} and FN.dims == {"x": 1}
    assert len(hom_basis(FM, FN)) == 1


def test_simple_endomorphisms():
    q, _ = kronecker()
    assert len(hom_basis(simple(q, "x"), simple(q, "x"))) == 1


def test_hom_dims_against_sympy():
    q, _ = kronecker()
    rng = random.Random(11)
    for _ in range(40):
        M = random_rep(q, q.vertices, rng, 2)
        N = random_rep(q, q.vertices, rng, 2)
        assert len(hom_basis(M, N)) == hom_dim_sympy(M, N)
    r, I = riedtmann(2)
    for _ in range(20):
        M = random_rep(r, r.vertices, rng, 2)
        N = random_rep(r, r.vertices, rng, 2)
        assert len(hom_basis(M, N)) == hom_dim_sympy(M, N)


def test_hom_basis_elements_intertwine():
    q, _ = kronecker()
    rng = random.Random(5)
    M = random_rep(q, q.vertices, rng, 3)
    for h in hom_basis(M, M):
        for a in q.arrows:
            s, t = a.source, a.target
            lhs = [[sum(h[s][i][k] * M.mats[a.id][k][j] for k in range(M.dims[s])) for j in range(M.dims[t])] for i in range(M.dims[s])]
            rhs = [[sum(M.mats[a.id][i][k] * h[t][k][j] for k in range(M.dims[t])) for j in range(M.dims[t])] for i in range(M.dims[s])]
            assert lhs == rhs


def test_isomorphism():
    q, I = kronecker()
    B = band_module(q, q.parse_walk("a,-b"), 2, 3)
    C = conjugate(B, {"x": [[1, 2], [0, 1]], "y": [[2, 1], [1, 1]]})
    assert C != B and are_isomorphic(B, C).iso
    assert are_isomorphic(B, B).iso
    assert not are_isomorphic(simple(q, "x"), simple(q, "y")).iso
    assert not are_isomorphic(B, band_module(q, q.parse_walk("a,-b"), 2, 2)).iso


def test_iso_of_decomposables():
    q, _ = kronecker()
    S, T = simple(q, "x"), simple(q, "y")
    assert are_isomorphic(direct_sum(S, T), direct_sum(T, S)).iso
    P = string_module(q, q.parse_walk("a"))
    assert not are_isomorphic(P, direct_sum(S, T)).iso


def test_indecomposable():
    q, _ = kronecker()
    B = band_module(q, q.parse_walk("a,-b"), 2, 3)
    assert is_indecomposable(B).verdict == YES
    res = is_indecomposable(direct_sum(simple(q, "x"), simple(q, "x")))
    assert res.verdict == NO and res.splitting is not None
    assert is_indecomposable(Representation(q, {})).verdict == NO


def test_pushdown_of_string_lines_indecomposable():
    base, I = kronecker()
    cover, f = kronecker_line(-6, 6)
    strings = [w for w in enumerate_strings(base, I, 3) if w.steps]
    from qcov.strings import line_module, string_line

    for w in strings:
        anchor = "0" if w.start == "x" else "1"
        M = line_module(string_line(f, w, anchor))
        assert is_indecomposable(push_down(f, M)).verdict == YES
    # all distinct strings give pairwise non-isomorphic modules
    mods = [string_module(base, w) for w in enumerate_strings(base, I, 3)]
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            assert not are_isomorphic(mods[i], mods[j]).iso


def test_pushdown_kronecker_window():
    base, I = kronecker()
    cover, f = kronecker_line(-4, 4)
    N = direct_sum(*[simple(cover, v) for v in ["-4", "-2", "0", "2", "4"]])
    FN = push_down(f, N)
    assert FN.dims == {"x": 5, "y": 0}
    assert are_isomorphic(FN, direct_sum(*[simple(base, "x")] * 5)).iso
    Z = Representation(cover, {})
    assert push_down(f, Z).total_dim == 0


def test_pullup_alternates():
    base, I = kronecker()
    cover, f = kronecker_line(-4, 4)
    V = Representation(base, {"x": 1, "y": 1}, {"a": [[1]], "b": [[0]]})
    P = pull_up(f, V, window(-4, 4))
    assert all(P.rep.dims[v] == 1 for v in window(-4, 4))
    for a in cover.arrows:
        assert [list(r) for r in P.rep.mats[a.id]] == ([[1]] if a.id.startswith("a") else [[0]])
    assert pull_up(f, Representation(base, {}), window(-4, 4)).rep.total_dim == 0


def test_pull_then_push_fundamental_domain():
    base, I = kronecker()
    cover, f = kronecker_line(-4, 4)
    V = Representation(base, {"x": 1, "y": 1}, {"a": [[1]], "b": [[0]]})
    # b leaves the domain {0, 1}; this only works because V_b = 0
    P = pull_up(f, V, ["0", "1"])
    assert are_isomorphic(push_down(f, P.rep), V).iso


def test_adjunction():
    base, I = kronecker()
    cover, f = kronecker_line(-6, 6)
    rng = random.Random(2)
    for _ in range(5):
        V = random_rep(base, base.vertices, rng, 2)
        M = random_rep(cover, window(-2, 2), rng, 1)
        res = adjunction_check(f, M, V, window(-5, 5))
        assert res["complete"] and res["equal"]
    small = adjunction_check(f, M, V, window(-2, 2))
    assert not small["complete"]


def test_check_relations():
    base, I = loop_square_zero()
    nil = Representation(base, {"x": 2}, {"alpha": [[0, 1], [0, 0]]}, I)
    assert nil.check()[0]
    worse = Representation(base, {"x": 1}, {"alpha": [[1]]}, I)
    ok, rel = worse.check()
    assert not ok and rel


def test_representation_json_errors():
    q, _ = kronecker()
    with pytest.raises(InputError):
        Representation.from_json(q, {"mats": {}})
    with pytest.raises(InputError):
        Representation.from_json(q, {"dims": {"x": 1, "y": 1}, "mats": {"a": [[1, 2]]}})
    with pytest.raises(InputError):
        Representation.from_json(q, {"dims": {"z": 1}})
    with pytest.raises(InputError):
        Representation.from_json(q, {"dims": {"x": "1"}})
    M = Representation(q, {"x": 1, "y": 1}, {"a": [["1/2"]]})
    assert Representation.from_json(q, M.to_json()) == M
