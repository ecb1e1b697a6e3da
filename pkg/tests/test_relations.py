from fractions import Fraction

import pytest

from fixtures import kronecker, riedtmann, three_vertex
from qcov.errors import InputError
from qcov.relations import DECOMPOSABLE, MINIMAL, ZERO, IdealPresentation, Relation, relation


def _combo(q, *terms):
    return {q.path(p): Fraction(c) for c, p in terms}


def test_membership_riedtmann():
    q, I = riedtmann(2)
    # beta.alpha^2 - beta.gamma.beta, written first-traversed-first
    cand = _combo(q, (1, ["alpha", "alpha", "beta"]), (-1, ["beta", "gamma", "beta"]))
    assert I.membership(cand)
    assert I.membership({})


def test_membership_by_brute_force_span():
    # independent check: dimension of span{u rho v} plus candidate
    import sympy

    q, I = riedtmann(2)
    paths = sorted({p for v in q.vertices for p in q.paths_from(v, 4)}, key=lambda p: p.key())
    idx = {p: i for i, p in enumerate(paths)}
    rows = []
    for rho in I.generators:
        for u in [p for w in q.vertices for p in q.paths_between(w, rho.source, 4)]:
            for v in [p for w in q.vertices for p in q.paths_between(rho.target, w, 4)]:
                row = [0] * len(paths)
                ok = True
                for c, p in rho.terms:
                    full = u.then(p).then(v)
                    if len(full) > 4:
                        ok = False
                        break
                    row[idx[full]] += c
                if ok:
                    rows.append(row)
    base = sympy.Matrix(rows).rank()
    for cand in (
        _combo(q, (1, ["alpha", "alpha", "beta"]), (-1, ["beta", "gamma", "beta"])),
        _combo(q, (1, ["alpha", "alpha"])),
        _combo(q, (1, ["alpha", "beta", "gamma"])),
        _combo(q, (1, ["alpha", "alpha", "alpha"]), (-1, ["beta", "gamma", "alpha"])),
    ):
        row = [0] * len(paths)
        for p, c in cand.items():
            row[idx[p]] += c
        expected = sympy.Matrix(rows + [row]).rank() == base
        assert I.membership(cand) == expected


def test_kronecker_zero_ideal():
    q, I = kronecker()
    assert not I.membership(_combo(q, (1, ["a"]), (-1, ["b"])))


def test_classification():
    _, _, two, tI, _ = three_vertex()
    a2b2 = relation(two, (1, ["a", "a"]), (-1, ["b", "b"]))
    assert tI.classify_relation(a2b2) == MINIMAL
    assert tI.classify_relation(relation(two, (1, ["a", "b"]))) == ZERO
    three = relation(two, (1, ["a", "a"]), (-1, ["b", "b"]), (1, ["a", "b"]))
    assert tI.classify_relation(three) == DECOMPOSABLE


def test_minimal_generators_riedtmann():
    q, I = riedtmann(2)
    kinds = [(k, str(r)) for k, r in I.minimal_generators()]
    assert [k for k, _ in kinds] == [MINIMAL, ZERO]
    assert IdealPresentation(q, (), 4, 4).minimal_generators() == []


def test_split_of_mixed_generator():
    _, _, two, tI, _ = three_vertex()
    g = relation(two, (1, ["a", "a"]), (-1, ["b", "b"]), (1, ["a", "b"]), (1, ["b", "a"]))
    ideal = IdealPresentation(two, [g, *tI.generators], 3, 4)
    parts = ideal._split(g, 20)
    kinds = sorted((k, frozenset(p.paths)) for k, p in parts)
    assert kinds == sorted(
        [
            (MINIMAL, frozenset([two.path(["a", "a"]), two.path(["b", "b"])])),
            (ZERO, frozenset([two.path(["a", "b"])])),
            (ZERO, frozenset([two.path(["b", "a"])])),
        ]
    )


def test_relation_json():
    q, I = riedtmann(2)
    r = I.generators[0]
    assert Relation.from_json(q, r.to_json()) == r
    with pytest.raises(InputError):
        Relation.from_json(q, {"terms": [{"coeff": "1"}]})
    with pytest.raises(InputError):
        relation(q, (1, ["alpha"]), (-1, ["alpha"]))


def test_non_parallel_relation_rejected():
    q, _ = riedtmann(2)
    with pytest.raises(InputError):
        relation(q, (1, ["alpha"]), (1, ["beta"]))


def test_quotient_dims_loop():
    from fixtures import loop_square_zero

    q, I = loop_square_zero()
    assert I.quotient_dim("x", "x") == 2
