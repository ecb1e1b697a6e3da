"""Bound quivers used across the test suite."""

from __future__ import annotations

from qcov.quiver import Quiver, QuiverMorphism
from qcov.relations import IdealPresentation, Relation, relation


def kronecker():
    q = Quiver(["x", "y"], [("a", "y", "x"), ("b", "y", "x")])
    return q, IdealPresentation(q, (), None, 4)


def kronecker_line(lo: int, hi: int):
    """Finite piece of the zigzag cover: odd vertices lie over y, even over x."""
    verts = [str(i) for i in range(lo, hi + 1)]
    arrows = []
    vmap, amap = {}, {}
    for i in range(lo, hi + 1):
        vmap[str(i)] = "y" if i % 2 else "x"
        if i % 2:
            if i - 1 >= lo:
                arrows.append((f"a{i}", str(i), str(i - 1)))
                amap[f"a{i}"] = "a"
            if i + 1 <= hi:
                arrows.append((f"b{i}", str(i), str(i + 1)))
                amap[f"b{i}"] = "b"
    cover = Quiver(verts, arrows)
    base, _ = kronecker()
    return cover, QuiverMorphism(cover, base, vmap, amap)


def three_vertex():
    """Three vertices, each with two arrows in and two out."""
    q = Quiver(
        ["x", "y", "z"],
        [
            ("a_x", "x", "x"),
            ("b_xy", "x", "y"),
            ("b_yx", "y", "x"),
            ("a_yz", "y", "z"),
            ("a_zy", "z", "y"),
            ("b_z", "z", "z"),
        ],
    )
    two = Quiver(["v"], [("a", "v", "v"), ("b", "v", "v")])
    f = QuiverMorphism(
        q,
        two,
        {"x": "v", "y": "v", "z": "v"},
        {"a_x": "a", "a_yz": "a", "a_zy": "a", "b_xy": "b", "b_yx": "b", "b_z": "b"},
    )
    target = IdealPresentation(
        two,
        [
            relation(two, (1, ["a", "a"]), (-1, ["b", "b"])),
            relation(two, (1, ["b", "a"])),
            relation(two, (1, ["a", "b"])),
        ],
        3,
        4,
    )
    # every lift of the target generators
    from qcov.quiver import lift_path

    gens = []
    for g in target.generators:
        for v in q.vertices:
            gens.append(Relation.from_terms((c, lift_path(f, p, v)) for c, p in g.terms))
    source = IdealPresentation(q, gens, 3, 4)
    return q, source, two, target, f


def riedtmann(which: int = 2):
    q = Quiver(["1", "2"], [("alpha", "1", "1"), ("beta", "1", "2"), ("gamma", "2", "1")])
    if which == 2:
        gens = [
            relation(q, (1, ["alpha", "alpha"]), (-1, ["beta", "gamma"])),
            relation(q, (1, ["gamma", "beta"])),
        ]
        return q, IdealPresentation(q, gens, 4)
    gens = [
        relation(q, (1, ["alpha", "alpha"]), (-1, ["beta", "gamma"])),
        relation(q, (1, ["gamma", "beta"]), (-1, ["gamma", "alpha", "beta"])),
        relation(q, (1, ["alpha"] * 4)),
    ]
    return q, IdealPresentation(q, gens, 4)


def ladder(cols: int):
    """Columns 0..cols of the two-row cover of the Riedtmann quiver for the second ideal."""
    verts = [f"{r}:{c}" for r in (0, 1) for c in range(cols + 1)]
    arrows = []
    vmap, amap = {}, {}
    for r in (0, 1):
        for c in range(cols + 1):
            one = (r + c) % 2 == 1
            v = f"{r}:{c}"
            vmap[v] = "1" if one else "2"
            if c == cols:
                continue
            if one:
                arrows.append((f"beta@{v}", v, f"{r}:{c + 1}"))
                amap[f"beta@{v}"] = "beta"
                arrows.append((f"alpha@{v}", v, f"{1 - r}:{c + 1}"))
                amap[f"alpha@{v}"] = "alpha"
            else:
                arrows.append((f"gamma@{v}", v, f"{r}:{c + 1}"))
                amap[f"gamma@{v}"] = "gamma"
    cover = Quiver(verts, arrows)
    base, _ = riedtmann(2)
    return cover, QuiverMorphism(cover, base, vmap, amap)


def square(which: int):
    q = Quiver(
        ["b", "t", "x", "y"],
        [("alpha1", "x", "t"), ("alpha2", "t", "y"), ("alpha3", "x", "b"), ("alpha4", "b", "y")],
    )
    if which == 1:
        gens = [relation(q, (1, ["alpha1", "alpha2"]))]
    else:
        gens = [relation(q, (1, ["alpha1", "alpha2"]), (-1, ["alpha3", "alpha4"]))]
    return q, IdealPresentation(q, gens, 3, 4)


def loop_square_zero():
    q = Quiver(["x"], [("alpha", "x", "x")])
    return q, IdealPresentation(q, [relation(q, (1, ["alpha", "alpha"]))], 2, 2)


def loop_line(lo: int, hi: int):
    """Segment of the line cover of the loop with square-zero relation."""
    verts = [str(i) for i in range(lo, hi + 1)]
    arrows = [(f"t{i}", str(i), str(i + 1)) for i in range(lo, hi)]
    cover = Quiver(verts, arrows)
    base, ideal = loop_square_zero()
    f = QuiverMorphism(cover, base, {v: "x" for v in verts}, {a[0]: "alpha" for a in arrows})
    gens = [relation(cover, (1, [f"t{i}", f"t{i + 1}"])) for i in range(lo, hi - 1)]
    return cover, IdealPresentation(cover, gens, 2, 2), f


def six():
    """Six-vertex quiver with an order-two flip exchanging the rows."""
    q = Quiver(
        ["B0", "B1", "B2", "T0", "T1", "T2"],
        [
            ("a_T0", "T0", "T1"),
            ("a_T1", "T1", "T2"),
            ("a_B0", "B0", "B1"),
            ("a_B1", "B1", "B2"),
            ("b_B0", "B0", "T1"),
            ("b_T0", "T0", "B1"),
            ("b_B1", "B1", "T2"),
            ("b_T1", "T1", "B2"),
        ],
    )
    gens = [
        relation(q, (1, ["a_T0", "a_T1"]), (-1, ["b_T0", "b_B1"])),
        relation(q, (1, ["b_T0", "a_B1"]), (-1, ["a_T0", "b_T1"])),
        relation(q, (1, ["a_B0", "a_B1"]), (-1, ["b_B0", "b_T1"])),
        relation(q, (1, ["b_B0", "a_T1"]), (-1, ["a_B0", "b_B1"])),
    ]
    flip = QuiverMorphism(
        q,
        q,
        {"B0": "T0", "B1": "T1", "B2": "T2", "T0": "B0", "T1": "B1", "T2": "B2"},
        {
            "a_T0": "a_B0",
            "a_B0": "a_T0",
            "a_T1": "a_B1",
            "a_B1": "a_T1",
            "b_B0": "b_T0",
            "b_T0": "b_B0",
            "b_B1": "b_T1",
            "b_T1": "b_B1",
        },
    )
    return q, IdealPresentation(q, gens, 3, 4), flip


def a2():
    q = Quiver(["1", "2"], [("a", "1", "2")])
    return q, IdealPresentation(q, (), None, 2)


def random_rep(q, vertices, rng, max_dim=2, ideal=None, density=0.7):
    """Random representation supported on ``vertices`` with small integer entries."""
    from qcov.reps import Representation

    keep = set(vertices)
    dims = {v: rng.randint(1, max_dim) for v in sorted(keep)}
    mats = {}
    for a in q.arrows:
        if a.source in keep and a.target in keep:
            mats[a.id] = [
                [rng.choice((0, 1, 2, -1)) if rng.random() < density else 0 for _ in range(dims[a.target])]
                for _ in range(dims[a.source])
            ]
    return Representation(q, dims, mats, ideal)
