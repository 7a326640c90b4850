"""Polytope kernel tests: hulls, intersections, differences, gauge, symmetry.

Oracles used here and nowhere else:
* brute-force facet enumeration (all vertex triples, one-side test);
* hand-derived volumes (parallelepiped determinants, octahedron 4/3);
* Monte-Carlo membership agreement between subtract() cells and contains().
"""

from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from latcov.arith import Interval, Vec3, sign, vec
from latcov.geom import (
    CellComplex,
    HalfSpace,
    Polytope,
    SignedPermutation,
    apply_symmetry,
    clip,
    contains,
    det3,
    from_halfspaces,
    gauge,
    hull,
    intersect,
    minkowski_sum,
    octahedral_group,
    solve3,
    subtract,
    volume,
    z_rotation,
    z_rotations,
)

RNG = random.Random(0xC0FFEE)


def octahedron() -> Polytope:
    return hull(
        [vec(1, 0, 0), vec(-1, 0, 0), vec(0, 1, 0), vec(0, -1, 0), vec(0, 0, 1), vec(0, 0, -1)],
        name="octahedron",
    )


def cube(r=1) -> Polytope:
    pts = [vec(sx * r, sy * r, sz * r) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]
    return hull(pts, name="cube")


def rand_point(rng: random.Random, bound: int = 4, den: int = 12) -> Vec3:
    return vec(
        mpq(rng.randint(-bound * den, bound * den), den),
        mpq(rng.randint(-bound * den, bound * den), den),
        mpq(rng.randint(-bound * den, bound * den), den),
    )


def brute_force_facets(points) -> set:
    """All supporting planes through point triples; the facet set of the hull."""
    out = set()
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                normal = (points[j] - points[i]).cross(points[k] - points[i])
                if sign(normal.x) == 0 and sign(normal.y) == 0 and sign(normal.z) == 0:
                    continue
                off = normal.dot(points[i])
                sides = [sign(normal.dot(p) - off) for p in points]
                if all(s <= 0 for s in sides):
                    out.add(HalfSpace.canonical(normal, off)._key())
                if all(s >= 0 for s in sides):
                    out.add(HalfSpace.canonical(-normal, -off)._key())
    return out


# --------------------------------------------------------------------------
# hull
# --------------------------------------------------------------------------


def test_hull_octahedron_has_eight_unit_facets():
    o = octahedron()
    assert o.dim == 3
    assert len(o.vertices) == 6
    assert len(o.facets) == 8
    for f in o.facets:
        assert f.offset == 1
        assert sorted(abs(c) for c in f.normal) == [1, 1, 1]


def test_hull_single_point_is_dim0():
    p = hull([vec(2, -1, 3), vec(2, -1, 3)])
    assert p.dim == 0
    assert p.vertices == (vec(2, -1, 3),)
    assert p.volume() == 0
    assert p.contains_point(vec(2, -1, 3)) is True
    assert p.contains_point(vec(2, -1, 4)) is False


def test_hull_segment_and_polygon():
    seg = hull([vec(0, 0, 0), vec(1, 1, 1), vec(2, 2, 2)])
    assert seg.dim == 1
    assert set(seg.vertices) == {vec(0, 0, 0), vec(2, 2, 2)}
    assert seg.contains_point(vec(1, 1, 1)) is True
    assert seg.contains_point(vec(1, 1, mpq(9, 8))) is False

    square = hull([vec(0, 0, 1), vec(1, 0, 1), vec(0, 1, 1), vec(1, 1, 1), vec(mpq(1, 2), mpq(1, 2), 1)])
    assert square.dim == 2
    assert len(square.vertices) == 4
    assert square.contains_point(vec(mpq(1, 3), mpq(2, 3), 1)) is True
    assert square.contains_point(vec(mpq(1, 3), mpq(2, 3), mpq(3, 2))) is False
    assert square.volume() == 0


def test_hull_drops_interior_and_boundary_points():
    pts = [vec(0, 0, 0), vec(2, 0, 0), vec(0, 2, 0), vec(0, 0, 2), vec(1, 0, 0), vec(mpq(1, 4), mpq(1, 4), mpq(1, 4))]
    p = hull(pts)
    assert len(p.vertices) == 4
    assert vec(1, 0, 0) not in p.vertices


def test_hull_box_with_slab_vertices():
    # eight corners of a parallelepiped given among many coplanar points
    base = [vec(0, 0, 2), vec(0, mpq(1, 3), mpq(5, 3)), vec(mpq(1, 3), 0, mpq(5, 3)), vec(mpq(1, 3), mpq(1, 3), 2),
            vec(mpq(1, 3), mpq(1, 3), mpq(4, 3)), vec(mpq(1, 3), mpq(2, 3), mpq(5, 3)),
            vec(mpq(2, 3), mpq(1, 3), mpq(5, 3)), vec(mpq(2, 3), mpq(2, 3), mpq(4, 3))]
    p = hull(base)
    assert p.dim == 3
    assert len(p.facets) == 6
    assert set(p.vertices) == set(base)
    # facets agree with the brute-force triple enumeration
    assert {f._key() for f in p.facets} == brute_force_facets(base)
    # hand oracle: parallelepiped spanned by (0,1/3,-1/3), (1/3,0,-1/3), (1/3,1/3,0)
    u, v, w = base[1] - base[0], base[2] - base[0], base[3] - base[0]
    assert abs(det3(u, v, w)) == mpq(2, 27)
    assert p.volume() == mpq(2, 27)


def test_hull_matches_brute_force_on_random_inputs():
    for _ in range(40):
        pts = [rand_point(RNG, bound=2, den=4) for _ in range(RNG.randint(4, 10))]
        p = hull(pts)
        if p.dim < 3:
            continue
        assert {f._key() for f in p.facets} == brute_force_facets(list(dict.fromkeys(pts)))
        # every input point is inside, every vertex is an input point
        for q in pts:
            assert p.contains_point(q) is True
        assert set(p.vertices) <= set(pts)


def test_hull_deterministic_across_input_order():
    pts = [rand_point(RNG, bound=2, den=3) for _ in range(12)]
    p = hull(pts)
    for _ in range(5):
        shuffled = pts[:]
        RNG.shuffle(shuffled)
        q = hull(shuffled)
        assert p.same_as(q)
        assert p.to_json() == q.to_json()


def test_hull_rejects_intervals():
    with pytest.raises(TypeError):
        hull([Vec3(Interval(0, 1), mpq(0), mpq(0)), Vec3(mpq(1), mpq(1), mpq(1))])


# --------------------------------------------------------------------------
# halfspace intersection
# --------------------------------------------------------------------------


def test_from_halfspaces_round_trip():
    for _ in range(60):
        pts = [rand_point(RNG, bound=3, den=6) for _ in range(RNG.randint(4, 12))]
        p = hull(pts)
        if p.dim < 3:
            continue
        q = from_halfspaces(p.facets)
        assert p.same_as(q)


def test_from_halfspaces_unbounded_raises():
    up = [
        HalfSpace.canonical(vec(0, 0, -1), mpq(0)),
        HalfSpace.canonical(vec(1, 0, 0), mpq(1)),
        HalfSpace.canonical(vec(-1, 0, 0), mpq(1)),
        HalfSpace.canonical(vec(0, 1, 0), mpq(1)),
        HalfSpace.canonical(vec(0, -1, 0), mpq(1)),
    ]
    with pytest.raises(ValueError):
        from_halfspaces(up)


def test_intersect_idempotent():
    o = octahedron()
    assert intersect(o, o).same_as(o)


def test_intersect_cube_with_double_octahedron_is_cuboctahedron():
    c7 = intersect(cube(1), octahedron().scale(mpq(2)))
    assert c7.dim == 3
    assert len(c7.facets) == 14
    assert len(c7.vertices) == 12
    assert c7.volume() == mpq(20, 3)  # cube 8 minus 8 corner tetrahedra of vol 1/6


def test_intersect_tangent_translates_is_single_point():
    o = octahedron()
    shifted = o.translate(vec(2, 0, 0))
    p = intersect(o, shifted)
    assert p.dim == 0
    assert p.vertices == (vec(1, 0, 0),)


def test_intersect_disjoint_is_empty():
    o = octahedron()
    assert intersect(o, o.translate(vec(5, 0, 0))).is_empty


# --------------------------------------------------------------------------
# minkowski sum
# --------------------------------------------------------------------------


def test_minkowski_with_point_translates():
    o = octahedron()
    p = hull([vec(1, 2, 3)])
    s = minkowski_sum(o, p)
    assert s.same_as(o.translate(vec(1, 2, 3)))


def test_minkowski_difference_body_of_octahedron():
    o = octahedron()
    s = minkowski_sum(o, -o)
    assert s.same_as(o.scale(mpq(2)))


def test_minkowski_cube_octahedron():
    s = minkowski_sum(cube(1), octahedron())
    # Steiner decomposition: cube 8, six face slabs 6*4*1, twelve edge wedges
    # 12 * (length 2) * (quadrant of the diamond shadow, area 1/2), eight
    # corner pieces 8 * (octant of the octahedron, 1/6).
    assert s.volume() == 8 + 24 + 12 + mpq(4, 3)
    assert len(s.facets) == 26 and len(s.vertices) == 24


# --------------------------------------------------------------------------
# clip / subtract
# --------------------------------------------------------------------------


def test_clip_halves_cube():
    c = cube(1)
    h = HalfSpace.canonical(vec(1, 0, 0), mpq(0))
    left = clip(c, h)
    assert left.volume() == 4
    assert all(sign(v.x) <= 0 for v in left.vertices)
    # clipping by a supporting plane returns the face
    face = clip(c, HalfSpace.canonical(vec(-1, 0, 0), mpq(-1)))
    assert face.dim == 2


def test_subtract_self_is_empty():
    o = octahedron()
    assert subtract(o, [o]).is_empty


def test_subtract_octahedron_from_double():
    o = octahedron()
    cells = subtract(o.scale(mpq(2)), [o])
    assert not cells.is_empty
    assert cells.total_volume() == mpq(32, 3) - mpq(4, 3)
    # pairwise disjoint interiors
    for i, a in enumerate(cells.cells):
        for b in cells.cells[i + 1:]:
            overlap = intersect(a, b)
            assert overlap.dim < 3


def test_subtract_volume_additivity_with_inclusion_exclusion():
    rng = random.Random(17)
    for _ in range(12):
        a = hull([rand_point(rng, bound=2, den=3) for _ in range(8)])
        if a.dim < 3:
            continue
        bs = []
        while len(bs) < 2:
            b = hull([rand_point(rng, bound=2, den=3) for _ in range(6)])
            if b.dim == 3:
                bs.append(b)
        cells = subtract(a, bs)
        inter1 = intersect(a, bs[0])
        inter2 = intersect(a, bs[1])
        both = intersect(inter1, bs[1]) if inter1.dim == 3 else Polytope.empty()
        covered = (inter1.volume() if inter1.dim == 3 else mpq(0)) + (
            inter2.volume() if inter2.dim == 3 else mpq(0)
        ) - (both.volume() if both.dim == 3 else mpq(0))
        assert cells.total_volume() + covered == a.volume()


def test_subtract_membership_monte_carlo():
    o = octahedron()
    big = o.scale(mpq(2))
    shifted = cube(1).translate(vec(1, 1, 1))
    cells = subtract(big, [o, shifted])
    rng = random.Random(99)
    checked = 0
    while checked < 100_000:
        pt = vec(
            mpq(rng.randint(-17 * 8, 17 * 8), 64),
            mpq(rng.randint(-17 * 8, 17 * 8), 64),
            mpq(rng.randint(-17 * 8, 17 * 8), 64),
        )
        # resample anything on a boundary plane: membership there is two-sided
        if any(f.side(pt) == 0 for p in (big, o, shifted) for f in p.facets):
            continue
        checked += 1
        expected = (
            big.contains_point(pt) is True
            and o.contains_point(pt) is False
            and shifted.contains_point(pt) is False
        )
        assert cells.contains_point(pt) is expected


# --------------------------------------------------------------------------
# contains / gauge / volume
# --------------------------------------------------------------------------


def test_contains_examples():
    o = octahedron()
    assert contains(o, vec(0, 0, 0)) is True
    assert contains(o, vec(mpq(1, 6), mpq(1, 6), mpq(5, 6))) is False  # L1 = 7/6
    assert contains(o.scale(mpq(2)), o) is True
    assert contains(o, o.scale(mpq(2))) is False


def test_contains_undecided_with_intervals():
    o = octahedron()
    eps = Interval(mpq(-1, 1000), mpq(1, 1000))
    straddling = Vec3(1 + eps, mpq(0), mpq(0))
    assert contains(o, straddling) is None
    inside = Vec3(eps, eps, eps)
    assert contains(o, inside) is True


def test_gauge_octahedron_is_l1_norm():
    o = octahedron()
    assert gauge(o, vec(1, 0, 0)) == 1
    assert gauge(o, vec(mpq(1, 6), mpq(1, 6), mpq(5, 6))) == mpq(7, 6)
    for _ in range(200):
        x = rand_point(RNG)
        assert gauge(o, x) == x.l1()


def test_gauge_cuboctahedron_vertex():
    c7 = intersect(cube(1), octahedron().scale(mpq(2)))
    assert gauge(c7, vec(1, 1, 0)) == 1


def test_gauge_axioms():
    bodies = [octahedron(), cube(1), intersect(cube(1), octahedron().scale(mpq(2)))]
    for c in bodies:
        for _ in range(120):
            x, y = rand_point(RNG), rand_point(RNG)
            lam = mpq(RNG.randint(-24, 24), 8)
            gx, gy = gauge(c, x), gauge(c, y)
            assert gauge(c, x.scale(lam)) == abs(lam) * gx
            assert gauge(c, x + y) <= gx + gy
            assert (gauge(c, x) <= 1) == (contains(c, x) is True)


def test_gauge_interval_encloses_exact():
    o = octahedron()
    x = Vec3(Interval(mpq(1, 8), mpq(1, 4)), mpq(1, 3), mpq(0))
    g = gauge(o, x)
    assert isinstance(g, Interval)
    assert g.lo == mpq(1, 8) + mpq(1, 3)
    assert g.hi == mpq(1, 4) + mpq(1, 3)


def test_gauge_requires_origin_inside():
    shifted = octahedron().translate(vec(5, 0, 0))
    with pytest.raises(ValueError):
        gauge(shifted, vec(1, 0, 0))


def test_volume_examples():
    assert volume(octahedron()) == mpq(4, 3)
    assert volume(hull([vec(1, 1, 1)])) == 0
    assert volume(cube(1)) == 8


# --------------------------------------------------------------------------
# symmetry group
# --------------------------------------------------------------------------


def test_group_has_48_elements_closed_under_composition():
    group = octahedral_group()
    assert len(group) == 48
    assert len(set(group)) == 48
    table = set(group)
    for g in group[:12]:
        for h in group:
            assert g.compose(h) in table
    for g in group:
        assert g.compose(g.inverse()) == SignedPermutation.identity()


def test_group_fixes_octahedron():
    o = octahedron()
    for g in octahedral_group():
        assert apply_symmetry(g, o).same_as(o)
        assert apply_symmetry(g, o).volume() == o.volume()


def test_z_rotation_advances_quadrants():
    r = z_rotation()
    assert r.apply(vec(1, 0, 0)) == vec(0, -1, 0)
    assert r.apply(vec(0, 1, 0)) == vec(1, 0, 0)
    rs = z_rotations()
    assert len(rs) == 4
    acc = rs[1]
    assert rs[2] == r.compose(r)
    assert r.compose(rs[3]) == rs[0] == SignedPermutation.identity()
    assert acc.determinant() == 1
    assert SignedPermutation.inversion().determinant() == -1


def test_symmetry_preserves_containment_and_volume():
    a = hull([rand_point(RNG, bound=2, den=3) for _ in range(8)])
    b = hull([v.scale(mpq(1, 2)) for v in a.vertices])
    for g in octahedral_group()[:10]:
        ga, gb = apply_symmetry(g, a), apply_symmetry(g, b)
        assert ga.volume() == a.volume()
        assert contains(ga, gb) is contains(a, b)


def test_apply_symmetry_identity_is_noop():
    o = octahedron()
    assert apply_symmetry(SignedPermutation.identity(), o).same_as(o)
    assert (-octahedron()).same_as(o)  # central symmetry


# --------------------------------------------------------------------------
# linear solve helper
# --------------------------------------------------------------------------


def test_solve3():
    r1, r2, r3 = vec(2, 0, 0), vec(0, 3, 0), vec(1, 1, 1)
    x = solve3(r1, r2, r3, vec(4, 6, 6))
    assert x == vec(2, 2, 2)
    assert solve3(r1, r1, r3, vec(1, 1, 1)) is None


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def test_json_round_trip_rational_and_quadratic():
    from latcov.arith import Quad

    o = octahedron()
    assert Polytope.from_json(o.to_json()).same_as(o)

    tau = Quad(mpq(1, 2), mpq(1, 2), 5)
    quad_body = hull(
        [
            Vec3(tau * sx, Quad(sy, 0, 5), Quad(0, 0, 5))
            for sx in (1, -1)
            for sy in (1, -1)
        ]
        + [Vec3(Quad(0, 0, 5), Quad(0, 0, 5), tau + 1), Vec3(Quad(0, 0, 5), Quad(0, 0, 5), -tau - 1)]
    )
    again = Polytope.from_json(quad_body.to_json())
    assert again.same_as(quad_body)
    assert '"field": "quadratic:5"' in quad_body.to_json()


def test_json_halfspaces_only():
    o = octahedron()
    doc = o.to_json().replace('"vertices"', '"ignored"')
    rebuilt = Polytope.from_json(doc)
    assert rebuilt.same_as(o)


def test_json_inconsistent_raises():
    import json as _json

    o = octahedron()
    doc = _json.loads(o.to_json())
    doc["halfspaces"] = doc["halfspaces"][:-1]  # drop one facet
    with pytest.raises(ValueError):
        Polytope.from_json(_json.dumps(doc))


def test_obj_export():
    o = octahedron()
    o.name = "octa"
    text = o.export_obj()
    lines = text.strip().splitlines()
    assert lines[0] == "o octa"
    assert sum(1 for ln in lines if ln.startswith("v ")) == 6
    assert sum(1 for ln in lines if ln.startswith("f ")) == 8  # triangles
    for ln in lines:
        if ln.startswith("v "):
            xs = [float(tok) for tok in ln.split()[1:]]
            assert len(xs) == 3
