"""Exact 3D convex polytope kernel.

A :class:`Polytope` always carries *both* descriptions, kept synchronized:

* an irredundant vertex list (V-representation), and
* an irredundant facet list of :class:`HalfSpace` objects (H-representation),
  each in a canonical scaling so polytope equality is a sorted-list
  comparison.

Construction from points runs a deterministic incremental hull (no
randomization: identical inputs give bit-identical outputs) followed by a
coplanarity merge with exact 2D hull ordering of every facet polygon.
Construction from halfspaces enumerates basic solutions of facet triples.
Everything is computed over the exact scalar backends of
:mod:`latcov.arith`; interval scalars are accepted only where soundness is
preserved without decisions (membership, gauge enclosures, affine images),
never inside hull construction.

Conventions used throughout the library:

* All region bookkeeping uses CLOSED sets; difference operations return the
  closure of the open difference as a :class:`CellComplex` of full-dimensional
  cells.  Downstream separation checks therefore use non-strict thresholds.
* A halfspace means ``{x : normal . x <= offset}``; canonical scaling divides
  by |first nonzero normal component|.
* Facet vertex cycles are stored oriented outward (counterclockwise when seen
  from outside), so signed volume needs no orientation tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from gmpy2 import mpq

from .arith import (
    Field,
    INTERVAL,
    Interval,
    Quad,
    RATIONAL,
    Scalar,
    UndecidedComparison,
    Vec3,
    format_scalar,
    parse_scalar,
    quadratic_field,
    sign,
    to_float,
)

__all__ = [
    "CellComplex",
    "HalfSpace",
    "Polytope",
    "SignedPermutation",
    "apply_symmetry",
    "contains",
    "det3",
    "solve3",
    "gauge",
    "hull",
    "intersect",
    "from_halfspaces",
    "minkowski_sum",
    "octahedral_group",
    "subtract",
    "volume",
    "z_rotation",
]


def det3(a: Vec3, b: Vec3, c: Vec3) -> Scalar:
    """Determinant of the 3x3 matrix with rows a, b, c."""
    return a.dot(b.cross(c))


def solve3(r1: Vec3, r2: Vec3, r3: Vec3, rhs: Vec3) -> Optional[Vec3]:
    """Solve the system with rows r1, r2, r3; None when singular."""
    d = det3(r1, r2, r3)
    if sign(d) == 0:
        return None
    col1 = r2.cross(r3)
    col2 = r3.cross(r1)
    col3 = r1.cross(r2)
    return Vec3(
        (col1.x * rhs.x + col2.x * rhs.y + col3.x * rhs.z) / d,
        (col1.y * rhs.x + col2.y * rhs.y + col3.y * rhs.z) / d,
        (col1.z * rhs.x + col2.z * rhs.y + col3.z * rhs.z) / d,
    )


def _is_zero_vec(v: Vec3) -> bool:
    return sign(v.x) == 0 and sign(v.y) == 0 and sign(v.z) == 0


def _has_interval(values: Iterable[Scalar]) -> bool:
    return any(isinstance(s, Interval) for s in values)


# --------------------------------------------------------------------------
# halfspaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfSpace:
    """The closed halfspace {x : normal . x <= offset}."""

    normal: Vec3
    offset: Scalar

    @staticmethod
    def canonical(normal: Vec3, offset: Scalar) -> "HalfSpace":
        """Scale so the first nonzero normal component has absolute value 1."""
        for comp in normal:
            s = sign(comp)
            if s != 0:
                factor = comp if s > 0 else -comp
                return HalfSpace(
                    Vec3(normal.x / factor, normal.y / factor, normal.z / factor),
                    offset / factor,
                )
        raise ValueError("zero normal vector")

    def eval_at(self, point: Vec3) -> Scalar:
        """normal . point - offset (<= 0 inside)."""
        return self.normal.dot(point) - self.offset

    def side(self, point: Vec3) -> int:
        """-1 strictly inside, 0 on boundary, +1 strictly outside."""
        return sign(self.eval_at(point))

    def flipped(self) -> "HalfSpace":
        """The complementary closed halfspace {normal . x >= offset}."""
        return HalfSpace(-self.normal, -self.offset)

    def _key(self):
        return (*self.normal, self.offset)


def _sorted_halfspaces(halfspaces: Iterable[HalfSpace]) -> tuple:
    return tuple(sorted(halfspaces, key=HalfSpace._key))


# --------------------------------------------------------------------------
# signed permutations (the symmetry group of the octahedron / cube)
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SignedPermutation:
    """x -> y with y[i] = signs[i] * x[perm[i]]; an orthogonal matrix."""

    perm: tuple
    signs: tuple

    def apply(self, v: Vec3) -> Vec3:
        return Vec3(
            self.signs[0] * v[self.perm[0]],
            self.signs[1] * v[self.perm[1]],
            self.signs[2] * v[self.perm[2]],
        )

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """self after other: (self.compose(other)).apply(v) = self(other(v))."""
        perm = tuple(other.perm[self.perm[i]] for i in range(3))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(3))
        return SignedPermutation(perm, signs)

    def inverse(self) -> "SignedPermutation":
        perm = [0, 0, 0]
        signs = [0, 0, 0]
        for i in range(3):
            perm[self.perm[i]] = i
            signs[self.perm[i]] = self.signs[i]
        return SignedPermutation(tuple(perm), tuple(signs))

    def determinant(self) -> int:
        p = self.perm
        parity = 1 if (p[0], p[1], p[2]) in _EVEN_PERMS else -1
        return parity * self.signs[0] * self.signs[1] * self.signs[2]

    @staticmethod
    def identity() -> "SignedPermutation":
        return SignedPermutation((0, 1, 2), (1, 1, 1))

    @staticmethod
    def inversion() -> "SignedPermutation":
        return SignedPermutation((0, 1, 2), (-1, -1, -1))


_EVEN_PERMS = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}
_ALL_PERMS = (
    (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
)


def octahedral_group() -> tuple:
    """All 48 signed permutations, in a fixed deterministic order."""
    out = []
    for perm in _ALL_PERMS:
        for s0 in (1, -1):
            for s1 in (1, -1):
                for s2 in (1, -1):
                    out.append(SignedPermutation(perm, (s0, s1, s2)))
    return tuple(out)


def z_rotation() -> SignedPermutation:
    """The quarter-turn about the z-axis mapping (x, y, z) to (y, -x, z).

    This is the face-advancing direction: applied to a subset of the facet
    cone over conv{e1, e2, e3} it lands in the cone over conv{e1, -e2, e3}.
    """
    return SignedPermutation((1, 0, 2), (1, -1, 1))


def z_rotations() -> tuple:
    r = z_rotation()
    out = [SignedPermutation.identity()]
    for _ in range(3):
        out.append(r.compose(out[-1]))
    return tuple(out)


# --------------------------------------------------------------------------
# 2D hull helper (exact, used for facet polygon ordering)
# --------------------------------------------------------------------------


def _cross2(o, a, b) -> Scalar:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull_2d(points: Sequence) -> list:
    """Indices of the convex hull of 2D points, counterclockwise.

    Collinear points are dropped.  ``points`` is a list of (u, v) scalar
    pairs; exact comparisons only.
    """
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    # drop exact duplicates
    uniq = []
    for i in order:
        if uniq and points[uniq[-1]][0] == points[i][0] and points[uniq[-1]][1] == points[i][1]:
            continue
        uniq.append(i)
    if len(uniq) <= 2:
        return uniq
    lower = []
    for i in uniq:
        while len(lower) >= 2 and sign(
            _cross2(points[lower[-2]], points[lower[-1]], points[i])
        ) <= 0:
            lower.pop()
        lower.append(i)
    upper = []
    for i in reversed(uniq):
        while len(upper) >= 2 and sign(
            _cross2(points[upper[-2]], points[upper[-1]], points[i])
        ) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


# --------------------------------------------------------------------------
# the polytope itself
# --------------------------------------------------------------------------


class Polytope:
    """Bounded convex polytope with synchronized V- and H-representations.

    ``dim`` is 3, 2, 1, 0, or -1 for the empty polytope.  ``cycles`` holds,
    for each facet of a 3-dimensional polytope, the facet's vertex indices in
    outward-oriented cyclic order; degenerate polytopes store no cycles.
    """

    __slots__ = ("vertices", "facets", "cycles", "dim", "name")

    def __init__(
        self,
        vertices: tuple,
        facets: tuple,
        cycles: tuple,
        dim: int,
        name: Optional[str] = None,
    ) -> None:
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "facets", facets)
        object.__setattr__(self, "cycles", cycles)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "name", name)

    def __setattr__(self, attr: str, value: object) -> None:
        if attr == "name":
            object.__setattr__(self, attr, value)
            return
        raise AttributeError("Polytope is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def empty() -> "Polytope":
        return Polytope((), (), (), -1)

    @staticmethod
    def from_points(points: Iterable[Vec3], name: Optional[str] = None) -> "Polytope":
        return hull(list(points), name=name)

    @staticmethod
    def from_halfspaces(
        halfspaces: Iterable[HalfSpace], name: Optional[str] = None
    ) -> "Polytope":
        return from_halfspaces(list(halfspaces), name=name)

    # -- basic queries -------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.dim < 0

    def contains_point(self, point: Vec3) -> Optional[bool]:
        """Closed membership; None only when interval data cannot decide."""
        if self.is_empty:
            return False
        undecided = False
        for f in self.facets:
            try:
                s = f.side(point)
            except UndecidedComparison:
                undecided = True
                continue
            if s > 0:
                return False
        return None if undecided else True

    def bbox(self) -> tuple:
        """((xmin, ymin, zmin), (xmax, ymax, zmax)) over the vertex list.

        Interval coordinates contribute their outer endpoints, so the box is
        an enclosure for every realization.
        """
        if not self.vertices:
            raise ValueError("empty polytope has no bounding box")
        los = [[], [], []]
        his = [[], [], []]
        for v in self.vertices:
            for k, comp in enumerate(v):
                if isinstance(comp, Interval):
                    los[k].append(comp.lo)
                    his[k].append(comp.hi)
                else:
                    los[k].append(comp)
                    his[k].append(comp)
        lo = Vec3(min(los[0]), min(los[1]), min(los[2]))
        hi = Vec3(max(his[0]), max(his[1]), max(his[2]))
        return lo, hi

    def vertex_centroid(self) -> Vec3:
        n = len(self.vertices)
        acc = self.vertices[0]
        for v in self.vertices[1:]:
            acc = acc + v
        inv = mpq(1, n)
        return acc.scale(inv)

    def volume(self) -> Scalar:
        """Exact volume by outward-oriented facet fans from a vertex centroid.

        For interval-backed polytopes (affine images of exact ones) the same
        sum evaluates to an enclosing interval.
        """
        if self.dim < 3:
            return mpq(0)
        apex = self.vertex_centroid()
        total = None
        for cycle in self.cycles:
            base = self.vertices[cycle[0]] - apex
            for t in range(1, len(cycle) - 1):
                term = det3(
                    base,
                    self.vertices[cycle[t]] - apex,
                    self.vertices[cycle[t + 1]] - apex,
                )
                total = term if total is None else total + term
        return total / 6

    def facet_polygon(self, index: int) -> tuple:
        return tuple(self.vertices[i] for i in self.cycles[index])

    # -- affine images -------------------------------------------------------

    def translate(self, t: Vec3) -> "Polytope":
        if self.is_empty:
            return self
        vertices = tuple(v + t for v in self.vertices)
        facets = tuple(
            HalfSpace(f.normal, f.offset + f.normal.dot(t)) for f in self.facets
        )
        return Polytope(vertices, facets, self.cycles, self.dim, self.name)

    def scale(self, s: Scalar) -> "Polytope":
        """Image under x -> s x for s > 0 (s may be an interval above 0)."""
        if isinstance(s, Interval):
            if not s.lo > 0:
                raise ValueError("scale factor must be positive")
        elif sign(s) <= 0:
            raise ValueError("scale factor must be positive")
        if self.is_empty:
            return self
        vertices = tuple(v.scale(s) for v in self.vertices)
        facets = tuple(HalfSpace(f.normal, f.offset * s) for f in self.facets)
        return Polytope(vertices, facets, self.cycles, self.dim, self.name)

    def image(self, g: SignedPermutation) -> "Polytope":
        """Exact image under a signed permutation (normals map like points)."""
        if self.is_empty:
            return self
        vertices = tuple(g.apply(v) for v in self.vertices)
        facets = tuple(HalfSpace(g.apply(f.normal), f.offset) for f in self.facets)
        cycles = self.cycles
        if g.determinant() < 0:
            cycles = tuple(tuple(reversed(c)) for c in cycles)
        return Polytope(vertices, facets, cycles, self.dim, self.name)

    def __neg__(self) -> "Polytope":
        return self.image(SignedPermutation.inversion())

    # -- equality ------------------------------------------------------------

    def _vertex_key(self):
        return sorted((v.x, v.y, v.z) for v in self.vertices)

    def _facet_key(self):
        return sorted(f._key() for f in self.facets)

    def same_as(self, other: "Polytope") -> bool:
        """Exact set equality (canonical facets + vertex sets)."""
        if self.dim != other.dim:
            return False
        if self.is_empty:
            return True
        return self._vertex_key() == other._vertex_key() and (
            self.dim < 3 or self._facet_key() == other._facet_key()
        )

    def __repr__(self) -> str:
        tag = self.name or "polytope"
        return f"<{tag}: dim {self.dim}, {len(self.vertices)}v/{len(self.facets)}f>"

    # -- serialization -------------------------------------------------------

    def field(self) -> Field:
        for v in self.vertices:
            for comp in v:
                if isinstance(comp, Interval):
                    return INTERVAL
                if isinstance(comp, Quad):
                    return quadratic_field(comp.d)
        return RATIONAL

    def to_json(self) -> str:
        field = self.field()
        tag = {
            "rational": "rational",
            "quadratic": f"quadratic:{field.d}",
            "interval": "interval",
        }[field.kind]
        doc = {
            "name": self.name,
            "field": tag,
            "vertices": [[format_scalar(c) for c in v] for v in self.vertices],
            "halfspaces": [
                {
                    "normal": [format_scalar(c) for c in f.normal],
                    "offset": format_scalar(f.offset),
                }
                for f in self.facets
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Polytope":
        doc = json.loads(text)
        tag = doc.get("field", "rational")
        if tag == "rational":
            field = RATIONAL
        elif tag == "interval":
            field = INTERVAL
        elif tag.startswith("quadratic:"):
            field = quadratic_field(int(tag.split(":", 1)[1]))
        else:
            raise ValueError(f"unknown field tag {tag!r}")
        name = doc.get("name")
        verts = [
            Vec3(*(parse_scalar(c, field) for c in row))
            for row in doc.get("vertices") or []
        ]
        halfspaces = [
            HalfSpace.canonical(
                Vec3(*(parse_scalar(c, field) for c in h["normal"])),
                parse_scalar(h["offset"], field),
            )
            for h in doc.get("halfspaces") or []
        ]
        if not verts and not halfspaces:
            raise ValueError("need vertices or halfspaces")
        if verts:
            poly = hull(verts, name=name)
            if halfspaces:
                keys = sorted(h._key() for h in halfspaces)
                if keys != poly._facet_key():
                    raise ValueError("vertex and halfspace lists disagree")
            return poly
        return from_halfspaces(halfspaces, name=name)

    def export_obj(self) -> str:
        """Wavefront OBJ mesh (triangulated facets, 12 significant digits)."""
        lines = []
        if self.name:
            lines.append(f"o {self.name}")
        for v in self.vertices:
            coords = " ".join(f"{to_float(c):.12g}" for c in v)
            lines.append(f"v {coords}")
        for cycle in self.cycles:
            for t in range(1, len(cycle) - 1):
                lines.append(
                    f"f {cycle[0] + 1} {cycle[t] + 1} {cycle[t + 1] + 1}"
                )
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# hull construction
# --------------------------------------------------------------------------


def _check_exact_points(points: Sequence[Vec3]) -> None:
    for p in points:
        if _has_interval(p):
            raise TypeError(
                "hull construction needs exact scalars; interval-backed "
                "polytopes only arise as affine images of exact ones"
            )


def _dedup_points(points: Sequence[Vec3]) -> list:
    return list(dict.fromkeys(points))


def _affine_basis(pts: Sequence[Vec3]):
    """Indices (i0, i1, i2, i3) of affinely independent points, as far as found."""
    found = [0]
    for i in range(1, len(pts)):
        if pts[i] != pts[found[0]]:
            found.append(i)
            break
    if len(found) < 2:
        return found
    d1 = pts[found[1]] - pts[found[0]]
    for i in range(1, len(pts)):
        if i in found:
            continue
        if not _is_zero_vec(d1.cross(pts[i] - pts[found[0]])):
            found.append(i)
            break
    if len(found) < 3:
        return found
    d2 = pts[found[2]] - pts[found[0]]
    for i in range(1, len(pts)):
        if i in found:
            continue
        if sign(det3(d1, d2, pts[i] - pts[found[0]])) != 0:
            found.append(i)
            break
    return found


def _segment_halfspaces(lo: Vec3, hi: Vec3) -> tuple:
    t = hi - lo
    axis = None
    for e in (Vec3(mpq(1), mpq(0), mpq(0)), Vec3(mpq(0), mpq(1), mpq(0)), Vec3(mpq(0), mpq(0), mpq(1))):
        u = t.cross(e)
        if not _is_zero_vec(u):
            axis = u
            break
    v = t.cross(axis)
    facets = [
        HalfSpace.canonical(axis, axis.dot(lo)),
        HalfSpace.canonical(-axis, -axis.dot(lo)),
        HalfSpace.canonical(v, v.dot(lo)),
        HalfSpace.canonical(-v, -v.dot(lo)),
        HalfSpace.canonical(t, t.dot(hi)),
        HalfSpace.canonical(-t, -t.dot(lo)),
    ]
    return tuple(facets)


def _point_halfspaces(p: Vec3) -> tuple:
    basis = (
        Vec3(mpq(1), mpq(0), mpq(0)),
        Vec3(mpq(0), mpq(1), mpq(0)),
        Vec3(mpq(0), mpq(0), mpq(1)),
    )
    facets = []
    for e in basis:
        facets.append(HalfSpace.canonical(e, e.dot(p)))
        facets.append(HalfSpace.canonical(-e, -e.dot(p)))
    return tuple(facets)


def _project_axis(normal: Vec3) -> int:
    """Coordinate to drop when flattening a plane with this normal."""
    best, best_abs = 0, abs(normal.x)
    for k, comp in ((1, normal.y), (2, normal.z)):
        a = abs(comp)
        if a > best_abs:
            best, best_abs = k, a
    return best


def _planar_polytope(pts: Sequence[Vec3], normal: Vec3, name: Optional[str]) -> Polytope:
    offset = normal.dot(pts[0])
    axis = _project_axis(normal)
    keep = [k for k in range(3) if k != axis]
    flat = [(p[keep[0]], p[keep[1]]) for p in pts]
    ring = _convex_hull_2d(flat)
    verts = [pts[i] for i in ring]
    facets = [
        HalfSpace.canonical(normal, offset),
        HalfSpace.canonical(-normal, -offset),
    ]
    m = len(verts)
    if m == 2:
        return hull(verts, name=name)  # degenerate ring: actually a segment
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        edge_normal = normal.cross(b - a)
        # orient so the polygon is on the <= side
        other = verts[(i + 2) % m]
        hs = HalfSpace.canonical(edge_normal, edge_normal.dot(a))
        if hs.side(other) > 0:
            hs = HalfSpace.canonical(-edge_normal, -edge_normal.dot(a))
        facets.append(hs)
    order = sorted(range(m), key=lambda i: (verts[i].x, verts[i].y, verts[i].z))
    return Polytope(
        tuple(verts[i] for i in order), _sorted_halfspaces(facets), (), 2, name
    )


def _normalize_cycle(cycle: Sequence[int]) -> tuple:
    """Rotate so the smallest index leads (orientation preserved)."""
    k = min(range(len(cycle)), key=lambda i: cycle[i])
    return tuple(cycle[k:]) + tuple(cycle[:k])


def hull(points: Sequence[Vec3], name: Optional[str] = None) -> Polytope:
    """Convex hull with irredundant V- and H-representations.

    Deterministic: no randomization anywhere, so identical input lists give
    identical outputs.  Degenerate inputs produce polytopes of dim 0, 1, or 2
    whose facet lists cut out exactly the affine hull and the body inside it.
    """
    pts = _dedup_points(list(points))
    if not pts:
        return Polytope.empty()
    _check_exact_points(pts)
    basis = _affine_basis(pts)
    if len(basis) == 1:
        p = pts[basis[0]]
        return Polytope((p,), _point_halfspaces(p), (), 0, name)
    if len(basis) == 2:
        d = pts[basis[1]] - pts[basis[0]]
        keyed = sorted(pts, key=lambda p: d.dot(p))
        lo, hi = keyed[0], keyed[-1]
        return Polytope((lo, hi), _segment_halfspaces(lo, hi), (), 1, name)
    if len(basis) == 3:
        d1 = pts[basis[1]] - pts[basis[0]]
        d2 = pts[basis[2]] - pts[basis[0]]
        return _planar_polytope(pts, d1.cross(d2), name)

    # -- full-dimensional incremental hull ---------------------------------
    order = basis + [i for i in range(len(pts)) if i not in basis]
    interior = pts[order[0]]
    for i in order[1:4]:
        interior = interior + pts[i]
    interior = interior.scale(mpq(1, 4))

    def oriented(i: int, j: int, k: int):
        a, b, c = pts[i], pts[j], pts[k]
        n = (b - a).cross(c - a)
        off = n.dot(a)
        s = sign(n.dot(interior) - off)
        if s > 0:
            return (i, k, j), -n, -off
        if s == 0:
            raise ValueError("degenerate facet orientation")
        return (i, j, k), n, off

    tris = {}
    i0, i1, i2, i3 = order[:4]
    for tri in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        key, n, off = oriented(*tri)
        tris[key] = (n, off)

    for idx in order[4:]:
        p = pts[idx]
        visible = [t for t, (n, off) in tris.items() if sign(n.dot(p) - off) > 0]
        if not visible:
            continue
        visible_set = set(visible)
        edge_owner = {}
        for t in tris:
            a, b, c = t
            for u, w in ((a, b), (b, c), (c, a)):
                edge_owner[(u, w)] = t
        horizon = []
        for t in visible:
            a, b, c = t
            for u, w in ((a, b), (b, c), (c, a)):
                if edge_owner[(w, u)] not in visible_set:
                    horizon.append((u, w))
        for t in visible:
            del tris[t]
        for u, w in horizon:
            key, n, off = oriented(u, w, idx)
            tris[key] = (n, off)

    # -- merge coplanar triangles into facets -------------------------------
    groups = {}
    for tri, (n, off) in tris.items():
        hs = HalfSpace.canonical(n, off)
        entry = groups.setdefault(hs._key(), (hs, set()))
        entry[1].update(tri)

    facet_data = []
    used_indices = set()
    for key in sorted(groups):
        hs, idx_set = groups[key]
        members = sorted(idx_set)
        axis = _project_axis(hs.normal)
        keep = [k for k in range(3) if k != axis]
        flat = [(pts[i][keep[0]], pts[i][keep[1]]) for i in members]
        ring = [members[i] for i in _convex_hull_2d(flat)]
        # orient the cycle outward: the projected orientation may be flipped
        a, b, c = pts[ring[0]], pts[ring[1]], pts[ring[2]]
        if sign((b - a).cross(c - a).dot(hs.normal)) < 0:
            ring.reverse()
        facet_data.append((hs, ring))
        used_indices.update(ring)

    vert_order = sorted(used_indices, key=lambda i: (pts[i].x, pts[i].y, pts[i].z))
    remap = {old: new for new, old in enumerate(vert_order)}
    vertices = tuple(pts[i] for i in vert_order)
    facet_data.sort(key=lambda fr: fr[0]._key())
    facets = tuple(fr[0] for fr in facet_data)
    cycles = tuple(
        _normalize_cycle([remap[i] for i in fr[1]]) for fr in facet_data
    )
    return Polytope(vertices, facets, cycles, 3, name)


# --------------------------------------------------------------------------
# halfspace intersection
# --------------------------------------------------------------------------


def _dedup_halfspaces(halfspaces: Sequence[HalfSpace]) -> list:
    out = []
    seen = set()
    for h in halfspaces:
        canon = HalfSpace.canonical(h.normal, h.offset)
        key = canon._key()
        if key not in seen:
            seen.add(key)
            out.append(canon)
    return out


def _assert_bounded(normals: Sequence[Vec3]) -> None:
    """Fail unless {d : n . d <= 0 for all normals} = {0}."""
    pair_basis = None
    for i in range(len(normals)):
        for j in range(i + 1, len(normals)):
            if not _is_zero_vec(normals[i].cross(normals[j])):
                pair_basis = (i, j)
                break
        if pair_basis:
            break
    full_rank = False
    if pair_basis:
        i, j = pair_basis
        for k in range(len(normals)):
            if sign(det3(normals[i], normals[j], normals[k])) != 0:
                full_rank = True
                break
    if not full_rank:
        raise ValueError("halfspace system is unbounded (normals not full rank)")
    for i in range(len(normals)):
        for j in range(i + 1, len(normals)):
            ray = normals[i].cross(normals[j])
            if _is_zero_vec(ray):
                continue
            for d in (ray, -ray):
                if all(sign(n.dot(d)) <= 0 for n in normals):
                    raise ValueError(
                        "halfspace system is unbounded (recession ray exists)"
                    )


def from_halfspaces(
    halfspaces: Sequence[HalfSpace], name: Optional[str] = None
) -> Polytope:
    """Bounded intersection of halfspaces, via basic solutions of facet triples.

    Every vertex of a bounded intersection is the solution of three
    linearly independent active constraints, so enumerating all triples and
    filtering by feasibility finds exactly the vertex set; the hull rebuild
    discards redundant halfspaces.  Raises ValueError for unbounded systems.
    """
    hs = _dedup_halfspaces(halfspaces)
    for h in hs:
        if _has_interval(h.normal) or isinstance(h.offset, Interval):
            raise TypeError("halfspace intersection needs exact scalars")
    _assert_bounded([h.normal for h in hs])
    candidates = []
    m = len(hs)
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                x = solve3(
                    hs[i].normal,
                    hs[j].normal,
                    hs[k].normal,
                    Vec3(hs[i].offset, hs[j].offset, hs[k].offset),
                )
                if x is None:
                    continue
                if all(h.side(x) <= 0 for h in hs):
                    candidates.append(x)
    if not candidates:
        return Polytope.empty()
    return hull(candidates, name=name)


def intersect(a: Polytope, b: Polytope, name: Optional[str] = None) -> Polytope:
    """a ∩ b from the concatenated halfspace lists."""
    if a.is_empty or b.is_empty:
        return Polytope.empty()
    return from_halfspaces(list(a.facets) + list(b.facets), name=name)


def minkowski_sum(a: Polytope, b: Polytope, name: Optional[str] = None) -> Polytope:
    """Minkowski sum: the hull of all pairwise vertex sums."""
    if a.is_empty or b.is_empty:
        return Polytope.empty()
    return hull([u + v for u in a.vertices for v in b.vertices], name=name)


# --------------------------------------------------------------------------
# clipping and set difference
# --------------------------------------------------------------------------


def _vertex_facet_sets(p: Polytope) -> list:
    out = [set() for _ in p.vertices]
    for f_idx, cycle in enumerate(p.cycles):
        for v_idx in cycle:
            out[v_idx].add(f_idx)
    return out


def clip(p: Polytope, h: HalfSpace) -> Polytope:
    """p ∩ {normal . x <= offset} for a full-dimensional p (exact backends)."""
    if p.is_empty:
        return p
    sides = [h.side(v) for v in p.vertices]
    if all(s <= 0 for s in sides):
        return p
    if all(s >= 0 for s in sides):
        boundary = [v for v, s in zip(p.vertices, sides) if s == 0]
        return hull(boundary) if boundary else Polytope.empty()
    keep = [v for v, s in zip(p.vertices, sides) if s <= 0]
    incident = _vertex_facet_sets(p)
    cuts = []
    n = len(p.vertices)
    for i in range(n):
        for j in range(i + 1, n):
            si, sj = sides[i], sides[j]
            if (si > 0 > sj) or (sj > 0 > si):
                if len(incident[i] & incident[j]) < 2:
                    continue  # not an edge
                vi, vj = p.vertices[i], p.vertices[j]
                ei, ej = h.eval_at(vi), h.eval_at(vj)
                t = ei / (ei - ej)
                cuts.append(vi + (vj - vi).scale(t))
    return hull(keep + cuts)


def subtract(a: Polytope, subtrahends: Sequence[Polytope]) -> "CellComplex":
    """Closure of a minus the interiors of the subtrahends, as disjoint cells.

    Each cell is clipped against each facet of each subtrahend in turn,
    keeping the piece outside the facet and passing the piece inside on to
    the next facet; whatever survives every facet lies inside the subtrahend
    and is dropped.  Cells of dimension < 3 are discarded throughout, so the
    result is exactly cl(cl(a) minus the union of interiors) as a complex
    with pairwise disjoint interiors.
    """
    if a.is_empty or a.dim < 3:
        return CellComplex(())
    cells = [a]
    for b in subtrahends:
        if b.is_empty or b.dim < 3:
            continue
        b_lo, b_hi = b.bbox()
        new_cells = []
        for cell in cells:
            c_lo, c_hi = cell.bbox()
            overlap = all(
                sign(b_lo[k] - c_hi[k]) < 0 and sign(c_lo[k] - b_hi[k]) < 0
                for k in range(3)
            )
            if not overlap:
                new_cells.append(cell)
                continue
            remainder = cell
            for facet in b.facets:
                outside = clip(remainder, facet.flipped())
                if outside.dim == 3:
                    new_cells.append(outside)
                remainder = clip(remainder, facet)
                if remainder.dim < 3:
                    break
        cells = new_cells
    return CellComplex(tuple(cells))


@dataclass(frozen=True)
class CellComplex:
    """A finite union of full-dimensional polytopes with disjoint interiors."""

    cells: tuple

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def total_volume(self) -> Scalar:
        if not self.cells:
            return mpq(0)
        total = self.cells[0].volume()
        for cell in self.cells[1:]:
            total = total + cell.volume()
        return total

    def contains_point(self, point: Vec3) -> Optional[bool]:
        undecided = False
        for cell in self.cells:
            r = cell.contains_point(point)
            if r is True:
                return True
            if r is None:
                undecided = True
        return None if undecided else False

    def all_vertices(self) -> list:
        out = []
        seen = set()
        for cell in self.cells:
            for v in cell.vertices:
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        return out

    def equals_polytope(self, p: Polytope) -> bool:
        """Whether the union of cells is exactly the polytope p.

        True iff every cell is contained in p and the volumes agree; since
        cell interiors are pairwise disjoint this is an exact set equality
        test for closed full-dimensional bodies.
        """
        for cell in self.cells:
            if contains(p, cell) is not True:
                return False
        return sign(self.total_volume() - p.volume()) == 0


# --------------------------------------------------------------------------
# spec-level free functions
# --------------------------------------------------------------------------


def contains(outer: Polytope, inner: Union[Polytope, Vec3]) -> Optional[bool]:
    """Closed containment; None only when interval data cannot decide."""
    if isinstance(inner, Vec3):
        return outer.contains_point(inner)
    if inner.is_empty:
        return True
    undecided = False
    for v in inner.vertices:
        r = outer.contains_point(v)
        if r is False:
            return False
        if r is None:
            undecided = True
    return None if undecided else True


def gauge(c: Polytope, x: Vec3) -> Scalar:
    """min{t >= 0 : x in t c} for a body with 0 in its interior.

    Computed as the maximum over facets of (normal . x)/offset, clamped at 0.
    Interval inputs give a sound enclosure (endpoint-wise maxima, so no
    undecidable comparisons arise here).
    """
    terms = []
    interval_mode = False
    for f in c.facets:
        off = f.offset
        if isinstance(off, Interval):
            if not off.lo > 0:
                raise ValueError("gauge needs the origin strictly inside the body")
        elif sign(off) <= 0:
            raise ValueError("gauge needs the origin strictly inside the body")
        term = f.normal.dot(x) / f.offset
        if isinstance(term, Interval):
            interval_mode = True
        terms.append(term)
    if interval_mode:
        lo = max(
            (t.lo if isinstance(t, Interval) else t) for t in terms
        )
        hi = max(
            (t.hi if isinstance(t, Interval) else t) for t in terms
        )
        zero = mpq(0)
        return Interval(max(lo, zero), max(hi, zero))
    best = terms[0]
    for t in terms[1:]:
        if t > best:
            best = t
    return best if sign(best) > 0 else mpq(0)


def volume(p: Polytope) -> Scalar:
    return p.volume()


def apply_symmetry(g: SignedPermutation, p: Polytope) -> Polytope:
    return p.image(g)
