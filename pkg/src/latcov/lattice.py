"""Lattices, packing and covering verification, and certified gamma brackets.

For a centrally symmetric convex body C and a lattice L:

* ``C + L`` is a *packing* when distinct translates have disjoint interiors
  — equivalently, by central symmetry, when every nonzero lattice vector v
  has gauge_C(v) >= 2 (touching is allowed);
* ``r C + L`` is a *covering* when every point lies in some translate;
* the simultaneous constant gamma(C, L) is the least r making ``r C + L`` a
  covering while ``C + L`` packs.

Everything here produces machine-checkable certificates:
:class:`PackingCertificate` (the gauge-minimizing nonzero vector),
:class:`CoverCertificate` (an exact residual complex, or a subdivision
transcript when inputs are interval-valued), and :class:`GammaBracket`
(two-sided bounds with a deep-point witness and the covering certificate
at the upper radius).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from gmpy2 import mpq

from .arith import (
    INTERVAL,
    Interval,
    Quad,
    RATIONAL,
    Scalar,
    Vec3,
    format_scalar,
    parse_scalar,
    quadratic_field,
    sign,
    to_float,
)
from .geom import (
    CellComplex,
    Polytope,
    gauge,
    hull,
    intersect,
    subtract,
)

__all__ = [
    "CoverCertificate",
    "GammaBracket",
    "Lattice",
    "PackingCertificate",
    "check_packing",
    "enumerate_points",
    "estimate_gamma",
    "fundamental_cover_check",
    "gamma_bracket",
    "zong_cover_check",
]


# --------------------------------------------------------------------------
# scalar endpoint helpers (exact scalars are their own endpoints)
# --------------------------------------------------------------------------


def _lo(s: Scalar) -> Scalar:
    return s.lo if isinstance(s, Interval) else s


def _hi(s: Scalar) -> Scalar:
    return s.hi if isinstance(s, Interval) else s


def _int_floor(s: Scalar) -> int:
    """Largest integer <= s (for intervals: <= s.lo, a sound lower floor)."""
    if isinstance(s, Interval):
        s = s.lo
    if isinstance(s, Quad):
        from .arith import to_interval

        k = _int_floor(to_interval(s, 96).lo)
        while s >= k + 1:
            k += 1
        return k
    q = mpq(s)
    return int(q.numerator // q.denominator)


def _int_ceil(s: Scalar) -> int:
    """Smallest integer >= s (for intervals: >= s.hi)."""
    if isinstance(s, Interval):
        s = s.hi
    if isinstance(s, Quad):
        return -_int_floor(-s)
    q = mpq(s)
    return int(-((-q.numerator) // q.denominator))


def _exact_min(values: Sequence[Tuple[Scalar, Vec3]]) -> Tuple[Scalar, Vec3]:
    """Minimum with lexicographic-by-coordinates tie-breaking (exact scalars)."""
    best_val, best_vec = values[0]
    for val, vec_ in values[1:]:
        c = -1 if val < best_val else (0 if val == best_val else 1)
        if c < 0 or (c == 0 and (vec_.x, vec_.y, vec_.z) < (best_vec.x, best_vec.y, best_vec.z)):
            best_val, best_vec = val, vec_
    return best_val, best_vec


# --------------------------------------------------------------------------
# the lattice
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """A 3D lattice given by basis rows a1, a2, a3 (any scalar backend)."""

    rows: tuple
    name: Optional[str] = None

    def __post_init__(self) -> None:
        if len(self.rows) != 3:
            raise ValueError("a lattice basis has exactly three rows")
        d = self.determinant()
        if isinstance(d, Interval):
            if d.lo <= 0 <= d.hi:
                raise ValueError("basis determinant interval contains zero")
        elif sign(d) == 0:
            raise ValueError("basis is singular")

    @staticmethod
    def from_rows(a1: Vec3, a2: Vec3, a3: Vec3, name: Optional[str] = None) -> "Lattice":
        return Lattice((a1, a2, a3), name)

    def determinant(self) -> Scalar:
        a1, a2, a3 = self.rows
        return a1.dot(a2.cross(a3))

    def point(self, n1: int, n2: int, n3: int) -> Vec3:
        a1, a2, a3 = self.rows
        return a1.scale(mpq(n1)) + a2.scale(mpq(n2)) + a3.scale(mpq(n3))

    def scale(self, s: Scalar) -> "Lattice":
        return Lattice(tuple(r.scale(s) for r in self.rows), self.name)

    def dual_rows(self) -> tuple:
        """Rows of the inverse-transpose: coefficients of x are dual_i . x / det."""
        a1, a2, a3 = self.rows
        return (a2.cross(a3), a3.cross(a1), a1.cross(a2))

    def fundamental_corners(self) -> list:
        a1, a2, a3 = self.rows
        zero = a1.scale(mpq(0))
        out = []
        for e1 in (0, 1):
            for e2 in (0, 1):
                for e3 in (0, 1):
                    v = zero
                    if e1:
                        v = v + a1
                    if e2:
                        v = v + a2
                    if e3:
                        v = v + a3
                    out.append(v)
        return out

    def fundamental_cell(self) -> Polytope:
        """The closed fundamental parallelepiped (exact backends)."""
        return hull(self.fundamental_corners(), name="fundamental-cell")

    def is_interval(self) -> bool:
        return any(isinstance(c, Interval) for r in self.rows for c in r)

    # -- serialization ------------------------------------------------------

    def field_tag(self) -> str:
        for r in self.rows:
            for c in r:
                if isinstance(c, Interval):
                    return "interval"
                if isinstance(c, Quad):
                    return f"quadratic:{c.d}"
        return "rational"

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "field": self.field_tag(),
            "basis": [[format_scalar(c) for c in r] for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Lattice":
        doc = json.loads(text)
        tag = doc.get("field", "rational")
        if tag == "rational":
            fld = RATIONAL
        elif tag == "interval":
            fld = INTERVAL
        elif tag.startswith("quadratic:"):
            fld = quadratic_field(int(tag.split(":", 1)[1]))
        else:
            raise ValueError(f"unknown field tag {tag!r}")
        rows = [
            Vec3(*(parse_scalar(c, fld) for c in row)) for row in doc["basis"]
        ]
        return Lattice(tuple(rows), doc.get("name"))


# --------------------------------------------------------------------------
# point enumeration
# --------------------------------------------------------------------------


def _outer_rational(s: Scalar, upper: bool) -> Scalar:
    if isinstance(s, Interval):
        return s.hi if upper else s.lo
    return s


def enumerate_points(lat: Lattice, lo: Vec3, hi: Vec3) -> list:
    """All lattice vectors in the closed box [lo, hi] (deterministic order).

    Integer coefficient ranges come from applying the inverse-transpose basis
    to the box corners, so the enumeration is provably complete.  For
    interval-valued lattices the result contains every vector that *may* lie
    in the box for some realization (a sound superset).
    """
    det = lat.determinant()
    duals = lat.dual_rows()
    corners = [
        Vec3(
            _outer_rational(lo.x, False) if not ex else _outer_rational(hi.x, True),
            _outer_rational(lo.y, False) if not ey else _outer_rational(hi.y, True),
            _outer_rational(lo.z, False) if not ez else _outer_rational(hi.z, True),
        )
        for ex in (0, 1)
        for ey in (0, 1)
        for ez in (0, 1)
    ]
    for k in range(3):
        if _outer_rational(hi[k], True) < _outer_rational(lo[k], False):
            return []
    ranges = []
    for d in duals:
        vals = [d.dot(c) / det for c in corners]
        lo_n = min(_int_floor(v) for v in vals)
        hi_n = max(_int_ceil(v) for v in vals)
        ranges.append((lo_n, hi_n))
    out = []
    lo_r = Vec3(*(_outer_rational(lo[k], False) for k in range(3)))
    hi_r = Vec3(*(_outer_rational(hi[k], True) for k in range(3)))
    for n1 in range(ranges[0][0], ranges[0][1] + 1):
        for n2 in range(ranges[1][0], ranges[1][1] + 1):
            for n3 in range(ranges[2][0], ranges[2][1] + 1):
                p = lat.point(n1, n2, n3)
                inside = True
                for k in range(3):
                    if _lo(p[k]) > hi_r[k] or _hi(p[k]) < lo_r[k]:
                        inside = False
                        break
                if inside:
                    out.append(p)
    return out


# --------------------------------------------------------------------------
# packing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PackingCertificate:
    """Evidence for or against C + L being a packing."""

    status: str  # "ok" | "fail" | "undecided"
    min_gauge: Scalar
    witness: Vec3
    enumerated: int
    radius_bound: Scalar

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_doc(self) -> dict:
        return {
            "kind": "packing",
            "status": self.status,
            "ok": self.ok,
            "min_gauge": format_scalar(self.min_gauge),
            "min_gauge_approx": to_float(self.min_gauge),
            "witness": [format_scalar(c) for c in self.witness],
            "enumerated": self.enumerated,
            "radius_bound": format_scalar(self.radius_bound),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)


def _scaled_bbox(c: Polytope, r: Scalar) -> tuple:
    """Outer bounding box of r*C; endpoints are exact scalars."""
    lo, hi = c.bbox()
    r_lo, r_hi = _lo(r), _hi(r)
    out_lo, out_hi = [], []
    for k in range(3):
        prods = [
            _lo(lo[k]) * r_lo,
            _lo(lo[k]) * r_hi,
            _hi(hi[k]) * r_lo,
            _hi(hi[k]) * r_hi,
        ]
        out_lo.append(min(prods))
        out_hi.append(max(prods))
    return Vec3(*out_lo), Vec3(*out_hi)


def check_packing(c: Polytope, lat: Lattice) -> PackingCertificate:
    """Find the gauge-minimizing nonzero lattice vector; packing iff >= 2.

    The enumeration radius is max(2, gauge of the cheapest basis vector), so
    the box provably contains the global minimizer as well as every possible
    violator.  Touching translates (min gauge exactly 2) are a legal packing.
    """
    basis_bound = None
    for row in lat.rows:
        g = _hi(gauge(c, row))
        if basis_bound is None or g < basis_bound:
            basis_bound = g
    r_enum = basis_bound if basis_bound > 2 else mpq(2)
    box_lo, box_hi = _scaled_bbox(c, r_enum)
    pts = enumerate_points(lat, box_lo, box_hi)
    candidates = []
    for p in pts:
        if all(_lo(comp) == 0 == _hi(comp) for comp in p):
            continue  # the origin (coefficients all zero give a point interval)
        candidates.append((gauge(c, p), p))
    if not candidates:
        raise ValueError("no nonzero lattice vectors enumerated; degenerate basis?")
    if not lat.is_interval():
        min_gauge, witness = _exact_min(candidates)
        status = "ok" if min_gauge >= 2 else "fail"
        return PackingCertificate(status, min_gauge, witness, len(candidates), r_enum)
    # interval path: compare endpoint-wise, report undecided when straddling
    min_lo = min(_lo(g) for g, _ in candidates)
    min_hi = min(_hi(g) for g, _ in candidates)
    witness = min(
        (p for g, p in candidates if _lo(g) == min_lo),
        key=lambda p: tuple(_lo(comp) for comp in p),
    )
    min_gauge = Interval(min_lo, min_hi)
    if min_lo >= 2:
        status = "ok"
    elif min_hi < 2:
        status = "fail"
    else:
        status = "undecided"
    return PackingCertificate(status, min_gauge, witness, len(candidates), r_enum)


# --------------------------------------------------------------------------
# covering
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverCertificate:
    """Evidence about r C + L covering space.

    ``mode`` is "exact-subtract" (sound and complete: residual empty iff the
    cover holds), "zong" (sufficient only: an empty residual certifies the
    cover, a nonempty one is inconclusive), or "subdivision" (interval data;
    sound in both directions, but may end "undecided" at the depth cap).
    """

    status: str  # "covered" | "uncovered" | "inconclusive" | "undecided"
    mode: str
    radius: Scalar
    region: Optional[Polytope]
    translates: tuple
    residual: Optional[CellComplex]
    inflation: Optional[Scalar] = None
    margin: Optional[Scalar] = None
    witness: Optional[Vec3] = None

    @property
    def covered(self) -> bool:
        return self.status == "covered"

    def to_doc(self) -> dict:
        doc = {
            "kind": "cover",
            "status": self.status,
            "mode": self.mode,
            "radius": format_scalar(self.radius),
            "radius_approx": to_float(self.radius),
            "translates": [[format_scalar(c) for c in t] for t in self.translates],
        }
        if self.region is not None:
            doc["region"] = json.loads(self.region.to_json())
        if self.residual is not None:
            doc["residual"] = [json.loads(cell.to_json()) for cell in self.residual.cells]
            doc["residual_cells"] = len(self.residual.cells)
        if self.inflation is not None:
            doc["inflation"] = format_scalar(self.inflation)
        if self.margin is not None:
            doc["margin"] = format_scalar(self.margin)
        if self.witness is not None:
            doc["witness"] = [format_scalar(c) for c in self.witness]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)


def _sorted_cells(cells: CellComplex) -> CellComplex:
    ordered = sorted(cells.cells, key=lambda p: p._vertex_key())
    return CellComplex(tuple(ordered))


def zong_cover_check(
    c: Polytope, lat: Lattice, r: Scalar, try_equivalent_bases: bool = True
) -> CoverCertificate:
    """Sufficient covering criterion from six distinguished translates.

    With basis a1, a2, a3 take V = {0, a1, a2, a1+a2, a3, a3-a2} and
    P = hull(V); if the translates r C + v for v in V cover P, then r C + L
    covers space.  An empty residual certifies the cover; a nonempty one is
    inconclusive, not a disproof.

    The criterion is sensitive to how the basis is ordered and signed, while
    every signed row permutation generates the same lattice (the change of
    basis is unimodular).  When the given ordering is inconclusive and
    ``try_equivalent_bases`` is set, the remaining 47 signed permutations are
    tried in a fixed order; the certificate's region and translates record
    whichever variant concluded.  If none does, the certificate carries the
    original ordering's residual.
    """
    rows = lat.rows
    zero = rows[0].scale(mpq(0))
    body = c.scale(r)

    def attempt(b1: Vec3, b2: Vec3, b3: Vec3):
        v_set = [zero, b1, b2, b1 + b2, b3, b3 - b2]
        region = hull(v_set, name="zong-region")
        residual = _sorted_cells(
            subtract(region, [body.translate(v) for v in v_set])
        )
        return v_set, region, residual

    first = None
    variants = [((0, 1, 2), (1, 1, 1))]
    if try_equivalent_bases:
        variants = [
            (perm, signs)
            for perm in itertools.permutations((0, 1, 2))
            for signs in itertools.product((1, -1), repeat=3)
        ]
    for perm, signs in variants:
        b1, b2, b3 = (rows[perm[k]].scale(mpq(signs[k])) for k in range(3))
        v_set, region, residual = attempt(b1, b2, b3)
        if first is None:
            first = (v_set, region, residual)
        if residual.is_empty:
            return CoverCertificate(
                status="covered",
                mode="zong",
                radius=r,
                region=region,
                translates=tuple(v_set),
                residual=residual,
            )
    v_set, region, residual = first
    return CoverCertificate(
        status="inconclusive",
        mode="zong",
        radius=r,
        region=region,
        translates=tuple(v_set),
        residual=residual,
    )


def _translate_box(region_lo: Vec3, region_hi: Vec3, c: Polytope, r: Scalar) -> tuple:
    c_lo, c_hi = _scaled_bbox(c, r)
    lo = Vec3(*(region_lo[k] - c_hi[k] for k in range(3)))
    hi = Vec3(*(region_hi[k] - c_lo[k] for k in range(3)))
    return lo, hi


def _exact_cover_check(
    c: Polytope, lat: Lattice, r: Scalar, inflation: Optional[Scalar]
) -> CoverCertificate:
    region = lat.fundamental_cell()
    reg_lo, reg_hi = region.bbox()
    box_lo, box_hi = _translate_box(reg_lo, reg_hi, c, r)
    translates = enumerate_points(lat, box_lo, box_hi)
    body = c.scale(r)
    residual = _sorted_cells(subtract(region, [body.translate(v) for v in translates]))
    status = "covered" if residual.is_empty else "uncovered"
    witness = None
    if not residual.is_empty:
        witness = residual.cells[0].vertex_centroid()
    return CoverCertificate(
        status=status,
        mode="exact-subtract",
        radius=r,
        region=region,
        translates=tuple(translates),
        residual=residual,
        inflation=inflation,
        witness=witness,
    )


def _midpoint_lattice(lat: Lattice) -> Tuple[Lattice, list]:
    """Split an interval lattice into (rational midpoint lattice, row radii).

    Row radii are vectors of rational half-widths; every realization's row i
    is the midpoint row plus a perturbation inside the radius box.
    """
    mids, radii = [], []
    for row in lat.rows:
        mid_c, rad_c = [], []
        for comp in row:
            lo_v, hi_v = _lo(comp), _hi(comp)
            mid_c.append((mpq(lo_v) + mpq(hi_v)) / 2)
            rad_c.append((mpq(hi_v) - mpq(lo_v)) / 2)
        mids.append(Vec3(*mid_c))
        radii.append(Vec3(*rad_c))
    return Lattice(tuple(mids), lat.name), radii


def _row_perturbation_gauge(c: Polytope, radius: Vec3) -> Scalar:
    """Max gauge over the symmetric perturbation box (attained at a corner)."""
    worst = mpq(0)
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                corner = Vec3(radius.x * sx, radius.y * sy, radius.z * sz)
                g = _hi(gauge(c, corner))
                if g > worst:
                    worst = g
    return worst


def fundamental_cover_check(
    c: Polytope,
    lat: Lattice,
    r: Scalar,
    inflation: Optional[Scalar] = None,
) -> CoverCertificate:
    """Decide whether r C + L covers space.

    Exact backends: subtract from one closed fundamental parallelepiped every
    translate whose dilate can meet its bounding box.  The residual is empty
    iff the cover holds — sound and complete: translates of the cell tile
    space, and a finite union of closed translates covers the cell iff the
    leftover of the subtraction has no 3-dimensional cell, which the exact
    cell complex decides.

    Interval-valued lattices reduce to the rational midpoint lattice with a
    rigorous perturbation margin.  Writing each realization row as midpoint
    row + delta with delta in the row's radius box, a translate with
    coefficients n differs from its midpoint translate by gauge at most
    H = sum_i |n_i| * max-corner-gauge(radius box i) (gauge is convex and,
    for the centrally symmetric bodies handled here, even).  Covering by the
    midpoint lattice at radius r - H then certifies covering by every
    realization at r; a midpoint-lattice deep point at depth > r + H refutes
    every realization.  Between the two margins the check reports
    "undecided" — callers are expected to inflate claimed radii (the
    ``inflation`` factor, recorded in the certificate) beyond the data
    width.  An interval radius over an exact lattice is handled the same
    way: verify at its lower endpoint, refute at its upper.
    """
    if any(isinstance(f.offset, Interval) for f in c.facets) or any(
        isinstance(comp, Interval) for v in c.vertices for comp in v
    ):
        raise ValueError("interval-valued bodies are not supported; use an exact body")
    if inflation is not None:
        r = r * (1 + inflation)

    if not lat.is_interval():
        if not isinstance(r, Interval):
            return _exact_cover_check(c, lat, r, inflation)
        cert = _exact_cover_check(c, lat, r.lo, inflation)
        if cert.covered:
            return cert
        refute = _exact_cover_check(c, lat, r.hi, inflation)
        if not refute.covered:
            return refute
        return CoverCertificate(
            status="undecided",
            mode="exact-subtract",
            radius=r,
            region=cert.region,
            translates=cert.translates,
            residual=cert.residual,
            inflation=inflation,
            witness=cert.witness,
        )

    mid_lat, radii = _midpoint_lattice(lat)
    row_gauges = [_row_perturbation_gauge(c, rad) for rad in radii]
    r_low, r_high = _lo(r), _hi(r)

    # Coefficient ranges of the translates the certificate may use, taken
    # from the enumeration box of the midpoint cell at the outer radius.
    region = mid_lat.fundamental_cell()
    reg_lo, reg_hi = region.bbox()
    box_lo, box_hi = _translate_box(reg_lo, reg_hi, c, r_high)
    det = mid_lat.determinant()
    duals = mid_lat.dual_rows()
    corners = [
        Vec3(
            box_lo.x if not ex else box_hi.x,
            box_lo.y if not ey else box_hi.y,
            box_lo.z if not ez else box_hi.z,
        )
        for ex in (0, 1)
        for ey in (0, 1)
        for ez in (0, 1)
    ]
    margin = mpq(0)
    for d, g in zip(duals, row_gauges):
        vals = [d.dot(q) / det for q in corners]
        n_max = max(abs(_int_floor(min(vals))), abs(_int_ceil(max(vals))))
        margin += mpq(n_max) * g

    rho = r_low - margin
    if rho <= 0:
        raise ValueError("perturbation margin swallows the radius; data too wide")
    verify = _exact_cover_check(c, mid_lat, rho, inflation)
    if verify.covered:
        return CoverCertificate(
            status="covered",
            mode="midpoint-margin",
            radius=r,
            region=verify.region,
            translates=verify.translates,
            residual=verify.residual,
            inflation=inflation,
            margin=margin,
        )
    # Refutation for every realization needs a deep point beyond r + margin.
    deepest = None
    for p in _residual_candidate_points(verify.residual):
        w = lattice_distance(c, mid_lat, p, r_high + margin + 1)
        if deepest is None or w.value > deepest.value:
            deepest = w
    if deepest is not None and deepest.value > r_high + margin:
        return CoverCertificate(
            status="uncovered",
            mode="midpoint-margin",
            radius=r,
            region=verify.region,
            translates=verify.translates,
            residual=verify.residual,
            inflation=inflation,
            margin=margin,
            witness=deepest.point,
        )
    return CoverCertificate(
        status="undecided",
        mode="midpoint-margin",
        radius=r,
        region=verify.region,
        translates=verify.translates,
        residual=verify.residual,
        inflation=inflation,
        margin=margin,
    )


# --------------------------------------------------------------------------
# gamma brackets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DeepPointWitness:
    """A point far from the lattice: min over neighbors of gauge >= value.

    ``bound`` is the enumeration radius: the neighbor set provably contains
    every lattice vector within gauge ``bound`` of the point, so the min over
    it is the true lattice distance whenever value <= bound.
    """

    point: Vec3
    value: Scalar
    nearest: Vec3
    neighbors: int
    bound: Scalar

    def to_doc(self) -> dict:
        return {
            "point": [format_scalar(c) for c in self.point],
            "value": format_scalar(self.value),
            "value_approx": to_float(self.value),
            "nearest": [format_scalar(c) for c in self.nearest],
            "neighbors": self.neighbors,
            "enumeration_bound": format_scalar(self.bound),
        }


@dataclass(frozen=True)
class GammaBracket:
    """lower <= gamma(C, L) <= upper, with certificates on both sides."""

    lower: Scalar
    upper: Scalar
    status: str  # "exact" | "bracket"
    lower_witness: DeepPointWitness
    upper_cover: CoverCertificate
    packing: PackingCertificate
    iterations: int

    def to_doc(self) -> dict:
        return {
            "kind": "gamma-bracket",
            "status": self.status,
            "lower": format_scalar(self.lower),
            "upper": format_scalar(self.upper),
            "lower_approx": to_float(self.lower),
            "upper_approx": to_float(self.upper),
            "lower_witness": self.lower_witness.to_doc(),
            "upper_cover": self.upper_cover.to_doc(),
            "packing": self.packing.to_doc(),
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)


def lattice_distance(
    c: Polytope, lat: Lattice, p: Vec3, bound: Scalar
) -> DeepPointWitness:
    """min over lattice vectors of gauge(c, p - v), certified via ``bound``.

    Enumerates every v with gauge(c, p - v) <= bound; provided the true
    minimum is <= bound (callers pass an upper bound for the covering
    radius), the enumerated minimum is the global one.
    """
    c_lo, c_hi = _scaled_bbox(c, bound)
    box_lo = Vec3(*(p[k] - c_hi[k] for k in range(3)))
    box_hi = Vec3(*(p[k] - c_lo[k] for k in range(3)))
    pts = enumerate_points(lat, box_lo, box_hi)
    if not pts:
        raise ValueError("enumeration bound too small: no lattice points near p")
    vals = [(gauge(c, p - v), v) for v in pts]
    best, nearest = _exact_min(vals)
    return DeepPointWitness(p, best, nearest, len(pts), bound)


def _residual_candidate_points(residual: CellComplex) -> list:
    """Deep-point candidates: cell vertices, centroids, and the centroids of
    hull-shaped connected components (components joined across shared
    2-dimensional faces; a component hull only counts when its volume equals
    the summed cell volumes, i.e. when the union really is convex)."""
    points = []
    seen = set()

    def push(p: Vec3) -> None:
        if p not in seen:
            seen.add(p)
            points.append(p)

    for cell in residual.cells:
        for v in cell.vertices:
            push(v)
        push(cell.vertex_centroid())
    n = len(residual.cells)
    if 1 < n <= 24:
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if intersect(residual.cells[i], residual.cells[j]).dim == 2:
                    parent[find(i)] = find(j)
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        for members in groups.values():
            if len(members) < 2:
                continue
            cells = [residual.cells[i] for i in members]
            union_hull = hull([v for cell in cells for v in cell.vertices])
            total = cells[0].volume()
            for cell in cells[1:]:
                total = total + cell.volume()
            if union_hull.dim == 3 and sign(union_hull.volume() - total) == 0:
                push(union_hull.vertex_centroid())
    return points


def gamma_bracket(
    c: Polytope, lat: Lattice, tol: Scalar = mpq(1, 1000), max_iter: int = 60
) -> GammaBracket:
    """Certified two-sided bracket for gamma(C, L), exact when it closes.

    Every lower bound is backed by a deep-point witness (a point whose
    lattice distance is certified by complete neighbor enumeration); every
    upper bound by an exact covering certificate.  New candidate radii come
    from the residual complex of a failed covering test: its vertices, cell
    centroids, and convex-component centroids.  When the deepest candidate's
    own radius certifies the cover, lower == upper and gamma is exact.
    """
    packing = check_packing(c, lat)
    if not packing.ok:
        raise ValueError("C + L is not a packing; gamma is undefined")
    region = lat.fundamental_cell()

    upper = None
    for v in region.vertices:
        g = gauge(c, v)
        if upper is None or g > upper:
            upper = g
    if sign(upper) == 0:
        upper = mpq(1)

    def witness_at(p: Vec3) -> DeepPointWitness:
        return lattice_distance(c, lat, p, upper)

    candidates = list(region.vertices) + [region.vertex_centroid()]
    best = witness_at(candidates[0])
    for p in candidates[1:]:
        w = witness_at(p)
        if w.value > best.value or (
            w.value == best.value
            and (w.point.x, w.point.y, w.point.z) < (best.point.x, best.point.y, best.point.z)
        ):
            best = w
    lower = best.value
    upper_cover = None
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        probe = fundamental_cover_check(c, lat, lower)
        if probe.covered:
            return GammaBracket(
                lower, lower, "exact", best, probe, packing, iterations
            )
        improved = False
        for p in _residual_candidate_points(probe.residual):
            w = witness_at(p)
            if w.value > lower:
                lower, best, improved = w.value, w, True
        if improved:
            continue
        # no candidate progress: bisect the upper side
        mid = (lower + upper) / 2
        probe = fundamental_cover_check(c, lat, mid)
        if probe.covered:
            upper, upper_cover = mid, probe
        else:
            for p in _residual_candidate_points(probe.residual):
                w = witness_at(p)
                if w.value > lower:
                    lower, best = w.value, w
        if upper - lower <= tol:
            break

    if upper_cover is None:
        upper_cover = fundamental_cover_check(c, lat, upper)
    return GammaBracket(lower, upper, "bracket", best, upper_cover, packing, iterations)


def estimate_gamma(
    c: Polytope,
    lat: Lattice,
    tol: Scalar = mpq(1, 1000),
    max_boxes: int = 200_000,
) -> tuple:
    """Certified bracket for the covering radius by branch-and-bound.

    gamma(C, L) = max over a fundamental box of f(x) = min over lattice
    vectors v of gauge(C, x - v).  Per box, max f <= min over v of the
    corner maximum of gauge (gauge is convex, so the box maximum sits at a
    corner); the global lower bound is the best certified f(midpoint).
    Interval-valued data is handled endpoint-wise, so the bracket encloses
    gamma for every realization.  Returns (lower, upper, boxes_examined).
    """
    corners = lat.fundamental_corners()
    root_lo = Vec3(*(min(_lo(v[k]) for v in corners) for k in range(3)))
    root_hi = Vec3(*(max(_hi(v[k]) for v in corners) for k in range(3)))
    root_corners = [
        Vec3(
            root_lo.x if not ex else root_hi.x,
            root_lo.y if not ey else root_hi.y,
            root_lo.z if not ez else root_hi.z,
        )
        for ex in (0, 1)
        for ey in (0, 1)
        for ez in (0, 1)
    ]
    r0 = None
    for v in root_corners:
        g = _hi(gauge(c, v))
        if r0 is None or g > r0:
            r0 = g

    def point_lower(p: Vec3, bound: Scalar) -> Scalar:
        c_lo, c_hi = _scaled_bbox(c, bound)
        pts = enumerate_points(
            lat,
            Vec3(*(p[k] - c_hi[k] for k in range(3))),
            Vec3(*(p[k] - c_lo[k] for k in range(3))),
        )
        if not pts:
            return mpq(0)
        return min(_lo(gauge(c, p - v)) for v in pts)

    def box_upper(b_lo: Vec3, b_hi: Vec3, bound: Scalar) -> Scalar:
        t_lo, t_hi = _translate_box(b_lo, b_hi, c, bound)
        pts = enumerate_points(lat, t_lo, t_hi)
        bcs = [
            Vec3(
                b_lo.x if not ex else b_hi.x,
                b_lo.y if not ey else b_hi.y,
                b_lo.z if not ez else b_hi.z,
            )
            for ex in (0, 1)
            for ey in (0, 1)
            for ez in (0, 1)
        ]
        best = None
        for v in pts:
            worst = None
            for q in bcs:
                g = _hi(gauge(c, q - v))
                if worst is None or g > worst:
                    worst = g
            if best is None or worst < best:
                best = worst
        return bound if best is None else min(best, bound)

    center = Vec3(*((root_lo[k] + root_hi[k]) / 2 for k in range(3)))
    lower = point_lower(center, r0)
    root_ub = box_upper(root_lo, root_hi, r0)
    active = [(root_ub, root_lo, root_hi)]
    boxes = 1
    while active and boxes < max_boxes:
        # pop the box with the largest upper bound (exact comparisons)
        idx = 0
        for i in range(1, len(active)):
            if active[i][0] > active[idx][0]:
                idx = i
        ub, b_lo, b_hi = active.pop(idx)
        if ub - lower <= tol:
            active.append((ub, b_lo, b_hi))
            break
        mid = Vec3(*((b_lo[k] + b_hi[k]) / 2 for k in range(3)))
        for ex in (0, 1):
            for ey in (0, 1):
                for ez in (0, 1):
                    c_lo = Vec3(
                        b_lo.x if not ex else mid.x,
                        b_lo.y if not ey else mid.y,
                        b_lo.z if not ez else mid.z,
                    )
                    c_hi = Vec3(
                        mid.x if not ex else b_hi.x,
                        mid.y if not ey else b_hi.y,
                        mid.z if not ez else b_hi.z,
                    )
                    boxes += 1
                    child_ub = box_upper(c_lo, c_hi, ub)
                    child_mid = Vec3(*((c_lo[k] + c_hi[k]) / 2 for k in range(3)))
                    cand = point_lower(child_mid, ub)
                    if cand > lower:
                        lower = cand
                    if child_ub > lower:
                        active.append((child_ub, c_lo, c_hi))
        active = [entry for entry in active if entry[0] > lower]
    upper = lower
    for entry in active:
        if entry[0] > upper:
            upper = entry[0]
    return lower, upper, boxes
