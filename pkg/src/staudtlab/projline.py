"""The projective line over a unital ring.

Points are unit orbits of admissible pairs in R^2 (rows of invertible
2x2 arrays, R acting on the left).  The module provides the distant
relation, cross ratios as unit-conjugacy classes, the harmonic
predicate (cross ratio -1), the fourth-harmonic formula, and the
distant-graph component decomposition.

Frame convention: cross_ratio(p1, p2, p3, p4) reads p1, p2, p3 as the
reference points infinity, 0, 1; the returned class is the chart
coordinate of p4.
"""

from __future__ import annotations

from itertools import product

from .errors import (
    FrameDegenerateError,
    InfiniteRingError,
    NonUnitDifferenceError,
    NotAdmissibleError,
    NotAffineError,
    NotResolvableError,
    TwoNotUnitError,
    UnsupportedError,
)
from .rings import Element, QuatRing, RationalRing, Ring


class _Infinity:
    """Sentinel for the scalar slot 'point at infinity'."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INFINITY = _Infinity()


class ProjPoint:
    """Canonical representative of a unit orbit of an admissible pair."""

    __slots__ = ("ring", "rep")

    def __init__(self, ring, rep):
        self.ring = ring
        self.rep = rep

    def __eq__(self, other):
        return (
            isinstance(other, ProjPoint)
            and self.rep == other.rep
            and (self.ring is other.ring or self.ring == other.ring)
        )

    def __hash__(self):
        return hash(self.rep)

    def __repr__(self):
        return f"<point {render_point(self)} over {self.ring.spec_string()}>"

    def __str__(self):
        return render_point(self)


def render_point(p: ProjPoint) -> str:
    a, b = p.rep
    return f"[{p.ring.render(a)} : {p.ring.render(b)}]"


class _LineCache:
    """Per-ring caches for the finite line machinery."""

    def __init__(self, ring):
        self.ring = ring
        self.admissible = None  # frozenset of raw pairs
        self.canon = {}  # raw pair -> canonical rep
        self.points = None  # sorted tuple of ProjPoint
        self.distant = {}  # (rep, rep) -> bool
        self.conj = {}  # (rep1, rep2) -> {p3 rep: conjugate rep}
        self.coords = {}  # (rep1, rep2) -> {rep: (y1, y2)} with y2 a unit


def _cache(ring) -> _LineCache:
    c = ring.__dict__.get("_line_cache")
    if c is None:
        c = _LineCache(ring)
        ring.__dict__["_line_cache"] = c
    return c


def _admissible_set(ring):
    """All admissible pairs of a finite ring.

    Computed as the orbit of (1, 0) under right multiplication by
    elementary and diagonal-unit matrices; finite rings are semilocal,
    so these generate the whole general linear group and the orbit is
    exactly the set of first rows of invertible arrays.
    """
    c = _cache(ring)
    if c.admissible is not None:
        return c.admissible
    if not ring.is_finite:
        raise InfiniteRingError(
            f"cannot enumerate admissible pairs of {ring.spec_string()}"
        )
    elems = ring.element_list()
    units = ring.units()
    start = (ring.one, ring.zero)
    seen = {start}
    frontier = [start]
    mul, add = ring.mul, ring.add
    while frontier:
        new = []
        for a, b in frontier:
            candidates = [(b, a)]
            for t in elems:
                candidates.append((a, add(mul(a, t), b)))
                candidates.append((add(a, mul(b, t)), b))
            for u in units:
                candidates.append((mul(a, u), b))
                candidates.append((a, mul(b, u)))
            for pair in candidates:
                if pair not in seen:
                    seen.add(pair)
                    new.append(pair)
        frontier = new
    c.admissible = frozenset(seen)
    return c.admissible


def is_admissible_pair(ring: Ring, a, b) -> bool:
    """True iff (a, b) extends to an invertible 2x2 array."""
    a, b = _payload(ring, a), _payload(ring, b)
    if ring.is_finite:
        return (a, b) in _admissible_set(ring)
    if ring.is_division:
        return (a, b) != (ring.zero, ring.zero)
    raise InfiniteRingError(
        f"admissibility undecided for infinite {ring.spec_string()}"
    )


def _payload(ring, x):
    if isinstance(x, Element):
        if x.ring != ring:
            raise ValueError("element belongs to a different ring")
        return x.value
    return ring.canonical(x)


def _canonical_rep(ring, pair):
    """Lexicographically least member of the left unit orbit of pair."""
    if ring.is_finite:
        c = _cache(ring)
        hit = c.canon.get(pair)
        if hit is not None:
            return hit
        idx = ring.element_index
        mul = ring.mul
        a, b = pair
        best = None
        best_key = None
        for u in ring.units():
            cand = (mul(u, a), mul(u, b))
            key = (idx(cand[0]), idx(cand[1]))
            if best_key is None or key < best_key:
                best, best_key = cand, key
        for u in ring.units():
            c.canon[(mul(u, a), mul(u, b))] = best
        return best
    # infinite: normalize the first unit coordinate to 1
    a, b = pair
    if ring.is_unit(a):
        ia = ring.inv(a)
        return (ring.one, ring.mul(ia, b))
    if ring.is_unit(b):
        ib = ring.inv(b)
        return (ring.mul(ib, a), ring.one)
    raise UnsupportedError(
        f"cannot canonicalize a pair without a unit coordinate over "
        f"{ring.spec_string()}"
    )


def canonical_point(ring: Ring, a, b) -> ProjPoint:
    a, b = _payload(ring, a), _payload(ring, b)
    if not is_admissible_pair(ring, a, b):
        raise NotAdmissibleError(
            f"({ring.render(a)}, {ring.render(b)}) is not admissible"
        )
    return ProjPoint(ring, _canonical_rep(ring, (a, b)))


def embed_scalar(ring: Ring, x) -> ProjPoint:
    return canonical_point(ring, _payload(ring, x), ring.one)


def infinity(ring: Ring) -> ProjPoint:
    p = ring.__dict__.get("_inf_point")
    if p is None:
        p = canonical_point(ring, ring.one, ring.zero)
        ring.__dict__["_inf_point"] = p
    return p


def is_affine(p: ProjPoint) -> bool:
    return p.ring.is_unit(p.rep[1])


def affine_coordinate(p: ProjPoint) -> Element:
    """Chart coordinate b^-1 a of a point whose second coordinate is a unit."""
    a, b = p.rep
    ring = p.ring
    if not ring.is_unit(b):
        raise NotAffineError(f"{render_point(p)} has no affine coordinate")
    return Element(ring, ring.mul(ring.inv(b), a))


def rows_invertible(ring: Ring, r1, r2) -> bool:
    """Invertibility of the 2x2 array with rows r1, r2."""
    if ring.commutative:
        det = ring.sub(
            ring.mul(r1[0], r2[1]), ring.mul(r1[1], r2[0])
        )
        return ring.is_unit(det)
    if ring.is_division:
        if r1 == (ring.zero, ring.zero) or r2 == (ring.zero, ring.zero):
            return False
        # row reduce with a unit pivot; over a division ring any
        # nonzero coordinate is a pivot
        a, b = r1
        c, d = r2
        if a != ring.zero:
            f = ring.mul(c, ring.inv(a))
            rem = ring.sub(d, ring.mul(f, b))
            return rem != ring.zero
        f = ring.mul(d, ring.inv(b))
        rem = ring.sub(c, ring.mul(f, a))
        return rem != ring.zero
    if ring.is_finite:
        from .rings import det_mod, is_prime

        d = ring.prime_dimension
        if d is not None and is_prime(ring.characteristic):
            # (x, y) -> x r1 + y r2 is linear over the prime field;
            # test the induced 2d x 2d matrix instead of scanning R^2
            p = ring.characteristic
            rows = []
            for t in range(d):
                coords = tuple(1 if c == t else 0 for c in range(d))
                b = ring.unflatten(coords)
                rows.append(
                    ring.flatten(ring.mul(b, r1[0]))
                    + ring.flatten(ring.mul(b, r1[1]))
                )
                rows.append(
                    ring.flatten(ring.mul(b, r2[0]))
                    + ring.flatten(ring.mul(b, r2[1]))
                )
            # keep row order (x-basis, y-basis) interleaved; any order works
            return det_mod(rows, p) != 0
        # bijectivity of (x, y) -> x r1 + y r2 on R^2
        mul, add = ring.mul, ring.add
        seen = set()
        for x, y in product(ring.element_list(), repeat=2):
            img = (
                add(mul(x, r1[0]), mul(y, r2[0])),
                add(mul(x, r1[1]), mul(y, r2[1])),
            )
            if img in seen:
                return False
            seen.add(img)
        return True
    raise UnsupportedError(
        f"no invertibility procedure over {ring.spec_string()}"
    )


def distant(p: ProjPoint, q: ProjPoint) -> bool:
    """The distant (non-neighbouring) relation."""
    if p.ring is not q.ring and p.ring != q.ring:
        raise ValueError("points live on different lines")
    ring = p.ring
    if ring.is_division:
        return p.rep != q.rep
    if ring.commutative:
        return rows_invertible(ring, p.rep, q.rep)
    c = _cache(ring)
    key = (p.rep, q.rep)
    hit = c.distant.get(key)
    if hit is None:
        hit = rows_invertible(ring, p.rep, q.rep)
        c.distant[key] = hit
        c.distant[(q.rep, p.rep)] = hit
    return hit


def _combine(ring, s, u1, t, u2):
    mul, add = ring.mul, ring.add
    return (
        add(mul(s, u1[0]), mul(t, u2[0])),
        add(mul(s, u1[1]), mul(t, u2[1])),
    )


def _conj_chart(ring, u1, u2):
    """Map p3 -> fourth harmonic of (p1, p2, p3) for a fixed distant pair."""
    c = _cache(ring)
    key = (u1, u2)
    hit = c.conj.get(key)
    if hit is not None:
        return hit
    table = {}
    add, sub, mul = ring.add, ring.sub, ring.mul
    units = ring.units()
    scaled1 = [(mul(s, u1[0]), mul(s, u1[1])) for s in units]
    scaled2 = [(mul(t, u2[0]), mul(t, u2[1])) for t in units]
    for su1 in scaled1:
        for tu2 in scaled2:
            p3 = _canonical_rep(
                ring, (add(su1[0], tu2[0]), add(su1[1], tu2[1]))
            )
            conj = _canonical_rep(
                ring, (sub(tu2[0], su1[0]), sub(tu2[1], su1[1]))
            )
            table[p3] = conj
    c.conj[key] = table
    return table


def _coords_chart(ring, u1, u2):
    """Map canonical rep -> (y1, y2) with y2 a unit, rep = y1 u1 + y2 u2."""
    c = _cache(ring)
    key = (u1, u2)
    hit = c.coords.get(key)
    if hit is not None:
        return hit
    table = {}
    add, mul = ring.add, ring.mul
    scaled1 = [(y1, mul(y1, u1[0]), mul(y1, u1[1])) for y1 in ring.element_list()]
    for y2 in ring.units():
        a2, b2 = mul(y2, u2[0]), mul(y2, u2[1])
        for y1, a1, b1 in scaled1:
            rep = _canonical_rep(ring, (add(a1, a2), add(b1, b2)))
            if rep not in table:
                table[rep] = (y1, y2)
    c.coords[key] = table
    return table


def _solve_coords(ring, u1, u2, target):
    """(y1, y2) with target = y1 u1 + y2 u2, or None if y2 is not a unit.

    Assumes (u1, u2) is a basis of R^2.
    """
    a, b = u1
    cc, d = u2
    e, f = target
    if ring.commutative:
        det = ring.sub(ring.mul(a, d), ring.mul(cc, b))
        dinv = ring.inv(det)
        y1 = ring.mul(ring.sub(ring.mul(e, d), ring.mul(cc, f)), dinv)
        y2 = ring.mul(ring.sub(ring.mul(a, f), ring.mul(e, b)), dinv)
        return (y1, y2) if ring.is_unit(y2) else None
    if ring.is_division:
        if a != ring.zero:
            ia = ring.inv(a)
            schur = ring.sub(d, ring.mul(ring.mul(cc, ia), b))
            y2 = ring.mul(
                ring.sub(f, ring.mul(ring.mul(e, ia), b)), ring.inv(schur)
            )
            y1 = ring.mul(ring.sub(e, ring.mul(y2, cc)), ia)
        else:
            ib = ring.inv(b)
            schur = ring.sub(cc, ring.mul(ring.mul(d, ib), a))
            y2 = ring.mul(
                ring.sub(e, ring.mul(ring.mul(f, ib), a)), ring.inv(schur)
            )
            y1 = ring.mul(ring.sub(f, ring.mul(y2, d)), ib)
        return (y1, y2) if y2 != ring.zero else None
    if ring.is_finite:
        table = _coords_chart(ring, u1, u2)
        return table.get(_canonical_rep(ring, target))
    raise UnsupportedError(
        f"cannot solve chart coordinates over {ring.spec_string()}"
    )


class CrossRatio:
    """Unit-conjugacy class of a chart coordinate.

    Equality mode is fixed by the ring kind: the element itself for
    commutative rings, the reduced trace and norm pair for rational
    quaternions, and the full conjugacy orbit for finite rings.
    """

    __slots__ = ("ring", "rep", "mode")

    def __init__(self, ring, rep):
        self.ring = ring
        self.rep = rep
        if ring.commutative:
            self.mode = "plain"
        elif isinstance(ring, QuatRing) and isinstance(
            ring.base, RationalRing
        ):
            self.mode = "trace-norm"
        elif ring.is_finite:
            self.mode = "orbit"
        else:
            raise UnsupportedError(
                f"no conjugacy test for {ring.spec_string()}"
            )

    def _orbit(self):
        ring = self.ring
        out = set()
        for u in ring.units():
            out.add(ring.mul(ring.mul(u, self.rep), ring.inv(u)))
        return frozenset(out)

    def _trace_norm(self):
        ring = self.ring
        w = self.rep[0]
        return (ring.base.add(w, w), ring.norm(self.rep))

    def key(self):
        if self.mode == "plain":
            return self.rep
        if self.mode == "trace-norm":
            return self._trace_norm()
        return self._orbit()

    def __eq__(self, other):
        if not isinstance(other, CrossRatio):
            return NotImplemented
        if self.ring != other.ring:
            return False
        return self.key() == other.key()

    def __hash__(self):
        return hash((self.ring, self.mode, self.key()))

    def is_minus_one(self):
        # the class of -1 is the singleton {-1} in every mode
        return self.rep == self.ring.from_int(-1)

    def __repr__(self):
        return (
            f"CrossRatio({self.ring.render(self.rep)}, mode={self.mode})"
        )


def cross_ratio_class(ring: Ring, x) -> CrossRatio:
    return CrossRatio(ring, _payload(ring, x))


def cross_ratio(
    p1: ProjPoint, p2: ProjPoint, p3: ProjPoint, p4: ProjPoint
) -> CrossRatio:
    """Conjugacy class of the chart coordinate of p4 in the frame p1, p2, p3."""
    ring = p1.ring
    if not (distant(p1, p2) and distant(p1, p3) and distant(p2, p3)):
        raise FrameDegenerateError("frame points are not pairwise distant")
    st = _solve_coords(ring, p1.rep, p2.rep, p3.rep)
    if st is None:
        raise FrameDegenerateError("frame solve failed")
    s, t = st
    if not (ring.is_unit(s) and ring.is_unit(t)):
        raise FrameDegenerateError("frame solve produced non-unit weights")
    yy = _solve_coords(ring, p1.rep, p2.rep, p4.rep)
    if yy is None:
        raise NotResolvableError(
            "fourth point is not distant from the first frame point"
        )
    y1, y2 = yy
    # u4 = y1 u1 + y2 u2 = (y1 s^-1) w1 + (y2 t^-1) w2 with w1 = s u1
    ratio = ring.mul(
        ring.mul(t, ring.inv(y2)), ring.mul(y1, ring.inv(s))
    )
    return CrossRatio(ring, ratio)


def harmonic_conjugate(
    p1: ProjPoint, p2: ProjPoint, p3: ProjPoint
) -> ProjPoint:
    """The unique point making the quadruple harmonic."""
    ring = p1.ring
    if not (distant(p1, p2) and distant(p1, p3) and distant(p2, p3)):
        raise FrameDegenerateError("frame points are not pairwise distant")
    if ring.is_finite and not ring.commutative:
        table = _conj_chart(ring, p1.rep, p2.rep)
        rep = table.get(p3.rep)
        if rep is None:
            raise FrameDegenerateError("frame solve failed")
        return ProjPoint(ring, rep)
    st = _solve_coords(ring, p1.rep, p2.rep, p3.rep)
    if st is None or not (ring.is_unit(st[0]) and ring.is_unit(st[1])):
        raise FrameDegenerateError("frame solve produced non-unit weights")
    s, t = st
    su1 = (ring.mul(s, p1.rep[0]), ring.mul(s, p1.rep[1]))
    tu2 = (ring.mul(t, p2.rep[0]), ring.mul(t, p2.rep[1]))
    rep = (ring.sub(tu2[0], su1[0]), ring.sub(tu2[1], su1[1]))
    return ProjPoint(ring, _canonical_rep(ring, rep))


def is_harmonic(
    p1: ProjPoint, p2: ProjPoint, p3: ProjPoint, p4: ProjPoint
) -> bool:
    """Cross ratio equals the class of -1."""
    return cross_ratio(p1, p2, p3, p4).is_minus_one()


def quadruple_is_harmonic(p1, p2, p3, p4) -> bool:
    """Total version of is_harmonic: unmet distantness means not harmonic."""
    try:
        if not (distant(p1, p2) and distant(p1, p3) and distant(p2, p3)):
            return False
        if not (distant(p4, p1) and distant(p4, p2)):
            return False
        return p4 == harmonic_conjugate(p1, p2, p3)
    except (FrameDegenerateError, NotResolvableError):
        return False


def _as_point(ring, x):
    if isinstance(x, ProjPoint):
        return x
    if x is INFINITY:
        return infinity(ring)
    return embed_scalar(ring, x)


def _apply_matrix(ring, rep, m):
    a, b = rep
    return (
        ring.add(ring.mul(a, m[0][0]), ring.mul(b, m[1][0])),
        ring.add(ring.mul(a, m[0][1]), ring.mul(b, m[1][1])),
    )


def fourth_harmonic(ring: Ring, a1, a2, a3) -> ProjPoint:
    """Fourth harmonic point of three scalars (INFINITY allowed).

    Affine inputs use the exact inverse formula; the result is the
    point at infinity exactly when a3 is the halved sum of a1 and a2.
    A slot holding INFINITY is removed by composing the chart map
    x -> (x + c)^-1 (translation, then coordinate swap), computing
    in the new chart and mapping the result back.
    """
    two = ring.from_int(2)
    if not ring.is_unit(two):
        raise TwoNotUnitError(f"2 is not a unit in {ring.spec_string()}")
    scalars = [a1, a2, a3]
    pts = [_as_point(ring, x) for x in scalars]
    if not (
        distant(pts[0], pts[1])
        and distant(pts[0], pts[2])
        and distant(pts[1], pts[2])
    ):
        raise FrameDegenerateError("inputs are not pairwise distant")
    affine = [x is not INFINITY for x in scalars]
    vals = [None if x is INFINITY else _payload(ring, x) for x in scalars]
    if all(affine):
        v1, v2, v3 = vals
        d1 = ring.sub(v1, v3)
        d2 = ring.sub(v2, v3)
        # pairwise distant embedded scalars have unit differences
        i1 = ring.inv(d1)
        i2 = ring.inv(d2)
        s = ring.add(i1, i2)
        if s == ring.zero:
            return infinity(ring)
        if not ring.is_unit(s):
            raise NonUnitDifferenceError(
                Element(ring, s), "sum of inverted differences is not a unit"
            )
        a4 = ring.mul(
            ring.inv(s),
            ring.add(ring.mul(i1, v1), ring.mul(i2, v2)),
        )
        return embed_scalar(ring, a4)
    # pick a translation making every affine input a unit, then swap
    c = None
    candidates = (
        ring.element_list()
        if ring.is_finite
        else (ring.from_int(k) for k in range(64))
    )
    for cand in candidates:
        if all(
            ring.is_unit(ring.add(v, cand))
            for v, aff in zip(vals, affine)
            if aff
        ):
            c = cand
            break
    if c is None:
        bad = next(v for v, aff in zip(vals, affine) if aff)
        raise NonUnitDifferenceError(
            Element(ring, bad),
            "no translation makes the affine inputs invertible",
        )
    moved = [
        ring.inv(ring.add(v, c)) if aff else ring.zero
        for v, aff in zip(vals, affine)
    ]
    image = fourth_harmonic(ring, *moved)
    back = (
        (ring.neg(c), ring.one),
        (ring.one, ring.zero),
    )
    rep = _apply_matrix(ring, image.rep, back)
    return canonical_point(ring, rep[0], rep[1])


def wachs_harmonic(ring: Ring, a1, a2, a3, a4) -> bool:
    """Harmonicity via the four-term product criterion.

    Evaluates (a2-a4)^-1 (a2-a3) (a1-a3)^-1 (a1-a4) in exactly this
    order and compares with -1.
    """
    v = [_payload(ring, x) for x in (a1, a2, a3, a4)]
    d24 = ring.sub(v[1], v[3])
    d23 = ring.sub(v[1], v[2])
    d13 = ring.sub(v[0], v[2])
    d14 = ring.sub(v[0], v[3])
    for d in (d24, d13):
        if not ring.is_unit(d):
            raise NonUnitDifferenceError(Element(ring, d))
    prod_ = ring.mul(
        ring.mul(ring.inv(d24), d23), ring.mul(ring.inv(d13), d14)
    )
    return prod_ == ring.from_int(-1)


def line_points(ring: Ring):
    """All points of the line over a finite ring, canonically ordered."""
    c = _cache(ring)
    if c.points is not None:
        return c.points
    pairs = _admissible_set(ring)
    idx = ring.element_index
    reps = {_canonical_rep(ring, pair) for pair in pairs}
    pts = tuple(
        ProjPoint(ring, rep)
        for rep in sorted(reps, key=lambda r: (idx(r[0]), idx(r[1])))
    )
    c.points = pts
    return pts


def point_sort_key(p: ProjPoint):
    idx = p.ring.element_index
    return (idx(p.rep[0]), idx(p.rep[1]))


def distant_graph_components(ring: Ring):
    """Connected components of the distant graph, deterministically ordered."""
    pts = line_points(ring)
    unvisited = set(pts)
    components = []
    for start in pts:
        if start not in unvisited:
            continue
        unvisited.discard(start)
        comp = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for p in frontier:
                for q in list(unvisited):
                    if distant(p, q):
                        unvisited.discard(q)
                        comp.append(q)
                        nxt.append(q)
            frontier = nxt
        components.append(tuple(sorted(comp, key=point_sort_key)))
    components.sort(key=lambda comp: point_sort_key(comp[0]))
    return components


def parse_point(ring: Ring, text: str) -> ProjPoint:
    """Parse a point literal '[a : b]'; 'inf' is accepted for [1 : 0]."""
    from .specparse import eval_expr

    body = text.strip()
    if body == "inf":
        return infinity(ring)
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"bad point literal {text!r}")
    inner = body[1:-1]
    depth = 0
    split = None
    for i, ch in enumerate(inner):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == ":" and depth == 0:
            split = i
            break
    if split is None:
        raise ValueError(f"bad point literal {text!r}")
    a = eval_expr(ring, inner[:split])
    b = eval_expr(ring, inner[split + 1 :])
    return canonical_point(ring, a.value, b.value)
