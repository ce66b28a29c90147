"""Harmonicity preservers between projective lines.

A LineMap is a point map given either by a total table over a finite
point set or by a scalar map applied in the affine chart (fixing the
point at infinity).  The module checks harmonicity preservation
exhaustively (finite lines) or on seeded random quadruples (rational
quaternions), enumerates all frame-fixing preservers of small field
lines by constraint propagation, and extends additive maps to point
maps: the coordinatewise rule, which can fail, and the chart rule
x |-> (sigma x, 1 + sigma x sigma y), closed over overlapping
parameterizations with a hard failure on any inconsistency.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

from .errors import (
    CharacteristicTwoError,
    FrameNotFixedError,
    InvalidParameterError,
    NotJordanError,
    InconsistentParameterizationError,
    PreconditionFailedError,
    UnsupportedError,
)
from .jordan import (
    AdditiveMap,
    is_jordan_homomorphism,
    is_semi_homomorphism,
    table_map,
)
from .projline import (
    ProjPoint,
    _canonical_rep,
    affine_coordinate,
    distant,
    distant_graph_components,
    embed_scalar,
    fourth_harmonic,
    harmonic_conjugate,
    infinity,
    is_affine,
    line_points,
    point_sort_key,
    quadruple_is_harmonic,
)
from .rings import GFRing, Ring


@dataclass(frozen=True)
class Verdict:
    """Outcome of a preservation check; sampled and exhaustive modes
    are distinct so reports cannot conflate them."""

    mode: str  # "exhaustive" or "sampled"
    ok: bool
    witness: tuple = None
    trials: int = 0

    def to_json(self):
        out = {"mode": self.mode, "ok": self.ok}
        if self.witness is not None:
            out["witness"] = [str(p) for p in self.witness]
        if self.mode == "sampled":
            out["trials"] = self.trials
        return out


class LineMap:
    """A map between projective-line point sets."""

    def __init__(self, domain: Ring, codomain: Ring, table=None, scalar=None):
        if (table is None) == (scalar is None):
            raise InvalidParameterError("give exactly one of table, scalar")
        self.domain = domain
        self.codomain = codomain
        self.table = dict(table) if table is not None else None
        self.scalar = scalar

    @classmethod
    def from_scalar_map(cls, f: AdditiveMap):
        """Frame-compatible chart form: embed(x) -> embed(f x), inf -> inf."""
        return cls(f.domain, f.codomain, scalar=f)

    def apply(self, p: ProjPoint) -> ProjPoint:
        if self.table is not None:
            return self.table[p]
        if p == infinity(self.domain):
            return infinity(self.codomain)
        x = affine_coordinate(p).value
        return embed_scalar(self.codomain, self.scalar(x))

    def points(self):
        if self.table is not None:
            return tuple(sorted(self.table, key=point_sort_key))
        return line_points(self.domain)

    def __eq__(self, other):
        if not isinstance(other, LineMap):
            return NotImplemented
        if self.domain != other.domain or self.codomain != other.codomain:
            return False
        if self.domain.is_finite:
            pts = self.points()
            return pts == other.points() and all(
                self.apply(p) == other.apply(p) for p in pts
            )
        return (self.table, self.scalar) == (other.table, other.scalar)

    def to_json(self):
        if self.table is None:
            return {"form": f"chart({self.scalar.to_string()})"}
        pts = self.points()
        return [[str(p), str(self.apply(p))] for p in pts]

    def __repr__(self):
        kind = "table" if self.table is not None else "chart"
        return (
            f"LineMap({kind}: {self.domain.spec_string()} -> "
            f"{self.codomain.spec_string()})"
        )


def harmonic_quadruples(ring: Ring, points=None):
    """All harmonic quadruples of a finite line (within a point subset)."""
    pts = line_points(ring) if points is None else tuple(points)
    allowed = set(pts)
    for p1 in pts:
        for p2 in pts:
            if not distant(p1, p2):
                continue
            for p3 in pts:
                if not (distant(p1, p3) and distant(p2, p3)):
                    continue
                h = harmonic_conjugate(p1, p2, p3)
                if h in allowed:
                    yield (p1, p2, p3, h)


def sample_harmonic_scalar_quadruple(ring: Ring, rng, bound=10):
    """Random affine harmonic quadruple over a division ring."""
    while True:
        a1 = ring.sample(rng, bound)
        a2 = ring.sample(rng, bound)
        a3 = ring.sample(rng, bound)
        if a1 == a2 or a1 == a3 or a2 == a3:
            continue
        p4 = fourth_harmonic(ring, a1, a2, a3)
        if not is_affine(p4):
            continue
        return (a1, a2, a3, affine_coordinate(p4).value)


def is_harmonicity_preserver(
    m: LineMap, rng=None, trials: int = 10**4, bound: int = 10
) -> Verdict:
    """Check Harm(q) implies Harm(m q) over all or sampled quadruples."""
    dom = m.domain
    if dom.is_finite:
        for quad in harmonic_quadruples(dom, m.points()):
            images = tuple(m.apply(p) for p in quad)
            if not quadruple_is_harmonic(*images):
                return Verdict("exhaustive", False, witness=quad)
        return Verdict("exhaustive", True)
    if not dom.is_division:
        raise UnsupportedError(
            f"no quadruple sampler for {dom.spec_string()}"
        )
    if rng is None:
        rng = random.Random(0)
    for _ in range(trials):
        scalars = sample_harmonic_scalar_quadruple(dom, rng, bound)
        quad = tuple(embed_scalar(dom, a) for a in scalars)
        images = tuple(m.apply(p) for p in quad)
        if not quadruple_is_harmonic(*images):
            return Verdict("sampled", False, witness=quad, trials=trials)
    return Verdict("sampled", True, trials=trials)


def induced_scalar_map(m: LineMap) -> AdditiveMap:
    """Restrict a frame-fixing preserver to the affine chart."""
    dom, cod = m.domain, m.codomain
    if not dom.is_division:
        raise UnsupportedError("scalar restriction needs a division-ring line")
    if dom.characteristic == 2:
        raise CharacteristicTwoError(
            "harmonicity carries no information in characteristic two"
        )
    frame_fixed = (
        m.apply(embed_scalar(dom, dom.zero)) == embed_scalar(cod, cod.zero)
        and m.apply(embed_scalar(dom, dom.one)) == embed_scalar(cod, cod.one)
        and m.apply(infinity(dom)) == infinity(cod)
    )
    if not frame_fixed:
        raise FrameNotFixedError("map does not fix 0, 1, infinity")
    if m.table is None:
        result = m.scalar
    elif dom.is_finite:
        table = {}
        for x in dom.element_list():
            img = m.apply(embed_scalar(dom, x))
            table[x] = affine_coordinate(img).value
        result = table_map(dom, cod, table)
    else:
        result = AdditiveMap(
            dom,
            cod,
            lambda x: affine_coordinate(m.apply(embed_scalar(dom, x))).value,
            ("restriction",),
        )
    if dom.is_finite and not is_semi_homomorphism(result):
        raise PreconditionFailedError(
            "restriction is not a semi-homomorphism; the line map cannot "
            "have been a harmonicity preserver"
        )
    return result


def enumerate_preservers_fixing_frame(ring: Ring):
    """All bijections of a small odd-order field line that fix 0, 1,
    infinity and preserve harmonicity, by backtracking with forced
    fourth-harmonic images."""
    if not (ring.is_division and ring.is_finite) or ring.characteristic == 2:
        raise InvalidParameterError("enumeration needs an odd-order field")
    if ring.cardinality > 13:
        raise InvalidParameterError("enumeration supports q <= 13")
    pts = line_points(ring)
    n = len(pts)
    index = {p: i for i, p in enumerate(pts)}
    conj = {}
    for i, p1 in enumerate(pts):
        for j, p2 in enumerate(pts):
            if j == i:
                continue
            for k, p3 in enumerate(pts):
                if k == i or k == j:
                    continue
                conj[(i, j, k)] = index[harmonic_conjugate(p1, p2, p3)]
    frame = [
        index[embed_scalar(ring, ring.zero)],
        index[embed_scalar(ring, ring.one)],
        index[infinity(ring)],
    ]

    results = []

    def propagate(assign):
        changed = True
        while changed:
            changed = False
            known = [i for i, v in enumerate(assign) if v is not None]
            for i in known:
                for j in known:
                    if j == i:
                        continue
                    for k in known:
                        if k == i or k == j:
                            continue
                        h = conj[(i, j, k)]
                        forced = conj[(assign[i], assign[j], assign[k])]
                        if assign[h] is None:
                            if forced in assign:
                                return False
                            assign[h] = forced
                            changed = True
                        elif assign[h] != forced:
                            return False
        return True

    def search(assign):
        free = [i for i, v in enumerate(assign) if v is None]
        if not free:
            results.append(tuple(assign))
            return
        i = free[0]
        used = {v for v in assign if v is not None}
        for v in range(n):
            if v in used:
                continue
            trial = list(assign)
            trial[i] = v
            if propagate(trial):
                search(trial)

    start = [None] * n
    for f in frame:
        start[f] = f
    if propagate(start):
        search(start)

    out = []
    for assign in sorted(results):
        table = {pts[i]: pts[assign[i]] for i in range(n)}
        out.append(LineMap(ring, ring, table=table))
    return out


@dataclass(frozen=True)
class NaiveFailure:
    """Witness that the coordinatewise rule defines no point map."""

    pair: tuple
    unit: object
    image_a: tuple
    image_b: tuple
    reason: str


def naive_extension(f: AdditiveMap):
    """Apply f to both coordinates of every representative.

    Returns the induced LineMap when the rule is constant on unit
    orbits and lands on admissible pairs; otherwise returns a witness.
    """
    dom, cod = f.domain, f.codomain
    if not dom.is_finite:
        raise UnsupportedError("naive extension implemented for finite lines")
    from .projline import is_admissible_pair

    table = {}
    for p in line_points(dom):
        a, b = p.rep
        fa, fb = f(a), f(b)
        if not is_admissible_pair(cod, fa, fb):
            return NaiveFailure(p.rep, dom.one, (fa, fb), None, "inadmissible")
        img = _canonical_rep(cod, (fa, fb))
        for u in dom.units():
            ua, ub = dom.mul(u, a), dom.mul(u, b)
            gua, gub = f(ua), f(ub)
            if not is_admissible_pair(cod, gua, gub):
                return NaiveFailure(
                    (a, b), u, (fa, fb), (gua, gub), "inadmissible"
                )
            if _canonical_rep(cod, (gua, gub)) != img:
                return NaiveFailure(
                    (a, b), u, (fa, fb), (gua, gub), "orbit-collision"
                )
        table[p] = ProjPoint(cod, img)
    return LineMap(dom, cod, table=table)


def _elementary_apply(ring, rep, t, lower):
    a, b = rep
    if lower:  # E21(t): (a + b t, b)
        return (ring.add(a, ring.mul(b, t)), b)
    return (a, ring.add(ring.mul(a, t), b))  # E12(t): (a, a t + b)


def bartolone_extension(f: AdditiveMap, component: ProjPoint = None) -> LineMap:
    """Extend a Jordan homomorphism to the frame component of the line.

    Seeds the chart rule (x, 1 + x y) |-> (fx, 1 + fx fy) over every
    parameter pair, then closes over elementary-shift transport for any
    points the chart misses; every re-derivation of an already assigned
    point must agree, otherwise the extension aborts.
    """
    dom, cod = f.domain, f.codomain
    if not dom.is_finite:
        raise UnsupportedError("extension implemented for finite lines")
    if not is_jordan_homomorphism(f):
        raise NotJordanError("map fails the Jordan axioms")
    components = distant_graph_components(dom)
    zero_pt = embed_scalar(dom, dom.zero)
    frame_comp = next(c for c in components if zero_pt in c)
    if component is not None:
        selected = next((c for c in components if component in c), None)
        if selected is None or selected != frame_comp:
            raise PreconditionFailedError(
                "selected component does not contain the frame"
            )
    comp_set = {p.rep for p in frame_comp}

    assign = {}

    def record(rep, img):
        old = assign.get(rep)
        if old is None:
            assign[rep] = img
            return True
        if old != img:
            raise InconsistentParameterizationError(
                (rep, old, img),
                "two parameterizations disagree on a point image",
            )
        return False

    one_d, one_c = dom.one, cod.one
    for x in dom.element_list():
        fx = f(x)
        for y in dom.element_list():
            rep = _canonical_rep(dom, (x, dom.add(one_d, dom.mul(x, y))))
            img = _canonical_rep(
                cod, (fx, cod.add(one_c, cod.mul(fx, f(y))))
            )
            record(rep, img)

    # recursive closure: transport along elementary shifts
    frontier = list(assign.items())
    while frontier:
        new = []
        for rep, img in frontier:
            for t in dom.element_list():
                ft = f(t)
                for lower in (False, True):
                    nrep = _canonical_rep(
                        dom, _elementary_apply(dom, rep, t, lower)
                    )
                    nimg = _canonical_rep(
                        cod, _elementary_apply(cod, img, ft, lower)
                    )
                    if nrep not in assign:
                        record(nrep, nimg)
                        new.append((nrep, nimg))
                    else:
                        record(nrep, nimg)
        frontier = new

    missing = comp_set - set(assign)
    if missing:
        raise InconsistentParameterizationError(
            sorted(missing)[0], "chart closure left component points uncovered"
        )
    table = {
        ProjPoint(dom, rep): ProjPoint(cod, assign[rep])
        for rep in comp_set
    }
    return LineMap(dom, cod, table=table)


def hua_roundtrip_check(ring: Ring, named_maps=None, trials=10**4, seed=0):
    """Both directions of the preserver/scalar-map correspondence.

    Frame-fixing preservers restrict to maps classifying as (anti-)
    homomorphisms; named (anti-)automorphisms induce preservers.  Lines
    of characteristic two are skipped in favour of the injectivity
    criterion.
    """
    from .jordan import classify_map

    report = {"spec": ring.spec_string()}
    if ring.characteristic == 2:
        report["mode"] = "char2-skip"
        pts = line_points(ring)
        checked = 0
        ok = True
        for perm in permutations(range(len(pts))):
            table = {pts[i]: pts[perm[i]] for i in range(len(pts))}
            m = LineMap(ring, ring, table=table)
            v = is_harmonicity_preserver(m)
            checked += 1
            ok = ok and v.ok
        report["injective_maps_checked"] = checked
        report["all_preserve"] = ok
        return report
    if ring.is_finite:
        report["mode"] = "exhaustive"
        preservers = enumerate_preservers_fixing_frame(ring)
        rows = []
        for m in preservers:
            g = induced_scalar_map(m)
            rows.append(classify_map(g))
        report["preservers"] = len(preservers)
        report["classes"] = rows
        report["all_hom_or_anti"] = all(
            c in ("hom", "anti", "both") for c in rows
        )
        # converse: the field automorphisms induce preservers
        from .jordan import frobenius_map, identity_map

        if isinstance(ring, GFRing):
            autos = [frobenius_map(ring, power) for power in range(ring.k)]
        else:
            autos = [identity_map(ring)]  # prime fields are rigid
        conv = [
            is_harmonicity_preserver(LineMap.from_scalar_map(g)).ok
            for g in autos
        ]
        report["automorphisms_preserve"] = all(conv)
        return report
    report["mode"] = "sampled"
    rng = random.Random(seed)
    rows = []
    for g in named_maps or ():
        m = LineMap.from_scalar_map(g)
        v = is_harmonicity_preserver(m, rng=rng, trials=trials)
        rows.append({"map": g.to_string(), **v.to_json()})
    report["maps"] = rows
    report["all_preserve"] = all(r["ok"] for r in rows)
    return report
