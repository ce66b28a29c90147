"""Harmonicity preservers: checks, enumeration, extensions, round trips."""

import random
from itertools import permutations

import pytest

from staudtlab import parse_ring_spec
from staudtlab.errors import (
    CharacteristicTwoError,
    FrameNotFixedError,
    InvalidParameterError,
    NotJordanError,
)
from staudtlab.jordan import (
    enumerate_jordan_automorphisms,
    flip_map,
    frobenius_map,
    identity_map,
    inner_map,
    quat_conjugation_map,
    scale_map,
)
from staudtlab.preservers import (
    LineMap,
    NaiveFailure,
    Verdict,
    bartolone_extension,
    enumerate_preservers_fixing_frame,
    harmonic_quadruples,
    hua_roundtrip_check,
    induced_scalar_map,
    is_harmonicity_preserver,
    naive_extension,
    sample_harmonic_scalar_quadruple,
)
from staudtlab.projline import (
    canonical_point,
    distant_graph_components,
    embed_scalar,
    infinity,
    line_points,
    quadruple_is_harmonic,
    wachs_harmonic,
)
from staudtlab.specparse import eval_expr


def brute_force_frame_fixing_preservers(ring):
    """Oracle: filter all frame-fixing bijections of the point set."""
    pts = line_points(ring)
    fixed = {embed_scalar(ring, ring.zero), embed_scalar(ring, ring.one),
             infinity(ring)}
    movable = [p for p in pts if p not in fixed]
    out = []
    for perm in permutations(movable):
        table = {p: p for p in fixed}
        table.update(dict(zip(movable, perm)))
        m = LineMap(ring, ring, table=table)
        if is_harmonicity_preserver(m).ok:
            out.append(m)
    return out


def test_preserver_counts_and_brute_force_soundness():
    for q, count in [(5, 1), (7, 1)]:
        ring = parse_ring_spec(f"GF({q})")
        fast = enumerate_preservers_fixing_frame(ring)
        slow = brute_force_frame_fixing_preservers(ring)
        assert len(fast) == count
        assert sorted(m.to_json() for m in fast) == sorted(
            m.to_json() for m in slow
        )
    gf9 = parse_ring_spec("GF(9)")
    fast = enumerate_preservers_fixing_frame(gf9)
    assert len(fast) == 2


def test_gf9_preservers_are_identity_and_frobenius():
    gf9 = parse_ring_spec("GF(9)")
    maps = enumerate_preservers_fixing_frame(gf9)
    induced = [induced_scalar_map(m) for m in maps]
    assert identity_map(gf9) in induced
    assert frobenius_map(gf9, 1) in induced


def test_preserver_enumeration_guards():
    with pytest.raises(InvalidParameterError):
        enumerate_preservers_fixing_frame(parse_ring_spec("GF(4)"))
    with pytest.raises(InvalidParameterError):
        enumerate_preservers_fixing_frame(parse_ring_spec("GF(17)"))


def test_transposition_is_not_a_preserver():
    gf5 = parse_ring_spec("GF(5)")
    pts = line_points(gf5)
    e2, e3 = embed_scalar(gf5, 2), embed_scalar(gf5, 3)
    table = {p: (e3 if p == e2 else e2 if p == e3 else p) for p in pts}
    verdict = is_harmonicity_preserver(LineMap(gf5, gf5, table=table))
    assert verdict.mode == "exhaustive" and not verdict.ok
    p1, p2, p3, p4 = verdict.witness
    # the witness quadruple really is harmonic and really breaks
    assert quadruple_is_harmonic(p1, p2, p3, p4)
    images = [table[p] for p in verdict.witness]
    assert not quadruple_is_harmonic(*images)


def test_frobenius_chart_map_preserves_exhaustively():
    gf9 = parse_ring_spec("GF(9)")
    m = LineMap.from_scalar_map(frobenius_map(gf9, 1))
    verdict = is_harmonicity_preserver(m)
    assert verdict.mode == "exhaustive" and verdict.ok


def test_induced_scalar_map_preconditions():
    gf9 = parse_ring_spec("GF(9)")
    pts = line_points(gf9)
    shift = {p: q for p, q in zip(pts, pts[1:] + pts[:1])}
    with pytest.raises(FrameNotFixedError):
        induced_scalar_map(LineMap(gf9, gf9, table=shift))
    gf4 = parse_ring_spec("GF(4)")
    with pytest.raises(CharacteristicTwoError):
        induced_scalar_map(LineMap.from_scalar_map(identity_map(gf4)))
    gf5 = parse_ring_spec("GF(5)")
    assert induced_scalar_map(
        LineMap.from_scalar_map(identity_map(gf5))
    ) == identity_map(gf5)


def test_quaternion_sampled_preservers():
    q = parse_ring_spec("Quat(Q)")
    rng = random.Random(0)
    for g in [quat_conjugation_map(q), inner_map(q, eval_expr(q, "i")),
              inner_map(q, eval_expr(q, "1+j"))]:
        verdict = is_harmonicity_preserver(
            LineMap.from_scalar_map(g), rng=rng, trials=300
        )
        assert verdict.mode == "sampled" and verdict.ok
        assert verdict.trials == 300


def test_quaternion_quadruple_sampler_yields_harmonic_quadruples():
    q = parse_ring_spec("Quat(Q)")
    rng = random.Random(7)
    for _ in range(50):
        a1, a2, a3, a4 = sample_harmonic_scalar_quadruple(q, rng)
        assert wachs_harmonic(q, a1, a2, a3, a4)


def test_naive_extension_cases():
    gf9 = parse_ring_spec("GF(9)")
    ext = naive_extension(frobenius_map(gf9, 1))
    assert isinstance(ext, LineMap)
    assert is_harmonicity_preserver(ext).ok
    t2 = parse_ring_spec("T(2,GF(3))")
    failure = naive_extension(flip_map(t2))
    assert isinstance(failure, NaiveFailure)
    # verify the witness honestly: the two images are different points
    fl = flip_map(t2)
    a, b = failure.pair
    u = failure.unit
    img1 = canonical_point(t2, fl(a), fl(b))
    img2 = canonical_point(t2, fl(t2.mul(u, a)), fl(t2.mul(u, b)))
    assert img1 != img2
    z6 = parse_ring_spec("Z(6)")
    ident = naive_extension(identity_map(z6))
    assert isinstance(ident, LineMap)
    assert all(ident.apply(p) == p for p in line_points(z6))


def test_bartolone_extension_identity_and_field_cases():
    z4 = parse_ring_spec("Z(4)")
    ext = bartolone_extension(identity_map(z4))
    assert all(ext.apply(p) == p for p in line_points(z4))
    gf9 = parse_ring_spec("GF(9)")
    bout = bartolone_extension(frobenius_map(gf9, 1))
    nout = naive_extension(frobenius_map(gf9, 1))
    assert all(bout.apply(p) == nout.apply(p) for p in line_points(gf9))


def test_bartolone_extension_rejects_non_jordan_maps():
    gf4 = parse_ring_spec("GF(4)")
    with pytest.raises(NotJordanError):
        bartolone_extension(scale_map(gf4, eval_expr(gf4, "g")))


def test_bartolone_component_selection():
    z6 = parse_ring_spec("Z(6)")
    frame_comp = distant_graph_components(z6)[0]
    ext = bartolone_extension(identity_map(z6), component=frame_comp[0])
    assert set(ext.table) == set(frame_comp)


def test_bartolone_flip_is_bijective_preserver():
    t2 = parse_ring_spec("T(2,GF(3))")
    ext = bartolone_extension(flip_map(t2))
    pts = line_points(t2)
    assert set(ext.table) == set(pts)  # frame component is the whole line
    assert len(set(ext.table.values())) == len(pts)


def test_extension_restriction_round_trip_commutative():
    for spec in ["GF(9)", "GF(5)", "GF(7)"]:
        ring = parse_ring_spec(spec)
        for f in enumerate_jordan_automorphisms(ring, "jordan"):
            ext = bartolone_extension(f)
            assert induced_scalar_map(ext) == f


def test_harmonic_quadruple_enumeration_matches_definition():
    gf5 = parse_ring_spec("GF(5)")
    quads = set(harmonic_quadruples(gf5))
    pts = line_points(gf5)
    from itertools import product as iproduct

    direct = {
        (p1, p2, p3, p4)
        for p1, p2, p3, p4 in iproduct(pts, repeat=4)
        if quadruple_is_harmonic(p1, p2, p3, p4)
    }
    assert quads == direct


def test_hua_roundtrip_reports():
    rep = hua_roundtrip_check(parse_ring_spec("GF(9)"))
    assert rep["mode"] == "exhaustive"
    assert rep["preservers"] == 2
    assert rep["all_hom_or_anti"]
    assert rep["automorphisms_preserve"]
    rep = hua_roundtrip_check(parse_ring_spec("GF(4)"))
    assert rep["mode"] == "char2-skip"
    assert rep["all_preserve"]
    assert rep["injective_maps_checked"] == 120
    q = parse_ring_spec("Quat(Q)")
    maps = [identity_map(q), quat_conjugation_map(q),
            inner_map(q, eval_expr(q, "i")),
            inner_map(q, eval_expr(q, "1+j"))]
    rep = hua_roundtrip_check(q, named_maps=maps, trials=100, seed=0)
    assert rep["mode"] == "sampled"
    assert rep["all_preserve"]
    assert all(r["trials"] == 100 for r in rep["maps"])


def test_inner_chart_maps_preserve_cross_ratio_classes():
    from staudtlab.projline import cross_ratio

    q = parse_ring_spec("Quat(Q)")
    rng = random.Random(0)
    g = inner_map(q, eval_expr(q, "1+j"))
    done = 0
    while done < 200:
        vals = [q.sample(rng) for _ in range(4)]
        if len(set(vals)) < 4:
            continue
        pts = [embed_scalar(q, v) for v in vals]
        ipts = [embed_scalar(q, g(v)) for v in vals]
        assert cross_ratio(*pts) == cross_ratio(*ipts)
        done += 1


def test_gf11_preservers_single():
    ring = parse_ring_spec("GF(11)")
    assert len(enumerate_preservers_fixing_frame(ring)) == 1


def test_component_gluing_degenerates_on_connected_lines():
    # none of the supported small finite rings has a disconnected
    # distant graph, so gluing one chart extension per component is
    # the single-map case; that map must preserve on the whole line
    specs = ["Z(4)", "Z(6)", "Z(9)", "GF(4)", "GF(5)", "T(2,GF(3))",
             "Dual(Z(3))", "Dual(Z(4))", "Sum(Z(2),Z(3))", "Z(8)",
             "Z(12)", "Dual(GF(4))", "Sum(GF(4),Z(3))"]
    for spec in specs:
        ring = parse_ring_spec(spec)
        assert len(distant_graph_components(ring)) == 1, spec
    t2 = parse_ring_spec("T(2,GF(3))")
    glued = bartolone_extension(flip_map(t2))
    assert set(glued.table) == set(line_points(t2))
    assert is_harmonicity_preserver(glued).ok


def test_verdict_serialization():
    v = Verdict("sampled", True, trials=10)
    assert v.to_json() == {"mode": "sampled", "ok": True, "trials": 10}
    v = Verdict("exhaustive", False, witness=("a", "b"))
    out = v.to_json()
    assert out["mode"] == "exhaustive" and not out["ok"]
    assert out["witness"] == ["a", "b"]
