import random
from dataclasses import replace
from fractions import Fraction

import pytest

from extamen.approx import (
    BETA_SCHEDULES,
    beta_schedule,
    construct_En_countable,
    construct_En_markov,
    construct_En_single,
    construct_En_sum,
    explicit_En_hairs,
    find_vertex_below,
    generalized_En_search,
    golden_witness,
    strong_verify,
    weak_verify,
)
from extamen.dyadic import Dyadic, ROOT
from extamen.errors import (
    PreconditionFailed,
    SearchExhausted,
    StructuralAssertFailed,
    ZeroBase,
)
from extamen.graph import ball, classify, hair_point
from extamen.harmonic import VertexFn, canonical_phi_u, phi_family, pow2
from extamen.lamplighter import EMPTY, apply_word, config
from extamen.minfn import (
    countable_sum,
    minfun,
    phi_family_tail_bound,
    r_family_kmean,
)


def dy(num, exp):
    return Dyadic(num, exp)


def family_sum(n):
    return countable_sum(phi_family, pow2(-n), tail_bound=phi_family_tail_bound)


def test_beta_schedules():
    assert beta_schedule("inv_n").value(4) == Fraction(1, 4)
    assert beta_schedule("inv_2n").value(4) == Fraction(1, 16)
    with pytest.raises(KeyError):
        beta_schedule("linear")
    assert set(BETA_SCHEDULES) == {"inv_n", "inv_2n"}


def test_explicit_first_levels():
    assert explicit_En_hairs(1) == (dy(3, 3),)
    assert explicit_En_hairs(3) == (dy(9, 7), dy(19, 8), dy(39, 9))
    with pytest.raises(PreconditionFailed):
        explicit_En_hairs(0)


def test_explicit_lamps_sit_on_distinct_hairs():
    E = explicit_En_hairs(4)
    assert len(E) == 4
    for x in E:
        addr = classify(x)
        assert addr.offset == 4, f"{x} at offset {addr.offset}"


def test_explicit_exactly_invariant():
    for n in (2, 3, 4):
        E = explicit_En_hairs(n)
        rep = strong_verify(family_sum(n), E, n, pow2(-n))
        assert rep.passed and rep.worst_deviation == 0, f"n={n}: {rep.worst_deviation}"


def test_strong_verify_zero_base():
    from extamen.lamplighter import SetFn

    zero = SetFn(name="zero", fn=lambda E: Fraction(0))
    with pytest.raises(ZeroBase):
        strong_verify(zero, EMPTY, 2, Fraction(1, 2))


def test_strong_verify_worst_word_replays():
    F = minfun(canonical_phi_u())
    E = (ROOT,)
    rep = strong_verify(F, E, 3, Fraction(1, 3))
    assert not rep.passed
    dev = abs(F(apply_word(E, rep.worst_word)) - rep.base_value) / rep.base_value
    assert dev == rep.worst_deviation == Fraction(7, 8)


def test_weak_verify_is_a_lower_bound():
    F = minfun(canonical_phi_u())
    E = (ROOT,)
    strong = strong_verify(F, E, 3, Fraction(1, 3))
    weak = weak_verify(F, E, 3, Fraction(1, 3), samples=200, seed=1)
    assert weak.checked == 200
    assert 0 < weak.worst_deviation <= strong.worst_deviation
    again = weak_verify(F, E, 3, Fraction(1, 3), samples=200, seed=1)
    assert again.worst_word == weak.worst_word


def test_golden_witness_vacant_path():
    w = golden_witness((dy(11, 4),), 5)
    assert w.word == "bs" and w.case == "vacant-path" and w.index == 0
    assert w.deviation == Fraction(48, 127)


def test_golden_witness_spine_lamp():
    w = golden_witness((ROOT,), 5)
    assert w.word == "b" and w.case == "spine-lamp" and w.index == 0
    assert w.deviation == Fraction(32, 127)


def test_golden_witness_empty_set():
    w = golden_witness(EMPTY, 2)
    assert w.word == "bs"
    assert w.deviation >= Fraction(1, 4)


def test_golden_witness_skips_occupied_subtrees():
    # a lamp in subtree 0 pushes the witness to index 1
    E = config([dy(9, 4), hair_point(dy(11, 4), 3)])
    w = golden_witness(E, 6)
    assert w.index == 1
    assert len(w.word) <= 6


def test_golden_witness_preconditions():
    with pytest.raises(PreconditionFailed):
        golden_witness((ROOT,), 2)
    with pytest.raises(PreconditionFailed):
        golden_witness(EMPTY, 1)


def test_golden_witness_random_configs():
    verts = ball(ROOT, 6).vertices
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(4, 7)
        E = config(rng.sample(verts, rng.randrange(n - 1)))
        w = golden_witness(E, n)
        assert w.deviation >= pow2(-n), f"{E} n={n}"
        assert len(w.word) <= n


def test_construct_single_frozen_constants():
    res = construct_En_single(canonical_phi_u(), 4)
    notes = dict(res.notes)
    assert notes["level_min"] == "1/4"
    assert notes["threshold"] == "1/256"
    assert notes["base_vertex"] == "12287/2^14"
    assert notes["hair_offset"] == "16"
    assert res.beta == Fraction(1, 4)
    assert len(res.E) == 1


def test_construct_single_depth_scales():
    res = construct_En_single(canonical_phi_u(), 6)
    (lamp,) = res.E
    addr = classify(lamp)
    assert addr.offset == 36
    assert len(addr.base) == 14


def test_construct_countable_frozen_constants():
    res = construct_En_countable(4)
    notes = dict(res.notes)
    assert notes["delta"] == "1/8192"
    assert notes["index_cutoff"] == "17"
    assert notes["lamps"] == "18"
    assert notes["hair_offset"] == "64"
    assert len(res.E) == 18


def test_constructors_verify_at_n4():
    single = construct_En_single(canonical_phi_u(), 4)
    assert strong_verify(single.setfn, single.E, 4, single.beta).worst_deviation == 0

    summed = construct_En_sum([phi_family(0), phi_family(1)], 4)
    assert strong_verify(summed.setfn, summed.E, 4, summed.beta).worst_deviation == 0


def test_construct_markov_delegates():
    res = construct_En_markov([phi_family(0), phi_family(1)], [0, 1], 3)
    assert dict(res.notes)["delegated_level"] == "4"
    rep = strong_verify(res.setfn, res.E, 3, res.beta)
    assert rep.worst_deviation == 0
    with pytest.raises(PreconditionFailed):
        construct_En_markov([phi_family(0)], [0, 1], 3)


def test_construct_requires_level_two():
    with pytest.raises(PreconditionFailed):
        construct_En_single(canonical_phi_u(), 1)
    with pytest.raises(PreconditionFailed):
        construct_En_sum([], 4)


def test_find_vertex_below_uses_and_checks_hints():
    phi = canonical_phi_u()
    q = find_vertex_below(phi, pow2(-20))
    assert phi(q) < pow2(-20)

    lying = replace(phi, find_below=lambda t: ROOT)
    with pytest.raises(StructuralAssertFailed):
        find_vertex_below(lying, pow2(-20))
    with pytest.raises(PreconditionFailed):
        find_vertex_below(phi, Fraction(0))


def test_find_vertex_below_scans_without_hint():
    bare = replace(phi_family(0), find_below=None)
    q = find_vertex_below(bare, pow2(-7))
    assert bare(q) < pow2(-7)


def test_find_vertex_below_scan_gives_up():
    flat = VertexFn(name="flat", fn=lambda v: Fraction(1))
    with pytest.raises(SearchExhausted) as exc:
        find_vertex_below(flat, Fraction(1, 2))
    assert exc.value.frontier["width"] > 0


def test_generalized_search_finds_n4():
    res = generalized_En_search(r_family_kmean(2, 2), canonical_phi_u(), 4)
    assert res.found is not None and res.tried == 1
    assert res.report.passed and res.report.worst_deviation == 0
    assert len(res.found) == 2


def test_generalized_search_zero_budget():
    res = generalized_En_search(r_family_kmean(1, 1), canonical_phi_u(), 4, budget=0)
    assert res.found is None and res.tried == 0 and res.report is None


def test_reports_serialize():
    rep = strong_verify(minfun(canonical_phi_u()), (ROOT,), 2, Fraction(1, 2))
    d = rep.to_json()
    assert d["mode"] == "strong" and d["set"] == "5/2^3"
    res = construct_En_single(canonical_phi_u(), 4)
    assert res.to_json()["notes"]["hair_offset"] == "16"
    w = golden_witness(EMPTY, 3)
    assert w.to_json()["word"] == w.word
