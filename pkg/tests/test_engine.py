import dataclasses

import numpy as np
import pytest

from plankcover import (
    ConvexRegion,
    EmptyRegion,
    EngineConfig,
    Halfspace,
    Plank,
    UnitVector,
    convexity_probe,
    gen_adversarial,
    gen_random,
    is_empty,
    place_next,
    run_cover,
    support_value,
    verify_certificate_static,
    AdversarialParams,
)
from plankcover.engine import processing_order
from plankcover.geometry import PlacedPlank

Z = UnitVector(0, 0, 1)


def test_place_next_examples():
    plank = Plank(Z, 0.2)
    pp, K1 = place_next(ConvexRegion.ball(), plank)
    assert (pp.upper_offset, pp.lower_offset) == pytest.approx((1.0, 0.8), abs=1e-12)
    assert K1 == ConvexRegion((Halfspace(Z, pp.lower_offset),))
    pp, K2 = place_next(K1, plank)
    assert (pp.upper_offset, pp.lower_offset) == pytest.approx((0.8, 0.6), abs=1e-12)
    assert K2.constraints == (Halfspace(Z, pp.lower_offset),)
    pp, _ = place_next(ConvexRegion.ball(), Plank(UnitVector(1, 0, 0), 0.2))
    assert (pp.upper_offset, pp.lower_offset) == pytest.approx((1.0, 0.8), abs=1e-12)


def test_place_next_on_empty_region():
    with pytest.raises(EmptyRegion):
        place_next(ConvexRegion.ball().with_constraint(Halfspace(Z, -1.5)), Plank(Z, 0.1))


def test_stacked_runs(stacked10, stacked9):
    inst, cert = stacked10
    assert cert.covered and cert.planks_used == 10
    final = list(cert.regions())[-1].pruned()
    assert final.offsets[0] == pytest.approx(-1.0, abs=1e-12) and is_empty(final)
    inst9, cert9 = stacked9
    assert not cert9.covered and cert9.planks_used == 9
    assert list(cert9.regions())[-1].pruned().offsets[0] == pytest.approx(-0.8, abs=1e-12)


def test_seed42_random_instance_is_covered():
    cert = run_cover(gen_random(450, 0.1, 42), EngineConfig(mode="chunked"))
    assert cert.covered and cert.planks_used == 173 and cert.error is None


def test_static_verification(stacked10):
    inst, cert = stacked10
    assert verify_certificate_static(inst, cert)
    pl = list(cert.placements)
    pl[3] = PlacedPlank(UnitVector(0.001, 0, 1), pl[3].lower_offset, pl[3].upper_offset)
    reasons = []
    assert not verify_certificate_static(inst, dataclasses.replace(cert, placements=tuple(pl)), reasons)
    assert any("normal mismatch" in r for r in reasons)
    pl = list(cert.placements)
    pl[3] = PlacedPlank(pl[3].normal, pl[3].lower_offset - 0.05, pl[3].upper_offset)
    reasons = []
    assert not verify_certificate_static(inst, dataclasses.replace(cert, placements=tuple(pl)), reasons)
    assert any("width mismatch" in r for r in reasons)
    reasons = []
    assert not verify_certificate_static(inst, dataclasses.replace(cert, ordering=(0,) * 10), reasons)
    assert reasons == ["ordering is not a permutation"]


def test_static_verification_catches_non_tangent_placement(stacked10):
    inst, cert = stacked10
    pl = list(cert.placements)
    pl[5] = PlacedPlank(pl[5].normal, pl[5].lower_offset - 0.01, pl[5].upper_offset - 0.01)
    reasons = []
    assert not verify_certificate_static(inst, dataclasses.replace(cert, placements=tuple(pl)), reasons)
    assert any("tangency" in r for r in reasons)


def test_max_planks_limits_run():
    cert = run_cover(gen_random(100, 0.1, 0), EngineConfig(max_planks=7))
    assert cert.planks_used == 7 and not cert.covered and len(cert.ordering) == 100


def test_modes_choose_orders():
    inst = gen_random(60, 0.2, 1)
    order, chunks = processing_order(inst, EngineConfig(mode="fixed_order"))
    assert order == list(range(60)) and chunks is None
    order, chunks = processing_order(inst, EngineConfig(mode="chunked"))
    assert sorted(order) == list(range(60)) and [i for c in chunks for i in c] == order
    with pytest.raises(ValueError):
        EngineConfig(mode="sideways")


@pytest.fixture(scope="module")
def random_run():
    inst = gen_random(200, 0.15, 3)
    return inst, run_cover(inst, EngineConfig())


def test_each_placement_cuts_its_own_support_by_the_width(random_run):
    inst, cert = random_run
    regions = list(cert.regions())
    for i, pp in enumerate(cert.placements):
        nxt = regions[i + 1]
        if is_empty(nxt, 1e-6):
            continue
        h, _ = support_value(nxt, pp.normal)
        assert h == pytest.approx(pp.upper_offset - pp.width, abs=1e-9)


def test_nesting_and_convexity_along_a_run(random_run):
    inst, cert = random_run
    regions = [K.pruned() for K in cert.regions()]
    rng = np.random.default_rng(0)
    for i in range(1, len(regions), 10):
        viol, tested = convexity_probe(regions[i], 1000, seed=i)
        assert viol == 0
        X = rng.uniform(-1, 1, (20_000, 3))
        X = X[regions[i].contains_many(X)]
        assert np.all(regions[i - 1].contains_many(X))


def test_fixed_order_placements_support_from_above():
    inst = gen_adversarial(AdversarialParams(0.03, seed=1))
    cert = run_cover(inst, EngineConfig(mode="fixed_order"))
    assert cert.ordering == tuple(range(len(inst)))
    assert verify_certificate_static(inst, cert)


def test_runs_are_reproducible(random_run):
    inst, cert = random_run
    again = run_cover(gen_random(200, 0.15, 3), EngineConfig())
    assert again == cert
    assert [p.upper_offset for p in again.placements] == [p.upper_offset for p in cert.placements]


def test_recorded_volumes_present_and_sparse():
    cert = run_cover(gen_random(300, 0.12, 2), EngineConfig(record_volumes=True, volume_samples=4000))
    rec = [s for s in cert.steps if s.vol_parallel is not None]
    assert rec and rec[-1].step == cert.steps[-1].step
    assert all(s.step % 3 == 2 or s is rec[-1] for s in rec)
