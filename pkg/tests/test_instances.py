import math
import warnings

import numpy as np
import pytest
from scipy import stats

from plankcover import AdversarialParams, GeometryError, InfeasibleParams, gen_adversarial, gen_parallel, gen_random
from plankcover.sweep import fit_slope


def test_random_basic_and_deterministic():
    one = gen_random(1, 0.1, 0)
    assert len(one) == 1 and abs(np.linalg.norm(one.normals[0]) - 1) < 1e-12
    assert gen_random(50, 0.1, 3) == gen_random(50, 0.1, 3)
    assert gen_random(50, 0.1, 3) != gen_random(50, 0.1, 4)
    with pytest.raises(GeometryError):
        gen_random(0, 0.1, 0)


def test_random_normals_are_uniform():
    N = gen_random(10_000, 0.1, 17).normals
    band = np.minimum((N[:, 2] + 1) / 2 * 4, 3.999).astype(int)  # equal-area z bands
    sector = np.minimum((np.arctan2(N[:, 1], N[:, 0]) + math.pi) / (2 * math.pi) * 12, 11.999).astype(int)
    counts = np.bincount(band * 12 + sector, minlength=48)
    assert stats.chisquare(counts).pvalue > 0.01


def test_parallel():
    inst = gen_parallel(10, 0.2, (0, 0, 1))
    assert len(inst) == 10 and np.all(inst.widths == 0.2)
    assert all(p.normal.as_list() == [0.0, 0.0, 1.0] for p in inst.planks)
    with pytest.raises(GeometryError):
        gen_parallel(0, 0.2)


def test_adversarial_infeasible_gives_single_point():
    params = AdversarialParams(epsilon=0.5, cap_angle=0.1, separation_factor=2.0)
    assert not params.feasible
    with pytest.warns(InfeasibleParams):
        inst = gen_adversarial(params)
    assert len(inst) == 1 and inst.metadata["infeasible"]


def test_adversarial_params_validation():
    with pytest.raises(GeometryError):
        AdversarialParams(epsilon=0.1, cap_angle=2.0)
    with pytest.raises(GeometryError):
        AdversarialParams(epsilon=0.1, separation_factor=0.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_adversarial_separation_and_cap(seed):
    params = AdversarialParams(epsilon=0.02, cap_angle=math.pi / 6, separation_factor=2.0, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        inst = gen_adversarial(params)
    N = inst.normals
    sep = 2 * 0.02 ** (2 / 3)
    assert params.separation == pytest.approx(sep)
    ang = np.arccos(np.clip(N @ N.T, -1, 1))
    np.fill_diagonal(ang, np.inf)
    assert ang.min() >= sep
    assert np.all(np.arccos(np.clip(N[:, 2], -1, 1)) <= math.pi / 6 + 1e-12)
    assert inst.metadata["k"] == len(inst) and inst.metadata["seed"] == seed
    assert gen_adversarial(params) == inst


def test_adversarial_count_scaling():
    xs, ys = [], []
    for eps in (0.05, 0.03, 0.02, 0.012):
        for seed in range(3):
            inst = gen_adversarial(AdversarialParams(eps, math.pi / 6, 2.0, seed))
            xs.append(eps)
            ys.append(len(inst))
    slope = fit_slope(xs, ys)
    assert 1.2 <= slope <= 1.5
