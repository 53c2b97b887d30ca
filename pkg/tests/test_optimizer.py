import math

import pytest

from amdiqkd.channel import build_statistics
from amdiqkd.decoy import estimate_bounds
from amdiqkd.keyrate import rate_no_ad
from amdiqkd.optimizer import (
    SearchSpace,
    halton_seeds,
    optimize,
    params_from_vector,
    scan_warm,
    scenario_objective,
    screening_seeds,
)

from conftest import make_config

FAST = SearchSpace(multistart=2, max_sweeps=3, coord_iters=10)


def test_vector_mapping_always_feasible():
    space = SearchSpace()
    template = make_config().source
    for u in halton_seeds(50):
        x = tuple(lo + ui * (hi - lo) for ui, (lo, hi) in zip(u, space.ranges))
        p = params_from_vector(x, space, template)
        assert p.mu > p.nu > 0.0
        assert p.p_mu + p.p_nu < 1.0
        assert p.Tc > 0.0


def test_halton_deterministic_and_in_cube():
    a = halton_seeds(16)
    b = halton_seeds(16)
    assert a == b
    assert all(0.0 <= v <= 1.0 for seed in a for v in seed)


def test_screening_seeds_cover_ranges():
    space = SearchSpace()
    seeds = screening_seeds(space)
    assert len(seeds) > 50
    for seed in seeds:
        for v, (lo, hi) in zip(seed, space.ranges):
            assert lo <= v <= hi


def test_objective_rejects_long_drift_windows():
    cfg = make_config(L=600.0)
    space = SearchSpace()
    evaluate = scenario_objective(cfg, space, use_ad=False)
    # widest pairing window at long distance: mean pairing time drifts
    # through more than half a phase turn, so the point is infeasible
    value, result = evaluate((0.3, 0.1, 0.2, 0.5, -2.0))
    assert value == -math.inf
    assert result is None


def test_optimize_beats_default_parameters():
    cfg = make_config(L=300.0)
    stats = build_statistics(cfg)
    bounds = estimate_bounds(stats, cfg, cfg.security)
    base = rate_no_ad(bounds, stats, cfg.pulse_count, cfg.security, cfg.f_ec)
    point = optimize(cfg, FAST, use_ad=False)
    assert point.rate >= base.rate
    assert point.evaluations > 0


def test_optimize_deterministic():
    cfg = make_config(L=200.0)
    a = optimize(cfg, FAST, use_ad=False)
    b = optimize(cfg, FAST, use_ad=False)
    assert a.vector == b.vector
    assert a.rate == b.rate


def test_optimized_point_respects_drift_cap():
    cfg = make_config(L=500.0)
    point = optimize(cfg, FAST, use_ad=False)
    assert point.rate > 0.0
    stats = build_statistics(cfg.with_source(point.params))
    drift = stats.T_mean * (
        2.0 * math.pi * cfg.noise.delta_nu + cfg.noise.omega_fib
    )
    assert drift <= math.pi + 1e-9


def test_scan_warm_runs_sequence():
    base = make_config()
    points = scan_warm(
        [base.with_distance(L) for L in (100.0, 150.0)], FAST, use_ad=False
    )
    assert len(points) == 2
    assert points[0].rate > points[1].rate > 0.0


def test_search_space_validation():
    with pytest.raises(ValueError):
        SearchSpace(mu_range=(1.0, 0.5))
    with pytest.raises(ValueError):
        SearchSpace(multistart=0)
