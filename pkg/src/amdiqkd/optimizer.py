"""Deterministic direct search over source parameters.

Coordinates are (mu, nu/mu, p_mu, p_nu fraction of the remaining budget,
log10 Tc), which keeps every candidate feasible by construction. Multistart
seeds come from a fixed Halton set; distance scans additionally warm-start
from the previous point's optimum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .channel import NoZBasisData, build_statistics
from .config import ExperimentConfig, SourceParams
from .decoy import estimate_bounds
from .keyrate import rate_ad, rate_no_ad

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchSpace:
    mu_range: tuple[float, float] = (0.05, 1.0)
    nu_frac_range: tuple[float, float] = (0.02, 0.9)
    p_mu_range: tuple[float, float] = (0.01, 0.95)
    p_nu_frac_range: tuple[float, float] = (0.02, 0.98)
    log10_tc_range: tuple[float, float] = (-7.0, -2.0)
    nu_min: float = 0.005
    multistart: int = 8
    min_sweeps: int = 3
    max_sweeps: int = 6
    coord_iters: int = 16
    rate_tol: float = 1e-4

    def __post_init__(self) -> None:
        for lo, hi in (
            self.mu_range,
            self.nu_frac_range,
            self.p_mu_range,
            self.p_nu_frac_range,
            self.log10_tc_range,
        ):
            if lo > hi:
                raise ValueError("empty coordinate range")
        if self.multistart < 1:
            raise ValueError("multistart must be >= 1")

    @property
    def ranges(self) -> tuple[tuple[float, float], ...]:
        return (
            self.mu_range,
            self.nu_frac_range,
            self.p_mu_range,
            self.p_nu_frac_range,
            self.log10_tc_range,
        )


@dataclass(frozen=True)
class OptimizedPoint:
    params: SourceParams
    rate: float
    result: object
    vector: tuple[float, ...]
    evaluations: int
    converged: bool


def params_from_vector(x: Sequence[float], space: SearchSpace, template: SourceParams) -> SourceParams:
    """Map a search vector to feasible source parameters."""
    mu, nu_frac, p_mu, p_nu_frac, log_tc = x
    nu = min(max(nu_frac * mu, space.nu_min), 0.9 * mu)
    p_nu = min(max(p_nu_frac * (0.99 - p_mu), 0.01), 0.99 - p_mu)
    return replace(template, mu=mu, nu=nu, p_mu=p_mu, p_nu=p_nu, Tc=10.0 ** log_tc)


def _halton(index: int, base: int) -> float:
    f, r = 1.0, 0.0
    i = index
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def halton_seeds(count: int, dims: int = 5) -> list[tuple[float, ...]]:
    """Fixed low-discrepancy points in the unit cube."""
    bases = (2, 3, 5, 7, 11)[:dims]
    return [tuple(_halton(i + 1, b) for b in bases) for i in range(count)]


def _unit_to_ranges(u: Sequence[float], space: SearchSpace) -> tuple[float, ...]:
    return tuple(lo + ui * (hi - lo) for ui, (lo, hi) in zip(u, space.ranges))


# unit-cube screening grid; descent starts only from the best-scoring
# candidates, so this mostly needs to cover the basins, not resolve them
_SCREEN_AXES = (
    (0.1, 0.3, 0.5, 0.75),  # mu
    (0.1, 0.2, 0.4),        # nu / mu
    (0.15, 0.35, 0.65),     # p_mu
    (0.35, 0.65),           # p_nu fraction
    (0.2, 0.6, 0.9, 1.0),   # log10 Tc
)


def screening_seeds(space: SearchSpace) -> list[tuple[float, ...]]:
    """Fixed coarse grid of feasible search vectors."""
    out: list[tuple[float, ...]] = []
    for u in itertools.product(*_SCREEN_AXES):
        out.append(_unit_to_ranges(u, space))
    return out


class _Evaluator:
    """Counts evaluations of the scenario rate at a search vector."""

    def __init__(self, objective: Callable[[tuple[float, ...]], tuple[float, object]]):
        self._objective = objective
        self.evaluations = 0

    def __call__(self, x: tuple[float, ...]) -> tuple[float, object]:
        self.evaluations += 1
        return self._objective(x)


def scenario_objective(
    scenario: ExperimentConfig, space: SearchSpace, use_ad: bool
) -> Callable[[tuple[float, ...]], tuple[float, object]]:
    """Rate-at-vector objective for a fixed scenario."""

    def evaluate(x: tuple[float, ...]):
        params = params_from_vector(x, space, scenario.source)
        cfg = scenario.with_source(params)
        try:
            stats = build_statistics(cfg)
        except NoZBasisData:
            return -math.inf, None
        # forbid pairing windows whose deterministic phase drift exceeds
        # half a turn; past that the drift model wraps around and the
        # search would exploit window lengths near full 2*pi multiples
        drift = stats.T_mean * (2.0 * math.pi * cfg.noise.delta_nu + cfg.noise.omega_fib)
        if drift > math.pi:
            return -math.inf, None
        bounds = estimate_bounds(stats, cfg, cfg.security)
        if use_ad:
            result = rate_ad(bounds, stats, cfg.pulse_count, cfg.security, cfg.f_ec)
        else:
            result = rate_no_ad(bounds, stats, cfg.pulse_count, cfg.security, cfg.f_ec)
        # the unclamped rate keeps a usable search gradient on the
        # zero-rate plateau near the distance cutoff
        return result.components["raw_rate"], result

    return evaluate


def _golden_line(
    f: Callable[[float], float], lo: float, hi: float, iters: int
) -> tuple[float, float]:
    """Golden-section maximum with explicit endpoint evaluation."""
    best_x, best_f = lo, f(lo)
    v = f(hi)
    if v > best_f:
        best_x, best_f = hi, v
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_f:
            best_x, best_f = x, v
    return best_x, best_f


def _descend(
    evaluate: Callable[[tuple[float, ...]], tuple[float, object]],
    start: tuple[float, ...],
    space: SearchSpace,
) -> tuple[tuple[float, ...], float, bool]:
    x = list(start)
    best_rate = evaluate(tuple(x))[0]
    converged = False
    for sweep in range(space.max_sweeps):
        before = best_rate
        for i, (lo, hi) in enumerate(space.ranges):

            def line(v: float, i=i) -> float:
                cand = list(x)
                cand[i] = v
                return evaluate(tuple(cand))[0]

            xv, fv = _golden_line(line, lo, hi, space.coord_iters)
            if fv > best_rate:
                best_rate = fv
                x[i] = xv
        if sweep + 1 >= space.min_sweeps:
            if best_rate - before <= space.rate_tol * max(abs(best_rate), 1e-300):
                converged = True
                break
    return tuple(x), best_rate, converged


def optimize(
    scenario: ExperimentConfig,
    space: SearchSpace,
    use_ad: bool,
    extra_seeds: Sequence[tuple[float, ...]] = (),
) -> OptimizedPoint:
    """Best source parameters for a scenario by multistart coordinate descent.

    ``extra_seeds`` are search vectors (not unit-cube points); the warm-start
    mechanism of :func:`scan_warm` feeds previous optima through it.
    """
    evaluate = _Evaluator(scenario_objective(scenario, space, use_ad))
    pool = [_unit_to_ranges(u, space) for u in halton_seeds(space.multistart)]
    pool.extend(screening_seeds(space))
    scored = sorted(pool, key=lambda s: evaluate(s)[0], reverse=True)
    seeds = scored[: space.multistart]
    seeds.extend(tuple(s) for s in extra_seeds)

    best_x: tuple[float, ...] | None = None
    best_raw = -math.inf
    all_converged = True
    for seed in seeds:
        x, raw, converged = _descend(evaluate, seed, space)
        all_converged = all_converged and converged
        if raw > best_raw:
            best_raw, best_x = raw, x
    assert best_x is not None
    _, result = evaluate(best_x)
    rate = 0.0 if result is None else result.rate
    params = params_from_vector(best_x, space, scenario.source)
    return OptimizedPoint(
        params=params,
        rate=rate,
        result=result,
        vector=best_x,
        evaluations=evaluate.evaluations,
        converged=all_converged or rate <= 0.0,
    )


def scan_warm(
    scenarios: Sequence[ExperimentConfig],
    space: SearchSpace,
    use_ad: bool,
) -> list[OptimizedPoint]:
    """Optimize an ordered scenario sequence with warm starting."""
    out: list[OptimizedPoint] = []
    warm: list[tuple[float, ...]] = []
    for scenario in scenarios:
        point = optimize(scenario, space, use_ad, extra_seeds=warm)
        out.append(point)
        warm = [point.vector]
    return out
