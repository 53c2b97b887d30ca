"""Three-intensity decoy-state estimation with finite-key fluctuation.

Conversion discipline: simulated counts are treated as observed values,
converted to expected-value bounds (variant Chernoff), pushed through the
linear decoy algebra, and the result is converted back to an observed
bound with the direct Chernoff. Each additive term picks whichever bound
makes the final lower bound smaller (conservative toward the adversary).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import EMITTED_LABELS, Label, PairingStatistics
from .config import EpsilonBudget, ExperimentConfig
from .fstats import chernoff_from_expected, chernoff_from_observed, gamma_upper

BoundMap = dict[Label, tuple[float, float]]


@dataclass(frozen=True)
class DecoyBounds:
    """Certified single-photon / vacuum bounds for one scenario."""

    s0_z_lower: float
    s11_z_lower: float
    s11_x_lower: float
    t11_x_upper: float
    e11_x_upper: float
    phi11_z_upper: float
    phi11_z_lower: float
    e11_z_lower: float
    e11_z_upper: float

    def dump_record(self) -> str:
        """Keyed text record for test fixtures."""
        pairs = [
            ("s0_z_lower", self.s0_z_lower),
            ("s11_z_lower", self.s11_z_lower),
            ("s11_x_lower", self.s11_x_lower),
            ("t11_x_upper", self.t11_x_upper),
            ("e11_x_upper", self.e11_x_upper),
            ("phi11_z_upper", self.phi11_z_upper),
            ("phi11_z_lower", self.phi11_z_lower),
            ("e11_z_lower", self.e11_z_lower),
            ("e11_z_upper", self.e11_z_upper),
        ]
        return "\n".join(f"{k} -> {v:.12g}" for k, v in pairs)


def expected_counts(stats: PairingStatistics, budget: EpsilonBudget) -> BoundMap:
    """Expected-value bounds (lower*, upper*) for every emitted label."""
    out: BoundMap = {}
    for label in EMITTED_LABELS:
        if label not in stats.n:
            raise KeyError(f"missing label {label}")
        out[label] = chernoff_from_observed(stats.n[label], budget)
    return out


def _observed_lower(x_star: float, budget: EpsilonBudget) -> float:
    return max(0.0, chernoff_from_expected(max(x_star, 0.0), budget)[0])


def _s1_minus_s2(
    expected: BoundMap, stats: PairingStatistics, cfg: ExperimentConfig
) -> float:
    mu, nu = cfg.source.mu, cfg.source.nu
    p = stats.p_pair
    lo = {k: v[0] for k, v in expected.items()}
    up = {k: v[1] for k, v in expected.items()}
    s1 = (
        mu
        * mu
        * mu
        * (
            math.exp(2.0 * nu) * lo[("nu", "nu")] / p[("nu", "nu")]
            - math.exp(nu) * up[("o", "nu")] / p[("o", "nu")]
            - math.exp(nu) * up[("nu", "o")] / p[("nu", "o")]
            + lo[("o", "o")] / p[("o", "o")]
        )
    )
    s2 = (
        nu
        * nu
        * nu
        * (
            math.exp(2.0 * mu) * up[("mu", "mu")] / p[("mu", "mu")]
            - math.exp(mu) * lo[("o", "mu")] / p[("o", "mu")]
            - math.exp(mu) * lo[("mu", "o")] / p[("mu", "o")]
            + up[("o", "o")] / p[("o", "o")]
        )
    )
    return s1 - s2


def s11_z_bound(
    expected: BoundMap,
    stats: PairingStatistics,
    cfg: ExperimentConfig,
    budget: EpsilonBudget,
) -> float:
    """Observed lower bound on Z-basis single-photon-pair events."""
    mu, nu = cfg.source.mu, cfg.source.nu
    prefactor = math.exp(-2.0 * mu) * stats.p_pair[("mu", "mu")] / (
        nu * nu * (mu - nu)
    )
    s_star = prefactor * _s1_minus_s2(expected, stats, cfg)
    if s_star <= 0.0:
        return 0.0
    return _observed_lower(s_star, budget)


def s0_z_bound(
    expected: BoundMap,
    stats: PairingStatistics,
    cfg: ExperimentConfig,
    budget: EpsilonBudget,
) -> float:
    """Observed lower bound on vacuum events in the Z basis."""
    mu = cfg.source.mu
    ratio = stats.p_pair[("mu", "mu")] / stats.p_pair[("o", "mu")]
    s_star = math.exp(-mu) * ratio * expected[("o", "mu")][0]
    if s_star <= 0.0:
        return 0.0
    return _observed_lower(s_star, budget)


def _m0_lower(
    expected: BoundMap,
    stats: PairingStatistics,
    intensity: float,
    label: Label,
    side_a: Label,
    side_b: Label,
    budget: EpsilonBudget,
) -> float:
    """Common vacuum-involving error lower bound (X formula, relabellable)."""
    p = stats.p_pair
    pref = p[label]
    m_star = (
        math.exp(-intensity) * pref * expected[side_a][0] / (2.0 * p[side_a])
        + math.exp(-intensity) * pref * expected[side_b][0] / (2.0 * p[side_b])
        - math.exp(-2.0 * intensity) * pref * expected[("o", "o")][1] / (2.0 * p[("o", "o")])
    )
    if m_star <= 0.0:
        return 0.0
    return _observed_lower(m_star, budget)


def x_error_bounds(
    expected: BoundMap,
    stats: PairingStatistics,
    cfg: ExperimentConfig,
    budget: EpsilonBudget,
) -> tuple[float, float, float]:
    """(t11_x_upper, s11_x_lower, e11_x_upper)."""
    mu, nu = cfg.source.mu, cfg.source.nu
    m0 = _m0_lower(
        expected, stats, 2.0 * nu, ("2nu", "2nu"), ("o", "2nu"), ("2nu", "o"), budget
    )
    t_upper = max(0.0, stats.m_x - m0)
    prefactor = math.exp(-4.0 * nu) * 4.0 * stats.p_pair[("2nu", "2nu")] / (
        mu * mu * (mu - nu)
    )
    s_star = prefactor * _s1_minus_s2(expected, stats, cfg)
    s11_x = _observed_lower(s_star, budget) if s_star > 0.0 else 0.0
    if s11_x <= 0.0:
        return t_upper, 0.0, 0.5
    return t_upper, s11_x, min(max(t_upper / s11_x, 0.0), 0.5)


def phi11_z_bound(
    s11_z_lower: float,
    s11_x_lower: float,
    e11_x_upper: float,
    budget: EpsilonBudget,
) -> float:
    """Upper bound on the Z-basis single-photon phase error rate."""
    if s11_z_lower <= 0.0 or s11_x_lower <= 0.0:
        return 0.5
    gamma = gamma_upper(s11_z_lower, s11_x_lower, e11_x_upper, budget)
    return min(max(e11_x_upper + gamma, 0.0), 0.5)


def e11_z_range(
    expected: BoundMap,
    stats: PairingStatistics,
    s11_z_lower: float,
    cfg: ExperimentConfig,
    budget: EpsilonBudget,
) -> tuple[float, float]:
    """(lower, upper) for the Z-basis single-photon bit error rate.

    The protocol analysis leaves these estimators to exterior machinery;
    here the lower bound is 0 and the upper bound transplants the
    vacuum-involving error construction to Z-basis labels.
    """
    if s11_z_lower <= 0.0:
        return 0.0, 0.5
    mu = cfg.source.mu
    m0_z = _m0_lower(
        expected, stats, mu, ("mu", "mu"), ("o", "mu"), ("mu", "o"), budget
    )
    t_z = max(0.0, stats.m_z - m0_z)
    return 0.0, min(0.5, t_z / s11_z_lower)


def estimate_bounds(
    stats: PairingStatistics, cfg: ExperimentConfig, budget: EpsilonBudget
) -> DecoyBounds:
    """Full decoy-estimation pipeline for one scenario."""
    expected = expected_counts(stats, budget)
    s11_z = s11_z_bound(expected, stats, cfg, budget)
    s0_z = s0_z_bound(expected, stats, cfg, budget)
    # certified secret events cannot exceed the sifted-key size
    n_z = stats.n_z
    s11_z = min(s11_z, n_z)
    s0_z = min(s0_z, n_z - s11_z)
    t_up, s11_x, e11_x = x_error_bounds(expected, stats, cfg, budget)
    phi_up = phi11_z_bound(s11_z, s11_x, e11_x, budget)
    e_lo, e_up = e11_z_range(expected, stats, s11_z, cfg, budget)
    return DecoyBounds(
        s0_z_lower=s0_z,
        s11_z_lower=s11_z,
        s11_x_lower=s11_x,
        t11_x_upper=t_up,
        e11_x_upper=e11_x,
        phi11_z_upper=phi_up,
        phi11_z_lower=0.0,
        e11_z_lower=e_lo,
        e11_z_upper=e_up,
    )
