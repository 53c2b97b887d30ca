"""Finite-key secret key rates: plain, adversarial lambda decomposition, and
block post-processing (advantage distillation), plus the repeaterless
reference bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels
from .channel import PairingStatistics
from .config import EpsilonBudget
from .decoy import DecoyBounds
from .fstats import binary_entropy

B_MAX_DEFAULT = 4


@dataclass(frozen=True)
class LambdaPoint:
    """Decomposition weights of the joint state seen by the adversary."""

    l1: float
    l2: float
    l3: float
    l4: float

    def __post_init__(self) -> None:
        for v in (self.l1, self.l2, self.l3, self.l4):
            if v < -1e-12:
                raise ValueError("lambda weights must be >= 0")
        if abs(self.l1 + self.l2 + self.l3 + self.l4 - 1.0) > 1e-9:
            raise ValueError("lambda weights must sum to 1")

    @property
    def phi(self) -> float:
        return self.l2 + self.l4

    @property
    def e(self) -> float:
        return self.l3 + self.l4


@dataclass(frozen=True)
class AdTransformed:
    """Lambda weights after b-fold blocking, with the success probabilities."""

    lt1: float
    lt2: float
    lt3: float
    lt4: float
    p_succ: float


@dataclass(frozen=True)
class KeyRateResult:
    rate: float
    ell: float
    b_opt: int
    lambda_min: LambdaPoint | None
    components: dict[str, float] = field(default_factory=dict)


def _ipow(x: float, b: int) -> float:
    r = 1.0
    for _ in range(b):
        r *= x
    return r


def _overhead_bits(budget: EpsilonBudget) -> float:
    if budget.asymptotic:
        return 0.0
    eps = budget.eps
    return (
        math.log2(2.0 / eps)
        + 2.0 * math.log2(2.0 / (eps * eps))
        + 2.0 * math.log2(1.0 / (2.0 * eps))
    )


def ad_transform(lp: LambdaPoint, b: int) -> AdTransformed:
    """Blocking map on the lambda weights; identity for b = 1."""
    if b < 1:
        raise ValueError("block size must be >= 1")
    s12 = lp.l1 + lp.l2
    d12 = lp.l1 - lp.l2
    s34 = lp.l3 + lp.l4
    d34 = lp.l3 - lp.l4
    p_succ = _ipow(s12, b) + _ipow(s34, b)
    if p_succ <= 0.0:
        raise ValueError("degenerate lambda point: p_succ = 0")
    return AdTransformed(
        lt1=(_ipow(s12, b) + _ipow(d12, b)) / (2.0 * p_succ),
        lt2=(_ipow(s12, b) - _ipow(d12, b)) / (2.0 * p_succ),
        lt3=(_ipow(s34, b) + _ipow(d34, b)) / (2.0 * p_succ),
        lt4=(_ipow(s34, b) - _ipow(d34, b)) / (2.0 * p_succ),
        p_succ=p_succ,
    )


def ad_success(E_z: float, b: int) -> tuple[float, float]:
    """(q_succ, post-blocking error rate) for raw error rate E_z."""
    if not 0.0 <= E_z <= 1.0:
        raise ValueError("E_z must be in [0, 1]")
    if b < 1:
        raise ValueError("block size must be >= 1")
    q_succ = _ipow(E_z, b) + _ipow(1.0 - E_z, b)
    return q_succ, _ipow(E_z, b) / q_succ


def inner_min(
    phi_lo: float, phi_hi: float, e_lo: float, e_hi: float, b: int
) -> tuple[LambdaPoint, float]:
    """Adversarial minimum of the entropy bracket over the constraint box."""
    obj, phi, e, l4 = _kernels.inner_min(phi_lo, phi_hi, e_lo, e_hi, b)
    lp = LambdaPoint(
        l1=max(0.0, 1.0 - phi - e + l4),
        l2=max(0.0, phi - l4),
        l3=max(0.0, e - l4),
        l4=l4,
    )
    return lp, obj


def _lambda_box(bounds: DecoyBounds) -> tuple[float, float, float, float]:
    phi_lo = min(bounds.phi11_z_lower, bounds.phi11_z_upper)
    e_lo = min(bounds.e11_z_lower, bounds.e11_z_upper)
    return phi_lo, bounds.phi11_z_upper, e_lo, bounds.e11_z_upper


def rate_no_ad(
    bounds: DecoyBounds,
    stats: PairingStatistics,
    N: float,
    budget: EpsilonBudget,
    f: float,
) -> KeyRateResult:
    """Secret key rate without lambda decomposition or blocking."""
    n_z = stats.n_z
    ec_cost = n_z * f * binary_entropy(min(stats.E_z, 0.5))
    secret = bounds.s0_z_lower + bounds.s11_z_lower * (
        1.0 - binary_entropy(bounds.phi11_z_upper)
    )
    raw = (secret - ec_cost - _overhead_bits(budget)) / N
    rate = max(0.0, raw)
    return KeyRateResult(
        rate=rate,
        ell=math.floor(rate * N),
        b_opt=1,
        lambda_min=None,
        components={
            "raw_rate": raw,
            "s0_term": bounds.s0_z_lower,
            "s11_term": secret - bounds.s0_z_lower,
            "lambda_ec": ec_cost,
            "overhead": _overhead_bits(budget),
        },
    )


def rate_ad(
    bounds: DecoyBounds,
    stats: PairingStatistics,
    N: float,
    budget: EpsilonBudget,
    f: float,
    b_max: int = B_MAX_DEFAULT,
) -> KeyRateResult:
    """Secret key rate with blocking, maximized over block sizes 1..b_max."""
    if b_max < 1:
        raise ValueError("b_max must be >= 1")
    n_z = stats.n_z
    if n_z <= 0.0:
        return KeyRateResult(0.0, 0.0, 1, None)
    phi_lo, phi_hi, e_lo, e_hi = _lambda_box(bounds)
    if phi_lo > phi_hi or e_lo > e_hi:
        raise ValueError("infeasible lambda constraint box")
    overhead = _overhead_bits(budget)
    e_z = min(stats.E_z, 0.5)
    v0 = min(1.0, bounds.s0_z_lower / n_z)
    v11 = min(1.0, bounds.s11_z_lower / n_z)

    best_raw = -math.inf
    best_b = 1
    best_lp: LambdaPoint | None = None
    for b in range(1, b_max + 1):
        q_succ, e_tilde = ad_success(e_z, b)
        lp, bracket = inner_min(phi_lo, phi_hi, e_lo, e_hi, b)
        raw = (
            (n_z * q_succ / b)
            * (
                _ipow(v0, b)
                + _ipow(v11, b) * bracket
                - f * binary_entropy(e_tilde)
            )
            - overhead
        ) / N
        if raw > best_raw:
            best_raw, best_b, best_lp = raw, b, lp

    rate = max(0.0, best_raw)
    return KeyRateResult(
        rate=rate,
        ell=math.floor(rate * N),
        b_opt=best_b,
        lambda_min=best_lp,
        components={"raw_rate": best_raw, "overhead": overhead},
    )


def rate_lambda(
    bounds: DecoyBounds,
    stats: PairingStatistics,
    N: float,
    budget: EpsilonBudget,
    f: float,
) -> KeyRateResult:
    """Adversarial single-block rate, evaluated without the blocking machinery.

    Serves as an independent identity check for the b = 1 branch of
    :func:`rate_ad`.
    """
    n_z = stats.n_z
    phi_lo, phi_hi, e_lo, e_hi = _lambda_box(bounds)
    if phi_lo > phi_hi or e_lo > e_hi:
        raise ValueError("infeasible lambda constraint box")
    lp, bracket = inner_min(phi_lo, phi_hi, e_lo, e_hi, 1)
    v0 = min(1.0, bounds.s0_z_lower / n_z)
    v11 = min(1.0, bounds.s11_z_lower / n_z)
    overhead = _overhead_bits(budget)
    raw = (
        n_z * (v0 + v11 * bracket - f * binary_entropy(min(stats.E_z, 0.5)))
        - overhead
    ) / N
    rate = max(0.0, raw)
    return KeyRateResult(
        rate=rate,
        ell=math.floor(rate * N),
        b_opt=1,
        lambda_min=lp,
        components={"raw_rate": raw, "bracket": bracket, "overhead": overhead},
    )


def plob_bound(eta_total: float) -> float:
    """Repeaterless secret-key capacity of a lossy channel."""
    if not 0.0 <= eta_total < 1.0:
        raise ValueError("transmittance must be in [0, 1)")
    return -math.log2(1.0 - eta_total)
