"""Statistical-fluctuation toolkit: Chernoff bounds, the random-sampling
correction, and binary entropy.

All conversions degenerate to identities when the budget is asymptotic
(beta = 0), so the same call sites serve both finite-size and
infinite-sample evaluations.
"""
from __future__ import annotations

import math

from ._kernels import binary_entropy
from .config import EpsilonBudget

__all__ = [
    "binary_entropy",
    "chernoff_from_expected",
    "chernoff_from_observed",
    "gamma_upper",
]

_LAM_CLAMP = 1e-12


def chernoff_from_expected(x_star: float, budget: EpsilonBudget) -> tuple[float, float]:
    """Observed-count bounds (lower, upper) from an expected count."""
    if x_star < 0.0:
        raise ValueError("expected count must be >= 0")
    beta = budget.beta
    upper = x_star + beta / 2.0 + math.sqrt(2.0 * beta * x_star + beta * beta / 4.0)
    lower = max(0.0, x_star - math.sqrt(2.0 * beta * x_star))
    return lower, upper


def chernoff_from_observed(x: float, budget: EpsilonBudget) -> tuple[float, float]:
    """Expected-value bounds (lower, upper) from an observed count."""
    if x < 0.0:
        raise ValueError("observed count must be >= 0")
    beta = budget.beta
    upper = x + beta + math.sqrt(2.0 * beta * x + beta * beta)
    lower = max(0.0, x - beta / 2.0 - math.sqrt(2.0 * beta * x + beta * beta / 4.0))
    return lower, upper


def gamma_upper(n: float, k: float, lam: float, budget: EpsilonBudget) -> float:
    """Random-sampling rate correction; adds to a rate estimated on k samples
    to bound the rate on the other n samples.
    """
    if budget.asymptotic:
        return 0.0
    if n <= 0.0 or k <= 0.0:
        raise ValueError("sample counts must be positive")
    lam = min(max(lam, _LAM_CLAMP), 1.0 - _LAM_CLAMP)
    eps = budget.eps
    total = n + k
    a_max = max(n, k)
    g = (total / (n * k)) * math.log(
        total / (2.0 * math.pi * n * k * lam * (1.0 - lam) * eps * eps)
    )
    if g < 0.0:
        # log argument below 1 only for astronomically large samples; the
        # correction is then negligible
        return 0.0
    ag = a_max * g / total
    inner = ag * ag + 4.0 * lam * (1.0 - lam) * g
    num = (1.0 - 2.0 * lam) * ag + math.sqrt(inner)
    den = 2.0 + 2.0 * a_max * a_max * g / (total * total)
    return max(0.0, num / den)
