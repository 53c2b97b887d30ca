"""Physical and protocol parameters with experiment defaults.

All dataclasses are frozen; scans and the optimizer derive new
configurations with :func:`dataclasses.replace`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class ConfigError(ValueError):
    """Raised when a parameter set violates a model invariant."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(f"constraint violated: {msg}")


@dataclass(frozen=True)
class DetectorParams:
    """Threshold detector pair at the measurement node."""

    eta_L: float = 0.781
    eta_R: float = 0.77
    pd_L: float = 3.03e-9
    pd_R: float = 3.81e-9

    def __post_init__(self) -> None:
        _require(0.0 < self.eta_L <= 1.0, "0 < eta_L <= 1")
        _require(0.0 < self.eta_R <= 1.0, "0 < eta_R <= 1")
        _require(0.0 <= self.pd_L < 1.0, "0 <= pd_L < 1")
        _require(0.0 <= self.pd_R < 1.0, "0 <= pd_R < 1")


@dataclass(frozen=True)
class FiberParams:
    """Symmetric fiber link, total length split evenly between the arms."""

    alpha: float = 0.16
    total_distance_km: float = 0.0
    insert_loss_dB: float = 1.5

    def __post_init__(self) -> None:
        _require(self.alpha > 0.0, "alpha > 0")
        _require(self.total_distance_km >= 0.0, "L >= 0")
        _require(self.insert_loss_dB >= 0.0, "insert_loss_dB >= 0")


@dataclass(frozen=True)
class SourceParams:
    """Three-intensity source settings shared by both senders."""

    mu: float = 0.5
    nu: float = 0.05
    p_mu: float = 0.5
    p_nu: float = 0.25
    M: int = 16
    F: float = 1e9
    Tc: float = 1e-6

    def __post_init__(self) -> None:
        _require(self.mu > self.nu > 0.0, "mu > nu")
        _require(self.p_mu > 0.0 and self.p_nu > 0.0, "p_mu, p_nu > 0")
        _require(self.p_mu + self.p_nu < 1.0, "p_mu + p_nu < 1")
        _require(self.M >= 2, "M >= 2")
        _require(self.F > 0.0, "F > 0")
        _require(self.Tc > 0.0, "Tc > 0")

    @property
    def p_o(self) -> float:
        return 1.0 - self.p_mu - self.p_nu


@dataclass(frozen=True)
class NoiseParams:
    """Misalignment and phase-drift noise."""

    e_d_z: float = 0.005
    E_hom: float = 0.04
    delta_nu: float = 10.0
    omega_fib: float = 5900.0

    def __post_init__(self) -> None:
        _require(0.0 <= self.e_d_z <= 1.0, "0 <= e_d_z <= 1")
        _require(0.0 <= self.E_hom <= 1.0, "0 <= E_hom <= 1")
        _require(self.delta_nu >= 0.0, "delta_nu >= 0")
        _require(self.omega_fib >= 0.0, "omega_fib >= 0")


@dataclass(frozen=True)
class EpsilonBudget:
    """Failure-probability budget; every sub-parameter equals ``eps``.

    With ``asymptotic`` set, all statistical-fluctuation corrections and
    finite-size overhead terms are dropped (infinite-sample limit).
    """

    eps: float = 1e-10
    asymptotic: bool = False

    def __post_init__(self) -> None:
        _require(0.0 < self.eps < 1.0, "0 < eps < 1")

    @property
    def beta(self) -> float:
        return 0.0 if self.asymptotic else math.log(1.0 / self.eps)

    @property
    def eps_sec(self) -> float:
        # 2*(eps' + 2*eps_e + eps_hat) + eps_0 + eps_1 + eps_beta + eps_PA,
        # all components equal.
        return 12.0 * self.eps


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete scenario description for one rate evaluation."""

    detectors: DetectorParams = field(default_factory=DetectorParams)
    fiber: FiberParams = field(default_factory=FiberParams)
    source: SourceParams = field(default_factory=SourceParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    pulse_count: float = 7.24e13
    f_ec: float = 1.1
    security: EpsilonBudget = field(default_factory=EpsilonBudget)

    def __post_init__(self) -> None:
        _require(self.pulse_count >= 1.0, "pulse_count >= 1")
        _require(self.f_ec >= 1.0, "f_ec >= 1")

    def with_source(self, source: SourceParams) -> "ExperimentConfig":
        return replace(self, source=source)

    def with_distance(self, distance_km: float) -> "ExperimentConfig":
        return replace(self, fiber=replace(self.fiber, total_distance_km=distance_km))
