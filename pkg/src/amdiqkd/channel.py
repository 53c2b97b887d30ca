"""Detection and pairing statistics of the asynchronous protocol under a
symmetric fiber channel.

Per-slot gains use the closed form with the small-argument Bessel
approximation I0(x) ~ 1 + x^2/4; `total_gain_numeric` integrates the exact
integrand and serves as the oracle for the closed form. Phase-dependent
X-basis counts are evaluated with composite Simpson quadrature.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig, FiberParams

Label = tuple[str, str]

# per-party decompositions of a total pairing intensity into (early, late) slots
_DECOMP: dict[str, tuple[tuple[str, str], ...]] = {
    "mu": (("mu", "o"), ("o", "mu")),
    "nu": (("nu", "o"), ("o", "nu")),
    "2nu": (("nu", "nu"),),
    "o": (("o", "o"),),
}
# per-slot click combinations removed by click filtering
_FILTERED = {("mu", "nu"), ("nu", "mu")}

# labels carried in PairingStatistics.n
EMITTED_LABELS: tuple[Label, ...] = (
    ("mu", "mu"),
    ("nu", "nu"),
    ("o", "nu"),
    ("nu", "o"),
    ("o", "mu"),
    ("mu", "o"),
    ("o", "o"),
    ("2nu", "2nu"),
    ("o", "2nu"),
    ("2nu", "o"),
)

DEBUG_CLAMP = False
_CLAMP_TOL = 1e-12


class ModelConsistencyWarning(UserWarning):
    """Raw gain fell outside [0, 1] by more than the clamping tolerance."""


class NoZBasisData(ValueError):
    """No Z-basis pairings; the error rate is undefined."""


@dataclass(frozen=True)
class PairingStatistics:
    """Expected pairing counts and derived totals for one scenario."""

    q_tot: float
    q_Tc: float
    n_tot: float
    T_mean: float
    n: dict[Label, float]
    m_z: float
    m_x: float
    p_pair: dict[Label, float]
    E_z: float = field(init=False)

    def __post_init__(self) -> None:
        n_z = self.n[("mu", "mu")]
        if n_z <= 0.0:
            raise NoZBasisData("no Z data")
        object.__setattr__(self, "E_z", self.m_z / n_z)

    @property
    def n_z(self) -> float:
        return self.n[("mu", "mu")]

    def dump_record(self) -> str:
        """Keyed text record for test fixtures."""
        lines = [
            f"q_tot -> {self.q_tot:.12g}",
            f"q_Tc -> {self.q_Tc:.12g}",
            f"n_tot -> {self.n_tot:.12g}",
            f"T_mean -> {self.T_mean:.12g}",
            f"m_z -> {self.m_z:.12g}",
            f"m_x -> {self.m_x:.12g}",
        ]
        lines += [f"n[{a},{b}] -> {v:.12g}" for (a, b), v in sorted(self.n.items())]
        return "\n".join(lines)


def _clamp01(x: float, what: str) -> float:
    if x < 0.0 or x > 1.0:
        if DEBUG_CLAMP and (x < -_CLAMP_TOL or x > 1.0 + _CLAMP_TOL):
            warnings.warn(f"{what} clamped from {x}", ModelConsistencyWarning)
        return min(max(x, 0.0), 1.0)
    return x


def transmittance(fiber: FiberParams, arm_length_km: float) -> float:
    """Single-arm transmittance including the measurement-side insertion loss."""
    if arm_length_km < 0.0:
        raise ValueError("arm length must be >= 0")
    return 10.0 ** (-(fiber.alpha * arm_length_km + fiber.insert_loss_dB) / 10.0)


def _arm_transmittances(cfg: ExperimentConfig) -> tuple[float, float]:
    eta = transmittance(cfg.fiber, cfg.fiber.total_distance_km / 2.0)
    return eta, eta


def _intensities(cfg: ExperimentConfig) -> dict[str, float]:
    return {"mu": cfg.source.mu, "nu": cfg.source.nu, "o": 0.0}


def _send_probs(cfg: ExperimentConfig) -> dict[str, float]:
    return {"mu": cfg.source.p_mu, "nu": cfg.source.p_nu, "o": cfg.source.p_o}


def single_detector_gains(
    theta: float, ka: float, kb: float, cfg: ExperimentConfig
) -> tuple[float, float]:
    """Exclusive-click probabilities (qL, qR) at relative phase theta."""
    det = cfg.detectors
    eta_a, eta_b = _arm_transmittances(cfg)
    sa, sb = eta_a * ka, eta_b * kb
    y_l = (1.0 - det.pd_L) * math.exp(-det.eta_L * (sa + sb) / 2.0)
    y_r = (1.0 - det.pd_R) * math.exp(-det.eta_R * (sa + sb) / 2.0)
    x = math.sqrt(sa * sb) * math.cos(theta)
    raw_l = y_r * math.exp(det.eta_R * x) * (1.0 - y_l * math.exp(-det.eta_L * x))
    raw_r = y_l * math.exp(-det.eta_L * x) * (1.0 - y_r * math.exp(det.eta_R * x))
    return _clamp01(raw_l, "qL"), _clamp01(raw_r, "qR")


def _gains_theta_arrays(
    theta: np.ndarray, ka: float, kb: float, cfg: ExperimentConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized single_detector_gains over a phase grid."""
    det = cfg.detectors
    eta_a, eta_b = _arm_transmittances(cfg)
    sa, sb = eta_a * ka, eta_b * kb
    y_l = (1.0 - det.pd_L) * math.exp(-det.eta_L * (sa + sb) / 2.0)
    y_r = (1.0 - det.pd_R) * math.exp(-det.eta_R * (sa + sb) / 2.0)
    x = math.sqrt(sa * sb) * np.cos(theta)
    ql = y_r * np.exp(det.eta_R * x) * (1.0 - y_l * np.exp(-det.eta_L * x))
    qr = y_l * np.exp(-det.eta_L * x) * (1.0 - y_r * np.exp(det.eta_R * x))
    return np.clip(ql, 0.0, 1.0), np.clip(qr, 0.0, 1.0)


def _bessel_i0_approx(x: float) -> float:
    return 1.0 + x * x / 4.0


def total_gain_closed(ka: float, kb: float, cfg: ExperimentConfig) -> float:
    """Phase-averaged click probability, closed form."""
    det = cfg.detectors
    eta_a, eta_b = _arm_transmittances(cfg)
    sa, sb = eta_a * ka, eta_b * kb
    y_l = (1.0 - det.pd_L) * math.exp(-det.eta_L * (sa + sb) / 2.0)
    y_r = (1.0 - det.pd_R) * math.exp(-det.eta_R * (sa + sb) / 2.0)
    s = math.sqrt(sa * sb)
    q = (
        y_l * _bessel_i0_approx(det.eta_L * s)
        + y_r * _bessel_i0_approx(det.eta_R * s)
        - 2.0 * y_l * y_r * _bessel_i0_approx((det.eta_L - det.eta_R) * s)
    )
    return _clamp01(q, "total gain")


def _simpson(values: np.ndarray, h: float) -> float:
    # composite Simpson over an even number of intervals
    n = len(values) - 1
    if n % 2 != 0:
        raise ValueError("Simpson rule needs an even interval count")
    return (h / 3.0) * (
        values[0]
        + values[-1]
        + 4.0 * values[1:-1:2].sum()
        + 2.0 * values[2:-1:2].sum()
    )


def total_gain_numeric(
    ka: float, kb: float, cfg: ExperimentConfig, nodes: int = 256
) -> float:
    """Phase-averaged click probability by quadrature of the exact integrand."""
    if nodes < 16:
        raise ValueError("nodes must be >= 16")
    theta = np.linspace(0.0, 2.0 * math.pi, nodes + 1)
    ql, qr = _gains_theta_arrays(theta, ka, kb, cfg)
    h = 2.0 * math.pi / nodes
    return _simpson(ql + qr, h) / (2.0 * math.pi)


def _slot_gains(cfg: ExperimentConfig) -> dict[tuple[str, str], float]:
    kappa = _intensities(cfg)
    keys = ("mu", "nu", "o")
    return {
        (a, b): total_gain_closed(kappa[a], kappa[b], cfg) for a in keys for b in keys
    }


def click_probability(cfg: ExperimentConfig) -> float:
    """Per-slot kept-click probability q_tot (click-filtered events removed)."""
    gains = _slot_gains(cfg)
    p = _send_probs(cfg)
    q = sum(p[a] * p[b] * gains[(a, b)] for a in p for b in p)
    q -= p["mu"] * p["nu"] * gains[("mu", "nu")]
    q -= p["nu"] * p["mu"] * gains[("nu", "mu")]
    return _clamp01(q, "q_tot")


def pairing_totals(cfg: ExperimentConfig, N: float) -> tuple[float, float, float]:
    """(q_Tc, n_tot, T_mean) from the per-slot click probability."""
    if N < 1.0:
        raise ValueError("N must be >= 1")
    q_tot = click_probability(cfg)
    return _pairing_totals_from_qtot(cfg, N, q_tot)


def _pairing_totals_from_qtot(
    cfg: ExperimentConfig, N: float, q_tot: float
) -> tuple[float, float, float]:
    F = cfg.source.F
    if q_tot <= 0.0:
        return 0.0, 0.0, 1.0 / F
    n_tc = math.floor(F * cfg.source.Tc)
    if n_tc < 1:
        return 0.0, 0.0, 1.0 / F
    # 1 - (1-q)^n via expm1 for tiny q
    q_tc = -math.expm1(n_tc * math.log1p(-q_tot)) if q_tot < 1.0 else 1.0
    if q_tc <= 0.0:
        return 0.0, 0.0, 1.0 / F
    n_tot = N * q_tot / (1.0 + 1.0 / q_tc)
    t_mean = (1.0 - n_tc * q_tot * (1.0 / q_tc - 1.0)) / (F * q_tot)
    if t_mean < 1.0 / F:
        if DEBUG_CLAMP:
            warnings.warn(
                f"T_mean={t_mean} below one clock period, clamped",
                ModelConsistencyWarning,
            )
        t_mean = 1.0 / F
    return q_tc, n_tot, t_mean


def pairing_probability(label: Label, cfg: ExperimentConfig) -> float:
    """Coincidence probability p_[label] over allowed slot decompositions."""
    tot_a, tot_b = label
    if tot_a not in _DECOMP or tot_b not in _DECOMP:
        raise ValueError(f"unknown pairing label {label}")
    p = _send_probs(cfg)
    p_s = 1.0 - p["mu"] * p["nu"] - p["nu"] * p["mu"]
    total = 0.0
    for ea, la in _DECOMP[tot_a]:
        for eb, lb in _DECOMP[tot_b]:
            if (ea, eb) in _FILTERED or (la, lb) in _FILTERED:
                continue
            total += (p[ea] * p[eb] / p_s) * (p[la] * p[lb] / p_s)
    if label == ("2nu", "2nu"):
        total *= 2.0 / cfg.source.M
    return total


def _pair_count(
    label: Label,
    gains: dict[tuple[str, str], float],
    probs: dict[str, float],
    q_tot: float,
    n_tot: float,
) -> float:
    tot_a, tot_b = label
    total = 0.0
    for ea, la in _DECOMP[tot_a]:
        for eb, lb in _DECOMP[tot_b]:
            if (ea, eb) in _FILTERED or (la, lb) in _FILTERED:
                continue
            early = probs[ea] * probs[eb] * gains[(ea, eb)] / q_tot
            late = probs[la] * probs[lb] * gains[(la, lb)] / q_tot
            total += early * late
    return n_tot * total


def z_basis_counts(cfg: ExperimentConfig, N: float) -> tuple[float, float, float]:
    """(n_[mu,mu], m_[mu,mu], E_z) with the misalignment mixing applied."""
    gains = _slot_gains(cfg)
    probs = _send_probs(cfg)
    q_tot = click_probability(cfg)
    _, n_tot, _ = _pairing_totals_from_qtot(cfg, N, q_tot)
    if n_tot <= 0.0 or q_tot <= 0.0:
        raise NoZBasisData("no Z data")
    n_z = _pair_count(("mu", "mu"), gains, probs, q_tot, n_tot)
    # intrinsic errors: both parties place the signal pulse in the same slot
    same_slot = (
        probs["mu"] * probs["mu"] * gains[("mu", "mu")] / q_tot
    ) * (probs["o"] * probs["o"] * gains[("o", "o")] / q_tot)
    m_prime = n_tot * 2.0 * same_slot
    e_d = cfg.noise.e_d_z
    m_z = e_d * (n_z - m_prime) + (1.0 - e_d) * m_prime
    if n_z <= 0.0:
        raise NoZBasisData("no Z data")
    return n_z, m_z, m_z / n_z


def x_basis_counts(
    cfg: ExperimentConfig, N: float, nodes: int = 256
) -> tuple[float, float]:
    """(n_[2nu,2nu], m_[2nu,2nu]) by phase-grid quadrature."""
    q_tot = click_probability(cfg)
    _, n_tot, t_mean = _pairing_totals_from_qtot(cfg, N, q_tot)
    if n_tot <= 0.0 or q_tot <= 0.0:
        return 0.0, 0.0
    src, noise = cfg.source, cfg.noise
    p_nu = src.p_nu
    theta = np.linspace(0.0, 2.0 * math.pi, nodes + 1)
    h = 2.0 * math.pi / nodes
    ql, qr = _gains_theta_arrays(theta, src.nu, src.nu, cfg)
    w = p_nu * p_nu / q_tot
    n_x = (n_tot / (src.M * math.pi)) * _simpson((w * (ql + qr)) ** 2, h)

    delta = t_mean * (2.0 * math.pi * noise.delta_nu + noise.omega_fib)
    qld, qrd = _gains_theta_arrays(theta + delta, src.nu, src.nu, cfg)
    e_hom = noise.E_hom
    mism = ql * qrd + qr * qld
    match = ql * qld + qr * qrd
    integrand = (w * w) * ((1.0 - e_hom) * mism + e_hom * match)
    m_x = (n_tot / (src.M * math.pi)) * _simpson(integrand, h)
    return n_x, min(m_x, n_x)


def build_statistics(
    cfg: ExperimentConfig, N: float | None = None, nodes: int = 256
) -> PairingStatistics:
    """Assemble all pairing statistics for one scenario."""
    if N is None:
        N = cfg.pulse_count
    gains = _slot_gains(cfg)
    probs = _send_probs(cfg)
    p = _send_probs(cfg)
    q_tot = sum(p[a] * p[b] * gains[(a, b)] for a in p for b in p)
    q_tot -= p["mu"] * p["nu"] * gains[("mu", "nu")]
    q_tot -= p["nu"] * p["mu"] * gains[("nu", "mu")]
    q_tot = _clamp01(q_tot, "q_tot")
    q_tc, n_tot, t_mean = _pairing_totals_from_qtot(cfg, N, q_tot)
    if n_tot <= 0.0 or q_tot <= 0.0:
        raise NoZBasisData("no Z data")

    counts: dict[Label, float] = {}
    for label in EMITTED_LABELS:
        if label == ("2nu", "2nu"):
            continue
        counts[label] = _pair_count(label, gains, probs, q_tot, n_tot)

    n_z = counts[("mu", "mu")]
    same_slot = (
        probs["mu"] * probs["mu"] * gains[("mu", "mu")] / q_tot
    ) * (probs["o"] * probs["o"] * gains[("o", "o")] / q_tot)
    m_prime = n_tot * 2.0 * same_slot
    e_d = cfg.noise.e_d_z
    m_z = e_d * (n_z - m_prime) + (1.0 - e_d) * m_prime

    n_x, m_x = x_basis_counts(cfg, N, nodes=nodes)
    counts[("2nu", "2nu")] = n_x

    p_pair = {label: pairing_probability(label, cfg) for label in EMITTED_LABELS}
    return PairingStatistics(
        q_tot=q_tot,
        q_Tc=q_tc,
        n_tot=n_tot,
        T_mean=t_mean,
        n=counts,
        m_z=m_z,
        m_x=m_x,
        p_pair=p_pair,
    )
