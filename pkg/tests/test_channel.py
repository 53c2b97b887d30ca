import math

import pytest

from amdiqkd.channel import (
    EMITTED_LABELS,
    NoZBasisData,
    PairingStatistics,
    build_statistics,
    click_probability,
    pairing_probability,
    pairing_totals,
    single_detector_gains,
    total_gain_closed,
    total_gain_numeric,
    transmittance,
    x_basis_counts,
    z_basis_counts,
)
from amdiqkd.config import FiberParams

from conftest import make_config


def test_transmittance_values():
    fiber = FiberParams(alpha=0.16, total_distance_km=200.0, insert_loss_dB=1.5)
    assert transmittance(fiber, 0.0) == pytest.approx(10.0 ** (-0.15))
    assert transmittance(fiber, 100.0) == pytest.approx(10.0 ** (-(16.0 + 1.5) / 10.0))
    with pytest.raises(ValueError):
        transmittance(fiber, -1.0)


def test_single_detector_gains_in_unit_interval():
    cfg = make_config(L=100.0)
    for theta in (0.0, 1.0, math.pi, 5.0):
        ql, qr = single_detector_gains(theta, 0.5, 0.05, cfg)
        assert 0.0 <= ql <= 1.0
        assert 0.0 <= qr <= 1.0


def test_closed_form_matches_quadrature():
    # spot check; the full grid is the P4 acceptance criterion
    cfg = make_config(L=150.0)
    for ka, kb in ((0.5, 0.5), (0.5, 0.0), (0.05, 0.5), (0.0, 0.0)):
        closed = total_gain_closed(ka, kb, cfg)
        numeric = total_gain_numeric(ka, kb, cfg, nodes=1024)
        assert closed == pytest.approx(numeric, rel=1e-4, abs=1e-18)


def test_quadrature_node_floor():
    cfg = make_config()
    with pytest.raises(ValueError):
        total_gain_numeric(0.5, 0.5, cfg, nodes=8)


def test_click_probability_excludes_filtered_pairs():
    cfg = make_config(L=50.0)
    q = click_probability(cfg)
    assert 0.0 < q < 1.0
    # removing the two filtered intensity pairs must reduce the raw sum
    from amdiqkd.channel import _send_probs, _slot_gains

    gains = _slot_gains(cfg)
    p = _send_probs(cfg)
    raw = sum(p[a] * p[b] * gains[(a, b)] for a in p for b in p)
    assert q < raw


def test_pairing_totals_identities():
    cfg = make_config(L=100.0, Tc=1e-5)
    N = 1e12
    q_tot = click_probability(cfg)
    q_tc, n_tot, t_mean = pairing_totals(cfg, N)
    n_slots = math.floor(cfg.source.F * cfg.source.Tc)
    assert q_tc == pytest.approx(1.0 - (1.0 - q_tot) ** n_slots, rel=1e-9)
    assert n_tot == pytest.approx(N * q_tot / (1.0 + 1.0 / q_tc), rel=1e-12)
    assert n_tot < N * q_tot
    assert t_mean >= 1.0 / cfg.source.F


def test_pairing_window_shorter_than_clock_period():
    cfg = make_config(Tc=1e-10)  # below the 1 ns clock period
    q_tc, n_tot, t_mean = pairing_totals(cfg, 1e12)
    assert q_tc == 0.0
    assert n_tot == 0.0


def test_pairing_probability_normalization():
    cfg = make_config()
    for label in EMITTED_LABELS:
        p = pairing_probability(label, cfg)
        assert 0.0 <= p <= 1.0
    with pytest.raises(ValueError):
        pairing_probability(("mu", "bogus"), cfg)


def test_x_basis_sifting_factor():
    cfg = make_config()
    from dataclasses import replace

    p16 = pairing_probability(("2nu", "2nu"), cfg)
    cfg32 = cfg.with_source(replace(cfg.source, M=32))
    p32 = pairing_probability(("2nu", "2nu"), cfg32)
    assert p16 == pytest.approx(2.0 * p32, rel=1e-12)


def test_z_counts_and_error_rate():
    cfg = make_config(L=100.0)
    n_z, m_z, e_z = z_basis_counts(cfg, 7.24e13)
    assert n_z > 0.0
    assert 0.0 < m_z < n_z
    assert e_z == pytest.approx(m_z / n_z)
    # misalignment dominates at moderate distance
    assert e_z == pytest.approx(cfg.noise.e_d_z, rel=0.2)


def test_x_counts_bounded():
    cfg = make_config(L=100.0)
    n_x, m_x = x_basis_counts(cfg, 7.24e13)
    assert n_x > 0.0
    assert 0.0 <= m_x <= n_x


def test_build_statistics_consistency():
    cfg = make_config(L=100.0)
    stats = build_statistics(cfg)
    assert set(stats.n) == set(EMITTED_LABELS)
    assert all(v >= 0.0 for v in stats.n.values())
    assert stats.n_z == stats.n[("mu", "mu")]
    assert 0.0 < stats.E_z < 1.0
    assert sum(stats.n.values()) <= stats.n_tot * (1.0 + 1e-9)
    record = stats.dump_record()
    assert "q_tot ->" in record and "n[mu,mu] ->" in record


def test_no_z_data_raised():
    stats_kwargs = dict(
        q_tot=1e-6,
        q_Tc=0.5,
        n_tot=100.0,
        T_mean=1e-6,
        m_z=0.0,
        m_x=0.0,
        p_pair={},
    )
    with pytest.raises(NoZBasisData):
        PairingStatistics(n={("mu", "mu"): 0.0}, **stats_kwargs)


def test_error_rate_increases_with_misalignment():
    lo = build_statistics(make_config(e_d_z=0.005)).E_z
    hi = build_statistics(make_config(e_d_z=0.05)).E_z
    assert hi > lo
