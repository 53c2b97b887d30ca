import pytest

from amdiqkd.config import (
    DetectorParams,
    EpsilonBudget,
    ExperimentConfig,
    FiberParams,
    NoiseParams,
    SourceParams,
)


def make_config(
    L=100.0,
    mu=0.5,
    nu=0.05,
    p_mu=0.5,
    p_nu=0.25,
    Tc=1e-5,
    e_d_z=0.005,
    E_hom=0.04,
    N=7.24e13,
    eps=1e-10,
    asymptotic=False,
) -> ExperimentConfig:
    return ExperimentConfig(
        detectors=DetectorParams(),
        fiber=FiberParams(total_distance_km=L),
        source=SourceParams(mu=mu, nu=nu, p_mu=p_mu, p_nu=p_nu, Tc=Tc),
        noise=NoiseParams(e_d_z=e_d_z, E_hom=E_hom),
        security=EpsilonBudget(eps=eps, asymptotic=asymptotic),
        pulse_count=N,
    )


@pytest.fixture
def default_config():
    return make_config()


@pytest.fixture
def budget():
    return EpsilonBudget()


# verdict lines from the acceptance suite, echoed after the run so they
# survive pytest's output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
