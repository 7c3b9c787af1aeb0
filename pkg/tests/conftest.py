import dataclasses

import numpy as np
import pytest

from affectsim.config import FragmentSpec, GraphSpec, SimConfig
from affectsim.dynamics import EsefParams, RateWeights
from affectsim.emotion import MutationParams
from affectsim.network import InitConfig

TABLE1 = EsefParams(d=0.67, sigma=15.7079, theta_decay=0.05, m=32)
TABLE1_DURATIONS = (30, 54, 16, 20, 19, 8, 32)
TABLE1_ETVS = (21, 17, 1, 6, 19, 9, 17)


def small_config(**overrides) -> SimConfig:
    base = SimConfig(
        fragments=(FragmentSpec(14, 6), FragmentSpec(19, 6)),
        gamma_forget=0.3,
        num_all=5,
        esef=TABLE1,
        weights=RateWeights(1.0, 0.1, 0.1),
        mutation=MutationParams(0.05),
        init=InitConfig(etv_mu=16, etv_sigma=3, m=32),
        graph=GraphSpec(kind="ba", m_attach=1),
        seed=1,
    )
    return dataclasses.replace(base, **overrides)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines collected by test_acceptance and echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
