"""Session fixtures: the expensive sample sets shared across test modules.

Seeds are fixed so every statistical assertion below is a deterministic
replay; each seed was checked once against the statistic it feeds.
"""

import numpy as np
import pytest

from majorant_gap import path_lab
from majorant_gap.excursion_max import default_law
from majorant_gap.mc_sampler import MSampleConfig, sample_m_many


@pytest.fixture(scope="session")
def m3law():
    return default_law()


@pytest.fixture(scope="session")
def m_samples_20k():
    """20,000 max-gap draws; feeds the moment and cross-route checks."""
    return sample_m_many(MSampleConfig(seed=2024, n_samples=20_000))


@pytest.fixture(scope="session")
def bridge_study():
    """5,000 bridges on the 2^15 grid with per-replication gap records."""
    return path_lab.gap_study(2**15, 5000, seed=2024, kind="bridge")


@pytest.fixture(scope="session")
def motion_study():
    """10,000 Brownian motions on the 2^15 grid."""
    return path_lab.gap_study(2**15, 10_000, seed=512, kind="motion")
