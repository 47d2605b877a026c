import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ssbsense.array import ArrayConfig, beam_grid, precoder
from ssbsense.waveform import OfdmFrameConfig


@pytest.fixture(scope="session")
def upa100():
    return ArrayConfig(10, 10)


@pytest.fixture(scope="session")
def surveillance_grid(upa100):
    return beam_grid(upa100, surveillance_only=True)


@pytest.fixture(scope="session")
def surveillance_precoder(surveillance_grid, upa100):
    return precoder(surveillance_grid, upa100)


@pytest.fixture(scope="session")
def ofdm_default():
    return OfdmFrameConfig()
