import numpy as np
import pytest

from stokes_sd.models.params import GaussBiexpParams, PhysicalContext, SubOhmicParams
from stokes_sd.storage.results import reset_result_store


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance grids that take several seconds")


@pytest.fixture
def subohmic():
    return SubOhmicParams(delta_s=1.0, omega_ph=5.0, omega_c=5.0, s=0.5)


@pytest.fixture
def coumarin_gb():
    return GaussBiexpParams(a_g=0.48, omega_d=38.5, a_1=0.20, tau_1=0.126, a_2=0.35, tau_2=0.880)


@pytest.fixture
def room_temperature():
    return PhysicalContext(temperature=300.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def write_csv(tmp_path):
    """Write raw text to a CSV file under tmp_path and return its path."""
    def _write(text: str, name: str = "data.csv") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def memory_store(monkeypatch):
    monkeypatch.setenv("STORAGE_BACKEND", "memory")
    reset_result_store()
    yield
    reset_result_store()
