"""
Shared fixtures: the shipped example database and its hosts
"""
from pathlib import Path

import pytest

from src.core.cache import cache_manager
from src.core.data_loader import DataLoader
from src.engine.materials import load_database

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"


@pytest.fixture(scope="session")
def database():
    path = DATA / "materials.example"
    return load_database(path.read_text(encoding="utf-8"), source=str(path))


@pytest.fixture
def diamond(database):
    return database.host("diamond")


@pytest.fixture
def sic(database):
    return database.host("3C-SiC")


@pytest.fixture
def loader():
    return DataLoader()


@pytest.fixture
def fresh_cache():
    cache_manager.clear()
    yield cache_manager
    cache_manager.clear()


@pytest.fixture
def data_dir():
    return DATA
