from pathlib import Path

import pytest

from blockclean.relation import load_relation
from blockclean.rules import parse_rules

DATA = Path(__file__).parent / "data"


@pytest.fixture
def hospital():
    return load_relation(DATA / "hospital.csv")


@pytest.fixture
def hospital_rules(hospital):
    return parse_rules(DATA / "hospital.rules", hospital.names)
