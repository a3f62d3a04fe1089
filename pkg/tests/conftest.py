import os
from pathlib import Path

import pytest
from hypothesis import settings

from anticyc.heckechar import DirichletCharacter, build_lambda, characters_of
from anticyc.qexp import load_level11
from anticyc.quadfield import ImagQuadField, enumerate_class_group

DATA = Path(__file__).parent / "data"

settings.register_profile("ci", deadline=None, max_examples=40, derandomize=True)
settings.register_profile("dev", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def level11():
    return load_level11()


@pytest.fixture(scope="session")
def level11_path():
    return DATA / "level11.json"


@pytest.fixture(scope="session")
def field7():
    return ImagQuadField(-7)


@pytest.fixture(scope="session")
def lam7(field7):
    return build_lambda(field7, 2, DirichletCharacter.trivial(1))


@pytest.fixture(scope="session")
def cl11(field7):
    return enumerate_class_group(field7.order(11))


@pytest.fixture(scope="session")
def conductor11_chars(cl11):
    return [x for x in characters_of(cl11) if x.conductor == 11]
