import sys
from fractions import Fraction

import pytest

from rdmass.modelfile import preset
from rdmass.parser import parse


def P(text, m, **kw):
    return parse(text, m, **kw)


@pytest.fixture(scope="session")
def presets():
    return {name: preset(name) for name in ("example1", "example2", "example3", "example4", "blowup", "eq5")}


@pytest.fixture
def eq5_F():
    return [P("u1 - u1*u2*u3", 3), P("u1*u2*u3 - u2", 3), P("u1*u2*u3 - u3", 3)]


def frac_point(values):
    return [Fraction(v) for v in values]
