import pytest

from seriesval.field import RATIONALS, FieldTower


@pytest.fixture
def Qu():
    return FieldTower(["u"])


@pytest.fixture
def Quu():
    return FieldTower(["u", "u'"])


@pytest.fixture
def Qsqrt():
    """Q(u, u') with y, y^2 = u."""
    T = FieldTower(["u", "u'"])
    return T.adjoin("y", [-T.gen("u"), 0, 1])


@pytest.fixture
def Q():
    return RATIONALS
