import pytest

from qsyz.fan import MomentPolytope, calabi_yau_vector
from qsyz.fanfile import load_fan
from qsyz.mirror import solve_coefficients


class Bundle:
    def __init__(self, name):
        ff = load_fan(name)
        self.fan, self.kahler, self.eps = ff.fan, ff.kahler, ff.eps_abs
        self.file = ff
        self.frame = calabi_yau_vector(self.fan)
        self.poly = MomentPolytope(self.fan, self.kahler)
        self.family = solve_coefficients(self.fan, self.frame, self.kahler)


_CACHE = {}


def bundle(name: str) -> Bundle:
    if name not in _CACHE:
        _CACHE[name] = Bundle(name)
    return _CACHE[name]


@pytest.fixture(params=["kp1.fan", "kp2.fan", "c3.fan", "c4.fan"])
def any_bundle(request):
    return bundle(request.param)


@pytest.fixture
def kp2():
    return bundle("kp2.fan")


@pytest.fixture
def kp1():
    return bundle("kp1.fan")


@pytest.fixture
def c3():
    return bundle("c3.fan")


@pytest.fixture
def c4():
    return bundle("c4.fan")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("QSYZ_CACHE_DIR", str(tmp_path / "cache"))
