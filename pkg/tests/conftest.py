import math

import pytest

from planetspec.profile import ConstantSpeed, LayeredProfile, make_log_profile

UNIT_DENSITY = [{"rho": 1.0, "mu": 1.0}]


@pytest.fixture(scope="session")
def ball():
    """Constant-speed unit ball with unit density."""
    return LayeredProfile([ConstantSpeed(1.0)], density=UNIT_DENSITY)


@pytest.fixture(scope="session")
def log_profile():
    """Single-layer log profile, smooth Herglotz, no density."""
    return make_log_profile([(2.0, 0.5)], inner_radius=0.05)


@pytest.fixture(scope="session")
def glide_profile():
    """Two constant layers, faster below: supports head-wave gliding."""
    return LayeredProfile([ConstantSpeed(1.0), ConstantSpeed(1.3)],
                          interfaces=[0.6])


@pytest.fixture(scope="session")
def fast_core_profile():
    """c = 2 below r = 1/2, c = 1 above, unit density (TIR modes)."""
    return LayeredProfile(
        [ConstantSpeed(1.0), ConstantSpeed(2.0)], interfaces=[0.5],
        density=[{"rho": 1.0, "mu": 1.0}, {"rho": 1.0, "mu": 4.0}])


@pytest.fixture(scope="session")
def annulus():
    """Constant-speed shell r in (1/2, 1], unit density."""
    return LayeredProfile([ConstantSpeed(1.0)], inner_radius=0.5,
                          density=UNIT_DENSITY)


@pytest.fixture()
def profile_file(tmp_path):
    def save(prof, name="profile.json"):
        path = tmp_path / name
        prof.save(str(path))
        return str(path)
    return save
