"""
Pytest configuration for custom command line options and shared geometries
"""

import pytest

from aberration_dip.biphoton import CrystalParams
from aberration_dip.optics import SetupGeometry


def pytest_addoption(parser):
    """Add custom command line options"""
    parser.addoption(
        "--scheme",
        action="store",
        default="gauss-legendre",
        help="Quadrature scheme to test (gauss-legendre or trapezoid)",
    )


def pytest_generate_tests(metafunc):
    """Use custom scheme option in tests"""
    if "scheme_name" in metafunc.fixturenames:
        scheme = metafunc.config.getoption("scheme")
        metafunc.parametrize("scheme_name", [scheme])


@pytest.fixture
def crystal():
    """1.5 mm BBO at 405 nm pump"""
    return CrystalParams()


@pytest.fixture
def geometry():
    """Experimental 4-f setup"""
    return SetupGeometry()


@pytest.fixture
def single_mode_geometry():
    """Tiny mirror pupil: ML * Q is about 0.2, so W stays within 1% of 1"""
    return SetupGeometry(mirror_radius=0.05)


@pytest.fixture
def small_pupil_geometry():
    """Collected wavevectors cover only rho <= 0.05 of the mirror"""
    return SetupGeometry(mirror_radius=100.0)


@pytest.fixture
def convergence_geometry():
    """Pupil image radius of about 1 rad/mm with no propagation phase"""
    return SetupGeometry(mirror_radius=0.0258, d1=0.0)
