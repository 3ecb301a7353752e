"""
Tensor-grid quadrature over disks and squares
"""

import math

import numpy as np
import pytest

from aberration_dip.biphoton import CrystalParams, dip_width
from aberration_dip.errors import IntegrationError
from aberration_dip.interference import kernel_grid, w_m_infinite
from aberration_dip.optics import Model, SetupGeometry, domain_radius, jinc
from aberration_dip.quadrature import (
    Domain,
    GridSpec,
    Scheme,
    get_rule,
    grid_points,
    integrate_2d,
    integrate_4d,
    min_order_for,
)
from aberration_dip.zernike import AberrationPhase

# Trapezoid needs about twice the Gauss-Legendre points for the same accuracy
MATCHED_ORDER = {Scheme.GAUSS_LEGENDRE: 64, Scheme.TRAPEZOID: 128}


def disk_indicator(radius):
    def f(q):
        return (q.norm() <= radius).astype(float)

    return f


@pytest.mark.parametrize("kwargs", [{"radius": 1.0, "order": 4}, {"radius": 0.0, "order": 16}])
def test_gridspec_rejects_invalid(kwargs):
    """order >= 8 and radius > 0"""
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_rule_nodes_symmetric(scheme_name):
    """Nodes mirror exactly about zero and weights sum to the interval length"""
    nodes, weights = get_rule(Scheme(scheme_name)).nodes_weights(33)
    np.testing.assert_array_equal(nodes, -nodes[::-1])
    np.testing.assert_array_equal(weights, weights[::-1])
    assert weights.sum() == pytest.approx(2.0, rel=1e-12)


def test_disk_area_on_square_grid():
    """Hard-edged disk inside the square converges to pi R^2"""
    R = 2.0
    value = integrate_2d(disk_indicator(R), GridSpec(R, 256))
    assert value.real == pytest.approx(math.pi * R**2, rel=5e-3)
    assert value.imag == 0.0


def test_disk_area_on_disk_grid(scheme_name):
    """The disk grid integrates constants exactly"""
    R = 3.0
    grid = GridSpec(R, MATCHED_ORDER[Scheme(scheme_name)], scheme_name, Domain.DISK)
    value = integrate_2d(lambda q: np.ones_like(q.qx), grid)
    assert value.real == pytest.approx(math.pi * R**2, rel=1e-10)


@pytest.mark.parametrize("domain", [Domain.SQUARE, Domain.DISK])
def test_odd_integrand_vanishes(scheme_name, domain):
    """qx integrates to zero on the symmetric grid"""
    grid = GridSpec(1.0, 48, scheme_name, domain)
    assert abs(integrate_2d(lambda q: q.qx, grid)) < 1e-12
    assert abs(integrate_2d(lambda q: q.qy**3 + q.qx * q.qy, grid)) < 1e-12


def test_disk_fourier_transform(scheme_name):
    """Integral of exp(i a qy) over the disk is pi R^2 jinc(a R)"""
    R, a = 1.5, 4.0
    grid = GridSpec(R, MATCHED_ORDER[Scheme(scheme_name)], scheme_name, Domain.DISK)
    value = integrate_2d(lambda q: np.exp(1j * a * q.qy), grid)
    expected = math.pi * R**2 * jinc(a * R)
    assert value.real == pytest.approx(expected, abs=1e-9)
    assert abs(value.imag) < 1e-10


def test_integrate_2d_reports_non_finite_point():
    """NaN integrand values raise with the offending point"""
    grid = GridSpec(1.0, 16, domain=Domain.DISK)

    def f(q):
        values = np.ones_like(q.qx)
        values[5] = np.nan
        return values

    with pytest.raises(IntegrationError) as excinfo:
        integrate_2d(f, grid)
    qx, qy, _ = grid_points(grid)
    assert excinfo.value.point == (qx[5], qy[5])


def test_integrate_4d_separable():
    """Product integrands factorize"""
    grid = GridSpec(1.0, 16, domain=Domain.DISK)

    def g(q):
        return np.exp(2j * q.qx) * (1 + q.qy**2)

    def h(q):
        return np.cos(q.qx * q.qy) + 0.5j * q.qy

    value = integrate_4d(lambda q, qp: g(q) * h(qp), grid)
    expected = integrate_2d(g, grid) * integrate_2d(h, grid)
    assert value == pytest.approx(expected, rel=1e-10)


def test_integrate_4d_constant():
    """Unit integrand gives the squared disk area"""
    R = 1.2
    grid = GridSpec(R, 16, domain=Domain.DISK)
    value = integrate_4d(lambda q, qp: np.ones(np.broadcast(q.qx, qp.qx).shape), grid)
    assert value.real == pytest.approx((math.pi * R**2) ** 2, rel=1e-12)


def test_integrate_4d_opposite_phases():
    """exp(i a (qy - q'y)) gives the squared disk transform"""
    R, a = 1.0, 3.0
    grid = GridSpec(R, 32, domain=Domain.DISK)
    value = integrate_4d(lambda q, qp: np.exp(1j * a * (q.qy - qp.qy)), grid)
    expected = (math.pi * R**2 * jinc(a * R)) ** 2
    assert value.real == pytest.approx(expected, rel=1e-10)
    assert abs(value.imag) < 1e-10


def test_integrate_4d_non_finite():
    """4D integration reports the offending (q, q') pair"""
    grid = GridSpec(1.0, 8, domain=Domain.DISK)
    with pytest.raises(IntegrationError) as excinfo:
        integrate_4d(lambda q, qp: 1.0 / (q.qx - qp.qx), grid)
    assert len(excinfo.value.point) == 4


def test_min_order_floor(crystal, geometry):
    """Vanishing delay falls back to the floor order"""
    assert min_order_for(1e-9, geometry, crystal, domain_radius(geometry)) == 64


def test_min_order_default_geometry(crystal, geometry):
    """Default setup at tau = DL: 8 points per period of the 2ML Q phase"""
    order = min_order_for(dip_width(crystal), geometry, crystal, domain_radius(geometry))
    assert order == 108
    assert order % 2 == 0


def test_min_order_monotone_in_tau(crystal, geometry):
    """Doubling tau never lowers the order"""
    radius = domain_radius(geometry)
    tau = 0.01
    previous = min_order_for(tau, geometry, crystal, radius)
    for _ in range(8):
        tau *= 2
        current = min_order_for(tau, geometry, crystal, radius)
        assert current >= previous
        previous = current


def test_min_order_model_and_aberration(crystal, geometry):
    """Finite model and odd aberrations ask for more points; even ones do not"""
    radius = domain_radius(geometry)
    tau = dip_width(crystal)
    base = min_order_for(tau, geometry, crystal, radius)
    assert min_order_for(tau, geometry, crystal, radius, model=Model.FINITE) > base
    coma = AberrationPhase.from_terms([(3, 1, 5.8)])
    assert min_order_for(tau, geometry, crystal, radius, ab=coma) > base
    defocus = AberrationPhase.from_terms([(2, 0, 5.8)])
    assert min_order_for(tau, geometry, crystal, radius, ab=defocus) == base


def test_min_order_rejects_negative_tau(crystal, geometry):
    """tau_max must not be negative"""
    with pytest.raises(ValueError):
        min_order_for(-0.1, geometry, crystal, 10.0)


@pytest.mark.parametrize("fraction", [0.5, 1.0])
def test_refinement_at_min_order(crystal, geometry, fraction):
    """Doubling the order changes the flat kernel by less than 1e-6"""
    tau = fraction * dip_width(crystal)
    flat = AberrationPhase.flat()
    order = min_order_for(tau, geometry, crystal, domain_radius(geometry))
    grid = kernel_grid(geometry, order)
    coarse = w_m_infinite(tau, flat, geometry, crystal, grid)
    fine = w_m_infinite(tau, flat, geometry, crystal, grid.with_order(2 * order))
    assert abs(coarse - fine) / abs(fine) < 1e-6


@pytest.mark.parametrize("fraction", [0.25, 0.5, 1.0])
def test_schemes_agree_on_default_geometry(crystal, geometry, fraction):
    """Gauss-Legendre and trapezoid agree at matched resolution"""
    tau = fraction * dip_width(crystal)
    ab = AberrationPhase.from_terms([(2, 2, 4.0)])
    order = min_order_for(tau, geometry, crystal, domain_radius(geometry))
    gl = w_m_infinite(tau, ab, geometry, crystal, kernel_grid(geometry, order))
    tr = w_m_infinite(
        tau, ab, geometry, crystal, kernel_grid(geometry, 2 * order, Scheme.TRAPEZOID)
    )
    assert abs(gl - tr) / abs(gl) < 1e-6


def test_order_32_oracle():
    """Order-32 Gauss-Legendre matches the trapezoid brute force"""
    crystal = CrystalParams()
    geometry = SetupGeometry(mirror_radius=1.0)
    ab = AberrationPhase.from_terms([(3, 1, 0.6), (2, 0, 1.0)])
    for fraction in (0.3, 0.7, 1.0):
        tau = fraction * dip_width(crystal)
        gl = w_m_infinite(tau, ab, geometry, crystal, kernel_grid(geometry, 32))
        tr = w_m_infinite(tau, ab, geometry, crystal, kernel_grid(geometry, 256, Scheme.TRAPEZOID))
        assert abs(gl - tr) < 1e-8


def test_grid_is_deterministic():
    """Identical grids give bit-identical integrals"""
    grid = GridSpec(2.0, 40, domain=Domain.DISK)
    f = lambda q: np.exp(1j * (q.qx + 0.3 * q.qy**2))  # noqa: E731
    assert integrate_2d(f, grid) == integrate_2d(f, GridSpec(2.0, 40, domain=Domain.DISK))


def test_rule_integrates_polynomial(scheme_name):
    """One-dimensional rule applied to sampled values"""
    rule = get_rule(Scheme(scheme_name))
    nodes, _ = rule.nodes_weights(64)
    assert rule.integrate(nodes**2, 64).real == pytest.approx(2.0 / 3.0, rel=1e-9)
    assert repr(rule).endswith("Rule()")
