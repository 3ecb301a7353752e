"""
Phase mismatch, two-photon amplitude and the triangular dip envelope
"""

import math

import numpy as np
import pytest

from aberration_dip.biphoton import (
    CrystalParams,
    TransverseWavevector,
    biphoton_amplitude,
    dip_width,
    phase_mismatch,
    triangular,
    walkoff_length,
)


def test_crystal_defaults(crystal):
    """Derived wavenumbers of the 405 nm pumped crystal"""
    assert crystal.k_p == pytest.approx(2 * math.pi / 405e-6)
    assert crystal.k_p == pytest.approx(1.5514e4, rel=1e-4)
    assert crystal.k0 == pytest.approx(crystal.k_p / 2)
    assert crystal.Omega0 == pytest.approx(2 * math.pi * 0.299792458 / 810e-6)
    assert dip_width(crystal) == pytest.approx(0.273)
    assert walkoff_length(crystal) == pytest.approx(0.10845)


def test_crystal_from_wavelengths():
    """Degenerate wavelength follows the pump"""
    c = CrystalParams.from_wavelengths(400.0)
    assert c.lambda_0 == 800.0
    assert c.k_p == pytest.approx(2 * math.pi / 400e-6)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"L": 0.0},
        {"D": -0.1},
        {"lambda_p": 405.0, "lambda_0": 800.0},
        {"M": float("nan")},
    ],
)
def test_crystal_rejects_invalid(kwargs):
    """Constructor enforces the crystal invariants"""
    with pytest.raises(ValueError):
        CrystalParams(**kwargs)


def test_phase_mismatch_examples(crystal):
    """Direct evaluation of the paraxial mismatch"""
    origin = TransverseWavevector(0.0, 0.0)
    assert phase_mismatch(origin, 0.0, crystal) == 0.0
    assert phase_mismatch(origin, 1.0, crystal) == pytest.approx(-0.182)
    value = phase_mismatch(TransverseWavevector(0.0, 1.0), 0.0, crystal)
    assert value == pytest.approx(0.072429, abs=1e-6)


def test_phase_mismatch_frequency_odd_part(crystal):
    """Only -omega D is odd in omega"""
    rng = np.random.default_rng(3)
    q = TransverseWavevector(rng.normal(0, 50, 1000), rng.normal(0, 50, 1000))
    omega = rng.normal(0, 20, 1000)
    total = phase_mismatch(q, omega, crystal) + phase_mismatch(q, -omega, crystal)
    expected = 2 * (crystal.M * q.qy + 2 * (q.qx**2 + q.qy**2) / crystal.k_p)
    np.testing.assert_allclose(total, expected, rtol=1e-12, atol=1e-12)


def test_biphoton_amplitude_examples(crystal):
    """sinc envelope and half-mismatch phase"""
    origin = TransverseWavevector(0.0, 0.0)
    assert biphoton_amplitude(origin, 0.0, crystal) == 1 + 0j

    # L * delta / 2 = pi
    omega = -2 * math.pi / (crystal.D * crystal.L)
    assert abs(biphoton_amplitude(origin, omega, crystal)) < 1e-15

    # L * delta / 2 = pi / 2
    xi = biphoton_amplitude(origin, omega / 2, crystal)
    assert xi.real == pytest.approx(0.0, abs=1e-15)
    assert xi.imag == pytest.approx(2 / math.pi, abs=1e-12)


def test_biphoton_amplitude_bounded(crystal):
    """|xi| <= 1 everywhere"""
    rng = np.random.default_rng(5)
    q = TransverseWavevector(rng.normal(0, 200, 5000), rng.normal(0, 200, 5000))
    omega = rng.normal(0, 100, 5000)
    assert np.all(np.abs(biphoton_amplitude(q, omega, crystal)) <= 1.0 + 1e-15)


def test_triangular_examples():
    """Unit triangle on [-1, 1]"""
    assert triangular(0.0) == 1.0
    assert triangular(1.0) == 0.0
    assert triangular(-0.5) == 0.5
    assert triangular(3.0) == 0.0


def test_triangular_even():
    """Lambda(alpha) = Lambda(-alpha)"""
    alpha = np.linspace(-2, 2, 401)
    np.testing.assert_array_equal(triangular(alpha), triangular(-alpha))


def test_wavevector_rejects_non_finite():
    """Components must be finite"""
    with pytest.raises(ValueError):
        TransverseWavevector(float("inf"), 0.0)
