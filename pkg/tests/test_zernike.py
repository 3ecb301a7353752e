"""
Zernike polynomials, phase maps, parity split and PV calibration
"""

import math

import numpy as np
import pytest
from scipy.special import roots_legendre

from aberration_dip.biphoton import TransverseWavevector
from aberration_dip.errors import ZernikeDomainError
from aberration_dip.zernike import (
    AberrationPhase,
    ZernikeMode,
    mode_peak_to_valley,
    odd_part,
    parse_mode,
    phase_map,
    pv_to_coeff,
    radial_coefficients,
    radial_poly,
    radial_table,
    zernike_eval,
)

K0 = 2 * math.pi / 810e-6


def valid_modes(max_order):
    return [(n, m) for n in range(max_order + 1) for m in range(-n, n + 1, 2)]


def random_disk_points(rng, count, scale=1.0):
    r = scale * np.sqrt(rng.uniform(0, 1, count))
    t = rng.uniform(-np.pi, np.pi, count)
    return TransverseWavevector(r * np.cos(t), r * np.sin(t))


def random_phase(rng, count=6, max_order=6):
    pool = valid_modes(max_order)
    picks = rng.choice(len(pool), size=count, replace=False)
    return AberrationPhase(
        tuple(ZernikeMode(*pool[i], float(rng.uniform(-3, 3))) for i in picks)
    )


def test_radial_poly_examples():
    """Known values of low-order radial polynomials"""
    assert radial_poly(1, 1, 0.5) == pytest.approx(0.5)
    assert radial_poly(2, 0, 1.0) == pytest.approx(1.0)
    assert radial_poly(3, 1, 0.5) == pytest.approx(-0.625)


def test_radial_poly_uses_abs_m():
    """R_n^m depends on |m| only"""
    rho = np.linspace(0, 1, 11)
    np.testing.assert_array_equal(radial_poly(4, -2, rho), radial_poly(4, 2, rho))


def test_radial_coefficients_spherical():
    """R_4^0 = 6 rho^4 - 6 rho^2 + 1"""
    assert radial_coefficients(4, 0) == ((4, 6), (2, -6), (0, 1))


def test_radial_table_rows():
    """Table covers m >= 0 with matching parity"""
    rows = radial_table(3)
    assert (3, 1, 3, 3) in rows
    assert (3, 1, 1, -2) in rows
    assert all((n - m) % 2 == 0 and m >= 0 for n, m, _, _ in rows)


@pytest.mark.parametrize("n,m", [(1, 0), (2, 3), (-1, 1), (3, -5), (4, 1)])
def test_invalid_pairs_rejected(n, m):
    """Invalid (n, m) pairings raise a domain error"""
    with pytest.raises(ZernikeDomainError):
        radial_poly(n, m, 0.5)
    with pytest.raises(ZernikeDomainError):
        ZernikeMode(n, m, 1.0)


def test_boundary_identity():
    """R_n^m(1) = 1 for every valid pair"""
    for n, m in valid_modes(16):
        assert abs(radial_poly(n, m, 1.0) - 1.0) < 1e-12


def test_orthogonality():
    """Radial polynomials of equal m are orthogonal with weight rho"""
    x, w = roots_legendre(64)
    rho, w = 0.5 * (x + 1), 0.5 * w
    for m in range(0, 5):
        orders = list(range(m, 11, 2))
        for n in orders:
            for n2 in orders:
                value = np.sum(w * radial_poly(n, m, rho) * radial_poly(n2, m, rho) * rho)
                if n == n2:
                    assert value == pytest.approx(1.0 / (2 * n + 2), abs=1e-12)
                else:
                    assert abs(value) < 1e-10


def test_zernike_eval_examples():
    """Single-mode values with the cos/sin angular convention"""
    assert zernike_eval(ZernikeMode(2, 2, 1.0), 1.0, 0.0) == pytest.approx(1.0)
    assert abs(zernike_eval(ZernikeMode(3, 1, 1.0), 1.0, math.pi / 2)) < 1e-12
    assert zernike_eval(ZernikeMode(3, -3, 2.0), 1.0, math.pi / 6) == pytest.approx(2.0)


def test_zernike_eval_outside_pupil():
    """rho > 1 is a domain error"""
    with pytest.raises(ZernikeDomainError):
        zernike_eval(ZernikeMode(2, 0, 1.0), 1.01, 0.0)


def test_phase_map_examples():
    """Phase maps add mode contributions"""
    origin = TransverseWavevector(0.0, 0.0)
    coma_astig = AberrationPhase.from_terms([(3, 1, 0.4), (2, 2, 0.7)])
    assert phase_map(coma_astig, origin, 1.0) == pytest.approx(0.0, abs=1e-15)

    defocus = AberrationPhase.from_terms([(2, 0, 1.3)])
    assert phase_map(defocus, TransverseWavevector(2.0, 0.0), 2.0) == pytest.approx(1.3)

    value = phase_map(coma_astig, TransverseWavevector(0.5, 0.0), 1.0)
    assert value == pytest.approx(-0.075, abs=1e-12)


def test_phase_map_flat_is_zero():
    """No modes, no phase"""
    q = TransverseWavevector(np.array([0.1, -0.3]), np.array([0.2, 0.4]))
    np.testing.assert_array_equal(phase_map(AberrationPhase.flat(), q, 1.0), [0.0, 0.0])


def test_phase_map_outside_pupil():
    """Points beyond pupil_scale are rejected"""
    ab = AberrationPhase.from_terms([(2, 0, 1.0)])
    with pytest.raises(ZernikeDomainError):
        phase_map(ab, TransverseWavevector(1.5, 0.0), 1.0)


def test_odd_part_examples():
    """Only odd-m modes survive"""
    ab = AberrationPhase.from_terms([(2, 0, 1.0), (3, 1, 1.0)])
    assert [(m.n, m.m) for m in odd_part(ab)] == [(3, 1)]

    even = AberrationPhase.from_terms([(2, 2, 1.0), (4, 4, 1.0), (2, 0, 1.0)])
    assert len(odd_part(even)) == 0
    assert even.is_even()

    odd = AberrationPhase.from_terms([(3, 1, 1.0), (3, -3, 1.0)])
    assert odd_part(odd) == odd
    assert odd.is_odd()


def test_parity_identity():
    """phi(q) - phi(-q) equals twice the odd part"""
    rng = np.random.default_rng(7)
    for _ in range(20):
        ab = random_phase(rng)
        q = random_disk_points(rng, 1000)
        diff = phase_map(ab, q, 1.0) - phase_map(ab, -q, 1.0)
        np.testing.assert_allclose(diff, 2 * phase_map(ab.odd_part(), q, 1.0), rtol=0, atol=1e-12)


def test_even_modes_mirror_symmetric():
    """All-even phase maps are unchanged by q -> -q"""
    rng = np.random.default_rng(11)
    for _ in range(20):
        ab = random_phase(rng).even_part()
        q = random_disk_points(rng, 1000, scale=3.0)
        np.testing.assert_allclose(phase_map(ab, q, 3.0), phase_map(ab, -q, 3.0), rtol=0, atol=1e-12)


def test_duplicate_modes_rejected():
    """Two modes may not share (n, m)"""
    with pytest.raises(ZernikeDomainError):
        AberrationPhase.from_terms([(2, 0, 1.0), (2, 0, 2.0)])


def test_with_tilt():
    """Tilt terms are replaced, not duplicated"""
    ab = AberrationPhase.from_terms([(3, 1, 1.0), (1, 1, 0.2)]).with_tilt(tilt_x=0.5, tilt_y=-0.1)
    coeffs = {(m.n, m.m): m.coeff for m in ab}
    assert coeffs == {(3, 1): 1.0, (1, 1): 0.5, (1, -1): -0.1}


def test_mode_names():
    """Names resolve both ways"""
    assert ZernikeMode(3, 1).name == "coma-x"
    assert ZernikeMode(7, 1).name == "Z(7,1)"
    assert parse_mode("coma-x") == (3, 1)
    assert parse_mode("astigmatism-45") == (2, -2)
    assert parse_mode(" 3, -1 ") == (3, -1)
    with pytest.raises(ZernikeDomainError):
        parse_mode("wobble")
    with pytest.raises(ZernikeDomainError):
        parse_mode("3,2")


def test_pv_to_coeff_zero():
    """No deformation, no phase"""
    assert pv_to_coeff(0.0, (3, 1), K0) == 0.0


def test_pv_to_coeff_half_wave_defocus():
    """lambda0/2 of defocus is a phase PV of 2 pi, so the coefficient is pi"""
    assert pv_to_coeff(405e-6, (2, 0), K0) == pytest.approx(math.pi, rel=1e-12)


def test_pv_to_coeff_coma_endpoint():
    """0.75 um of coma gives a phase PV of about 11.64 rad"""
    coeff = pv_to_coeff(0.75e-3, ZernikeMode(3, 1), K0)
    assert 2 * coeff == pytest.approx(2 * K0 * 0.75e-3, rel=1e-12)
    assert 2 * coeff == pytest.approx(11.64, abs=0.01)


@pytest.mark.parametrize("n,m", [(2, 0), (2, 2), (3, 1), (3, -3), (4, 0), (4, 4), (5, 1), (6, 0)])
def test_pv_to_coeff_matches_scanned_pv(n, m):
    """Single-mode phase PV over the disk equals 2 k0 pv"""
    pv = 0.5e-3
    ab = AberrationPhase((ZernikeMode(n, m, pv_to_coeff(pv, (n, m), K0)),))
    rho = np.linspace(0, 1, 801)
    theta = np.linspace(-np.pi, np.pi, 721)
    rr, tt = np.meshgrid(rho, theta)
    values = phase_map(ab, TransverseWavevector(rr * np.cos(tt), rr * np.sin(tt)), 1.0)
    assert np.ptp(values) == pytest.approx(2 * K0 * pv, rel=1e-4)


def test_mode_peak_to_valley_spherical():
    """R_4^0 spans [-0.5, 1]"""
    assert mode_peak_to_valley(4, 0) == pytest.approx(1.5, abs=1e-9)
    assert mode_peak_to_valley(3, 1) == pytest.approx(2.0, abs=1e-12)


def test_pv_to_coeff_rejects_negative():
    """Peak-to-valley is a magnitude"""
    with pytest.raises(ValueError):
        pv_to_coeff(-1e-4, (2, 0), K0)


def test_from_pv():
    """from_pv calibrates every mode"""
    ab = AberrationPhase.from_pv([(2, 0, 405e-6), (3, 1, 0.0)], K0)
    assert ab.modes[0].coeff == pytest.approx(math.pi)
    assert ab.modes[1].coeff == 0.0
