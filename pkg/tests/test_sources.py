import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from soilmpt import sources as S
from soilmpt.model import CoilSpec, SoilParams, reference_coil

from oracles import biot_savart_coil, biot_savart_loop

SOIL = SoilParams(1.6, 1.0006)
LOOP = S.LoopSource(radius=0.135, height=0.2, current=10.0)


def test_on_axis_closed_form():
    # I a^2 / (2 (a^2 + d^2)^{3/2}) with a=0.135, I=10, d=0.6
    exact = 10 * 0.135**2 / (2 * (0.135**2 + 0.36) ** 1.5)
    assert exact == pytest.approx(0.3917529, abs=1e-7)
    h = S.loop_field_freespace(S.LoopSource(0.135, 0.6, 10.0), [0, 0, 0])
    assert h[2] == pytest.approx(exact, rel=1e-13)
    assert h[0] == 0 and h[1] == 0


def test_center_field():
    h = S.loop_field_freespace(S.LoopSource(0.135, 0.2, 10.0), [0, 0, 0.2])
    assert h[2] == pytest.approx(10 / (2 * 0.135), rel=1e-13)


@pytest.mark.parametrize("x", [(0.3, 0.1, -0.2), (0.05, 0.0, 0.25), (0.14, -0.02, 0.21)])
def test_biot_savart_oracle(x):
    h = S.loop_field_freespace(LOOP, x)
    ref = biot_savart_loop(0.135, 0.2, 10.0, x, n=10_000)
    assert np.linalg.norm(h - ref) <= 1e-6 * np.linalg.norm(ref)


def test_filament_rejected():
    with pytest.raises(S.FilamentCoincidence):
        S.loop_field_freespace(LOOP, [0.135, 0, 0.2])


def test_te_no_contrast():
    c = S.te_coefficients(SoilParams(0.0, 1.0), 1e5, np.array([0.1, 1.0, 10.0]))
    assert np.all(c.reflection == 0) and np.all(c.transmission == 1)


def test_te_pec_limit():
    c = S.te_coefficients(SoilParams(1e12, 1.0), 1e5, np.array([0.1, 1.0, 10.0]))
    assert np.allclose(c.reflection, -1.0, atol=1e-3)


def test_te_permeable_image():
    c = S.te_coefficients(SoilParams(0.0, 2.0), 1e5, np.array([0.1, 1.0, 10.0]))
    assert np.allclose(c.reflection, 1 / 3, rtol=1e-14)


def test_te_interface_conditions():
    # potential continuity (1 + R = T) and (1/mu) d/dx3 continuity
    k = np.array([0.3, 3.0, 30.0])
    c = S.te_coefficients(SOIL, 1e5, k)
    g = np.sqrt(k**2 - 1j * 1e5 * 4e-7 * math.pi * SOIL.sigma_s)
    assert np.allclose(1 + c.reflection, c.transmission, rtol=1e-14)
    assert np.allclose(k * (1 - c.reflection), g * c.transmission / SOIL.mu_rs, rtol=1e-13)


def test_te_rejects_nonpositive_kappa():
    with pytest.raises(ValueError):
        S.te_coefficients(SOIL, 1e5, 0.0)


@pytest.mark.parametrize("x", [(0.1, 0.05, 0.3), (0.0, 0.0, -0.4), (0.25, 0.0, -0.1)])
def test_no_contrast_halfspace_equals_freespace(x):
    h = S.loop_field_halfspace(LOOP, SoilParams(0.0, 1.0), 1e5, x)
    ref = S.loop_field_freespace(LOOP, x)
    assert np.linalg.norm(h - ref) <= 1e-8 * np.linalg.norm(ref)


def _interface_limit(f, side, h=1e-4):
    # one-sided linear extrapolation to x3 = 0 from x3 = side*h and side*2h
    return 2 * f(side * h) - f(side * 2 * h)


@pytest.mark.parametrize("rho", [0.05, 0.135, 0.3])
def test_interface_continuity(rho):
    def field(x3):
        return S.loop_field_halfspace(LOOP, SOIL, 1e5, [rho, 0.0, x3])
    up, dn = _interface_limit(field, +1), _interface_limit(field, -1)
    assert abs(up[0] - dn[0]) <= 1e-4 * abs(up[0])
    assert abs(up[2] - SOIL.mu_rs * dn[2]) <= 1e-4 * abs(up[2])


def test_interface_point_rejected():
    with pytest.raises(ValueError):
        S.loop_field_halfspace(LOOP, SOIL, 1e5, [0.1, 0, 0.0])


def test_transmitted_field_screened_by_soil():
    z = [0.0, 0.0, -0.4]
    vals = [np.linalg.norm(S.loop_field_halfspace(LOOP, SoilParams(s, 1.0006), 1e6, z))
            for s in (0.01, 0.1, 1.0)]
    assert vals[0] > vals[1] > vals[2]


@given(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_linear_in_current(i):
    x = [0.1, 0.05, -0.3]
    base = S.loop_field_halfspace(LOOP, SOIL, 1e5, x)
    scaled = S.loop_field_halfspace(replace(LOOP, current=10.0 * i), SOIL, 1e5, x)
    assert np.allclose(scaled, i * base, rtol=1e-12, atol=1e-300)


def test_tangential_zero_on_axis():
    h = S.loop_field_halfspace(LOOP, SOIL, 1e5, [0, 0, -0.4])
    assert h[0] == 0 and h[1] == 0


def test_reflected_field_vanishes_at_low_frequency():
    x = [0.1, 0.0, 0.3]
    ref = S.loop_field_freespace(LOOP, x)
    diffs = [np.linalg.norm(S.loop_field_halfspace(LOOP, SoilParams(1.6, 1.0), w, x) - ref)
             for w in (1e5, 1e3, 1e1, 1.0)]
    assert diffs[0] > diffs[1] > diffs[2] > diffs[3]
    # leading soil term is proportional to k0^2, i.e. to omega
    assert diffs[2] / diffs[3] == pytest.approx(10.0, rel=2e-2)


def test_coil_element_weights():
    coil = reference_coil()
    _, _, cur = S.coil_elements(coil)
    assert cur.sum() == pytest.approx(10.0, rel=1e-14)
    assert coil.total_current == pytest.approx(10.0, rel=1e-14)


def test_coil_self_convergence():
    coil = reference_coil()
    z = [0.0, 0.0, -0.4]
    a = S.coil_field(replace(coil, n_radial=4, n_axial=4), SOIL, 1e5, z)
    b = S.coil_field(replace(coil, n_radial=8, n_axial=8), SOIL, 1e5, z)
    assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(b)


def test_coil_equals_sum_of_loops():
    coil = replace(reference_coil(), n_radial=2, n_axial=2)
    x = [0.07, -0.02, -0.3]
    total = sum(S.loop_field_halfspace(S.LoopSource(a, h, i), SOIL, 1e5, x)
                for a, h, i in zip(*S.coil_elements(coil)))
    assert np.allclose(S.coil_field(coil, SOIL, 1e5, x), total, rtol=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("x", [(0.0, 0.0, -0.4), (0.05, 0.02, -0.4)])
def test_coil_biot_savart_volumetric(x):
    coil = reference_coil()
    h = S.coil_field(coil, SOIL, 1e5, x, with_soil=False)
    ref = biot_savart_coil(0.12, 0.15, 0.1, 0.2, coil.current_density, x)
    assert np.linalg.norm(h - ref) <= 1e-5 * np.linalg.norm(ref)


def test_dipole_moment_reference():
    m = S.coil_dipole_moment(reference_coil())
    expected = math.pi * (10 / 3e-3) * 0.1 * (0.15**3 - 0.12**3) / 3
    assert m[2] == pytest.approx(expected, rel=1e-14)
    # pi * (10/3e-3) * 0.1 * (0.15^3 - 0.12^3) / 3
    assert m[2] == pytest.approx(0.574911, abs=1e-6)


def test_dipole_moment_thin_shell():
    r, t = 0.1, 1e-6
    coil = CoilSpec(r, r + t, 0.05, (0, 0, 0.2), current_density=3.0)
    assert S.coil_dipole_moment(coil)[2] == pytest.approx(3.0 * 0.05 * t * math.pi * r**2, rel=1e-5)


def test_dipole_moment_zero_current():
    coil = replace(reference_coil(), current_density=0.0)
    assert np.all(S.coil_dipole_moment(coil) == 0)


def _far_field_error(d):
    coil = reference_coil()
    x = np.array([0, 0, coil.center[2] + d])
    exact = S.coil_field(coil, SOIL, 1e5, x, with_soil=False).real[2]
    dipole = S.coil_dipole_moment(coil)[2] / (2 * math.pi * d**3)
    return abs(exact - dipole) / abs(exact)


def test_far_field_dipole_error_decays_as_inverse_square():
    errors = [_far_field_error(k * 0.15) for k in (8, 16, 32)]
    for a, b in zip(errors, errors[1:]):
        assert a / b == pytest.approx(4.0, rel=0.02)
    assert errors[-1] < 1e-3


@pytest.mark.xfail(strict=True, reason="finite coil size gives 6.5% and 1.6% error at 4 and 8 "
                                       "outer radii; the error follows 1.5 (a/d)^2, see ledger")
def test_far_field_dipole_stated_bounds():
    assert _far_field_error(4 * 0.15) <= 0.02
    assert _far_field_error(8 * 0.15) <= 0.005
