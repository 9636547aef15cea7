"""Background fields of axial loops and cylindrical coils above the soil.

A loop of radius ``a`` at height ``h`` carrying current ``I`` has azimuthal
vector potential

    air:  A = mu0 I a / 2 int J1(k a) J1(k rho) [exp(-k|x3 - h|) + R exp(-k(x3 + h))] dk
    soil: A = mu0 I a / 2 int J1(k a) J1(k rho) T exp(gamma x3 - k h) dk

Continuity of A (tangential E) and of (1/mu) dA/dx3 (tangential H) on x3 = 0
gives ``R = (mu k - gamma)/(mu k + gamma)`` and ``T = 1 + R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .greens import gamma
from .model import MU0, CoilSpec, SoilParams
from .quadrature import QuadratureSettings, SpectralKernel, hankel_transform

FILAMENT_TOL = 1e-9


class FilamentCoincidence(ValueError):
    pass


@dataclass(frozen=True)
class LoopSource:
    radius: float
    height: float
    current: complex = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.radius > 0 and self.height > 0):
            raise ValueError("loop radius and height must be positive")


@dataclass(frozen=True)
class TeCoefficients:
    reflection: np.ndarray
    transmission: np.ndarray


def te_coefficients(soil: SoilParams, omega: float, kappa) -> TeCoefficients:
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise ValueError("kappa must be positive")
    k2 = 1j * omega * MU0 * soil.sigma_s
    mu = soil.mu_rs
    g = gamma(kappa, k2)
    den = mu * kappa + g
    # mu k - gamma written without cancellation for small contrast
    num = ((mu * mu - 1.0) * kappa**2 + k2) / den
    r = num / den
    return TeCoefficients(r, 1.0 + r)


# --- free space -----------------------------------------------------------------

def _loop_fs_arrays(a, h, current, cx, cy, x):
    """Vectorised elliptic-integral loop field; a, h, current broadcast together."""
    dx, dy = x[0] - cx, x[1] - cy
    rho = math.hypot(dx, dy)
    zeta = x[2] - h
    r2 = rho**2 + zeta**2
    alpha2 = a**2 + r2 - 2 * a * rho
    beta2 = a**2 + r2 + 2 * a * rho
    if np.any(alpha2 < FILAMENT_TOL**2):
        raise FilamentCoincidence(f"point {tuple(x)} lies on a loop filament")
    beta = np.sqrt(beta2)
    m = 1.0 - alpha2 / beta2
    ek, ee = special.ellipk(m), special.ellipe(m)
    c = current / (2.0 * math.pi * alpha2 * beta)
    hz = c * ((a**2 - r2) * ee + alpha2 * ek)
    if rho == 0.0:
        hr = np.zeros_like(hz)
        rhat = (0.0, 0.0)
    else:
        hr = c * zeta / rho * ((a**2 + r2) * ee - alpha2 * ek)
        rhat = (dx / rho, dy / rho)
    hr_t, hz_t = np.sum(hr), np.sum(hz)
    return np.array([hr_t * rhat[0], hr_t * rhat[1], hz_t])


def loop_field_freespace(loop: LoopSource, x) -> np.ndarray:
    """Static field (A/m) of a circular filament with axis along e3."""
    x = np.asarray(x, dtype=float)
    out = _loop_fs_arrays(loop.radius, loop.height, loop.current,
                          loop.center[0], loop.center[1], x)
    return out if np.iscomplexobj(loop.current) else out.real


# --- coil discretisation --------------------------------------------------------

def coil_elements(coil: CoilSpec):
    """Loop elements (radius, height, current) of a distributed coil.

    Tensor-product Gauss-Legendre nodes over the rectangular cross-section;
    the element currents sum to ``current_density * area``.
    """
    xr, wr = np.polynomial.legendre.leggauss(coil.n_radial)
    xz, wz = np.polynomial.legendre.leggauss(coil.n_axial)
    half_r = 0.5 * (coil.r_outer - coil.r_inner)
    mid_r = 0.5 * (coil.r_outer + coil.r_inner)
    half_z = 0.5 * coil.height
    radii = mid_r + half_r * xr
    heights = coil.center[2] + half_z * xz
    a, h = np.meshgrid(radii, heights, indexing="ij")
    w = np.outer(wr * half_r, wz * half_z)
    return a.ravel(), h.ravel(), (coil.current_density * w).ravel()


def coil_dipole_moment(coil: CoilSpec) -> np.ndarray:
    m3 = math.pi * coil.current_density * coil.height * (coil.r_outer**3 - coil.r_inner**3) / 3.0
    return np.array([0.0, 0.0, m3])


# --- spectral kernels -----------------------------------------------------------

def source_spectrum(a, h, current):
    """k -> sum_e I_e a_e / 2 J1(k a_e) exp(-k h_e) for a set of loop elements."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    w = np.atleast_1d(np.asarray(current)) * a / 2.0

    def s(k):
        k = np.asarray(k, dtype=float)
        return (special.j1(np.multiply.outer(k, a)) * np.exp(-np.multiply.outer(k, h))) @ w
    return s


def disk_spectrum(a, h, weight):
    """k -> sum_m w_m 2 pi b_m J1(k b_m) / k exp(-k h_m).

    Integrating J0(k |x_t - c|) over a disk of radius b centred on c gives
    ``2 pi b J1(k b) / k``; measurement turns are handled as weighted disks.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    w = np.atleast_1d(np.asarray(weight)) * 2.0 * math.pi * a

    def s(k):
        k = np.asarray(k, dtype=float)
        return ((special.j1(np.multiply.outer(k, a)) * np.exp(-np.multiply.outer(k, h))) @ w) / k
    return s


def _axis_frame(center_xy, x):
    d = np.array([x[0] - center_xy[0], x[1] - center_xy[1]])
    rho = float(np.hypot(d[0], d[1]))
    return rho, (d / rho if rho > 0 else np.zeros(2))


def _halfspace_elements(a, h, current, center_xy, soil, omega, x, settings):
    x = np.asarray(x, dtype=float)
    if x[2] == 0.0:
        raise ValueError("field point on the interface x3 = 0 is ambiguous")
    settings = settings or QuadratureSettings()
    rho, rhat = _axis_frame(center_xy, x)
    spec = source_spectrum(a, h, current)
    k2 = 1j * omega * MU0 * soil.sigma_s
    mu = soil.mu_rs
    h_min = float(np.min(h))
    if x[2] > 0:
        incident = _loop_fs_arrays(np.asarray(a), np.asarray(h), np.asarray(current),
                                   center_xy[0], center_xy[1], x).astype(complex)
        x3 = x[2]

        def kern(k):
            return k * spec(k) * te_coefficients(soil, omega, k).reflection * np.exp(-k * x3)
        sk = SpectralKernel(kern, h_min + x3)
        hz = hankel_transform(sk, 0, rho, settings)
        hr = hankel_transform(sk, 1, rho, settings)
        out = incident
        out[:2] += hr.value * rhat
        out[2] += hz.value
        return out, hz.error + hr.error
    x3 = x[2]

    def kz(k):
        g = gamma(k, k2)
        t = 2.0 * mu * k / (mu * k + g)
        return k * spec(k) * t * np.exp(g * x3) / mu

    def kr(k):
        g = gamma(k, k2)
        t = 2.0 * mu * k / (mu * k + g)
        return -g * spec(k) * t * np.exp(g * x3) / mu
    hz = hankel_transform(SpectralKernel(kz, h_min - x3), 0, rho, settings)
    hr = hankel_transform(SpectralKernel(kr, h_min - x3), 1, rho, settings)
    out = np.zeros(3, dtype=complex)
    out[:2] = hr.value * rhat
    out[2] = hz.value
    return out, hz.error + hr.error


def loop_field_halfspace(loop: LoopSource, soil: SoilParams, omega: float, x,
                         settings: QuadratureSettings | None = None,
                         with_error: bool = False):
    """Loop field with the soil present: incident + reflected in air, transmitted below."""
    out, err = _halfspace_elements([loop.radius], [loop.height], [loop.current],
                                   loop.center, soil, omega, x, settings)
    return (out, err) if with_error else out


def coil_field(coil: CoilSpec, soil: SoilParams, omega: float, x, with_soil: bool = True,
               settings: QuadratureSettings | None = None, with_error: bool = False):
    """Field of the distributed azimuthal current of ``coil`` at ``x``.

    The elements of :func:`coil_elements` are summed inside one spectral kernel,
    so the result equals the sum of :func:`loop_field_halfspace` over elements.
    """
    a, h, cur = coil_elements(coil)
    x = np.asarray(x, dtype=float)
    if with_soil:
        out, err = _halfspace_elements(a, h, cur, coil.center[:2], soil, omega, x, settings)
    else:
        out = _loop_fs_arrays(a, h, cur, coil.center[0], coil.center[1], x).astype(complex)
        err = 0.0
    return (out, err) if with_error else out
