"""Induced-voltage predictions in the measurement coil.

    dV = H0ms(z) . M(omega) . H0(z)
    H0ms(z)_i = i omega mu0 int_S (D_x^2 G(x, z))_ij n_j dx

``S`` is the union of the disks spanned by the measurement coil's loop
elements, each weighted by the element current. H0ms therefore carries the
units of the equation as written (it is i omega mu0 times a field per unit
current, multiplied by the coil current).
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import sources
from .greens import GreensChoice, HalfSpaceContext, gamma, hessian
from .model import MU0, RegimeReport, Scenario, regime_diagnostics
from .mpt import Mpt, interpolate, load_signature, sphere_mpt
from .quadrature import NonConvergence, QuadratureSettings, SpectralKernel, hankel_transform

FLUX_RADIAL_NODES = 8


class Variant(str, enum.Enum):
    VS = "Vs"
    VS0 = "Vs0"
    VFS = "Vfs"
    V0 = "V0_soil_only"


class Mode(str, enum.Enum):
    INTEGRATED = "integrated"
    DIPOLE = "dipole"


@dataclass(frozen=True)
class VoltageRecord:
    omega: float
    variant: Variant
    value: complex
    diagnostics: RegimeReport | None = None
    status: str = "ok"
    error: float = 0.0

    @property
    def value_over_omega(self) -> complex:
        return self.value / self.omega


class InsufficientSizes(ValueError):
    pass


@functools.lru_cache(maxsize=16)
def _cached_signature(path: str):
    return load_signature(path)


def object_mpt(s: Scenario, omega: float) -> Mpt:
    obj = s.object
    if obj.is_sphere:
        return sphere_mpt(obj.alpha, obj.sigma_star, obj.mu_rstar, omega)
    return interpolate(_cached_signature(obj.signature), omega)


def _green_kernel(choice: GreensChoice, ctx: HalfSpaceContext, z3: float):
    """k -> K(k) with G(x, z) = 1/(2 pi) int K(k) exp(-k x3) J0(k rho) dk."""
    if choice is GreensChoice.FREE_SPACE:
        return lambda k: 0.5 * np.exp(k * z3)
    mu, k2 = ctx.soil.mu_rs, ctx.k_squared

    def f(k):
        g = gamma(k, k2)
        return k / (g + mu * k) * np.exp(g * z3)
    return f


def _offset(center, z):
    e = np.array([center[0] - z[0], center[1] - z[1]])
    d = float(np.hypot(e[0], e[1]))
    return d, (e / d if d > 0 else np.zeros(2))


def _h0ms_spectral(measure, z, choice, ctx, settings):
    a, h, cur = sources.coil_elements(measure)
    disk = sources.disk_spectrum(a, h, cur)
    kg = _green_kernel(choice, ctx, z[2])
    d, ehat = _offset(measure.center, z)

    def kern(k):
        return kg(k) * k**2 * disk(k) / (2.0 * math.pi)
    sk = SpectralKernel(kern, float(np.min(h)) - z[2])
    r0 = hankel_transform(sk, 0, d, settings)
    r1 = hankel_transform(sk, 1, d, settings)
    out = np.zeros(3, dtype=complex)
    out[:2] = r1.value * ehat
    out[2] = r0.value
    return out, r0.error + r1.error


def _disk_nodes(radius, n_radial, n_azimuthal):
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * radius * (xr + 1.0)
    wr = 0.5 * radius * wr * r
    phi = 2.0 * math.pi * np.arange(n_azimuthal) / n_azimuthal
    wphi = 2.0 * math.pi / n_azimuthal
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    w = np.outer(wr, np.full(n_azimuthal, wphi))
    return rr.ravel() * np.cos(pp.ravel()), rr.ravel() * np.sin(pp.ravel()), w.ravel()


def disk_flux(measure, func, n_radial: int = FLUX_RADIAL_NODES, n_azimuthal: int | None = None):
    """Current-weighted sum over measurement turns of ``int_disk func(x) dA``.

    Gauss-Legendre in radius, trapezoid in azimuth.
    """
    n_azimuthal = n_azimuthal or measure.n_azimuthal
    a, h, cur = sources.coil_elements(measure)
    total = 0
    for b, hm, c in zip(a, h, cur):
        xs, ys, w = _disk_nodes(b, n_radial, n_azimuthal)
        for xi, yi, wi in zip(xs, ys, w):
            total = total + c * wi * func(np.array([measure.center[0] + xi,
                                                    measure.center[1] + yi, hm]))
    return total


def h0ms(measure, z, soil, omega: float, choice: GreensChoice = GreensChoice.HALF_SPACE,
         mode: Mode = Mode.INTEGRATED, settings: QuadratureSettings | None = None,
         flux: str = "spectral") -> np.ndarray:
    """Measurement-coil sensitivity field at the object position ``z``.

    ``flux='spectral'`` integrates each turn's disk inside the Hankel transform
    (Graf's addition theorem); ``flux='nodal'`` samples the Hessian at disk
    quadrature nodes and is much slower.
    """
    z = np.asarray(z, dtype=float)
    if not z[2] < 0:
        raise ValueError("object position must be below the ground (z3 < 0)")
    settings = settings or QuadratureSettings()
    mode = Mode(mode)
    ctx = HalfSpaceContext(soil, omega)
    pref = 1j * omega * MU0
    if mode is Mode.DIPOLE:
        m = sources.coil_dipole_moment(measure)
        return pref * (hessian(choice, np.asarray(measure.center, float), z, ctx, settings) @ m)
    if flux == "nodal":
        col = disk_flux(measure, lambda x: hessian(choice, x, z, ctx, settings)[:, 2])
        return pref * col
    if flux != "spectral":
        raise ValueError(f"unknown flux method {flux!r}")
    out, _ = _h0ms_spectral(measure, z, choice, ctx, settings)
    return pref * out


def background_field(s: Scenario, omega: float, with_soil: bool, mode: Mode,
                     settings: QuadratureSettings | None = None) -> np.ndarray:
    """Excitation-coil field H0 at the object centre."""
    z = np.asarray(s.object.z, dtype=float)
    if Mode(mode) is Mode.DIPOLE:
        choice = GreensChoice.HALF_SPACE if with_soil else GreensChoice.FREE_SPACE
        ctx = HalfSpaceContext(s.soil, omega)
        m = sources.coil_dipole_moment(s.excite)
        return hessian(choice, np.asarray(s.excite.center, float), z, ctx, settings) @ m
    return sources.coil_field(s.excite, s.soil, omega, z, with_soil=with_soil, settings=settings)


def _voltage(s, omega, variant, mode, settings, tensor):
    z = np.asarray(s.object.z, dtype=float)
    if tensor is None:
        tensor = object_mpt(s, omega).tensor
    if variant is Variant.VS:
        ms_choice, h0_soil = GreensChoice.HALF_SPACE, True
    elif variant is Variant.VS0:
        ms_choice, h0_soil = GreensChoice.FREE_SPACE, True
    elif variant is Variant.VFS:
        ms_choice, h0_soil = GreensChoice.FREE_SPACE, False
    else:
        raise ValueError(f"variant {variant} is not an object response")
    hms = h0ms(s.measure, z, s.soil, omega, ms_choice, mode, settings)
    h0 = background_field(s, omega, h0_soil, mode, settings)
    return complex(hms @ np.asarray(tensor) @ h0)


def delta_v(s: Scenario, omega: float, variant=Variant.VS, mode=Mode.INTEGRATED,
            settings: QuadratureSettings | None = None, tensor=None) -> VoltageRecord:
    """Object response for one variant. ``tensor`` overrides the object's MPT."""
    variant = Variant(variant)
    mode = Mode(mode)
    if variant is Variant.V0:
        return delta_v0_soil_only(s, omega, settings)
    value = _voltage(s, omega, variant, mode, settings, tensor)
    return VoltageRecord(float(omega), variant, value, regime_diagnostics(s, omega))


def delta_v0_soil_only(s: Scenario, omega: float,
                       settings: QuadratureSettings | None = None) -> VoltageRecord:
    """Soil-only response: i omega mu0 times the reflected-field flux through S."""
    settings = settings or QuadratureSettings()
    ae, he, ie = sources.coil_elements(s.excite)
    am, hm, cm = sources.coil_elements(s.measure)
    src = sources.source_spectrum(ae, he, ie)
    disk = sources.disk_spectrum(am, hm, cm)
    soil = s.soil

    def kern(k):
        r = sources.te_coefficients(soil, omega, k).reflection
        return k * src(k) * disk(k) * r
    d, _ = _offset(s.measure.center, s.excite.center)
    sk = SpectralKernel(kern, float(np.min(he) + np.min(hm)))
    res = hankel_transform(sk, 0, d, settings)
    value = 1j * omega * MU0 * res.value
    return VoltageRecord(float(omega), Variant.V0, complex(value), regime_diagnostics(s, omega),
                         error=abs(omega * MU0) * res.error)


def _record_or_failure(s, omega, variant, mode, settings):
    try:
        return delta_v(s, omega, variant, mode, settings)
    except NonConvergence as exc:
        return VoltageRecord(float(omega), Variant(variant), complex(exc.value),
                             regime_diagnostics(s, omega), status="nonconvergence",
                             error=float(exc.error))


def sweep(s: Scenario, variants=(Variant.VS, Variant.VS0, Variant.VFS), mode=Mode.INTEGRATED,
          settings: QuadratureSettings | None = None, parallel: int = 1) -> list[VoltageRecord]:
    """One record per (omega, variant), ordered by omega then variant name.

    Records are computed independently, so the output does not depend on
    ``parallel``. Non-converged records carry ``status='nonconvergence'``.
    """
    variants = sorted({Variant(v) for v in variants}, key=lambda v: v.value)
    jobs = [(w, v) for w in s.frequencies for v in variants]
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            out = list(pool.map(lambda j: _record_or_failure(s, j[0], j[1], mode, settings), jobs))
    else:
        out = [_record_or_failure(s, w, v, mode, settings) for w, v in jobs]
    return sorted(out, key=lambda r: (r.omega, r.variant.value))


@dataclass(frozen=True)
class RateStudy:
    alphas: tuple[float, ...]
    magnitudes: tuple[float, ...]
    slope: float
    intercept: float
    residual: float
    hold: str


def scaling_rate_study(base: Scenario, alphas, hold: str = "fixed_nu", omega: float | None = None,
                       mode=Mode.INTEGRATED, settings: QuadratureSettings | None = None) -> RateStudy:
    """Least-squares slope of log|dV_s| against log(alpha) for a sphere.

    ``fixed_nu`` keeps nu = alpha^2 sigma* mu0 omega constant by rescaling the
    object conductivity as alpha changes, so the background fields, which
    depend on omega, are untouched. ``fixed_omega`` keeps every other
    parameter fixed.
    """
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) < 4:
        raise InsufficientSizes("need at least 4 object sizes")
    if max(alphas) < 2 * min(alphas):
        raise InsufficientSizes("sizes must span at least one octave")
    if not base.object.is_sphere:
        raise ValueError("rate study requires a sphere object")
    if hold not in ("fixed_nu", "fixed_omega"):
        raise ValueError(f"unknown hold {hold!r}")
    omega = float(omega if omega is not None else base.frequencies[0])
    a0, s0 = base.object.alpha, base.object.sigma_star
    mags = []
    for a in alphas:
        sigma = s0 * (a0 / a) ** 2 if hold == "fixed_nu" else s0
        s = replace(base, object=replace(base.object, alpha=a, sigma_star=sigma))
        mags.append(abs(delta_v(s, omega, Variant.VS, mode, settings).value))
    x, y = np.log(alphas), np.log(mags)
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(math.sqrt(res[0] / len(x))) if len(res) else 0.0
    return RateStudy(alphas, tuple(mags), float(slope), float(intercept), residual, hold)
