"""Free-space and air-side half-space Laplace-type Green's functions.

For x in air (x3 > 0) and y in the soil (y3 < 0) the half-space function is

    G_s(x, y) = 1/(2 pi) int_0^inf  k/(gamma + mu_rs k) exp(-k x3 + gamma y3) J0(k rho) dk

with ``gamma = sqrt(k^2 - k0^2)``, ``Re gamma > 0``, ``k0^2 = i omega mu0 sigma_s`` and
``rho = |x_t - y_t|``. Because the x-dependence is through ``exp(-k x3) J0(k rho)``
the function is harmonic in air; derivatives in x are taken analytically in the
spectral domain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import MU0, SoilParams
from .quadrature import (
    HankelResult,
    QuadratureSettings,
    SpectralKernel,
    hankel_transform,
)

COINCIDENCE_TOL = 1e-9


class GreensChoice(enum.Enum):
    FREE_SPACE = "free_space"
    HALF_SPACE = "half_space"


class CoincidentPoints(ValueError):
    pass


class WrongHalfSpace(ValueError):
    pass


@dataclass(frozen=True)
class HalfSpaceContext:
    soil: SoilParams
    omega: float
    k_squared: complex = field(init=False)
    # Exponent of the main-text formula, kept for comparison only: it is not
    # harmonic in air and does not reduce to G0.
    printed_exponent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k_squared", 1j * self.omega * MU0 * self.soil.sigma_s)


def gamma(kappa, k_squared: complex):
    """Vertical wavenumber sqrt(k^2 - k0^2), principal branch (Re >= 0)."""
    g = np.sqrt(np.asarray(kappa, dtype=complex) ** 2 - k_squared)
    assert np.all(g.real >= 0.0)
    return g


def _sep(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = x - y
    if np.linalg.norm(r) < COINCIDENCE_TOL:
        raise CoincidentPoints(f"points coincide: {x} and {y}")
    return r


def g0(x, y) -> float:
    r = _sep(x, y)
    return 1.0 / (4.0 * math.pi * float(np.linalg.norm(r)))


def grad_g0(x, y) -> np.ndarray:
    r = _sep(x, y)
    d = float(np.linalg.norm(r))
    return -r / (4.0 * math.pi * d**3)


def hess_g0(x, y) -> np.ndarray:
    r = _sep(x, y)
    d = float(np.linalg.norm(r))
    rh = r / d
    return (3.0 * np.outer(rh, rh) - np.eye(3)) / (4.0 * math.pi * d**3)


def _check_sides(x, y):
    if not x[2] > 0:
        raise WrongHalfSpace(f"x must be in air (x3 > 0), got x3={x[2]}")
    if not y[2] < 0:
        raise WrongHalfSpace(f"y must be in the soil (y3 < 0), got y3={y[2]}")


def gs_kernel(ctx: HalfSpaceContext, x3: float, y3: float, power: int = 1) -> SpectralKernel:
    """Spectral kernel ``k^power / (gamma + mu k) * exp(-k x3 + gamma y3)``.

    ``power`` = 1 gives G_s itself; each x3-derivative or tangential
    derivative contributes one more power of k.
    """
    mu = ctx.soil.mu_rs
    k2 = ctx.k_squared
    printed = ctx.printed_exponent

    def f(k):
        g = gamma(k, k2)
        expo = (-g * x3 + k * y3) if printed else (-k * x3 + g * y3)
        return k**power / (g + mu * k) * np.exp(expo)

    return SpectralKernel(f, x3 - y3)


def _transforms(ctx, x, y, power, orders, settings):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _sep(x, y)
    _check_sides(x, y)
    d = x[:2] - y[:2]
    rho = float(np.hypot(d[0], d[1]))
    kern = gs_kernel(ctx, float(x[2]), float(y[2]), power)
    res = {n: hankel_transform(kern, n, rho, settings) for n in orders}
    dhat = d / rho if rho > 0 else np.zeros(2)
    return res, dhat


def _err(*results: HankelResult) -> float:
    return sum(r.error for r in results) / (2.0 * math.pi)


def gs(x, y, ctx: HalfSpaceContext, settings: QuadratureSettings | None = None,
       with_error: bool = False):
    res, _ = _transforms(ctx, x, y, 1, (0,), settings)
    val = res[0].value / (2.0 * math.pi)
    return (val, _err(res[0])) if with_error else val


def grad_gs(x, y, ctx: HalfSpaceContext, settings: QuadratureSettings | None = None,
            with_error: bool = False):
    res, dhat = _transforms(ctx, x, y, 2, (0, 1), settings)
    i0, i1 = res[0].value, res[1].value
    g = np.empty(3, dtype=complex)
    # d/dx_t J0(k rho) = -k J1(k rho) dhat ; d/dx3 exp(-k x3) = -k exp(-k x3)
    g[:2] = -i1 * dhat
    g[2] = -i0
    g /= 2.0 * math.pi
    return (g, _err(res[0], res[1])) if with_error else g


def hess_gs(x, y, ctx: HalfSpaceContext, settings: QuadratureSettings | None = None,
            with_error: bool = False):
    """Hessian in x of G_s, assembled from orders 0, 1, 2 transforms of k^2 K."""
    res, dhat = _transforms(ctx, x, y, 3, (0, 1, 2), settings)
    i0, i1, i2 = res[0].value, res[1].value, res[2].value
    h = np.zeros((3, 3), dtype=complex)
    # d2/dxi dxj J0(k rho) = k^2 [J2 dhat_i dhat_j - (J0 + J2)/2 delta_ij]
    h[:2, :2] = i2 * np.outer(dhat, dhat) - 0.5 * (i0 + i2) * np.eye(2)
    h[:2, 2] = h[2, :2] = i1 * dhat
    h[2, 2] = i0
    h /= 2.0 * math.pi
    return (h, _err(res[0], res[1], res[2])) if with_error else h


def hessian(choice: GreensChoice, x, y, ctx: HalfSpaceContext,
            settings: QuadratureSettings | None = None) -> np.ndarray:
    if choice is GreensChoice.FREE_SPACE:
        return hess_g0(x, y).astype(complex)
    return hess_gs(x, y, ctx, settings)
