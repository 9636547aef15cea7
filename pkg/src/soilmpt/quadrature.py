"""Semi-infinite Hankel-transform quadrature.

Computes ``int_0^inf f(k) J_n(k rho) dk`` for exponentially decaying, possibly
complex kernels ``f``. Two strategies are available:

``adaptive``
    Gauss-Legendre panels on ``[0, k_max]`` refined by bisection; the error of
    a panel is the difference between its one-panel and two-half-panel rules.
``partition``
    Integration between consecutive zeros of ``J_n(k rho)`` followed by Wynn
    epsilon acceleration of the partial sums.

``auto`` picks ``partition`` when ``rho`` exceeds the kernel's decay length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

_EPS = np.finfo(float).eps
_GL_ORDER = 16
# Partition path stops well inside the tolerance; Wynn differences are not
# strict bounds.
_PARTITION_SAFETY = 1e-2
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
# Kernels are evaluated at k = 0+ instead of exactly 0.
KAPPA_FLOOR = 1e-300


class NonConvergence(RuntimeError):
    """Interval budget exhausted before the requested tolerance was met."""

    def __init__(self, message, value=complex("nan"), error=math.inf):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_intervals: int = 10_000
    accel_terms: int = 12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_intervals < 1 or self.accel_terms < 1:
            raise ValueError("counts must be >= 1")

    def tightened(self, factor: float) -> "QuadratureSettings":
        return QuadratureSettings(self.rel_tol / factor, self.abs_tol / factor,
                                  self.max_intervals, self.accel_terms)


@dataclass(frozen=True)
class SpectralKernel:
    """A radial spectral kernel.

    ``eval`` maps an array of k >= 0 to complex values and must be vectorised.
    ``decay_scale`` is the length c of the dominant ``exp(-k c)`` decay (m).
    """

    eval: Callable[[np.ndarray], np.ndarray]
    decay_scale: float

    def __post_init__(self):
        if not self.decay_scale > 0:
            raise ValueError("decay_scale must be positive")


class HankelResult(NamedTuple):
    value: complex
    error: float
    strategy: str
    intervals: int


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n(x) for n in {0, 1, 2}."""
    if n not in (0, 1, 2):
        raise ValueError(f"order {n} not supported")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("bessel_j: domain error, x must be >= 0")
    if n == 0:
        out = special.j0(xa)
    elif n == 1:
        out = special.j1(xa)
    else:
        out = special.jv(2, xa)
    return out if np.ndim(x) else float(out)


def _panel_rule(f, lo, hi):
    """One-panel and two-half-panel Gauss-Legendre sums for arrays of panels."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    quarter = 0.5 * half
    m1 = 0.5 * (lo + mid)
    m2 = 0.5 * (mid + hi)
    x = _GL_X[None, :]
    nodes = np.concatenate([
        mid[:, None] + half[:, None] * x,
        m1[:, None] + quarter[:, None] * x,
        m2[:, None] + quarter[:, None] * x,
    ], axis=1)
    vals = f(np.maximum(nodes, KAPPA_FLOOR).ravel()).reshape(nodes.shape)
    g = _GL_ORDER
    whole = half * (vals[:, :g] @ _GL_W)
    halves = quarter * (vals[:, g:2 * g] @ _GL_W + vals[:, 2 * g:] @ _GL_W)
    absint = quarter * (np.abs(vals[:, g:2 * g]) @ _GL_W + np.abs(vals[:, 2 * g:]) @ _GL_W)
    return halves, np.abs(whole - halves), absint


def _adaptive_interval(f, a, b, rel_tol, abs_floor, max_panels, n_initial=8):
    """Adaptive panel integration of ``f`` on [a, b].

    Returns (value, error estimate, absolute-integral estimate, panel count).
    Raises NonConvergence if ``max_panels`` is exceeded.
    """
    edges = np.linspace(a, b, n_initial + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err, absint = _panel_rule(f, lo, hi)
    while True:
        total = complex(np.sum(val))
        scale = float(np.sum(absint))
        err_total = float(np.sum(err)) + 64 * _EPS * scale
        tol = max(rel_tol * abs(total), abs_floor * scale)
        if err_total <= tol:
            return total, err_total, scale, len(lo)
        if float(np.sum(err)) <= 64 * _EPS * scale:
            raise NonConvergence("tolerance below the rounding floor of the integrand",
                                 total, err_total)
        width = hi - lo
        share = tol * width / (b - a)
        bad = err > share
        if len(lo) + int(np.count_nonzero(bad)) > max_panels:
            raise NonConvergence(
                f"adaptive quadrature exceeded {max_panels} panels on [{a:g}, {b:g}]",
                total, err_total)
        if not np.any(bad):
            bad[np.argmax(err)] = True
        keep = ~bad
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        if np.any(new_hi - new_lo <= 4 * _EPS * np.maximum(abs(new_lo), 1.0)):
            raise NonConvergence("adaptive quadrature panels collapsed", total, err_total)
        nv, ne, na = _panel_rule(f, new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        absint = np.concatenate([absint[keep], na])


def _integrand(kernel: SpectralKernel, n: int, rho: float):
    if rho == 0.0:
        return lambda k: np.asarray(kernel.eval(k), dtype=complex)

    def g(k):
        return np.asarray(kernel.eval(k), dtype=complex) * bessel_j(n, k * rho)
    return g


def _truncation_point(kernel: SpectralKernel, settings: QuadratureSettings):
    """Upper limit where the kernel has decayed below the abs_tol floor."""
    c = kernel.decay_scale
    k_max = math.log(1.0 / settings.abs_tol) / c
    probe = np.linspace(0.0, k_max, 257)
    probe[0] = KAPPA_FLOOR
    peak = float(np.max(np.abs(kernel.eval(probe))))
    if peak == 0.0:
        return k_max, 0.0, 0.0
    for _ in range(60):
        tail = abs(complex(kernel.eval(np.array([k_max]))[0])) / c
        if tail <= 1e-3 * settings.abs_tol * peak / c:
            return k_max, tail, peak
        k_max *= 1.25
    return k_max, tail, peak


def wynn_epsilon(seq):
    """Wynn epsilon extrapolation of a sequence of partial sums.

    Returns the highest-order even-column estimate and its difference from the
    previous one.
    """
    s = [complex(v) for v in seq]
    n = len(s)
    if n < 3:
        return s[-1], (abs(s[-1] - s[-2]) if n == 2 else math.inf)
    prev = [0j] * (n + 1)
    cur = list(s)
    estimates = [s[-1]]
    for col in range(1, n):
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0:
                # Converged exactly; the table cannot be continued.
                diff = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else 0.0
                return estimates[-1], diff
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        if col % 2 == 0 and cur:
            estimates.append(cur[-1])
        if len(cur) < 2:
            break
    best = estimates[-1]
    diff = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else abs(s[-1] - s[-2])
    return best, diff


def _zeros(n: int, count: int) -> np.ndarray:
    return special.jn_zeros(n, count)


def _partition(kernel, n, rho, settings):
    g = _integrand(kernel, n, rho)
    k_max, tail, peak = _truncation_point(kernel, settings)
    n_zeros = int(k_max * rho / math.pi) + 8
    if n_zeros > settings.max_intervals:
        raise NonConvergence("too many Bessel-zero intervals")
    breaks = np.concatenate([[0.0], _zeros(n, n_zeros) / rho])
    sub_tol = settings.rel_tol * 1e-2
    budget = settings.max_intervals
    partial = []
    total = 0j
    err_q = 0.0
    scale = 0.0
    used = 0
    best, acc_err = 0j, math.inf
    last_terms = [math.inf, math.inf]
    for m in range(len(breaks) - 1):
        v, e, a, p = _adaptive_interval(g, breaks[m], breaks[m + 1], sub_tol,
                                        settings.abs_tol * 1e-2, budget - used, n_initial=2)
        used += p + 1
        total += v
        err_q += e
        scale += a
        partial.append(total)
        last_terms = [last_terms[1], abs(v)]
        tol = max(settings.rel_tol * abs(total), settings.abs_tol * scale)
        if len(partial) >= 3:
            window = partial[-(settings.accel_terms + 1):]
            prev_best = best
            best, acc_err = wynn_epsilon(window)
            # Wynn differences are optimistic on their own; also count the
            # step between successive accelerated estimates.
            if len(partial) > 3:
                acc_err = max(acc_err, abs(best - prev_best))
            # Exponential decay: the plain sum may already be converged.
            tail_bound = max(last_terms)
            if tail_bound <= 1e-3 * tol:
                best, acc_err = total, tail_bound
            if acc_err + err_q <= _PARTITION_SAFETY * tol:
                return HankelResult(complex(best), acc_err + err_q + 64 * _EPS * scale,
                                    "partition", m + 1)
        if used >= budget:
            break
    if len(partial) < 3:
        # The kernel decayed within a couple of oscillations.
        err = err_q + tail + 64 * _EPS * scale
        return HankelResult(complex(total), err, "partition", len(partial))
    tol = max(settings.rel_tol * abs(total), settings.abs_tol * scale)
    if acc_err + err_q <= 10 * tol or abs(partial[-1] - partial[-2]) <= tol:
        return HankelResult(complex(total), abs(partial[-1] - partial[-2]) + err_q + tail,
                            "partition", len(partial))
    raise NonConvergence("partition-extrapolation did not converge", best, acc_err + err_q)


def _adaptive(kernel, n, rho, settings):
    g = _integrand(kernel, n, rho)
    k_max, tail, peak = _truncation_point(kernel, settings)
    n_init = max(8, min(512, int(math.ceil(k_max * max(rho, kernel.decay_scale) / 2.0))))
    v, e, a, p = _adaptive_interval(g, 0.0, k_max, settings.rel_tol * 0.1,
                                    settings.abs_tol, settings.max_intervals, n_initial=n_init)
    return HankelResult(v, e + tail, "adaptive", p)


def hankel_transform(kernel: SpectralKernel, n: int, rho: float,
                     settings: QuadratureSettings | None = None,
                     strategy: str = "auto") -> HankelResult:
    """Integrate ``kernel(k) * J_n(k rho)`` over ``k`` in ``[0, inf)``.

    For ``rho == 0`` and ``n >= 1`` the Bessel factor vanishes identically and
    an exact zero is returned.
    """
    if n not in (0, 1, 2):
        raise ValueError(f"order {n} not supported")
    if not rho >= 0:
        raise ValueError("rho must be >= 0")
    settings = settings or QuadratureSettings()
    if rho == 0.0 and n >= 1:
        return HankelResult(0j, 0.0, "exact", 0)
    if strategy == "auto":
        strategy = "partition" if rho > kernel.decay_scale else "adaptive"
    if strategy == "partition":
        if rho == 0.0:
            strategy = "adaptive"
        else:
            return _partition(kernel, n, rho, settings)
    if strategy == "adaptive":
        return _adaptive(kernel, n, rho, settings)
    raise ValueError(f"unknown strategy {strategy!r}")
