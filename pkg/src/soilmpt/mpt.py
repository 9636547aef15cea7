"""Magnetic polarizability tensors: analytic sphere, signature files, checks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import MU0

SYM_TOL = 1e-10
PSD_TOL = 1e-10
PEC_SWITCH = 1e4
SERIES_SWITCH = 1.0

_IDX_UPPER = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
_IDX_FULL = [(i, j) for i in range(3) for j in range(3)]
UPPER_HEADER = (["omega"] + [f"ReM{i + 1}{j + 1}" for i, j in _IDX_UPPER]
                + [f"ImM{i + 1}{j + 1}" for i, j in _IDX_UPPER])
FULL_HEADER = (["omega"] + [f"ReM{i + 1}{j + 1}" for i, j in _IDX_FULL]
               + [f"ImM{i + 1}{j + 1}" for i, j in _IDX_FULL])


class SignatureError(ValueError):
    def __init__(self, message, row=None, line=None):
        if row is not None:
            message = f"row {row} (line {line}): {message}"
        super().__init__(message)
        self.row = row
        self.line = line


class ParseError(SignatureError):
    pass


class InvariantError(SignatureError):
    pass


class OrderError(SignatureError):
    pass


class RangeError(ValueError):
    pass


def mpt_violations(tensor) -> list[str]:
    m = np.asarray(tensor, dtype=complex)
    out = []
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        return ["tensor must be a finite 3x3 array"]
    norm = np.linalg.norm(m)
    asym = np.max(np.abs(m - m.T))
    if asym > SYM_TOL * norm:
        out.append(f"not complex symmetric (max |M_ij - M_ji| = {asym:.3e})")
    im = 0.5 * (m.imag + m.imag.T)
    lam = np.linalg.eigvalsh(im)
    if lam[0] < -PSD_TOL * np.linalg.norm(m.imag):
        out.append(f"imaginary part not positive semidefinite (min eigenvalue {lam[0]:.3e})")
    return out


@dataclass(frozen=True)
class Mpt:
    tensor: np.ndarray
    omega: float

    def __post_init__(self):
        t = np.array(self.tensor, dtype=complex)
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)
        bad = mpt_violations(t)
        if bad:
            raise InvariantError("; ".join(bad))

    @classmethod
    def unchecked(cls, tensor, omega: float) -> "Mpt":
        """Build without invariant checks, for inspecting suspect data."""
        obj = object.__new__(cls)
        t = np.array(tensor, dtype=complex)
        t.setflags(write=False)
        object.__setattr__(obj, "tensor", t)
        object.__setattr__(obj, "omega", float(omega))
        return obj


@dataclass(frozen=True)
class MptSignature:
    entries: tuple[Mpt, ...]
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        w = [e.omega for e in self.entries]
        for i in range(1, len(w)):
            if not w[i] > w[i - 1]:
                raise OrderError(f"omega not strictly increasing ({w[i]} after {w[i - 1]})", row=i)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([e.omega for e in self.entries])

    @property
    def tensors(self) -> np.ndarray:
        return np.array([e.tensor for e in self.entries])


# --- sphere ---------------------------------------------------------------------

def _sph_j01_scaled(v: complex):
    """j0(v), j1(v) multiplied by exp(-|Im v|)."""
    if abs(v) <= SERIES_SWITCH:
        # j_n(v) = v^n sum_k (-v^2/2)^k / (k! (2n + 2k + 1)!!)
        t0, t1 = 1.0 + 0j, v / 3.0
        s0, s1 = t0, t1
        x = -v * v / 2.0
        for k in range(1, 30):
            t0 = t0 * x / (k * (2 * k + 1))
            t1 = t1 * x / (k * (2 * k + 3))
            s0 += t0
            s1 += t1
        scale = math.exp(-abs(v.imag))
        return s0 * scale, s1 * scale
    s = abs(v.imag)
    e_pos = np.exp(1j * v - s)
    e_neg = np.exp(-1j * v - s)
    sin_s = (e_pos - e_neg) / 2j
    cos_s = (e_pos + e_neg) / 2.0
    j0 = sin_s / v
    j1 = sin_s / (v * v) - cos_s / v
    return complex(j0), complex(j1)


def sphere_eigenvalue(alpha: float, sigma_star: float, mu_rstar: float, omega: float) -> complex:
    """Eigenvalue m of the sphere MPT ``m * I`` (m^3).

    Interior field from the vector potential ``C j1(k r) sin(theta)`` with
    ``k^2 = i omega mu0 mu_r sigma``; exterior uniform field plus a dipole of
    moment ``4 pi alpha^3 q H0``. Matching A and (1/mu) d(rA)/dr at r = alpha
    gives a 2x2 system for (C, q).
    """
    if not (alpha > 0 and sigma_star > 0 and mu_rstar > 0 and omega > 0):
        raise ValueError("sphere parameters must be positive")
    v = alpha * np.sqrt(1j * omega * MU0 * mu_rstar * sigma_star)
    v = complex(v)
    if abs(v) > PEC_SWITCH:
        # Im v large: v cot v -> -i v, so v j0 / j1 = v^2 / (1 - v cot v) -> v^2 / (1 + i v)
        f = (v * v / (1.0 + 1j * v) - 1.0) / mu_rstar
        q = (2.0 - f) / (2.0 * (1.0 + f))
        return complex(4.0 * math.pi * alpha**3 * q)
    j0, j1 = _sph_j01_scaled(v)
    a = np.array([[j1, -1.0], [(v * j0 - j1) / mu_rstar, 1.0]], dtype=complex)
    c_q = np.linalg.solve(a, np.array([0.5, 1.0], dtype=complex))
    return complex(4.0 * math.pi * alpha**3 * c_q[1])


def sphere_mpt(alpha: float, sigma_star: float, mu_rstar: float, omega: float) -> Mpt:
    m = sphere_eigenvalue(alpha, sigma_star, mu_rstar, omega)
    t = np.zeros((3, 3), dtype=complex)
    t[0, 0] = t[1, 1] = t[2, 2] = m
    return Mpt(t, float(omega))


def sphere_signature(alpha, sigma_star, mu_rstar, omegas) -> MptSignature:
    entries = tuple(sphere_mpt(alpha, sigma_star, mu_rstar, w) for w in omegas)
    prov = f"sphere-analytic alpha={alpha!r} sigma={sigma_star!r} mur={mu_rstar!r}"
    return MptSignature(entries, prov)


# --- files ----------------------------------------------------------------------

def save_signature(sig: MptSignature, path) -> None:
    lines = []
    for p in (sig.provenance or "").splitlines():
        lines.append(f"# {p}")
    lines.append(",".join(UPPER_HEADER))
    for e in sig.entries:
        t = e.tensor
        vals = [e.omega] + [t[i, j].real for i, j in _IDX_UPPER] + [t[i, j].imag for i, j in _IDX_UPPER]
        lines.append(",".join(repr(float(v)) for v in vals))
    Path(path).write_text("\n".join(lines) + "\n")


def load_signature(path) -> MptSignature:
    """Read and validate a signature CSV.

    Upper-triangle files are symmetric by construction; full 9-component files
    are accepted and checked for symmetry.
    """
    header = None
    entries = []
    provenance = []
    row = -1
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                provenance.append(text[1:].strip())
                continue
            cells = next(csv.reader([text]))
            if header is None:
                cells = [c.strip() for c in cells]
                if cells == UPPER_HEADER:
                    header = "upper"
                elif cells == FULL_HEADER:
                    header = "full"
                else:
                    raise ParseError(f"line {lineno}: unrecognised header {cells}")
                continue
            row += 1
            n_expected = len(UPPER_HEADER) if header == "upper" else len(FULL_HEADER)
            if len(cells) != n_expected:
                raise ParseError(f"expected {n_expected} columns, got {len(cells)}", row, lineno)
            try:
                vals = [float(c) for c in cells]
            except ValueError as exc:
                raise ParseError(str(exc), row, lineno) from None
            omega = vals[0]
            if not (omega > 0 and math.isfinite(omega)):
                raise ParseError(f"omega must be positive, got {omega}", row, lineno)
            t = np.zeros((3, 3), dtype=complex)
            if header == "upper":
                re, im = vals[1:7], vals[7:13]
                for (i, j), a, b in zip(_IDX_UPPER, re, im):
                    t[i, j] = t[j, i] = complex(a, b)
            else:
                re, im = vals[1:10], vals[10:19]
                for (i, j), a, b in zip(_IDX_FULL, re, im):
                    t[i, j] = complex(a, b)
            bad = mpt_violations(t)
            if bad:
                raise InvariantError("; ".join(bad), row, lineno)
            if entries and not omega > entries[-1].omega:
                raise OrderError(f"omega {omega} not greater than previous {entries[-1].omega}",
                                 row, lineno)
            entries.append(Mpt(t, omega))
    if header is None:
        raise ParseError("missing header")
    return MptSignature(tuple(entries), "\n".join(provenance))


def interpolate(sig: MptSignature, omega: float) -> Mpt:
    """Linear interpolation of Re and Im parts in log(omega); no extrapolation."""
    w = sig.omegas
    if len(w) < 2:
        raise RangeError("interpolation needs at least two signature entries")
    if not (w[0] <= omega <= w[-1]):
        raise RangeError(f"omega={omega} outside signature span [{w[0]}, {w[-1]}]")
    i = int(np.searchsorted(w, omega))
    if w[i] == omega:
        return sig.entries[i]
    lo, hi = sig.entries[i - 1], sig.entries[i]
    t = (math.log(omega) - math.log(lo.omega)) / (math.log(hi.omega) - math.log(lo.omega))
    return Mpt((1.0 - t) * lo.tensor + t * hi.tensor, float(omega))


@dataclass
class DecompositionReport:
    n0: np.ndarray
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def decomposition_check(sig: MptSignature, check_monotone: bool = True) -> DecompositionReport:
    """Check the N0 + R + iI structure over a signature.

    N0 is taken as Re M at the lowest tabulated frequency, so the signature
    must start in the quasi-static regime.
    """
    tensors = sig.tensors
    n0 = tensors[0].real.copy()
    report = DecompositionReport(n0)
    if len(tensors) < 2 or sig.omegas[-1] < 10 * sig.omegas[0]:
        report.violations.append("signature must span at least a decade of omega")
    scale = max(float(np.max(np.linalg.norm(tensors, axis=(1, 2)))), np.finfo(float).tiny)
    tol = PSD_TOL * scale
    prev = None
    for k, (w, t) in enumerate(zip(sig.omegas, tensors)):
        lam_i = np.linalg.eigvalsh(0.5 * (t.imag + t.imag.T))
        if lam_i[0] < -tol:
            report.violations.append(
                f"(a) row {k} omega={w:g}: Im M not positive semidefinite (min eig {lam_i[0]:.3e})")
        r = t.real - n0
        lam_r = np.linalg.eigvalsh(0.5 * (r + r.T))
        if lam_r[-1] > tol:
            report.violations.append(
                f"(b) row {k} omega={w:g}: Re M - N0 not negative semidefinite (max eig {lam_r[-1]:.3e})")
        lam = np.linalg.eigvalsh(0.5 * (t.real + t.real.T))
        if check_monotone and prev is not None and np.any(lam > prev + tol):
            report.violations.append(
                f"(c) row {k} omega={w:g}: Re M eigenvalues increased with omega")
        prev = lam
    return report
