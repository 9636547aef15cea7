"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
Each criterion also has a wall-clock budget that is part of its verdict.
"""

import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from soilmpt import cli, forward as F, greens as G, mpt as M, sources as S  # noqa: E402
from soilmpt.model import SoilParams, logspace_frequencies, reference_scenario, save_scenario  # noqa: E402
from soilmpt.quadrature import QuadratureSettings, SpectralKernel, hankel_transform  # noqa: E402

RESULTS: list[str] = []
SOIL = SoilParams(1.6, 1.0006)


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(np.asarray(b))))


# --- criteria ------------------------------------------------------------------

def crit_laplace_limit():
    ctx = G.HalfSpaceContext(SoilParams(0.0, 1.0), 1e5)
    worst = [0.0, 0.0, 0.0]
    for rho in (0.0, 0.05, 0.15, 0.3, 0.6):
        for x3 in (0.05, 0.1, 0.15, 0.2, 0.25):
            for y3 in (-0.2, -0.3, -0.4, -0.5, -0.6):
                x, y = np.array([rho, 0.0, x3]), np.array([0.0, 0.0, y3])
                worst[0] = max(worst[0], _rel(G.gs(x, y, ctx), G.g0(x, y)))
                worst[1] = max(worst[1], _rel(G.grad_gs(x, y, ctx), G.grad_g0(x, y)))
                worst[2] = max(worst[2], _rel(G.hess_gs(x, y, ctx), G.hess_g0(x, y)))
    ok = worst[0] <= 1e-9 and worst[1] <= 1e-8 and worst[2] <= 1e-7
    return ok, "max rel err G %.1e, grad %.1e, hess %.1e over 125 pairs" % tuple(worst)


def crit_hankel_closed_forms():
    worst = 0.0
    for h in (0.1, 0.6, 2.0):
        for rho in (0.0, 0.3, 1.0):
            k = SpectralKernel(lambda kk, h=h: np.exp(-kk * h), h)
            r = math.hypot(h, rho)
            v0 = hankel_transform(k, 0, rho).value
            worst = max(worst, abs(v0 - 1 / r) * r)
            v1 = hankel_transform(k, 1, rho).value
            if rho == 0:
                if v1 != 0:
                    return False, "order 1 at rho=0 not exactly zero"
            else:
                e1 = (1 - h / r) / rho
                worst = max(worst, abs(v1 - e1) / e1)
    return worst <= 1e-10, f"max rel err {worst:.1e} over 18 integrals"


def crit_hessian_structure():
    rng = np.random.default_rng(7)
    tight = QuadratureSettings(rel_tol=1e-11)
    worst_tr = worst_as = worst_fd = 0.0
    for w in (1e4, 1e5, 1e6):
        ctx = G.HalfSpaceContext(SOIL, w)
        for _ in range(50):
            x = np.array([*rng.uniform(-0.3, 0.3, 2), rng.uniform(0.05, 0.35)])
            z = np.array([*rng.uniform(-0.2, 0.2, 2), rng.uniform(-0.7, -0.15)])
            h = G.hess_gs(x, z, ctx)
            n = np.linalg.norm(h)
            worst_tr = max(worst_tr, abs(np.trace(h)) / n)
            worst_as = max(worst_as, np.abs(h - h.T).max() / n)
            step = 1e-4
            fd = np.array([(G.grad_gs(x + step * e, z, ctx, tight) - G.grad_gs(x - step * e, z, ctx, tight))
                           / (2 * step) for e in np.eye(3)])
            worst_fd = max(worst_fd, np.abs(fd - h).max() / np.abs(h).max())
    ok = worst_tr <= 1e-8 and worst_as <= 1e-9 and worst_fd <= 1e-4
    return ok, (f"150 samples: |tr|/|H| {worst_tr:.1e}, asym {worst_as:.1e}, "
                f"FD rel {worst_fd:.1e}")


def crit_sphere_endpoints():
    alpha, sigma = 0.1, 1e6
    worst_static = 0.0
    for mur in (2.0, 10.0, 100.0):
        exact = 4 * math.pi * alpha**3 * (mur - 1) / (mur + 2)
        worst_static = max(worst_static, abs(M.sphere_eigenvalue(alpha, sigma, mur, 1e-6) - exact) / exact)
    pec = -2 * math.pi * alpha**3
    pec_err = abs(M.sphere_eigenvalue(alpha, sigma, 1.0, 1e12) - pec) / abs(pec)
    sign_ok = True
    for mur in (1.0, 2.0, 10.0, 100.0):
        n0 = M.sphere_eigenvalue(alpha, sigma, mur, 1e-6).real
        for w in logspace_frequencies(1e2, 1e8, 60):
            m = M.sphere_eigenvalue(alpha, sigma, mur, w)
            sign_ok &= m.imag >= 0 and m.real - n0 <= 1e-12 * max(abs(n0), alpha**3)
    ok = worst_static <= 1e-6 and pec_err <= 1e-4 and sign_ok
    return ok, (f"static rel err {worst_static:.1e}, PEC rel err {pec_err:.1e}, "
                f"sign structure {'ok' if sign_ok else 'violated'}")


def crit_fixed_nu():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        alpha = 10 ** rng.uniform(-2.5, -0.5)
        sigma = 10 ** rng.uniform(5, 7.5)
        mur = float(rng.choice([1.0, 2.0, 20.0, 100.0]))
        w = 10 ** rng.uniform(1, 7)
        a = M.sphere_eigenvalue(alpha, sigma, mur, w) / alpha**3
        b = M.sphere_eigenvalue(alpha / 2, sigma, mur, 4 * w) / (alpha / 2) ** 3
        worst = max(worst, abs(a - b) / abs(a))
    study = F.scaling_rate_study(reference_scenario(), [0.1, 0.05, 0.025, 0.0125], "fixed_nu")
    ok = worst <= 1e-10 and abs(study.slope - 3.0) <= 0.01
    return ok, f"collapse rel err {worst:.1e}, fixed-nu slope {study.slope:.4f}"


def crit_no_soil_collapse():
    s = reference_scenario(sigma_s=0.0, mu_rs=1.0)
    worst = 0.0
    for w in logspace_frequencies(1e2, 1e7, 10):
        v = [F.delta_v(s, w, var).value for var in ("Vs", "Vs0", "Vfs")]
        for i in range(3):
            for j in range(i + 1, 3):
                worst = max(worst, abs(v[i] - v[j]) / abs(v[j]))
    return worst <= 1e-8, f"max pairwise rel diff {worst:.1e} over 10 frequencies"


def crit_soil_trends():
    s = reference_scenario()
    lines, ok = [], True
    for w in (1e5, 1e6):
        sig = [abs(F.delta_v0_soil_only(s.with_soil(sigma_s=x), w).value) for x in (0.01, 0.1, 1.0)]
        increasing = sig[0] < sig[1] < sig[2]
        mu = [abs(F.delta_v0_soil_only(s.with_soil(mu_rs=m), w).value) for m in (1.0006, 1.021, 1.076)]
        mu_spread = max(mu) - min(mu)
        sig_spread = sig[2] - sig[1]
        ok &= increasing and mu_spread < sig_spread
        lines.append(f"w={w:.0e}: sigma-increasing {increasing}, mu spread {mu_spread:.2e} "
                     f"vs sigma-decade spread {sig_spread:.2e}")
    return ok, "; ".join(lines)


def crit_depth_size():
    s = reference_scenario()
    dep = [abs(F.delta_v(s.with_object(z=(0, 0, -d)), 1e5).value) for d in (0.2, 0.3, 0.4, 0.5)]
    size = [abs(F.delta_v(s.with_object(alpha=a), 1e5).value) for a in (0.0125, 0.025, 0.05, 0.1)]
    ok = all(a > b for a, b in zip(dep, dep[1:])) and all(a < b for a, b in zip(size, size[1:]))
    return ok, ("|dVs| by depth " + " ".join(f"{v:.2e}" for v in dep)
                + "; by size " + " ".join(f"{v:.2e}" for v in size))


def crit_variant_gap():
    gaps = []
    for sig in (1.6, 0.16, 0.016):
        s = reference_scenario(sigma_s=sig)
        vs, vs0 = F.delta_v(s, 1e5, "Vs").value, F.delta_v(s, 1e5, "Vs0").value
        gaps.append(abs(vs - vs0) / abs(vs))
    ok = gaps[0] > gaps[1] > gaps[2]
    return ok, "relative gap " + " ".join(f"{g:.2e}" for g in gaps)


def crit_interface():
    loop = S.LoopSource(radius=0.135, height=0.2, current=10.0)
    raw = extrap = 0.0
    for rho in (0.05, 0.135, 0.3):
        def f(x3, rho=rho):
            return S.loop_field_halfspace(loop, SOIL, 1e5, [rho, 0.0, x3])
        up, dn = f(1e-4), f(-1e-4)
        raw = max(raw, abs(up[0] - dn[0]) / abs(up[0]), abs(up[2] - SOIL.mu_rs * dn[2]) / abs(up[2]))
        up0, dn0 = 2 * up - f(2e-4), 2 * dn - f(-2e-4)
        extrap = max(extrap, abs(up0[0] - dn0[0]) / abs(up0[0]),
                     abs(up0[2] - SOIL.mu_rs * dn0[2]) / abs(up0[2]))
    return raw <= 1e-4, (f"mismatch at x3=+-1e-4: {raw:.1e}; extrapolated to x3=0: {extrap:.1e} "
                         f"(raw mismatch is the field gradient times 2e-4)")


def crit_determinism():
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        scen = d / "sphere.json"
        save_scenario(reference_scenario(frequencies=logspace_frequencies(1e3, 1e6, 20)), scen)
        outs = []
        for par in ("1", "8"):
            csv, svg = d / f"p{par}.csv", d / f"p{par}.svg"
            code = cli.run(["sweep-frequency", "--scenario", str(scen), "--variants", "Vs,Vs0,Vfs",
                            "--out", str(csv), "--parallel", par, "--svg", str(svg)])
            if code != 0:
                return False, f"exit status {code}"
            outs.append((csv.read_bytes(), svg.read_bytes()))
    same = outs[0] == outs[1]
    return same, f"CSV and SVG byte-identical for --parallel 1 and 8: {same}"


def crit_signature():
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        sig = M.sphere_signature(0.1, 1e6, 1.0, logspace_frequencies(1e0, 1e6, 20))
        good = d / "sig.csv"
        M.save_signature(sig, good)
        loaded = M.load_signature(good)
        rep = M.decomposition_check(loaded)
        round_trip = np.array_equal(loaded.tensors, sig.tensors)

        # asymmetric entry in row 4 (full-tensor file)
        full = [",".join(M.FULL_HEADER)]
        for k, e in enumerate(sig.entries):
            t = e.tensor.copy()
            if k == 4:
                t[0, 1] += 1e-3 * abs(t[0, 0]) + 1e-6
            full.append(",".join(repr(float(v)) for v in
                                 [e.omega, *t.real.ravel(), *t.imag.ravel()]))
        asym = d / "asym.csv"
        asym.write_text("\n".join(full) + "\n")
        # Im-indefinite entry in row 7
        lines = good.read_text().splitlines()
        first = next(i for i, ln in enumerate(lines) if ln.startswith("omega")) + 1
        cells = lines[first + 7].split(",")
        cells[7] = repr(-1e-3)  # ImM11
        lines[first + 7] = ",".join(cells)
        indef = d / "indef.csv"
        indef.write_text("\n".join(lines) + "\n")

        rows = []
        for path, expect in ((asym, 4), (indef, 7)):
            try:
                M.load_signature(path)
                rows.append(None)
            except M.InvariantError as exc:
                rows.append(exc.row if exc.row == expect else ("wrong", exc.row))
    ok = rep.ok and round_trip and rows == [4, 7]
    return ok, (f"round trip {round_trip}, violations {len(rep.violations)}, "
                f"corrupt rows reported {rows}")


CRITERIA = [
    (1, "Laplace-limit identity", crit_laplace_limit, 30),
    (2, "Hankel closed forms", crit_hankel_closed_forms, 5),
    (3, "Half-space Hessian harmonic and symmetric", crit_hessian_structure, 120),
    (4, "Sphere MPT endpoints", crit_sphere_endpoints, 10),
    (5, "Fixed-nu alpha^3 collapse", crit_fixed_nu, 10),
    (6, "No-soil collapse of variants", crit_no_soil_collapse, 120),
    (7, "Soil-only trends", crit_soil_trends, 300),
    (8, "Depth and size monotonicity", crit_depth_size, 300),
    (9, "Variant gap closes with sigma_s", crit_variant_gap, 180),
    (10, "Interface continuity", crit_interface, 60),
    (11, "Determinism across parallelism", crit_determinism, 600),
    (12, "Signature round trip and validation", crit_signature, 5),
]


def evaluate(number, name, fn, budget):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # reported as a failure line, re-raised by the test
        ok, detail = False, f"error: {exc!r}"
    elapsed = time.perf_counter() - t0
    in_time = elapsed <= budget
    verdict = "PASS" if ok and in_time else "FAIL"
    line = (f"[{verdict}] criterion {number:2d} {name}: {detail} "
            f"({elapsed:.1f}s of {budget}s{'' if in_time else ', over budget'})")
    RESULTS.append(line)
    print(line)
    return ok and in_time, line


@pytest.mark.parametrize("number,name,fn,budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn, budget):
    ok, line = evaluate(number, name, fn, budget)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c)[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
