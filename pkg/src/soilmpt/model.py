"""Scenario types, validation and asymptotic-regime diagnostics.

All lengths are in metres, conductivities in S/m and frequencies are angular
(rad/s). The ground plane is x3 = 0, air is x3 > 0 and soil is x3 < 0.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

MU0 = 4e-7 * math.pi


@dataclass(frozen=True)
class SoilParams:
    sigma_s: float = 0.0
    mu_rs: float = 1.0


@dataclass(frozen=True)
class ObjectParams:
    """Buried object. ``signature`` set means an externally computed MPT."""

    alpha: float
    sigma_star: float
    mu_rstar: float = 1.0
    z: tuple[float, float, float] = (0.0, 0.0, -0.4)
    signature: str | None = None

    @property
    def is_sphere(self) -> bool:
        return self.signature is None


@dataclass(frozen=True)
class CoilSpec:
    r_inner: float
    r_outer: float
    height: float
    center: tuple[float, float, float]
    current_density: float
    n_radial: int = 6
    n_axial: int = 6
    n_azimuthal: int = 16

    @property
    def area(self) -> float:
        return self.height * (self.r_outer - self.r_inner)

    @property
    def total_current(self) -> float:
        return self.current_density * self.area


@dataclass(frozen=True)
class Scenario:
    soil: SoilParams
    object: ObjectParams
    excite: CoilSpec
    measure: CoilSpec
    frequencies: tuple[float, ...] = ()

    def with_soil(self, **kw) -> "Scenario":
        return replace(self, soil=replace(self.soil, **kw))

    def with_object(self, **kw) -> "Scenario":
        return replace(self, object=replace(self.object, **kw))


@dataclass(frozen=True)
class RegimeReport:
    nu: float
    epsilon: float
    depth_D: float
    mu_rs_bound_ok: bool
    epsilon_le_nu: bool
    skin_depth_object: float
    alpha_over_depth: float


def reference_coil(center_height: float = 0.2) -> CoilSpec:
    """The cylindrical coil used throughout the sphere experiments."""
    r_in, r_out, h = 0.12, 0.15, 0.1
    return CoilSpec(
        r_inner=r_in,
        r_outer=r_out,
        height=h,
        center=(0.0, 0.0, center_height),
        current_density=10.0 / (h * (r_out - r_in)),
    )


def reference_scenario(
    sigma_s: float = 1.6,
    mu_rs: float = 1.0006,
    frequencies=(1e5,),
) -> Scenario:
    coil = reference_coil()
    return Scenario(
        soil=SoilParams(sigma_s, mu_rs),
        object=ObjectParams(alpha=0.1, sigma_star=1e6, mu_rstar=1.0, z=(0.0, 0.0, -0.4)),
        excite=coil,
        measure=coil,
        frequencies=tuple(float(w) for w in frequencies),
    )


def _coil_violations(name: str, c: CoilSpec) -> list[str]:
    out = []
    if not 0 < c.r_inner < c.r_outer:
        out.append(f"{name}: radii must satisfy 0 < r_inner < r_outer "
                   f"(got r_inner={c.r_inner}, r_outer={c.r_outer})")
    if not c.height > 0:
        out.append(f"{name}: height must be positive (got {c.height})")
    elif not c.center[2] - c.height / 2 > 0:
        out.append(f"{name}: coil must lie above the ground, center[2] - height/2 > 0 "
                   f"(got center[2]={c.center[2]})")
    for attr in ("n_radial", "n_axial", "n_azimuthal"):
        if getattr(c, attr) < 1:
            out.append(f"{name}: {attr} must be >= 1")
    if not math.isfinite(c.current_density):
        out.append(f"{name}: current_density must be finite")
    return out


def validate_scenario(s: Scenario) -> list[str]:
    """Return a message for every violated invariant; empty iff valid."""
    out = []
    soil, obj = s.soil, s.object
    if not soil.sigma_s >= 0:
        out.append(f"soil.sigma_s must be >= 0 (got {soil.sigma_s})")
    if not soil.mu_rs >= 1:
        out.append(f"soil.mu_rs must be >= 1 (got {soil.mu_rs})")
    if not obj.alpha > 0:
        out.append(f"object.alpha must be positive (got {obj.alpha})")
    if not obj.sigma_star > 0:
        out.append(f"object.sigma_star must be positive (got {obj.sigma_star})")
    elif not obj.sigma_star > soil.sigma_s:
        out.append(f"object.sigma_star must exceed soil.sigma_s "
                   f"(got {obj.sigma_star} <= {soil.sigma_s})")
    if not obj.mu_rstar >= 1:
        out.append(f"object.mu_rstar must be >= 1 (got {obj.mu_rstar})")
    if not obj.z[2] < 0:
        out.append(f"object.z must lie below the ground plane, z[2] < 0 (got z[2]={obj.z[2]})")
    elif obj.is_sphere and not obj.z[2] + obj.alpha < 0:
        out.append(f"object.z: sphere must lie strictly below ground, z[2] + alpha < 0 "
                   f"(got {obj.z[2]} + {obj.alpha})")
    if s.measure == s.excite:
        # one physical coil used for both roles
        out += _coil_violations("excite", s.excite)
    else:
        out += _coil_violations("excite", s.excite)
        out += _coil_violations("measure", s.measure)
    freqs = s.frequencies
    if any(not (w > 0 and math.isfinite(w)) for w in freqs):
        out.append("frequencies must be positive and finite")
    elif any(b <= a for a, b in zip(freqs, freqs[1:])):
        out.append("frequencies must be strictly increasing")
    return out


def regime_diagnostics(s: Scenario, omega: float) -> RegimeReport:
    obj, soil = s.object, s.soil
    depth = abs(obj.z[2])
    nu = obj.alpha**2 * obj.sigma_star * MU0 * omega
    eps = omega * MU0 * soil.sigma_s * depth**2
    skin = math.sqrt(2.0 / (omega * MU0 * obj.mu_rstar * obj.sigma_star))
    return RegimeReport(
        nu=nu,
        epsilon=eps,
        depth_D=depth,
        mu_rs_bound_ok=bool(1.0 <= soil.mu_rs <= 1.0 + obj.alpha / depth),
        epsilon_le_nu=bool(eps <= nu),
        skin_depth_object=skin,
        alpha_over_depth=obj.alpha / depth,
    )


# --- JSON ---------------------------------------------------------------------

class ScenarioFormatError(ValueError):
    pass


_SOIL_KEYS = {"sigma_s", "mu_rs"}
_OBJECT_KEYS = {"alpha", "sigma_star", "mu_rstar", "z", "shape"}
_COIL_KEYS = {"r_inner", "r_outer", "height", "center", "current_density",
              "n_radial", "n_axial", "n_azimuthal"}
_TOP_KEYS = {"soil", "object", "excite", "measure", "frequencies"}


def _strict(d: Any, allowed: set[str], where: str, required: set[str] = frozenset()) -> dict:
    if not isinstance(d, dict):
        raise ScenarioFormatError(f"{where}: expected an object")
    unknown = set(d) - allowed
    if unknown:
        raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(d)
    if missing:
        raise ScenarioFormatError(f"{where}: missing keys {sorted(missing)}")
    return d


def _vec3(v, where):
    if not (isinstance(v, (list, tuple)) and len(v) == 3):
        raise ScenarioFormatError(f"{where}: expected a 3-vector")
    return tuple(float(x) for x in v)


def _coil_from_dict(d, where) -> CoilSpec:
    d = _strict(d, _COIL_KEYS, where, {"r_inner", "r_outer", "height", "center"})
    r_in, r_out, h = float(d["r_inner"]), float(d["r_outer"]), float(d["height"])
    jd = d.get("current_density")
    if jd is None:
        jd = 10.0 / (h * (r_out - r_in))
    return CoilSpec(
        r_inner=r_in, r_outer=r_out, height=h,
        center=_vec3(d["center"], where + ".center"),
        current_density=float(jd),
        n_radial=int(d.get("n_radial", 6)),
        n_axial=int(d.get("n_axial", 6)),
        n_azimuthal=int(d.get("n_azimuthal", 16)),
    )


def scenario_from_dict(d: dict, base_dir: Path | None = None) -> Scenario:
    """Strict parse: unknown keys are rejected to catch unit mistakes."""
    d = _strict(d, _TOP_KEYS, "scenario", {"soil", "object", "excite"})
    soil = _strict(d["soil"], _SOIL_KEYS, "soil")
    obj = _strict(d["object"], _OBJECT_KEYS, "object", {"alpha", "sigma_star", "z"})
    shape = obj.get("shape", "sphere")
    signature = None
    if isinstance(shape, dict):
        shape = _strict(shape, {"signature"}, "object.shape", {"signature"})
        p = Path(shape["signature"])
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        signature = str(p)
    elif shape != "sphere":
        raise ScenarioFormatError("object.shape: expected 'sphere' or {'signature': path}")
    excite = _coil_from_dict(d["excite"], "excite")
    measure = _coil_from_dict(d["measure"], "measure") if "measure" in d else excite
    freqs = d.get("frequencies", [])
    if not isinstance(freqs, list):
        raise ScenarioFormatError("frequencies: expected a list of rad/s values")
    return Scenario(
        soil=SoilParams(float(soil.get("sigma_s", 0.0)), float(soil.get("mu_rs", 1.0))),
        object=ObjectParams(
            alpha=float(obj["alpha"]),
            sigma_star=float(obj["sigma_star"]),
            mu_rstar=float(obj.get("mu_rstar", 1.0)),
            z=_vec3(obj["z"], "object.z"),
            signature=signature,
        ),
        excite=excite,
        measure=measure,
        frequencies=tuple(float(w) for w in freqs),
    )


def _coil_to_dict(c: CoilSpec) -> dict:
    return {
        "r_inner": c.r_inner, "r_outer": c.r_outer, "height": c.height,
        "center": list(c.center), "current_density": c.current_density,
        "n_radial": c.n_radial, "n_axial": c.n_axial, "n_azimuthal": c.n_azimuthal,
    }


def scenario_to_dict(s: Scenario) -> dict:
    obj = s.object
    return {
        "soil": {"sigma_s": s.soil.sigma_s, "mu_rs": s.soil.mu_rs},
        "object": {
            "alpha": obj.alpha, "sigma_star": obj.sigma_star, "mu_rstar": obj.mu_rstar,
            "z": list(obj.z),
            "shape": "sphere" if obj.signature is None else {"signature": obj.signature},
        },
        "excite": _coil_to_dict(s.excite),
        "measure": _coil_to_dict(s.measure),
        "frequencies": list(s.frequencies),
    }


def load_scenario(path) -> Scenario:
    path = Path(path)
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"{path}: {exc}") from exc
    return scenario_from_dict(data, base_dir=path.parent)


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


def scenario_hash(s: Scenario) -> str:
    blob = json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def logspace_frequencies(omin: float, omax: float, n: int) -> tuple[float, ...]:
    return tuple(float(w) for w in np.logspace(np.log10(omin), np.log10(omax), n))
