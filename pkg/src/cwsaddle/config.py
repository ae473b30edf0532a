"""Flat ``key = value`` run configuration shared by the CLI and the reports.

Lines are ``key = value``; ``#`` starts a comment. Unknown keys are an
error. Values are coerced to the type of the default. Command-line flags
are applied after the file, so they win.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

import numpy as np

from .flow import IntegratorConfig
from .surface import PerturbationConfig, Surface
from .torus_da import DAConfig, SaddleInsertion


class ConfigError(ValueError):
    """Malformed config file or value."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    # integrator
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.05
    max_steps: int = 1_000_000
    # T3 matrix, row major; verified against its derivation
    m3: str = "0.5,0,-1.5,2"
    # DA
    chart_scale: float = 0.008
    blend_profile: str = "smoothstep"
    bump_radius: float = 0.06
    cut_radius: float = 0.04
    saddle_offset: float = 0.10
    saddle_zone: float = 0.05
    stable_support: float = 0.36
    collar_inner: float = 0.08
    collar_outer: float = 0.16
    # saddle insertion
    kappa: float = 0.02
    x_inner: float = 1.25
    y_inner: float = 1.25
    x_outer: float = 2.0
    y_outer: float = 4.0
    # annulus perturbation
    perturbation_amplitude: float = 0.02
    perturbation_mode: int = 3
    perturbation_twist: bool = True
    # experiments
    eta: float = 0.05
    trials: int = 1000
    n_back: int = 40
    n_fwd: int = 40
    vertex_budget: int = 100_000
    horizon: int = 40
    grid_resolution: int = 100
    verify_samples: int = 1000
    # rendering
    e_generations: int = 8
    e_indices: int = 12

    # ---------------------------------------------------------------- io
    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
        return cls().with_overrides(values)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), str(path))

    def with_overrides(self, values: dict) -> "RunConfig":
        types = {f.name: type(f.default) for f in fields(self)}
        out = {}
        for key, val in values.items():
            key = key.replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            out[key] = _coerce(key, val, types[key])
        try:
            return dataclasses.replace(self, **out)
        except (TypeError, ValueError) as exc:  # pragma: no cover - replace never validates
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_text(self) -> str:
        return "".join(f"{k} = {_format(v)}\n" for k, v in self.to_dict().items())

    # ------------------------------------------------------------ objects
    def m3_matrix(self) -> np.ndarray:
        try:
            vals = [float(v) for v in self.m3.split(",")]
        except ValueError as exc:
            raise ConfigError(f"m3 must be four comma-separated numbers, got {self.m3!r}") from exc
        if len(vals) != 4:
            raise ConfigError(f"m3 must have four entries, got {len(vals)}")
        return np.array(vals).reshape(2, 2)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.abs_tol, self.rel_tol, self.max_step, self.max_steps)

    def da(self) -> DAConfig:
        return DAConfig(chart_scale=self.chart_scale, blend_profile=self.blend_profile,
                        bump_radius=self.bump_radius, cut_radius=self.cut_radius,
                        saddle_offset=self.saddle_offset, saddle_zone=self.saddle_zone,
                        stable_support=self.stable_support, collar_inner=self.collar_inner,
                        collar_outer=self.collar_outer)

    def insertion(self) -> SaddleInsertion:
        return SaddleInsertion(self.kappa, self.x_inner, self.y_inner, self.x_outer, self.y_outer,
                               self.integrator())

    def perturbation(self) -> PerturbationConfig:
        return PerturbationConfig(self.perturbation_amplitude, self.perturbation_mode,
                                  self.perturbation_twist)

    def surface(self) -> Surface:
        return Surface(self.da(), self.insertion(), self.perturbation())


def _coerce(key, val, typ):
    if not isinstance(val, str):
        if typ is float and isinstance(val, int) and not isinstance(val, bool):
            return float(val)
        if isinstance(val, typ):
            return val
        val = str(val)
    try:
        if typ is bool:
            low = val.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(val)
        if typ is int:
            return int(float(val)) if float(val).is_integer() else int(val)
        return typ(val)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {val!r}") from exc


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)

