"""
Configuration management using Pydantic Settings.

Process-level settings come from environment variables and a .env file.
Run-level settings (geometry, resolutions, tolerances) come from a TOML or
JSON run file validated into a frozen RunConfig.
"""

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

from cyclegraph.errors import ConfigError


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    # Logging
    log_level: str = Field("INFO", description="Root log level for the command line")

    # Sweep worker pool
    workers: int = Field(2, description="Parallel workers for stability sweeps")

    # Output
    output_dir: str = Field("./cyclegraph_out", description="Default output directory")
    default_seed: int = Field(1234, description="Seed used when --seed is not given")

    model_config = {
        "env_prefix": "CYCLEGRAPH_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore",
    }


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class GeometryConfig(_Section):
    """Graph shape: m pendant edges plus the loop."""

    m: int = Field(2, description="Number of pendant edges")
    T: Tuple[float, ...] = Field((1.0, 1.0, 1.0), description="Edge lengths, T[0] is the loop")
    a: float = Field(2.0, description="Vertex coupling parameter")


class GridConfig(_Section):
    nodes_per_unit: int = Field(513, ge=17, description="Grid nodes per unit edge length")
    ode_substeps: int = Field(1, ge=1, description="Integrator steps per grid interval (step halving = 2)")


class ContourConfig(_Section):
    sigma_max: float = Field(60 * math.pi, gt=0, description="Truncation of Re rho on the contour")
    n_nodes: int = Field(4096, ge=64, description="Quadrature nodes on the rho-line")
    tau_margin: float = Field(2.0, gt=0, description="Added to sqrt|lambda_floor| to get tau")
    tau: Optional[float] = Field(None, gt=0, description="Fixed contour height (overrides the floor rule)")


class RieszConfig(_Section):
    alpha: float = Field(1.0, gt=0, description="Imaginary offset of the Riesz nodes")
    n_modes: int = Field(64, ge=4, description="Nodes pi*n + i*alpha for n = -N..N")
    collision_threshold: float = Field(1e-6, gt=0, description="Minimum |E| at the nodes before retrying")
    max_retries: int = Field(4, ge=0, description="alpha += 1/2 retries on collision")


class ScanConfig(_Section):
    step: float = Field(0.02, gt=0, description="Scan step in s = sign(lambda)*sqrt|lambda|")
    refinement_tol: float = Field(1e-11, gt=0, description="Relative bracket width at convergence")
    spectrum_rho_max: float = Field(68 * math.pi, gt=0, description="Upper scan edge in rho")
    remainder_radius: float = Field(60 * math.pi, gt=0, description="Remainder grid covers |rho| <= R")
    remainder_points: int = Field(4001, ge=3, description="Points on the symmetric remainder grid")


class ToleranceConfig(_Section):
    sigma_zero: float = Field(1e-6, gt=0, description="|H| <= tol*(1+|d|) counts as sigma = 0")
    cross_check: float = Field(1e-6, gt=0, description="Allowed defect in d^2 - H^2 = 4 at Dirichlet zeros")
    gl_condition_max: float = Field(1e8, gt=1, description="Largest accepted condition estimate of I + F")
    contour_floor: float = Field(1e-3, gt=0, description="|Delta| >= floor*|rho|^-m on the contour")
    realizability: float = Field(1e-6, gt=0, description="Slack in |d(lambda_n)| >= 2")
    h_zero_min: float = Field(1e-8, gt=0, description="Smallest accepted |h(0)|")


class LoopConfig(_Section):
    n_pairs: int = Field(40, ge=2, description="Eigenvalue / norming pairs fed to the Dirichlet GL equation")
    newton_max_iter: int = Field(50, ge=1, description="Newton steps before bisection fallback")


class FourierTerm(_Section):
    k: int = Field(..., ge=1, description="Mode index, frequency 2*pi*k/T")
    cos: float = Field(0.0, description="Cosine amplitude")
    sin: float = Field(0.0, description="Sine amplitude")


class EdgePotential(_Section):
    edge: int = Field(..., ge=0, description="Edge index, 0 is the loop")
    terms: List[FourierTerm] = Field(default_factory=list)


class PotentialConfig(_Section):
    kind: Literal["zero", "random", "fourier"] = Field("zero", description="How potentials are generated")
    amplitude: float = Field(0.5, ge=0, description="L2 norm per edge for random potentials")
    edges: List[EdgePotential] = Field(default_factory=list, description="Fourier terms per edge")


class RunConfig(_Section):
    """Everything a forward / inverse run needs, with documented defaults."""

    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    contour: ContourConfig = Field(default_factory=ContourConfig)
    riesz: RieszConfig = Field(default_factory=RieszConfig)
    scan: ScanConfig = Field(default_factory=ScanConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    loop: LoopConfig = Field(default_factory=LoopConfig)
    potentials: PotentialConfig = Field(default_factory=PotentialConfig)
    seed: int = Field(1234, description="Seed for random potentials and jitter")
    epsilons: Tuple[float, ...] = Field((1e-3, 3e-3, 1e-2, 3e-2), description="Stability sweep family")
    uniform_pairs: int = Field(0, ge=0, description="Random pairs for the uniform-stability probe")
    uniform_radius: float = Field(1.0, gt=0, description="Ball radius Q for the uniform probe")

    @field_validator("epsilons")
    @classmethod
    def _epsilons_non_negative(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(e < 0 for e in value):
            raise ValueError("epsilons must be non-negative")
        return value

    @model_validator(mode="after")
    def _edges_match_geometry(self) -> "RunConfig":
        for entry in self.potentials.edges:
            if entry.edge > self.geometry.m:
                raise ValueError(f"potential given for edge {entry.edge} but m = {self.geometry.m}")
        return self


def load_run_config(path: Union[str, Path, None]) -> RunConfig:
    """
    Load a run configuration file.

    Args:
        path: TOML (.toml) or JSON file; None gives the defaults

    Returns:
        Validated RunConfig
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read config: {e}") from e

    try:
        if path.suffix.lower() == ".toml":
            raw = tomllib.loads(text)
        else:
            raw = json.loads(text)
        return RunConfig.model_validate(raw)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(str(path), f"not valid {path.suffix or 'json'}: {e}") from e
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ConfigError(field, first["msg"]) from e
