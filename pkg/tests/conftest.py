"""Shared fixtures: reduced-resolution configurations and small potential sets."""

import math

import numpy as np
import pytest

from cyclegraph.config import ContourConfig, GridConfig, LoopConfig, RieszConfig, RunConfig, ScanConfig
from cyclegraph.harness.selftest import selftest_config
from cyclegraph.model import GraphGeometry, GridFunction, PotentialSet, nodes_for_length, project_mean_zero


@pytest.fixture
def small_config() -> RunConfig:
    """Reduced grids and spectra; a zero-potential round trip takes seconds."""
    return selftest_config()


@pytest.fixture
def medium_config() -> RunConfig:
    return RunConfig(
        grid=GridConfig(nodes_per_unit=257),
        contour=ContourConfig(sigma_max=40 * math.pi, n_nodes=2048),
        riesz=RieszConfig(n_modes=32),
        scan=ScanConfig(spectrum_rho_max=44 * math.pi, remainder_radius=40 * math.pi, remainder_points=801),
        loop=LoopConfig(n_pairs=24),
    )


@pytest.fixture
def geometry() -> GraphGeometry:
    return GraphGeometry(m=2, T=(1.0, 1.0, 1.0), a=2.0)


@pytest.fixture
def zero_potentials(geometry, small_config) -> PotentialSet:
    return PotentialSet.zeros(geometry, small_config.grid.nodes_per_unit)


def smooth_edge(length: float, n_nodes: int, c1: float, s2: float) -> GridFunction:
    x = np.linspace(0.0, length, n_nodes)
    values = c1 * np.cos(2 * np.pi * x / length) + s2 * np.sin(4 * np.pi * x / length)
    return project_mean_zero(GridFunction(length, values))


@pytest.fixture
def smooth_potentials(geometry, small_config) -> PotentialSet:
    npu = small_config.grid.nodes_per_unit
    coeffs = [(0.3, 0.1), (0.4, -0.2), (-0.25, 0.15)]
    return PotentialSet(geometry, tuple(
        smooth_edge(t, nodes_for_length(t, npu), c1, s2) for t, (c1, s2) in zip(geometry.T, coeffs)
    ))
