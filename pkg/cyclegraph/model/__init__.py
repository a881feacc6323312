"""Graph geometry, potentials and spectral datasets."""

from .dataset import SpectralDataset
from .geometry import GraphGeometry, GridFunction, PotentialSet, nodes_for_length, project_mean_zero
from .io import load_dataset, load_potentials, save_dataset, save_potentials

__all__ = [
    "GraphGeometry",
    "GridFunction",
    "PotentialSet",
    "SpectralDataset",
    "load_dataset",
    "load_potentials",
    "nodes_for_length",
    "project_mean_zero",
    "save_dataset",
    "save_potentials",
]
