# models/grid.py - Periodic grid and sampled-field models

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from config import GRID_DEFAULTS
from exceptions import GridMismatchError, ParameterError
from utils.validators import validate_grid_parameters, validate_grid_shape


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic box [-L, L)^n with N samples per axis."""
    dim: int
    half_width: float
    samples: int

    def __post_init__(self):
        is_valid, error = validate_grid_parameters(self.dim, self.half_width, self.samples)
        if not is_valid:
            raise ParameterError(error, parameter='grid', value=(self.dim, self.half_width, self.samples))

    @classmethod
    def default(cls, dim: int) -> 'GridSpec':
        """Desk-scale default grid for the given dimension."""
        if dim not in GRID_DEFAULTS:
            raise ParameterError("No default grid for this dimension", parameter='dim', value=dim)
        half_width, samples = GRID_DEFAULTS[dim]
        return cls(dim, half_width, samples)

    @property
    def step(self) -> float:
        """Spatial step h = 2L/N."""
        return 2.0 * self.half_width / self.samples

    @property
    def freq_step(self) -> float:
        """Frequency step pi/L."""
        return np.pi / self.half_width

    @property
    def nyquist(self) -> float:
        """Nyquist bound pi/h."""
        return np.pi / self.step

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.samples,) * self.dim

    @property
    def size(self) -> int:
        return self.samples ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.step ** self.dim

    @property
    def freq_cell_volume(self) -> float:
        return self.freq_step ** self.dim

    def axis_nodes(self) -> np.ndarray:
        """Spatial nodes x_j = -L + j*h along one axis."""
        return -self.half_width + self.step * np.arange(self.samples)

    def freq_indices(self) -> np.ndarray:
        """Centered frequency indices m = -N/2 .. N/2-1."""
        return np.arange(-self.samples // 2, self.samples // 2)

    def freq_nodes(self) -> np.ndarray:
        """Frequency nodes xi_m = m*pi/L along one axis."""
        return self.freq_indices() * self.freq_step

    def spatial_points(self) -> np.ndarray:
        """All spatial nodes, shape (N, ..., N, n)."""
        return _mesh(self.axis_nodes(), self.dim)

    def frequency_points(self) -> np.ndarray:
        """All frequency nodes, shape (N, ..., N, n)."""
        return _mesh(self.freq_nodes(), self.dim)

    def frequency_radius(self) -> np.ndarray:
        """Euclidean |xi| at every frequency node."""
        return np.sqrt((self.frequency_points() ** 2).sum(axis=-1))

    def check_values(self, values: np.ndarray) -> None:
        is_valid, error = validate_grid_shape(values.shape, self.dim, self.samples)
        if not is_valid:
            raise GridMismatchError(error, expected=self.shape, actual=values.shape)

    def header(self) -> dict:
        """Structured-text header keys used in field files."""
        return {'dim': self.dim, 'half_width': self.half_width, 'samples': self.samples}


def _mesh(axis: np.ndarray, dim: int) -> np.ndarray:
    grids = np.meshgrid(*([axis] * dim), indexing='ij')
    return np.stack(grids, axis=-1)


@dataclass(frozen=True)
class SampledField:
    """Complex samples of a function on the spatial grid."""
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        self.spec.check_values(values)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, spec: GridSpec) -> 'SampledField':
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    def with_values(self, values: np.ndarray) -> 'SampledField':
        return SampledField(self.spec, values)

    def scaled(self, factor: complex) -> 'SampledField':
        return SampledField(self.spec, factor * self.values)

    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    @cached_property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def __add__(self, other: 'SampledField') -> 'SampledField':
        _same_grid(self.spec, other.spec)
        return SampledField(self.spec, self.values + other.values)

    def __sub__(self, other: 'SampledField') -> 'SampledField':
        _same_grid(self.spec, other.spec)
        return SampledField(self.spec, self.values - other.values)


@dataclass(frozen=True)
class Spectrum:
    """Complex values on the centered frequency nodes of a grid."""
    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        self.spec.check_values(values)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, spec: GridSpec) -> 'Spectrum':
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    def with_values(self, values: np.ndarray) -> 'Spectrum':
        return Spectrum(self.spec, values)

    def node_index(self, m: Tuple[int, ...]) -> Tuple[int, ...]:
        """Array index of the centered frequency index m."""
        half = self.spec.samples // 2
        index = tuple(int(mj) + half for mj in m)
        if len(index) != self.spec.dim or any(i < 0 or i >= self.spec.samples for i in index):
            raise GridMismatchError("Frequency index outside the grid", expected=self.spec.shape, actual=m)
        return index

    def energy(self) -> float:
        """Delta-xi^n * sum |F|^2."""
        return float(self.spec.freq_cell_volume * (np.abs(self.values) ** 2).sum())


def _same_grid(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise GridMismatchError("Fields live on different grids", expected=a, actual=b)
