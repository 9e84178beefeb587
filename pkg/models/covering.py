# models/covering.py - Alpha-covering data models

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from config import COVERING_MARGIN, DEFAULT_KMAX
from exceptions import ParameterError
from models.grid import GridSpec


@dataclass(frozen=True)
class CoveringParams:
    """Parameters of an alpha-covering; radius_factor None means auto-calibrate."""
    alpha: float
    radius_factor: Optional[float] = None
    kmax: int = DEFAULT_KMAX
    margin: float = COVERING_MARGIN

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError("alpha must lie in [0, 1]", parameter='alpha', value=self.alpha)
        if self.radius_factor is not None and not self.radius_factor > 0:
            raise ParameterError("radius factor A must be positive", parameter='A', value=self.radius_factor)
        if self.kmax < 1:
            raise ParameterError("kmax must be at least 1", parameter='kmax', value=self.kmax)
        if not 0.0 < self.margin <= 1.0:
            raise ParameterError("margin must lie in (0, 1]", parameter='margin', value=self.margin)

    @property
    def is_dyadic(self) -> bool:
        return self.alpha >= 1.0

    def with_radius_factor(self, radius_factor: float) -> 'CoveringParams':
        return CoveringParams(self.alpha, radius_factor, self.kmax, self.margin)


@dataclass(frozen=True)
class FrequencyPatch:
    """
    One member of a frequency covering.

    Alpha patches are axis-aligned cubes centred at xi_k with half-side rho_k.
    Dyadic patches are annular shells inner_radius <= |xi| <= radius
    (the central ball has inner_radius 0).
    """
    index: Tuple[int, ...]
    center: Tuple[float, ...]
    scale: float
    radius: float
    inner_radius: float = 0.0
    shape: str = 'cube'

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    @property
    def lower(self) -> np.ndarray:
        if self.shape == 'cube':
            return self.center_array - self.radius
        return -np.full(self.dim, self.radius)

    @property
    def upper(self) -> np.ndarray:
        if self.shape == 'cube':
            return self.center_array + self.radius
        return np.full(self.dim, self.radius)

    @property
    def measure(self) -> float:
        """Lebesgue measure |Q|."""
        if self.shape == 'cube':
            return (2.0 * self.radius) ** self.dim
        return _ball_volume(self.dim) * (self.radius ** self.dim - self.inner_radius ** self.dim)

    @property
    def eccentricity(self) -> float:
        """Ratio of circumscribed to inscribed ball radius (sqrt(n) for cubes)."""
        if self.shape == 'cube':
            return math.sqrt(self.dim)
        if self.inner_radius == 0.0:
            return 1.0
        # shells: outer radius over half the shell thickness
        return 2.0 * self.radius / (self.radius - self.inner_radius)

    def overlaps(self, other: 'FrequencyPatch') -> bool:
        """Positive-measure intersection test."""
        if self.shape == 'cube' and other.shape == 'cube':
            return bool(np.all(np.maximum(self.lower, other.lower) < np.minimum(self.upper, other.upper)))
        return max(self.inner_radius, other.inner_radius) < min(self.radius, other.radius)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership mask for points of shape (..., n)."""
        if self.shape == 'cube':
            return np.all(np.abs(points - self.center_array) <= self.radius, axis=-1)
        r = np.sqrt((points ** 2).sum(axis=-1))
        return (r >= self.inner_radius) & (r <= self.radius)

    def label(self) -> str:
        return ';'.join(str(int(v)) for v in self.index)

    def to_dict(self) -> Dict:
        return {
            'k': self.label(),
            'xi': ';'.join(repr(float(c)) for c in self.center),
            'a_k': self.scale,
            'rho_k': self.radius,
        }


def _ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


@dataclass
class AdmissibilityReport:
    """Measured constants of an admissible covering."""
    overlap_max: int
    measure_comparability: float
    eccentricity: float
    coverage_deficit: float
    patch_count: int
    radius_factor: Optional[float] = None
    uncovered_node: Optional[Tuple[float, ...]] = None
    min_denominator: Optional[float] = None
    notes: Dict[str, float] = field(default_factory=dict)

    @property
    def covers(self) -> bool:
        return self.coverage_deficit == 0.0

    def to_dict(self) -> Dict:
        return {
            'overlap_max': self.overlap_max,
            'measure_comparability': self.measure_comparability,
            'eccentricity': self.eccentricity,
            'coverage_deficit': self.coverage_deficit,
            'patch_count': self.patch_count,
            'radius_factor': self.radius_factor,
            'uncovered_node': self.uncovered_node,
            'min_denominator': self.min_denominator,
        }


@dataclass(frozen=True)
class Covering:
    """A retained covering together with the grid and resolved parameters it was built for."""
    params: CoveringParams
    grid: GridSpec
    patches: Tuple[FrequencyPatch, ...]

    def __iter__(self):
        return iter(self.patches)

    def __len__(self) -> int:
        return len(self.patches)

    def __getitem__(self, position: int) -> FrequencyPatch:
        return self.patches[position]

    @property
    def kind(self) -> str:
        return 'dyadic' if self.params.is_dyadic else 'alpha'

    @property
    def centers(self) -> np.ndarray:
        return np.array([p.center for p in self.patches], dtype=float).reshape(len(self.patches), self.grid.dim)

    @property
    def radii(self) -> np.ndarray:
        return np.array([p.radius for p in self.patches], dtype=float)

    def position(self, index: Tuple[int, ...]) -> int:
        """Position of the patch with lattice index k."""
        for position, patch in enumerate(self.patches):
            if patch.index == tuple(index):
                return position
        raise ParameterError("index is not in the retained set", parameter='k', value=index)
