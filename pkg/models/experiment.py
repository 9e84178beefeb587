# models/experiment.py - Test families and experiment reports

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config import COVERING_MARGIN, EXPERIMENT_COLUMNS, MIN_FAMILY_SIZE
from exceptions import ParameterError
from models.grid import GridSpec

# members keep exp(-FAMILY_TAIL_EXPONENT) of their spectral energy beyond the covered ball
FAMILY_TAIL_EXPONENT = 25.0
LAMBDA_RANGE = (1.0, 64.0)
CHIRP_RATES = (0.5, 1.0, 2.0)
MODULATION_FRACTION = 0.7


@dataclass(frozen=True)
class FamilyMember:
    """A closed-form test function with its descriptor."""
    name: str
    kind: str
    params: Tuple[Tuple[str, float], ...]
    generator: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def label(self) -> str:
        return ';'.join(f"{k}={v:.6g}" for k, v in self.params)


def _dilated(lam: float, shift: float) -> Callable:
    def generate(x):
        offset = np.zeros(x.shape[-1])
        offset[0] = shift
        return np.exp(-lam * ((x - offset) ** 2).sum(axis=-1)) + 0j
    return generate


def _modulated(omega: np.ndarray) -> Callable:
    def generate(x):
        return np.exp(1j * (x @ omega)) * np.exp(-(x ** 2).sum(axis=-1))
    return generate


def _chirp(rate: float) -> Callable:
    def generate(x):
        radius2 = (x ** 2).sum(axis=-1)
        return np.exp(1j * rate * radius2) * np.exp(-radius2)
    return generate


@dataclass(frozen=True)
class TestFamily:
    """
    Ordered list of test functions sized to a grid.

    The standard family holds dilated Gaussians, modulated Gaussians and
    chirps. With the spectral guard on, dilation rates and modulation
    frequencies are capped so every member keeps its spectrum inside the
    covered ball.
    """
    __test__ = False

    grid: GridSpec
    members: Tuple[FamilyMember, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def standard(cls, grid: GridSpec, dilations: int = 5, modulations: int = 4,
                 spectral_guard: bool = True) -> 'TestFamily':
        """
        Standard family for a grid.

        Args:
            grid: Grid the members are sampled on
            dilations: Number of dilated Gaussians (log-spaced rates)
            modulations: Number of modulated Gaussians
            spectral_guard: Cap rates and frequencies for the spectral margin

        Returns:
            TestFamily with dilations + modulations + 3 members
        """
        radius = COVERING_MARGIN * grid.nyquist
        lam_low, lam_high = LAMBDA_RANGE
        omega_max = MODULATION_FRACTION * grid.nyquist
        if spectral_guard:
            lam_high = min(lam_high, radius ** 2 / (2.0 * FAMILY_TAIL_EXPONENT))
            omega_max = min(omega_max, radius - math.sqrt(2.0 * FAMILY_TAIL_EXPONENT))
        if lam_high < lam_low or omega_max <= 0:
            raise ParameterError("grid too coarse for the standard family", parameter='grid', value=grid)

        members: List[FamilyMember] = []
        for i, lam in enumerate(np.logspace(math.log10(lam_low), math.log10(lam_high), dilations)):
            shift = 0.1 * i
            members.append(FamilyMember(f"dilated_{i}", 'dilated', (('lambda', float(lam)), ('x0', shift)),
                                        _dilated(float(lam), shift)))
        for i in range(modulations):
            size = omega_max * (i + 1) / modulations
            angle = math.pi * i / (2.0 * max(1, modulations))
            omega = np.zeros(grid.dim)
            omega[0] = size * math.cos(angle)
            if grid.dim > 1:
                omega[1] = size * math.sin(angle)
            members.append(FamilyMember(f"modulated_{i}", 'modulated', (('omega', float(size)), ('angle', angle)),
                                        _modulated(omega)))
        for i, rate in enumerate(CHIRP_RATES):
            members.append(FamilyMember(f"chirp_{i}", 'chirp', (('c', rate),), _chirp(rate)))
        return cls(grid, tuple(members))


@dataclass
class ExperimentReport:
    """Per-member rows plus aggregates, parameters and the verdict of one experiment."""
    experiment: str
    rows: pd.DataFrame
    params: Dict = field(default_factory=dict)
    constants: Dict[str, float] = field(default_factory=dict)
    guards: List[str] = field(default_factory=list)
    asserted: bool = True
    passed: bool = True
    failures: List[str] = field(default_factory=list)
    statistic: Optional[float] = None

    def __post_init__(self):
        ratios = self.rows['ratio'].to_numpy(dtype=float) if 'ratio' in self.rows else np.array([])
        if not np.all(np.isfinite(ratios)):
            raise ParameterError("experiment produced non-finite ratios", parameter='ratio', value=self.experiment)

    @property
    def aggregates(self) -> Dict[str, float]:
        ratios = self.rows['ratio'].to_numpy(dtype=float)
        if ratios.size == 0:
            return {'min': math.nan, 'median': math.nan, 'max': math.nan}
        return {'min': float(ratios.min()), 'median': float(np.median(ratios)), 'max': float(ratios.max())}

    @property
    def member_count(self) -> int:
        return int(self.rows['member'].nunique()) if 'member' in self.rows else 0

    def table(self) -> pd.DataFrame:
        """Rows with the fixed experiment columns first."""
        extra = [c for c in self.rows.columns if c not in EXPERIMENT_COLUMNS]
        return self.rows[[c for c in EXPERIMENT_COLUMNS if c in self.rows.columns] + extra]

    def summary(self) -> Dict:
        return {
            'experiment': self.experiment,
            'members': self.member_count,
            'aggregates': self.aggregates,
            'statistic': self.statistic,
            'params': self.params,
            'constants': self.constants,
            'guards': self.guards,
            'asserted': self.asserted,
            'passed': self.passed,
            'failures': self.failures,
        }

    @property
    def meets_family_size(self) -> bool:
        return self.member_count >= MIN_FAMILY_SIZE
