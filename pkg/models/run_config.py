# models/run_config.py - Parsed run configuration

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from config import COVERING_MARGIN, DEFAULT_JOBS, DEFAULT_KMAX
from models.covering import CoveringParams
from models.grid import GridSpec
from models.space import MixedExponents, SpaceParams

EXPERIMENTS = ('lifting', 'boundedness', 'maximal', 'composition', 'hypoelliptic')
FORMATS = ('csv', 'json')
SWEEP_KEYS = ('alpha', 's', 'p', 'q', 'b', 'rho')


@dataclass(frozen=True)
class CoveringSettings:
    radius_factor: Optional[float] = None
    kmax: int = DEFAULT_KMAX
    margin: float = COVERING_MARGIN


@dataclass(frozen=True)
class SymbolSettings:
    name: str = 'identity'
    params: Tuple[Tuple[str, float], ...] = ()

    def as_dict(self) -> Dict[str, float]:
        return dict(self.params)


@dataclass(frozen=True)
class ExperimentSettings:
    name: Optional[str] = None
    b: float = 0.0
    thetas: Tuple[float, ...] = (0.5, 1.0)
    p_grid: Tuple[MixedExponents, ...] = ()
    members: int = 12
    sweep: Tuple[Tuple[str, tuple], ...] = ()

    def sweep_lists(self) -> Dict[str, tuple]:
        return dict(self.sweep)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = 'output'
    fmt: str = 'csv'
    jobs: int = DEFAULT_JOBS


@dataclass(frozen=True)
class SweepPoint:
    """One point of a parameter sweep."""
    space: SpaceParams
    b: float
    rho: Optional[float]

    def label(self) -> Dict:
        return {
            'alpha': self.space.alpha,
            's': self.space.s,
            'p': self.space.p.label(),
            'q': self.space.q,
            'b': self.b,
            'rho': self.rho,
        }


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, validated before any computation."""
    grid: GridSpec
    space: SpaceParams
    covering: CoveringSettings = field(default_factory=CoveringSettings)
    symbol: SymbolSettings = field(default_factory=SymbolSettings)
    experiment: ExperimentSettings = field(default_factory=ExperimentSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @property
    def covering_params(self) -> CoveringParams:
        c = self.covering
        return CoveringParams(self.space.alpha, c.radius_factor, c.kmax, c.margin)

    def covering_params_for(self, space: SpaceParams) -> CoveringParams:
        c = self.covering
        return CoveringParams(space.alpha, c.radius_factor, c.kmax, c.margin)

    def sweep_size(self) -> int:
        size = 1
        for values in self.experiment.sweep_lists().values():
            size *= max(1, len(values))
        return size

    def sweep_points(self) -> List[SweepPoint]:
        """Cartesian product of the sweep lists in fixed key order; empty lists keep the base value."""
        lists = self.experiment.sweep_lists()
        base = {
            'alpha': (self.space.alpha,),
            's': (self.space.s,),
            'p': (self.space.p,),
            'q': (self.space.q,),
            'b': (self.experiment.b,),
            'rho': (None,),
        }
        axes = [tuple(lists.get(key) or base[key]) for key in SWEEP_KEYS]
        points = []
        for alpha, s, p, q, b, rho in itertools.product(*axes):
            points.append(SweepPoint(SpaceParams(alpha, s, p, q), b, rho))
        return points
