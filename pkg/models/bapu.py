# models/bapu.py - Bounded admissible partition of unity models

from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Tuple

import numpy as np

from exceptions import ParameterError
from models.covering import Covering, FrequencyPatch
from models.grid import GridSpec


@dataclass(frozen=True, eq=False)
class Window:
    """One partition window psi_k sampled on the frequency nodes of a grid."""
    patch: FrequencyPatch
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def index(self) -> Tuple[int, ...]:
        return self.patch.index

    @property
    def scale(self) -> float:
        return self.patch.scale


@dataclass(frozen=True, eq=False)
class BapuFamily:
    """
    Sampled partition of unity subordinate to a retained covering.

    `denominator` holds the pre-normalization window sum on the grid and
    `covered` marks the nodes where the windows must sum to one. The
    closed-form `evaluator` gives the same windows off the grid.
    """
    covering: Covering
    windows: Tuple[Window, ...]
    denominator: np.ndarray = field(repr=False)
    covered: np.ndarray = field(repr=False)
    evaluator: Any = field(repr=False, default=None)

    def __iter__(self) -> Iterator[Window]:
        return iter(self.windows)

    def __len__(self) -> int:
        return len(self.windows)

    @property
    def grid(self) -> GridSpec:
        return self.covering.grid

    @property
    def alpha(self) -> float:
        return self.covering.params.alpha

    @property
    def kind(self) -> str:
        return self.covering.kind

    def window(self, index: Tuple[int, ...]) -> Window:
        for window in self.windows:
            if window.index == tuple(index):
                return window
        raise ParameterError("index is not in the retained set", parameter='k', value=index)

    def stack(self) -> np.ndarray:
        """All window values, shape (K, N, ..., N)."""
        return np.stack([w.values for w in self.windows])

    def with_window_zeroed(self, index: Tuple[int, ...]) -> 'BapuFamily':
        """Copy with one window replaced by zero."""
        self.window(index)
        windows = tuple(
            Window(w.patch, np.zeros_like(w.values)) if w.index == tuple(index) else w
            for w in self.windows
        )
        return replace(self, windows=windows)
