# models/symbol.py - Symbol data models

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from exceptions import ParameterError

MultiIndex = Tuple[int, ...]
Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
# derivative(x, xi, alpha, beta) -> d^alpha_xi d^beta_x sigma, or None when not available
Derivative = Callable[[np.ndarray, np.ndarray, MultiIndex, MultiIndex], Optional[np.ndarray]]
Amplitude = Callable[[np.ndarray], np.ndarray]

SYMBOL_KINDS = ('multiplier', 'separable', 'general')


@dataclass(frozen=True)
class SymbolSpec:
    """
    An evaluable symbol sigma(x, xi) with declared order b and type rho.

    Evaluators take x and xi arrays of shape (..., n) that broadcast against
    each other and return complex values of the broadcast shape.
    Separable symbols additionally carry their terms (a_r, m_r).
    """
    name: str
    order: float
    rho: float
    kind: str
    evaluator: Evaluator = field(repr=False)
    derivative: Optional[Derivative] = field(default=None, repr=False)
    terms: Tuple[Tuple[Amplitude, 'SymbolSpec'], ...] = field(default=(), repr=False)
    params: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS:
            raise ParameterError(f"kind must be one of {SYMBOL_KINDS}", parameter='kind', value=self.kind)
        if not 0.0 < self.rho <= 1.0:
            raise ParameterError("rho must lie in (0, 1]", parameter='rho', value=self.rho)
        if self.kind == 'separable' and not self.terms:
            raise ParameterError("separable symbols need at least one term", parameter='terms', value=0)

    def __call__(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
        return np.broadcast_to(np.asarray(self.evaluator(x, xi), dtype=complex), shape)

    def multiplier_values(self, xi: np.ndarray) -> np.ndarray:
        """Values m(xi) of an x-independent symbol."""
        xi = np.asarray(xi, dtype=float)
        return self(np.zeros(xi.shape[-1]), xi)

    @property
    def is_x_independent(self) -> bool:
        return self.kind == 'multiplier'

    def analytic_derivative(self, x, xi, alpha: MultiIndex, beta: MultiIndex) -> Optional[np.ndarray]:
        if self.derivative is None:
            return None
        return self.derivative(np.asarray(x, dtype=float), np.asarray(xi, dtype=float), alpha, beta)

    def with_declared(self, order: Optional[float] = None, rho: Optional[float] = None) -> 'SymbolSpec':
        """Same evaluator with a different declared (b, rho)."""
        return SymbolSpec(
            name=self.name,
            order=self.order if order is None else order,
            rho=self.rho if rho is None else rho,
            kind=self.kind,
            evaluator=self.evaluator,
            derivative=self.derivative,
            terms=self.terms,
            params=self.params,
        )

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ','.join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.name}({inner})"


@dataclass
class SeminormEstimate:
    """Estimated seminorm |sigma|^{(b)}_{N,M} with its argmax location."""
    N: int
    M: int
    value: float
    x_star: Tuple[float, ...]
    xi_star: Tuple[float, ...]
    alpha_star: MultiIndex
    beta_star: MultiIndex
    radius_max: float
    per_order: Dict[Tuple[MultiIndex, MultiIndex], float] = field(default_factory=dict)

    def to_rows(self):
        return [
            {'alpha_order': ';'.join(map(str, a)), 'beta_order': ';'.join(map(str, b)), 'constant': value}
            for (a, b), value in sorted(self.per_order.items())
        ]


@dataclass(frozen=True)
class HypoellipticSpec:
    """Parameters (b, b0, c, a) of the hypoelliptic class HS^{b,b0}_rho."""
    b: float
    b0: float
    cutoff: float = 1.0
    lower: float = 0.0

    def __post_init__(self):
        if self.b0 > self.b:
            raise ParameterError("b0 must not exceed b", parameter='b0', value=self.b0)
        if not self.cutoff > 0:
            raise ParameterError("cutoff c must be positive", parameter='c', value=self.cutoff)
