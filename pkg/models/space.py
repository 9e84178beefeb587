# models/space.py - Exponent and space parameter models

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from exceptions import ParameterError
from utils.validators import validate_exponents


@dataclass(frozen=True)
class MixedExponents:
    """Mixed Lebesgue exponents (p_1, ..., p_n), each in (0, inf]."""
    p: Tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        is_valid, error = validate_exponents(p)
        if not is_valid:
            raise ParameterError(error, parameter='p', value=p)
        object.__setattr__(self, 'p', p)

    @classmethod
    def uniform(cls, value: float, dim: int) -> 'MixedExponents':
        return cls((value,) * dim)

    @property
    def dim(self) -> int:
        return len(self.p)

    @property
    def tilde(self) -> 'MixedExponents':
        """Running minimum p~_j = min{1, p_1, ..., p_j}."""
        running = 1.0
        values = []
        for pj in self.p:
            running = min(running, pj)
            values.append(running)
        return MixedExponents(tuple(values))

    def r(self, q: float) -> float:
        """r = min{1, q, p_1, ..., p_n}."""
        return min(1.0, q, *self.p)

    @property
    def all_finite(self) -> bool:
        return all(math.isfinite(pj) for pj in self.p)

    def label(self) -> str:
        return '(' + ','.join(_fmt(pj) for pj in self.p) + ')'


@dataclass(frozen=True)
class SpaceParams:
    """Parameters (alpha, s, p, q) naming a space M^{s,alpha}_{p,q}."""
    alpha: float
    s: float
    p: MixedExponents
    q: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError("alpha must lie in [0, 1]", parameter='alpha', value=self.alpha)
        if math.isnan(self.q) or self.q <= 0:
            raise ParameterError("q must lie in (0, inf]", parameter='q', value=self.q)
        if not math.isfinite(self.s):
            raise ParameterError("s must be finite", parameter='s', value=self.s)

    def with_s(self, s: float) -> 'SpaceParams':
        return SpaceParams(self.alpha, s, self.p, self.q)

    def with_q(self, q: float) -> 'SpaceParams':
        return SpaceParams(self.alpha, self.s, self.p, q)

    def with_alpha(self, alpha: float) -> 'SpaceParams':
        return SpaceParams(alpha, self.s, self.p, self.q)

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.q)

    def label(self, s: Optional[float] = None) -> str:
        s = self.s if s is None else s
        return f"M^{{{_fmt(s)},{_fmt(self.alpha)}}}_{{{self.p.label()},{_fmt(self.q)}}}"


def _fmt(value: float) -> str:
    if math.isinf(value):
        return 'inf'
    return f"{value:g}"
