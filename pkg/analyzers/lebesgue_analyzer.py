# analyzers/lebesgue_analyzer.py - Mixed-norm Lebesgue quasi-norms and maximal operators

import math
from typing import Dict, Optional, Sequence

import numpy as np

from config import DENSE_BLOCK_ELEMENTS, MAXIMAL_EXCLUSION, PEETRE_SUPPORT_LIMIT
from exceptions import GuardError, ParameterError
from models.grid import SampledField
from models.space import MixedExponents
from analyzers.fourier_analyzer import FourierAnalyzer
from utils.logger import get_logger

logger = get_logger(__name__)


def mixed_norm_array(modulus: np.ndarray, step: float, p: Sequence[float]) -> float:
    """
    Iterated Riemann-sum quasi-norm of a nonnegative array.

    Axis 0 carries x_1 and is integrated first; after each stage the next
    coordinate becomes axis 0. p_j = inf is an axis maximum.
    """
    stage = np.asarray(modulus, dtype=float)
    if stage.ndim != len(p):
        raise ParameterError("exponent vector length differs from field dimension", parameter='p', value=tuple(p))
    for pj in p:
        if math.isinf(pj):
            stage = stage.max(axis=0)
        else:
            stage = (step * (stage ** pj).sum(axis=0)) ** (1.0 / pj)
    return float(stage)


def _line_maximal(lines: np.ndarray) -> np.ndarray:
    """
    Exact discrete maximal function along the last axis.

    For every node j: the largest average of the line over node intervals
    [a, b] with a <= j <= b, by enumeration of all O(N^2) intervals.
    """
    n = lines.shape[-1]
    prefix = np.concatenate([np.zeros(lines.shape[:-1] + (1,)), np.cumsum(lines, axis=-1)], axis=-1)
    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    lengths = np.where(b >= a, b - a + 1, 1)
    averages = (prefix[..., None, 1:] - prefix[..., :-1, None]) / lengths
    averages = np.where(b >= a, averages, -np.inf)

    # best[a, j] = max over b >= j of averages[a, b]
    best = np.maximum.accumulate(averages[..., ::-1], axis=-1)[..., ::-1]
    best = np.where(a <= b, best, -np.inf)
    result = best.max(axis=-2)
    # the single-node interval average is the value itself
    return np.maximum(result, lines)


def directional_maximal_array(modulus: np.ndarray, axis: int) -> np.ndarray:
    """Exact maximal function of a nonnegative array along a 0-based axis."""
    moved = np.moveaxis(modulus, axis, -1)
    shape = moved.shape
    lines = moved.reshape(-1, shape[-1])
    rows_per_block = max(1, DENSE_BLOCK_ELEMENTS // (shape[-1] ** 2))
    out = np.empty_like(lines)
    for start in range(0, lines.shape[0], rows_per_block):
        out[start:start + rows_per_block] = _line_maximal(lines[start:start + rows_per_block])
    return np.moveaxis(out.reshape(shape), -1, axis)


class LebesgueAnalyzer:
    """Mixed-norm quasi-norms and directional / iterated maximal operators on sampled fields."""

    @staticmethod
    def mixed_norm(f: SampledField, p: MixedExponents) -> float:
        """
        Mixed-norm quasi-norm, innermost integral over x_1, outermost over x_n.

        Args:
            f: Sampled field
            p: Mixed exponents, one per axis

        Returns:
            ||f||_{L_p} as a nonnegative float
        """
        if p.dim != f.spec.dim:
            raise ParameterError("exponent vector length differs from field dimension", parameter='p', value=p.p)
        return mixed_norm_array(np.abs(f.values), f.spec.step, p.p)

    @staticmethod
    def directional_maximal(f: SampledField, axis: int) -> SampledField:
        """
        Maximal function M_k along axis k (1-based).

        Args:
            f: Sampled field
            axis: Axis k, 1 <= k <= n

        Returns:
            Field of maximal interval averages of |f| along the axis
        """
        if not 1 <= axis <= f.spec.dim:
            raise ParameterError("axis out of range", parameter='axis', value=axis)
        return f.with_values(directional_maximal_array(np.abs(f.values), axis - 1))

    @staticmethod
    def iterated_maximal(f: SampledField, theta: float) -> SampledField:
        """
        Iterated maximal function (M_n(...(M_1 |f|^theta)...))^(1/theta).

        Args:
            f: Sampled field
            theta: Positive exponent

        Returns:
            Field M_theta f
        """
        if not theta > 0:
            raise ParameterError("theta must be positive", parameter='theta', value=theta)
        modulus = np.abs(f.values)
        stage = modulus if theta == 1.0 else modulus ** theta
        for axis in range(f.spec.dim):
            stage = directional_maximal_array(stage, axis)
        if theta != 1.0:
            stage = stage ** (1.0 / theta)
        return f.with_values(stage)

    @staticmethod
    def peetre_check(f: SampledField, R: float, theta: float,
                     center: Optional[Sequence[float]] = None) -> Dict:
        """
        Worst ratio of the Peetre maximal function to M_theta f.

        LHS(x) = max_y |f(y)| / <R(x - y)>^(n/theta) over grid nodes y.

        Args:
            f: Field whose spectrum lies in center + R[-2, 2]^n
            R: Band scale
            theta: Maximal exponent
            center: Spectral center c_f (defaults to the energy centroid)

        Returns:
            Dictionary with ratio, center, support_mass and the parameters
        """
        if not R > 0:
            raise ParameterError("R must be positive", parameter='R', value=R)
        if not theta > 0:
            raise ParameterError("theta must be positive", parameter='theta', value=theta)

        spec = f.spec
        report = {'R': R, 'theta': theta, 'ratio': 0.0, 'center': None, 'support_mass': 0.0}
        if f.sup_norm == 0:
            return report

        F = FourierAnalyzer.forward_transform(f)
        energy = np.abs(F.values) ** 2
        xi = spec.frequency_points()
        if center is None:
            center = (energy[..., None] * xi).reshape(-1, spec.dim).sum(axis=0) / energy.sum()
        center = np.asarray(center, dtype=float)
        inside = np.all(np.abs(xi - center) <= 2.0 * R, axis=-1)
        support_mass = float(energy[~inside].sum() / energy.sum())
        report['center'] = tuple(float(c) for c in center)
        report['support_mass'] = support_mass
        if support_mass > PEETRE_SUPPORT_LIMIT:
            raise GuardError(
                f"spectral mass {support_mass:.3e} outside c_f + R[-2,2]^n",
                guard='peetre_support',
            )

        maximal = LebesgueAnalyzer.iterated_maximal(f, theta).values.real.reshape(-1)
        modulus = np.abs(f.values).reshape(-1)
        points = spec.spatial_points().reshape(-1, spec.dim)
        exponent = spec.dim / theta
        lhs = np.empty(points.shape[0])
        block = max(1, DENSE_BLOCK_ELEMENTS // points.shape[0])
        for start in range(0, points.shape[0], block):
            diff = points[start:start + block, None, :] - points[None, :, :]
            weight = (1.0 + R ** 2 * (diff ** 2).sum(axis=-1)) ** (exponent / 2.0)
            lhs[start:start + block] = (modulus[None, :] / weight).max(axis=1)

        valid = maximal >= MAXIMAL_EXCLUSION
        report['ratio'] = float((lhs[valid] / maximal[valid]).max()) if valid.any() else 0.0
        report['lhs'] = lhs.reshape(spec.shape)
        logger.debug(f"Peetre check R={R} theta={theta}: ratio {report['ratio']:.6g}")
        return report
