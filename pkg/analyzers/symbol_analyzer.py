# analyzers/symbol_analyzer.py - Seminorm estimation, hypoellipticity and composition of symbols

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from config import (
    FD_RELATIVE_STEP, SEMINORM_DIRECTIONS, SEMINORM_MAX_DEPTH, SEMINORM_RADII, SEMINORM_RANGE_FACTOR,
    SEMINORM_STABILITY, SEMINORM_X_SAMPLES,
)
from exceptions import CheckFailure, NonFiniteError, ParameterError
from models.grid import GridSpec
from models.symbol import HypoellipticSpec, MultiIndex, SeminormEstimate, SymbolSpec
from analyzers.bump_functions import japanese_bracket
from analyzers.finite_differences import multi_indices, partial_derivative
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SymbolLattice:
    """Fixed sample lattice: x samples crossed with radii along fixed directions."""
    x_points: np.ndarray
    directions: np.ndarray
    radii: np.ndarray

    @property
    def xi_points(self) -> np.ndarray:
        return (self.radii[:, None, None] * self.directions[None, :, :]).reshape(-1, self.directions.shape[1])

    @property
    def radius_max(self) -> float:
        return float(self.radii.max())


def _directions(dim: int) -> np.ndarray:
    count = SEMINORM_DIRECTIONS[dim]
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    # the 26 normalized neighbours of the origin in Z^3
    steps = np.array([(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1) if (a, b, c) != (0, 0, 0)],
                     dtype=float)
    return steps / np.linalg.norm(steps, axis=1, keepdims=True)


def _symbol_derivative(sigma: SymbolSpec, x: np.ndarray, xi: np.ndarray,
                       alpha: MultiIndex, beta: MultiIndex) -> np.ndarray:
    """d^alpha_xi d^beta_x sigma at paired rows of x and xi; analytic when available."""
    exact = sigma.analytic_derivative(x, xi, alpha, beta)
    if exact is not None:
        return np.asarray(exact, dtype=complex).reshape(-1)
    if sigma.is_x_independent and any(beta):
        return np.zeros(x.shape[0], dtype=complex)
    dim = x.shape[1]
    points = np.concatenate([x, xi], axis=1)
    steps = np.concatenate([
        np.full(x.shape, FD_RELATIVE_STEP),
        np.repeat((FD_RELATIVE_STEP * japanese_bracket(xi) ** sigma.rho)[:, None], dim, axis=1),
    ], axis=1)

    def evaluate(z):
        return sigma(z[..., :dim], z[..., dim:])

    return partial_derivative(evaluate, points, tuple(beta) + tuple(alpha), steps)


class SymbolAnalyzer:
    """Finite-lattice estimates of symbol-class seminorms and the leading composition symbol."""

    @staticmethod
    def lattice(grid: GridSpec, radius_max: Optional[float] = None, radius_min: float = 1.0,
                x_independent: bool = False) -> SymbolLattice:
        """
        Lattice with 1 <= |xi| <= radius_max (default 10 * Omega).

        Args:
            grid: Grid giving the x box and the Nyquist bound
            radius_max: Largest |xi| sampled
            radius_min: Smallest |xi| sampled
            x_independent: Use the single x sample 0

        Returns:
            SymbolLattice
        """
        radius_max = SEMINORM_RANGE_FACTOR * grid.nyquist if radius_max is None else radius_max
        if not radius_max > radius_min > 0:
            raise ParameterError("lattice needs 0 < radius_min < radius_max", parameter='radius_max', value=radius_max)
        if x_independent:
            x_points = np.zeros((1, grid.dim))
        else:
            axis = np.linspace(-grid.half_width, grid.half_width, SEMINORM_X_SAMPLES)
            x_points = np.stack(np.meshgrid(*([axis] * grid.dim), indexing='ij'), axis=-1).reshape(-1, grid.dim)
        radii = np.logspace(math.log10(radius_min), math.log10(radius_max), SEMINORM_RADII)
        return SymbolLattice(x_points, _directions(grid.dim), radii)

    @staticmethod
    def _pairs(lattice: SymbolLattice):
        xi = lattice.xi_points
        x = np.repeat(lattice.x_points, xi.shape[0], axis=0)
        return x, np.tile(xi, (lattice.x_points.shape[0], 1))

    @staticmethod
    def derivative_table(sigma: SymbolSpec, N: int, M: int, lattice: SymbolLattice) -> Dict:
        """All derivatives d^alpha_xi d^beta_x sigma with |alpha| <= N, |beta| <= M on the lattice."""
        if N < 0 or M < 0 or N + M > SEMINORM_MAX_DEPTH:
            raise ParameterError(f"derivative depth N + M must lie in 0..{SEMINORM_MAX_DEPTH}",
                                 parameter='N+M', value=N + M)
        dim = lattice.directions.shape[1]
        x, xi = SymbolAnalyzer._pairs(lattice)
        table = {}
        for alpha in multi_indices(dim, N):
            for beta in multi_indices(dim, M):
                values = _symbol_derivative(sigma, x, xi, alpha, beta)
                if not np.all(np.isfinite(values)):
                    raise NonFiniteError(f"derivative alpha={alpha} beta={beta} of {sigma.label()}",
                                         operation='seminorm_estimate')
                table[(alpha, beta)] = values
        return {'x': x, 'xi': xi, 'table': table}

    @staticmethod
    def seminorm_estimate(sigma: SymbolSpec, N: int, M: int, grid: GridSpec,
                          radius_max: Optional[float] = None, radius_min: float = 1.0) -> SeminormEstimate:
        """
        |sigma|^{(b)}_{N,M} = max sup <xi>^{rho |alpha| - b} |d^alpha_xi d^beta_x sigma| over the lattice.

        Args:
            sigma: Symbol with declared (b, rho)
            N: Largest |alpha|
            M: Largest |beta|
            grid: Grid giving the x box and the default lattice range
            radius_max: Largest sampled |xi| (default 10 * Omega)
            radius_min: Smallest sampled |xi|

        Returns:
            SeminormEstimate with the argmax location
        """
        lattice = SymbolAnalyzer.lattice(grid, radius_max, radius_min, x_independent=sigma.is_x_independent)
        data = SymbolAnalyzer.derivative_table(sigma, N, M, lattice)
        bracket = japanese_bracket(data['xi'])
        best = (-1.0, None, None, 0)
        per_order = {}
        for (alpha, beta), values in data['table'].items():
            weighted = bracket ** (sigma.rho * sum(alpha) - sigma.order) * np.abs(values)
            position = int(np.argmax(weighted))
            per_order[(alpha, beta)] = float(weighted[position])
            if weighted[position] > best[0]:
                best = (float(weighted[position]), alpha, beta, position)

        value, alpha, beta, position = best
        estimate = SeminormEstimate(
            N=N,
            M=M,
            value=value,
            x_star=tuple(float(v) for v in data['x'][position]),
            xi_star=tuple(float(v) for v in data['xi'][position]),
            alpha_star=alpha,
            beta_star=beta,
            radius_max=lattice.radius_max,
            per_order=per_order,
        )
        logger.debug(f"seminorm {sigma.label()} N={N} M={M}: {value:.6g} at xi={estimate.xi_star}")
        return estimate

    @staticmethod
    def range_stability(sigma: SymbolSpec, N: int, M: int, grid: GridSpec) -> Dict:
        """
        Compare the estimate at radius 10 * Omega with radius 100 * Omega.

        The far estimate keeps every near lattice point and adds a lattice on
        10 * Omega <= |xi| <= 100 * Omega, so it only changes through the new range.

        Returns:
            Dictionary with both values, their relative change and the stable flag
        """
        near = SymbolAnalyzer.seminorm_estimate(sigma, N, M, grid)
        extension = SymbolAnalyzer.seminorm_estimate(sigma, N, M, grid, near.radius_max * SEMINORM_RANGE_FACTOR,
                                                     radius_min=near.radius_max)
        far = extension if extension.value > near.value else near
        change = abs(far.value - near.value) / near.value if near.value > 0 else (0.0 if far.value == 0 else math.inf)
        stable = change <= SEMINORM_STABILITY
        if not stable:
            logger.warning(f"{sigma.label()} seminorm grows with the lattice range ({change:.3g}); "
                           f"declared order or type may be wrong")
        return {'near': near.value, 'far': far.value, 'change': change, 'stable': stable,
                'near_estimate': near, 'far_estimate': far}

    @staticmethod
    def _hypoelliptic_constants(sigma: SymbolSpec, spec: HypoellipticSpec, N: int, M: int, grid: GridSpec,
                                radius_max: float, radius_min: Optional[float] = None) -> Dict:
        if radius_min is None:
            radius_min = max(math.sqrt(max(spec.cutoff ** 2 - 1.0, 0.0)), 1.0)
        lattice = SymbolAnalyzer.lattice(grid, radius_max, radius_min, x_independent=sigma.is_x_independent)
        data = SymbolAnalyzer.derivative_table(sigma, N, M, lattice)
        bracket = japanese_bracket(data['xi'])
        modulus = np.abs(data['table'][((0,) * grid.dim, (0,) * grid.dim)])
        if np.any(modulus == 0.0):
            position = int(np.argmin(modulus))
            raise CheckFailure(f"|sigma| vanishes at xi={tuple(data['xi'][position])}", check='hypoelliptic_lower_bound')
        constants = {}
        for (alpha, beta), values in data['table'].items():
            if not any(alpha) and not any(beta):
                continue
            weighted = bracket ** (sigma.rho * sum(alpha)) * np.abs(values) / modulus
            constants[(alpha, beta)] = float(weighted.max())
        return {
            'lower': float((modulus / bracket ** spec.b0).min()),
            'upper': float((modulus / bracket ** spec.b).max()),
            'constants': constants,
        }

    @staticmethod
    def hypoelliptic_check(sigma: SymbolSpec, spec: HypoellipticSpec, N: int, M: int,
                           grid: GridSpec, radius_max: Optional[float] = None) -> Dict:
        """
        Estimate the hypoelliptic constants on <xi> >= c.

        a_est = min |sigma| / <xi>^{b0}; C_{alpha,beta} = sup |d sigma| <xi>^{rho |alpha|} / |sigma|.
        Constants are compared with those over the near lattice extended to a
        tenfold larger range.

        Returns:
            Dictionary with a_est, upper_est, the constants, stability and the pass flag
        """
        radius_max = SEMINORM_RANGE_FACTOR * grid.nyquist if radius_max is None else radius_max
        near = SymbolAnalyzer._hypoelliptic_constants(sigma, spec, N, M, grid, radius_max)
        extension = SymbolAnalyzer._hypoelliptic_constants(sigma, spec, N, M, grid, radius_max * SEMINORM_RANGE_FACTOR,
                                                           radius_min=radius_max)
        far = {key: max(value, extension['constants'][key]) for key, value in near['constants'].items()}
        changes = {}
        for key, value in near['constants'].items():
            other = far[key]
            changes[key] = abs(other - value) / value if value > 0 else (0.0 if other == 0 else math.inf)
        stable = all(v <= SEMINORM_STABILITY for v in changes.values())
        passes = near['lower'] > 0 and near['lower'] >= spec.lower and stable
        logger.info(f"hypoelliptic check {sigma.label()}: a_est={near['lower']:.4g} stable={stable}")
        return {
            'a_est': near['lower'],
            'upper_est': near['upper'],
            'constants': near['constants'],
            'constants_far': far,
            'changes': changes,
            'stable': stable,
            'passes': passes,
        }

    @staticmethod
    def composition_leading(sigma1: SymbolSpec, sigma2: SymbolSpec, N: int) -> SymbolSpec:
        """
        sum_{|alpha| < N} (-i)^{|alpha|} / alpha! d^alpha_xi sigma1 d^alpha_x sigma2.

        Args:
            sigma1: Left symbol
            sigma2: Right symbol
            N: Number of expansion orders kept (N >= 1)

        Returns:
            Symbol of order b1 + b2 and type min(rho1, rho2); general kind unless
            both factors are x-independent
        """
        if N < 1:
            raise ParameterError("N must be at least 1", parameter='N', value=N)
        if N - 1 > SEMINORM_MAX_DEPTH:
            raise ParameterError("derivatives beyond the supported depth", parameter='N', value=N)

        def evaluate(x, xi):
            x = np.asarray(x, dtype=float)
            xi = np.asarray(xi, dtype=float)
            shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
            dim = x.shape[-1]
            xb = np.broadcast_to(x, shape + (dim,)).reshape(-1, dim)
            xib = np.broadcast_to(xi, shape + (dim,)).reshape(-1, dim)
            total = np.zeros(xb.shape[0], dtype=complex)
            zero = (0,) * dim
            for alpha in multi_indices(dim, N - 1):
                if any(alpha) and sigma2.is_x_independent:
                    continue
                factor = (-1j) ** sum(alpha) / math.prod(math.factorial(a) for a in alpha)
                left = _symbol_derivative(sigma1, xb, xib, alpha, zero)
                right = _symbol_derivative(sigma2, xb, xib, zero, alpha)
                total += factor * left * right
            return total.reshape(shape)

        kind = 'multiplier' if sigma1.is_x_independent and sigma2.is_x_independent else 'general'
        return SymbolSpec(
            name=f"compose[{sigma1.label()},{sigma2.label()}]",
            order=sigma1.order + sigma2.order,
            rho=min(sigma1.rho, sigma2.rho),
            kind=kind,
            evaluator=evaluate,
            params=(('N', N),),
        )