# analyzers/bapu_analyzer.py - Partition-of-unity construction and its quantitative checks

import math
from typing import Dict, Sequence, Tuple

import numpy as np
import pandas as pd

from config import (
    DENOMINATOR_FLOOR, DILATED_GRID, DILATED_SUPPORT_FILL, FD_RELATIVE_STEP, KERNEL_GRID_SCALE,
    KERNEL_TAIL_LIMIT, UNIFORMITY_FACTOR, WINDOW_SAMPLES_PER_AXIS,
)
from exceptions import CoverageError, GuardError, ParameterError
from models.bapu import BapuFamily, Window
from models.covering import Covering
from models.grid import GridSpec, Spectrum
from models.space import MixedExponents
from analyzers.bump_functions import bump_at, japanese_bracket, smooth_step
from analyzers.covering_analyzer import CoveringAnalyzer, window_denominator
from analyzers.finite_differences import multi_indices, partial_derivative
from analyzers.fourier_analyzer import FourierAnalyzer
from analyzers.lebesgue_analyzer import mixed_norm_array
from utils.logger import get_logger

logger = get_logger(__name__)


class AlphaPartition:
    """
    Closed-form windows psi_k = phi_k / sum_j phi_j with the sum over the full lattice.

    Every lattice window whose support reaches a retained patch enters the
    denominator, so retained windows stay smooth up to the edge of the
    covered ball.
    """

    def __init__(self, covering: Covering):
        params = covering.params
        self.alpha = params.alpha
        self.radius_factor = params.radius_factor
        self.dim = covering.grid.dim
        reach = float(max(np.linalg.norm(p.center_array) + p.radius for p in covering))
        kmax = int(math.ceil(reach + self.radius_factor * (1.0 + 2.0 * reach) ** self.alpha)) + 1
        indices, centers = CoveringAnalyzer.centers(self.alpha, kmax, self.dim)
        radii = self.radius_factor * japanese_bracket(centers) ** self.alpha
        keep = np.sqrt((centers ** 2).sum(axis=-1)) - radii <= reach
        self.centers = centers[keep]
        self.radii = radii[keep]
        self.rows = {tuple(int(v) for v in k): row for row, k in enumerate(indices[keep])}
        logger.debug(f"closed-form partition over {len(self.rows)} lattice windows (reach {reach:.4g})")

    def denominator(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        low, high = points.min(axis=0), points.max(axis=0)
        near = np.all((self.centers + self.radii[:, None] > low) & (self.centers - self.radii[:, None] < high), axis=1)
        if not near.any():
            return np.zeros(points.shape[0])
        return window_denominator(points, self.centers[near], self.radii[near])

    def window(self, index: Tuple[int, ...], points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, self.dim)
        row = self.rows[tuple(index)]
        raw = bump_at(flat, self.centers[row], self.radii[row])
        out = np.zeros(flat.shape[0])
        support = raw > 0
        if support.any():
            out[support] = raw[support] / self.denominator(flat[support])
        return out.reshape(points.shape[:-1])


class DyadicPartition:
    """Telescoping Littlewood-Paley windows phi0(2^-j xi) - phi0(2^(1-j) xi)."""

    def __init__(self, covering: Covering):
        self.dim = covering.grid.dim
        self.top = max(p.index[0] for p in covering)

    def denominator(self, points: np.ndarray) -> np.ndarray:
        return np.ones(np.asarray(points).reshape(-1, self.dim).shape[0])

    def window(self, index: Tuple[int, ...], points: np.ndarray) -> np.ndarray:
        j = int(index[0])
        radius = np.sqrt((np.asarray(points, dtype=float) ** 2).sum(axis=-1))
        if j == 0:
            return smooth_step(radius)
        return np.maximum(smooth_step(radius / 2.0 ** j) - smooth_step(radius / 2.0 ** (j - 1)), 0.0)


def _box_samples(center: np.ndarray, half_side: float, per_axis: int) -> np.ndarray:
    offsets = np.linspace(-1.0, 1.0, per_axis)
    mesh = np.stack(np.meshgrid(*([offsets] * center.size), indexing='ij'), axis=-1).reshape(-1, center.size)
    return center + half_side * mesh


def _uniformity(rows: pd.DataFrame, group: str) -> Dict[str, float]:
    """max/median and median/min of the per-window constants within each group."""
    spread = {}
    for key, frame in rows.groupby(group):
        values = frame['constant'].to_numpy()
        median = float(np.median(values))
        if median <= 0.0:
            spread[str(key)] = 1.0 if values.max() == 0.0 else math.inf
            continue
        low = values.min()
        spread[str(key)] = float(max(values.max() / median, median / low if low > 0 else math.inf))
    return spread


class BapuAnalyzer:
    """Bounded admissible partitions of unity and the checks of their quantitative properties."""

    @staticmethod
    def build_bapu(covering: Covering) -> BapuFamily:
        """
        Sample the partition of unity for a retained covering.

        Alpha windows are phi_k = g(|xi - xi_k| / rho_k) normalized by their
        sum over the retained set; dyadic windows are telescoping steps.

        Args:
            covering: Retained covering with a resolved radius factor

        Returns:
            BapuFamily on the covering's grid
        """
        grid = covering.grid
        nodes = grid.frequency_points()
        radius = grid.frequency_radius()
        covered = radius <= covering.params.margin * grid.nyquist

        if covering.kind == 'dyadic':
            evaluator = DyadicPartition(covering)
            raw = np.stack([evaluator.window(p.index, nodes) for p in covering])
        else:
            evaluator = AlphaPartition(covering)
            raw = np.stack([bump_at(nodes, p.center_array, p.radius) for p in covering])

        denominator = raw.sum(axis=0)
        floor = float(denominator[covered].min())
        if floor < DENOMINATOR_FLOOR:
            flat = np.where(covered, denominator, np.inf)
            worst = np.unravel_index(int(np.argmin(flat)), grid.shape)
            node = tuple(float(v) for v in nodes[worst])
            raise CoverageError(f"window denominator {floor:.4g} below {DENOMINATOR_FLOOR}", node=node, value=floor)

        safe = np.where(denominator > 0, denominator, 1.0)
        values = np.where(denominator > 0, raw / safe, 0.0)
        windows = tuple(Window(patch, w) for patch, w in zip(covering, values))
        logger.info(f"built {covering.kind} partition with {len(windows)} windows, denominator floor {floor:.4g}")
        return BapuFamily(covering, windows, denominator, covered, evaluator)

    @staticmethod
    def partition_sum(bapu: BapuFamily) -> float:
        """max |sum_k psi_k - 1| over the covered nodes."""
        total = bapu.stack().sum(axis=0)
        return float(np.abs(total - 1.0)[bapu.covered].max())

    @staticmethod
    def _trusted(bapu: BapuFamily, points: np.ndarray) -> np.ndarray:
        return bapu.evaluator.denominator(points) >= DENOMINATOR_FLOOR / 10.0

    @staticmethod
    def derivative_bound_check(bapu: BapuFamily, max_order: int = 2) -> Dict:
        """
        Estimate C_{k,beta} = sup <xi>^{|beta| alpha} |d^beta psi_k| per window.

        Args:
            bapu: Partition family
            max_order: Largest |beta|

        Returns:
            Dictionary with the per-window rows and the max/median spread per order
        """
        dim = bapu.grid.dim
        alpha = min(bapu.alpha, 1.0)
        per_axis = WINDOW_SAMPLES_PER_AXIS[dim]
        rows = []
        for window in bapu:
            patch = window.patch
            center = patch.center_array if patch.shape == 'cube' else np.zeros(dim)
            points = _box_samples(center, patch.radius, per_axis)
            points = points[BapuAnalyzer._trusted(bapu, points)]
            if points.size == 0:
                continue
            weight = japanese_bracket(points)
            step = FD_RELATIVE_STEP * (patch.radius if patch.shape == 'cube' else max(patch.radius / 4.0, 1.0))
            evaluate = (lambda pts, index=window.index: bapu.evaluator.window(index, pts))
            for beta in multi_indices(dim, max_order):
                derivative = partial_derivative(evaluate, points, beta, step)
                order = sum(beta)
                rows.append({
                    'k': patch.label(),
                    'beta': ';'.join(map(str, beta)),
                    'order': order,
                    'constant': float(np.max(weight ** (order * alpha) * np.abs(derivative))),
                })
        frame = pd.DataFrame(rows)
        spread = _uniformity(frame[frame['order'] > 0], 'order') if len(frame) else {}
        uniform = all(v <= UNIFORMITY_FACTOR for v in spread.values())
        logger.info(f"derivative bounds: spread {spread}")
        return {'rows': frame, 'spread': spread, 'uniform': uniform}

    @staticmethod
    def rescaled_window_check(bapu: BapuFamily, max_order: int = 2) -> Dict:
        """
        Derivative sups of psi~_k(eta) = psi_k(|xi_k|^alpha eta + xi_k).

        Returns:
            Dictionary with rows (k, support_radius, measured_extent, order, constant),
            the spread per order and the largest support radius r
        """
        if bapu.kind == 'dyadic':
            raise ParameterError("rescaled windows are defined for alpha < 1", parameter='alpha', value=bapu.alpha)
        dim = bapu.grid.dim
        alpha = bapu.alpha
        per_axis = WINDOW_SAMPLES_PER_AXIS[dim]
        rows = []
        support = {}
        for window in bapu:
            patch = window.patch
            center = patch.center_array
            dilation = float(np.linalg.norm(center)) ** alpha
            r_k = patch.radius / dilation
            eta = _box_samples(np.zeros(dim), r_k, per_axis)
            eta = eta[BapuAnalyzer._trusted(bapu, dilation * eta + center)]
            evaluate = (lambda pts, index=window.index, c=center, d=dilation:
                        bapu.evaluator.window(index, d * pts + c))
            values = evaluate(eta)
            extent = float(np.sqrt((eta[values > 0] ** 2).sum(axis=-1)).max()) if np.any(values > 0) else 0.0
            support[patch.label()] = r_k
            for beta in multi_indices(dim, max_order):
                derivative = partial_derivative(evaluate, eta, beta, FD_RELATIVE_STEP * r_k)
                rows.append({
                    'k': patch.label(),
                    'support_radius': r_k,
                    'measured_extent': extent,
                    'beta': ';'.join(map(str, beta)),
                    'order': sum(beta),
                    'constant': float(np.abs(derivative).max()),
                })
        frame = pd.DataFrame(rows)
        spread = _uniformity(frame[frame['order'] > 0], 'order')
        return {
            'rows': frame,
            'spread': spread,
            'uniform': all(v <= UNIFORMITY_FACTOR for v in spread.values()),
            'support_radius': max(support.values()),
        }

    @staticmethod
    def dilated_grid(dim: int) -> GridSpec:
        nyquist, samples = DILATED_GRID[dim]
        return GridSpec(dim, math.pi * samples / (2.0 * nyquist), samples)

    @staticmethod
    def dilated_window_decay_check(bapu: BapuFamily, m_values: Sequence[int] = (2, 4)) -> Dict:
        """
        Decay of mu_k^(y) for mu_k(xi) = psi_k(a_k xi).

        C^_{k,m} = sup_y |mu_k^(y)| <y>^m / a_k^{(m - n)(1 - alpha)}.

        Returns:
            Dictionary with rows (k, m, a_k, constant, mu_hat_zero, quadrature) and the spread per m
        """
        if bapu.kind == 'dyadic':
            raise ParameterError("dilated window decay is defined for alpha < 1", parameter='alpha', value=bapu.alpha)
        dim = bapu.grid.dim
        alpha = bapu.alpha
        fine = BapuAnalyzer.dilated_grid(dim)
        nodes = fine.frequency_points()
        weight = japanese_bracket(fine.spatial_points())
        origin = (fine.samples // 2,) * dim
        rows = []
        for window in bapu:
            patch = window.patch
            a_k = patch.scale
            reach = (np.linalg.norm(patch.center_array) + patch.radius) / a_k
            if reach > DILATED_SUPPORT_FILL * fine.nyquist:
                raise GuardError(f"dilated window reaches {reach:.4g} beyond the fine grid",
                                 guard='aliasing', member=patch.label())
            mu = bapu.evaluator.window(window.index, a_k * nodes)
            mu_hat = FourierAnalyzer.inverse_transform(Spectrum(fine, mu)).values
            quadrature = ((2.0 * math.pi) ** (-dim / 2.0) * a_k ** (-dim)
                          * bapu.grid.freq_cell_volume * window.values.sum())
            for m in m_values:
                constant = float(np.max(np.abs(mu_hat) * weight ** m)) / a_k ** ((m - dim) * (1.0 - alpha))
                rows.append({
                    'k': patch.label(),
                    'm': m,
                    'a_k': a_k,
                    'constant': constant,
                    'mu_hat_zero': float(mu_hat[origin].real),
                    'quadrature': float(quadrature),
                })
        frame = pd.DataFrame(rows)
        spread = _uniformity(frame, 'm')
        return {'rows': frame, 'spread': spread, 'uniform': all(v <= UNIFORMITY_FACTOR for v in spread.values())}

    @staticmethod
    def kernel_grid(grid: GridSpec) -> GridSpec:
        """Grid with the same Nyquist bound and KERNEL_GRID_SCALE times the width."""
        return GridSpec(grid.dim, grid.half_width * KERNEL_GRID_SCALE, grid.samples * KERNEL_GRID_SCALE)

    @staticmethod
    def bapu_norm_condition(bapu: BapuFamily, p: MixedExponents) -> Dict:
        """
        ||chi_Q||_{p~} ||F^-1 psi_k||_{p~} / |Q_k| per window, with p~_j = min(1, p_1, ..., p_j).

        Returns:
            Dictionary with rows (k, shell, tail, constant), the spread of the
            per-window values, the median per dyadic shell of |k|, the spread of
            those medians and the largest value
        """
        if bapu.kind == 'dyadic':
            raise ParameterError("the norm condition is evaluated for alpha < 1", parameter='alpha', value=bapu.alpha)
        dim = bapu.grid.dim
        if p.dim != dim:
            raise ParameterError("exponent vector length differs from grid dimension", parameter='p', value=p.p)
        tilde = p.tilde.p
        fine = BapuAnalyzer.kernel_grid(bapu.grid)
        nodes = fine.frequency_points()
        inner = np.all(np.abs(fine.spatial_points()) <= fine.half_width / 2.0, axis=-1)
        rows = []
        for window in bapu:
            patch = window.patch
            psi = np.zeros(fine.shape)
            near = patch.contains(nodes)
            psi[near] = bapu.evaluator.window(window.index, nodes[near])
            kernel = np.abs(FourierAnalyzer.inverse_transform(Spectrum(fine, psi)).values)
            energy = kernel ** 2
            tail = float(energy[~inner].sum() / energy.sum())
            if tail > KERNEL_TAIL_LIMIT:
                raise GuardError(f"kernel energy {tail:.3e} outside the inner box", guard='kernel_tail',
                                 member=patch.label())
            chi = 1.0
            for pj in tilde:
                if not math.isinf(pj):
                    chi *= (2.0 * patch.radius) ** (1.0 / pj)
            value = chi * mixed_norm_array(kernel, fine.step, tilde) / patch.measure
            k_norm = float(np.linalg.norm(patch.index))
            rows.append({
                'k': patch.label(),
                'shell': int(math.floor(math.log2(k_norm))) if k_norm >= 1 else 0,
                'tail': tail,
                'constant': value,
            })
        frame = pd.DataFrame(rows)
        spread = _uniformity(frame.assign(group=0), 'group')['0']
        median = float(frame['constant'].median())
        shells = {int(shell): float(values.median()) for shell, values in frame.groupby('shell')['constant']}
        shell_spread = max(max(value / median, median / value) for value in shells.values())
        logger.info(f"norm condition for p={p.label()}: max {frame['constant'].max():.4g}, spread {spread:.4g}, "
                    f"shell medians {shells}")
        return {
            'rows': frame,
            'spread': spread,
            'shells': shells,
            'shell_spread': shell_spread,
            'uniform': spread <= UNIFORMITY_FACTOR and shell_spread <= UNIFORMITY_FACTOR,
            'max': float(frame['constant'].max()),
        }
