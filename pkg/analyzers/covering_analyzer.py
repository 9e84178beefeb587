# analyzers/covering_analyzer.py - Alpha-coverings, dyadic coverings and admissibility

import itertools
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from config import (
    A_GROWTH, A_MAX_STEPS, A_START, DENOMINATOR_FLOOR, DENSE_BLOCK_ELEMENTS,
    MEASURE_SAMPLES_PER_AXIS,
)
from exceptions import CoverageError, ParameterError
from models.covering import AdmissibilityReport, Covering, CoveringParams, FrequencyPatch
from models.grid import GridSpec
from analyzers.bump_functions import japanese_bracket, mother_bump
from utils.logger import get_logger

logger = get_logger(__name__)


def lattice_centers(alpha: float, indices: np.ndarray) -> np.ndarray:
    """xi_k = k <k>^(alpha/(1-alpha)) for integer rows k."""
    indices = np.asarray(indices, dtype=float)
    return indices * japanese_bracket(indices)[..., None] ** (alpha / (1.0 - alpha))


def _nonzero_lattice(dim: int, kmax: int) -> np.ndarray:
    rows = [k for k in itertools.product(range(-kmax, kmax + 1), repeat=dim) if any(k)]
    return np.array(rows, dtype=int).reshape(-1, dim)


def window_denominator(points: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """sum_j g(|xi - xi_j| / rho_j) at points of shape (P, n)."""
    total = np.zeros(points.shape[0])
    block = max(1, DENSE_BLOCK_ELEMENTS // max(1, centers.shape[0]))
    for start in range(0, points.shape[0], block):
        chunk = points[start:start + block]
        distance = np.sqrt(((chunk[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1))
        total[start:start + block] = mother_bump(distance / radii[None, :]).sum(axis=1)
    return total


def box_distance(points: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to the nearest of a set of boxes; shape (P,)."""
    best = np.full(points.shape[0], np.inf)
    block = max(1, DENSE_BLOCK_ELEMENTS // max(1, lower.shape[0] * points.shape[1]))
    for start in range(0, points.shape[0], block):
        chunk = points[start:start + block, None, :]
        gap = np.maximum(np.maximum(lower[None] - chunk, chunk - upper[None]), 0.0)
        best[start:start + block] = np.sqrt((gap ** 2).sum(axis=-1)).min(axis=1)
    return best


class CoveringAnalyzer:
    """Builds retained alpha-coverings on a grid and measures their admissibility constants."""

    @staticmethod
    def centers(alpha: float, kmax: int, dim: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Lattice indices and centers of the alpha-covering.

        Args:
            alpha: Exponent in [0, 1)
            kmax: Largest |k|_inf
            dim: Dimension n

        Returns:
            Tuple (indices, centers) with one row per nonzero k
        """
        if not 0.0 <= alpha < 1.0:
            raise ParameterError("alpha-coverings need alpha in [0, 1); use the dyadic covering at 1",
                                 parameter='alpha', value=alpha)
        indices = _nonzero_lattice(dim, kmax)
        return indices, lattice_centers(alpha, indices)

    @staticmethod
    def lattice_covering(alpha: float, radius_factor: float, kmax: int, dim: int) -> Tuple[FrequencyPatch, ...]:
        """Untruncated lattice patches with |k|_inf <= kmax, independent of any grid."""
        indices, centers = CoveringAnalyzer.centers(alpha, kmax, dim)
        scales = japanese_bracket(centers)
        return tuple(
            FrequencyPatch(
                index=tuple(int(v) for v in k),
                center=tuple(float(c) for c in xi),
                scale=float(a),
                radius=float(radius_factor * a ** alpha),
            )
            for k, xi, a in zip(indices, centers, scales)
        )

    @staticmethod
    def covered_nodes(grid: GridSpec, margin: float) -> np.ndarray:
        """Frequency nodes with |xi| <= margin * Omega, shape (P, n)."""
        points = grid.frequency_points().reshape(-1, grid.dim)
        radius = np.sqrt((points ** 2).sum(axis=-1))
        return points[radius <= margin * grid.nyquist]

    @staticmethod
    def build_covering(params: CoveringParams, grid: GridSpec) -> Covering:
        """
        Retained covering for a grid.

        Keeps k with |k|_inf <= kmax and |xi_k| <= margin * Omega. A missing
        radius factor A is calibrated upward from A_START until the covered
        ball has no gaps and the window denominator stays above the floor.

        Args:
            params: Covering parameters
            grid: Grid whose Nyquist bound limits retention

        Returns:
            Covering with resolved parameters
        """
        if params.is_dyadic:
            return CoveringAnalyzer.dyadic_covering(grid, params)

        limit = params.margin * grid.nyquist
        # |xi_k| >= |k|, so larger lattice indices can never be retained
        kmax = min(params.kmax, int(math.floor(limit)))
        if kmax < 1:
            raise CoverageError("grid too small: no lattice center within the covered ball",
                                node=None, value=limit)
        indices, centers = CoveringAnalyzer.centers(params.alpha, kmax, grid.dim)
        keep = np.sqrt((centers ** 2).sum(axis=-1)) <= limit
        if not keep.any():
            raise CoverageError("grid too small: no lattice center within the covered ball",
                                node=None, value=limit)
        indices, centers = indices[keep], centers[keep]
        scales = japanese_bracket(centers)

        radius_factor = params.radius_factor
        if radius_factor is None:
            radius_factor = CoveringAnalyzer.calibrate_radius_factor(params, grid, centers, scales)

        patches = tuple(
            FrequencyPatch(
                index=tuple(int(v) for v in k),
                center=tuple(float(c) for c in xi),
                scale=float(a),
                radius=float(radius_factor * a ** params.alpha),
            )
            for k, xi, a in zip(indices, centers, scales)
        )
        logger.info(f"alpha={params.alpha}: retained {len(patches)} patches with A={radius_factor:.6g}")
        return Covering(params.with_radius_factor(radius_factor), grid, patches)

    @staticmethod
    def calibrate_radius_factor(params: CoveringParams, grid: GridSpec,
                                centers: np.ndarray, scales: np.ndarray) -> float:
        """Smallest A = A_START * A_GROWTH^i giving full coverage and denominator >= floor."""
        nodes = CoveringAnalyzer.covered_nodes(grid, params.margin)
        radius_factor = A_START
        for _ in range(A_MAX_STEPS):
            radii = radius_factor * scales ** params.alpha
            deficit = box_distance(nodes, centers - radii[:, None], centers + radii[:, None]).max()
            if deficit == 0.0:
                floor = window_denominator(nodes, centers, radii).min()
                if floor >= DENOMINATOR_FLOOR:
                    logger.debug(f"calibrated A={radius_factor:.6g} (denominator floor {floor:.4g})")
                    return radius_factor
            radius_factor *= A_GROWTH
        raise CoverageError("radius factor calibration did not converge", node=None, value=radius_factor)

    @staticmethod
    def dyadic_covering(grid: GridSpec, params: Optional[CoveringParams] = None) -> Covering:
        """
        Dyadic covering: the ball |xi| <= 2 and shells 2^(j-1) <= |xi| <= 2^(j+1).

        Shells run up to j = J with 2^J >= sqrt(n) * Omega, so the union
        contains every frequency node.
        """
        params = params or CoveringParams(alpha=1.0)
        top = max(1, int(math.ceil(math.log2(math.sqrt(grid.dim) * grid.nyquist))))
        patches = [FrequencyPatch(index=(0,), center=(0.0,) * grid.dim, scale=1.0, radius=2.0, shape='shell')]
        for j in range(1, top + 1):
            center = (2.0 ** j,) + (0.0,) * (grid.dim - 1)
            patches.append(FrequencyPatch(
                index=(j,),
                center=center,
                scale=math.sqrt(1.0 + 4.0 ** j),
                radius=2.0 ** (j + 1),
                inner_radius=2.0 ** (j - 1),
                shape='shell',
            ))
        logger.info(f"dyadic covering with {len(patches)} patches (J={top})")
        return Covering(params, grid, tuple(patches))

    @staticmethod
    def overlap_counts(patches: Sequence[FrequencyPatch]) -> np.ndarray:
        """For each patch, the number of patches (itself included) it intersects."""
        if all(p.shape == 'cube' for p in patches):
            lower = np.array([p.lower for p in patches])
            upper = np.array([p.upper for p in patches])
            hits = np.all(np.maximum(lower[:, None], lower[None]) < np.minimum(upper[:, None], upper[None]), axis=-1)
            return hits.sum(axis=1)
        return np.array([sum(p.overlaps(q) for q in patches) for p in patches])

    @staticmethod
    def _patch_samples(patch: FrequencyPatch) -> np.ndarray:
        offsets = np.linspace(-1.0, 1.0, MEASURE_SAMPLES_PER_AXIS)
        if patch.shape == 'cube':
            grid = np.stack(np.meshgrid(*([offsets] * patch.dim), indexing='ij'), axis=-1).reshape(-1, patch.dim)
            return patch.center_array + patch.radius * grid
        radii = np.linspace(patch.inner_radius, patch.radius, MEASURE_SAMPLES_PER_AXIS)
        points = np.zeros((radii.size, patch.dim))
        points[:, 0] = radii
        return points

    @staticmethod
    def admissibility_check(covering: Sequence[FrequencyPatch], grid: Optional[GridSpec] = None,
                            alpha: Optional[float] = None) -> AdmissibilityReport:
        """
        Measure n0, C_meas, K and the coverage deficit of a covering.

        Args:
            covering: Covering or plain sequence of patches
            grid: Grid whose covered ball is checked for gaps (skipped when None)
            alpha: Exponent for C_meas (taken from the covering when available)

        Returns:
            AdmissibilityReport
        """
        patches = list(covering)
        if not patches:
            raise ParameterError("empty covering", parameter='covering', value=0)
        margin = None
        radius_factor = None
        if isinstance(covering, Covering):
            alpha = covering.params.alpha if alpha is None else alpha
            grid = covering.grid if grid is None else grid
            margin = covering.params.margin
            radius_factor = covering.params.radius_factor
        if alpha is None:
            raise ParameterError("alpha is required for a plain patch sequence", parameter='alpha', value=None)
        dim = patches[0].dim

        overlap_max = int(CoveringAnalyzer.overlap_counts(patches).max())

        comparability = 1.0
        for patch in patches:
            samples = CoveringAnalyzer._patch_samples(patch)
            ratio = patch.measure / japanese_bracket(samples) ** (alpha * dim)
            comparability = max(comparability, float(np.max(np.maximum(ratio, 1.0 / ratio))))

        eccentricity = max(p.eccentricity for p in patches)

        deficit = 0.0
        uncovered = None
        min_denominator = None
        if grid is not None:
            nodes = CoveringAnalyzer.covered_nodes(grid, margin if margin is not None else 1.0)
            if all(p.shape == 'cube' for p in patches):
                lower = np.array([p.lower for p in patches])
                upper = np.array([p.upper for p in patches])
                distance = box_distance(nodes, lower, upper)
                centers = np.array([p.center for p in patches], dtype=float)
                radii = np.array([p.radius for p in patches])
                min_denominator = float(window_denominator(nodes, centers, radii).min())
            else:
                inside = np.zeros(nodes.shape[0], dtype=bool)
                for patch in patches:
                    inside |= patch.contains(nodes)
                radius = np.sqrt((nodes ** 2).sum(axis=-1))
                outer = max(p.radius for p in patches)
                distance = np.where(inside, 0.0, np.maximum(radius - outer, 0.0))
            deficit = float(distance.max())
            if deficit > 0.0:
                uncovered = tuple(float(v) for v in nodes[int(np.argmax(distance))])
                logger.warning(f"covering leaves node {uncovered} uncovered (deficit {deficit:.4g})")

        report = AdmissibilityReport(
            overlap_max=overlap_max,
            measure_comparability=comparability,
            eccentricity=float(eccentricity),
            coverage_deficit=deficit,
            patch_count=len(patches),
            radius_factor=radius_factor,
            uncovered_node=uncovered,
            min_denominator=min_denominator,
        )
        logger.info(f"admissibility: n0={overlap_max} C_meas={comparability:.4g} K={eccentricity:.4g} "
                    f"deficit={deficit:.3g}")
        return report
