# analyzers/finite_differences.py - Central finite-difference partial derivatives

import itertools
from typing import Callable, Sequence

import numpy as np

# order -> (offsets, weights); second-order accurate central stencils
STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}
MAX_ORDER = max(STENCILS)


def partial_derivative(func: Callable[[np.ndarray], np.ndarray], points: np.ndarray,
                       orders: Sequence[int], steps: np.ndarray) -> np.ndarray:
    """
    Tensor-product central difference of `func` at `points`.

    Args:
        func: Vectorised function of points with shape (..., d)
        points: Evaluation points, shape (P, d)
        orders: Derivative order per coordinate (each <= 4)
        steps: Step per point and coordinate, broadcastable to (P, d)

    Returns:
        Complex array of shape (P,)
    """
    points = np.asarray(points, dtype=float)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), points.shape)
    if any(o > MAX_ORDER for o in orders):
        raise ValueError(f"finite differences support orders up to {MAX_ORDER}")

    axes = [j for j, o in enumerate(orders) if o > 0]
    if not axes:
        return np.asarray(func(points), dtype=complex)

    total = np.zeros(points.shape[0], dtype=complex)
    stencils = [STENCILS[orders[j]] for j in axes]
    for combo in itertools.product(*[range(len(s[0])) for s in stencils]):
        shifted = points.copy()
        weight = 1.0
        for j, stencil, pick in zip(axes, stencils, combo):
            shifted[:, j] += stencil[0][pick] * steps[:, j]
            weight *= stencil[1][pick]
        if weight != 0.0:
            total += weight * np.asarray(func(shifted), dtype=complex)

    scale = np.ones(points.shape[0])
    for j in axes:
        scale *= steps[:, j] ** orders[j]
    return total / scale


def multi_indices(dim: int, max_order: int):
    """All multi-indices of length `dim` with |index| <= max_order, graded."""
    indices = [idx for idx in itertools.product(range(max_order + 1), repeat=dim) if sum(idx) <= max_order]
    return sorted(indices, key=lambda idx: (sum(idx), tuple(-v for v in idx)))
