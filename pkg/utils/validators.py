# utils/validators.py - Input validation utilities

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from config import MAX_DIM, SWEEP_SIZE_LIMIT
from utils.logger import get_logger

logger = get_logger(__name__)


def validate_exponents(p: Sequence[float]) -> Tuple[bool, Optional[str]]:
    """
    Validate a vector of Lebesgue exponents.

    Args:
        p: Exponents (p_1, ..., p_n), each in (0, inf]

    Returns:
        Tuple of (is_valid, error_message)
    """
    if len(p) == 0:
        return False, "Exponent vector is empty"

    for j, value in enumerate(p):
        if math.isnan(value) or value <= 0:
            error = f"Exponent p_{j + 1} = {value} must be positive"
            logger.warning(error)
            return False, error

    return True, None


def validate_grid_shape(shape: Tuple[int, ...], dim: int, samples: int) -> Tuple[bool, Optional[str]]:
    """
    Validate that an array shape matches a grid of `dim` axes with `samples` nodes each.

    Args:
        shape: Shape of the values array
        dim: Grid dimension n
        samples: Samples N per axis

    Returns:
        Tuple of (is_valid, error_message)
    """
    expected = (samples,) * dim
    if tuple(shape) != expected:
        error = f"Array shape {tuple(shape)} does not match grid shape {expected}"
        logger.error(error)
        return False, error

    return True, None


def validate_grid_parameters(dim: int, half_width: float, samples: int) -> Tuple[bool, Optional[str]]:
    """Validate the defining numbers of a periodic grid."""
    if dim < 1 or dim > MAX_DIM:
        return False, f"Dimension {dim} outside supported range 1..{MAX_DIM}"

    if not half_width > 0:
        return False, f"Half-width {half_width} must be positive"

    if samples <= 0 or samples % 2:
        return False, f"Samples per axis {samples} must be an even positive integer"

    return True, None


def validate_finite(values: np.ndarray, name: str = 'values') -> Tuple[bool, Optional[str]]:
    """
    Check that an array contains no NaN or Inf.

    Args:
        values: Array to check
        name: Label used in the error message

    Returns:
        Tuple of (is_valid, error_message)
    """
    finite = np.isfinite(values)
    if finite.all():
        return True, None

    first_bad = tuple(int(i) for i in np.argwhere(~finite)[0])
    error = f"{name} contains {int((~finite).sum())} non-finite entries (first at {first_bad})"
    logger.error(error)
    return False, error


def validate_sweep_size(size: int) -> Tuple[bool, Optional[str]]:
    """Validate the cartesian product size of a parameter sweep."""
    if size > SWEEP_SIZE_LIMIT:
        error = f"Sweep of {size} points exceeds the limit of {SWEEP_SIZE_LIMIT}"
        logger.warning(error)
        return False, error

    return True, None
