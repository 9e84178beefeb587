# utils/__init__.py

from .logger import get_logger
from .validators import (
    validate_exponents,
    validate_finite,
    validate_grid_parameters,
    validate_grid_shape,
    validate_sweep_size,
)

__all__ = [
    'get_logger',
    'validate_exponents',
    'validate_finite',
    'validate_grid_parameters',
    'validate_grid_shape',
    'validate_sweep_size',
]
