# tests/generators.py - Closed-form test functions

import numpy as np


def gaussian(width: float = 1.0, shift=None, omega=None):
    """exp(-|x - shift|^2 / width) times an optional plane wave."""

    def generate(x):
        offset = np.zeros(x.shape[-1]) if shift is None else np.asarray(shift, dtype=float)
        values = np.exp(-((x - offset) ** 2).sum(axis=-1) / width) + 0j
        if omega is not None:
            values = values * np.exp(1j * (x @ np.asarray(omega, dtype=float)))
        return values

    return generate
