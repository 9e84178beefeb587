# analyzers/bump_functions.py - Smooth compactly supported bumps and steps

import numpy as np


def mother_bump(t: np.ndarray) -> np.ndarray:
    """g(t) = exp(-1/(1 - t^2)) for |t| < 1, else 0. Takes |t| >= 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = t < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def bump_at(points: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Mother bump centred at `center` with support radius `radius`; points shape (..., n)."""
    distance = np.sqrt(((points - center) ** 2).sum(axis=-1))
    return mother_bump(distance / radius)


def _edge(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    positive = s > 0
    out[positive] = np.exp(-1.0 / s[positive])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """Smooth function equal to 1 for t <= 1 and 0 for t >= 2."""
    t = np.asarray(t, dtype=float)
    rise = _edge(2.0 - t)
    fall = _edge(t - 1.0)
    out = rise / (rise + fall)
    out[t <= 1.0] = 1.0
    out[t >= 2.0] = 0.0
    return out


def japanese_bracket(points: np.ndarray) -> np.ndarray:
    """<xi> = sqrt(1 + |xi|^2) for points of shape (..., n)."""
    return np.sqrt(1.0 + (np.asarray(points, dtype=float) ** 2).sum(axis=-1))
