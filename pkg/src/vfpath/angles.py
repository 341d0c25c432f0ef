"""Angle wrapping helpers shared by the path, vehicle and guidance modules."""

import math

import numpy as np

TAU = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap a scalar angle to the principal interval (-pi, pi]."""
    wrapped = math.remainder(angle, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


def wrap_angle_array(angles: np.ndarray) -> np.ndarray:
    """Wrap an array of angles to (-pi, pi]."""
    wrapped = np.mod(np.asarray(angles, dtype=float) + np.pi, TAU) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)
