"""Small shared helpers for directions and angles in R^3 / R^7."""

from __future__ import annotations

import numpy as np

UNIT_TOL = 1e-9


def as_vector(v, dim: int, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"{name} must have shape ({dim},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components")
    return arr


def require_unit(v, dim: int = 3, name: str = "direction", tol: float = UNIT_TOL) -> np.ndarray:
    """Validate a unit vector to within `tol` of norm 1 and return it as float array."""
    arr = as_vector(v, dim, name)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must be unit length (|v| = {norm!r})")
    return arr


def require_orientation(orientation: int) -> int:
    """The hidden orientation sign: exactly +1 or -1."""
    if orientation not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {orientation!r}")
    return int(orientation)


def spherical_direction(theta: float, phi: float) -> np.ndarray:
    """Unit vector from polar angle theta and azimuth phi."""
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def polar_angles(n) -> tuple[float, float]:
    """Inverse of spherical_direction (phi = 0 on the z axis)."""
    n = require_unit(n)
    theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    phi = float(np.arctan2(n[1], n[0]))
    return theta, phi


def coplanar_direction(t: float) -> np.ndarray:
    """Unit vector at angle t from z in the x-z plane; the plane used for CHSH sweeps."""
    return np.array([np.sin(t), 0.0, np.cos(t)])


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int = 3) -> np.ndarray:
    """(count, dim) array of isotropically random unit vectors."""
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def to_radians(value, unit: str):
    if unit == "rad":
        return np.asarray(value, dtype=float)
    if unit == "deg":
        return np.deg2rad(np.asarray(value, dtype=float))
    raise ValueError(f"unit must be 'deg' or 'rad', got {unit!r}")
