"""Beam-quality metrics.

Great-circle pointing deviation between a requested and an achieved beam
direction, cosine similarity between sampled radiation patterns, and the
distribution summaries (quantiles, empirical CDFs) used to report them.
All angle math is 64-bit; the spherical-law-of-cosines argument is clamped
to [-1, 1] before inversion so round-off can never produce a NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .array_core import BeamPointingAngle, RadiationPattern

__all__ = [
    "MetricSample",
    "central_angle",
    "central_angle_deg",
    "cosine_similarity",
    "quantiles",
    "empirical_cdf",
]


def central_angle_deg(az_a, el_a, az_b, el_b):
    """Great-circle central angle in degrees between direction(s) A and B.

    Vectorized over any broadcastable combination of azimuth/elevation arrays
    (elevation is the polar angle from +z).
    """
    el_a_r = np.deg2rad(np.asarray(el_a, dtype=np.float64))
    el_b_r = np.deg2rad(np.asarray(el_b, dtype=np.float64))
    daz = np.deg2rad(np.asarray(az_a, dtype=np.float64) - np.asarray(az_b, dtype=np.float64))
    cos_alpha = np.cos(el_a_r) * np.cos(el_b_r) + np.sin(el_a_r) * np.sin(el_b_r) * np.cos(daz)
    alpha = np.rad2deg(np.arccos(np.clip(cos_alpha, -1.0, 1.0)))
    if alpha.ndim == 0:
        return float(alpha)
    return alpha


def central_angle(a: BeamPointingAngle, b: BeamPointingAngle) -> float:
    """Central angle in degrees between two beam pointing angles."""
    return central_angle_deg(a.az_deg, a.el_deg, b.az_deg, b.el_deg)


def cosine_similarity(f1: RadiationPattern, f2: RadiationPattern) -> float:
    """Normalized inner product of two magnitude patterns on the same grid.

    Magnitudes are non-negative, so the result lies in [0, 1]: 1 for patterns
    identical up to positive scale, 0 for disjointly supported ones.
    """
    if not f1.grid.same_sampling(f2.grid):
        raise ValueError("patterns live on different direction grids")
    n1 = float(np.linalg.norm(f1.magnitude))
    n2 = float(np.linalg.norm(f2.magnitude))
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("cosine similarity is undefined for an all-zero pattern")
    sim = float(np.dot(f1.magnitude, f2.magnitude)) / (n1 * n2)
    return min(max(sim, 0.0), 1.0)


def quantiles(values: Sequence[float], ps: Sequence[float]) -> list[float]:
    """Linear-interpolation quantiles of ``values`` at percentiles ``ps``
    (0-100 scale, e.g. [25, 50, 75, 95])."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("quantiles of an empty sample are undefined")
    for p in ps:
        if not 0.0 <= p <= 100.0:
            raise ValueError(f"percentile {p} outside [0, 100]")
    return [float(q) for q in np.quantile(arr, np.asarray(ps, dtype=np.float64) / 100.0)]


def empirical_cdf(values: Sequence[float]) -> list[tuple[float, float]]:
    """Step-function points (value, fraction of samples <= value).

    Duplicates collapse into one step; the final fraction is exactly 1.
    """
    arr = np.sort(np.asarray(values, dtype=np.float64))
    if arr.size == 0:
        raise ValueError("empirical CDF of an empty sample is undefined")
    uniques, first_index = np.unique(arr, return_index=True)
    counts = np.append(first_index[1:], arr.size)  # cumulative count <= each unique value
    return [(float(v), float(c) / arr.size) for v, c in zip(uniques, counts)]


@dataclass(frozen=True)
class MetricSample:
    """One evaluated beam: requested vs. achieved direction plus both metrics."""

    target: BeamPointingAngle
    achieved: BeamPointingAngle
    central_angle_deg: float
    cosine_similarity: float

    def __post_init__(self):
        if not 0.0 <= self.central_angle_deg <= 180.0 or not math.isfinite(self.central_angle_deg):
            raise ValueError(f"central angle {self.central_angle_deg} outside [0, 180]")
        if not 0.0 <= self.cosine_similarity <= 1.0 or not math.isfinite(self.cosine_similarity):
            raise ValueError(f"cosine similarity {self.cosine_similarity} outside [0, 1]")
