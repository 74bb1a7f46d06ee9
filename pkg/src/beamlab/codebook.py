"""Beam-steering codebooks for uniform planar arrays.

Generates the classic linear-progression codebook used by 802.15.3-style
millimeter-wave front ends, extends it separably to planar grids, calibrates
each codeword's actual beam pointing angle by peak search, and answers
nearest-beam queries against a target direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .array_core import (
    ArrayGeometry,
    BeamPointingAngle,
    PhaseVector,
    find_peak,
    planar_geometry,
    wrap_phase_deg,
    FULL_AZIMUTH,
    FULL_ELEVATION,
)
from .metrics import central_angle_deg

__all__ = [
    "Codebook",
    "linear_codeword_phase",
    "build_planar_codebook",
    "calibrate_codebook",
    "nearest_codeword",
    "save_codebook",
    "load_codebook",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _ceil_div(numerator: int, denominator: int) -> int:
    """ceil(numerator/denominator) on integers, immune to float round-off."""
    return -((-numerator) // denominator)


@dataclass(frozen=True, eq=False)
class Codebook:
    """K phase-only codewords plus, after calibration, each codeword's
    measured beam pointing angle.

    ``codeword_phases_deg`` is a (K, N) array in degrees; row k is codeword k.
    A codebook is immutable: calibration returns a new instance.
    """

    size: int
    bits: int
    codeword_phases_deg: np.ndarray
    calibrated_az_deg: np.ndarray | None = None
    calibrated_el_deg: np.ndarray | None = None

    def __post_init__(self):
        phases = np.asarray(self.codeword_phases_deg, dtype=np.float64)
        if phases.ndim != 2 or phases.shape[0] != self.size or self.size < 1:
            raise ValueError("codeword array must have shape (K, N) with K >= 1")
        if np.any(phases <= -180.0) or np.any(phases > 180.0):
            raise ValueError("codeword phases must be wrapped to (-180, 180]")
        phases.setflags(write=False)
        object.__setattr__(self, "codeword_phases_deg", phases)
        for name in ("calibrated_az_deg", "calibrated_el_deg"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=np.float64)
                if arr.shape != (self.size,):
                    raise ValueError("calibration arrays must have one entry per codeword")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def is_calibrated(self) -> bool:
        return self.calibrated_az_deg is not None and self.calibrated_el_deg is not None

    def codeword(self, k: int) -> PhaseVector:
        return PhaseVector(self.codeword_phases_deg[k])

    def calibrated_bpa(self, k: int) -> BeamPointingAngle:
        if not self.is_calibrated:
            raise ValueError("codebook has not been calibrated")
        return BeamPointingAngle(float(self.calibrated_az_deg[k]), float(self.calibrated_el_deg[k]))


def linear_codeword_phase(n: int, k: int, size: int, bits: int) -> float:
    """Phase (degrees, wrapped) of axis element ``n`` in codeword ``k`` of a
    size-``size`` linear codebook at ``bits``-bit shifter resolution.

    phase = (360 / 2^bits) * ceil(n * ((k - 1 + size/2) mod size) / (size / 2^bits))

    Element 0 is always unshifted; for 2^bits >= size the formula reduces to
    the exact progressive phases 360 * n * ((k - 1 + size/2) mod size) / size.
    """
    if not _is_power_of_two(size):
        raise ValueError(f"codebook size must be a power of two, got {size}")
    if bits < 1:
        raise ValueError("phase shifter resolution must be at least 1 bit")
    if not 0 <= k < size:
        raise ValueError(f"codeword index {k} outside [0, {size})")
    if n < 0:
        raise ValueError("element index must be non-negative")
    lattice_step = 360.0 / (1 << bits)
    beam = (k - 1 + size // 2) % size
    steps = _ceil_div(n * beam * (1 << bits), size)
    return wrap_phase_deg(lattice_step * steps)


def build_planar_codebook(geom: ArrayGeometry, size: int, bits: int) -> Codebook:
    """Separable planar codebook: sqrt(K) linear codewords along each grid
    axis, combined element-wise.

    Element (row r, col c) of planar codeword (k_col, k_row) gets the column
    codebook phase for (c, k_col) plus the row codebook phase for (r, k_row),
    wrapped.  Codewords are ordered row-major in (k_col, k_row).  Every phase
    stays on the 2^bits lattice because both addends do and 360 is a whole
    number of lattice steps.
    """
    if geom.grid_shape is None:
        raise ValueError("planar codebook needs a geometry built on a row/column grid")
    root = int(round(size**0.5))
    if root * root != size or not _is_power_of_two(root):
        raise ValueError(f"codebook size must be the square of a power of two, got {size}")
    rows, cols = geom.grid_shape
    col_phases = np.array(
        [[linear_codeword_phase(c, k, root, bits) for c in range(cols)] for k in range(root)]
    )
    row_phases = np.array(
        [[linear_codeword_phase(r, k, root, bits) for r in range(rows)] for k in range(root)]
    )
    r_idx, c_idx = np.divmod(np.arange(rows * cols), cols)
    codewords = np.empty((size, rows * cols))
    for k_col in range(root):
        for k_row in range(root):
            combined = col_phases[k_col][c_idx] + row_phases[k_row][r_idx]
            codewords[k_col * root + k_row] = wrap_phase_deg(combined)
    return Codebook(size=size, bits=bits, codeword_phases_deg=codewords)


def calibrate_codebook(
    cb: Codebook,
    geom: ArrayGeometry,
    coarse_step: float = 1.0,
    az_limits: tuple[float, float] = FULL_AZIMUTH,
    el_limits: tuple[float, float] = FULL_ELEVATION,
) -> Codebook:
    """Measure every codeword's actual beam peak and return a calibrated copy.

    Calibration is deterministic, so re-calibrating with the same arguments
    reproduces the same angles.  Restrict ``az_limits`` to the array's front
    half-space when the codebook serves one side of a planar array.
    """
    az = np.empty(cb.size)
    el = np.empty(cb.size)
    for k in range(cb.size):
        peak = find_peak(cb.codeword(k), geom, coarse_step, az_limits, el_limits)
        az[k] = peak.az_deg
        el[k] = peak.el_deg
    return replace(cb, calibrated_az_deg=az, calibrated_el_deg=el)


def nearest_codeword(cb: Codebook, target: BeamPointingAngle) -> int:
    """Index of the calibrated codeword whose beam lies closest to ``target``
    in central angle.  Ties go to the lowest index."""
    if not cb.is_calibrated:
        raise ValueError("nearest_codeword requires a calibrated codebook")
    distances = central_angle_deg(cb.calibrated_az_deg, cb.calibrated_el_deg, target.az_deg, target.el_deg)
    return int(np.argmin(distances))


def save_codebook(cb: Codebook, geom: ArrayGeometry, path) -> None:
    """Serialize a codebook (and the geometry it was built for) as JSON.

    Floats are written with full precision, so load_codebook round-trips
    bit-exactly.
    """
    doc = {
        "format": "beamlab-codebook-v1",
        "size": cb.size,
        "bits": cb.bits,
        "geometry": geom.descriptor(),
        "codewords_deg": cb.codeword_phases_deg.tolist(),
        "calibrated_az_deg": None if cb.calibrated_az_deg is None else cb.calibrated_az_deg.tolist(),
        "calibrated_el_deg": None if cb.calibrated_el_deg is None else cb.calibrated_el_deg.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def geometry_from_descriptor(desc: dict) -> ArrayGeometry:
    """Rebuild an ArrayGeometry from its JSON descriptor."""
    if "rows" in desc:
        return planar_geometry(
            desc["rows"],
            desc["cols"],
            desc["spacing_wl"],
            element_model=desc.get("element_model", "isotropic"),
            plane=desc.get("plane") or "xz",
        )
    return ArrayGeometry(
        np.asarray(desc["positions_wl"], dtype=np.float64),
        element_model=desc.get("element_model", "isotropic"),
    )


def load_codebook(path) -> tuple[Codebook, ArrayGeometry]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "beamlab-codebook-v1":
        raise ValueError(f"unrecognized codebook file format in {path}")
    cb = Codebook(
        size=doc["size"],
        bits=doc["bits"],
        codeword_phases_deg=np.asarray(doc["codewords_deg"], dtype=np.float64),
        calibrated_az_deg=None if doc["calibrated_az_deg"] is None else np.asarray(doc["calibrated_az_deg"]),
        calibrated_el_deg=None if doc["calibrated_el_deg"] is None else np.asarray(doc["calibrated_el_deg"]),
    )
    return cb, geometry_from_descriptor(doc["geometry"])
