"""Exact beamforming math for planar arrays.

Steering phases, digital-phase-shifter quantization, far-field pattern
synthesis, directivity, and beam-peak search.  Directions use the spherical
convention where ``el_deg`` is the polar angle measured from +z and ``az_deg``
is measured from +x toward +y, both in degrees.  Element positions are stored
in wavelength units so no absolute frequency ever enters the math; all pattern
and phase computations run in 64-bit floats.
"""

from __future__ import annotations

import csv
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ISOTROPIC = "isotropic"
SMALL_DIPOLE_Z = "small-dipole-z"
ELEMENT_MODELS = (ISOTROPIC, SMALL_DIPOLE_Z)

FULL_AZIMUTH = (0.0, 360.0)
FULL_ELEVATION = (0.0, 180.0)

__all__ = [
    "ISOTROPIC",
    "SMALL_DIPOLE_Z",
    "ELEMENT_MODELS",
    "BeamPointingAngle",
    "ArrayGeometry",
    "PhaseVector",
    "DirectionGrid",
    "RadiationPattern",
    "Directivity",
    "wrap_phase_deg",
    "direction_unit_vectors",
    "planar_geometry",
    "steering_phases_deg",
    "mgb_weights",
    "quantize_phases",
    "element_factor",
    "array_field",
    "field_values",
    "radiation_pattern",
    "directivity",
    "find_peak",
    "write_pattern_csv",
]


def wrap_phase_deg(phase_deg):
    """Wrap phase(s) in degrees into the half-open interval (-180, 180]."""
    phases = np.asarray(phase_deg, dtype=np.float64)
    wrapped = -((-phases + 180.0) % 360.0 - 180.0)
    wrapped = wrapped + 0.0  # fold -0.0 into +0.0
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class BeamPointingAngle:
    """A beam-steering direction: azimuth in [0, 360), elevation in [0, 180].

    Elevation is the polar angle from the +z axis, so (az, 0) is the zenith
    regardless of azimuth and (az, 90) lies in the x-y plane.
    """

    az_deg: float
    el_deg: float

    def __post_init__(self):
        az = float(self.az_deg)
        el = float(self.el_deg)
        if not (math.isfinite(az) and math.isfinite(el)):
            raise ValueError(f"beam pointing angle must be finite, got ({az}, {el})")
        if not 0.0 <= az < 360.0:
            raise ValueError(f"azimuth must lie in [0, 360), got {az}")
        if not 0.0 <= el <= 180.0:
            raise ValueError(f"elevation must lie in [0, 180], got {el}")
        object.__setattr__(self, "az_deg", az)
        object.__setattr__(self, "el_deg", el)

    def unit_vector(self) -> np.ndarray:
        """Cartesian unit vector pointing along this direction."""
        return direction_unit_vectors(self.az_deg, self.el_deg)


def direction_unit_vectors(az_deg, el_deg) -> np.ndarray:
    """(sin el cos az, sin el sin az, cos el) for scalar or array angles.

    Output shape is the broadcast input shape plus a trailing axis of 3.
    """
    az = np.deg2rad(np.asarray(az_deg, dtype=np.float64))
    el = np.deg2rad(np.asarray(el_deg, dtype=np.float64))
    sin_el = np.sin(el)
    return np.stack(
        [sin_el * np.cos(az), sin_el * np.sin(az), np.cos(el) * np.ones_like(az)],
        axis=-1,
    )


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Element positions in wavelengths (element 0 at the origin) plus the
    per-element radiation model.

    ``grid_shape`` records (rows, cols) when the geometry came from
    :func:`planar_geometry`; codebook construction needs it to index elements
    by row and column.
    """

    positions_wl: np.ndarray
    element_model: str = ISOTROPIC
    grid_shape: tuple[int, int] | None = None
    plane: str | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions_wl, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {pos.shape}")
        if pos.shape[0] < 1:
            raise ValueError("geometry needs at least one element")
        if not np.all(np.isfinite(pos)):
            raise ValueError("element positions must be finite")
        if np.any(pos[0] != 0.0):
            raise ValueError("element 0 must sit at the origin (positions are relative to it)")
        if len(np.unique(pos, axis=0)) != pos.shape[0]:
            raise ValueError("two elements share the same position")
        if self.element_model not in ELEMENT_MODELS:
            raise ValueError(f"unknown element model {self.element_model!r}; choose from {ELEMENT_MODELS}")
        if self.grid_shape is not None:
            rows, cols = self.grid_shape
            if rows * cols != pos.shape[0]:
                raise ValueError("grid_shape does not match the element count")
        pos.setflags(write=False)
        object.__setattr__(self, "positions_wl", pos)

    @property
    def n_elements(self) -> int:
        return self.positions_wl.shape[0]

    def cache_key(self) -> tuple:
        return (self.positions_wl.tobytes(), self.element_model)

    def descriptor(self) -> dict:
        """JSON-friendly description, sufficient to rebuild the geometry."""
        desc = {
            "n_elements": self.n_elements,
            "element_model": self.element_model,
        }
        if self.grid_shape is not None:
            rows, cols = self.grid_shape
            spacing = _grid_spacing(self.positions_wl, rows, cols)
            desc.update({"rows": rows, "cols": cols, "spacing_wl": spacing, "plane": self.plane})
        else:
            desc["positions_wl"] = self.positions_wl.tolist()
        return desc


def _grid_spacing(positions: np.ndarray, rows: int, cols: int) -> float:
    if cols > 1:
        return float(np.linalg.norm(positions[1] - positions[0]))
    if rows > 1:
        return float(np.linalg.norm(positions[cols] - positions[0]))
    return 0.0


def planar_geometry(
    rows: int,
    cols: int,
    spacing_wl: float = 0.5,
    element_model: str = ISOTROPIC,
    plane: str = "xz",
) -> ArrayGeometry:
    """Uniform rows x cols element grid with element index n = row*cols + col.

    ``plane="xz"`` spans columns along +x and rows along +z with the array
    normal on +y; every direction in the az [0, 120] x el [30, 150] service
    sector then falls in the front half-space (az in [0, 180]), which keeps
    beam peaks unambiguous.  ``plane="xy"`` spans +x and +y with the normal
    on +z.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if spacing_wl <= 0:
        raise ValueError("element spacing must be positive")
    r, c = np.divmod(np.arange(rows * cols), cols)
    along_cols = c * spacing_wl
    along_rows = r * spacing_wl
    zeros = np.zeros(rows * cols)
    if plane == "xz":
        pos = np.column_stack([along_cols, zeros, along_rows])
    elif plane == "xy":
        pos = np.column_stack([along_cols, along_rows, zeros])
    else:
        raise ValueError(f"plane must be 'xz' or 'xy', got {plane!r}")
    return ArrayGeometry(pos, element_model=element_model, grid_shape=(rows, cols), plane=plane)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Per-element phases in degrees, each wrapped to (-180, 180].

    The corresponding complex weights e^(j*phase) all have unit modulus, so
    any PhaseVector is a phase-only weighting by construction.
    """

    phases_deg: np.ndarray

    def __post_init__(self):
        phases = np.asarray(self.phases_deg, dtype=np.float64)
        if phases.ndim != 1 or phases.size < 1:
            raise ValueError("phases must be a non-empty 1-D array")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        if np.any(phases <= -180.0) or np.any(phases > 180.0):
            raise ValueError("phases must lie in (-180, 180]; use PhaseVector.from_degrees to wrap")
        phases.setflags(write=False)
        object.__setattr__(self, "phases_deg", phases)

    @classmethod
    def from_degrees(cls, phases_deg) -> "PhaseVector":
        """Build a PhaseVector, wrapping arbitrary degree values first."""
        return cls(np.atleast_1d(wrap_phase_deg(phases_deg)))

    @property
    def n_elements(self) -> int:
        return self.phases_deg.size

    def weights(self) -> np.ndarray:
        """Unit-modulus complex element weights."""
        return np.exp(1j * np.deg2rad(self.phases_deg))


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Deterministic sphere sampling used for pattern vectors.

    Samples are ordered elevation-major (all azimuths of the first elevation
    row, then the next), so two grids built from the same arguments index the
    same directions.  ``solid_angle_weights`` holds sin(el)*d_el*d_az per
    sample; over the full sphere they sum to 4*pi within quadrature error.
    """

    step_deg: float
    az_limits: tuple[float, float]
    el_limits: tuple[float, float]
    az_deg: np.ndarray
    el_deg: np.ndarray
    solid_angle_weights: np.ndarray
    n_az: int
    n_el: int

    @classmethod
    def from_step(
        cls,
        step_deg: float,
        az_limits: tuple[float, float] = FULL_AZIMUTH,
        el_limits: tuple[float, float] = FULL_ELEVATION,
    ) -> "DirectionGrid":
        step = float(step_deg)
        if step <= 0:
            raise ValueError("grid step must be positive")
        az_lo, az_hi = (float(v) for v in az_limits)
        el_lo, el_hi = (float(v) for v in el_limits)
        if not 0.0 <= az_lo < az_hi <= 360.0:
            raise ValueError(f"azimuth limits must satisfy 0 <= lo < hi <= 360, got {az_limits}")
        if not 0.0 <= el_lo < el_hi <= 180.0:
            raise ValueError(f"elevation limits must satisfy 0 <= lo < hi <= 180, got {el_limits}")
        for span in (az_hi - az_lo, el_hi - el_lo):
            if abs(span / step - round(span / step)) > 1e-9:
                raise ValueError(f"step {step} must divide the angular spans evenly")
        full_circle = (az_hi - az_lo) == 360.0
        n_az = int(round((az_hi - az_lo) / step)) + (0 if full_circle else 1)
        n_el = int(round((el_hi - el_lo) / step)) + 1
        az = az_lo + np.arange(n_az) * step
        el = el_lo + np.arange(n_el) * step
        az_grid = np.tile(az, n_el)
        el_grid = np.repeat(el, n_az)
        step_rad = math.radians(step)
        weights = np.sin(np.deg2rad(el_grid)) * step_rad * step_rad
        return cls(
            step_deg=step,
            az_limits=(az_lo, az_hi),
            el_limits=(el_lo, el_hi),
            az_deg=az_grid,
            el_deg=el_grid,
            solid_angle_weights=weights,
            n_az=n_az,
            n_el=n_el,
        )

    def __post_init__(self):
        for name in ("az_deg", "el_deg", "solid_angle_weights"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_directions(self) -> int:
        return self.az_deg.size

    def key(self) -> tuple:
        return (self.step_deg, self.az_limits, self.el_limits)

    def same_sampling(self, other: "DirectionGrid") -> bool:
        return self.key() == other.key() and self.n_directions == other.n_directions


@dataclass(frozen=True, eq=False)
class RadiationPattern:
    """Sampled far-field magnitudes |F| over a DirectionGrid, in grid order."""

    grid: DirectionGrid
    magnitude: np.ndarray

    def __post_init__(self):
        mag = np.asarray(self.magnitude, dtype=np.float64)
        if mag.shape != (self.grid.n_directions,):
            raise ValueError("magnitude length must match the grid")
        if not np.all(np.isfinite(mag)) or np.any(mag < 0):
            raise ValueError("magnitudes must be finite and non-negative")
        mag.setflags(write=False)
        object.__setattr__(self, "magnitude", mag)


def steering_phases_deg(positions_wl, bpa: BeamPointingAngle) -> np.ndarray:
    """Unwrapped steering phases -360 * P . u(bpa) in degrees.

    Works for arbitrary reference positions; shifting every position by a
    constant vector shifts all phases by a common offset and leaves pattern
    magnitudes untouched.
    """
    pos = np.asarray(positions_wl, dtype=np.float64)
    return -360.0 * pos @ bpa.unit_vector()


def mgb_weights(bpa: BeamPointingAngle, geom: ArrayGeometry) -> PhaseVector:
    """Maximum-gain (phase-only) steering weights that co-phase all elements
    toward ``bpa``.  Element 0 always gets phase 0."""
    return PhaseVector.from_degrees(steering_phases_deg(geom.positions_wl, bpa))


def quantize_phases(pv: PhaseVector, bits: int) -> PhaseVector:
    """Snap phases onto the 2^bits lattice of a digital phase shifter.

    Each phase maps to floor(phase/res + 1/2) * res with res = 360/2^bits,
    then wraps back into (-180, 180].  Multiples of the resolution are fixed
    points, so quantization is idempotent.
    """
    if int(bits) != bits or not 1 <= int(bits) <= 16:
        raise ValueError(f"bits must be an integer in [1, 16], got {bits!r}")
    resolution = 360.0 / (1 << int(bits))
    quantized = np.floor(pv.phases_deg / resolution + 0.5) * resolution
    return PhaseVector.from_degrees(quantized)


def element_factor(az_deg, el_deg, model: str):
    """Single-element magnitude pattern: 1 for isotropic, |sin el| for a small
    dipole along z.  Azimuth is accepted for interface symmetry but neither
    model depends on it."""
    if model == ISOTROPIC:
        return np.ones_like(np.asarray(el_deg, dtype=np.float64))
    if model == SMALL_DIPOLE_Z:
        return np.abs(np.sin(np.deg2rad(np.asarray(el_deg, dtype=np.float64))))
    raise ValueError(f"unknown element model {model!r}")


def field_values(pv: PhaseVector, geom: ArrayGeometry, az_deg, el_deg) -> np.ndarray:
    """Complex far field EF(dir) * sum_n w_n e^(+j*2pi*P_n.u(dir)) at arbitrary
    direction(s)."""
    if pv.n_elements != geom.n_elements:
        raise ValueError("phase vector length does not match the geometry")
    u = direction_unit_vectors(az_deg, el_deg)
    kernel = np.exp(2j * np.pi * (u @ geom.positions_wl.T))
    return element_factor(az_deg, el_deg, geom.element_model) * (kernel @ pv.weights())


def array_field(pv: PhaseVector, geom: ArrayGeometry, direction) -> complex:
    """Complex far-field value in one direction, given as a BeamPointingAngle
    or an (az_deg, el_deg) pair."""
    if isinstance(direction, BeamPointingAngle):
        az, el = direction.az_deg, direction.el_deg
    else:
        az, el = direction
    return complex(field_values(pv, geom, float(az), float(el)))


_STEERING_CACHE: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_STEERING_CACHE_MAX = 4


def _steering_matrix(geom: ArrayGeometry, grid: DirectionGrid) -> np.ndarray:
    """exp(+j*2pi*U.P^T) for all grid directions; cached because the matrix is
    reused for every weight vector evaluated on the same geometry and grid."""
    key = (geom.cache_key(), grid.key(), grid.n_directions)
    cached = _STEERING_CACHE.get(key)
    if cached is not None:
        _STEERING_CACHE.move_to_end(key)
        return cached
    u = direction_unit_vectors(grid.az_deg, grid.el_deg)
    matrix = np.exp(2j * np.pi * (u @ geom.positions_wl.T))
    _STEERING_CACHE[key] = matrix
    while len(_STEERING_CACHE) > _STEERING_CACHE_MAX:
        _STEERING_CACHE.popitem(last=False)
    return matrix


def radiation_pattern(pv: PhaseVector, geom: ArrayGeometry, grid: DirectionGrid) -> RadiationPattern:
    """Sampled |F| over the grid, deterministic for fixed inputs."""
    if pv.n_elements != geom.n_elements:
        raise ValueError("phase vector length does not match the geometry")
    field = _steering_matrix(geom, grid) @ pv.weights()
    mag = np.abs(field) * element_factor(grid.az_deg, grid.el_deg, geom.element_model)
    return RadiationPattern(grid, mag)


@dataclass(frozen=True, eq=False)
class Directivity:
    """Per-direction directivity in linear units and dBi (grid order)."""

    linear: np.ndarray
    dbi: np.ndarray

    @property
    def peak_dbi(self) -> float:
        return float(np.max(self.dbi))


def directivity(pattern: RadiationPattern) -> Directivity:
    """4pi |F|^2 / integral(|F|^2 dOmega) via the grid's solid-angle weights.

    The weighted sum of the result equals 4pi by construction; directions with
    zero magnitude get -inf dBi.
    """
    power = pattern.magnitude**2
    total = float(np.sum(power * pattern.grid.solid_angle_weights))
    if total <= 0.0:
        raise ValueError("directivity is undefined for an all-zero pattern")
    linear = 4.0 * np.pi * power / total
    with np.errstate(divide="ignore"):
        dbi = 10.0 * np.log10(linear)
    return Directivity(linear=linear, dbi=dbi)


def _tangent_basis(u: np.ndarray, plane_normal: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal vectors spanning the sphere's tangent plane at u.

    For a planar array the pattern is almost flat along the tangent direction
    that leaves the in-plane projection of u unchanged; aligning the first
    basis vector with it (the normalized component of the array normal
    orthogonal to u) decouples the search axes, so the walk can slide along
    that valley without disturbing the converged in-plane coordinates.
    """
    e1 = None
    if plane_normal is not None:
        candidate = plane_normal - (plane_normal @ u) * u
        norm = np.linalg.norm(candidate)
        if norm > 1e-6:  # near broadside the valley vanishes; any basis works
            e1 = candidate / norm
    if e1 is None:
        e1 = np.cross([0.0, 0.0, 1.0], u)
        norm = np.linalg.norm(e1)
        e1 = np.array([1.0, 0.0, 0.0]) if norm < 1e-12 else e1 / norm
    e2 = np.cross(u, e1)
    return e1, e2 / np.linalg.norm(e2)


def _plane_normal(positions: np.ndarray) -> np.ndarray | None:
    """Unit normal of the subspace spanned by the element positions, when the
    array is genuinely planar (rank 2); None otherwise."""
    if positions.shape[0] < 3:
        return None
    s = np.linalg.svd(positions, compute_uv=False)
    if s[0] <= 0 or s[1] / s[0] < 1e-9 or s[2] / s[0] > 1e-9:
        return None
    _, _, vt = np.linalg.svd(positions)
    return vt[2]


def _angles_from_unit(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    az = np.rad2deg(np.arctan2(u[..., 1], u[..., 0])) % 360.0
    el = np.rad2deg(np.arccos(np.clip(u[..., 2], -1.0, 1.0)))
    return az, el


def find_peak(
    pv: PhaseVector,
    geom: ArrayGeometry,
    coarse_step: float = 1.0,
    az_limits: tuple[float, float] = FULL_AZIMUTH,
    el_limits: tuple[float, float] = FULL_ELEVATION,
    refine_stages: int = 2,
) -> BeamPointingAngle:
    """Locate the direction of maximum |F| by coarse grid search plus staged
    local refinement.

    The coarse grid argmax (ties: lowest grid index) seeds a pattern search
    over the direction sphere: at each scale (coarse_step/10, then 10x finer
    per stage) a 21x21 mesh is laid out in the tangent plane of the incumbent
    direction, and the incumbent moves only on strict improvement, repeating
    until it stalls before the scale shrinks.  Refining in tangent-plane
    coordinates rather than in (az, el) matters near a planar array's plane,
    where the azimuth chart degenerates and an angular mesh gets stuck in a
    curved ridge; the sphere itself has no such pathology.  Worst-case
    pointing error stays within a tenth of the coarse step.

    A bare planar array radiates mirror-image lobes on both sides of its
    plane, making the full-sphere peak two-fold ambiguous; callers that
    measure steered beams should restrict the search to the served half-space
    (az_limits=(0, 180) for an x-z array).  With a flat pattern the first
    grid point wins by the tie-break.
    """
    if coarse_step <= 0:
        raise ValueError("coarse_step must be positive")
    if refine_stages < 1:
        raise ValueError("need at least one refine stage")
    grid = DirectionGrid.from_step(coarse_step, az_limits, el_limits)
    coarse_mag = radiation_pattern(pv, geom, grid).magnitude
    idx = int(np.argmax(coarse_mag))
    u_best = direction_unit_vectors(float(grid.az_deg[idx]), float(grid.el_deg[idx]))
    mag_best = float(coarse_mag[idx])

    weights = pv.weights()
    normal = _plane_normal(geom.positions_wl)
    offsets = np.arange(-10, 11)
    mesh_a = np.repeat(offsets, offsets.size)[:, None]
    mesh_b = np.tile(offsets, offsets.size)[:, None]
    step = math.radians(coarse_step)
    for _ in range(refine_stages):
        step = step / 10.0
        for _ in range(200):
            e1, e2 = _tangent_basis(u_best, normal)
            candidates = u_best + step * (mesh_a * e1 + mesh_b * e2)
            candidates = candidates / np.linalg.norm(candidates, axis=1, keepdims=True)
            az, el = _angles_from_unit(candidates)
            keep = (
                (el >= el_limits[0] - 1e-12)
                & (el <= el_limits[1] + 1e-12)
                & (az >= az_limits[0] - 1e-12)
                & (az <= az_limits[1] + 1e-12)
            )
            if not np.any(keep):
                break
            candidates, az, el = candidates[keep], az[keep], el[keep]
            mags = np.abs(np.exp(2j * np.pi * (candidates @ geom.positions_wl.T)) @ weights)
            mags = mags * element_factor(az, el, geom.element_model)
            j = int(np.argmax(mags))
            if mags[j] <= mag_best:
                break
            u_best = candidates[j]
            mag_best = float(mags[j])
    az_final, el_final = _angles_from_unit(u_best)
    return BeamPointingAngle(float(az_final) % 360.0, float(np.clip(el_final, 0.0, 180.0)))


def write_pattern_csv(pattern: RadiationPattern, path) -> None:
    """Dump a pattern as ``phi_deg,theta_deg,magnitude`` rows in grid order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi_deg", "theta_deg", "magnitude"])
        for az, el, mag in zip(pattern.grid.az_deg, pattern.grid.el_deg, pattern.magnitude):
            writer.writerow([repr(float(az)), repr(float(el)), repr(float(mag))])
