"""Core beam-synthesis math: steering phases, quantization, patterns, peaks."""

import cmath
import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamlab.array_core import (
    ArrayGeometry,
    BeamPointingAngle,
    DirectionGrid,
    PhaseVector,
    array_field,
    directivity,
    element_factor,
    field_values,
    find_peak,
    mgb_weights,
    planar_geometry,
    quantize_phases,
    radiation_pattern,
    steering_phases_deg,
    wrap_phase_deg,
    write_pattern_csv,
)
from beamlab.metrics import central_angle

ANGLE = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False, allow_infinity=False)


def two_element_x_axis(spacing_wl=0.5):
    return ArrayGeometry(np.array([[0.0, 0.0, 0.0], [spacing_wl, 0.0, 0.0]]))


# ---------------------------------------------------------------------------
# wrapping and basic types
# ---------------------------------------------------------------------------

class TestWrapPhase:
    @given(ANGLE)
    @settings(max_examples=200)
    def test_range_and_equivalence(self, phase):
        w = wrap_phase_deg(phase)
        assert -180.0 < w <= 180.0
        # same point on the circle
        assert math.isclose(math.cos(math.radians(w)), math.cos(math.radians(phase)), abs_tol=1e-9)
        assert math.isclose(math.sin(math.radians(w)), math.sin(math.radians(phase)), abs_tol=1e-9)

    @pytest.mark.parametrize("raw,expected", [(180.0, 180.0), (-180.0, 180.0), (540.0, 180.0), (0.0, 0.0), (-90.0, -90.0)])
    def test_boundary_values(self, raw, expected):
        assert wrap_phase_deg(raw) == expected


class TestBeamPointingAngle:
    def test_valid_construction(self):
        bpa = BeamPointingAngle(60, 90)
        assert bpa.az_deg == 60.0 and bpa.el_deg == 90.0

    @pytest.mark.parametrize("az,el", [(-1, 90), (360, 90), (0, -0.1), (0, 180.1), (float("nan"), 90), (0, float("inf"))])
    def test_rejects_bad_angles(self, az, el):
        with pytest.raises(ValueError):
            BeamPointingAngle(az, el)

    def test_unit_vector(self):
        np.testing.assert_allclose(BeamPointingAngle(0, 90).unit_vector(), [1, 0, 0], atol=1e-15)
        np.testing.assert_allclose(BeamPointingAngle(90, 90).unit_vector(), [0, 1, 0], atol=1e-15)
        np.testing.assert_allclose(BeamPointingAngle(123, 0).unit_vector(), [0, 0, 1], atol=1e-15)


class TestArrayGeometry:
    def test_rejects_offset_origin(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.array([[1.0, 0, 0], [0, 0, 0]]))

    def test_rejects_duplicate_elements(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.array([[0.0, 0, 0], [0.5, 0, 0], [0.5, 0, 0]]))

    def test_rejects_unknown_model(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.zeros((1, 3)), element_model="patch")

    def test_planar_grid_layouts(self):
        xz = planar_geometry(2, 3, 0.5, plane="xz")
        assert xz.n_elements == 6 and xz.grid_shape == (2, 3)
        np.testing.assert_allclose(xz.positions_wl[1], [0.5, 0.0, 0.0])  # next column: +x
        np.testing.assert_allclose(xz.positions_wl[3], [0.0, 0.0, 0.5])  # next row: +z
        xy = planar_geometry(2, 2, 0.5, plane="xy")
        np.testing.assert_allclose(xy.positions_wl[2], [0.0, 0.5, 0.0])  # next row: +y

    def test_descriptor_roundtrip_fields(self):
        geom = planar_geometry(8, 8, 0.5)
        desc = geom.descriptor()
        assert desc["rows"] == 8 and desc["cols"] == 8 and desc["spacing_wl"] == 0.5
        assert desc["plane"] == "xz" and desc["element_model"] == "isotropic"


class TestPhaseVector:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            PhaseVector(np.array([-180.0]))

    def test_from_degrees_wraps(self):
        pv = PhaseVector.from_degrees([540.0, -90.0, 0.0])
        np.testing.assert_array_equal(pv.phases_deg, [180.0, -90.0, 0.0])

    @given(st.lists(ANGLE, min_size=1, max_size=16))
    @settings(max_examples=100)
    def test_weights_are_unit_modulus(self, phases):
        pv = PhaseVector.from_degrees(phases)
        np.testing.assert_allclose(np.abs(pv.weights()), 1.0, atol=1e-12)


# ---------------------------------------------------------------------------
# steering weights
# ---------------------------------------------------------------------------

class TestMgbWeights:
    def test_boresight_of_xy_array_is_all_zero(self):
        geom = planar_geometry(8, 8, 0.5, plane="xy")
        for az in (0.0, 45.0, 311.0):
            pv = mgb_weights(BeamPointingAngle(az, 0.0), geom)
            np.testing.assert_array_equal(pv.phases_deg, np.zeros(64))

    def test_two_element_endfire(self):
        # hand evaluation: phase_1 = -360 * 0.5 * sin(90)cos(0) = -180 -> wraps to +180
        pv = mgb_weights(BeamPointingAngle(0, 90), two_element_x_axis())
        np.testing.assert_array_equal(pv.phases_deg, [0.0, 180.0])

    def test_two_element_orthogonal_steering(self):
        pv = mgb_weights(BeamPointingAngle(90, 90), two_element_x_axis())
        np.testing.assert_array_equal(pv.phases_deg, [0.0, 0.0])

    def test_element_zero_phase_is_always_zero(self):
        geom = planar_geometry(4, 4, 0.5)
        rng = np.random.default_rng(0)
        for _ in range(20):
            bpa = BeamPointingAngle(rng.uniform(0, 360), rng.uniform(0, 180))
            assert mgb_weights(bpa, geom).phases_deg[0] == 0.0

    def test_position_shift_adds_common_offset_and_preserves_magnitude(self):
        geom = planar_geometry(4, 4, 0.5)
        bpa = BeamPointingAngle(70, 60)
        shift = np.array([0.3, -1.2, 0.7])
        base = steering_phases_deg(geom.positions_wl, bpa)
        shifted = steering_phases_deg(geom.positions_wl + shift, bpa)
        offsets = shifted - base
        np.testing.assert_allclose(offsets, offsets[0], atol=1e-9)
        # a common phase offset cannot change any pattern magnitude
        grid = DirectionGrid.from_step(10.0)
        p0 = radiation_pattern(PhaseVector.from_degrees(base), geom, grid)
        p1 = radiation_pattern(PhaseVector.from_degrees(base + 77.7), geom, grid)
        np.testing.assert_allclose(p0.magnitude, p1.magnitude, atol=1e-9)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------

class TestQuantizePhases:
    def test_hand_example_two_bit(self):
        pv = quantize_phases(PhaseVector(np.array([100.0])), 2)  # floor(100/90 + .5) = 1
        np.testing.assert_array_equal(pv.phases_deg, [90.0])

    def test_hand_example_three_bit(self):
        pv = quantize_phases(PhaseVector(np.array([170.0])), 3)  # floor(170/45 + .5) = 4
        np.testing.assert_array_equal(pv.phases_deg, [180.0])

    @pytest.mark.parametrize("bits", [1, 2, 3, 6])
    def test_lattice_values_are_fixed_points(self, bits):
        res = 360.0 / (1 << bits)
        lattice = wrap_phase_deg(np.arange(1 << bits) * res)
        pv = quantize_phases(PhaseVector.from_degrees(lattice), bits)
        np.testing.assert_array_equal(pv.phases_deg, np.sort(lattice)[np.argsort(np.argsort(lattice))])
        np.testing.assert_array_equal(pv.phases_deg, lattice)

    @pytest.mark.parametrize("bits", [0, -3, 17])
    def test_rejects_bad_resolution(self, bits):
        with pytest.raises(ValueError):
            quantize_phases(PhaseVector(np.array([10.0])), bits)

    @given(st.lists(ANGLE, min_size=1, max_size=8), st.integers(min_value=1, max_value=8))
    @settings(max_examples=150)
    def test_idempotent_and_bounded_error(self, phases, bits):
        pv = PhaseVector.from_degrees(phases)
        q1 = quantize_phases(pv, bits)
        q2 = quantize_phases(q1, bits)
        np.testing.assert_array_equal(q1.phases_deg, q2.phases_deg)
        res = 360.0 / (1 << bits)
        circular = np.abs(wrap_phase_deg(q1.phases_deg - pv.phases_deg))
        assert np.all(circular <= res / 2 + 1e-9)

    @given(st.lists(ANGLE, min_size=1, max_size=8), st.integers(min_value=1, max_value=7))
    @settings(max_examples=100)
    def test_lattice_refinement(self, phases, bits):
        # the b-bit lattice is a subset of the (b+1)-bit lattice
        q = quantize_phases(PhaseVector.from_degrees(phases), bits)
        refined = quantize_phases(q, bits + 1)
        np.testing.assert_array_equal(q.phases_deg, refined.phases_deg)


# ---------------------------------------------------------------------------
# element factor and fields
# ---------------------------------------------------------------------------

class TestElementFactor:
    def test_isotropic_everywhere_one(self):
        assert element_factor(12.0, 34.0, "isotropic") == 1.0

    def test_dipole_broadside_and_null(self):
        assert element_factor(0.0, 90.0, "small-dipole-z") == pytest.approx(1.0)
        assert element_factor(0.0, 0.0, "small-dipole-z") == pytest.approx(0.0, abs=1e-15)


class TestArrayField:
    def test_single_element_is_unity_everywhere(self):
        geom = ArrayGeometry(np.zeros((1, 3)))
        pv = PhaseVector(np.array([0.0]))
        for az, el in [(0, 0), (123, 45), (270, 170)]:
            assert abs(array_field(pv, geom, (az, el))) == pytest.approx(1.0)

    def test_coherent_sum_at_steering_direction(self):
        geom = planar_geometry(8, 8, 0.5)
        bpa = BeamPointingAngle(60, 90)
        pv = mgb_weights(bpa, geom)
        assert abs(array_field(pv, geom, bpa)) == pytest.approx(64.0, rel=1e-12)

    def test_half_wavelength_null(self):
        # two-term sum: 1 + exp(j*pi) = 0
        pv = PhaseVector(np.array([0.0, 0.0]))
        assert abs(array_field(pv, two_element_x_axis(), (0, 90))) == pytest.approx(0.0, abs=1e-12)


class TestRadiationPattern:
    def test_single_isotropic_element_flat(self):
        geom = ArrayGeometry(np.zeros((1, 3)))
        grid = DirectionGrid.from_step(10.0)
        pattern = radiation_pattern(PhaseVector(np.array([0.0])), geom, grid)
        np.testing.assert_allclose(pattern.magnitude, 1.0, atol=1e-15)

    def test_deterministic(self):
        geom = planar_geometry(4, 4, 0.5)
        pv = mgb_weights(BeamPointingAngle(45, 80), geom)
        grid = DirectionGrid.from_step(5.0)
        a = radiation_pattern(pv, geom, grid).magnitude
        b = radiation_pattern(pv, geom, grid).magnitude
        np.testing.assert_array_equal(a, b)

    def test_matches_naive_per_direction_sum(self):
        # independent oracle: plain python/cmath double loop
        geom = planar_geometry(8, 8, 0.5, element_model="small-dipole-z")
        pv = mgb_weights(BeamPointingAngle(75, 60), geom)
        grid = DirectionGrid.from_step(10.0)
        pattern = radiation_pattern(pv, geom, grid)
        weights = [cmath.exp(1j * math.radians(p)) for p in pv.phases_deg]
        for i in range(grid.n_directions):
            az = math.radians(grid.az_deg[i])
            el = math.radians(grid.el_deg[i])
            u = (math.sin(el) * math.cos(az), math.sin(el) * math.sin(az), math.cos(el))
            total = 0j
            for w, pos in zip(weights, geom.positions_wl):
                total += w * cmath.exp(2j * math.pi * (pos[0] * u[0] + pos[1] * u[1] + pos[2] * u[2]))
            expected = abs(math.sin(el)) * abs(total)
            assert abs(pattern.magnitude[i] - expected) < 1e-10

    def test_pattern_csv_roundtrip(self, tmp_path):
        geom = planar_geometry(2, 2, 0.5)
        pattern = radiation_pattern(mgb_weights(BeamPointingAngle(30, 90), geom), geom, DirectionGrid.from_step(30.0))
        path = tmp_path / "pattern.csv"
        write_pattern_csv(pattern, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["phi_deg", "theta_deg", "magnitude"]
        data = np.array([[float(v) for v in row] for row in rows[1:]])
        np.testing.assert_array_equal(data[:, 0], pattern.grid.az_deg)
        np.testing.assert_array_equal(data[:, 1], pattern.grid.el_deg)
        np.testing.assert_array_equal(data[:, 2], pattern.magnitude)


class TestDirectionGrid:
    def test_solid_angle_sums_to_sphere(self):
        grid = DirectionGrid.from_step(1.0)
        assert abs(grid.solid_angle_weights.sum() - 4 * math.pi) / (4 * math.pi) < 0.01

    def test_ordering_is_elevation_major(self):
        grid = DirectionGrid.from_step(90.0)
        np.testing.assert_array_equal(grid.az_deg, [0, 90, 180, 270] * 3)
        np.testing.assert_array_equal(grid.el_deg, [0, 0, 0, 0, 90, 90, 90, 90, 180, 180, 180, 180])

    def test_restricted_limits_include_endpoints(self):
        grid = DirectionGrid.from_step(30.0, az_limits=(0, 180), el_limits=(30, 150))
        assert grid.az_deg.max() == 180.0 and grid.el_deg.min() == 30.0 and grid.el_deg.max() == 150.0

    def test_rejects_uneven_step(self):
        with pytest.raises(ValueError):
            DirectionGrid.from_step(7.0)


# ---------------------------------------------------------------------------
# directivity
# ---------------------------------------------------------------------------

class TestDirectivity:
    def test_isotropic_element_is_zero_dbi(self):
        geom = ArrayGeometry(np.zeros((1, 3)))
        pattern = radiation_pattern(PhaseVector(np.array([0.0])), geom, DirectionGrid.from_step(1.0))
        d = directivity(pattern)
        np.testing.assert_allclose(d.linear, 1.0, rtol=0.01)

    def test_scale_invariance(self):
        geom = planar_geometry(4, 4, 0.5)
        grid = DirectionGrid.from_step(2.0)
        pattern = radiation_pattern(mgb_weights(BeamPointingAngle(90, 90), geom), geom, grid)
        scaled = type(pattern)(grid=pattern.grid, magnitude=pattern.magnitude * 3.7)
        np.testing.assert_allclose(directivity(pattern).linear, directivity(scaled).linear, rtol=1e-12)

    def test_integrates_to_four_pi(self):
        geom = planar_geometry(8, 8, 0.5)
        pattern = radiation_pattern(mgb_weights(BeamPointingAngle(60, 90), geom), geom, DirectionGrid.from_step(1.0))
        d = directivity(pattern)
        total = np.sum(d.linear * pattern.grid.solid_angle_weights)
        assert abs(total - 4 * math.pi) / (4 * math.pi) < 0.01

    def test_rejects_all_zero_pattern(self):
        grid = DirectionGrid.from_step(30.0)
        pattern = type(radiation_pattern(PhaseVector(np.array([0.0])), ArrayGeometry(np.zeros((1, 3))), grid))(
            grid=grid, magnitude=np.zeros(grid.n_directions)
        )
        with pytest.raises(ValueError):
            directivity(pattern)

    def test_broadside_peak_matches_integration_oracle(self):
        # oracle: independent trapezoid-rule integration of |F|^2 on a finer grid
        geom = planar_geometry(8, 8, 0.5)
        bpa = BeamPointingAngle(90, 90)  # array normal for the x-z plane grid
        pv = mgb_weights(bpa, geom)
        d_impl = directivity(radiation_pattern(pv, geom, DirectionGrid.from_step(1.0))).peak_dbi

        step = 0.25
        el = np.deg2rad(np.arange(0.0, 180.0 + step, step))
        az = np.deg2rad(np.arange(0.0, 360.0, step))
        weights = pv.weights()
        peak_power = abs(complex(field_values(pv, geom, bpa.az_deg, bpa.el_deg))) ** 2
        row_integrals = np.empty(el.size)
        for i, th in enumerate(el):
            u = np.column_stack(
                [np.sin(th) * np.cos(az), np.sin(th) * np.sin(az), np.full(az.size, np.cos(th))]
            )
            f = np.exp(2j * np.pi * (u @ geom.positions_wl.T)) @ weights
            # periodic in azimuth: plain Riemann sum is exact-enough
            row_integrals[i] = np.sum(np.abs(f) ** 2) * np.deg2rad(step) * np.sin(th)
        total = np.trapezoid(row_integrals, dx=np.deg2rad(step))
        d_oracle = 10 * np.log10(4 * np.pi * peak_power / total)
        assert abs(d_impl - d_oracle) <= 1.0


# ---------------------------------------------------------------------------
# peak search
# ---------------------------------------------------------------------------

class TestFindPeak:
    def test_recovers_steering_direction(self):
        geom = planar_geometry(8, 8, 0.5)
        for az, el in [(60, 90), (100, 45)]:
            bpa = BeamPointingAngle(az, el)
            peak = find_peak(mgb_weights(bpa, geom), geom, 1.0, az_limits=(0, 180))
            assert central_angle(peak, bpa) <= 0.1

    def test_flat_pattern_returns_first_grid_point(self):
        geom = ArrayGeometry(np.zeros((1, 3)))
        peak = find_peak(PhaseVector(np.array([0.0])), geom, 30.0)
        assert (peak.az_deg, peak.el_deg) == (0.0, 0.0)

    def test_peak_correctness_over_sector(self):
        # spot-check of the property gated in the acceptance suite
        geom = planar_geometry(8, 8, 0.5)
        rng = np.random.default_rng(42)
        for _ in range(25):
            bpa = BeamPointingAngle(rng.uniform(0, 120), rng.uniform(30, 150))
            peak = find_peak(mgb_weights(bpa, geom), geom, 1.0, az_limits=(0, 180))
            assert central_angle(peak, bpa) <= 0.1

    def test_rejects_nonpositive_step(self):
        geom = planar_geometry(2, 2, 0.5)
        with pytest.raises(ValueError):
            find_peak(mgb_weights(BeamPointingAngle(90, 90), geom), geom, 0.0)
