"""Pointing-deviation and pattern-similarity metrics plus distribution summaries."""

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
    mgb_weights,
    planar_geometry,
    radiation_pattern,
)
from beamlab.metrics import (
    MetricSample,
    central_angle,
    central_angle_deg,
    cosine_similarity,
    empirical_cdf,
    quantiles,
)

BPA = st.builds(
    BeamPointingAngle,
    st.floats(min_value=0.0, max_value=359.999, allow_nan=False),
    st.floats(min_value=0.0, max_value=180.0, allow_nan=False),
)


class TestCentralAngle:
    def test_identical_points(self):
        bpa = BeamPointingAngle(47.3, 112.9)
        assert central_angle(bpa, bpa) == 0.0

    def test_orthogonal_equatorial_points(self):
        assert central_angle(BeamPointingAngle(0, 90), BeamPointingAngle(90, 90)) == pytest.approx(90.0)

    def test_same_azimuth_polar_pair(self):
        # cos30*cos150 + sin30*sin150 = -0.5 -> 120 degrees
        a = BeamPointingAngle(0, 30)
        b = BeamPointingAngle(0, 150)
        assert central_angle(a, b) == pytest.approx(120.0, abs=1e-12)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(3)
        az = rng.uniform(0, 360, 50)
        el = rng.uniform(0, 180, 50)
        vec = central_angle_deg(az, el, 10.0, 20.0)
        for i in range(50):
            assert vec[i] == central_angle(BeamPointingAngle(az[i], el[i]), BeamPointingAngle(10, 20))

    @given(BPA, BPA)
    @settings(max_examples=200)
    def test_symmetry_and_bounds(self, a, b):
        d_ab = central_angle(a, b)
        assert 0.0 <= d_ab <= 180.0
        assert d_ab == central_angle(b, a)

    @given(BPA, BPA, BPA)
    @settings(max_examples=200)
    def test_triangle_inequality(self, a, b, c):
        assert central_angle(a, c) <= central_angle(a, b) + central_angle(b, c) + 1e-9

    @given(BPA)
    @settings(max_examples=100)
    def test_identity_of_indiscernibles(self, a):
        assert central_angle(a, a) <= 1e-9


class TestCosineSimilarity:
    @staticmethod
    def _pattern(az, el, grid=None):
        geom = planar_geometry(8, 8, 0.5)
        grid = grid or DirectionGrid.from_step(5.0)
        return radiation_pattern(mgb_weights(BeamPointingAngle(az, el), geom), geom, grid)

    def test_reflexive(self):
        p = self._pattern(60, 90)
        assert cosine_similarity(p, p) == pytest.approx(1.0, abs=1e-12)

    def test_positive_scale_invariance(self):
        p = self._pattern(60, 90)
        scaled = type(p)(grid=p.grid, magnitude=p.magnitude * 4.2)
        assert cosine_similarity(p, scaled) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_support_is_zero(self):
        grid = DirectionGrid.from_step(30.0)
        n = grid.n_directions
        m1 = np.zeros(n)
        m2 = np.zeros(n)
        m1[: n // 2] = 1.0
        m2[n // 2 :] = 1.0
        P = type(self._pattern(0, 90))
        assert cosine_similarity(P(grid=grid, magnitude=m1), P(grid=grid, magnitude=m2)) == 0.0

    def test_detects_spatial_shift(self):
        p1 = self._pattern(60, 90)
        p2 = self._pattern(70, 90)
        assert cosine_similarity(p1, p2) < 1.0

    def test_symmetric(self):
        p1 = self._pattern(60, 90)
        p2 = self._pattern(61, 88)
        assert cosine_similarity(p1, p2) == cosine_similarity(p2, p1)

    def test_rejects_grid_mismatch(self):
        p1 = self._pattern(60, 90, DirectionGrid.from_step(5.0))
        p2 = self._pattern(60, 90, DirectionGrid.from_step(10.0))
        with pytest.raises(ValueError):
            cosine_similarity(p1, p2)

    def test_rejects_all_zero(self):
        p = self._pattern(60, 90)
        zero = type(p)(grid=p.grid, magnitude=np.zeros(p.grid.n_directions))
        with pytest.raises(ValueError):
            cosine_similarity(p, zero)


class TestQuantiles:
    def test_linear_interpolation_median(self):
        assert quantiles([1, 2, 3, 4], [50]) == [2.5]

    def test_constant_input(self):
        assert quantiles([7.0] * 10, [25, 50, 75, 95]) == [7.0] * 4

    def test_monotone_in_percentile(self):
        rng = np.random.default_rng(0)
        values = rng.normal(size=501)
        q = quantiles(values, [25, 50, 75, 95])
        assert q == sorted(q)

    def test_uniform_sample_convergence(self):
        rng = np.random.default_rng(123)
        values = rng.uniform(0, 1, 100_000)
        q = quantiles(values, [25, 50, 75, 95])
        np.testing.assert_allclose(q, [0.25, 0.50, 0.75, 0.95], atol=0.02)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            quantiles([], [50])

    def test_rejects_out_of_range_percentile(self):
        with pytest.raises(ValueError):
            quantiles([1.0], [101])


class TestEmpiricalCdf:
    def test_single_value(self):
        assert empirical_cdf([5]) == [(5.0, 1.0)]

    def test_duplicates_collapse(self):
        assert empirical_cdf([1, 1, 2]) == [(1.0, 2 / 3), (2.0, 1.0)]

    def test_fractions_non_decreasing_and_end_at_one(self):
        rng = np.random.default_rng(9)
        points = empirical_cdf(rng.normal(size=500))
        fractions = [f for _, f in points]
        assert fractions == sorted(fractions)
        assert fractions[-1] == 1.0

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            empirical_cdf([])


class TestMetricSample:
    def test_valid(self):
        s = MetricSample(BeamPointingAngle(1, 2), BeamPointingAngle(3, 4), 2.5, 0.99)
        assert s.central_angle_deg == 2.5

    @pytest.mark.parametrize("ca,csim", [(-0.1, 0.5), (181.0, 0.5), (1.0, -0.01), (1.0, 1.01), (math.nan, 0.5)])
    def test_rejects_out_of_domain(self, ca, csim):
        with pytest.raises(ValueError):
            MetricSample(BeamPointingAngle(0, 0), BeamPointingAngle(0, 0), ca, csim)
