import math

import numpy as np
import pytest

from core.errors import InvalidLevel, NonnegRequired, RegimeViolation, ShapeMismatch
from core.fractional import frac_seminorm_radial
from core.profiles import Tent, TruncatedPower
from core.rearrangement import (
    HomogeneousWeight, SampledField, decreasing_rearrangement, equimeasurability_check,
    hardy_littlewood_gap, load_sampled_field, radial_rearrangement, radial_superlevel_measure,
    rearranged_coefficient, superlevel_measure,
)
from core.regimes import FracRegime
from core.sphere import WEIGHT_CATALOG, SphericalWeight, surface_measure


class TestHomogeneousWeight:
    def test_constant_weight_is_already_radial(self, quad):
        w = HomogeneousWeight(SphericalWeight.constant(2.0), 2.0)
        assert rearranged_coefficient(w, 3, quad) == pytest.approx(2.0, rel=1e-14)

    def test_hemisphere_coefficient(self, quad):
        w = HomogeneousWeight(WEIGHT_CATALOG['hemisphere'], 2.0)
        assert rearranged_coefficient(w, 3, quad) == pytest.approx(0.5 ** (2 / 3), rel=1e-12)

    def test_superlevel_measure(self, quad):
        # {1/|y|^2 > 1/4} is the ball of radius 2 in R^3
        w = HomogeneousWeight(WEIGHT_CATALOG['one'], 2.0)
        assert superlevel_measure(w, 0.25, 3, quad) == pytest.approx(32 * math.pi / 3,
                                                                      rel=1e-14)

    @pytest.mark.parametrize('name', ['one', 'hemisphere', 'polar-cap', 'cos2', 'tilted'])
    def test_equimeasurable(self, name, quad):
        w = HomogeneousWeight(WEIGHT_CATALOG[name], 2.5)
        checks = equimeasurability_check(w, 5, (0.1, 1.0, 7.5), quad)
        assert set(checks) == {0.1, 1.0, 7.5}
        for check in checks.values():
            assert check['rel_diff'] < 1e-10

    @pytest.mark.parametrize('N', [3, 5])
    @pytest.mark.parametrize('lower,upper', [('polar-cap', 'hemisphere'), ('hemisphere', 'one'),
                                             ('cos2', 'abs-cos'), ('abs-cos', 'one'),
                                             ('one', 'two')])
    def test_coefficient_is_monotone_in_weight(self, lower, upper, N, quad):
        small = rearranged_coefficient(HomogeneousWeight(WEIGHT_CATALOG[lower], 2.0), N, quad)
        large = rearranged_coefficient(HomogeneousWeight(WEIGHT_CATALOG[upper], 2.0), N, quad)
        assert small < large

    def test_radial_superlevel(self):
        assert radial_superlevel_measure(1.0, 2.0, 1.0, 3) == pytest.approx(4 * math.pi / 3)

    def test_invalid_level(self, quad):
        w = HomogeneousWeight(WEIGHT_CATALOG['one'], 2.0)
        with pytest.raises(InvalidLevel):
            superlevel_measure(w, 0.0, 3, quad)
        with pytest.raises(InvalidLevel):
            radial_superlevel_measure(1.0, 2.0, -1.0, 3)

    def test_domain(self, quad):
        with pytest.raises(RegimeViolation):
            HomogeneousWeight(WEIGHT_CATALOG['one'], 0.0)
        with pytest.raises(NonnegRequired):
            HomogeneousWeight(SphericalWeight.constant(-1.0), 2.0)
        w = HomogeneousWeight(WEIGHT_CATALOG['one'], 3.0)
        with pytest.raises(RegimeViolation):
            rearranged_coefficient(w, 3, quad)


class TestSampledField:
    def test_validation(self):
        with pytest.raises(NonnegRequired):
            SampledField(np.array([1.0, -1.0]))
        with pytest.raises(ShapeMismatch):
            SampledField(np.array([1.0, 2.0]), np.array([1.0]))

    def test_rearrangement_keeps_distribution(self):
        rng = np.random.default_rng(7)
        f = SampledField(rng.random(50), rng.random(50) + 0.1)
        g = decreasing_rearrangement(f)
        assert np.all(np.diff(g.values) <= 0)
        for t in (0.1, 0.5, 0.9):
            assert g.superlevel(t) == pytest.approx(f.superlevel(t), rel=1e-14)
        assert g.lq_sum(2.0) == pytest.approx(f.lq_sum(2.0), rel=1e-14)

    def test_hardy_littlewood(self):
        u = SampledField(np.array([1.0, 2.0]))
        v = SampledField(np.array([2.0, 1.0]))
        assert hardy_littlewood_gap(u, v) == pytest.approx(1.0)
        assert hardy_littlewood_gap(u, u) == pytest.approx(0.0, abs=1e-14)

    def test_hardy_littlewood_random(self):
        rng = np.random.default_rng(11)
        measures = rng.random(40) + 0.5
        u = SampledField(rng.random(40), measures)
        v = SampledField(rng.random(40), measures)
        assert hardy_littlewood_gap(u, v) >= 0.0

    def test_hardy_littlewood_many_pairs(self):
        rng = np.random.default_rng(1000)
        for _ in range(1000):
            n = int(rng.integers(1, 64))
            measures = rng.random(n) + 0.1
            # integer values give ties between cells
            if rng.random() < 0.5:
                u_values, v_values = rng.random(n), rng.random(n)
            else:
                u_values = rng.integers(0, 4, n).astype(float)
                v_values = rng.integers(0, 4, n).astype(float)
            gap = hardy_littlewood_gap(SampledField(u_values, measures),
                                       SampledField(v_values, measures))
            assert gap >= -1e-12, (n, gap)

    def test_hardy_littlewood_needs_same_cells(self):
        with pytest.raises(ShapeMismatch):
            hardy_littlewood_gap(SampledField(np.ones(3)), SampledField(np.ones(4)))

    def test_load(self, tmp_path):
        path = tmp_path / 'field.csv'
        path.write_text('3.0,1.0\n1.0,2.0\n2.0,0.5\n')
        f = load_sampled_field(path)
        assert len(f) == 3
        assert f.superlevel(1.5) == pytest.approx(1.5)


class TestRadialRearrangement:
    def test_decreasing_profile_is_fixed(self):
        f = Tent(1.0)
        g = radial_rearrangement(f, 3)
        r = np.array([0.2, 0.5, 0.8])
        assert g.value(r) == pytest.approx(f.value(r), abs=1e-3)

    def test_result_is_decreasing_and_equimeasurable(self):
        f = TruncatedPower(1.0, 0.2, 1.5, 0.5)
        g = radial_rearrangement(f, 3)
        assert np.all(np.diff(g.values) <= 0)
        ball = surface_measure(3) / 3
        r = np.linspace(0.0, f.support, 4097)
        shells = ball * np.diff(r ** 3)
        mids = 0.5 * (r[:-1] + r[1:])
        for t in (0.3, 0.6):
            original = shells[f.value(mids) > t].sum()
            radius = g.radii[np.searchsorted(-g.values, -t, side='left') - 1]
            assert ball * radius ** 3 == pytest.approx(original, rel=5e-3)

    def test_energy_does_not_increase(self):
        # rises on [0.2, 1], then ramps down: strictly non-monotone
        f = TruncatedPower(1.0, 0.2, 1.5, 0.5)
        g = radial_rearrangement(f, 3)
        assert g.moment(3.0, 2.0, derivative=True) < f.moment(3.0, 2.0, derivative=True)
        assert g.moment(3.0, 2.0) == pytest.approx(f.moment(3.0, 2.0), rel=5e-3)

    def test_weighted_energy_with_nonpositive_alpha(self):
        # weight |x|^{-alpha} with alpha = -1
        f = TruncatedPower(1.0, 0.2, 1.5, 0.5)
        g = radial_rearrangement(f, 3)
        assert g.moment(4.0, 2.0, derivative=True) < f.moment(4.0, 2.0, derivative=True)

    @pytest.mark.slow
    def test_seminorm_does_not_increase(self):
        frac = FracRegime(3, 0.25, 2.0)
        f = TruncatedPower(1.0, 0.2, 1.5, 0.5)
        g = radial_rearrangement(f, 3, cells=512)
        assert frac_seminorm_radial(g, frac) < frac_seminorm_radial(f, frac)
