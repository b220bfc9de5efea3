import math

import numpy as np
import pytest
from scipy.special import gamma, hyp2f1

from config.settings import LAMBDA_NODES
from core.errors import ConfigError, KernelSingularity, NonnegRequired, RegimeViolation
from core.fractional import (
    SCHEMES, angular_mass, angular_norm, frac_lhs_radial, frac_seminorm_radial,
    lambda_constant, psi, psi_array, psi_gap, psi_table, seminorm_radial,
)
from core.profiles import ExpBump, Tent
from core.regimes import FracRegime
from core.sphere import WEIGHT_CATALOG, SphericalWeight, surface_measure


def psi_closed_form(frac, r):
    """|S^{N-1}| 2F1((N+sp)/2, (sp+2)/2; N/2; r^2)."""
    return surface_measure(frac.N) * hyp2f1((frac.N + frac.sp) / 2, (frac.sp + 2) / 2,
                                            frac.N / 2, r * r)


def inverse_hardy_constant(N, s):
    """1 / C_{N,s} for p = 2, from the closed form of the sharp fractional Hardy constant."""
    C = 2 * math.pi ** (N / 2) * gamma((N + 2 * s) / 4) ** 2 * abs(gamma(-s)) \
        / (gamma((N - 2 * s) / 4) ** 2 * gamma((N + 2 * s) / 2))
    return 1 / C


class TestPsi:
    @pytest.mark.parametrize('N,s,p', [(2, 0.5, 2), (3, 0.5, 2), (5, 0.25, 3), (4, 0.75, 1.5)])
    @pytest.mark.parametrize('r', [0.0, 0.3, 0.7, 0.9])
    def test_against_hypergeometric(self, N, s, p, r):
        frac = FracRegime(N, s, p)
        assert psi(frac, r) == pytest.approx(psi_closed_form(frac, r), rel=1e-9)

    def test_one_dimension(self):
        frac = FracRegime(1, 0.25, 2)
        assert psi(frac, 0.5) == pytest.approx(0.5 ** -1.5 + 1.5 ** -1.5, rel=1e-15)

    def test_closed_form_near_the_singularity(self):
        # N = 3, sp = 1: Psi(r) = 4 pi / (1 - r^2)^2
        frac = FracRegime(3, 0.5, 2)
        for eps in (1e-3, 1e-6, 1e-8):
            expected = 4 * math.pi / (eps * (2 - eps)) ** 2
            assert psi_gap(frac, eps) == pytest.approx(expected, rel=1e-9)

    def test_domain(self):
        frac = FracRegime(3, 0.5, 2)
        with pytest.raises(KernelSingularity):
            psi(frac, 1.0)
        with pytest.raises(RegimeViolation):
            psi(frac, -0.1)
        with pytest.raises(KernelSingularity):
            psi_gap(frac, 0.0)

    @pytest.mark.parametrize('N,s,p', [(1, 0.25, 2), (2, 0.5, 2), (3, 0.5, 2), (5, 0.25, 3),
                                       (4, 0.75, 1.5)])
    def test_strictly_increasing(self, N, s, p):
        values = psi_array(FracRegime(N, s, p), np.linspace(0.0, 0.98, 50))
        assert np.all(np.diff(values) > 0)

    def test_array_and_table(self):
        frac = FracRegime(3, 0.5, 2)
        values = psi_array(frac, [0.0, 0.5])
        assert values[0] == pytest.approx(surface_measure(3), rel=1e-12)
        table = psi_table(frac)
        assert [row.r for row in table] == [0.0, 0.5, 0.9, 0.99]
        assert all(b.value > a.value for a, b in zip(table, table[1:]))


class TestLambda:
    @pytest.mark.parametrize('N,s', [(3, 0.5), (2, 0.25), (1, 0.25), (4, 0.75)])
    def test_matches_closed_form_for_p2(self, N, s):
        result = lambda_constant(FracRegime(N, s, 2.0))
        assert result.value == pytest.approx(inverse_hardy_constant(N, s), rel=1e-6)

    def test_three_dimensions_half(self):
        assert lambda_constant(FracRegime(3, 0.5, 2.0)).value == \
            pytest.approx(1 / (4 * math.pi), rel=1e-6)

    @pytest.mark.parametrize('scheme', SCHEMES)
    def test_schemes_cross_check(self, scheme):
        result = lambda_constant(FracRegime(3, 0.4, 2.5), scheme)
        assert result.scheme_id == scheme
        assert result.cross_scheme != scheme
        assert result.value == pytest.approx(result.cross_value, rel=1e-6)
        assert result.value == pytest.approx(1 / (2 * result.inverse_integral))
        assert result.est_error <= 1e-6 * result.value

    @pytest.mark.slow
    @pytest.mark.parametrize('p', [1.0, 1.5, 2.0])
    @pytest.mark.parametrize('s', [0.25, 0.5, 0.75])
    @pytest.mark.parametrize('N', [1, 2, 3])
    def test_schemes_agree_on_grid(self, N, s, p):
        if s * p >= N:
            pytest.skip('N > sp fails')
        result = lambda_constant(FracRegime(N, s, p))
        assert result.value == pytest.approx(result.cross_value, rel=1e-8)

    @pytest.mark.slow
    @pytest.mark.parametrize('p', [1.0, 1.5, 2.0])
    @pytest.mark.parametrize('s', [0.25, 0.5, 0.75])
    @pytest.mark.parametrize('N', [1, 2, 3])
    def test_node_doubling(self, N, s, p):
        if s * p >= N:
            pytest.skip('N > sp fails')
        frac = FracRegime(N, s, p)
        base = lambda_constant(frac, nodes=LAMBDA_NODES)
        doubled = lambda_constant(frac, nodes=2 * LAMBDA_NODES)
        assert doubled.value == pytest.approx(base.value, rel=1e-9)

    def test_describe(self):
        data = lambda_constant(FracRegime(2, 0.5, 1.5)).describe()
        assert data['scheme'] == 'gauss-graded'
        assert data['cross_scheme'] == 'tanh-sinh'

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError):
            lambda_constant(FracRegime(3, 0.5, 2.0), 'simpson')


class TestSeminorm:
    def test_scaling_law(self):
        frac = FracRegime(2, 0.25, 2.0)
        f = Tent(1.0)
        base = frac_seminorm_radial(f, frac)
        dilated = frac_seminorm_radial(f.dilate(2.0), frac)
        assert dilated == pytest.approx(2.0 ** (frac.sp - frac.N) * base, rel=1e-5)

    def test_homogeneity(self):
        frac = FracRegime(1, 0.25, 3.0)
        f = Tent(1.0)
        assert frac_seminorm_radial(f.scaled(2.0), frac) == \
            pytest.approx(8.0 * frac_seminorm_radial(f, frac), rel=1e-8)

    def test_band_bound_reported(self):
        result = seminorm_radial(Tent(1.0), FracRegime(3, 0.5, 2.0))
        assert result.value > 0
        assert 0 < result.band_bound <= 1e-6 * result.value
        assert 0 < result.delta <= 1 / 16
        assert result.tau_nodes > 0

    def test_constant_profile_has_zero_seminorm(self):
        assert seminorm_radial(Tent(1.0).scaled(0.0), FracRegime(2, 0.5, 2.0)).value == 0.0

    @pytest.mark.parametrize('N,s,p', [(1, 0.25, 2.0), (3, 0.5, 2.0), (2, 0.3, 1.5)])
    def test_hardy_holds(self, N, s, p):
        frac = FracRegime(N, s, p)
        lam = lambda_constant(frac).value
        for f in (Tent(1.0), ExpBump(0.5, 10.0)):
            lhs = frac_lhs_radial(f, WEIGHT_CATALOG['one'], frac)
            assert lhs <= lam * frac_seminorm_radial(f, frac)


class TestFractionalLhs:
    def test_tent_in_the_plane(self):
        # 2 pi int (1 - r)^2 dr
        frac = FracRegime(2, 0.5, 2.0)
        assert frac_lhs_radial(Tent(1.0), WEIGHT_CATALOG['one'], frac) == \
            pytest.approx(2 * math.pi / 3, rel=1e-12)

    def test_weighted(self, quad):
        frac = FracRegime(3, 0.5, 2.0)
        full = frac_lhs_radial(Tent(1.0), WEIGHT_CATALOG['one'], frac, quad)
        half = frac_lhs_radial(Tent(1.0), WEIGHT_CATALOG['hemisphere'], frac, quad)
        assert half == pytest.approx(0.5 * full, rel=1e-12)

    def test_needs_nonneg_weight(self):
        with pytest.raises(NonnegRequired):
            frac_lhs_radial(Tent(1.0), SphericalWeight.constant(-1.0), FracRegime(2, 0.5, 2.0))

    def test_zero_sphere(self):
        hemisphere = WEIGHT_CATALOG['hemisphere']
        assert angular_mass(hemisphere, 1) == 1.0
        assert angular_norm(SphericalWeight.constant(1.0), 2.0, 1) == pytest.approx(math.sqrt(2))
        assert angular_mass(hemisphere, 3) == pytest.approx(2 * math.pi, rel=1e-12)
