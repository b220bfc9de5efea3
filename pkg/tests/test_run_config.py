import json

import pytest

from config.run_config import RunConfig, parse_config, resolve_weight, serialize_config
from core.errors import ConfigError, DimensionTooSmall, QRequired, RegimeViolation
from core.sphere import WEIGHT_CATALOG, SphericalWeight


def parse(**data):
    return parse_config(json.dumps(data))


class TestParse:
    def test_sample_configs(self, sample_configs):
        assert sample_configs
        for path in sample_configs:
            config = parse_config(path.read_text())
            assert isinstance(config, RunConfig)

    def test_single_theorem(self):
        config = parse(command='constant', theorem='ckn', N=5, p=2)
        assert config.theorems == ('ckn',)
        assert config.N == 5 and isinstance(config.N, int)
        assert config.alpha == 0.0

    def test_p_defaults_for_p2_theorems(self):
        assert parse(command='verify', theorem='thm13', N=5).p == 2.0

    def test_weights_and_tests(self):
        config = parse(command='verify', theorem='thm13', N=5, weight='hemisphere',
                       tests=['tent', {'radial': {'kind': 'tent', 'R': 2.0}}])
        assert config.weights == ('hemisphere',)
        assert len(config.test_objects()) == 2
        assert config.weight_objects() == [WEIGHT_CATALOG['hemisphere']]

    def test_all_weights(self):
        config = parse(command='constant', theorem='thm31', N=5, p=2, weights='all')
        assert len(config.weight_objects()) == len(WEIGHT_CATALOG)

    def test_default_tests_are_the_catalog(self):
        config = parse(command='verify', theorem='ckn', N=5, p=2)
        assert len(config.test_objects()) > 5

    def test_quadrature(self):
        config = parse(command='constant', theorem='thm13', N=5,
                       quadrature={'angular_nodes': 48})
        assert config.quadrature.angular_nodes == 48

    def test_rearrange_degree(self):
        assert parse(command='rearrange', N=5, p=2, alpha=0.5).rearrange_degree == 2.5
        assert parse(command='rearrange', N=5, degree=3).rearrange_degree == 3.0

    def test_selftest_needs_nothing(self):
        assert parse(command='selftest').command == 'selftest'


class TestRejects:
    def test_malformed_json(self):
        with pytest.raises(ConfigError, match='malformed'):
            parse_config('{"command": ')

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            parse_config('[1, 2]')

    def test_unknown_command(self):
        with pytest.raises(ConfigError, match='command'):
            parse(command='prove')

    def test_unknown_field(self):
        with pytest.raises(ConfigError, match='unknown field'):
            parse(command='constant', theorem='ckn', N=5, p=2, colour='red')

    def test_missing_fields(self):
        with pytest.raises(ConfigError, match='missing'):
            parse(command='constant', theorem='ckn', p=2)
        with pytest.raises(ConfigError, match='theorem'):
            parse(command='verify', N=5, p=2)

    def test_both_theorem_spellings(self):
        with pytest.raises(ConfigError):
            parse(command='constant', theorem='ckn', theorems=['ckn'], N=5, p=2)

    def test_unknown_theorem(self):
        with pytest.raises(ConfigError, match='unknown theorem'):
            parse(command='constant', theorem='thm99', N=5, p=2)

    @pytest.mark.parametrize('N', [2.5, True])
    def test_bad_dimension(self, N):
        with pytest.raises(ConfigError, match='integer'):
            parse(command='constant', theorem='ckn', N=N, p=2)

    def test_non_finite(self):
        with pytest.raises(RegimeViolation):
            parse_config('{"command": "constant", "theorem": "ckn", "N": 5, "p": 2, '
                         '"alpha": NaN}')

    def test_regime(self):
        with pytest.raises(RegimeViolation):
            parse(command='verify', theorem='ckn', N=3, p=2, alpha=1)

    def test_p2_only_theorems(self):
        with pytest.raises(RegimeViolation, match='p = 2'):
            parse(command='verify', theorem='thm13', N=5, p=3)
        with pytest.raises(RegimeViolation):
            parse(command='verify', theorem='thm11', N=5, p=2, alpha=0.5)

    def test_case13_checked(self):
        with pytest.raises(RegimeViolation):
            parse(command='verify', theorem='thm13', N=5, case='Case3')
        with pytest.raises(DimensionTooSmall):
            parse(command='verify', theorem='thm13', N=3, alpha=0.5)

    def test_threshold_q(self):
        with pytest.raises(QRequired):
            parse(command='constant', theorem='thm12', N=4, p=3)
        assert parse(command='constant', theorem='thm12', N=4, p=3, q=2).q == 2.0

    def test_fractional(self):
        with pytest.raises(RegimeViolation):
            parse(command='lambda', N=1, s=0.5, p=2)
        with pytest.raises(ConfigError, match='missing'):
            parse(command='lambda', N=3, p=2)

    def test_scheme_and_format(self):
        with pytest.raises(ConfigError, match='scheme'):
            parse(command='lambda', N=3, s=0.5, p=2, scheme='simpson')
        with pytest.raises(ConfigError, match='format'):
            parse(command='lambda', N=3, s=0.5, p=2, format='xml')

    def test_rearrange(self):
        with pytest.raises(ConfigError, match='levels'):
            parse(command='rearrange', N=3, p=2, levels=[1, 0])
        with pytest.raises(RegimeViolation):
            parse(command='rearrange', N=3, degree=3)

    def test_sweep_steps(self):
        with pytest.raises(ConfigError, match='steps'):
            parse(command='sweep', theorem='ckn', N=5, p=2, steps=0)

    def test_unknown_weight_and_test(self):
        with pytest.raises(ConfigError, match='unknown weight'):
            parse(command='verify', theorem='thm13', N=5, weights=['plaid'])
        with pytest.raises(ConfigError):
            parse(command='verify', theorem='thm13', N=5, tests=['no-such-test'])


class TestResolveWeight:
    def test_descriptor(self):
        g = resolve_weight({'kind': 'zonal_power', 'k': 3})
        assert g == SphericalWeight.zonal_power(3.0)

    def test_path(self, tmp_path):
        path = tmp_path / 'w.csv'
        path.write_text('0,1\n1.5707963267948966,2\n3.141592653589793,1\n')
        assert resolve_weight({'path': str(path)}).kind == 'sampled'

    def test_bad_descriptors(self):
        with pytest.raises(ConfigError):
            resolve_weight({'kind': 'cap', 'angle': 1.0})
        with pytest.raises(ConfigError):
            resolve_weight(3)


class TestSerialize:
    @pytest.mark.parametrize('data', [
        {'command': 'constant', 'theorems': ['thm13', 'thm31'], 'N': 5, 'p': 2,
         'weights': ['one', {'kind': 'cap', 'phi0': 1.0}]},
        {'command': 'sweep', 'theorem': 'thm14', 'N': 1, 's': 0.25, 'p': 2, 'steps': 4,
         'scheme': 'tanh-sinh', 'format': 'json'},
        {'command': 'rearrange', 'N': 3, 'degree': 2, 'levels': [0.5, 2]},
    ])
    def test_parse_serialize_parse(self, data):
        config = parse_config(json.dumps(data))
        assert parse_config(serialize_config(config)) == config

    def test_sorted_keys(self):
        text = serialize_config(parse(command='selftest'))
        keys = list(json.loads(text))
        assert keys == sorted(keys)
