import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from hardylab import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, cli

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args])


class TestCommands:
    def test_constant(self, runner, tmp_path):
        out = tmp_path / 'ckn.csv'
        result = invoke(runner, 'constant', '-c', CONFIG_DIR / 'constant_ckn.json', '-o', out)
        assert result.exit_code == EXIT_OK, result.output
        lines = out.read_text().splitlines()
        assert lines[0].startswith('theorem,case,weight')
        assert lines[1].startswith('ckn,')
        assert (tmp_path / 'ckn.csv.meta.json').exists()

    def test_constant_json(self, runner, tmp_path):
        out = tmp_path / 'weighted.json'
        result = invoke(runner, 'constant', '-c', CONFIG_DIR / 'constant_weighted.json',
                        '-o', out, '--format', 'json')
        assert result.exit_code == EXIT_OK, result.output
        records = json.loads(out.read_text())
        assert {r['theorem'] for r in records} == {'thm13', 'thm31'}

    def test_verify_passes(self, runner, tmp_path, write_config):
        path = write_config({'command': 'verify', 'theorem': 'ckn', 'N': 3, 'p': 2,
                             'tests': ['tent', 'exp-bump']})
        result = invoke(runner, 'verify', '-c', path, '-o', tmp_path / 'v.csv')
        assert result.exit_code == EXIT_OK, result.output

    def test_verify_violation(self, runner, tmp_path):
        out = tmp_path / 'v.csv'
        result = invoke(runner, 'verify', '-c', CONFIG_DIR / 'verify_thm13.json', '-o', out,
                        '--fail-scale', 0.001)
        assert result.exit_code == EXIT_VIOLATION
        assert ',false,' in out.read_text()

    def test_sweep(self, runner, tmp_path):
        out = tmp_path / 's.csv'
        result = invoke(runner, 'sweep', '-c', CONFIG_DIR / 'sweep_ckn.json', '-o', out)
        assert result.exit_code == EXIT_OK, result.output
        assert out.read_text().splitlines()[-1].startswith('ckn,summary,')

    def test_lambda(self, runner, tmp_path):
        out = tmp_path / 'l.json'
        result = invoke(runner, 'lambda', '-c', CONFIG_DIR / 'lambda.json', '-o', out,
                        '--format', 'json')
        assert result.exit_code == EXIT_OK, result.output
        selected, cross = json.loads(out.read_text())
        assert selected['value'] == pytest.approx(cross['value'], rel=1e-6)

    def test_rearrange(self, runner, tmp_path):
        out = tmp_path / 'r.csv'
        result = invoke(runner, 'rearrange', '-c', CONFIG_DIR / 'rearrange.json', '-o', out)
        assert result.exit_code == EXIT_OK, result.output
        # coefficient row and three levels per weight
        assert len(out.read_text().splitlines()) == 1 + 3 * 4

    def test_theorems(self, runner):
        result = invoke(runner, '--debug', 'theorems')
        assert result.exit_code == EXIT_OK
        assert 'thm13' in result.output
        assert 'hardy1d' in result.output


class TestErrors:
    def test_malformed_config(self, runner, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"command": "constant", ')
        result = invoke(runner, 'constant', '-c', path, '-o', tmp_path / 'x.csv')
        assert result.exit_code == EXIT_ERROR
        assert not (tmp_path / 'x.csv').exists()

    def test_missing_file(self, runner, tmp_path):
        result = invoke(runner, 'constant', '-c', tmp_path / 'nope.json')
        assert result.exit_code == EXIT_ERROR

    def test_config_required(self, runner):
        assert invoke(runner, 'verify').exit_code == EXIT_ERROR

    def test_command_mismatch(self, runner, tmp_path):
        result = invoke(runner, 'verify', '-c', CONFIG_DIR / 'constant_ckn.json',
                        '-o', tmp_path / 'x.csv')
        assert result.exit_code == EXIT_ERROR

    def test_regime_violation(self, runner, tmp_path, write_config):
        path = write_config({'command': 'constant', 'theorem': 'ckn', 'N': 3, 'p': 2,
                             'alpha': 1})
        result = invoke(runner, 'constant', '-c', path, '-o', tmp_path / 'x.csv')
        assert result.exit_code == EXIT_ERROR


class TestDeterminism:
    def test_reports_are_byte_identical(self, runner, tmp_path):
        config = CONFIG_DIR / 'constant_weighted.json'
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        assert invoke(runner, 'constant', '-c', config, '-o', first).exit_code == EXIT_OK
        assert invoke(runner, 'constant', '-c', config, '-o', second).exit_code == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
