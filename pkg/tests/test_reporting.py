import io
import json
import math

import pandas as pd
import pytest

from config.settings import CSV_HEADER, DEFAULTS
from core.errors import ConfigError
from core.fractional import LambdaResult
from core.quotients import QuotientReport, SweepResult
from core.regimes import FracRegime
from utils.reporting import (
    ReportRow, emit_report, lambda_rows, metadata_path, rearrange_rows, render_report,
    row_from_report, sweep_rows,
)


def make_report(case='Case1', quotient=0.25, bound=0.5, test='tent'):
    return QuotientReport('thm13', case, 'const(1)', test, 5, 2.0, 0.0, None, 2.125,
                          quotient, 1.0, bound, quotient, bound - quotient,
                          quotient <= bound)


class TestRows:
    def test_row_from_report(self):
        row = row_from_report(make_report())
        assert row.case == 'Case1:tent'
        assert (row.value, row.bound, row.margin, row.holds) == (0.25, 0.5, 0.25, True)
        assert row.q == 2.125

    def test_case_equal_to_test(self):
        assert row_from_report(make_report(case='', test='tent')).case == 'tent'

    def test_sweep_summary(self):
        reports = [make_report(quotient=q).with_case(f"step-{k}")
                   for k, q in enumerate((0.3, 0.4, 0.49))]
        sweep = SweepResult(reports, 1 - 0.49 / 0.5, True, 0.95)
        rows = sweep_rows('thm13', sweep)
        assert [r.case for r in rows] == ['step-0:tent', 'step-1:tent', 'step-2:tent', 'summary']
        summary = rows[-1]
        assert summary.value == pytest.approx(0.02)
        assert summary.bound == pytest.approx(0.05)
        assert summary.holds is True

    def test_sweep_summary_short_of_target(self):
        reports = [make_report(quotient=0.3).with_case('step-0')]
        rows = sweep_rows('thm13', SweepResult(reports, 0.4, True, 0.95))
        assert rows[-1].holds is False
        assert rows[-1].margin == pytest.approx(-0.35)

    def test_lambda_rows(self):
        result = LambdaResult(FracRegime(3, 0.5, 2.0), 0.0796, 6.28, 'gauss-graded', 1e-12,
                              0.0797, 'tanh-sinh')
        first, second = lambda_rows(result)
        assert (first.case, first.scheme, first.value) == ('selected', 'gauss-graded', 0.0796)
        assert (second.case, second.scheme) == ('cross-check', 'tanh-sinh')
        assert second.est_error == pytest.approx(1e-4)

    def test_rearrange_rows(self):
        checks = {0.5: {'original': 1.0, 'rearranged': 1.0, 'rel_diff': 0.0},
                  2.0: {'original': 1.0, 'rearranged': 1.1, 'rel_diff': 0.1}}
        rows = rearrange_rows('1', 3, 2.0, 0.63, checks)
        assert [r.case for r in rows] == ['coefficient:d=2', 'level-0.5:d=2', 'level-2:d=2']
        assert rows[0].holds is None
        assert [r.holds for r in rows[1:]] == [True, False]


class TestRender:
    def test_csv_layout(self):
        row = ReportRow('ckn', '', 'const(1)', 5, 2.0, 0.0, value=0.25)
        lines = render_report([row]).splitlines()
        assert lines[0] == ','.join(CSV_HEADER)
        assert lines[1] == 'ckn,,const(1),5,2,0,,,0.25,,,,,'

    def test_csv_booleans(self):
        rows = [row_from_report(make_report()), row_from_report(make_report(quotient=0.75))]
        frame = pd.read_csv(io.StringIO(render_report(rows)), dtype={'holds': str})
        assert frame['holds'].tolist() == ['true', 'false']

    def test_csv_floats_round_trip(self):
        value = 1 / 3 + math.pi * 1e-7
        row = ReportRow('thm31', '', 'const(1)', 5, 2.0, 0.5, q=2.0, value=value)
        frame = pd.read_csv(io.StringIO(render_report([row])), float_precision='round_trip')
        assert frame['value'][0] == value

    def test_json_is_an_array(self):
        rows = [ReportRow('lambda', 'selected', N=3, p=2.0, s=0.5, value=math.nan)]
        records = json.loads(render_report(rows, 'json'))
        assert isinstance(records, list)
        assert list(records[0]) == CSV_HEADER
        assert records[0]['value'] is None
        assert records[0]['N'] == 3

    def test_deterministic(self):
        rows = [row_from_report(make_report()), ReportRow('ckn', value=0.1)]
        assert render_report(rows) == render_report(list(rows))
        assert render_report(rows, 'json') == render_report(list(rows), 'json')

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            render_report([], 'xml')


class TestEmit:
    def test_writes_report_and_sidecar(self, tmp_path):
        path = tmp_path / 'nested' / 'report.csv'
        rows = [ReportRow('ckn', value=0.25)]
        assert emit_report(rows, 'csv', path, metadata={'command': 'constant'}) == path
        assert path.read_text().startswith('theorem,case')

        meta = json.loads(metadata_path(path).read_text())
        assert metadata_path(path).name == 'report.csv.meta.json'
        assert meta['defaults'] == json.loads(json.dumps(DEFAULTS))
        assert (meta['command'], meta['format'], meta['rows']) == ('constant', 'csv', 1)
