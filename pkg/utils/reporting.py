"""Flat report rows and their CSV / JSON emission."""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import pandas as pd

from config.settings import CSV_HEADER, DEFAULTS, REPORT_FORMATS
from core.errors import ConfigError
from core.fractional import LambdaResult
from core.quotients import QuotientReport, SweepResult

# Relative tolerance of the equimeasurability rows
EQUIMEASURE_TOL = 1e-10


@dataclass(frozen=True)
class ReportRow:
    """One line of a report; columns follow CSV_HEADER."""

    theorem: str
    case: str = ''
    weight: str = ''
    N: Optional[int] = None
    p: Optional[float] = None
    alpha: Optional[float] = None
    s: Optional[float] = None
    q: Optional[float] = None
    value: Optional[float] = None
    bound: Optional[float] = None
    margin: Optional[float] = None
    holds: Optional[bool] = None
    scheme: str = ''
    est_error: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


def row_from_report(report: QuotientReport) -> ReportRow:
    parts = (report.case,) if report.case == report.test else (report.case, report.test)
    case = ':'.join(part for part in parts if part)
    return ReportRow(report.theorem, case, report.weight, report.N, report.p, report.alpha,
                     report.s, report.q, report.quotient, report.bound, report.margin,
                     report.holds, report.scheme, report.est_error)


def sweep_rows(theorem: str, sweep: SweepResult) -> List[ReportRow]:
    """One row per step, then a summary row: value = final gap 1 - quotient/bound,
    bound = the allowed gap 1 - target, holds = within it and monotone."""
    rows = [row_from_report(r) for r in sweep.reports]
    last = sweep.reports[-1]
    allowed = 1.0 - sweep.target
    rows.append(ReportRow(theorem, 'summary', last.weight, last.N, last.p, last.alpha, last.s,
                          last.q, sweep.final_gap, allowed, allowed - sweep.final_gap,
                          sweep.reached and sweep.monotone, last.scheme, last.est_error))
    return rows


def lambda_rows(result: LambdaResult) -> List[ReportRow]:
    """The selected scheme first, then the cross-check scheme."""
    frac = result.frac
    base = dict(theorem='lambda', N=frac.N, p=frac.p, s=frac.s)
    return [
        ReportRow(case='selected', value=result.value, scheme=result.scheme_id,
                  est_error=result.est_error, **base),
        ReportRow(case='cross-check', value=result.cross_value, scheme=result.cross_scheme,
                  est_error=abs(result.value - result.cross_value), **base),
    ]


def rearrange_rows(weight: str, N: int, degree: float, coefficient: float,
                   checks: Dict[float, Dict]) -> List[ReportRow]:
    """Coefficient A, then one equimeasurability row per level (value: original measure,
    bound: measure of the rearranged weight)."""
    rows = [ReportRow('rearrange', f"coefficient:d={degree:g}", weight, N, value=coefficient)]
    for t, check in checks.items():
        rows.append(ReportRow('rearrange', f"level-{t:g}:d={degree:g}", weight, N,
                              value=check['original'], bound=check['rearranged'],
                              margin=check['rearranged'] - check['original'],
                              holds=check['rel_diff'] <= EQUIMEASURE_TOL))
    return rows


def _frame(rows: Iterable[ReportRow]) -> pd.DataFrame:
    records = [row.to_dict() for row in rows]
    frame = pd.DataFrame.from_records(records, columns=CSV_HEADER)
    frame['N'] = frame['N'].astype('Int64')
    frame['holds'] = frame['holds'].map({True: 'true', False: 'false'})
    return frame


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_report(rows: List[ReportRow], fmt: str = 'csv') -> str:
    """Report text; row order is input order and nothing time-dependent is included."""
    if fmt not in REPORT_FORMATS:
        raise ConfigError(f"unknown report format: {fmt} (choose from {REPORT_FORMATS})",
                          'emit_report')
    if fmt == 'json':
        records = [{k: _clean(v) for k, v in row.to_dict().items()} for row in rows]
        return json.dumps(records, indent=2) + '\n'
    return _frame(rows).to_csv(index=False, float_format='%.17g', na_rep='',
                               lineterminator='\n')


def metadata_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + '.meta.json')


def emit_report(rows: List[ReportRow], fmt: str, path, metadata: Optional[Dict] = None) -> Path:
    """Write the report and its ``<path>.meta.json`` sidecar with the defaults table."""
    path = Path(path)
    text = render_report(rows, fmt)
    meta = {'defaults': DEFAULTS, 'format': fmt, 'rows': len(rows), **(metadata or {})}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        metadata_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True,
                                                  default=str) + '\n')
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e}") from e
    return path
