"""
Quality report rows, per-method summaries and CSV/JSON emission.

Column order is fixed; rows are sorted by image then by the requested
method order, and no timestamps are written, so identical runs give
byte-identical files.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from core.exceptions import DatasetError
from core.metrics import MetricRow


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# report column -> MetricRow attribute
METRIC_COLUMNS = {
    'ENTROPY': 'entropy',
    'BRISQUE': 'brisque',
    'NIQE': 'niqe',
    'UIQM': 'uiqm',
    'UCIQE': 'uciqe',
    'sigma_c': 'sigma_c',
    'con_l': 'con_l',
    'mu_s': 'mu_s',
    'uicm': 'uicm',
    'uism': 'uism',
    'uiconm': 'uiconm',
}
COLUMNS = ['image', 'method', *METRIC_COLUMNS, 'status', 'output']
SUMMARY_IMAGE = 'SUMMARY'
STATUS_OK = 'ok'


@dataclass
class ReportRow:
    image: str
    method: str
    metrics: Optional[MetricRow] = None
    status: str = STATUS_OK
    output: str = ''

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def value(self, column: str) -> Optional[float]:
        if self.metrics is None:
            return None
        return getattr(self.metrics, METRIC_COLUMNS[column])

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {'image': self.image, 'method': self.method}
        record.update({column: self.value(column) for column in METRIC_COLUMNS})
        record.update({'status': self.status, 'output': self.output})
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "ReportRow":
        metrics = None
        if record.get('ENTROPY') is not None:
            metrics = MetricRow(**{attr: record.get(column) for column, attr in METRIC_COLUMNS.items()})
        return cls(record['image'], record['method'], metrics, record.get('status', STATUS_OK),
                   record.get('output', ''))


@dataclass
class MethodSummary:
    """Mean and population variance of every metric over one method's successful rows."""
    method: str
    count: int
    mean: Dict[str, Optional[float]] = field(default_factory=dict)
    var: Dict[str, Optional[float]] = field(default_factory=dict)

    def formatted(self, column: str) -> str:
        """Avg(Var) cell text; empty for reserved or missing columns."""
        if self.mean.get(column) is None:
            return ''
        return f"{self.mean[column]:.4f}({self.var[column]:.4f})"


@dataclass
class QualityReport:
    """Per-(image, method) metric rows of a benchmark run."""
    rows: List[ReportRow] = field(default_factory=list)
    methods: List[str] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)

    def sort(self) -> None:
        order = {name: index for index, name in enumerate(self.methods)}
        self.rows.sort(key=lambda row: (row.image, order.get(row.method, len(order)), row.method))

    def method_order(self) -> List[str]:
        seen = list(self.methods)
        seen.extend(sorted({row.method for row in self.rows} - set(seen)))
        return [m for m in seen if any(row.method == m for row in self.rows)]

    def summarize(self) -> List[MethodSummary]:
        summaries = []
        for method in self.method_order():
            rows = [row for row in self.rows if row.method == method and row.ok and row.metrics is not None]
            summary = MethodSummary(method, len(rows))
            for column in METRIC_COLUMNS:
                values = [row.value(column) for row in rows]
                if not values or any(v is None for v in values):
                    summary.mean[column] = summary.var[column] = None
                    continue
                array = np.asarray(values, dtype=np.float64)
                summary.mean[column] = float(array.mean())
                summary.var[column] = float(array.var())
            summaries.append(summary)
        return summaries


def _cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(report: QualityReport, path: Path) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(COLUMNS)
        for row in report.rows:
            record = row.to_record()
            writer.writerow([_cell(record[column]) for column in COLUMNS])
        for summary in report.summarize():
            cells = [SUMMARY_IMAGE, summary.method]
            cells.extend(summary.formatted(column) for column in METRIC_COLUMNS)
            cells.extend([f"n={summary.count}", ''])
            writer.writerow(cells)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(report: QualityReport, path: Path) -> None:
    payload = {
        'columns': COLUMNS,
        'methods': report.methods,
        'rows': [{k: _json_value(v) for k, v in row.to_record().items()} for row in report.rows],
        'summary': [
            {
                'method': s.method,
                'count': s.count,
                'mean': s.mean,
                'var': s.var,
                'formatted': {column: s.formatted(column) for column in METRIC_COLUMNS},
            }
            for s in report.summarize()
        ],
    }
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2)
        f.write('\n')


def emit_report(report: QualityReport, fmt: str, path: PathLike) -> Path:
    """
    Write the report as CSV or JSON.

    Args:
        report: Report to write (rows are sorted first)
        fmt: "csv" or "json"
        path: Output file

    Returns:
        The written path
    """
    path = Path(path)
    report.sort()
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'csv':
        _write_csv(report, path)
    elif fmt == 'json':
        _write_json(report, path)
    else:
        raise ValueError(f"Unknown report format '{fmt}'; expected csv or json")
    logger.info(f"Wrote {fmt} report with {len(report.rows)} rows to {path}")
    return path


def load_report(path: PathLike) -> QualityReport:
    """Read a JSON report written by emit_report."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            payload = json.load(f)
        rows = [ReportRow.from_record(record) for record in payload.get('rows', [])]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise DatasetError(f"Cannot read report {path}: {e}") from e
    return QualityReport(rows=rows, methods=list(payload.get('methods', [])))
