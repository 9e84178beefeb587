# exporters/report_generator.py - Report generation in multiple formats

import io
import json
import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT
from models.experiment import ExperimentReport
from utils.logger import get_logger

logger = get_logger(__name__)


def _plain(value):
    """JSON-safe copy of numpy scalars, tuples and non-finite floats."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class ReportGenerator:
    """Generates tables, experiment reports and summaries in CSV, JSON and text."""

    @staticmethod
    def generate_csv_report(df: pd.DataFrame, columns: Optional[List[str]] = None) -> str:
        """
        Generate a byte-deterministic CSV table.

        Args:
            df: Table to export
            columns: Fixed leading column order (remaining columns follow in their own order)

        Returns:
            CSV string
        """
        if columns:
            leading = [c for c in columns if c in df.columns]
            df = df[leading + [c for c in df.columns if c not in leading]]
        csv_buffer = io.StringIO()
        df.to_csv(csv_buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
        return csv_buffer.getvalue()

    @staticmethod
    def generate_json_report(df: pd.DataFrame, summary: Optional[Dict] = None,
                             columns: Optional[List[str]] = None) -> str:
        """
        Generate a JSON report whose row objects use the CSV field names.

        Args:
            df: Table to export
            summary: Optional summary block
            columns: Fixed leading column order

        Returns:
            JSON string
        """
        if columns:
            leading = [c for c in columns if c in df.columns]
            df = df[leading + [c for c in df.columns if c not in leading]]
        report = {}
        if summary:
            report['summary'] = _plain(summary)
        report['rows'] = _plain(df.to_dict('records'))
        return json.dumps(report, indent=2, sort_keys=False)

    @staticmethod
    def generate_summary_report(report: ExperimentReport) -> str:
        """
        Generate the structured-text summary of an experiment.

        Args:
            report: Experiment report

        Returns:
            Text summary
        """
        aggregates = report.aggregates
        lines = [
            f"EXPERIMENT {report.experiment.upper()}",
            '=' * (11 + len(report.experiment)),
            f"members = {report.member_count}",
            f"rows = {len(report.rows)}",
            f"ratio.min = {aggregates['min']:.17g}",
            f"ratio.median = {aggregates['median']:.17g}",
            f"ratio.max = {aggregates['max']:.17g}",
        ]
        if report.statistic is not None:
            lines.append(f"statistic = {report.statistic:.17g}")
        for key, value in report.params.items():
            lines.append(f"param.{key} = {value}")
        for key, value in report.constants.items():
            lines.append(f"constant.{key} = {value:.17g}")
        lines.append(f"guards = {', '.join(report.guards) if report.guards else 'none'}")
        lines.append(f"asserted = {str(report.asserted).lower()}")
        lines.append(f"passed = {str(report.passed).lower()}")
        if report.failures:
            lines.append(f"failures = {', '.join(report.failures)}")
        return '\n'.join(lines) + '\n'

    @staticmethod
    def write_table(df: pd.DataFrame, directory: str, name: str, fmt: str = 'csv',
                    columns: Optional[List[str]] = None, summary: Optional[Dict] = None) -> Path:
        """Write one table as <name>.csv or <name>.json under directory."""
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        if fmt == 'json':
            target = path / f"{name}.json"
            target.write_text(ReportGenerator.generate_json_report(df, summary, columns), encoding='utf-8')
        else:
            target = path / f"{name}.csv"
            target.write_text(ReportGenerator.generate_csv_report(df, columns), encoding='utf-8', newline='')
        logger.debug(f"Wrote {len(df)} rows to {target}")
        return target

    @staticmethod
    def write_outputs(report: ExperimentReport, directory: str, fmt: str = 'csv',
                      columns: Optional[List[str]] = None) -> List[Path]:
        """
        Write an experiment table and its summary.

        Args:
            report: Experiment report
            directory: Output directory
            fmt: 'csv' or 'json'
            columns: Fixed leading column order

        Returns:
            Paths written
        """
        name = report.experiment
        table = ReportGenerator.write_table(report.table(), directory, name, fmt, columns, report.summary())
        summary = Path(directory) / f"{name}_summary.txt"
        summary.write_text(ReportGenerator.generate_summary_report(report), encoding='utf-8')
        logger.info(f"Wrote {name} report to {directory}")
        return [table, summary]
