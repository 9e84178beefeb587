# exporters/__init__.py

"""
Experiment tables, summaries and partition checks written as CSV, JSON or text.
"""

from .report_generator import ReportGenerator

__all__ = ['ReportGenerator']
