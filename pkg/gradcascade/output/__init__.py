"""Console output handlers"""
from .base import BaseOutput
from .summary import SummaryOutput
from .report import ReportOutput
