"""
VPR Consensus - Export Modules

Matrix/descriptor codecs and report exporters.
"""

from .matrix_io import read_matrix, write_matrix, read_index_vector, write_index_vector, write_matches, read_matches
from .report_exporter import ReportExporter, read_predictions

__all__ = [
    "read_matrix",
    "write_matrix",
    "read_index_vector",
    "write_index_vector",
    "write_matches",
    "read_matches",
    "ReportExporter",
    "read_predictions"
]
