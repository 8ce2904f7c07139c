"""
Trial data ingestion and design construction
"""

from .design import design_matrix
from .trial_csv import load_csv, to_frame, write_csv

__all__ = ['design_matrix', 'load_csv', 'to_frame', 'write_csv']
