"""
CSV ingestion and export for trial datasets.

Format: UTF-8, comma-separated, mandatory header with columns Y and A; every
other column is a numeric baseline covariate, taken in file order. Rows in
error messages are file line numbers (the header is line 1).
"""

import logging
import math
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from ancova_check.exceptions import TrialDataError
from ancova_check.models.trial import TrialDataset

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ('Y', 'A')
FLOAT_FORMAT = '%.17g'


def _read_header(path: Path) -> List[str]:
    with path.open('r', encoding='utf-8') as handle:
        first = handle.readline()
    if not first.strip():
        raise TrialDataError("file is empty or has no header row", row=1)
    return [name.strip() for name in first.rstrip('\r\n').split(',')]


def _parse_column(raw: pd.Series, column: str) -> np.ndarray:
    values = np.empty(len(raw))
    for i, cell in enumerate(raw):
        line = i + 2
        text = cell.strip()
        if not text:
            raise TrialDataError("blank cell", row=line, column=column)
        try:
            value = float(text)
        except ValueError:
            raise TrialDataError(f"non-numeric value {cell!r}", row=line, column=column) from None
        if not math.isfinite(value):
            raise TrialDataError(f"non-finite value {cell!r}", row=line, column=column)
        values[i] = value
    return values


def _parse_arms(raw: pd.Series) -> np.ndarray:
    arms = np.empty(len(raw))
    for i, cell in enumerate(raw):
        text = cell.strip()
        if text not in ('0', '1'):
            raise TrialDataError(f"arm indicator not in {{0,1}}: {cell!r}", row=i + 2, column='A')
        arms[i] = float(text)
    return arms


def load_csv(path: Union[str, Path]) -> TrialDataset:
    """Read and validate a trial CSV"""
    path = Path(path)
    if not path.is_file():
        raise TrialDataError(f"file not found: {path}")

    header = _read_header(path)
    duplicates = sorted({name for name in header if header.count(name) > 1})
    if duplicates:
        raise TrialDataError(f"duplicate column names: {', '.join(duplicates)}", row=1)
    for required in REQUIRED_COLUMNS:
        if required not in header:
            raise TrialDataError("missing required column", row=1, column=required)
    if any(not name for name in header):
        raise TrialDataError("empty column name in header", row=1)

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True, encoding='utf-8')
    except pd.errors.ParserError as exc:
        raise TrialDataError(f"malformed CSV: {exc}") from None
    frame.columns = header
    if len(frame) < 2:
        raise TrialDataError(f"need at least 2 data rows, found {len(frame)}")

    outcomes = _parse_column(frame['Y'], 'Y')
    arms = _parse_arms(frame['A'])
    covariate_names = tuple(name for name in header if name not in REQUIRED_COLUMNS)
    if covariate_names:
        covariates = np.column_stack([_parse_column(frame[name], name) for name in covariate_names])
    else:
        covariates = np.empty((len(frame), 0))

    data = TrialDataset(outcomes, arms, covariates, covariate_names)
    n1, n0 = data.arm_sizes()
    logger.info(f"Loaded {path.name}: n={data.n} (treated {n1}, control {n0}), k={data.k}")
    return data


def to_frame(data: TrialDataset) -> pd.DataFrame:
    frame = pd.DataFrame({'Y': data.outcomes, 'A': data.arms.astype(int)})
    for j, name in enumerate(data.covariate_names):
        frame[name] = data.covariates[:, j]
    return frame


def write_csv(data: TrialDataset, path: Union[str, Path]) -> Path:
    """Write a dataset so that load_csv reproduces it bit for bit"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    to_frame(data).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', encoding='utf-8')
    return path
