#!/usr/bin/env python3
"""
Matrix I/O Module

Shared on-disk formats for descriptor sets, distance/score matrices,
ground truth, prediction vectors and match lists.

CSV: one row per line, comma-separated decimal floats, no header.
VPRD binary: magic "VPRD", u32 LE version (1), u32 LE rows, u32 LE cols,
then rows*cols f64 LE values in row-major order.
"""

import csv
import io
import math
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from ..errors import FormatError
from ..models.results import MatchCandidate

PathLike = Union[str, Path]

VPRD_MAGIC = b'VPRD'
VPRD_VERSION = 1
VPRD_HEADER = np.dtype([('magic', 'S4'), ('version', '<u4'), ('rows', '<u4'), ('cols', '<u4')])
VPRD_VALUE = np.dtype('<f8')

FORMAT_EXTENSIONS = {'.csv': 'csv', '.bin': 'bin', '.vprd': 'bin'}


def detect_format(path: PathLike, fmt: Optional[str] = None) -> str:
    """Resolve 'csv' or 'bin' from an explicit fmt or the file extension."""
    if fmt:
        if fmt not in ('csv', 'bin'):
            raise FormatError(f"Unknown matrix format: {fmt}", path=path)
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix not in FORMAT_EXTENSIONS:
        raise FormatError(f"Cannot infer format from extension '{suffix}', pass csv or bin", path=path)
    return FORMAT_EXTENSIONS[suffix]


def _read_text(path: Path, header_lines: int = 0) -> io.StringIO:
    """Decode a UTF-8 file; undecodable bytes are reported by data row."""
    data = path.read_bytes()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data.count(b'\n', 0, e.start)
        raise FormatError(f"File is not valid UTF-8: {e.reason}", path=path, row=max(line - header_lines, 0))
    return io.StringIO(text, newline='')


def _read_csv(path: Path) -> np.ndarray:
    rows: List[List[float]] = []
    width: Optional[int] = None
    with _read_text(path) as f:
        for row_index, tokens in enumerate(csv.reader(f)):
            if not tokens or all(not t.strip() for t in tokens):
                continue
            values = []
            for col_index, token in enumerate(tokens):
                try:
                    value = float(token)
                except ValueError:
                    raise FormatError(f"Cannot parse '{token.strip()}' as a number", path=path, row=row_index, column=col_index)
                if not math.isfinite(value):
                    raise FormatError(f"Non-finite value '{token.strip()}'", path=path, row=row_index, column=col_index)
                values.append(value)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise FormatError(
                    f"Ragged row: {len(values)} values where {width} expected",
                    path=path, row=row_index, column=min(len(values), width)
                )
            rows.append(values)
    if not rows:
        raise FormatError("File contains no rows", path=path)
    return np.array(rows, dtype=np.float64)


def _read_bin(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < VPRD_HEADER.itemsize:
        raise FormatError("File is shorter than the VPRD header", path=path)
    header = np.frombuffer(data, dtype=VPRD_HEADER, count=1)[0]
    if bytes(header['magic']) != VPRD_MAGIC:
        raise FormatError(f"Bad magic {bytes(header['magic'])!r}, expected {VPRD_MAGIC!r}", path=path)
    if int(header['version']) != VPRD_VERSION:
        raise FormatError(f"Unsupported VPRD version {int(header['version'])}", path=path)
    rows, cols = int(header['rows']), int(header['cols'])
    if rows == 0 or cols == 0:
        raise FormatError(f"Empty matrix ({rows}x{cols})", path=path)
    expected = VPRD_HEADER.itemsize + rows * cols * VPRD_VALUE.itemsize
    if len(data) != expected:
        raise FormatError(f"Payload is {len(data)} bytes, expected {expected} for {rows}x{cols}", path=path)
    values = np.frombuffer(data, dtype=VPRD_VALUE, offset=VPRD_HEADER.itemsize).reshape(rows, cols)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = (int(v) for v in bad[0])
        raise FormatError("Non-finite value", path=path, row=row, column=col)
    return values.astype(np.float64)


def read_matrix(path: PathLike, fmt: Optional[str] = None) -> np.ndarray:
    """Read a 2-D float matrix in CSV or VPRD binary format."""
    path = Path(path)
    fmt = detect_format(path, fmt)
    if not path.is_file():
        raise FileNotFoundError(f"No such file: {path}")
    matrix = _read_csv(path) if fmt == 'csv' else _read_bin(path)
    logging.debug(f"Read {matrix.shape[0]}x{matrix.shape[1]} {fmt} matrix from {path}")
    return matrix


def write_matrix(values: np.ndarray, path: PathLike, fmt: Optional[str] = None) -> Path:
    """Write a 2-D float matrix in CSV or VPRD binary format."""
    path = Path(path)
    fmt = detect_format(path, fmt)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise FormatError(f"Only 2-D matrices can be written, got shape {values.shape}", path=path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'csv':
        np.savetxt(path, values, fmt='%.17g', delimiter=',')
    else:
        header = np.array([(VPRD_MAGIC, VPRD_VERSION, values.shape[0], values.shape[1])], dtype=VPRD_HEADER)
        with open(path, 'wb') as f:
            f.write(header.tobytes())
            f.write(np.ascontiguousarray(values, dtype=VPRD_VALUE).tobytes())
    logging.debug(f"Wrote {values.shape[0]}x{values.shape[1]} {fmt} matrix to {path}")
    return path


def read_index_vector(path: PathLike) -> np.ndarray:
    """Read a one-integer-per-line CSV (ground truth, prediction bits)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No such file: {path}")
    column = _read_csv(path)
    if column.shape[1] != 1:
        raise FormatError(f"Expected one value per line, found {column.shape[1]}", path=path, row=0)
    values = column[:, 0]
    fractional = np.flatnonzero(values != np.round(values))
    if fractional.size:
        raise FormatError("Expected integer values", path=path, row=int(fractional[0]), column=0)
    return values.astype(np.int64)


def write_index_vector(values: Sequence[int], path: PathLike) -> Path:
    """Write integers one per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        for value in values:
            f.write(f"{int(value)}\n")
    return path


def write_matches(matches: Sequence[MatchCandidate], path: PathLike, accepted: Optional[Sequence[int]] = None) -> Path:
    """Write matches as CSV with a query,ref,score[,accepted] header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['query', 'ref', 'score'] + (['accepted'] if accepted is not None else []))
        for k, match in enumerate(matches):
            row = [match.query, match.ref, repr(float(match.score))]
            if accepted is not None:
                row.append(int(accepted[k]))
            writer.writerow(row)
    return path


def read_matches(path: PathLike) -> List[dict]:
    """Read a matches CSV written by write_matches."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No such file: {path}")
    with _read_text(path, header_lines=1) as f:
        reader = csv.DictReader(f)
        missing = {'query', 'ref', 'score'} - set(reader.fieldnames or [])
        if missing:
            raise FormatError(f"Matches file lacks columns: {', '.join(sorted(missing))}", path=path)
        rows = []
        for row_index, row in enumerate(reader):
            try:
                rows.append({
                    'query': int(row['query']),
                    'ref': int(row['ref']),
                    'score': float(row['score']),
                    'accepted': int(row.get('accepted') or 1)
                })
            except (TypeError, ValueError):
                raise FormatError("Malformed match row", path=path, row=row_index)
            if not math.isfinite(rows[-1]['score']):
                raise FormatError("Non-finite match score", path=path, row=row_index, column=2)
    if not rows:
        raise FormatError("Matches file contains no rows", path=path)
    return rows
