import csv
import io
import logging
import math
import os
from typing import List, Optional, Union

import numpy as np
import orjson

from modules.errors import EmptyInputError, InputShapeError, ParseError
from modules.sketching.pointset import PointSet

logger = logging.getLogger(__name__)

FORMATS = ("csv", "jsonl")


def detect_format(file_path: str) -> str:
    """Pick csv or jsonl from the file extension; csv when unsure."""
    extension = os.path.splitext(file_path)[1].lower()
    if extension in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    return "csv"


def _finite_row(values, line_number: int) -> List[float]:
    row = []
    for value in values:
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"cannot read {value!r} as a number", line_number)
        if not math.isfinite(number):
            raise ParseError(f"non-finite value {value!r}", line_number)
        row.append(number)
    return row


def _check_width(row: List[float], width: Optional[int], line_number: int) -> int:
    if not row:
        raise ParseError("point has no coordinates", line_number)
    if width is not None and len(row) != width:
        raise InputShapeError(f"line {line_number}: ragged row with {len(row)} coordinates, expected {width}")
    return len(row)


def parse_csv_text(text: str, label: Optional[str] = None) -> PointSet:
    """One point per row; blank lines and lines starting with '#' are skipped."""
    rows, width = [], None
    for line_number, fields in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not fields or not "".join(fields).strip() or fields[0].lstrip().startswith("#"):
            continue
        row = _finite_row([f.strip() for f in fields], line_number)
        width = _check_width(row, width, line_number)
        rows.append(row)
    if not rows:
        raise EmptyInputError("csv input holds no points")
    return PointSet(np.array(rows, dtype=np.float64), label)


def parse_jsonl_text(text: str) -> List[PointSet]:
    """One object per line: {"label": ..., "points": [[...], ...]}."""
    sets, width = [], None
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = orjson.loads(line)
        except orjson.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e}", line_number)
        if not isinstance(record, dict) or not isinstance(record.get("points"), list):
            raise ParseError('expected an object with a "points" list', line_number)
        points = record["points"]
        if not points:
            raise ParseError("point set is empty", line_number)
        rows = []
        for point in points:
            if not isinstance(point, list):
                raise ParseError("each point must be a list of numbers", line_number)
            row = _finite_row(point, line_number)
            width = _check_width(row, width, line_number)
            rows.append(row)
        label = record.get("label")
        sets.append(PointSet(np.array(rows, dtype=np.float64), None if label is None else str(label)))
    if not sets:
        raise EmptyInputError("jsonl input holds no point sets")
    return sets


def parse_pointset(file_path: str, format: Optional[str] = None) -> Union[PointSet, List[PointSet]]:
    """
    Read a point set (csv) or a list of labeled point sets (jsonl).

    Raises FileNotFoundError for a missing path, ParseError with the offending line for
    malformed content, and InputShapeError for ragged dimensions.
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Point set file not found: {file_path}")
    format = format or detect_format(file_path)
    if format not in FORMATS:
        raise InputShapeError(f"unknown point set format {format!r}; expected one of {FORMATS}")
    with open(file_path, "r", encoding="utf-8") as file:
        text = file.read()
    if format == "csv":
        label = os.path.splitext(os.path.basename(file_path))[0]
        result = parse_csv_text(text, label)
        logger.debug("parsed %d points in R^%d from %s", result.n, result.d, file_path)
        return result
    result = parse_jsonl_text(text)
    logger.debug("parsed %d point sets from %s", len(result), file_path)
    return result


def parse_pointsets(file_path: str, format: Optional[str] = None) -> List[PointSet]:
    """Like parse_pointset but always returns a list."""
    result = parse_pointset(file_path, format)
    return result if isinstance(result, list) else [result]


def parse_single_pointset(file_path: str, format: Optional[str] = None) -> PointSet:
    """A csv file, or a jsonl file holding exactly one set."""
    sets = parse_pointsets(file_path, format)
    if len(sets) != 1:
        raise InputShapeError(f"{file_path} holds {len(sets)} point sets, expected one")
    return sets[0]


def format_matrix_csv(matrix: np.ndarray) -> str:
    """Rows of repr-exact floats, comma separated."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in matrix)
