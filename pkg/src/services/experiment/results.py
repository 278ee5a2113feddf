"""CSV result files.

All files are UTF-8, comma separated, with a mandatory header row and
``.`` as decimal separator. Floats are written with ``repr`` so parsing them
back reproduces the in-memory value exactly.
"""

import csv
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Union

from loguru import logger
from pydantic import BaseModel

from src.models.experiment import AggregateRow, TrialRecord
from src.utils.exceptions import ResultsIOError
from src.utils.helpers import format_float

RAW_COLUMNS = [
    "trial",
    "clustering",
    "sigma",
    "affiliation",
    "scheme",
    "num_cells",
    "eval_mode",
    "sum_rate_bps",
    "converged",
]

AGGREGATE_COLUMNS = [
    "clustering",
    "sigma",
    "affiliation",
    "scheme",
    "num_cells",
    "eval_mode",
    "mean_bps",
    "std_bps",
    "stderr_bps",
    "trials",
]

BEST_COLUMNS = [
    "clustering",
    "sigma",
    "affiliation",
    "num_cells",
    "eval_mode",
    "scheme",
    "mean_bps",
    "stderr_bps",
]

TRACE_COLUMNS = [
    "trial",
    "clustering",
    "sigma",
    "affiliation",
    "scheme",
    "num_cells",
    "cell",
    "call",
    "outer",
    "sweeps",
    "rate_bps",
    "objective_bps",
    "max_rel_change",
    "max_lambda",
]

PathLike = Union[str, Path]


def format_value(value) -> str:
    """Render one cell of a result row."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def row_values(row: BaseModel, columns: Sequence[str]) -> List[str]:
    return [format_value(getattr(row, column)) for column in columns]


class CsvResultWriter:
    """Incremental CSV writer; the header goes out on open.

    Usage::

        with CsvResultWriter(path, RAW_COLUMNS) as writer:
            writer.write_rows(records)
    """

    def __init__(self, path: PathLike, columns: Sequence[str]):
        self.path = Path(path)
        self.columns = list(columns)
        self.rows_written = 0
        self._file: Optional[IO[str]] = None
        self._writer = None

    def open(self) -> "CsvResultWriter":
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._file = open(self.path, "w", encoding="utf-8", newline="")
            self._writer = csv.writer(self._file, lineterminator="\n")
            self._writer.writerow(self.columns)
            self._file.flush()
        except OSError as e:
            raise ResultsIOError(f"Cannot write {self.path}: {e}", path=str(self.path))
        return self

    def write_rows(self, rows: Iterable[BaseModel]) -> int:
        """Append rows and flush; returns the number written."""
        if self._writer is None:
            raise ResultsIOError(f"Writer for {self.path} is not open", path=str(self.path))
        count = 0
        try:
            for row in rows:
                self._writer.writerow(row_values(row, self.columns))
                count += 1
            self._file.flush()
        except OSError as e:
            raise ResultsIOError(f"Cannot write {self.path}: {e}", path=str(self.path))
        self.rows_written += count
        return count

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None
            self._writer = None

    def __enter__(self) -> "CsvResultWriter":
        return self.open()

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()


def write_csv(rows: Iterable[BaseModel], path: PathLike, columns: Sequence[str]) -> int:
    """Write a complete result file.

    Raises:
        ResultsIOError: The path cannot be written
    """
    with CsvResultWriter(path, columns) as writer:
        count = writer.write_rows(rows)
    logger.info(f"Wrote {count} rows to {path}")
    return count


def _read_dicts(path: PathLike, columns: Sequence[str]) -> List[dict]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != list(columns):
                raise ResultsIOError(
                    f"Unexpected header in {path}: {reader.fieldnames}", path=str(path)
                )
            return list(reader)
    except OSError as e:
        raise ResultsIOError(f"Cannot read {path}: {e}", path=str(path))


def _parse_sigma(text: str) -> Optional[float]:
    return float(text) if text else None


def read_raw_csv(path: PathLike) -> List[TrialRecord]:
    """Parse a raw results file back into records."""
    return [
        TrialRecord(
            trial=int(row["trial"]),
            clustering=row["clustering"],
            sigma=_parse_sigma(row["sigma"]),
            affiliation=row["affiliation"],
            scheme=row["scheme"],
            num_cells=int(row["num_cells"]),
            eval_mode=row["eval_mode"],
            sum_rate_bps=float(row["sum_rate_bps"]),
            converged=row["converged"] == "true",
        )
        for row in _read_dicts(path, RAW_COLUMNS)
    ]


def read_aggregate_csv(path: PathLike) -> List[AggregateRow]:
    """Parse an aggregate results file back into rows."""
    return [
        AggregateRow(
            clustering=row["clustering"],
            sigma=_parse_sigma(row["sigma"]),
            affiliation=row["affiliation"],
            scheme=row["scheme"],
            num_cells=int(row["num_cells"]),
            eval_mode=row["eval_mode"],
            mean_bps=float(row["mean_bps"]),
            std_bps=float(row["std_bps"]),
            stderr_bps=float(row["stderr_bps"]),
            trials=int(row["trials"]),
        )
        for row in _read_dicts(path, AGGREGATE_COLUMNS)
    ]
