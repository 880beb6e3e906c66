"""Deterministic CSV and JSON emission.

Tables are lists of rows with a fixed column order. CSV floats use 17
significant digits; JSON floats use Python's shortest round-trip repr. Both
reproduce every double exactly, and neither depends on locale or clock.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config import RunConfig
from .exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


class TableWriter:
    """Render tables in the configured format and write them out.

    Usage:
        writer = TableWriter(config)
        writer.write(["t", "S", "F"], rows, Path("survival.csv"))
    """

    def __init__(self, config: RunConfig):
        """Initialize the writer.

        Args:
            config: Run configuration, embedded in JSON output
        """
        self.config = config

    @property
    def suffix(self) -> str:
        return "." + self.config.format

    def render(self, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        """Render rows as CSV (header plus rows) or as a JSON document."""
        for row in rows:
            if len(row) != len(columns):
                raise InvalidArgumentError(f"row has {len(row)} cells, expected {len(columns)}")
        if self.config.format == "json":
            return self._render_json(columns, rows)
        return self._render_csv(columns, rows)

    def _render_csv(self, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        w = csv.writer(buffer, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_csv_cell(value) for value in row])
        return buffer.getvalue()

    def _render_json(self, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        document: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "data": [dict(zip(columns, row)) for row in rows],
        }
        return json.dumps(document, indent=2, allow_nan=False) + "\n"

    def write(self, columns: Sequence[str], rows: Sequence[Sequence[Any]],
              path: Optional[Path] = None) -> str:
        """Render and write to path, or return the text when path is None.

        Raises:
            InvalidArgumentError: If the path cannot be written
        """
        text = self.render(columns, rows)
        if path is None:
            return text
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as exc:
            raise InvalidArgumentError(f"cannot write {path}: {exc}") from exc
        logger.debug("wrote %d rows to %s", len(rows), path)
        return text


def wigner_rows(field, channel_names: List[str]) -> List[List[Any]]:
    """Flatten a WignerField into m, x_c, k, W_total[, channels] rows."""
    rows = []
    for i, m in enumerate(field.m_values):
        for j, k in enumerate(field.k_values):
            row = [int(m), float(field.x_c[i]), float(k), float(field.total[i, j])]
            row.extend(float(field.channels[name][i, j]) for name in channel_names)
            rows.append(row)
    return rows


def channel_column(name: str) -> str:
    """CSV column for a Wigner channel, e.g. "DB+BD" -> "W_DB+BD"."""
    return "W_" + name
