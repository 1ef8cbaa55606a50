"""
Report generator for prodnet.

Analyzer results are dictionaries of scalars and lists of row dictionaries.
This module renders them as aligned text tables, versioned CSV, or JSON.
Numbers are printed with 12 significant digits so that CSV and JSON output is
byte-stable for identical inputs.
"""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd

logger = logging.getLogger(__name__)

CSV_HEADER = "# prodnet-csv v1"
SIGNIFICANT_DIGITS = 12

Rows = List[Dict[str, Any]]


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


def format_number(value: Any) -> str:
    """Render one cell: floats with 12 significant digits, booleans lowercase."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    if isinstance(value, (list, tuple, set, frozenset)):
        return ";".join(format_number(v) for v in (sorted(value) if isinstance(value, (set, frozenset)) else value))
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return float(format(value, f".{SIGNIFICANT_DIGITS}g"))
        return format_number(value)
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [_json_value(v) for v in sorted(value)]
    return value


class ReportGenerator:
    """Renders analyzer results for the terminal and for plotting tools."""

    def split(self, results: Dict[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Rows]]:
        """
        Separate scalar results from tables.

        Lists of dictionaries become tables; nested dictionaries of scalars are
        flattened into ``key.subkey`` scalars.
        """
        scalars: Dict[str, Any] = {}
        tables: Dict[str, Rows] = {}
        for key, value in results.items():
            if isinstance(value, list) and value and all(isinstance(row, dict) for row in value):
                tables[key] = value
            elif isinstance(value, dict):
                for subkey, subvalue in value.items():
                    scalars[f"{key}.{subkey}"] = subvalue
            else:
                scalars[key] = value
        return scalars, tables

    def to_frame(self, rows: Rows) -> pd.DataFrame:
        frame = pd.DataFrame(rows)
        return frame.map(format_number) if hasattr(frame, "map") else frame.applymap(format_number)

    def generate_table(self, results: Dict[str, Any]) -> str:
        scalars, tables = self.split(results)
        blocks = []
        for name, rows in tables.items():
            blocks.append(f"{name}:\n{self.to_frame(rows).to_string(index=False)}")
        if scalars:
            frame = pd.DataFrame({"metric": list(scalars), "value": [format_number(v) for v in scalars.values()]})
            blocks.append(frame.to_string(index=False, header=False))
        return "\n\n".join(blocks) + "\n"

    def generate_csv(self, results: Dict[str, Any]) -> str:
        """
        CSV with a version header. Scalars come first as ``metric,value``
        lines, then each table under a ``# table: <name>`` comment.
        """
        scalars, tables = self.split(results)
        parts = [CSV_HEADER + "\n"]
        if scalars:
            frame = pd.DataFrame({"metric": list(scalars), "value": [format_number(v) for v in scalars.values()]})
            parts.append(frame.to_csv(index=False, lineterminator="\n"))
        for name, rows in tables.items():
            if scalars or len(tables) > 1:
                parts.append(f"# table: {name}\n")
            parts.append(self.to_frame(rows).to_csv(index=False, lineterminator="\n"))
        return "".join(parts)

    def generate_json(self, results: Dict[str, Any]) -> str:
        return json.dumps(_json_value(results), indent=2) + "\n"

    def render(self, results: Dict[str, Any], output_format: Union[OutputFormat, str] = OutputFormat.TABLE) -> str:
        output_format = OutputFormat(output_format)
        if output_format is OutputFormat.CSV:
            return self.generate_csv(results)
        if output_format is OutputFormat.JSON:
            return self.generate_json(results)
        return self.generate_table(results)

    def write(self, text: str, output_path: Optional[Union[str, Path]]) -> None:
        """Write rendered output to a file; callers print it when no path is given."""
        if output_path is None:
            return
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("Report saved to %s", path)
