"""Result writers.

Every command ends in a ``CommandOutput``: one table plus a summary mapping.
The writer renders it as CSV (``#`` metadata lines, then the table with 17
significant digits) or as one JSON document, and carries the run metadata
(command, resolved configuration, seed, version, diagnostics) in both.
"""

import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays, enums and nested containers to JSON types.

    Non-finite floats become ``None``.
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return to_builtin(value.item())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if hasattr(value, "to_dict"):
        return to_builtin(value.to_dict())
    return value


@dataclass
class CommandOutput:
    """What a command hands to the writer."""

    command: str
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)
    # Nested JSON body replacing the flat columns/rows pair; CSV keeps the table.
    json_body: Optional[Dict[str, Any]] = None


class ResultWriter:
    """Renders command output and writes it to files or stdout."""

    def __init__(self, metadata: Dict[str, Any]):
        self.metadata = to_builtin(metadata)

    def render_csv(self, output: CommandOutput) -> str:
        header = [f"# {key}: {json.dumps(value)}" for key, value in self.metadata.items()]
        if output.summary:
            header.append(f"# summary: {json.dumps(to_builtin(output.summary))}")
        body = output.table.to_csv(
            index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )
        return "\n".join(header) + "\n" + body

    def render_json(self, output: CommandOutput) -> str:
        # json writes floats with repr, the shortest text that round-trips exactly.
        document = {"metadata": self.metadata, "summary": to_builtin(output.summary)}
        if output.json_body is not None:
            document.update(to_builtin(output.json_body))
        else:
            document["columns"] = list(output.table.columns)
            document["rows"] = to_builtin(output.table.to_dict(orient="records"))
        return json.dumps(document, indent=2) + "\n"

    def write(self, content: str, output_path: Path) -> None:
        """Write rendered content to a file.

        Args:
            content: The rendered text.
            output_path: Destination path; parent directories are created.

        Raises:
            OSError: If the file cannot be written.
            TypeError: If content is not a string or output_path not a Path.
        """
        if not isinstance(content, str):
            raise TypeError("Content must be a string")
        if not isinstance(output_path, Path):
            raise TypeError("Output path must be a Path object")

        os.makedirs(output_path.parent, exist_ok=True)
        with open(output_path, "w", newline="") as f:
            f.write(content)

    def emit(
        self,
        output: CommandOutput,
        fmt: str = "csv",
        out: Optional[Path] = None,
        stream: Optional[TextIO] = None,
    ) -> List[Path]:
        """Write ``output`` in ``fmt``; returns the files written.

        With ``--out`` in CSV format the summary is also written next to the
        table as ``<stem>.summary.json``.
        """
        content = self.render_json(output) if fmt == "json" else self.render_csv(output)
        if out is None:
            (stream or sys.stdout).write(content)
            return []
        written = [out]
        self.write(content, out)
        if fmt == "csv" and output.summary:
            companion = out.with_name(f"{out.stem}.summary.json")
            summary = {"metadata": self.metadata, "summary": to_builtin(output.summary)}
            self.write(json.dumps(summary, indent=2) + "\n", companion)
            written.append(companion)
        logger.info("Wrote %s", ", ".join(str(p) for p in written))
        return written
