"""Readers for the CSV inputs and JSON/YAML configuration files.

CSV files are comma separated with one header line. Blank lines and lines
starting with ``#`` are skipped, but every reported error still carries the
line number of the physical file.
"""

import io
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
import yaml

from chanmodel.error_handling.errors import ChannelModelError, SchemaError
from chanmodel.fitting.los_fit import LosSample
from chanmodel.fitting.pathloss_fit import PathLossSample
from chanmodel.model.rays import RayRecord

logger = logging.getLogger(__name__)

PATHLOSS_COLUMNS = ("freq_ghz", "dist_m", "pl_db", "los")
LOS_COLUMNS = ("dist_m", "los")
RAY_COLUMNS = (
    "link_id",
    "delay_ns",
    "aod_az_deg",
    "aod_el_deg",
    "aoa_az_deg",
    "aoa_el_deg",
    "power_db",
)
ASSIGNMENT_COLUMNS = ("ray_index", "cluster")

_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no"}

PathLike = Union[str, Path]


@dataclass
class CsvTable:
    """Parsed CSV body plus the physical line number of every row."""

    path: str
    frame: pd.DataFrame
    lines: List[int]

    def __len__(self) -> int:
        return len(self.frame)

    def _parse(self, column: str, mask: np.ndarray) -> np.ndarray:
        raw = self.frame[column]
        values = pd.to_numeric(raw.where(mask, "0"), errors="coerce").to_numpy(dtype=float)
        bad = mask & ~np.isfinite(values)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise SchemaError(
                f"column '{column}' value '{raw.iloc[row]}' is not a number",
                file=self.path,
                line=self.lines[row],
            )
        return np.where(mask, values, np.nan)

    def numeric(self, column: str) -> np.ndarray:
        return self._parse(column, np.ones(len(self.frame), dtype=bool))

    def flags(self, column: str) -> np.ndarray:
        out = np.empty(len(self.frame), dtype=bool)
        for row, value in enumerate(self.frame[column]):
            text = str(value).strip().lower()
            if text in _TRUE:
                out[row] = True
            elif text in _FALSE:
                out[row] = False
            else:
                raise SchemaError(
                    f"column '{column}' must be 0 or 1, got '{value}'",
                    file=self.path,
                    line=self.lines[row],
                )
        return out

    def optional_numeric(self, column: str) -> Optional[np.ndarray]:
        """Numeric column that may be absent; empty cells become NaN."""
        if column not in self.frame.columns:
            return None
        present = self.frame[column].str.strip().ne("").to_numpy()
        return self._parse(column, present)


def read_csv_table(
    path: PathLike, required: Sequence[str], optional: Sequence[str] = ()
) -> CsvTable:
    """Read a headed CSV file and check its columns and row widths."""
    path = Path(path)
    logger.info("Reading %s", path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SchemaError(f"cannot read input file: {e.strerror}", file=str(path)) from e

    body: List[str] = []
    lines: List[int] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        body.append(stripped)
        lines.append(number)
    if not body:
        raise SchemaError("file has no header line", file=str(path))

    header = [name.strip() for name in body[0].split(",")]
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(
            f"missing column(s) {', '.join(missing)}; header is '{body[0]}'",
            file=str(path),
            line=lines[0],
        )
    unknown = [name for name in header if name not in required and name not in optional]
    if unknown:
        logger.warning("%s: ignoring unknown column(s) %s", path, ", ".join(unknown))
    for line, number in zip(body[1:], lines[1:]):
        width = len(line.split(","))
        if width != len(header):
            raise SchemaError(
                f"row has {width} fields, header has {len(header)}", file=str(path), line=number
            )

    frame = pd.read_csv(
        io.StringIO("\n".join(body)), dtype=str, keep_default_na=False, skipinitialspace=True
    )
    frame.columns = header
    logger.debug("%s: %d rows", path, len(frame))
    return CsvTable(str(path), frame, lines[1:])


def _positive(table: CsvTable, column: str, values: np.ndarray) -> np.ndarray:
    bad = np.flatnonzero(values <= 0)
    if bad.size:
        row = int(bad[0])
        raise SchemaError(
            f"column '{column}' must be positive, got {values[row]:g}",
            file=table.path,
            line=table.lines[row],
        )
    return values


def load_pathloss_samples(path: PathLike) -> List[PathLossSample]:
    """``freq_ghz, dist_m, pl_db, los[, weight]`` rows."""
    table = read_csv_table(path, PATHLOSS_COLUMNS, ("weight",))
    f = _positive(table, "freq_ghz", table.numeric("freq_ghz"))
    d = _positive(table, "dist_m", table.numeric("dist_m"))
    pl = table.numeric("pl_db")
    los = table.flags("los")
    weight = table.optional_numeric("weight")
    if weight is None:
        weight = np.ones(len(table))
    weight = np.where(np.isnan(weight), 1.0, weight)
    _positive(table, "weight", weight)
    return [
        PathLossSample(float(f[i]), float(d[i]), float(pl[i]), bool(los[i]), float(weight[i]))
        for i in range(len(table))
    ]


def load_los_samples(path: PathLike) -> List[LosSample]:
    """``dist_m, los`` rows."""
    table = read_csv_table(path, LOS_COLUMNS)
    d = _positive(table, "dist_m", table.numeric("dist_m"))
    los = table.flags("los")
    return [LosSample(float(d[i]), bool(los[i])) for i in range(len(table))]


def load_rays(path: PathLike) -> List[RayRecord]:
    """``link_id, delay_ns, aod_az_deg, aod_el_deg, aoa_az_deg, aoa_el_deg, power_db[, xpr_db]``."""
    table = read_csv_table(path, RAY_COLUMNS, ("xpr_db",))
    columns = {name: table.numeric(name) for name in RAY_COLUMNS if name != "link_id"}
    xpr = table.optional_numeric("xpr_db")
    link_ids = table.frame["link_id"].astype(str).str.strip().tolist()
    rays = []
    for i in range(len(table)):
        try:
            rays.append(
                RayRecord.from_db(
                    columns["power_db"][i],
                    delay_ns=float(columns["delay_ns"][i]),
                    aod_az=float(columns["aod_az_deg"][i]),
                    aod_el=float(columns["aod_el_deg"][i]),
                    aoa_az=float(columns["aoa_az_deg"][i]),
                    aoa_el=float(columns["aoa_el_deg"][i]),
                    xpr_db=None if xpr is None or np.isnan(xpr[i]) else float(xpr[i]),
                    link_id=link_ids[i] or None,
                )
            )
        except ChannelModelError as e:
            raise SchemaError(e.message, file=table.path, line=table.lines[i]) from e
    return rays


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Cluster label and pruned flag per ray index."""

    labels: np.ndarray
    pruned: np.ndarray


def load_assignment(path: PathLike, ray_count: int) -> ClusterAssignment:
    """``ray_index, cluster[, pruned]`` rows as written by the cluster command.

    Every ray index in ``[0, ray_count)`` must appear exactly once.
    """
    table = read_csv_table(path, ASSIGNMENT_COLUMNS, ("link_id", "pruned"))
    index = table.numeric("ray_index")
    cluster = table.numeric("cluster")
    pruned = table.flags("pruned") if "pruned" in table.frame.columns else np.zeros(len(table), bool)
    labels = np.full(ray_count, -1, dtype=int)
    flags = np.zeros(ray_count, dtype=bool)
    for row in range(len(table)):
        i = index[row]
        if i != int(i) or not 0 <= i < ray_count or labels[int(i)] >= 0:
            raise SchemaError(
                f"ray_index {i:g} is out of range or repeated ({ray_count} rays)",
                file=table.path,
                line=table.lines[row],
            )
        if cluster[row] != int(cluster[row]) or cluster[row] < 0:
            raise SchemaError(
                f"cluster label must be a non-negative integer, got {cluster[row]:g}",
                file=table.path,
                line=table.lines[row],
            )
        labels[int(i)] = int(cluster[row])
        flags[int(i)] = pruned[row]
    if np.any(labels < 0):
        missing = int(np.flatnonzero(labels < 0)[0])
        raise SchemaError(f"no cluster assignment for ray_index {missing}", file=table.path)
    return ClusterAssignment(labels, flags)


def load_config(path: PathLike) -> Dict[str, Any]:
    """Parse a JSON (``.json``) or YAML (anything else) mapping."""
    path = Path(path)
    logger.info("Loading configuration %s", path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SchemaError(f"cannot read configuration: {e.strerror}", file=str(path)) from e
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg}", file=str(path), line=e.lineno) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise SchemaError(
            f"invalid YAML: {getattr(e, 'problem', None) or e}",
            file=str(path),
            line=mark.line + 1 if mark is not None else None,
        ) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SchemaError("configuration must be a mapping at the top level", file=str(path))
    return data
