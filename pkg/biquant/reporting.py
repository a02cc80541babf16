import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from biquant.errors import ConfigError

logger = logging.getLogger(__name__)


def to_text(value):
    """Render exact values (rationals, polynomials) as strings; leave plain JSON types alone"""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float):
        return value
    # PolyElement is a dict subclass
    if hasattr(value, "as_expr"):
        return str(value.as_expr())
    if isinstance(value, dict):
        return {str(k): to_text(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_text(v) for v in value]
    return str(value)


class RunReport:
    """
    Result of one command: summary fields plus named tables

    Tables are pandas DataFrames; in JSON they become lists of records and
    with ``export_csv`` each one is written to ``<directory>/<name>.csv``.
    """
    def __init__(self, command, **summary):
        self.command = command
        self.summary = dict(summary)
        self.tables = {}

    def __setitem__(self, key, value):
        self.summary[key] = value

    def __getitem__(self, key):
        return self.summary[key]

    def add_table(self, name, rows):
        """
        Attach a table

        Args:
            name: Table name (also the CSV file stem)
            rows: DataFrame or list of dicts
        """
        df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
        self.tables[name] = df
        return df

    def summary_frame(self):
        """Two-column overview, one row per summary field"""
        return pd.DataFrame({
            "Information": list(self.summary),
            "Value": [json.dumps(to_text(v)) if isinstance(v, (dict, list)) else to_text(v)
                      for v in self.summary.values()],
        })

    def to_dict(self):
        out = {"command": self.command}
        out.update(to_text(self.summary))
        for name, df in self.tables.items():
            out[name] = [to_text(r) for r in df.to_dict(orient="records")]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, ensure_ascii=False)

    def export_csv(self, directory):
        """
        Write the summary and every table as CSV files

        Returns:
            List of written paths
        """
        directory = Path(directory)
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create CSV directory {directory}: {exc.strerror}")
        written = []
        frames = {"summary": self.summary_frame()}
        frames.update(self.tables)
        for name, df in frames.items():
            path = directory / f"{name}.csv"
            df.astype(str).to_csv(path, index=False)
            written.append(path)
        logger.info("wrote %d CSV tables to %s", len(written), directory)
        return written

    def write(self, path):
        path = Path(path)
        try:
            path.write_text(self.to_json() + "\n", encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot write report to {path}: {exc.strerror}")
