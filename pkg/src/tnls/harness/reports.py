"""Experiment report assembly and deterministic emission.

A report is a config echo, named result tables, fitted exponents with
residuals, named tolerance checks, and free-form notes.  ``write``
emits ``report.json`` plus one CSV per table under ``tables/`` and a
data-only plot manifest when plots were registered.

Determinism contract: the CSV bytes are a pure function of the result
values (floats go through ``%.17g``, which round-trips doubles), so a
re-run with the same config and seed reproduces them exactly.  The
JSON carries wall-clock and environment metadata under ``"metadata"``
and is excluded from the byte-identity guarantee.
"""

import json
import math
import os
import time

import numpy as np

from ..fitting import PowerFit

__all__ = ["ExperimentReport", "format_cell"]


def format_cell(v) -> str:
    """Deterministic text for one CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if isinstance(v, complex):
        return f"{format(v.real, '.17g')}{format(v.imag, '.+17g')}j"
    return str(v)


class ExperimentReport:
    """Accumulates tables, fits, checks and notes for one experiment."""

    def __init__(self, experiment: str, config_echo: dict):
        self.experiment = experiment
        self.config_echo = dict(config_echo)
        self.tables: dict = {}
        self.fits: dict = {}
        self.checks: dict = {}
        self.notes: list = []
        self.plots: list = []
        self.metadata: dict = {}
        self._t0 = time.monotonic()

    # assembly ---------------------------------------------------------

    def add_table(self, name: str, columns, rows) -> None:
        if name in self.tables:
            raise ValueError(f"duplicate table {name!r}")
        cols = list(columns)
        body = [list(r) for r in rows]
        for r in body:
            if len(r) != len(cols):
                raise ValueError(f"table {name!r}: row width != header width")
        self.tables[name] = {"columns": cols, "rows": body}

    def add_fit(self, name: str, fit: PowerFit) -> None:
        """Record a power-law fit; R^2 below 0.9 is marked inconclusive
        and can never read as a pass."""
        verdict = "ok" if fit.r_squared >= 0.9 else "inconclusive"
        self.fits[name] = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "residuals": list(fit.residuals),
            "verdict": verdict,
        }

    def add_check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks[name] = {"passed": bool(passed), "detail": detail}

    def note(self, text: str) -> None:
        self.notes.append(text)

    def add_plot(
        self, name: str, table: str, x: str, y, logx: bool = False, logy: bool = False
    ) -> None:
        """Register a data-only plot: a table name plus axis columns."""
        if table not in self.tables:
            raise ValueError(f"plot {name!r} references unknown table {table!r}")
        ys = [y] if isinstance(y, str) else list(y)
        self.plots.append(
            {"name": name, "table": table, "x": x, "y": ys, "logx": logx, "logy": logy}
        )

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    # emission ---------------------------------------------------------

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config_echo,
            "tables": self.tables,
            "fits": self.fits,
            "checks": self.checks,
            "notes": self.notes,
            "passed": self.passed,
            "metadata": self.metadata,
        }

    def write(self, outdir) -> None:
        """Emit report.json, tables/*.csv and (if any) plots.json."""
        self.metadata.setdefault(
            "wall_clock_seconds", round(time.monotonic() - self._t0, 3)
        )
        os.makedirs(outdir, exist_ok=True)
        tdir = os.path.join(outdir, "tables")
        os.makedirs(tdir, exist_ok=True)
        for name, table in self.tables.items():
            path = os.path.join(tdir, f"{name}.csv")
            lines = [",".join(table["columns"])]
            for row in table["rows"]:
                lines.append(",".join(format_cell(v) for v in row))
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(lines) + "\n")
        doc = self.as_dict()
        # floats in JSON go through the same %.17g path for stability
        with open(
            os.path.join(outdir, "report.json"), "w", encoding="utf-8", newline="\n"
        ) as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        if self.plots:
            with open(
                os.path.join(outdir, "plots.json"), "w", encoding="utf-8", newline="\n"
            ) as fh:
                json.dump(self.plots, fh, indent=2, sort_keys=True)
                fh.write("\n")


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serializable: {type(v)!r}")
