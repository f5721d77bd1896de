"""Run reports: time series of conserved quantities with drift statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["InvariantReport", "relative_drift", "format_float"]


def relative_drift(series: np.ndarray, reference: float | None = None) -> float:
    """(max - min) of a series over a reference magnitude.

    The reference defaults to the largest absolute value of the series;
    an all-zero series has zero drift.
    """
    series = np.asarray(series, dtype=float)
    span = float(np.max(series) - np.min(series))
    ref = float(np.max(np.abs(series))) if reference is None else abs(reference)
    if ref == 0.0:
        return 0.0 if span == 0.0 else np.inf
    return span / ref


def format_float(x: float) -> str:
    """Shortest round-trip decimal form; deterministic for a given build."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    return repr(float(x))


@dataclass
class InvariantReport:
    """Column-oriented time series plus summary statistics.

    columns maps names to equal-length arrays (a 't' column is expected
    first); stats holds scalar summaries such as drifts and endpoint
    fidelities; meta records the run configuration.
    """

    columns: dict[str, np.ndarray]
    stats: dict[str, float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {k: len(v) for k, v in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"ragged columns: {lengths}")

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    def column_names(self) -> list[str]:
        return list(self.columns)

    def write_csv(self, path) -> None:
        names = self.column_names()
        rows = zip(*(np.asarray(self.columns[k]) for k in names))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(names) + "\n")
            for row in rows:
                fh.write(",".join(format_float(x) for x in row) + "\n")
