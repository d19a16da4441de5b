"""Data ingestion, column standardization, and the accuracy profile."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class RawTable:
    values: np.ndarray
    column_names: tuple | None = None

    @property
    def row_count(self):
        return self.values.shape[0]

    @property
    def col_count(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class Dataset:
    """A standardized design matrix with its response.

    Every column of ``x`` has Euclidean norm sqrt(n); ``column_scales[j]``
    is the factor the raw column was divided by, so raw-scale coefficients
    are recovered as ``beta_std / column_scales``.
    """

    x: np.ndarray
    y: np.ndarray
    column_scales: np.ndarray
    zero_columns: tuple = ()

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]


def load_matrix(path, fmt="csv", has_header=False):
    """Load a rectangular numeric table from a CSV or TSV file."""
    if fmt not in ("csv", "tsv"):
        raise DataError(f"unknown format {fmt!r}")
    delim = "," if fmt == "csv" else "\t"
    names = None
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delim)
        for i, row in enumerate(reader):
            if not row:
                continue
            if i == 0 and has_header:
                names = tuple(c.strip() for c in row)
                continue
            parsed = []
            for j, cell in enumerate(row):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell at row {i + 1}, column {j + 1}: {cell!r}"
                    ) from None
                if not np.isfinite(v):
                    raise DataError(
                        f"{path}: non-finite cell at row {i + 1}, column {j + 1}"
                    )
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: empty table")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: ragged row {i + 1}: {len(row)} cells, expected {width}"
            )
    if names is not None and len(names) != width:
        raise DataError(f"{path}: header width {len(names)} != data width {width}")
    return RawTable(values=np.asarray(rows, dtype=float), column_names=names)


def standardize(x, y):
    """Scale each column of ``x`` to norm sqrt(n) and package a Dataset.

    Zero columns are left untouched and flagged rather than raising.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2:
        raise DataError("design matrix must be 2-d")
    n = x.shape[0]
    if y.shape != (n,):
        raise DataError(f"response length {y.shape} does not match n={n}")
    norms = np.linalg.norm(x, axis=0)
    zero = np.where(norms == 0.0)[0]
    scales = np.where(norms > 0.0, norms / np.sqrt(n), 1.0)
    return Dataset(
        x=x / scales,
        y=y,
        column_scales=scales,
        zero_columns=tuple(int(j) for j in zero),
    )


def destandardize_coef(dataset, beta_std):
    """Map coefficients on the standardized scale back to the raw scale."""
    beta_std = np.asarray(beta_std, dtype=float)
    return beta_std / dataset.column_scales


@dataclass(frozen=True)
class AccuracyProfile:
    points: np.ndarray  # (k, 2) array of (fraction inspected, fraction captured)
    prevalence: float


def accuracy_profile(scores, labels, mode="capture"):
    """Cumulative-gains curve: fraction of positives found in the top-ranked
    fraction of cases.

    Sorting by score is descending and stable (ties keep input order).
    ``mode="precision"`` reports the positive rate within the top k instead
    of the fraction of all positives captured.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be 1-d vectors of equal length")
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise DataError("labels must be 0/1")
    total_pos = labels.sum()
    if total_pos == 0:
        raise DataError("at least one positive label is required")
    if mode not in ("capture", "precision"):
        raise DataError(f"unknown profile mode {mode!r}")
    n = scores.size
    order = np.argsort(-scores, kind="stable")
    cum = np.cumsum(labels[order])
    x = np.arange(1, n + 1) / n
    if mode == "capture":
        yv = cum / total_pos
    else:
        yv = cum / np.arange(1, n + 1)
    return AccuracyProfile(
        points=np.column_stack([x, yv]), prevalence=float(total_pos / n)
    )


def oracle_profile(labels, mode="capture"):
    """Profile of a perfect ranker: all positives ranked first."""
    labels = np.asarray(labels, dtype=float)
    return accuracy_profile(labels, labels, mode=mode)
