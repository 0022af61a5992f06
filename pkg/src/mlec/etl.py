"""Raw feature CSV to network-ready numeric CSV.

The identifier column is dropped, ``false``/``true`` become ``0``/``1`` and
label-false rows are undersampled.  Numeric columns are copied verbatim.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .features import HEADER

CATEGORICAL = {"enabled", "preferredType", "label"}
CATEGORIES = ("false", "true")  # index = encoded value


class EtlError(ValueError):
    pass


@dataclass(frozen=True)
class BalanceReport:
    rows_before: int
    true_before: int
    rows_after: int
    true_after: int

    @staticmethod
    def _ratio(t: int, n: int) -> float:
        return t / n if n else 0.0

    @property
    def ratio_before(self) -> float:
        return self._ratio(self.true_before, self.rows_before)

    @property
    def ratio_after(self) -> float:
        return self._ratio(self.true_after, self.rows_after)

    def __str__(self) -> str:
        return (
            f"rows {self.rows_before} -> {self.rows_after}; "
            f"true {self.true_before} ({100 * self.ratio_before:.2f}%) -> "
            f"{self.true_after} ({100 * self.ratio_after:.2f}%)"
        )


def encode_row(fields: Sequence[str], line: int) -> list[str]:
    if len(fields) != len(HEADER):
        raise EtlError(f"line {line}: expected {len(HEADER)} columns, got {len(fields)}")
    out = []
    for name, value in zip(HEADER[1:], fields[1:]):
        if name in CATEGORICAL:
            if value not in CATEGORIES:
                raise EtlError(f"line {line}: unknown value {value!r} for {name}")
            out.append(str(CATEGORIES.index(value)))
        else:
            try:
                float(value)
            except ValueError:
                raise EtlError(f"line {line}: {name} is not numeric: {value!r}") from None
            out.append(value)
    return out


def undersample(
    rows: Sequence[Sequence[str]], keep_fraction: float = 0.9, seed: int = 0
) -> list[Sequence[str]]:
    """Keep all label-1 rows and each label-0 row with probability ``keep_fraction``.

    One uniform draw is consumed per row, in order, so the outcome for a row
    depends only on ``seed`` and its index.
    """
    if not 0 < keep_fraction <= 1:
        raise ValueError("keep_fraction must lie in (0, 1]")
    draws = np.random.default_rng(seed).random(len(rows))
    return [r for r, u in zip(rows, draws) if r[-1] == "1" or u < keep_fraction]


def transform_rows(
    lines: Iterable[str], keep_fraction: float = 0.9, seed: int = 0
) -> tuple[list[list[str]], BalanceReport]:
    reader = csv.reader(lines)
    encoded = []
    for i, fields in enumerate(reader, 1):
        if not fields:
            continue
        if i == 1 and fields[0] == HEADER[0]:
            if tuple(fields) != HEADER:
                raise EtlError(f"line 1: unexpected header {fields}")
            continue
        encoded.append(encode_row(fields, i))
    kept = undersample(encoded, keep_fraction, seed)
    report = BalanceReport(
        len(encoded), sum(r[-1] == "1" for r in encoded), len(kept), sum(r[-1] == "1" for r in kept)
    )
    return kept, report


def transform(raw_csv: str, keep_fraction: float = 0.9, seed: int = 0) -> tuple[str, BalanceReport]:
    """Transform raw CSV text into headerless six-column numeric CSV text."""
    rows, report = transform_rows(io.StringIO(raw_csv), keep_fraction, seed)
    return "".join(",".join(r) + "\n" for r in rows), report


def load_dataset(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse transformed CSV into ``(X, y)`` with ``X`` of width 5."""
    data = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2) if text.strip() else np.empty((0, 6))
    if data.shape[1] != 6:
        raise EtlError(f"expected 6 columns, got {data.shape[1]}")
    return data[:, :5], data[:, 5].astype(int)
