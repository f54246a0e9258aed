"""Debt portfolios and their dimensionless aggregates.

A raw portfolio is a list of debts, each with an amount and a duration.
Normalization sorts the debts by duration, maps every duration onto an
integer reverse-duration slot ``r = round(resolution * l_max / l)``, merges
debts that land on the same slot and pads the gaps with zero-valued virtual
slots. Amounts are divided by the mean debt, so every aggregate is free of
currency units.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CSVParseError,
    EmptyPortfolio,
    InputError,
    NonPositiveAmount,
    NonPositiveDuration,
)

CSV_HEADER = ("id", "amount", "duration")


@dataclass(frozen=True)
class DebtRecord:
    id: str
    amount: float
    duration: float

    def __post_init__(self):
        if not (math.isfinite(self.amount) and self.amount > 0):
            raise NonPositiveAmount(f"debt {self.id!r}: amount must be positive, got {self.amount}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise NonPositiveDuration(
                f"debt {self.id!r}: duration must be positive, got {self.duration}")


@dataclass(frozen=True, eq=False)
class NormalizedPortfolio:
    """Dimensionless view of a portfolio.

    ``slots[j - 1]`` is the normalized debt of slot j (ascending duration),
    whose reverse duration is ``k + 1 - j``.
    """

    k: int
    slots: np.ndarray
    s_hat: float
    sigma: float
    E: float
    E1: float
    n_records: int

    @property
    def reverse_durations(self) -> np.ndarray:
        return np.arange(self.k, 0, -1)

    def summary(self) -> dict:
        return {"k": self.k, "sigma": self.sigma, "E": self.E, "E1": self.E1,
                "s_hat": self.s_hat, "n_records": self.n_records}


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def normalize(debts, grid_resolution: int = 1) -> NormalizedPortfolio:
    debts = list(debts)
    if not debts:
        raise EmptyPortfolio("portfolio contains no debts")
    if int(grid_resolution) != grid_resolution or grid_resolution < 1:
        raise InputError(f"grid_resolution must be a positive integer, got {grid_resolution}")
    for d in debts:
        if not (math.isfinite(d.amount) and d.amount > 0):
            raise NonPositiveAmount(f"debt {d.id!r}: amount must be positive, got {d.amount}")
        if not (math.isfinite(d.duration) and d.duration > 0):
            raise NonPositiveDuration(
                f"debt {d.id!r}: duration must be positive, got {d.duration}")

    l_max = max(d.duration for d in debts)
    by_slot = defaultdict(list)
    for d in debts:
        by_slot[_round_half_away(grid_resolution * l_max / d.duration)].append(d.amount)
    k = max(by_slot)

    # fsum is correctly rounded, so merged values do not depend on input order
    s_hat = math.fsum(d.amount for d in debts) / len(debts)
    slots = np.zeros(k)
    for r, amounts in by_slot.items():
        slots[k - r] = math.fsum(amounts) / s_hat
    slots.setflags(write=False)

    occupied = np.flatnonzero(slots)
    values = slots[occupied]
    j = occupied + 1
    sigma = math.fsum(values)
    E1 = math.fsum(j * values)
    E = math.fsum((k + 1 - j) * values)
    return NormalizedPortfolio(k=k, slots=slots, s_hat=s_hat, sigma=sigma, E=E, E1=E1,
                               n_records=len(debts))


def portfolios_close(a: NormalizedPortfolio, b: NormalizedPortfolio, rtol: float = 1e-12) -> bool:
    if a.k != b.k or a.n_records != b.n_records:
        return False
    scalars = ("sigma", "E", "E1")
    if not all(math.isclose(getattr(a, f), getattr(b, f), rel_tol=rtol, abs_tol=0.0)
               for f in scalars):
        return False
    return bool(np.allclose(a.slots, b.slots, rtol=rtol, atol=0.0))


def scale_check(debts, c: float, grid_resolution: int = 1) -> bool:
    """True when rescaling every amount by ``c`` leaves the normalization unchanged."""
    if not (math.isfinite(c) and c > 0):
        raise InputError(f"scale factor must be positive, got {c}")
    debts = list(debts)
    scaled = [DebtRecord(d.id, d.amount * c, d.duration) for d in debts]
    return portfolios_close(normalize(debts, grid_resolution),
                            normalize(scaled, grid_resolution))


def _parse_number(text, line, field):
    try:
        value = float(text)
    except ValueError:
        raise CSVParseError(line, f"{field} is not a decimal number: {text!r}") from None
    if not math.isfinite(value):
        raise CSVParseError(line, f"{field} must be finite, got {text!r}")
    if value <= 0:
        raise CSVParseError(line, f"{field} must be positive, got {text!r}")
    return value


def parse_debts_csv(lines) -> list[DebtRecord]:
    """Parse ``id,amount,duration`` rows; errors carry 1-based line numbers."""
    reader = csv.reader(lines)
    header = None
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if header is None:
            header = tuple(cell.strip().lower() for cell in row)
            if header != CSV_HEADER:
                raise CSVParseError(line, f"expected header {','.join(CSV_HEADER)}, got {','.join(row)}")
            continue
        if len(row) != 3:
            raise CSVParseError(line, f"expected 3 fields, got {len(row)}")
        id_, amount, duration = (cell.strip() for cell in row)
        records.append(DebtRecord(id_, _parse_number(amount, line, "amount"),
                                  _parse_number(duration, line, "duration")))
    return records


def read_debts_csv(path) -> list[DebtRecord]:
    with Path(path).open(encoding="utf-8-sig", newline="") as fh:
        return parse_debts_csv(fh)
