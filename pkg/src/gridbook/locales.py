"""Locale profiles and the pinned clock.

A profile fixes the decimal separator, the day/month/year entry order and
the month names used for display. Together with a pinned "today" it makes
every coercion decision reproducible; nothing in the engine reads the wall
clock.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field

ENGLISH_MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

DATE_SEPS = ("/", "-")

# Default pinned date. A leap year, so "29/2" lands on a real day.
DEFAULT_TODAY = datetime.date(2004, 10, 1)


@dataclass(frozen=True)
class LocaleProfile:
    name: str
    decimal_sep: str = ","
    month_names: tuple = field(default=ENGLISH_MONTHS)

    def __post_init__(self) -> None:
        if self.decimal_sep in DATE_SEPS:
            raise ValueError("decimal separator collides with date separators")
        if len(self.month_names) != 12:
            raise ValueError("exactly 12 month names required")

    def month_index(self, name: str) -> int | None:
        """1-based month number for a (case-insensitive) full month name."""
        lowered = name.lower()
        for i, m in enumerate(self.month_names, start=1):
            if m.lower() == lowered:
                return i
        return None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "decimalSep": self.decimal_sep,
            "monthNames": list(self.month_names),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LocaleProfile":
        return cls(
            name=data["name"],
            decimal_sep=data["decimalSep"],
            month_names=tuple(data["monthNames"]),
        )


PAPER_FR = LocaleProfile(name="paper-fr")


def load_profile(path: str) -> LocaleProfile:
    with open(path, encoding="utf-8") as fh:
        return LocaleProfile.from_json(json.load(fh))
