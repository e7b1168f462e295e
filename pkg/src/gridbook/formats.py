"""Display formats and the serial date model.

Values live in the grid as plain scalars; a cell's format only decides the
text a viewer sees. Dates and times share one representation: days since
the epoch 1899-12-30 (day 0), with clock time as the fractional part. One
number, several costumes.
"""

from __future__ import annotations

import datetime
import enum
from dataclasses import dataclass

from .locales import LocaleProfile
from .values import ERROR_TEXT, ErrorValue, Value, is_number

EPOCH = datetime.date(1899, 12, 30)


class FormatKind(enum.Enum):
    GENERAL = "General"
    FIXED = "Fixed"
    PERCENT = "Percent"
    DATE = "Date"
    TIME = "Time"
    DURATION = "Duration"
    TEXT = "Text"


@dataclass(frozen=True)
class DisplayFormat:
    kind: FormatKind = FormatKind.GENERAL
    decimals: int = 0
    # Date formats carry a pattern: "DD/MM/YYYY" or "MMM-YYYY".
    pattern: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind in (FormatKind.FIXED, FormatKind.PERCENT):
            out["decimals"] = self.decimals
        if self.pattern:
            out["pattern"] = self.pattern
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DisplayFormat":
        return cls(
            kind=FormatKind(data["kind"]),
            decimals=int(data.get("decimals", 0)),
            pattern=data.get("pattern", ""),
        )


GENERAL = DisplayFormat()


@dataclass(frozen=True)
class StyleState:
    color: str = ""
    bold: bool = False

    def merged_over(self, base: "StyleState") -> "StyleState":
        return StyleState(
            color=self.color or base.color,
            bold=self.bold or base.bold,
        )

    def to_json(self) -> dict:
        return {"color": self.color, "bold": self.bold}

    @classmethod
    def from_json(cls, data: dict) -> "StyleState":
        return cls(color=data.get("color", ""), bold=bool(data.get("bold", False)))


PLAIN = StyleState()


def date_to_serial(d: datetime.date) -> float:
    return float((d - EPOCH).days)


def serial_to_date(serial: float) -> datetime.date:
    return EPOCH + datetime.timedelta(days=int(serial))


def time_to_fraction(hour: int, minute: int, second: int = 0) -> float:
    return (hour * 3600 + minute * 60 + second) / 86400.0


def round_half_away(x: float, decimals: int) -> float:
    """Round with ties away from zero, the way a calculator would."""
    scale = 10.0 ** decimals
    scaled = x * scale
    if scaled >= 0:
        rounded = float(int(scaled + 0.5))
    else:
        rounded = -float(int(-scaled + 0.5))
    return rounded / scale


def _localize(text: str, locale: LocaleProfile) -> str:
    if locale.decimal_sep != ".":
        return text.replace(".", locale.decimal_sep)
    return text


def _general_number(x: float, locale: LocaleProfile) -> str:
    if x == int(x) and abs(x) < 1e16:
        return _localize(str(int(x)), locale)
    text = "%.10g" % x
    # %.10g may pick exponent notation for large magnitudes; keep it.
    return _localize(text, locale)


def _fixed_number(x: float, decimals: int, locale: LocaleProfile) -> str:
    rounded = round_half_away(x, decimals)
    if decimals == 0:
        # Avoid "-0".
        if rounded == 0:
            rounded = 0.0
        return _localize(str(int(rounded)), locale)
    text = "%.*f" % (decimals, rounded)
    if text == "-" + "0" * 1 + "." + "0" * decimals:  # pragma: no cover
        text = text[1:]
    return _localize(text, locale)


def render_date(serial: float, pattern: str, locale: LocaleProfile) -> str:
    try:
        d = serial_to_date(serial)
    except (OverflowError, ValueError):
        return _general_number(serial, locale)
    if pattern == "MMM-YYYY":
        return "%s-%04d" % (locale.month_names[d.month - 1], d.year)
    return "%02d/%02d/%04d" % (d.day, d.month, d.year)


def render_time(serial: float) -> str:
    # Round to the nearest minute or second depending on what the value holds.
    total_seconds = int(serial * 86400.0 + 0.5)
    seconds = total_seconds % 60
    if seconds:
        hours, rem = divmod(total_seconds, 3600)
        minutes = rem // 60
        return "%d:%02d:%02d" % (hours % 24, minutes, seconds)
    total_minutes = int(serial * 1440.0 + 0.5)
    hours, minutes = divmod(total_minutes, 60)
    return "%d:%02d" % (hours % 24, minutes)


def render_duration(serial: float) -> str:
    negative = serial < 0
    total_minutes = int(abs(serial) * 1440.0 + 0.5)
    hours, minutes = divmod(total_minutes, 60)
    text = "%d:%02d" % (hours, minutes)
    return "-" + text if negative else text


def machine_text(value: Value) -> str:
    """Locale-independent canonical text: '.' decimals at full precision.

    This is what '&' concatenation and the protocol's machine field use,
    so clients can parse numbers without knowing the display locale.
    """
    if value is None:
        return ""
    if isinstance(value, ErrorValue):
        return ERROR_TEXT[value.kind]
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, str):
        return value
    x = float(value)
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def render(value: Value, fmt: DisplayFormat, locale: LocaleProfile) -> str:
    """The display string for a value under a format. Never raises."""
    if value is None:
        return ""
    if isinstance(value, ErrorValue):
        return ERROR_TEXT[value.kind]
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, str):
        return value
    # Numbers from here down.
    x = float(value)
    kind = fmt.kind
    if kind is FormatKind.FIXED:
        return _fixed_number(x, fmt.decimals, locale)
    if kind is FormatKind.PERCENT:
        return _fixed_number(x * 100.0, fmt.decimals, locale) + "%"
    if kind is FormatKind.DATE:
        return render_date(x, fmt.pattern, locale)
    if kind is FormatKind.TIME:
        return render_time(x)
    if kind is FormatKind.DURATION:
        return render_duration(x)
    return _general_number(x, locale)
