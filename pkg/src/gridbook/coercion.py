"""Entry coercion: the ordered rule table that turns typed text into values.

Five rules, tried in order, first match wins, Text as the catch-all. Every
decision leaves a line in the trace so a learner can ask "what happened?"
and get the actual answer instead of a shrug.

Rule table (pinned):
  1 number   integer or decimal using the locale separator
  2 percent  a number followed by '%', stored divided by 100
  3 date     d/m, d/m/y, d-m-y or MonthName-y; DMY order; 2-digit years
             00-49 -> 2000s, 50-99 -> 1900s; missing year -> pinned today's
  4 time     h:m or h:m:s with m<60 and s<60; h<24 is a Time, 24..9999 a
             Duration, both stored as a fraction of a day
  5 text     anything else, verbatim
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass
from functools import lru_cache

from .formats import DisplayFormat, FormatKind, date_to_serial
from .locales import DEFAULT_TODAY, PAPER_FR, LocaleProfile
from .values import Value

RULE_NUMBER = "number"
RULE_PERCENT = "percent"
RULE_DATE = "date"
RULE_TIME = "time"
RULE_TEXT = "text"

RULE_ORDER = (RULE_NUMBER, RULE_PERCENT, RULE_DATE, RULE_TIME, RULE_TEXT)

_RULE_NO = {name: i + 1 for i, name in enumerate(RULE_ORDER)}

_DATE_RE = re.compile(r"^(\d{1,2})([/-])(\d{1,2})(?:\2(\d{1,4}))?$")
_MONTH_YEAR_RE = re.compile(r"^([A-Za-z]+)[/-](\d{1,4})$")
_TIME_RE = re.compile(r"^(\d{1,4}):(\d{1,2})(?::(\d{1,2}))?$")


@dataclass(frozen=True)
class CoercionResult:
    value: Value
    format: DisplayFormat
    rule_fired: str
    explanation: str


@lru_cache(maxsize=None)
def _number_re(sep: str) -> "re.Pattern[str]":
    e = re.escape(sep)
    return re.compile(r"^[+-]?(?:[0-9]+(?:%s[0-9]+)?|%s[0-9]+)$" % (e, e))


def _tried(rule: str, reason: str) -> str:
    return "TRIED rule %d (%s): %s" % (_RULE_NO[rule], rule, reason)


def _fired(rule: str, detail: str) -> str:
    return "FIRED rule %d (%s): %s" % (_RULE_NO[rule], rule, detail)


def _parse_number(text: str, locale: LocaleProfile) -> float | None:
    if _number_re(locale.decimal_sep).match(text):
        return float(text.replace(locale.decimal_sep, "."))
    return None


def _expand_year(digits: str) -> int:
    y = int(digits)
    if len(digits) <= 2:
        return 2000 + y if y <= 49 else 1900 + y
    return y


def _long_date(d: datetime.date, locale: LocaleProfile) -> str:
    return "%d %s %d" % (d.day, locale.month_names[d.month - 1], d.year)


def _try_date(text: str, locale: LocaleProfile, today: datetime.date):
    """Returns (date, pattern, detail) on success, else (None, None, reason)."""
    m = _DATE_RE.match(text)
    if m:
        day, _, month = int(m.group(1)), m.group(2), int(m.group(3))
        if month > 12:
            return None, None, "%s is not a calendar date (month %d)" % (text, month)
        year_digits = m.group(4)
        if year_digits is None:
            year = today.year
            shape = "d/m with today's year"
        else:
            year = _expand_year(year_digits)
            shape = "d/m/y"
        try:
            d = datetime.date(year, month, day)
        except ValueError:
            return None, None, "%s is not a calendar date (day %d)" % (text, day)
        return d, "DD/MM/YYYY", "%s -> %s" % (shape, _long_date(d, locale))
    m = _MONTH_YEAR_RE.match(text)
    if m:
        month = locale.month_index(m.group(1))
        if month is None:
            return None, None, "'%s' is not a month name" % m.group(1)
        year = _expand_year(m.group(2))
        try:
            d = datetime.date(year, month, 1)
        except ValueError:
            return None, None, "year %d out of range" % year
        return d, "MMM-YYYY", "month-year -> %s" % _long_date(d, locale)
    return None, None, "no date pattern"


def _try_time(text: str):
    """Returns (fraction, is_duration, detail) on success, else (None, None, reason)."""
    m = _TIME_RE.match(text)
    if not m:
        return None, None, "no h:m pattern"
    hours, minutes = int(m.group(1)), int(m.group(2))
    seconds = int(m.group(3)) if m.group(3) else 0
    if minutes >= 60:
        return None, None, "minutes %d out of range (must be < 60)" % minutes
    if seconds >= 60:
        return None, None, "seconds %d out of range (must be < 60)" % seconds
    if hours > 9999:
        return None, None, "hours %d out of range (must be <= 9999)" % hours
    fraction = (hours * 3600 + minutes * 60 + seconds) / 86400.0
    clock = "%d:%02d" % (hours, minutes)
    if seconds:
        clock += ":%02d" % seconds
    if hours < 24:
        return fraction, False, "%s is %.10g of a day -> Time %s" % (text, fraction, clock)
    return fraction, True, "%s is %.10g days -> Duration %s" % (text, fraction, clock)


def coerce(text: str, locale: LocaleProfile = PAPER_FR,
           today: datetime.date = DEFAULT_TODAY) -> CoercionResult:
    """Classify one entry string. Total: every input lands on some rule."""
    lines = []

    number = _parse_number(text, locale)
    if number is not None:
        detail = ("integer %d" % number if number == int(number)
                  else "decimal %s -> %.10g" % (text, number))
        lines.append(_fired(RULE_NUMBER, detail))
        return CoercionResult(number, DisplayFormat(FormatKind.GENERAL),
                              RULE_NUMBER, "\n".join(lines))
    lines.append(_tried(RULE_NUMBER, "not a plain number"))

    if text.endswith("%") and len(text) > 1:
        body = _parse_number(text[:-1], locale)
        if body is not None:
            lines.append(_fired(RULE_PERCENT, "%s -> %.10g" % (text, body / 100.0)))
            return CoercionResult(body / 100.0, DisplayFormat(FormatKind.PERCENT, 0),
                                  RULE_PERCENT, "\n".join(lines))
        lines.append(_tried(RULE_PERCENT, "'%' but the rest is not a number"))
    else:
        lines.append(_tried(RULE_PERCENT, "no trailing '%'"))

    d, pattern, detail = _try_date(text, locale, today)
    if d is not None:
        lines.append(_fired(RULE_DATE, detail))
        return CoercionResult(date_to_serial(d),
                              DisplayFormat(FormatKind.DATE, pattern=pattern),
                              RULE_DATE, "\n".join(lines))
    lines.append(_tried(RULE_DATE, detail))

    fraction, is_duration, detail = _try_time(text)
    if fraction is not None:
        lines.append(_fired(RULE_TIME, detail))
        kind = FormatKind.DURATION if is_duration else FormatKind.TIME
        return CoercionResult(fraction, DisplayFormat(kind),
                              RULE_TIME, "\n".join(lines))
    lines.append(_tried(RULE_TIME, detail))

    lines.append(_fired(RULE_TEXT, "no rule matched: Text"))
    return CoercionResult(text, DisplayFormat(FormatKind.GENERAL),
                          RULE_TEXT, "\n".join(lines))


def explain(text: str, locale: LocaleProfile = PAPER_FR,
            today: datetime.date = DEFAULT_TODAY) -> str:
    """The rule-by-rule trace for an entry, one TRIED/FIRED line per rule."""
    return coerce(text, locale, today).explanation
