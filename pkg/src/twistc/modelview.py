"""Decoding solver models to named rows, with regex/polarity filtering.

Rows are sorted naturally: numeric index components compare as numbers, so
P(2,1) precedes P(10,1). Generated atoms (the reserved `_` prefix) never
appear in a view.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .cnf import ClauseDb
from .lang import LangError, RESERVED_PREFIX
from .sat import Model

POLARITIES = ("all", "true-only", "false-only")


class InvalidPatternError(LangError):
    """The filter is not a valid regular expression."""


@dataclass(frozen=True)
class ModelView:
    rows: tuple[tuple[str, bool], ...]
    pattern: str = ""
    polarity: str = "all"


_CHUNKS = re.compile(r"(\d+)")


def natural_key(text: str) -> tuple:
    return tuple(
        (1, int(chunk)) if chunk.isdigit() else (0, chunk)
        for chunk in _CHUNKS.split(text)
    )


def decode(model: Model, db: ClauseDb) -> ModelView:
    """One row per user atom, naturally sorted; hidden atoms excluded."""
    vm = db.varmap
    rows = [
        (vm.name_of(v), model.values[v])
        for v in vm.user_vars()
        if not vm.name_of(v).startswith(RESERVED_PREFIX)
    ]
    rows.sort(key=lambda row: natural_key(row[0]))
    return ModelView(tuple(rows))


def apply_filter(view: ModelView, pattern: str, polarity: str = "all") -> ModelView:
    """Rows whose atom text matches the pattern and value matches polarity.

    The match is an unanchored search in Python's regex dialect. An invalid
    pattern raises InvalidPatternError; callers keep their previous view.
    """
    if polarity not in POLARITIES:
        raise LangError(f"polarity must be one of {POLARITIES}, got {polarity!r}")
    try:
        rx = re.compile(pattern) if pattern else None
    except re.error as err:
        raise InvalidPatternError(f"invalid filter pattern: {err}") from err
    rows = tuple(
        (name, value)
        for name, value in view.rows
        if (rx is None or rx.search(name))
        and (polarity == "all" or value == (polarity == "true-only"))
    )
    return ModelView(rows, pattern, polarity)


def render_table(view: ModelView) -> str:
    return "\n".join(f"{name} = {'true' if v else 'false'}" for name, v in view.rows)


def rows_json(view: ModelView) -> list[dict]:
    return [{"atom": name, "value": value} for name, value in view.rows]


def render_json(view: ModelView) -> str:
    return json.dumps(rows_json(view))
