from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Optional

import click

from cgur.coarse import DiscreteDist
from cgur.errors import StateFileError
from cgur.states import StateModel, state_from_spec


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise click.UsageError(f"{path}: no such file") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_state_file(path: str, default_hbar: float = 1.0) -> StateModel:
    """Parse a state JSON record; every failure names the file (and line for syntax errors)."""
    data = _read_json(path)
    try:
        return state_from_spec(data, default_hbar=default_hbar)
    except ValueError as e:
        raise StateFileError(f"{path}: {e}") from None


def load_histogram_file(path: str) -> DiscreteDist:
    data = _read_json(path)
    try:
        return DiscreteDist.from_json_dict(data)
    except ValueError as e:
        raise StateFileError(f"{path}: {e}") from None


# ----------------------------
# Output
# ----------------------------

def emit_json(payload: Any) -> None:
    click.echo(json.dumps(payload, indent=2))


def to_csv(rows: Iterable[dict], columns: Optional[list[str]] = None) -> str:
    """RFC 4180 CSV with a header row; columns default to the first row's keys."""
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO(newline="")
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def emit_csv(rows: Iterable[dict], columns: Optional[list[str]] = None) -> None:
    click.echo(to_csv(rows, columns), nl=False)


def emit(rows: list[dict], fmt: str, columns: Optional[list[str]] = None) -> None:
    if fmt == "json":
        emit_json(rows)
    else:
        emit_csv(rows, columns)


def flatten(payload: dict, prefix: str = "") -> dict:
    """Nested dict -> dotted keys, for one-row CSV output of a report."""
    out: dict = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, f"{name}."))
        else:
            out[name] = value
    return out
