"""File formats: context-family JSON, space dumps, trial-record CSV."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import RecordError, ValidationError
from .simulation import TrialBatch
from .space import KolmogorovSpace, dump_space
from .tables import ContextFamily, build_family

RECORD_HEADER = ("trial_id", "eta_a", "eta_b", "a", "b")


def _int_field(doc, key):
    val = doc.get(key)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ValidationError(f"'{key}' must be an integer, got {val!r}")
    return val


def _numbers(value, what):
    if not isinstance(value, list) or any(
        isinstance(x, bool) or not isinstance(x, (int, float)) for x in value
    ):
        raise ValidationError(f"{what} must be a list of numbers, got {value!r}")
    return [float(x) for x in value]


def family_from_dict(doc: dict) -> ContextFamily:
    """Parse a context-family document.

    ``{"m", "n", "model": "explicit"|"singlet", "angles_a", "angles_b",
    "tables": {"i,j": [p_pp, p_pm, p_mp, p_mm]}}``; explicit families carry
    ``tables`` only, singlet families ``angles_a``/``angles_b`` only.
    """
    if not isinstance(doc, dict):
        raise ValidationError("family document must be a JSON object")
    m = _int_field(doc, "m")
    n = _int_field(doc, "n")
    model = doc.get("model", "explicit")
    has_tables = "tables" in doc
    has_angles = "angles_a" in doc or "angles_b" in doc
    if model == "singlet":
        if has_tables:
            raise ValidationError("singlet family must not carry 'tables'")
        if "angles_a" not in doc or "angles_b" not in doc:
            raise ValidationError("singlet family needs 'angles_a' and 'angles_b'")
        return build_family(
            m=m, n=n, model="singlet",
            angles_a=_numbers(doc["angles_a"], "angles_a"),
            angles_b=_numbers(doc["angles_b"], "angles_b"),
        )
    if model != "explicit":
        raise ValidationError(f"unknown model {model!r}")
    if has_angles:
        raise ValidationError("explicit family must not carry angles")
    if not has_tables or not isinstance(doc["tables"], dict):
        raise ValidationError("explicit family needs a 'tables' object")
    tables = {}
    for key, raw in doc["tables"].items():
        try:
            i, j = (int(s) for s in key.split(","))
        except ValueError:
            raise ValidationError(f"table key {key!r} is not 'i,j'") from None
        tables[(i, j)] = _numbers(raw, f"table {key!r}")
    return build_family(tables, m=m, n=n, model="explicit")


def family_to_dict(family: ContextFamily) -> dict:
    doc = {"m": family.m, "n": family.n, "model": family.model}
    if family.model == "singlet":
        doc["angles_a"] = list(family.angles_a)
        doc["angles_b"] = list(family.angles_b)
    else:
        doc["tables"] = {f"{i},{j}": list(t.values) for (i, j), t in sorted(family.tables.items())}
    return doc


def load_family(path) -> ContextFamily:
    with open(path, encoding="utf-8") as fh:
        return family_from_dict(json.load(fh))


def save_family(family: ContextFamily, path) -> None:
    Path(path).write_text(json.dumps(family_to_dict(family), indent=2) + "\n", encoding="utf-8")


def write_space_dump(space: KolmogorovSpace, path) -> None:
    Path(path).write_text(json.dumps(dump_space(space), indent=1) + "\n", encoding="utf-8")


def read_space_dump(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_records(batch: TrialBatch, path) -> None:
    """Write records as CSV with LF line endings."""
    data = np.column_stack([batch.trial_id, batch.eta_a, batch.eta_b, batch.a, batch.b])
    with open(path, "w", encoding="ascii", newline="") as fh:
        np.savetxt(fh, data, fmt="%d", delimiter=",", header=",".join(RECORD_HEADER),
                   comments="", newline="\n")


def read_records(path) -> TrialBatch:
    """Read a trial-record CSV; values are range-checked later by ``estimate``."""
    with open(path, encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RECORD_HEADER:
            raise RecordError(f"header must be {','.join(RECORD_HEADER)}, got {header!r}")
        rows = []
        for rowno, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != 5:
                raise RecordError(f"expected 5 fields, got {len(row)}", row=rowno)
            try:
                rows.append([int(x) for x in row])
            except ValueError:
                raise RecordError(f"non-integer field in {row!r}", row=rowno) from None
    if any(r[0] < 0 for r in rows):
        bad = next(k for k, r in enumerate(rows, start=1) if r[0] < 0)
        raise RecordError("trial_id must be >= 0", row=bad)
    return TrialBatch.from_records(rows)


def fmt(x) -> str:
    """Shortest round-trip text for a number; used by every text report."""
    if x is None:
        return "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)
