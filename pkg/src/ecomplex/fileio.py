"""File formats: trade/income CSV ingestion and the canonical matrix file.

The canonical matrix file is plain text, diff-able and bit-reproducible:

    countries=<n> products=<m> entries=<z>
    c <country label>        (n lines, matrix row order)
    p <product label>        (m lines, matrix column order)
    <i> <j>                  (binary matrix)  or
    <i> <j> <value>          (valued matrix)

Entry lines are sorted by (i, j). Values are written with Python's
shortest round-trip float representation, so write-read-write is
byte-stable.
"""

from __future__ import annotations

import csv
import hashlib
import math
from pathlib import Path

import numpy as np

from .errors import NegativeValue, ParseError
from .matrix import BinaryMatrix, ExportMatrix
from .validation import IncomePanel

__all__ = [
    "read_trade_csv",
    "read_income_csv",
    "read_matrix",
    "write_matrix",
    "sha256_file",
]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_value(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"cannot parse value {text!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", line)
    return v


def read_trade_csv(path) -> ExportMatrix:
    """country,product,value rows -> ExportMatrix with sorted labels.

    Duplicate (country, product) rows are summed. Values must be
    non-negative; cells whose total is zero are treated as absent.
    """
    totals: dict[tuple[str, str], float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        if [h.strip() for h in header] != ["country", "product", "value"]:
            raise ParseError("expected header country,product,value", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
            country, product, raw = (f.strip() for f in row)
            if not country or not product:
                raise ParseError("empty country or product label", lineno)
            v = _parse_value(raw, lineno)
            if v < 0:
                raise NegativeValue(f"negative export value {raw}", lineno)
            key = (country, product)
            totals[key] = totals.get(key, 0.0) + v

    countries = tuple(sorted({c for c, _ in totals}))
    products = tuple(sorted({p for _, p in totals}))
    c_pos = {lab: i for i, lab in enumerate(countries)}
    p_pos = {lab: j for j, lab in enumerate(products)}
    cells = sorted(
        ((c_pos[c], p_pos[p], v) for (c, p), v in totals.items() if v > 0)
    )
    rows = np.array([c[0] for c in cells], dtype=np.intp)
    cols = np.array([c[1] for c in cells], dtype=np.intp)
    vals = np.array([c[2] for c in cells], dtype=float)
    return ExportMatrix(countries, products, rows, cols, vals)


def read_income_csv(path) -> IncomePanel:
    """country,gdp,natural_rents rows -> IncomePanel (file order kept)."""
    labels: list[str] = []
    gdp: list[float] = []
    rents: list[float] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", 1) from None
        if [h.strip() for h in header] != ["country", "gdp", "natural_rents"]:
            raise ParseError("expected header country,gdp,natural_rents", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
            country, raw_gdp, raw_rents = (f.strip() for f in row)
            if not country:
                raise ParseError("empty country label", lineno)
            if country in seen:
                raise ParseError(f"duplicate country {country!r}", lineno)
            seen.add(country)
            g = _parse_value(raw_gdp, lineno)
            if g <= 0:
                raise ParseError(f"gdp must be positive, got {raw_gdp}", lineno)
            r = _parse_value(raw_rents, lineno)
            if r < 0:
                raise NegativeValue(f"negative natural rents {raw_rents}", lineno)
            labels.append(country)
            gdp.append(g)
            rents.append(r)
    return IncomePanel(tuple(labels), np.array(gdp), np.array(rents))


def write_matrix(m, path) -> None:
    """Write an ExportMatrix (valued) or BinaryMatrix (binary) canonically."""
    valued = isinstance(m, ExportMatrix)
    if valued:
        cells = sorted(zip(m.rows.tolist(), m.cols.tolist(), m.vals.tolist()))
    else:
        cells = sorted(zip(m.rows.tolist(), m.cols.tolist()))
    lines = [f"countries={m.n_countries} products={m.n_products} entries={len(cells)}"]
    lines.extend(f"c {lab}" for lab in m.country_labels)
    lines.extend(f"p {lab}" for lab in m.product_labels)
    if valued:
        lines.extend(f"{i} {j} {repr(float(v))}" for i, j, v in cells)
    else:
        lines.extend(f"{i} {j}" for i, j in cells)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path):
    """Read a canonical matrix file back; returns ExportMatrix when the
    entry lines carry values, BinaryMatrix otherwise."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    try:
        fields = dict(part.split("=", 1) for part in head)
        n = int(fields["countries"])
        m = int(fields["products"])
        z = int(fields["entries"])
    except (ValueError, KeyError):
        raise ParseError("malformed header", 1) from None
    if len(lines) != 1 + n + m + z:
        raise ParseError(
            f"expected {1 + n + m + z} lines per header, found {len(lines)}", 1
        )

    def label_block(offset: int, count: int, prefix: str) -> tuple[str, ...]:
        labs = []
        for k in range(count):
            lineno = offset + k + 1
            line = lines[offset + k]
            if not line.startswith(prefix + " "):
                raise ParseError(f"expected a {prefix!r} label line", lineno)
            labs.append(line[2:])
        return tuple(labs)

    countries = label_block(1, n, "c")
    products = label_block(1 + n, m, "p")

    rows = np.empty(z, dtype=np.intp)
    cols = np.empty(z, dtype=np.intp)
    vals = np.empty(z, dtype=float)
    valued = None
    prev = (-1, -1)
    for k in range(z):
        lineno = 1 + n + m + k + 1
        parts = lines[1 + n + m + k].split()
        if valued is None:
            valued = len(parts) == 3
        if len(parts) != (3 if valued else 2):
            raise ParseError("inconsistent entry line", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("bad entry indices", lineno) from None
        if not (0 <= i < n and 0 <= j < m):
            raise ParseError(f"entry ({i}, {j}) out of range", lineno)
        if (i, j) <= prev:
            raise ParseError("entries must be sorted by (i, j) without repeats", lineno)
        prev = (i, j)
        rows[k], cols[k] = i, j
        if valued:
            v = _parse_value(parts[2], lineno)
            if v <= 0:
                raise ParseError("stored values must be positive", lineno)
            vals[k] = v
    if valued:
        return ExportMatrix(countries, products, rows, cols, vals)
    return BinaryMatrix(countries, products, rows, cols)
