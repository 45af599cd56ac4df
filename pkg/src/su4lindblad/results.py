"""Result files: CSV or JSON tables with unit-annotated column names.

Every column name has the form ``"name [unit]"``.  Floats are written with 17
significant digits so that reading a file back recovers the exact values.
Complex quantities occupy two columns, ``name_re`` and ``name_im``.
"""

import csv
import io
import json
import math
import re

from .errors import ConfigError

_HEADER = re.compile(r"^(?P<name>[^\[\]]+?) \[(?P<unit>[^\[\]]*)\]$")


def fmt(x):
    """Locale-free text form of a number: ints verbatim, floats to 17 digits."""
    if isinstance(x, bool):
        raise TypeError("booleans are not result values")
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _parse(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


class Table:
    """Column-ordered table of numbers; ``units`` is parallel to ``columns``."""

    def __init__(self, columns, units):
        if len(columns) != len(units):
            raise ValueError("columns and units differ in length")
        self.columns = list(columns)
        self.units = list(units)
        self.rows = []

    def add(self, values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))

    def header(self):
        return [f"{c} [{u}]" for c, u in zip(self.columns, self.units)]

    def column(self, name):
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def complex_column(self, name):
        return [complex(a, b) for a, b in zip(self.column(name + "_re"), self.column(name + "_im"))]

    def to_csv(self):
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header())
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def to_json(self):
        cols = [json.dumps(h) for h in self.header()]
        lines = []
        for r in self.rows:
            # JSON has no nan/inf literal; such values become null
            vals = ["null" if isinstance(v, float) and not math.isfinite(v) else fmt(v) for v in r]
            lines.append("  {" + ", ".join(f"{c}: {v}" for c, v in zip(cols, vals)) + "}")
        return "[\n" + ",\n".join(lines) + "\n]\n" if lines else "[]\n"

    def write(self, path, fmt_name):
        text = self.to_csv() if fmt_name == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _split_header(h):
    m = _HEADER.match(h)
    if m is None:
        raise ConfigError(f"column header {h!r} is not of the form 'name [unit]'")
    return m.group("name"), m.group("unit")


def read_table(path):
    """Parse a file written by :meth:`Table.write` (format from the suffix)."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        rows = json.loads(text)
        if not rows:
            raise ConfigError(f"{path} holds no rows, so its columns are unknown")
        heads = list(rows[0])
        names, units = zip(*(_split_header(h) for h in heads))
        t = Table(names, units)
        for r in rows:
            t.add([float("nan") if r[h] is None else r[h] for h in heads])
        return t
    reader = csv.reader(io.StringIO(text, newline=""))
    heads = next(reader)
    names, units = zip(*(_split_header(h) for h in heads))
    t = Table(names, units)
    for r in reader:
        t.add([_parse(v) for v in r])
    return t
