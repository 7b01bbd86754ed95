"""Plain-text tables and key=value config files.

Tables are comma separated, one record per line, preceded by ``# key=value``
header lines; the ``columns`` key names the columns. Floats are written with
17 significant digits so that files round-trip exactly.
"""

from dataclasses import dataclass, field

import numpy as np


class TableParseError(ValueError):
    def __init__(self, message, path=None, line=None):
        where = f"{path or '<input>'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


@dataclass(eq=False)
class Table:
    columns: list
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))

    def __len__(self):
        return self.data.shape[0]

    def column(self, name):
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column {name!r}; have {', '.join(self.columns)}") from None


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_table(table):
    lines = [f"# {k}={format_value(v)}" for k, v in table.meta.items() if k != "columns"]
    lines.append("# columns=" + ",".join(table.columns))
    for row in table.data:
        lines.append(",".join("%.17g" % v for v in row))
    return "\n".join(lines) + "\n"


def write_table(path, table):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_table(table))


def parse_table(text, path=None, columns=None):
    """Parse table text. Without a ``columns`` header, ``columns`` must be given
    or the first non-comment line must be a name row."""
    meta = {}
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if columns is None and "columns" in meta:
            columns = meta["columns"].split(",")
        if columns is None:
            columns = fields
            continue
        width = width or len(columns)
        if len(fields) != width:
            raise TableParseError(f"expected {width} fields, got {len(fields)}", path, lineno)
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise TableParseError(f"non-numeric field in {line!r}", path, lineno) from None
        if not all(np.isfinite(values)):
            raise TableParseError("non-finite value", path, lineno)
        rows.append(values)
    if columns is None and "columns" in meta:
        columns = meta["columns"].split(",")
    if columns is None:
        raise TableParseError("no column names", path)
    return Table(list(columns), np.array(rows, dtype=float).reshape(-1, len(columns)), meta)


def read_table(path, columns=None):
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read(), path=str(path), columns=columns)


def parse_config(text, path=None):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise TableParseError(f"expected key=value, got {raw.strip()!r}", path, lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise TableParseError("empty key", path, lineno)
        out[key.replace("-", "_")] = value
    return out


def read_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), path=str(path))
