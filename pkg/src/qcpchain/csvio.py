"""Deterministic CSV serialization shared by the CLI subcommands.

Every file starts with a single comment line echoing the run
configuration and tool version, then a header row, then data rows.
Floats are written in full double-precision scientific notation so that
repeated runs of the same config produce byte-identical files.
"""

import csv
import io

SWEEP_COLUMNS = ("L", "omega", "gamma_re", "gamma_im", "e0_re", "e0_im",
                 "rule", "overlap_prev", "mx", "my", "mz", "nup", "chi",
                 "gap", "svn_half")
SPECTRUM_COLUMNS = ("L", "omega", "gamma_re", "gamma_im", "e_re", "e_im")
CORR_COLUMNS = ("L", "gamma", "n", "value")
ENTROPY_COLUMNS = ("L", "omega", "gamma_re", "gamma_im", "cut", "svn")


class CsvFormatError(ValueError):
    """Raised on malformed CSV input, carrying the offending line number."""

    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def format_value(x):
    """Serialize one cell: floats in %.17e, ints plain, None empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17e}"
    return str(x)


def config_comment(config, version):
    """Single deterministic comment line recording config and version."""
    parts = [f"{k}={config[k]}" for k in sorted(config)]
    return "# config: " + " ".join(parts) + f" | version: {version}"


def write_csv(path, columns, rows, config, version):
    """Write rows (dicts keyed by column name) deterministically.

    Missing keys serialize as empty fields.  ``path`` may be "-" for
    stdout capture via a returned string.
    """
    buf = io.StringIO()
    buf.write(config_comment(config, version) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    text = buf.getvalue()
    if path == "-":
        return text
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path):
    """Parse a CSV produced by write_csv.

    Returns (comment, columns, rows) with rows as dicts of raw strings.
    Raises CsvFormatError with the line number on malformed content.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    comment = ""
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        comment = lines[i]
        i += 1
    if i >= len(lines) or not lines[i].strip():
        raise CsvFormatError(path, i + 1, "missing header row")
    reader = csv.reader(lines[i:])
    columns = next(reader)
    rows = []
    for j, rec in enumerate(reader, start=i + 2):
        if not rec:
            continue
        if len(rec) != len(columns):
            raise CsvFormatError(
                path, j, f"expected {len(columns)} fields, got {len(rec)}")
        rows.append(dict(zip(columns, rec)))
    return comment, columns, rows


def column_floats(rows, name, path="<csv>"):
    """Extract one column as floats, skipping empty cells; parse errors
    carry the offending line number."""
    out = []
    for idx, row in enumerate(rows):
        cell = row.get(name, "")
        if cell == "":
            continue
        try:
            out.append((idx, float(cell)))
        except ValueError as exc:
            raise CsvFormatError(path, idx + 3,
                                 f"bad float in column {name!r}: "
                                 f"{cell!r}") from exc
    return out
