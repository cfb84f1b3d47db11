"""CSV/JSON writers for plot data. Files are written atomically (temp + rename)."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    if isinstance(x, float):
        return FLOAT_FMT.format(x)
    return str(x)


def atomic_write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(float(x)) if hasattr(x, "dtype") else _fmt(x) for x in row])
    return atomic_write_text(path, buf.getvalue())


def _json_default(x):
    if hasattr(x, "tolist"):  # numpy scalars and arrays
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def write_json(path: Path, obj) -> Path:
    text = json.dumps(obj, indent=2, allow_nan=False, default=_json_default)
    return atomic_write_text(path, text + "\n")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_trajectory_csv(path: Path, times, traj, extra: dict | None = None) -> Path:
    """Columns ``t, u, v, w, Pe`` plus any extra named columns."""
    extra = extra or {}
    header = ["t", "u", "v", "w", "Pe", *extra]
    cols = [times, traj[:, 0], traj[:, 1], traj[:, 2], 0.5 * (1.0 + traj[:, 2]), *extra.values()]
    return write_csv(path, header, zip(*cols))
