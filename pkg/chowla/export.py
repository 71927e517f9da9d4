"""Result serialization: JSON, JSON lines, CSV and edge lists, all written atomically."""

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "edgelist")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return str(obj)


def dumps(obj, *, indent: int | None = 2) -> str:
    return json.dumps(obj, indent=indent, default=_json_default, ensure_ascii=False)


def atomic_write_bytes(path: str | Path, data: bytes) -> Path:
    """Write ``data`` to a temp file beside ``path`` and rename it into place.

    A crash mid-write leaves at most an orphaned ``.tmp`` file, never a
    partial result under the final name.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: str | Path, obj) -> Path:
    out = atomic_write_text(path, dumps(obj) + "\n")
    logger.info("Wrote %s", out)
    return out


def jsonl_text(records: Iterable[dict]) -> str:
    return "".join(dumps(r, indent=None) + "\n" for r in records)


def write_jsonl(path: str | Path, records: Iterable[dict]) -> Path:
    records = list(records)
    out = atomic_write_text(path, jsonl_text(records))
    logger.info("Wrote %d records to %s", len(records), out)
    return out


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    return dumps(value, indent=None)


def _uncell(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def csv_text(rows: list[dict]) -> str:
    """One column per top-level key; nested values are JSON-encoded cells."""
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(path: str | Path, rows: list[dict]) -> Path:
    out = atomic_write_text(path, csv_text(rows))
    logger.info("Wrote %d rows to %s", len(rows), out)
    return out


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return [{k: _uncell(v) for k, v in row.items()} for row in csv.DictReader(f)]


def parse_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _uncell(v) for k, v in row.items()} for row in reader]


def edgelist_text(graphs: Iterable[tuple[int, Iterable[tuple[int, int, int]]]]) -> str:
    """Edge lists as "a b q" lines, each graph headed by "# trial t"."""
    lines: list[str] = []
    for trial, edges in graphs:
        lines.append(f"# trial {trial}")
        lines.extend(f"{a} {b} {q}" for a, b, q in edges)
    return "\n".join(lines) + "\n"


def write_edgelist(path: str | Path, graphs) -> Path:
    out = atomic_write_text(path, edgelist_text(graphs))
    logger.info("Wrote edge lists to %s", out)
    return out


def parse_edgelist(text: str) -> dict[int, list[tuple[int, int, int]]]:
    graphs: dict[int, list[tuple[int, int, int]]] = {}
    current: list[tuple[int, int, int]] | None = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("# trial"):
            current = graphs.setdefault(int(line.split()[-1]), [])
            continue
        a, b, q = (int(x) for x in line.split())
        if current is None:
            current = graphs.setdefault(0, [])
        current.append((a, b, q))
    return graphs
