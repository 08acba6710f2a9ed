"""Report serialisation, exit codes and structural diffs."""

import csv
import json
import math
import os

from ..errors import IoFailure

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3

_VIOLATED = {"Violated", "ViolatesSTEC"}
_INCONCLUSIVE = {"Inconclusive", "Saturated"}


def exit_code(outcomes):
    """Worst outcome wins: violated over inconclusive over success."""
    if any(o in _VIOLATED for o in outcomes):
        return EXIT_VIOLATED
    if any(o in _INCONCLUSIVE for o in outcomes):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def plain(obj):
    """Recursively convert numpy scalars/arrays and tuples to built-in types."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return plain(obj.tolist())
    return obj


def _number(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    # keep the float type on the way back in
    return text if any(c in text for c in ".e") else text + ".0"


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    if hasattr(obj, "item") and hasattr(obj, "dtype"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)) or hasattr(obj, "tolist"):
        seq = obj.tolist() if hasattr(obj, "tolist") else obj
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def results_bytes(report):
    """Canonical bytes of the deterministic part of a report."""
    return dumps({"scenario": report.scenario, "results": report.results, "outcomes": report.outcomes}).encode()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "tables":
                continue
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and not any(isinstance(v, (dict, list)) for v in obj):
        yield prefix[:-1], ";".join(_number(v) if isinstance(v, float) else str(v) for v in obj)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], _number(obj) if isinstance(obj, float) else obj


def _tables(results):
    return results.get("tables", {}) if isinstance(results, dict) else {}


def write_table(path, table):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(table["columns"])
        for row in table["rows"]:
            w.writerow([_number(v) if isinstance(v, float) else v for v in row])


def emit_report(report, destination, fmt="json"):
    """Write a report; csv writes a key/value summary plus one file per table.

    Returns the list of paths written.
    """
    try:
        if fmt == "json":
            with open(destination, "w", encoding="utf-8") as fh:
                fh.write(dumps(report.payload()) + "\n")
            return [destination]
        if fmt != "csv":
            raise ValueError(f"unknown format {fmt!r}")
        written = [destination]
        with open(destination, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["key", "value"])
            for k, v in _flatten({"scenario": report.scenario, "results": report.results,
                                  "outcomes": report.outcomes, "provenance": report.provenance}):
                w.writerow([k, v])
        stem, _ = os.path.splitext(destination)
        for name, table in _tables(report.results).items():
            path = f"{stem}.{name}.csv"
            write_table(path, table)
            written.append(path)
        return written
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc}") from exc


def load_report(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot read report {path}: {exc}") from exc


def diff(a, b, path=""):
    """Structural differences as ``(path, left, right)`` triples."""
    out = []
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b), key=str):
            p = f"{path}/{k}"
            if k not in a:
                out.append((p, "<missing>", b[k]))
            elif k not in b:
                out.append((p, a[k], "<missing>"))
            else:
                out.extend(diff(a[k], b[k], p))
    elif isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for i, (x, y) in enumerate(zip(a, b)):
            out.extend(diff(x, y, f"{path}/{i}"))
    elif a != b and not (isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b)):
        out.append((path or "/", a, b))
    return out
