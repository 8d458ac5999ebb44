"""Deterministic report serialization.

All floats are quantized to 12 significant digits before writing, dict keys
are sorted, and rows arrive pre-sorted from the runners, so identical
(config, seed, version) triples produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterable, Sequence

import numpy as np


def fmt_float(x: float) -> str:
    return f"{float(x):.12g}"


def quantize(obj):
    """Round floats to 12 significant digits recursively; numpy scalars and
    arrays are converted; non-finite floats become None (strict JSON)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt_float(x))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [quantize(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": quantize(obj.real), "im": quantize(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): quantize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [quantize(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json_text(obj) -> str:
    return json.dumps(quantize(obj), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def write_json(obj, path: str) -> str:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_json_text(obj))
    return path


def _cell(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence],
              meta: dict | None = None) -> str:
    """CSV table with an optional '#'-prefixed JSON metadata block on top."""
    lines = []
    if meta is not None:
        for ln in to_json_text(meta).rstrip("\n").split("\n"):
            lines.append("# " + ln)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
