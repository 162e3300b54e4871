"""Signal, plan and model (de)serialization.

Complex values are written as ``[re, im]`` pairs.  Signals are read from a
JSON array of reals or of ``[re, im]`` pairs, or from a single-column CSV.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

import numpy as np

from .companion import CompanionModel
from .errors import InputError


def _complex_list(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise InputError(f"{where}: expected a non-empty JSON array")
    out = np.empty(len(data), dtype=complex)
    for i, item in enumerate(data):
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out[i] = float(item)
        elif isinstance(item, list) and len(item) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in item
        ):
            out[i] = complex(item[0], item[1])
        else:
            raise InputError(f"{where}: entry {i} must be a number or an [re, im] pair")
    if not np.all(np.isfinite(out)):
        raise InputError(f"{where}: non-finite value")
    return out


def parse_signal_text(text: str, where: str = "signal") -> np.ndarray:
    """Parse JSON (array) or single-column CSV text into a complex vector."""
    stripped = text.strip()
    if not stripped:
        raise InputError(f"{where}: empty input")
    if stripped[0] == "[":
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"{where}: invalid JSON ({exc})") from None
        return _complex_list(data, where)
    rows = [r for r in csv.reader(io.StringIO(stripped)) if r and any(c.strip() for c in r)]
    if any(len(r) != 1 for r in rows):
        raise InputError(f"{where}: CSV signals must have a single column")
    try:
        return np.array([float(r[0]) for r in rows], dtype=complex)
    except ValueError as exc:
        raise InputError(f"{where}: non-numeric CSV entry ({exc})") from None


def read_signal(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise InputError(f"signal file not found: {path}")
    return parse_signal_text(path.read_text(), str(path))


def encode(value: Any) -> Any:
    """JSON-ready form: complex -> [re, im], real arrays -> floats, recursively."""
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def dumps(value: Any) -> str:
    return json.dumps(encode(value), indent=2, sort_keys=False) + "\n"


def signal_csv(values: np.ndarray) -> str:
    """Single column when real, ``re,im`` columns otherwise."""
    values = np.asarray(values)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not np.iscomplexobj(values) or not np.any(values.imag):
        for v in np.real(values):
            writer.writerow([repr(float(v))])
    else:
        for v in values:
            writer.writerow([repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def write_text(text: str, out) -> None:
    if out is None or str(out) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def parse_json_arg(arg: str, what: str) -> Any:
    """Inline JSON text or a path to a JSON file."""
    text = arg
    path = Path(arg)
    if not arg.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from None


def read_delta(arg: str) -> np.ndarray:
    data = parse_json_arg(arg, "sampling indicator")
    if not isinstance(data, list) or not all(x in (0, 1) for x in data):
        raise InputError("sampling indicator must be a JSON array of 0/1")
    return np.array(data, dtype=int)


def companion_to_dict(m: CompanionModel) -> dict:
    """All companion-model matrices, complex ones as [re, im] pairs."""
    return {
        "n": m.n,
        "lambda": m.lam,
        "char_poly": m.char_poly.coeffs,
        "c_comp": m.c_comp,
        "vand": m.vand,
        "gft_comp": m.gft_comp,
        "gft_comp_sp": m.gft_comp_sp,
        "a_comp_sp": m.a_comp_sp,
        "m_comp": m.m_comp,
        "cond_vand": m.cond_vand,
    }
