"""JSON report envelope.

Complex numbers become {"re", "im"} objects, numpy scalars and arrays become
plain numbers and lists, Fractions become "a/b" strings.  Output is sorted
and compact-but-indented so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .. import __version__


def encode(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _num(obj.real), "im": _num(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return encode(obj.to_dict())
    return obj


def _num(x) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def decode_complex(obj: Any) -> Any:
    """Inverse of the complex encoding, applied recursively."""
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            return complex(float(obj["re"]), float(obj["im"]))
        return {k: decode_complex(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode_complex(v) for v in obj]
    return obj


@dataclass
class ReportEnvelope:
    command: str
    inputs: dict
    outputs: dict
    timings: dict = field(default_factory=dict)
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {"tool_version": self.tool_version, "command": self.command,
                "inputs": encode(self.inputs), "outputs": encode(self.outputs),
                "timings": encode(self.timings)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        d = json.loads(text)
        return cls(command=d["command"], inputs=d["inputs"], outputs=d["outputs"],
                   timings=d.get("timings", {}), tool_version=d["tool_version"])


def error_object(exc: BaseException, exit_code: int) -> str:
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc),
                                 "exit_code": exit_code}}, sort_keys=True) + "\n"
