import json
import math
from abc import ABC, abstractmethod

import numpy as np

from consts import FLOAT_DIGITS


def normalise(value):
    """
    Converts numpy scalars/arrays, tuples and sets into plain JSON values.
    Non-finite floats are refused.
    """
    if hasattr(value, "to_dict"):
        return normalise(value.to_dict())
    if isinstance(value, dict):
        return {str(k): normalise(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalise(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(normalise(v) for v in value)
    if isinstance(value, np.ndarray):
        return normalise(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"Non-finite value {value} cannot be reported")
        return value
    return value


def format_float(value: float) -> str:
    """FLOAT_DIGITS significant digits, always readable back as a float."""
    text = format(value, f".{FLOAT_DIGITS}g")
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


def _encode(value) -> str:
    if isinstance(value, dict):
        items = (f"{json.dumps(k)}: {_encode(value[k])}" for k in sorted(value))
        return "{" + ",".join(items) + "}"
    if isinstance(value, list):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    if isinstance(value, float):
        return format_float(value)
    return json.dumps(value)


def dumps(payload) -> str:
    """Canonical JSON: sorted keys, fixed separators, floats at FLOAT_DIGITS significant digits."""
    return _encode(normalise(payload))


class Report(ABC):
    """
    Abstract class for every result that leaves the library as JSON
    - to_dict()
    - jsonify
    """

    @abstractmethod
    def to_dict(self) -> dict:
        pass

    @property
    def jsonify(self) -> str:
        """
        Returns the report as a canonical JSON string.
        :return: JSON string representation of the report.
        """
        return dumps(self.to_dict())
