"""
Job files and output records.

A job file is one JSON object:

    {"K": [[2, 1], [1, 2]], "g": 1, "d": 9, "solve_shift": true}

with exactly one of ``n`` / ``solve_shift`` / ``p`` fixing the particle vector.
Layer and cycle indices in job files are 1-based.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra.exactlinalg import IntSymMatrix
from .config import config
from .errors import ChernFqhError, InvalidInputError
from .models import Configuration, broadcast, parse_rational

logger = logging.getLogger(__name__)

COMMANDS = ("chern", "shift", "analyze", "wick", "verify", "sweep")
FORMATS = ("human", "json")


def load_job_file(path: str | Path | None = None) -> dict[str, Any]:
    """Load a job from a JSON file (the packaged default when ``path`` is None)."""
    path = Path(path) if path else config.DEFAULT_JOB_FILE
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from e
    except OSError as e:
        raise InvalidInputError(f"cannot read job file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path} must contain a JSON object")
    return data


def _int(data: dict[str, Any], key: str, default: int | None = None) -> int:
    value = data.get(key, default)
    if value is None:
        raise InvalidInputError(f"missing required key {key!r}")
    if not isinstance(value, int) or isinstance(value, bool):
        raise InvalidInputError(f"{key!r} must be an integer, got {value!r}")
    return value


def _int_list(value: Any, key: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise InvalidInputError(f"{key!r} must be a list of integers")
    for item in value:
        if not isinstance(item, int) or isinstance(item, bool):
            raise InvalidInputError(f"{key!r} entries must be integers, got {item!r}")
    return tuple(value)


def _int_or_list(data: dict[str, Any], key: str, k: int) -> tuple[int, ...] | None:
    """A scalar is broadcast to all k layers."""
    value = data.get(key)
    if value is None:
        return None
    if isinstance(value, int) and not isinstance(value, bool):
        return broadcast(value, k, key)
    return broadcast(_int_list(value, key), k, key)


def _matrix(value: Any) -> IntSymMatrix:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise InvalidInputError("'K' must be a row-major list of integer lists")
    return IntSymMatrix.from_rows(_int_list(row, "K") for row in value)


@dataclass(frozen=True)
class JobSpec:
    """A parsed job; K is already checked for symmetry."""

    command: str
    K: IntSymMatrix
    g: int = 1
    d: tuple[int, ...] = ()
    n: tuple[int, ...] | None = None
    solve_shift: bool = False
    p: tuple[int, ...] | None = None
    insertion: tuple[int, ...] = ()
    cycle: int = 0
    d_values: tuple[int, ...] = ()

    @classmethod
    def from_dict(cls, command: str, data: dict[str, Any]) -> JobSpec:
        if command not in COMMANDS:
            raise InvalidInputError(f"unknown command {command!r}")
        if "K" not in data:
            raise InvalidInputError("missing required key 'K'")
        matrix = _matrix(data["K"])
        k = matrix.size

        g = _int(data, "g", 1)
        if g < 0:
            raise InvalidInputError(f"'g' must be non-negative, got {g}")
        d = _int_or_list(data, "d", k) or ()

        selectors = [
            key
            for key in ("n", "solve_shift", "p")
            if data.get(key) is not None and data.get(key) is not False
        ]
        if len(selectors) > 1:
            raise InvalidInputError(
                f"exactly one of 'n', 'solve_shift', 'p' may fix n; got {', '.join(selectors)}"
            )
        n = broadcast(_int_list(data["n"], "n"), k, "n") if "n" in selectors else None
        p = _int_or_list(data, "p", k)

        insertion = tuple(i - 1 for i in _int_list(data.get("I", []), "I"))
        for i in insertion:
            if not 0 <= i < k:
                raise InvalidInputError(f"insertion index {i + 1} out of range 1..{k}")
        cycle = _int(data, "r", 1) - 1
        if cycle < 0:
            raise InvalidInputError("'r' must be at least 1")

        if "d_values" in data:
            d_values = _int_list(data["d_values"], "d_values")
        elif "d_start" in data:
            step = _int(data, "d_step", 1)
            if step <= 0:
                raise InvalidInputError("'d_step' must be positive")
            d_values = tuple(range(_int(data, "d_start"), _int(data, "d_stop") + 1, step))
        else:
            d_values = ()

        return cls(
            command=command,
            K=matrix,
            g=g,
            d=d,
            n=n,
            solve_shift=bool(data.get("solve_shift", False)),
            p=p,
            insertion=insertion,
            cycle=cycle,
            d_values=d_values,
        )

    @classmethod
    def load(cls, command: str, path: str | Path | None = None) -> JobSpec:
        return cls.from_dict(command, load_job_file(path))

    def require_degrees(self) -> tuple[int, ...]:
        if not self.d:
            raise InvalidInputError(f"the {self.command} command needs 'd'")
        return self.d

    def configuration(self) -> Configuration:
        """Resolve n from whichever of n / solve_shift / p the job names."""
        from .analysis import configuration_from_p, configuration_from_shift

        d = self.require_degrees()
        if self.n is not None:
            return Configuration(self.K, self.g, d, self.n)
        if self.solve_shift:
            return configuration_from_shift(self.K, self.g, d)
        if self.p is not None:
            return configuration_from_p(self.K, self.g, d, self.p)
        raise InvalidInputError("one of 'n', 'solve_shift', 'p' must fix the particle vector")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"K": self.K.to_lists(), "g": self.g}
        if self.d:
            out["d"] = list(self.d)
        if self.n is not None:
            out["n"] = list(self.n)
        if self.solve_shift:
            out["solve_shift"] = True
        if self.p is not None:
            out["p"] = list(self.p)
        if self.command == "wick":
            out["I"] = [i + 1 for i in self.insertion]
            out["r"] = self.cycle + 1
        if self.command == "sweep" and self.d_values:
            out["d_values"] = list(self.d_values)
        return out


# ========================================
# Records
# ========================================


def make_record(
    command: str,
    input_echo: dict[str, Any],
    result: dict[str, Any] | None = None,
    validity: dict[str, bool] | None = None,
    errors: list[dict[str, str]] | None = None,
) -> dict[str, Any]:
    return {
        "command": command,
        "input": input_echo,
        "result": result or {},
        "validity": validity or {},
        "errors": errors or [],
    }


def error_record(command: str, input_echo: dict[str, Any], error: ChernFqhError) -> dict[str, Any]:
    return make_record(command, input_echo, errors=[error.to_dict()])


def dump_record(record: dict[str, Any]) -> str:
    return json.dumps(record, indent=2)


def parse_record(text: str) -> dict[str, Any]:
    """Inverse of ``dump_record``; rational strings stay strings."""
    record = json.loads(text)
    missing = {"command", "input", "result", "validity", "errors"} - set(record)
    if missing:
        raise InvalidInputError(f"record is missing {sorted(missing)}")
    return record


def record_rationals(values: list[str]) -> list[Fraction]:
    return [parse_rational(v) for v in values]
