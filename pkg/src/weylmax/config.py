"""Run configuration: validated settings plus a line-oriented file loader."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

__all__ = ["RunConfig", "load_config"]

_DEFAULT_THREADS = os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    threads: int = _DEFAULT_THREADS
    seed: int = 0
    budget_seconds: float = 1800.0
    output_path: str = ""
    format: str = "csv"

    def __post_init__(self) -> None:
        if not (isinstance(self.threads, int) and self.threads >= 1):
            raise ValueError(f"threads must be an integer >= 1, got {self.threads!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 1 << 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (
            isinstance(self.budget_seconds, (int, float))
            and math.isfinite(self.budget_seconds)
            and self.budget_seconds > 0
        ):
            raise ValueError(f"budget_seconds must be positive, got {self.budget_seconds!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")


def _to_int(text: str) -> int:
    return int(text, 10)


def _to_float(text: str) -> float:
    return float(text)


def _to_str(text: str) -> str:
    return text


_CONVERTERS = {
    "threads": _to_int,
    "seed": _to_int,
    "budget_seconds": _to_float,
    "output_path": _to_str,
    "format": _to_str,
}


def load_config(path: str) -> RunConfig:
    """Parse key=value lines into a RunConfig; absent keys keep defaults.

    Blank lines and lines starting with # are skipped.  Unknown keys and
    unparseable values are errors naming the offending line.
    """
    overrides: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: line {lineno}: expected key=value, got {line!r}")
            key = key.strip()
            value = value.strip()
            if key not in _CONVERTERS:
                raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
            try:
                overrides[key] = _CONVERTERS[key](value)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: bad value {value!r} for {key}"
                ) from None
    try:
        return RunConfig(**overrides)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
