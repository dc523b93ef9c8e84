"""Discrete hyperparameter search spaces.

A space is an ordered list of named axes, each holding a finite list of
candidate values. Configurations are points of the Cartesian product and
carry their row-major rank within the grid, which every other module uses
as the canonical identifier and tie-breaker.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

Scalar = Union[int, float]


class SpaceError(ValueError):
    """Raised for malformed spaces or configurations."""


class SpaceFileError(SpaceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class HyperparamAxis:
    name: str
    values: tuple[Scalar, ...]

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SpaceError("axis name must be a non-empty string")
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise SpaceError(f"axis {self.name!r} has no values")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SpaceError(f"axis {self.name!r}: value {v!r} is not a number")
        if len(set(values)) != len(values):
            raise SpaceError(f"axis {self.name!r} has duplicate values")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Configuration:
    assignments: Mapping[str, Scalar]
    index: int

    def __getitem__(self, name: str) -> Scalar:
        return self.assignments[name]

    def as_dict(self) -> dict[str, Scalar]:
        return dict(self.assignments)

    def __hash__(self):
        return hash((self.index, tuple(self.assignments.items())))


@dataclass(frozen=True)
class SearchSpace:
    axes: tuple[HyperparamAxis, ...]
    _strides: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if not axes:
            raise SpaceError("a search space needs at least one axis")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise SpaceError("axis names must be unique")
        strides = []
        acc = 1
        for axis in reversed(axes):
            strides.append(acc)
            acc *= len(axis)
        object.__setattr__(self, "_strides", tuple(reversed(strides)))

    @classmethod
    def from_dict(cls, axes: Mapping[str, Sequence[Scalar]]) -> "SearchSpace":
        return cls(tuple(HyperparamAxis(name, tuple(vals)) for name, vals in axes.items()))

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.axes]

    @property
    def size(self) -> int:
        return math.prod(len(a) for a in self.axes)

    def __len__(self) -> int:
        return self.size

    def config_at(self, index: int) -> Configuration:
        if not 0 <= index < self.size:
            raise SpaceError(f"index {index} outside grid of size {self.size}")
        assignments = {}
        rest = index
        for axis, stride in zip(self.axes, self._strides):
            pos, rest = divmod(rest, stride)
            assignments[axis.name] = axis.values[pos]
        return Configuration(assignments, index)

    def index_of(self, assignments: Mapping[str, Any]) -> int:
        return validate_config(self, assignments).index

    def to_json(self) -> list[dict]:
        return [{"name": a.name, "values": list(a.values)} for a in self.axes]


def enumerate_grid(space: SearchSpace) -> list[Configuration]:
    """All configurations of ``space`` in row-major order (last axis fastest)."""
    out = []
    for i, combo in enumerate(itertools.product(*(a.values for a in space.axes))):
        out.append(Configuration(dict(zip(space.names, combo)), i))
    return out


def sample_without_replacement(space: SearchSpace, count: int, seed: int) -> list[Configuration]:
    if count < 0:
        raise SpaceError("count must be non-negative")
    if count > space.size:
        raise SpaceError(f"cannot draw {count} configurations from a grid of {space.size}")
    rng = np.random.default_rng(seed)
    picks = rng.choice(space.size, size=count, replace=False)
    return [space.config_at(int(i)) for i in picks]


def validate_config(space: SearchSpace, assignments: Mapping[str, Any]) -> Configuration:
    unknown = [k for k in assignments if k not in space.names]
    if unknown:
        raise SpaceError(f"unknown axis {unknown[0]!r}")
    index = 0
    canonical = {}
    for axis, stride in zip(space.axes, space._strides):
        if axis.name not in assignments:
            raise SpaceError(f"missing axis {axis.name!r}")
        value = assignments[axis.name]
        try:
            pos = axis.values.index(value)
        except ValueError:
            raise SpaceError(
                f"value {value!r} not listed for axis {axis.name!r}"
            ) from None
        canonical[axis.name] = axis.values[pos]
        index += pos * stride
    return Configuration(canonical, index)


def parse_space(text: str) -> SearchSpace:
    """Parse a JSON array of ``{"name": ..., "values": [...]}`` entries.

    Errors name the line where the offending entry starts.
    """
    decoder = json.JSONDecoder()

    def line_of(pos: int) -> int:
        return text.count("\n", 0, pos) + 1

    def skip_ws(pos: int) -> int:
        while pos < len(text) and text[pos] in " \t\r\n":
            pos += 1
        return pos

    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceFileError(exc.msg, exc.lineno) from None

    pos = skip_ws(0)
    if pos >= len(text) or text[pos] != "[":
        raise SpaceFileError("top level must be an array", line_of(pos))
    pos = skip_ws(pos + 1)
    axes = []
    seen: dict[str, int] = {}
    while text[pos] != "]":
        start = pos
        entry, pos = decoder.raw_decode(text, pos)
        line = line_of(start)
        if not isinstance(entry, dict) or set(entry) != {"name", "values"}:
            raise SpaceFileError('each axis must be {"name": ..., "values": [...]}', line)
        name, values = entry["name"], entry["values"]
        if not isinstance(values, list):
            raise SpaceFileError(f"axis {name!r}: values must be an array", line)
        if not values:
            raise SpaceFileError(f"axis {name!r} has an empty values array", line)
        if name in seen:
            raise SpaceFileError(
                f"duplicate axis {name!r} (first declared on line {seen[name]})", line
            )
        seen[name] = line
        try:
            axes.append(HyperparamAxis(name, tuple(values)))
        except SpaceError as exc:
            raise SpaceFileError(str(exc), line) from None
        pos = skip_ws(pos)
        if text[pos] == ",":
            pos = skip_ws(pos + 1)
    if not axes:
        raise SpaceFileError("space declares no axes", line_of(pos))
    return SearchSpace(tuple(axes))


def load_space(path: str | Path) -> SearchSpace:
    return parse_space(Path(path).read_text())


def dump_space(space: SearchSpace, path: str | Path) -> None:
    lines = ",\n".join("  " + json.dumps(entry) for entry in space.to_json())
    Path(path).write_text("[\n" + lines + "\n]\n")
