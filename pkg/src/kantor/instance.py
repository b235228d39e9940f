"""Measures (discrete images), problem assembly, validation, and file ingestion.

A measure is a finite set of distinct support points, each carrying positive
mass.  Points are kept in canonical scan order (x + y ascending, ties by x),
which is the ordinal order every other module uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import ParseError, ValidationError
from .geometry import Coord, Metric, Point, as_point

# Relative tolerance for balance/completeness checks on non-integral masses.
MASS_REL_TOL = 1e-12


class MassPoint(NamedTuple):
    position: Point
    mass: Coord


class Measure:
    """An image: distinct weighted support points in canonical order."""

    __slots__ = ("points", "position_index", "total_mass", "_masses", "_integral")

    def __init__(self, points: Iterable[MassPoint]):
        ordered = sorted(
            (MassPoint(as_point(mp[0]), mp[1]) for mp in points),
            key=lambda mp: (mp.position[0] + mp.position[1], mp.position[0]),
        )
        if not ordered:
            raise ValidationError("empty measure")
        index: dict[Point, int] = {}
        for i, mp in enumerate(ordered):
            x, y = mp.position
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValidationError(f"non-finite coordinate at {mp.position}")
            if not mp.mass > 0:
                raise ValidationError(f"nonpositive mass {mp.mass} at {mp.position}")
            if mp.position in index:
                raise ValidationError(f"duplicate support point {mp.position}")
            index[mp.position] = i
        self.points = tuple(ordered)
        self.position_index = index
        self.total_mass = sum(mp.mass for mp in ordered)
        self._masses = [mp.mass for mp in ordered]
        self._integral = all(
            isinstance(mp.position[0], int)
            and isinstance(mp.position[1], int)
            and isinstance(mp.mass, int)
            for mp in ordered
        )

    @classmethod
    def merged(cls, pairs: Iterable[tuple]) -> "Measure":
        """Build a measure, summing masses over repeated positions."""
        acc: dict[Point, Coord] = {}
        for pos, mass in pairs:
            p = as_point(pos)
            acc[p] = acc.get(p, 0) + mass
        return cls(MassPoint(p, m) for p, m in acc.items())

    @property
    def support_index(self) -> dict:
        return self.position_index

    def positions(self) -> list[Point]:
        return [mp.position for mp in self.points]

    def masses(self) -> list[Coord]:
        """Per-point masses in canonical order (shared list: treat as read-only)."""
        return self._masses

    @property
    def is_integral(self) -> bool:
        return self._integral

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        return isinstance(other, Measure) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self) -> str:
        return f"Measure({len(self.points)} points, total mass {self.total_mass})"


@dataclass(frozen=True)
class ProblemInstance:
    """A balanced transport problem: move `source` onto `sink` under `metric`."""

    source: Measure
    sink: Measure
    metric: Metric

    @property
    def is_integral(self) -> bool:
        return self.source.is_integral and self.sink.is_integral


def _parse_number(token: str) -> Coord:
    try:
        return int(token)
    except ValueError:
        value = float(token)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {token!r}")
        return value


def load_points(path) -> Measure:
    """Read a .pts file: one "x y mass" triple per line, '#' starts a comment.

    Masses of repeated positions are summed.
    """
    path = Path(path)
    pairs: list[tuple[Point, Coord]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(f"{path}: expected 'x y mass' at line {lineno}, got {raw!r}")
        try:
            x, y, mass = (_parse_number(f) for f in fields)
        except ValueError as exc:
            raise ParseError(f"{path}: bad number at line {lineno}: {exc}") from None
        if not mass > 0:
            raise ParseError(f"{path}: nonpositive mass at line {lineno}")
        pairs.append((Point(x, y), mass))
    if not pairs:
        raise ParseError(f"{path}: empty measure")
    return Measure.merged(pairs)


def format_points(measure: Measure) -> str:
    """Canonical .pts serialization (sorted support, one triple per line)."""
    return "".join(
        f"{mp.position[0]} {mp.position[1]} {mp.mass}\n" for mp in measure.points
    )


def dump_points(measure: Measure, path) -> None:
    Path(path).write_text(format_points(measure))


def _pgm_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for line in text.splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    return tokens


def load_pgm(path) -> Measure:
    """Read a plain-text (magic "P2") PGM image as a measure.

    A pixel in file column `col`, file row `row` (row 0 at the top) with grey
    value g > 0 becomes a point at (col, height-1-row) with mass g, so that
    "north" means increasing y.  Zero pixels are omitted.
    """
    path = Path(path)
    tokens = _pgm_tokens(path.read_text())
    if not tokens or tokens[0] != "P2":
        magic = tokens[0] if tokens else "<empty>"
        raise ParseError(f"{path}: unsupported magic number {magic!r} (want plain-text 'P2')")
    if len(tokens) < 4:
        raise ParseError(f"{path}: malformed header")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError:
        raise ParseError(f"{path}: malformed header") from None
    if width <= 0 or height <= 0 or maxval <= 0:
        raise ParseError(f"{path}: malformed header (width={width}, height={height}, maxval={maxval})")
    values = tokens[4:]
    if len(values) != width * height:
        raise ParseError(
            f"{path}: expected {width * height} pixel values, got {len(values)}"
        )
    points: list[MassPoint] = []
    for k, tok in enumerate(values):
        try:
            g = int(tok)
        except ValueError:
            raise ParseError(f"{path}: bad pixel value {tok!r}") from None
        if g < 0:
            raise ParseError(f"{path}: negative pixel value {g}")
        if g == 0:
            continue
        row, col = divmod(k, width)
        points.append(MassPoint(Point(col, height - 1 - row), g))
    if not points:
        raise ParseError(f"{path}: empty measure (all pixels zero)")
    return Measure(points)


def validate(instance: ProblemInstance) -> list[str]:
    """Return the list of structural violations; empty means the instance is sound.

    Violations are data, not exceptions: callers decide whether to raise.
    """
    violations: list[str] = []
    for name, measure in (("source", instance.source), ("sink", instance.sink)):
        if len(measure) == 0:
            violations.append(f"{name} measure is empty")
            continue
        seen = set()
        for mp in measure:
            if not mp.mass > 0:
                violations.append(f"{name}: nonpositive mass at {mp.position}")
            if mp.position in seen:
                violations.append(f"{name}: duplicate support point {mp.position}")
            seen.add(mp.position)
    sp = instance.source.total_mass
    sq = instance.sink.total_mass
    if instance.is_integral:
        balanced = sp == sq
    else:
        balanced = abs(sp - sq) <= MASS_REL_TOL * max(1.0, abs(sp), abs(sq))
    if not balanced:
        violations.append(f"unbalanced: total source mass {sp} != total sink mass {sq}")
    return violations
