"""Geometric cutting-and-stacking simulator with exact rational coordinates.

A point is a (stage, level, offset) triple: level ``j`` of column ``C_n``,
at horizontal fraction ``offset`` of the level's width.  Spacer intervals are
never embedded into the real line; the tower combinatorics alone determines
the map and the names.  The canonical form of a point uses the smallest stage
whose column contains it, so spacer points first appear at the stage that
introduced them.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional

from .errors import SpecError, UndefinedOrbitError
from .params import ParameterSpec, stage_views
from .words import DEFAULT_CAP, build_word, copy_offsets, letter

DEFAULT_STAGE_BUDGET = 64
OFFSET_DENOMINATOR_BITS = 53


@dataclass(frozen=True)
class TowerPoint:
    stage: int
    level: int
    offset: Fraction

    def __post_init__(self):
        if not 0 <= self.offset < 1:
            raise SpecError(f"offset must lie in [0, 1), got {self.offset}")

    def __str__(self) -> str:
        u = self.offset
        return f"{self.stage}:{self.level}:{u.numerator}/{u.denominator}"


def parse_point(text: str) -> TowerPoint:
    try:
        stage_s, level_s, frac = text.split(":")
        num, den = frac.split("/")
        return TowerPoint(int(stage_s), int(level_s), Fraction(int(num), int(den)))
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad point {text!r}; expected n:j:p/q") from exc


class _Columns:
    """Per-spec cache of stage data used by the coordinate arithmetic.
    The lazy fill is locked so cached specs stay shareable across threads."""

    def __init__(self, spec: ParameterSpec):
        self.spec = spec
        self._views = []
        self._offsets = []
        self._iter = stage_views(spec)
        self._lock = threading.Lock()

    def view(self, n: int):
        if len(self._views) <= n:
            with self._lock:
                while len(self._views) <= n:
                    self._views.append(next(self._iter))
        return self._views[n]

    def height(self, n: int) -> int:
        return self.view(n).h

    def offsets(self, n: int) -> list[int]:
        if len(self._offsets) <= n:
            self.view(n)
            with self._lock:
                while len(self._offsets) <= n:
                    self._offsets.append(
                        copy_offsets(self._views[len(self._offsets)])
                    )
        return self._offsets[n]


_COLUMN_CACHE: dict[ParameterSpec, _Columns] = {}
_CACHE_LOCK = threading.Lock()


def _columns(spec: ParameterSpec) -> _Columns:
    cols = _COLUMN_CACHE.get(spec)
    if cols is None:
        with _CACHE_LOCK:
            cols = _COLUMN_CACHE.setdefault(spec, _Columns(spec))
    return cols


def _check_level(cols: _Columns, stage: int, level: int):
    h = cols.height(stage)
    if not 0 <= level < h:
        raise SpecError(f"level {level} out of range for C_{stage} (height {h})")


def canonicalize(spec: ParameterSpec, p: TowerPoint) -> TowerPoint:
    """Rewrite p at the smallest stage whose column contains it."""
    cols = _columns(spec)
    _check_level(cols, p.stage, p.level)
    stage, level, u = p.stage, p.level, p.offset
    while stage > 0:
        below = cols.view(stage - 1)
        offs = cols.offsets(stage - 1)
        hit = None
        for k in range(below.r):
            if offs[k] <= level < offs[k] + below.h:
                hit = k
                break
        if hit is None:
            break  # a spacer level introduced at stage - 1
        level = level - offs[hit]
        u = Fraction(hit + u, below.r)
        stage -= 1
    return TowerPoint(stage, level, u)


def refine(spec: ParameterSpec, p: TowerPoint) -> TowerPoint:
    """The same point in stage n+1 coordinates: pick the subcolumn the offset
    falls into and shift the level past the earlier subcolumns and their
    spacers."""
    cols = _columns(spec)
    _check_level(cols, p.stage, p.level)
    view = cols.view(p.stage)
    k = int(p.offset * view.r)
    new_level = p.level + cols.offsets(p.stage)[k]
    return TowerPoint(p.stage + 1, new_level, p.offset * view.r - k)


def apply_T(
    spec: ParameterSpec, p: TowerPoint, stage_budget: int = DEFAULT_STAGE_BUDGET
) -> TowerPoint:
    """One step up the tower; refines past column tops.  Raises
    UndefinedOrbitError when the point sits on the forward orbit of the top
    edge (refinement never leaves the top level within the budget)."""
    cols = _columns(spec)
    p = canonicalize(spec, p)
    for _ in range(stage_budget):
        if p.level + 1 < cols.height(p.stage):
            return canonicalize(
                spec, TowerPoint(p.stage, p.level + 1, p.offset)
            )
        p = refine(spec, p)
    raise UndefinedOrbitError(
        f"forward orbit undefined within {stage_budget} refinements"
    )


def apply_T_inverse(
    spec: ParameterSpec, p: TowerPoint, stage_budget: int = DEFAULT_STAGE_BUDGET
) -> TowerPoint:
    """Exact inverse of apply_T; the symmetric failure is the backward orbit
    of the base's bottom edge."""
    cols = _columns(spec)
    p = canonicalize(spec, p)
    for _ in range(stage_budget):
        if p.level > 0:
            return canonicalize(
                spec, TowerPoint(p.stage, p.level - 1, p.offset)
            )
        p = refine(spec, p)
    raise UndefinedOrbitError(
        f"backward orbit undefined within {stage_budget} refinements"
    )


def in_base0(spec: ParameterSpec, p: TowerPoint) -> bool:
    """Whether the point lies in B_0, equivalently whether its level reads
    letter 0 (canonical points at stage > 0 sit in spacer levels)."""
    return canonicalize(spec, p).stage == 0


def level_width(spec: ParameterSpec, n: int) -> Fraction:
    """Width of a stage-n level as a fraction of the base interval: each cut
    divides the levels by that stage's r."""
    width = Fraction(1)
    for k in range(n):
        width /= spec.rule_schedule(k).r
    return width


@dataclass(frozen=True)
class NameWindow:
    """A finite stretch of a 0/1 itinerary: letters[i - anchor] tells whether
    the i-th image of the point lies in B_0."""

    anchor: int
    letters: bytes
    provenance: Optional[str] = None

    @property
    def end(self) -> int:
        return self.anchor + len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def letter(self, i: int) -> int:
        if not self.anchor <= i < self.end:
            raise IndexError(f"index {i} outside window [{self.anchor}, {self.end})")
        return self.letters[i - self.anchor] - 0x30

    def slice(self, a: int, b: int) -> "NameWindow":
        if not (self.anchor <= a <= b <= self.end):
            raise IndexError(f"[{a}, {b}) not inside [{self.anchor}, {self.end})")
        return NameWindow(a, self.letters[a - self.anchor:b - self.anchor])

    def to_text(self) -> str:
        return self.letters.decode("ascii")


class _Walker:
    """Orbit walker over a working (stage, level, offset) representation.

    Stepping is an integer level increment except at column edges, where the
    representation refines to a deeper stage.  Letters are read off the
    working level; the working column's word is materialized once per stage
    for O(1) readout (the level trajectory itself is still walked step by
    step)."""

    def __init__(self, spec, point, stage_budget=DEFAULT_STAGE_BUDGET,
                 cap=DEFAULT_CAP):
        self.spec = spec
        self.cols = _columns(spec)
        self.budget = stage_budget
        self.cap = cap
        self.words: dict[int, bytes] = {}
        p = canonicalize(spec, point)
        self.stage, self.level, self.offset = p.stage, p.level, p.offset

    def _refine(self):
        view = self.cols.view(self.stage)
        k = int(self.offset * view.r)
        self.level += self.cols.offsets(self.stage)[k]
        self.offset = self.offset * view.r - k
        self.stage += 1

    def forward(self):
        for _ in range(self.budget):
            if self.level + 1 < self.cols.height(self.stage):
                self.level += 1
                return
            self._refine()
        raise UndefinedOrbitError(
            f"forward orbit undefined within {self.budget} refinements"
        )

    def backward(self):
        for _ in range(self.budget):
            if self.level > 0:
                self.level -= 1
                return
            self._refine()
        raise UndefinedOrbitError(
            f"backward orbit undefined within {self.budget} refinements"
        )

    def read(self) -> int:
        word = self.words.get(self.stage)
        if word is None:
            if self.cols.height(self.stage) <= self.cap:
                word = build_word(self.spec, self.stage, cap=self.cap).letters
                self.words[self.stage] = word
            else:
                return letter(self.spec, self.stage, self.level)
        return word[self.level] - 0x30


def name_window(
    spec: ParameterSpec,
    p: TowerPoint,
    a: int,
    b: int,
    stage_budget: int = DEFAULT_STAGE_BUDGET,
) -> NameWindow:
    """Letters of the point's itinerary on indices [a, b), walked step by
    step through the tower."""
    if not spec.normalized:
        raise SpecError("names are read against normalized presentations")
    if a > b:
        raise SpecError(f"need a <= b, got [{a}, {b})")
    if a == b:
        return NameWindow(a, b"", provenance=str(p))
    walker = _Walker(spec, p, stage_budget=stage_budget)
    for _ in range(-a if a < 0 else 0):
        walker.backward()
    for _ in range(a if a > 0 else 0):
        walker.forward()
    out = bytearray()
    for i in range(a, b):
        out.append(0x30 + walker.read())
        if i + 1 < b:
            walker.forward()
    return NameWindow(a, bytes(out), provenance=str(p))


def sample_point(
    spec: ParameterSpec, m: int, rng: Random,
    denominator_bits: int = OFFSET_DENOMINATOR_BITS,
) -> TowerPoint:
    """A random canonical point in column C_m: uniform level, dyadic offset.
    Dyadic offsets avoid the measure-zero edge orbits almost surely."""
    cols = _columns(spec)
    level = rng.randrange(cols.height(m))
    offset = Fraction(rng.randrange(1 << denominator_bits), 1 << denominator_bits)
    return canonicalize(spec, TowerPoint(m, level, offset))


def compare_names(spec, p1, p2, a, b) -> str:
    """Outcome of comparing two itineraries on [a, b): 'separated',
    'same_level' (identical coordinates except offset; names cannot differ
    at this resolution), or 'not_separated'."""
    q1, q2 = canonicalize(spec, p1), canonicalize(spec, p2)
    if (q1.stage, q1.level) == (q2.stage, q2.level):
        return "same_level"
    w1 = name_window(spec, p1, a, b)
    w2 = name_window(spec, p2, a, b)
    return "separated" if w1.letters != w2.letters else "not_separated"


@dataclass(frozen=True)
class InjectivityReport:
    trials: int
    separated: int
    same_level_skips: int
    failures: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_injectivity(
    spec: ParameterSpec,
    trials: int,
    window: Optional[int] = None,
    m: int = 3,
    seed: int = 0,
) -> InjectivityReport:
    """Sample pairs of points in distinct levels of C_m and check their name
    windows differ.  Any non-separated pair is a bug (the names of points in
    distinct levels must split once the lower one exits the column top into
    spacers), so the failure list should always be empty."""
    cols = _columns(spec)
    if window is None:
        window = 4 * cols.height(m + 1)
    half = window // 2
    rng = Random(seed)
    separated = 0
    skips = 0
    failures = []
    done = 0
    while done < trials:
        p1 = sample_point(spec, m, rng)
        p2 = sample_point(spec, m, rng)
        outcome = compare_names(spec, p1, p2, -half, window - half)
        if outcome == "same_level":
            skips += 1
            continue
        done += 1
        if outcome == "separated":
            separated += 1
        else:
            failures.append((str(p1), str(p2)))
    return InjectivityReport(
        trials=trials, separated=separated, same_level_skips=skips,
        failures=tuple(failures),
    )
