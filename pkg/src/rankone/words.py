"""Rank-one words: construction, lazy letter access, and occurrence
combinatorics.

Words live over the alphabet {0, 1} and are stored as ASCII ``b"0"``/``b"1"``
bytes so that substring scans run at C speed.  Stage words obey

    w_0 = "0",   w_{n+1} = w_n 1^{s_n(0)} w_n 1^{s_n(1)} ... 1^{s_n(r_n-2)} w_n

with 0-based gap indices (the tuple has r_n - 1 entries; a published display
that starts the indices at 1 is read as this 0-based form).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .errors import CapExceededError, SpecError
from .params import ParameterSpec, StageView, heights, stage_views

DEFAULT_CAP = 1 << 26

WordLike = Union[bytes, str, "RankOneWord"]


def as_bytes(word: WordLike) -> bytes:
    if isinstance(word, RankOneWord):
        return word.letters
    if isinstance(word, str):
        return word.encode("ascii")
    return word


@dataclass(frozen=True)
class RankOneWord:
    """A materialized stage word with its stage index."""

    stage: int
    letters: bytes

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, j: int) -> int:
        return self.letters[j] - 0x30

    def to_text(self) -> str:
        return self.letters.decode("ascii")


@dataclass(frozen=True)
class WordAddress:
    """Positional decomposition of an index: the chain of copies descended
    through, ending either at the single letter of w_0 or inside a 1-run."""

    stage: int
    index: int
    path: tuple[tuple[int, int], ...]  # (stage, copy index) from the top down
    spacer: Optional[tuple[int, int, int]]  # (stage, gap slot, offset in run)

    @property
    def is_spacer(self) -> bool:
        return self.spacer is not None


def copy_offsets(view: StageView) -> list[int]:
    """Start offsets of the r copies of w_n inside w_{n+1} (needs the
    stage-n view)."""
    offs = [0]
    for k in range(view.r - 1):
        offs.append(offs[-1] + view.h + view.spacers[k])
    return offs


def build_word(spec: ParameterSpec, n: int, cap: int = DEFAULT_CAP) -> RankOneWord:
    """Materialize w_n by the literal recursive concatenation."""
    if not spec.normalized:
        raise SpecError("rank-one words are defined for normalized specs")
    hs = heights(spec, n)
    if hs[n] > cap:
        raise CapExceededError(
            f"|w_{n}| = {hs[n]} exceeds the cap {cap}; use letter_at"
        )
    w = b"0"
    for view in itertools.islice(stage_views(spec), n):
        parts = [w]
        for gap in view.spacers:
            parts.append(b"1" * gap)
            parts.append(w)
        w = b"".join(parts)
    return RankOneWord(stage=n, letters=w)


def letter_at(spec: ParameterSpec, n: int, j: int) -> tuple[int, WordAddress]:
    """The letter w_n[j] plus the address that produced it, in O(n) arithmetic.

    Descends the recursion: locate j among the r_{m-1} copies of w_{m-1} and
    the 1-runs between them, then recurse into the copy hit.
    """
    if not spec.normalized:
        raise SpecError("rank-one words are defined for normalized specs")
    views = list(itertools.islice(stage_views(spec), n + 1))
    if not 0 <= j < views[n].h:
        raise IndexError(f"index {j} out of range for |w_{n}| = {views[n].h}")
    path = []
    m, pos = n, j
    while m > 0:
        view = views[m - 1]
        block = view.h
        found = None
        cursor = 0
        for k in range(view.r):
            if pos < cursor + block:
                found = (k, pos - cursor)
                break
            cursor += block
            if k < view.r - 1:
                gap = view.spacers[k]
                if pos < cursor + gap:
                    addr = WordAddress(
                        stage=n, index=j, path=tuple(path),
                        spacer=(m - 1, k, pos - cursor),
                    )
                    return 1, addr
                cursor += gap
        k, pos = found
        path.append((m - 1, k))
        m -= 1
    return 0, WordAddress(stage=n, index=j, path=tuple(path), spacer=None)


def letter(spec: ParameterSpec, n: int, j: int) -> int:
    """Just the letter w_n[j]; see letter_at for the address variant."""
    return letter_at(spec, n, j)[0]


def occurrences(pattern: WordLike, text: WordLike) -> list[int]:
    """All i with text[i : i+|pattern|] == pattern, overlapping included."""
    p, t = as_bytes(pattern), as_bytes(text)
    if not p:
        raise SpecError("pattern must be nonempty")
    out = []
    i = t.find(p)
    while i != -1:
        out.append(i)
        i = t.find(p, i + 1)
    return out


@dataclass(frozen=True)
class BuildsResult:
    builds: bool
    gaps: Optional[tuple[int, ...]]

    def __bool__(self) -> bool:
        return self.builds


def builds(u: WordLike, w: WordLike) -> BuildsResult:
    """Whether w = u 1^{a_1} u ... 1^{a_r} u for nonnegative a_i.

    Both words must begin and end with 0.  The decomposition, when it
    exists, is unique: copies contain 0s only trough u itself, and the
    stretches between copies are all 1s, so every copy start is forced to be
    the next 0 after the previous copy ends.
    """
    ub, wb = as_bytes(u), as_bytes(w)
    for name, word in (("u", ub), ("w", wb)):
        if not word or word[:1] != b"0" or word[-1:] != b"0":
            raise SpecError(f"{name} must begin and end with 0")
    if not wb.startswith(ub):
        return BuildsResult(False, None)
    gaps = []
    pos = len(ub)
    while pos < len(wb):
        nxt = wb.find(b"0", pos)
        if nxt == -1:
            return BuildsResult(False, None)
        if wb.count(b"1", pos, nxt) != nxt - pos:
            return BuildsResult(False, None)
        if wb[nxt:nxt + len(ub)] != ub:
            return BuildsResult(False, None)
        gaps.append(nxt - pos)
        pos = nxt + len(ub)
    if pos != len(wb):
        return BuildsResult(False, None)
    return BuildsResult(True, tuple(gaps))


def expected_occurrences(spec: ParameterSpec, n: int, m: int) -> list[int]:
    """Indices of the copies of w_n inside w_m produced by unrolling the
    recursion from stage m down to stage n (the sublevels of the stage-n
    base inside column m)."""
    if not spec.normalized:
        raise SpecError("expected occurrences are defined for normalized specs")
    if not 0 <= n <= m:
        raise SpecError(f"need 0 <= n <= m, got n={n}, m={m}")
    views = list(itertools.islice(stage_views(spec), m))
    positions = [0]
    for k in range(m - 1, n - 1, -1):
        offs = copy_offsets(views[k])
        positions = [p + o for p in positions for o in offs]
    positions.sort()
    return positions


@dataclass(frozen=True)
class GapInstance:
    """A 1-run separating consecutive expected copies of w_n inside w_m."""

    position: int  # index of the first 1
    length: int
    stage: int  # the stage whose spacer produced this run
    slot: int  # index within that stage's tuple


def gap_instances(spec: ParameterSpec, n: int, m: int) -> list[GapInstance]:
    """All 1-runs between consecutive expected copies of w_n inside w_m,
    tagged with the stage and tuple slot that produced them."""
    if not 0 <= n <= m:
        raise SpecError(f"need 0 <= n <= m, got n={n}, m={m}")
    views = list(itertools.islice(stage_views(spec), m))
    # build upward: gaps of w_n inside w_k for k = n .. m
    current: list[GapInstance] = []
    for k in range(n, m):
        view = views[k]
        offs = copy_offsets(view)
        merged: list[GapInstance] = []
        for idx, off in enumerate(offs):
            merged.extend(
                GapInstance(g.position + off, g.length, g.stage, g.slot)
                for g in current
            )
            if idx < view.r - 1:
                merged.append(
                    GapInstance(off + view.h, view.spacers[idx], k, idx)
                )
        current = merged
    current.sort(key=lambda g: g.position)
    return current
