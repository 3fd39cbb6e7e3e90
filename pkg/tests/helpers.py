"""Shared test scaffolding: randomized spec generators and independent
brute-force oracles.

The oracles deliberately avoid the library's scan/bookkeeping code paths:
occurrence scans use per-index prefix comparison instead of find loops, gap
reads walk the letters run by run, and the compatibility oracle rebuilds the
padded tuple for every offset.
"""

from __future__ import annotations

from random import Random

from rankone.analysis import BAD, GOOD, INDETERMINATE, CandidatePair
from rankone.params import (
    ParameterSpec,
    SpacerExpr,
    StageRule,
    heights,
    normalize,
)
from rankone.tower import NameWindow
from rankone.words import build_word


# ---------------------------------------------------------------------------
# spec generators


def random_growth_spec(rng: Random, max_r: int = 5) -> ParameterSpec:
    """A raw spec satisfying the rewriting criterion by construction:
    bounded constant non-final spacers and a last column of a*h + b with
    a >= r and b at least the sum of the other spacers."""
    def rule():
        r = rng.randint(2, max_r)
        spacers = tuple(SpacerExpr(0, 0, rng.randint(0, 6)) for _ in range(r - 1))
        total = sum(e.b for e in spacers)
        last = SpacerExpr(r + rng.randint(0, 2), 0, total + rng.randint(0, 3))
        return StageRule(r=r, spacers=spacers, last=last)

    preperiod = tuple(rule() for _ in range(rng.randint(0, 2)))
    cycle = tuple(rule() for _ in range(rng.randint(1, 3)))
    return ParameterSpec(cycle=cycle, preperiod=preperiod)


def random_certified_spec(rng: Random, max_r: int = 5) -> ParameterSpec:
    return normalize(random_growth_spec(rng, max_r=max_r))


def random_normalized_spec(rng: Random) -> ParameterSpec:
    """Any normalized affine spec (not necessarily partially bounded)."""
    if rng.random() < 0.5:
        return random_certified_spec(rng)

    def rule():
        r = rng.randint(2, 4)
        spacers = tuple(
            SpacerExpr(rng.randint(0, 2), 0, rng.randint(0, 5))
            for _ in range(r - 1)
        )
        acc = SpacerExpr(rng.randint(0, 1), 0, rng.randint(0, 2))
        return StageRule(
            r=r, spacers=spacers, last=None, acc=None if acc.is_zero else acc
        )

    return ParameterSpec(
        cycle=tuple(rule() for _ in range(rng.randint(1, 2))),
        preperiod=tuple(rule() for _ in range(rng.randint(0, 1))),
    )


def random_palindromic_certified_spec(rng: Random) -> ParameterSpec:
    """Certified with every cycle tuple palindromic: entries share one
    growth coefficient (so differences stay bounded) and the constant terms
    are mirror-symmetric."""
    def rule():
        r = rng.randint(2, 4)
        a = rng.randint(1, 2)
        half = [rng.randint(0, 4) for _ in range((r - 1 + 1) // 2)]
        bs = half + list(reversed(half[: (r - 1) // 2]))
        return StageRule(r=r, spacers=tuple(SpacerExpr(a, 0, b) for b in bs))

    return ParameterSpec(cycle=tuple(rule() for _ in range(rng.randint(1, 2))))


# ---------------------------------------------------------------------------
# word-level oracles


def oracle_occurrences(pattern: bytes, text: bytes) -> list[int]:
    return [
        i for i in range(len(text) - len(pattern) + 1)
        if text.startswith(pattern, i)
    ]


def oracle_builds(u: bytes, w: bytes):
    """Every decomposition w = u 1^a1 u ... u, found by exhaustive
    backtracking over candidate gap lengths."""
    results = []

    def go(pos, gaps):
        if pos == len(w):
            results.append(tuple(gaps))
            return
        run = 0
        while pos + run < len(w) and w[pos + run] == 0x31:
            run += 1
        for g in range(run + 1):
            if w.startswith(u, pos + g):
                go(pos + g + len(u), gaps + [g])

    if w.startswith(u):
        go(len(u), [])
    return results


# ---------------------------------------------------------------------------
# classification oracles


def oracle_verdicts(pair: CandidatePair) -> dict[int, tuple[str, int | None]]:
    """Verdict and alignment for every occurrence of w_n in x, recomputed
    with per-index prefix scans."""
    spec = pair.spec
    wn = build_word(spec, pair.n).letters
    wk = heights(spec, pair.kappa)[pair.kappa]
    reach = len(wn) - wk
    x, y = pair.x, pair.y
    out = {}
    for rel in range(len(x.letters) - len(wn) + 1):
        if not x.letters.startswith(wn, rel):
            continue
        i = rel + x.anchor
        if i - reach < x.anchor:
            out[i] = (INDETERMINATE, None)
            continue
        hits = [
            p for p in range(rel - reach, rel + 1)
            if y.letters.startswith(wn, p)
        ]
        if len(hits) == 1:
            out[i] = (GOOD, rel - hits[0])
        elif not hits:
            out[i] = (BAD, None)
        else:
            out[i] = ("ambiguous", None)
    return out


def oracle_gap_after(letters: bytes, end: int, wn: bytes) -> int | None:
    """Length of the pure 1-run from `end` to the next copy of wn, walking
    letter by letter; None when the run is broken or no copy follows."""
    run = 0
    while end + run < len(letters) and letters[end + run] == 0x31:
        run += 1
    start = end + run
    if start >= len(letters) or not letters.startswith(wn, start):
        return None
    return run


def oracle_compatible(s, sp):
    """Compatibility by materializing s' c s' with a wildcard middle slot
    and sliding s across every alignment."""
    L = len(s)
    padded = list(sp) + [None] + list(sp)
    for offset in range(len(padded) - L + 1):
        window = padded[offset:offset + L]
        forced = None
        ok = True
        for have, want in zip(window, s):
            if have is None:
                forced = want
            elif have != want:
                ok = False
                break
        if ok:
            return True, offset, forced
    return False, None, None


# ---------------------------------------------------------------------------
# candidate pair builders beyond shifts


def spliced_pair(spec, n: int, kappa: int, window: NameWindow, rel_pos: int,
                 old_len: int, new_len: int) -> CandidatePair:
    """Pair whose image is the window with one 1-run length changed; both
    sides are cut to the shared index range."""
    letters = window.letters
    assert letters[rel_pos:rel_pos + old_len] == b"1" * old_len
    spliced = letters[:rel_pos] + b"1" * new_len + letters[rel_pos + old_len:]
    shared = min(len(letters), len(spliced))
    return CandidatePair(
        spec=spec,
        x=NameWindow(window.anchor, letters[:shared]),
        y=NameWindow(window.anchor, spliced[:shared]),
        kappa=kappa, n=n,
    )


def padded_block_window(spec, n, m, outer, kappa) -> NameWindow:
    """One expected w_m block inside w_outer, cut with enough left margin
    that every constituent w_n occurrence is determinate.  The block starts
    at window index 0."""
    from rankone.words import expected_occurrences

    wn_len = heights(spec, n)[n]
    wk_len = heights(spec, kappa)[kappa]
    reach = wn_len - wk_len
    block = expected_occurrences(spec, m, outer)[1]
    wm_len = heights(spec, m)[m]
    big = build_word(spec, outer).letters
    return NameWindow(-reach, big[block - reach:block + wm_len])
