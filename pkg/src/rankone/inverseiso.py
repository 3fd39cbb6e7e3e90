"""Inverse-isomorphism calculus on spacer tuples.

A transformation built from parameters (r_n), (s_n) is isomorphic to its
inverse exactly when the spacer tuples are eventually palindromic; the
refuting machinery groups consecutive stages with the ``*`` operation and
detects incompatible grouped tuples, which obstruct any isomorphism with the
reversed-parameter system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Optional

from .errors import NotCertifiedError, SpecError
from .params import (
    ParameterSpec,
    SpacerExpr,
    StageRule,
    _simplify,
    _static_accumulator,
    certified,
    reversed_parameters,
    stage_views,
)
from .tower import NameWindow
from .words import build_word, occurrences

SpacerTuple = tuple[int, ...]

GROUPING_HORIZON_PERIODS = 32


def reverse(s: SpacerTuple) -> SpacerTuple:
    return tuple(reversed(s))


def star(s2: SpacerTuple, s1: SpacerTuple) -> SpacerTuple:
    """The spacer tuple of two consecutive stages collapsed into one:
    s1, s2(0), s1, s2(1), ..., s2(r2-2), s1 with length r1*r2 - 1."""
    out = list(s1)
    for entry in s2:
        out.append(entry)
        out.extend(s1)
    return tuple(out)


@dataclass(frozen=True)
class CompatibilityResult:
    incompatible: bool
    offset: Optional[int] = None  # witness when compatible
    c: Optional[int] = None  # the forced middle entry; None means any works

    def __bool__(self) -> bool:
        return self.incompatible


def incompatible(s: SpacerTuple, s_prime: SpacerTuple) -> CompatibilityResult:
    """Whether no integer c makes s a substring of s' c s'.

    Equal lengths required.  The scan is alignment-driven: at each offset the
    middle slot either lies outside the match (c free) or is forced to one
    value, so no unbounded integer search is needed.
    """
    length = len(s)
    if len(s_prime) != length:
        raise SpecError(
            f"tuples must have equal length, got {length} and {len(s_prime)}"
        )
    for offset in range(0, length + 2):
        c = None
        ok = True
        for p in range(length):
            g = offset + p
            if g < length:
                if s[p] != s_prime[g]:
                    ok = False
                    break
            elif g == length:
                c = s[p]
            else:
                if s[p] != s_prime[g - length - 1]:
                    ok = False
                    break
        if ok:
            return CompatibilityResult(False, offset=offset, c=c)
    return CompatibilityResult(True)


def group_stages(
    spec: ParameterSpec, from_stage: int, count: int
) -> tuple[int, SpacerTuple]:
    """Collapse ``count`` consecutive stages starting at ``from_stage`` into
    one: the cut count is the product of the r's and the spacer tuple is the
    star-fold of the concrete tuples, outermost stage first."""
    if count < 1:
        raise SpecError(f"count must be >= 1, got {count}")
    views = list(
        itertools.islice(stage_views(spec), from_stage, from_stage + count)
    )
    q = 1
    for v in views:
        q *= v.r
    t = views[0].spacers
    for v in views[1:]:
        t = star(v.spacers, t)
    return q, t


# ---------------------------------------------------------------------------
# inverse isomorphism decision


def _rule_palindromic(rule: StageRule, static_acc: Optional[int]) -> bool:
    exprs = [_simplify(e, static_acc) for e in rule.spacers]
    return exprs == exprs[::-1]


@dataclass(frozen=True)
class InverseVerdict:
    isomorphic_to_inverse: bool
    N: Optional[int]
    refuting_positions: tuple[int, ...] = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.isomorphic_to_inverse


def decide_inverse_isomorphic(spec: ParameterSpec) -> InverseVerdict:
    """Eventual palindromicity of the spacer tuples, decided symbolically
    over the cycle rules: a rule is palindromic when its affine expressions
    match their reversal coefficientwise.  The reversal criterion
    presupposes a certified partially bounded presentation, so anything
    else is refused."""
    if not spec.normalized:
        raise SpecError("decide on the normalized presentation")
    certified(spec)  # raises NotCertifiedError when the hypothesis fails
    static_acc = _static_accumulator(spec)
    refuting = tuple(
        pos for pos, rule in enumerate(spec.cycle)
        if not _rule_palindromic(rule, static_acc)
    )
    if refuting:
        return InverseVerdict(
            False, None, refuting_positions=refuting,
            detail=f"cycle position(s) {list(refuting)} are never palindromic",
        )
    threshold = 0
    for view in itertools.islice(stage_views(spec), len(spec.preperiod)):
        if view.spacers != tuple(reversed(view.spacers)):
            threshold = view.n + 1
    return InverseVerdict(True, threshold)


# ---------------------------------------------------------------------------
# non-isomorphism criteria


@dataclass(frozen=True)
class GroupingWitness:
    stage: int
    q: int
    t: SpacerTuple
    t_prime: SpacerTuple
    cycle_positions: tuple[int, ...]
    note: str = ""


@dataclass(frozen=True)
class NonIsoReport:
    criteria_met: bool
    status: str
    commensurable: Optional[bool] = None
    cross_bound: Optional[int] = None
    condition3_threshold: Optional[int] = None
    witness: Optional[GroupingWitness] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.criteria_met


def _alignment_horizon(a: ParameterSpec, b: ParameterSpec) -> int:
    return max(len(a.preperiod), len(b.preperiod)) + lcm(
        len(a.cycle), len(b.cycle)
    )


def _sum_expr(rule: StageRule) -> SpacerExpr:
    return SpacerExpr(
        sum(e.a for e in rule.spacers),
        sum(e.c for e in rule.spacers),
        sum(e.b for e in rule.spacers),
    )


def _aligned_rules(a, b):
    horizon = _alignment_horizon(a, b)
    return [(n, a.rule_schedule(n), b.rule_schedule(n)) for n in range(horizon)]


def _acc_aligned(a, b, aligned) -> bool:
    sa, sb = _static_accumulator(a), _static_accumulator(b)
    return all(
        _simplify(ra.effective_acc, sa) == _simplify(rb.effective_acc, sb)
        for _, ra, rb in aligned
    )


def check_non_isomorphism(
    specA: ParameterSpec, specB: ParameterSpec,
    horizon_periods: int = GROUPING_HORIZON_PERIODS,
) -> NonIsoReport:
    """Check the four sufficient conditions for non-isomorphism of two
    systems: commensurable parameters, a cross bound on spacer differences,
    spacers at least the word length on both sides, and a bounded grouping
    of consecutive stages with infinitely many incompatible grouped tuples.

    The grouping search follows the reversal strategy: triples of
    consecutive stages anchored at non-palindromic cycle positions.  The
    infinitude claim is established symbolically only when the second spec
    is the coefficientwise reversal of the first; otherwise a negative
    result means "criteria not established", never an isomorphism claim.
    """
    if not (specA.normalized and specB.normalized):
        raise SpecError("both specs must be normalized")
    try:
        certA, certB = certified(specA), certified(specB)
    except NotCertifiedError as exc:
        return NonIsoReport(
            False, status="not_established",
            detail=f"partial boundedness hypothesis unavailable: {exc}",
        )
    threshold = max(certA.N, certB.N)
    aligned = _aligned_rules(specA, specB)
    sa, sb = _static_accumulator(specA), _static_accumulator(specB)

    # condition (1): equal cuts and equal spacer sums at every stage
    c_used = any(
        e.c for _, ra, rb in aligned for e in ra.spacers + rb.spacers
    )
    symbolic_ok = all(ra.r == rb.r for _, ra, rb in aligned) and all(
        _simplify(_sum_expr(ra), sa) == _simplify(_sum_expr(rb), sb)
        for _, ra, rb in aligned
    ) and (not c_used or _acc_aligned(specA, specB, aligned))
    if not symbolic_ok:
        numeric_horizon = _alignment_horizon(specA, specB) + 4 * len(aligned)
        for va, vb in zip(
            itertools.islice(stage_views(specA), numeric_horizon),
            itertools.islice(stage_views(specB), numeric_horizon),
        ):
            if va.r != vb.r or sum(va.spacers) != sum(vb.spacers):
                return NonIsoReport(
                    False, status="condition1_fails", commensurable=False,
                    detail=f"stage {va.n}: cuts or spacer sums differ",
                )
        return NonIsoReport(
            False, status="not_established", commensurable=None,
            detail="commensurability not symbolically decidable for these rules",
        )

    # condition (2): |s_n(i) - s'_n(j)| bounded, from the threshold stage on
    diff_max = 0
    for _, ra, rb in aligned:
        ea = [_simplify(e, sa) for e in ra.spacers]
        eb = [_simplify(e, sb) for e in rb.spacers]
        for x in ea:
            for y in eb:
                if (x.a, x.c) != (y.a, y.c):
                    return NonIsoReport(
                        False, status="not_established", commensurable=True,
                        detail="cross spacer differences not symbolically bounded",
                    )
                diff_max = max(diff_max, abs(x.b - y.b))
    cross_bound = diff_max + 1

    # condition (3) holds from the certificates' threshold on both sides.

    # condition (4): grouped-tuple incompatibility, anchored at
    # non-palindromic positions of the first spec
    positions = tuple(
        pos for pos, rule in enumerate(specA.cycle)
        if not _rule_palindromic(rule, sa)
    )
    is_reversal_twin = all(
        ra.r == rb.r
        and [_simplify(e, sa) for e in ra.spacers]
        == [_simplify(e, sb) for e in reversed(rb.spacers)]
        for _, ra, rb in aligned
    ) and _acc_aligned(specA, specB, aligned)

    start = max(threshold, len(specA.preperiod), len(specB.preperiod))
    period = len(specA.cycle)
    candidates = []
    limit = start + horizon_periods * period
    for n in range(start, limit):
        if specA.cycle_position(n) in positions or not positions:
            candidates.append(n)
    for n in candidates:
        q, t = group_stages(specA, n, 3)
        q2, t2 = group_stages(specB, n, 3)
        if q != q2 or len(t) != len(t2):
            continue
        res = incompatible(t, t2)
        if not res.incompatible:
            continue
        witness = GroupingWitness(
            stage=n, q=q, t=t, t_prime=t2,
            cycle_positions=positions,
            note="t' is the reversal of t" if t2 == reverse(t) else "",
        )
        if is_reversal_twin and positions:
            view = next(itertools.islice(stage_views(specA), n, None))
            hypothesis = view.spacers != tuple(reversed(view.spacers))
            if hypothesis and t2 == reverse(t):
                return NonIsoReport(
                    True, status="criteria_met", commensurable=True,
                    cross_bound=cross_bound, condition3_threshold=threshold,
                    witness=witness,
                    detail="second system reverses the first; grouped tuples "
                    "at every later non-palindromic stage are incompatible "
                    "with their reversals",
                )
        return NonIsoReport(
            False, status="not_established", commensurable=True,
            cross_bound=cross_bound, condition3_threshold=threshold,
            witness=witness,
            detail="incompatible grouping found but no symbolic argument "
            "that infinitely many stages repeat it",
        )
    return NonIsoReport(
        False, status="condition4_fails", commensurable=True,
        cross_bound=cross_bound, condition3_threshold=threshold,
        detail=f"no incompatible grouping among stages [{start}, {limit})",
    )


# ---------------------------------------------------------------------------
# stable rewriting


@dataclass(frozen=True)
class RewriteResult:
    window: NameWindow
    replacements: int
    partial_left: bool
    partial_right: bool


def stable_rewrite(spec: ParameterSpec, window: NameWindow, N: int) -> RewriteResult:
    """Replace every complete occurrence of the stage-N word by the stage-N
    word of the reversed-parameter system (its mirror image; lengths agree
    since reversal preserves spacer sums).  Partial occurrences cut by the
    window edges are left untouched and flagged."""
    v = build_word(spec, N).letters
    v_prime = build_word(reversed_parameters(spec), N).letters
    if len(v) != len(v_prime):
        raise SpecError("reversal changed the word length; spec is inconsistent")
    letters = window.letters
    out = bytearray(letters)
    positions = occurrences(v, letters)
    for p in positions:
        out[p:p + len(v)] = v_prime
    first = positions[0] if positions else len(letters)
    last_end = positions[-1] + len(v) if positions else 0
    partial_left = any(
        letters[:len(v) - d] == v[d:]
        for d in range(1, len(v))
        if len(v) - d <= first
    )
    partial_right = any(
        letters[len(letters) - d:] == v[:d]
        for d in range(1, len(v))
        if len(letters) - d >= last_end
    )
    return RewriteResult(
        window=NameWindow(window.anchor, bytes(out), provenance="rewritten"),
        replacements=len(positions),
        partial_left=partial_left,
        partial_right=partial_right,
    )
