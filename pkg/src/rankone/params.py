"""Cutting/spacer parameter sequences: representation, parsing, normalization,
and the symbolic boundedness analysis.

A transformation is described by a finite preperiod of stage rules followed by
a cycle that repeats forever.  Spacer counts are height-affine expressions
``a*h + c*A + b`` where ``h`` is the current column height and ``A`` is an
accumulator register (sum of the delayed last-column spacers, maintained by a
per-rule increment expression).  The accumulator is what keeps the rule class
closed under moving last-column spacers to later stages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterator, Optional

from .errors import NormalizationError, NotCertifiedError, ParseError, SpecError

SYMBOLIC_HORIZON = 64  # periods to iterate row certificates before giving up


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SpacerExpr:
    """Spacer count ``a*h_n + c*A_n + b`` with nonnegative integer coefficients."""

    a: int = 0
    c: int = 0
    b: int = 0

    def __post_init__(self):
        for name in ("a", "c", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise SpecError(f"negative or non-integer coefficient {name}={v!r}")

    def value(self, h: int, acc: int) -> int:
        return self.a * h + self.c * acc + self.b

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.c == 0 and self.b == 0

    def __str__(self) -> str:
        parts = []
        if self.a:
            parts.append(f"{self.a}h")
        if self.c:
            parts.append(f"{self.c}A")
        if self.b or not parts:
            parts.append(str(self.b))
        return "+".join(parts)


ZERO = SpacerExpr(0, 0, 0)


@dataclass(frozen=True)
class StageRule:
    """One stage of the construction: ``r`` cuts, ``r - 1`` spacer expressions,
    an optional last-column spacer, and an optional accumulator increment.

    When ``acc`` is absent the accumulator increment defaults to the
    last-column expression (zero if that is absent too), so for raw
    presentations ``A_n`` is exactly the sum of the last-column spacers
    placed so far.
    """

    r: int
    spacers: tuple[SpacerExpr, ...]
    last: Optional[SpacerExpr] = None
    acc: Optional[SpacerExpr] = None

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 2:
            raise SpecError(f"r must be an integer >= 2, got {self.r!r}")
        if len(self.spacers) != self.r - 1:
            raise SpecError(
                f"rule with r={self.r} needs {self.r - 1} spacer expressions, "
                f"got {len(self.spacers)}"
            )

    @property
    def effective_acc(self) -> SpacerExpr:
        if self.acc is not None:
            return self.acc
        if self.last is not None:
            return self.last
        return ZERO

    @property
    def last_is_zero(self) -> bool:
        return self.last is None or self.last.is_zero


@dataclass(frozen=True)
class ParameterSpec:
    """A finitely described parameter sequence: preperiod then repeating cycle."""

    cycle: tuple[StageRule, ...]
    preperiod: tuple[StageRule, ...] = ()
    name: Optional[str] = None

    def __post_init__(self):
        if not self.cycle:
            raise SpecError("cycle must be nonempty")

    @property
    def normalized(self) -> bool:
        """True when no stage places spacers on the last subcolumn."""
        return all(r.last_is_zero for r in self.preperiod + self.cycle)

    def rule_schedule(self, n: int) -> StageRule:
        """The symbolic rule applied at stage ``n``."""
        if n < 0:
            raise SpecError(f"stage index must be >= 0, got {n}")
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.cycle[(n - len(self.preperiod)) % len(self.cycle)]

    def cycle_position(self, n: int) -> int:
        if n < len(self.preperiod):
            raise SpecError(f"stage {n} is in the preperiod")
        return (n - len(self.preperiod)) % len(self.cycle)


@dataclass(frozen=True)
class StageView:
    """A stage rule with its registers evaluated to concrete integers."""

    n: int
    rule: StageRule
    h: int
    acc: int
    spacers: tuple[int, ...]
    last: Optional[int]

    @property
    def r(self) -> int:
        return self.rule.r

    @property
    def all_spacers(self) -> tuple[int, ...]:
        return self.spacers if self.last is None else self.spacers + (self.last,)


def stage_views(spec: ParameterSpec) -> Iterator[StageView]:
    """Yield concrete per-stage data (r_n, s_n, h_n, A_n) for n = 0, 1, 2, ..."""
    h, acc = 1, 0
    for n in itertools.count():
        rule = spec.rule_schedule(n)
        spacers = tuple(e.value(h, acc) for e in rule.spacers)
        last = None if rule.last is None else rule.last.value(h, acc)
        yield StageView(n, rule, h, acc, spacers, last)
        increment = rule.effective_acc.value(h, acc)
        h = rule.r * h + sum(spacers) + (last or 0)
        acc += increment


def stage_view(spec: ParameterSpec, n: int) -> StageView:
    return next(itertools.islice(stage_views(spec), n, None))


def rule_at(spec: ParameterSpec, n: int) -> StageView:
    """Concrete rule at stage ``n``: r_n, the evaluated spacer tuple, and the
    evaluated last-column spacer (None when absent)."""
    if n < 0:
        raise SpecError(f"stage index must be >= 0, got {n}")
    return stage_view(spec, n)


def heights(spec: ParameterSpec, up_to: int) -> list[int]:
    """Column heights h_0 .. h_up_to; h_0 = 1 and
    h_{n+1} = r_n*h_n + sum of all stage-n spacers."""
    if up_to < 0:
        raise SpecError(f"up_to must be >= 0, got {up_to}")
    return [v.h for v in itertools.islice(stage_views(spec), up_to + 1)]


def registers_at(spec: ParameterSpec, n: int) -> tuple[int, int]:
    """(h_n, A_n) at stage ``n``."""
    v = stage_view(spec, n)
    return v.h, v.acc


# ---------------------------------------------------------------------------
# normalization


def _rebased(e: SpacerExpr) -> SpacerExpr:
    # Old registers in terms of the normalized spec's: h_old = h' + A', A_old = A'.
    return SpacerExpr(e.a, e.a + e.c, e.b)


def normalize(spec: ParameterSpec) -> ParameterSpec:
    """Delay all last-column spacers: each non-final spacer gains the sum of
    the last-column spacers of all earlier stages, and the last column
    becomes empty.  The result presents an isomorphic transformation.

    The input must use default accumulator increments (acc unset); a custom
    increment would need a second register after rewriting, which the rule
    class does not have.
    """
    if spec.normalized:
        return spec

    def convert(rule: StageRule, where: str, idx: int) -> StageRule:
        if rule.acc is not None:
            raise NormalizationError(
                "rule class not closed under normalization: "
                f"{where} rule {idx} carries a custom accumulator increment",
                stage=idx,
            )
        last = rule.last if rule.last is not None else ZERO
        new_spacers = tuple(
            SpacerExpr(e.a, e.a + e.c + 1, e.b) for e in rule.spacers
        )
        new_acc = _rebased(last)
        return StageRule(
            r=rule.r,
            spacers=new_spacers,
            last=None,
            acc=None if new_acc.is_zero else new_acc,
        )

    return ParameterSpec(
        cycle=tuple(convert(r, "cycle", i) for i, r in enumerate(spec.cycle)),
        preperiod=tuple(convert(r, "preperiod", i) for i, r in enumerate(spec.preperiod)),
        name=spec.name,
    )


def reversed_parameters(spec: ParameterSpec) -> ParameterSpec:
    """The spec with every spacer tuple reversed (heights are unchanged)."""
    def rev(rule: StageRule) -> StageRule:
        return replace(rule, spacers=tuple(reversed(rule.spacers)))

    name = f"{spec.name}-reversed" if spec.name else None
    return ParameterSpec(
        cycle=tuple(rev(r) for r in spec.cycle),
        preperiod=tuple(rev(r) for r in spec.preperiod),
        name=name,
    )


# ---------------------------------------------------------------------------
# symbolic machinery: the (h, A, 1) register vector evolves by one nonnegative
# integer matrix per stage; cycle analysis composes one full period.


def _stage_matrix(rule: StageRule) -> list[list[int]]:
    exprs = rule.spacers + ((rule.last,) if rule.last is not None else ())
    h_row = [
        rule.r + sum(e.a for e in exprs),
        sum(e.c for e in exprs),
        sum(e.b for e in exprs),
    ]
    inc = rule.effective_acc
    a_row = [inc.a, 1 + inc.c, inc.b]
    return [h_row, a_row, [0, 0, 1]]


def _mat_mul(x, y):
    return [
        [sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)]
        for i in range(3)
    ]


def _row_mul(row, m):
    return [sum(row[k] * m[k][j] for k in range(3)) for j in range(3)]


def _period_matrix(spec: ParameterSpec, position: int) -> list[list[int]]:
    """Matrix advancing (h, A, 1) by one full cycle period, starting at the
    given cycle position."""
    period = len(spec.cycle)
    m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for k in range(period):
        m = _mat_mul(_stage_matrix(spec.cycle[(position + k) % period]), m)
    return m


def _eventually_nonneg(row, period_matrix, horizon=SYMBOLIC_HORIZON):
    """Smallest W <= horizon with row * M^W componentwise >= 0, else None.

    Since the register vector is componentwise nonnegative at every stage,
    such a W certifies row * v_n >= 0 for all stages n at this cycle position
    that are at least W periods past the preperiod.
    """
    for w in range(horizon + 1):
        if all(x >= 0 for x in row):
            return w
        row = _row_mul(row, period_matrix)
    return None


def _static_accumulator(spec: ParameterSpec) -> Optional[int]:
    """A_n's eventual constant value when the cycle never increments it."""
    t0 = len(spec.preperiod)
    acc0 = registers_at(spec, t0)[1]
    for rule in spec.cycle:
        inc = rule.effective_acc
        if inc.a != 0 or inc.b != 0 or (inc.c != 0 and acc0 != 0):
            return None
    return acc0


def _simplify(e: SpacerExpr, static_acc: Optional[int]) -> SpacerExpr:
    if static_acc is None or e.c == 0:
        return e
    return SpacerExpr(e.a, 0, e.b + e.c * static_acc)


# ---------------------------------------------------------------------------
# partial boundedness


@dataclass(frozen=True)
class PartialBoundednessCertificate:
    """Witnesses for partial boundedness from stage N on: r_n < R_frak,
    non-final spacer differences < S_frak, and every non-final spacer at
    least the current word length."""

    R_frak: int
    S_frak: int
    N: int
    verified_mode: str


@dataclass(frozen=True)
class BoundednessRefutation:
    condition: int
    stage: int
    i: Optional[int] = None
    j: Optional[int] = None
    detail: str = ""


@dataclass(frozen=True)
class BoundednessResult:
    status: str  # "certified" | "refuted" | "unknown"
    certificate: Optional[PartialBoundednessCertificate] = None
    refutation: Optional[BoundednessRefutation] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == "certified"


def _scan_smallest_n(spec, t_sym, cycle_r_max, cycle_diff_max):
    """Find the smallest N <= t_sym such that the concrete stages in
    [N, t_sym) satisfy condition (3); collect R/S contributions there."""
    views = list(itertools.islice(stage_views(spec), t_sym))
    n_min = t_sym
    for v in reversed(views):
        if any(s < v.h for s in v.spacers):
            break
        n_min = v.n
    r_max = cycle_r_max
    diff_max = cycle_diff_max
    for v in views[n_min:]:
        r_max = max(r_max, v.r)
        for i in range(len(v.spacers)):
            for j in range(i + 1, len(v.spacers)):
                diff_max = max(diff_max, abs(v.spacers[i] - v.spacers[j]))
    return n_min, r_max + 1, diff_max + 1


def check_partially_bounded(
    spec: ParameterSpec, mode: str = "symbolic", up_to: Optional[int] = None
) -> BoundednessResult:
    """Decide the three boundedness conditions for all n >= N.

    Symbolic mode reasons over the cycle rules (exact; reports "unknown"
    rather than guessing when the rule class defeats it).  Numeric mode
    verifies stages N <= n <= up_to only.
    """
    if not spec.normalized:
        raise SpecError("partial boundedness applies to normalized specs only")
    if mode == "numeric":
        if up_to is None:
            raise SpecError("numeric mode needs up_to")
        return _check_pb_numeric(spec, up_to)
    if mode != "symbolic":
        raise SpecError(f"unknown mode {mode!r}")
    return _check_pb_symbolic(spec)


def _check_pb_numeric(spec, up_to):
    views = list(itertools.islice(stage_views(spec), up_to + 1))
    bad_stage = -1
    witness = None
    for v in views:
        for i, s in enumerate(v.spacers):
            if s < v.h:
                bad_stage = v.n
                witness = BoundednessRefutation(
                    3, v.n, i=i, detail=f"s_{v.n}({i})={s} < h_{v.n}={v.h}"
                )
    if bad_stage == up_to:
        return BoundednessResult(
            "refuted", refutation=witness,
            detail=f"condition (3) fails at the last checked stage {up_to}",
        )
    n0 = bad_stage + 1
    r_max = max(v.r for v in views[n0:])
    diff_max = 0
    for v in views[n0:]:
        for i in range(len(v.spacers)):
            for j in range(i + 1, len(v.spacers)):
                diff_max = max(diff_max, abs(v.spacers[i] - v.spacers[j]))
    cert = PartialBoundednessCertificate(
        R_frak=r_max + 1, S_frak=diff_max + 1, N=n0,
        verified_mode=f"numeric-up-to({up_to})",
    )
    return BoundednessResult("certified", certificate=cert)


def _check_pb_symbolic(spec):
    t0 = len(spec.preperiod)
    period = len(spec.cycle)
    static_acc = _static_accumulator(spec)

    # condition (2): within each cycle rule the spacer expressions must agree
    # on the h and A coefficients, otherwise the difference grows (or is
    # beyond this analyzer; either way numeric verification is the fallback).
    diff_max = 0
    for rule in spec.cycle:
        exprs = [_simplify(e, static_acc) for e in rule.spacers]
        for i in range(len(exprs)):
            for j in range(i + 1, len(exprs)):
                if (exprs[i].a, exprs[i].c) != (exprs[j].a, exprs[j].c):
                    return BoundednessResult(
                        "unknown",
                        detail="condition (2) undecided: spacer expressions with "
                        "unequal coefficients; fall back to numeric mode",
                    )
                diff_max = max(diff_max, abs(exprs[i].b - exprs[j].b))

    # condition (3) per cycle position and slot.
    worst_period = 0
    for pos in range(period):
        rule = spec.cycle[pos]
        m = _period_matrix(spec, pos)
        for i, raw in enumerate(rule.spacers):
            e = _simplify(raw, static_acc)
            if e.a >= 1:
                continue
            if e.a == 0 and e.c == 0:
                # constant spacer against strictly growing heights; the first
                # violating stage at this position exists since h at least
                # doubles per stage
                for v in stage_views(spec):
                    at_pos = v.n >= t0 and (v.n - t0) % period == pos
                    if at_pos and e.b < v.h:
                        return BoundednessResult(
                            "refuted",
                            refutation=BoundednessRefutation(
                                3, v.n, i=i,
                                detail=f"constant spacer {e.b} < h_{v.n}={v.h} "
                                "and heights grow without bound",
                            ),
                        )
            else:
                row = [raw.a - 1, raw.c, raw.b]
                w = _eventually_nonneg(row, m)
                if w is not None:
                    worst_period = max(worst_period, w)
                    continue
                refute_row = [1 - raw.a, -raw.c, -(raw.b + 1)]
                w = _eventually_nonneg(refute_row, m)
                if w is not None:
                    stage = t0 + pos + w * period
                    view = stage_view(spec, stage)
                    return BoundednessResult(
                        "refuted",
                        refutation=BoundednessRefutation(
                            3, stage, i=i,
                            detail=f"s_{stage}({i})={view.spacers[i]} < "
                            f"h_{stage}={view.h} at every later period",
                        ),
                    )
                return BoundednessResult(
                    "unknown",
                    detail=f"condition (3) undecided for cycle rule {pos} slot {i} "
                    f"within {SYMBOLIC_HORIZON} periods; fall back to numeric mode",
                )

    t_sym = t0 + worst_period * period
    cycle_r_max = max(r.r for r in spec.cycle)
    n0, R, S = _scan_smallest_n(spec, t_sym, cycle_r_max, diff_max)
    cert = PartialBoundednessCertificate(
        R_frak=R, S_frak=S, N=n0, verified_mode="symbolic"
    )
    return BoundednessResult("certified", certificate=cert)


@lru_cache(maxsize=None)
def certified(spec: ParameterSpec) -> PartialBoundednessCertificate:
    """The symbolic certificate, cached; raises when the spec has none."""
    result = check_partially_bounded(spec, mode="symbolic")
    if result.status != "certified":
        raise NotCertifiedError(
            f"spec is not certified partially bounded: {result.status}"
            + (f" ({result.detail})" if result.detail else "")
        )
    return result.certificate


# ---------------------------------------------------------------------------
# the bounded-cuts / huge-last-column rewriting criterion


@dataclass(frozen=True)
class RewritingCriterionResult:
    status: str  # "holds" | "fails" | "unknown"
    R_frak: Optional[int] = None
    S_frak: Optional[int] = None
    threshold: Optional[int] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == "holds"


def check_rewriting_criterion(spec: ParameterSpec) -> RewritingCriterionResult:
    """For specs with explicit last-column spacers: bounded cuts, bounded
    non-final spacers, and a last column carrying at least half the next
    height.  Specs passing this normalize to partially bounded ones."""
    rules = spec.preperiod + spec.cycle
    if any(r.last is None for r in rules):
        raise SpecError("this check needs explicit last-column spacers")
    static_acc = _static_accumulator(spec)
    t0 = len(spec.preperiod)
    period = len(spec.cycle)

    s_max = 0
    for pos, rule in enumerate(spec.cycle):
        for i, raw in enumerate(rule.spacers):
            e = _simplify(raw, static_acc)
            if e.a >= 1 or e.c >= 1:
                return RewritingCriterionResult(
                    "fails",
                    detail=f"non-final spacer {i} of cycle rule {pos} grows "
                    "without bound",
                )
            s_max = max(s_max, e.b)

    worst_period = 0
    for pos, rule in enumerate(spec.cycle):
        m = _period_matrix(spec, pos)
        h_row = _stage_matrix(rule)[0]
        last = rule.last
        row = [2 * last.a - h_row[0], 2 * last.c - h_row[1], 2 * last.b - h_row[2]]
        w = _eventually_nonneg(row, m)
        if w is None:
            refute = [h_row[0] - 2 * last.a, h_row[1] - 2 * last.c,
                      h_row[2] - 2 * last.b - 1]
            if _eventually_nonneg(refute, m) is not None:
                return RewritingCriterionResult(
                    "fails",
                    detail=f"last-column spacer of cycle rule {pos} stays below "
                    "half the next height",
                )
            return RewritingCriterionResult(
                "unknown",
                detail=f"last-column condition undecided for cycle rule {pos} "
                f"within {SYMBOLIC_HORIZON} periods",
            )
        worst_period = max(worst_period, w)

    return RewritingCriterionResult(
        "holds",
        R_frak=max(r.r for r in spec.cycle),
        S_frak=s_max + 1,
        threshold=t0 + worst_period * period,
    )


# ---------------------------------------------------------------------------
# config text: parse and serialize


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message):
        raise ParseError(message, self.line, self.col)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self):
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_ws(self, newlines=True):
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == "#":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
            elif ch in " \t" or (newlines and ch in "\r\n;"):
                self.advance()
            else:
                break

    def expect(self, ch):
        self.skip_ws(newlines=False)
        if self.peek() != ch:
            self.error(f"expected {ch!r}, found {self.peek()!r}")
        self.advance()

    def read_int(self):
        self.skip_ws(newlines=False)
        start = self.pos
        while self.peek().isdigit():
            self.advance()
        if start == self.pos:
            if self.peek() == "-":
                self.error("negative coefficients are not allowed")
            self.error(f"expected an integer, found {self.peek()!r}")
        return int(self.text[start:self.pos])

    def read_word(self):
        self.skip_ws(newlines=False)
        start = self.pos
        while self.peek().isalpha():
            self.advance()
        return self.text[start:self.pos]

    def read_expr(self) -> SpacerExpr:
        a = c = b = 0
        seen = set()
        while True:
            self.skip_ws(newlines=False)
            if self.peek().isdigit():
                n = self.read_int()
                sym = self.peek()
                if sym in "hA":
                    self.advance()
                else:
                    sym = ""
            elif self.peek() in "hA":
                n, sym = 1, self.advance()
            else:
                self.error(f"expected a spacer term, found {self.peek()!r}")
            if sym in seen:
                self.error(f"duplicate {sym or 'constant'} term in expression")
            seen.add(sym)
            if sym == "h":
                a = n
            elif sym == "A":
                c = n
            else:
                b = n
            self.skip_ws(newlines=False)
            if self.peek() == "+":
                self.advance()
            else:
                return SpacerExpr(a, c, b)


def _parse_rule(sc: _Scanner) -> StageRule:
    fields = {}
    while True:
        sc.skip_ws()
        key = sc.read_word()
        if key not in ("r", "s", "last", "acc"):
            sc.error(f"unknown rule field {key!r}")
        if key in fields:
            sc.error(f"duplicate rule field {key!r}")
        sc.expect("=")
        if key == "r":
            fields["r"] = sc.read_int()
        elif key == "s":
            sc.expect("(")
            exprs = []
            sc.skip_ws(newlines=False)
            if sc.peek() != ")":
                exprs.append(sc.read_expr())
                while True:
                    sc.skip_ws(newlines=False)
                    if sc.peek() == ",":
                        sc.advance()
                        exprs.append(sc.read_expr())
                    else:
                        break
            sc.expect(")")
            fields["s"] = tuple(exprs)
        else:
            fields[key] = sc.read_expr()
        sc.skip_ws(newlines=False)
        if sc.peek() == ",":
            sc.advance()
            continue
        break
    if "r" not in fields or "s" not in fields:
        sc.error("rule needs both r=<int> and s=(...)")
    try:
        return StageRule(
            r=fields["r"], spacers=fields["s"],
            last=fields.get("last"), acc=fields.get("acc"),
        )
    except SpecError as exc:
        sc.error(str(exc))


def _parse_rule_list(sc: _Scanner) -> tuple[StageRule, ...]:
    sc.expect("[")
    rules = []
    sc.skip_ws()
    if sc.peek() != "]":
        rules.append(_parse_rule(sc))
        while True:
            sc.skip_ws(newlines=False)
            if sc.peek() == ";":
                sc.advance()
                sc.skip_ws()
                if sc.peek() == "]":
                    break
                rules.append(_parse_rule(sc))
            else:
                break
    sc.expect("]")
    return tuple(rules)


def parse_spec(text: str) -> ParameterSpec:
    """Parse the config grammar:

        name: <free text>                  # optional
        preperiod: [<rule>; <rule>; ...]   # optional, may be []
        cycle: [<rule>; ...]               # required, nonempty

    where each rule is ``r=<int>, s=(<expr>, ...)[, last=<expr>][, acc=<expr>]``
    and an expression is a ``+``-joined sum of ``<int>``, ``<int>h``, and
    ``<int>A`` terms.  ``#`` starts a comment.  Fields may be separated by
    newlines or semicolons.
    """
    sc = _Scanner(text)
    name = None
    preperiod: tuple[StageRule, ...] = ()
    cycle = None
    while True:
        sc.skip_ws()
        if sc.pos >= len(sc.text):
            break
        key = sc.read_word()
        if not key:
            sc.error(f"expected a field name, found {sc.peek()!r}")
        sc.expect(":")
        if key == "name":
            sc.skip_ws(newlines=False)
            start = sc.pos
            while sc.pos < len(sc.text) and sc.peek() not in "\r\n;#":
                sc.advance()
            name = sc.text[start:sc.pos].strip() or None
        elif key == "preperiod":
            preperiod = _parse_rule_list(sc)
        elif key == "cycle":
            cycle = _parse_rule_list(sc)
        else:
            sc.error(f"unknown field {key!r}")
    if cycle is None:
        raise ParseError("missing required field 'cycle'", sc.line, sc.col)
    if not cycle:
        raise ParseError("cycle must be nonempty", sc.line, sc.col)
    return ParameterSpec(cycle=cycle, preperiod=preperiod, name=name)


def _format_rule(rule: StageRule) -> str:
    parts = [f"r={rule.r}", "s=(" + ", ".join(str(e) for e in rule.spacers) + ")"]
    if rule.last is not None:
        parts.append(f"last={rule.last}")
    if rule.acc is not None:
        parts.append(f"acc={rule.acc}")
    return ", ".join(parts)


def serialize_spec(spec: ParameterSpec) -> str:
    """Canonical config text; parse(serialize(spec)) == spec."""
    lines = []
    if spec.name:
        lines.append(f"name: {spec.name}")
    lines.append(
        "preperiod: [" + "; ".join(_format_rule(r) for r in spec.preperiod) + "]"
    )
    lines.append("cycle: [" + "; ".join(_format_rule(r) for r in spec.cycle) + "]")
    return "\n".join(lines) + "\n"
