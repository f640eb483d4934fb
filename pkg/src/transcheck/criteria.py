"""Finite-window verifiers for the growth hypotheses behind the pipelines.

Asymptotic statements (limsup = infinity, liminf > 1, ratios tending to 0,
"for all sufficiently large n") are undecidable from finite data.  Each
check therefore evaluates an explicit finite-window surrogate, documented
per operation, and returns a three-valued verdict:

* ``satisfied-on-window`` -- the surrogate holds, every deciding margin
  is nonnegative (exact sign);
* ``violated-at`` -- a concrete index fails, confirmed by exact
  arithmetic (sign -1, or 0 where the hypothesis is strict);
* ``inconclusive`` -- the window neither certifies nor refutes.

Conventions: "for all sufficiently large n" is decided on the upper half
of the window (the window must have length >= 4 for such checks); the
"exceeds threshold" surrogate for limsup checks defaults to 2**64 and a
fresh running maximum must appear in the last quartile of the window.
Reading of the multi-series statements: the per-series index range and the
form count are taken to coincide (r = m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exactcore import (
    FRAC_BITS,
    Factor,
    LogMag,
    RefusalError,
    cmp_products,
    decide_root_gap,
    exact_nth_root,
    logmag_of_factors,
)
from .reporting import fraction_str
from .sequences import SequenceSpec, divisor_count, sigma, totient

_SCALE = 1 << FRAC_BITS
_LN2 = math.log(2)

VERDICT_SATISFIED = "satisfied-on-window"
VERDICT_VIOLATED = "violated-at"
VERDICT_INCONCLUSIVE = "inconclusive"

HYPOTHESIS_KINDS = (
    "spike-decay",          # denominator spike (exponent 1+delta) + term-ratio decay
    "spike-decay-strong",   # same with the stronger exponent 2+delta
    "spike-rootstep",       # spike (exponent 1+delta+1/eps) + rooted step gap
    "divisor-gap",          # sigma/phi/d(N+1) * prefix**delta <= b_{N+1}
    "growth-window",        # liminf/limsup window for b_n**(1/(m+1)**n)
    "ratio-vanishing",      # later coefficient families vanish against earlier ones
    "coeff-logpower",       # c_n < 2**((ln b_n)**alpha), b_n >= n**(1+eps)
    "coeff-loglog",         # c_n < b_n**(1/(ln ln b_n)**(1+eps)), b_n >= n**(1+eps)
    "coeff-sqrt-power",     # |d_n| < n**(1/2-delta), infinitely many nonzero
)


@dataclass(frozen=True)
class CriteriaConfig:
    """Window-surrogate thresholds; all decisions stay exact."""

    limsup_threshold_log2: int = 64
    vanish_threshold: Fraction = Fraction(1)
    # undecidable band (log2 scale) for the transcendental coefficient bounds
    transcendental_band: float = 2.0**-20
    # logarithms in the coefficient bounds are natural logs
    log_base: str = "e"
    root_bits_cap: int = 4096


DEFAULT_CONFIG = CriteriaConfig()


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of one hypothesis check over one window.

    ``per_index_margin`` holds the multiplicative slack (LHS/RHS - 1) of
    the binding inequality at each window index as a signed LogMag; the
    margins that decide the verdict are the ones on the deciding range
    (tail half, or the window maximum for limsup surrogates).
    """

    hypothesis: str
    window: tuple[int, int]
    verdict: str
    violated_at: Optional[int]
    per_index_margin: tuple[LogMag, ...]
    trend: str
    details: Mapping[str, object] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.verdict == VERDICT_SATISFIED

    def to_record(self) -> dict:
        verdict = self.verdict
        if verdict == VERDICT_VIOLATED:
            verdict = "violated-at(%d)" % self.violated_at
        return {
            "hypothesis": self.hypothesis,
            "window": list(self.window),
            "verdict": verdict,
            "margins": [m.serialize() for m in self.per_index_margin],
            "trend": self.trend,
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class GrowthWindowReport:
    """Window estimates of liminf/limsup of b_n**(1/(m+1)**n)."""

    hypothesis: str
    window: tuple[int, int]
    g_values: tuple[Fraction, ...]
    liminf_estimate: LogMag
    limsup_estimate: LogMag
    verdict: str  # "holds" | "fails"

    def to_record(self) -> dict:
        return {
            "hypothesis": self.hypothesis,
            "window": list(self.window),
            "g_values": [f"{float(g):.6f}" for g in self.g_values],
            "liminf": self.liminf_estimate.serialize(),
            "limsup": self.limsup_estimate.serialize(),
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class HypothesisSet:
    """A named hypothesis kind with its parameters (scenario-facing)."""

    kind: str
    delta: Optional[Fraction] = None
    epsilon: Optional[Fraction] = None
    alpha: Optional[Fraction] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in HYPOTHESIS_KINDS:
            raise ValueError("unknown hypothesis kind %r" % (self.kind,))

    def validate_for_pipeline(self, series_m: int) -> None:
        """Pipeline coupling constraints (dependence/transcendence chains)."""
        k = self.kind
        if k in ("spike-decay", "spike-decay-strong"):
            if self.delta is None or self.delta <= 0:
                raise ValueError("%s needs delta > 0" % k)
            if k == "spike-decay" and self.delta * series_m <= 1:
                raise ValueError(
                    "spike-decay drives the %d-series pipeline only with "
                    "delta > 1/%d" % (series_m, series_m)
                )
        elif k == "spike-rootstep":
            if not self.delta or not self.epsilon or self.delta <= 0 or self.epsilon <= 0:
                raise ValueError("spike-rootstep needs positive delta and epsilon")
            if self.delta * self.epsilon / (1 + self.epsilon) * series_m <= 1:
                raise ValueError(
                    "spike-rootstep drives the pipeline only with "
                    "delta*eps/(1+eps) > 1/%d" % series_m
                )
        elif k in ("divisor-gap", "coeff-sqrt-power"):
            if self.delta is None or 3 * self.delta <= 1:
                raise ValueError("%s needs delta > 1/3" % k)
        elif k == "growth-window":
            if (self.m or series_m) < 2:
                raise ValueError("growth-window needs m >= 2")
        elif k in ("coeff-logpower", "coeff-loglog"):
            if self.epsilon is None or self.epsilon <= 0:
                raise ValueError("%s needs epsilon > 0" % k)

    def label(self) -> str:
        parts = []
        for name in ("delta", "epsilon", "alpha", "m"):
            v = getattr(self, name)
            if v is not None:
                parts.append("%s=%s" % (name, fraction_str(Fraction(v))))
        return "%s(%s)" % (self.kind, ", ".join(parts))


# ---------------------------------------------------------------------------
# Margins and window plumbing.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Margin:
    sign: int      # exact sign of LHS - RHS
    ratio_fp: int  # fixed-point log2(LHS/RHS), display/ordering only
    decided: bool = True

    @property
    def slack(self) -> LogMag:
        if not self.decided:
            return LogMag(0)
        return _slack_logmag(self.sign, self.ratio_fp)

    def key(self):
        return (self.sign, self.ratio_fp)


def _slack_logmag(sign: int, ratio_fp: int) -> LogMag:
    """LogMag of (LHS/RHS - 1) from the exact sign and the log2 ratio."""
    if sign == 0:
        return LogMag(0)
    x = ratio_fp / _SCALE
    if sign > 0:
        x = max(x, 2.0**-62)
        mag = x if x >= 64 else math.log2(math.expm1(x * _LN2))
    else:
        x = min(x, -(2.0**-62))
        mag = 0.0 if x <= -64 else math.log2(-math.expm1(x * _LN2))
    return LogMag(sign, round(mag * _SCALE))


def _margin(lhs: Sequence[Factor], rhs: Sequence[Factor]) -> _Margin:
    sign = cmp_products(lhs, rhs)
    fp = logmag_of_factors(lhs).fp - logmag_of_factors(rhs).fp
    return _Margin(sign, fp)


def _validate_window(window, min_len: int = 1, allow_empty: bool = False) -> tuple[int, int]:
    n0, n1 = int(window[0]), int(window[1])
    if n0 < 1:
        raise ValueError("window must start at index >= 1")
    if n1 < n0:
        if allow_empty:
            return n0, n1
        raise ValueError("window is empty")
    if n1 - n0 + 1 < min_len:
        raise ValueError("window length %d is below the minimum %d needed for "
                         "tail-half decisions" % (n1 - n0 + 1, min_len))
    return n0, n1


def _tail_half_start(n0: int, n1: int) -> int:
    return n0 + (n1 - n0 + 1) // 2


def _last_quartile_start(n0: int, n1: int) -> int:
    return n0 + (3 * (n1 - n0 + 1)) // 4


def _trend(fps: Sequence[int]) -> str:
    if len(fps) < 2:
        return "flat"
    diffs = [b - a for a, b in zip(fps, fps[1:])]
    band = _SCALE >> 20
    if all(abs(d) <= band for d in diffs):
        return "flat"
    if all(d >= 0 for d in diffs):
        return "increasing"
    if all(d <= 0 for d in diffs):
        return "decreasing"
    return "mixed"


class _DenominatorView:
    """Per-window cache of factored denominator values and prefix products."""

    def __init__(self, denoms: SequenceSpec, n_max: int):
        self.value_facs: list[Optional[list[Factor]]] = [None]
        self.prefix_facs: list[list[Factor]] = [[]]
        cum: list[Factor] = []
        for n in range(1, n_max + 1):
            vf = denoms.value_factors(n)
            self.value_facs.append(vf)
            cum = cum + vf
            self.prefix_facs.append(cum)

    def b(self, n: int) -> list[Factor]:
        return self.value_facs[n]

    def prefix_pow(self, n: int, exponent: Fraction) -> list[Factor]:
        return [(base, e * exponent) for base, e in self.prefix_facs[n]]


def _coeff_abs_factors(coeffs: Sequence[SequenceSpec], n: int) -> list[list[Factor]]:
    out = []
    for i, c in enumerate(coeffs, start=1):
        v = c.value(n)
        if v == 0:
            raise ValueError("zero coefficient c_{%d,%d}; the hypotheses require "
                             "non-zero integers" % (i, n))
        out.append([(abs(v), Fraction(1))])
    return out


# ---------------------------------------------------------------------------
# Spike (limsup) and decay (liminf) surrogates.
# ---------------------------------------------------------------------------


def _spike_margins(coeffs, view: _DenominatorView, exponent: Fraction,
                   n0: int, n1: int, threshold_log2: int) -> list[_Margin]:
    """Margins of b_{n+1} / (prefix**exponent * c_{i,n+1}) versus 2**threshold."""
    margins = []
    for n in range(n0, n1 + 1):
        cs = _coeff_abs_factors(coeffs, n + 1)
        per_series = []
        for cf in cs:
            lhs = list(view.b(n + 1))
            rhs = [(Fraction(2), Fraction(threshold_log2))] + view.prefix_pow(n, exponent) + cf
            per_series.append(_margin(lhs, rhs))
        margins.append(min(per_series, key=_Margin.key))
    return margins


def _decay_margins(coeffs, view: _DenominatorView, n0: int, n1: int) -> list[_Margin]:
    """Margins of (b_{n+1}/b_n) * (c_{i,n}/c_{i,n+1}) versus 1."""
    margins = []
    for n in range(n0, n1 + 1):
        cs_now = _coeff_abs_factors(coeffs, n)
        cs_next = _coeff_abs_factors(coeffs, n + 1)
        per_series = []
        for cf_now, cf_next in zip(cs_now, cs_next):
            lhs = list(view.b(n + 1)) + cf_now
            rhs = list(view.b(n)) + cf_next
            per_series.append(_margin(lhs, rhs))
        margins.append(min(per_series, key=_Margin.key))
    return margins


def _aggregate_spike(margins: list[_Margin], n0: int, n1: int) -> tuple[str, Optional[int]]:
    quartile = _last_quartile_start(n0, n1)
    tail = _tail_half_start(n0, n1)
    best = max(margins, key=_Margin.key)
    best_at = n0 + max(range(len(margins)), key=lambda j: margins[j].key())
    if best.sign > 0:
        early_best = max((m.key() for m in margins[: quartile - n0]), default=None)
        late_best = max((m.key() for m in margins[quartile - n0:]), default=None)
        if late_best is not None and (early_best is None or late_best > early_best):
            return VERDICT_SATISFIED, None
    tail_ms = margins[tail - n0:]
    if all(m.sign == -1 for m in tail_ms):
        fps = [m.ratio_fp for m in tail_ms]
        if all(b <= a for a, b in zip(fps, fps[1:])):
            worst = min(range(len(tail_ms)), key=lambda j: (tail_ms[j].key(), -j))
            return VERDICT_VIOLATED, tail + worst
    return VERDICT_INCONCLUSIVE, None


def _aggregate_decay(margins: list[_Margin], n0: int, n1: int) -> tuple[str, Optional[int]]:
    tail = _tail_half_start(n0, n1)
    for n in range(tail, n1 + 1):
        if margins[n - n0].sign <= 0:
            return VERDICT_VIOLATED, n
    return VERDICT_SATISFIED, None


def _combined_verdict(sub_verdicts: list[tuple[str, Optional[int]]]) -> tuple[str, Optional[int]]:
    for v, at in sub_verdicts:
        if v == VERDICT_VIOLATED:
            return v, at
    if all(v == VERDICT_SATISFIED for v, _ in sub_verdicts):
        return VERDICT_SATISFIED, None
    return VERDICT_INCONCLUSIVE, None


def _spike_decay(coeffs: Sequence[SequenceSpec], denoms: SequenceSpec,
                 delta: Fraction, window, config: CriteriaConfig,
                 extra_exponent: int, label: str) -> ConditionVerdict:
    if delta is None or Fraction(delta) <= 0:
        raise ValueError("delta must be positive")
    delta = Fraction(delta)
    n0, n1 = _validate_window(window, min_len=4)
    view = _DenominatorView(denoms, n1 + 1)
    exponent = 1 + extra_exponent + delta
    spike = _spike_margins(coeffs, view, exponent, n0, n1, config.limsup_threshold_log2)
    decay = _decay_margins(coeffs, view, n0, n1)
    sv = _aggregate_spike(spike, n0, n1)
    dv = _aggregate_decay(decay, n0, n1)
    verdict, at = _combined_verdict([dv, sv])
    combined = [min(s, d, key=_Margin.key) for s, d in zip(spike, decay)]
    return ConditionVerdict(
        hypothesis=label,
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in combined),
        trend=_trend([m.ratio_fp for m in combined]),
        details={
            "spike": {
                "exponent": exponent,
                "threshold_log2": config.limsup_threshold_log2,
                "verdict": sv[0],
                "margins": [m.slack.serialize() for m in spike],
            },
            "decay": {
                "verdict": dv[0],
                "margins": [m.slack.serialize() for m in decay],
            },
        },
    )


def check_spike_decay(coeffs: Sequence[SequenceSpec], denoms: SequenceSpec,
                      delta: Fraction, window,
                      config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """Paired growth hypothesis behind the m-series sum pipeline.

    Spike surrogate: b_{n+1}/((b_1..b_n)**(1+delta) c_{i,n+1}) must top the
    configured threshold somewhere, with a fresh running maximum in the
    last window quartile.  Decay surrogate: the cross ratio
    (b_{n+1}/b_n)(c_{i,n}/c_{i,n+1}) must exceed 1 on the whole tail half.
    Coefficient magnitudes are used (signs are irrelevant to growth).
    """
    return _spike_decay(coeffs, denoms, delta, window, config, 0,
                        "spike-decay(delta=%s)" % fraction_str(Fraction(delta)))


def check_spike_decay_strong(coeff: SequenceSpec | Sequence[SequenceSpec],
                             denoms: SequenceSpec, delta: Fraction, window,
                             config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """Single-series variant with the strictly stronger exponent 2+delta."""
    coeffs = [coeff] if isinstance(coeff, SequenceSpec) else list(coeff)
    return _spike_decay(coeffs, denoms, delta, window, config, 1,
                        "spike-decay-strong(delta=%s)" % fraction_str(Fraction(delta)))


def check_spike_rootstep(coeffs: Sequence[SequenceSpec], denoms: SequenceSpec,
                         delta: Fraction, epsilon: Fraction, window,
                         config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """Spike with exponent 1+delta+1/eps plus the exact rooted step gap.

    The step inequality (b_{n+1}/c_{n+1})**(1/(1+eps)) >=
    (b_n/c_n)**(1/(1+eps)) + 1 is decided exactly for every tail-half
    index (rational arithmetic, radical brackets refined on demand).
    """
    delta, epsilon = Fraction(delta), Fraction(epsilon)
    if delta <= 0 or epsilon <= 0:
        raise ValueError("delta and epsilon must be positive")
    n0, n1 = _validate_window(window, min_len=4)
    view = _DenominatorView(denoms, n1 + 1)
    exponent = 1 + delta + 1 / epsilon
    spike = _spike_margins(coeffs, view, exponent, n0, n1, config.limsup_threshold_log2)
    sv = _aggregate_spike(spike, n0, n1)

    one_plus = 1 + epsilon
    root = one_plus.numerator
    inner = one_plus.denominator

    def rooted_base(i: int, n: int) -> Fraction:
        c = coeffs[i].value(n)
        if c == 0:
            raise ValueError("zero coefficient c_{%d,%d}" % (i + 1, n))
        return Fraction(denoms.value(n), abs(c)) ** inner

    step_margins: list[_Margin] = []
    for n in range(n0, n1 + 1):
        per_series = []
        for i in range(len(coeffs)):
            x_next, x_prev = rooted_base(i, n + 1), rooted_base(i, n)
            try:
                holds = decide_root_gap(x_next, x_prev, root, 1, config.root_bits_cap)
            except RefusalError:
                per_series.append(_Margin(0, 0, decided=False))
                continue
            rn = exact_nth_root(x_next, root)
            rp = exact_nth_root(x_prev, root)
            if holds and rn is not None and rp is not None and rn == rp + 1:
                sign = 0
            else:
                sign = 1 if holds else -1
            lu = float(logmag_of_factors([(x_next, Fraction(1, root))]).fp) / _SCALE
            lv = float(logmag_of_factors([(x_prev, Fraction(1, root))]).fp) / _SCALE
            lv1 = lv if lv >= 64 else math.log2(2.0**lv + 1)
            per_series.append(_Margin(sign, round((lu - lv1) * _SCALE)))
        step_margins.append(min(per_series, key=_Margin.key))

    tail = _tail_half_start(n0, n1)
    step_verdict: tuple[str, Optional[int]] = (VERDICT_SATISFIED, None)
    for n in range(tail, n1 + 1):
        m = step_margins[n - n0]
        if not m.decided:
            step_verdict = (VERDICT_INCONCLUSIVE, None)
            break
        if m.sign < 0:
            step_verdict = (VERDICT_VIOLATED, n)
            break

    verdict, at = _combined_verdict([step_verdict, sv])
    combined = [min(s, d, key=_Margin.key) for s, d in zip(spike, step_margins)]
    return ConditionVerdict(
        hypothesis="spike-rootstep(delta=%s, epsilon=%s)" % (
            fraction_str(delta), fraction_str(epsilon)),
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in combined),
        trend=_trend([m.ratio_fp for m in combined]),
        details={
            "spike": {"exponent": exponent, "verdict": sv[0]},
            "rooted-step": {"verdict": step_verdict[0],
                            "margins": [m.slack.serialize() for m in step_margins]},
        },
    )


def check_divisor_gap(denoms: SequenceSpec, delta: Fraction, window,
                      config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """Indices N with sigma/phi/d(N+1) * (b_1..b_N)**delta <= b_{N+1}.

    Returns the member subset in the details; satisfied when membership
    reaches into the tail half (the finite stand-in for an infinite set).
    Requires delta > 1/3 and b_n >= 2 on the window.
    """
    delta = Fraction(delta)
    if 3 * delta <= 1:
        raise ValueError("delta must exceed 1/3")
    n0, n1 = _validate_window(window, allow_empty=True)
    if n1 < n0:
        return ConditionVerdict(
            hypothesis="divisor-gap(delta=%s)" % fraction_str(delta),
            window=(n0, n1), verdict=VERDICT_INCONCLUSIVE, violated_at=None,
            per_index_margin=(), trend="flat", details={"members": []},
        )
    view = _DenominatorView(denoms, n1 + 1)
    for n in range(n0, n1 + 2):
        if cmp_products(view.b(n), [(2, Fraction(1))]) < 0:
            raise ValueError("b_%d < 2 violates the precondition" % n)
    margins: list[_Margin] = []
    members: list[int] = []
    per_fn: dict[str, list] = {"sigma": [], "totient": [], "divisor-count": []}
    for n in range(n0, n1 + 1):
        trio = []
        for name, fn in (("sigma", sigma), ("totient", totient),
                         ("divisor-count", divisor_count)):
            rhs = [(fn(n + 1), Fraction(1))] + view.prefix_pow(n, delta)
            m = _margin(list(view.b(n + 1)), rhs)
            per_fn[name].append(m.slack.serialize())
            trio.append(m)
        worst = min(trio, key=_Margin.key)
        margins.append(worst)
        if worst.sign >= 0:
            members.append(n)
    tail = _tail_half_start(n0, n1)
    if any(n >= tail for n in members):
        verdict, at = VERDICT_SATISFIED, None
    elif not members:
        verdict, at = VERDICT_VIOLATED, n1
    else:
        verdict, at = VERDICT_INCONCLUSIVE, None
    return ConditionVerdict(
        hypothesis="divisor-gap(delta=%s)" % fraction_str(delta),
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in margins),
        trend=_trend([m.ratio_fp for m in margins]),
        details={"members": members, "per_function_margins": per_fn},
    )


def check_growth_window(denoms: SequenceSpec, m: int, window,
                        config: CriteriaConfig = DEFAULT_CONFIG) -> GrowthWindowReport:
    """Estimate liminf/limsup of b_n**(1/(m+1)**n) over the tail half.

    The strict-gap hypothesis additionally needs liminf >= 1 (automatic
    for positive integers) and a gap wider than the flatness tolerance;
    an eventually constant g_n = log2(b_n)/(m+1)**n therefore fails.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    n0, n1 = _validate_window(window, min_len=4)
    gs: list[Fraction] = []
    for n in range(n0, n1 + 1):
        fp = logmag_of_factors(denoms.value_factors(n)).fp
        gs.append(Fraction(fp, _SCALE) / (m + 1) ** n)
    tail = _tail_half_start(n0, n1)
    tail_gs = gs[tail - n0:]
    g_min, g_max = min(tail_gs), max(tail_gs)
    tol = Fraction(1, 1 << 20)
    verdict = "holds" if (g_max - g_min > tol and g_min >= 0) else "fails"
    return GrowthWindowReport(
        hypothesis="growth-window(m=%d)" % m,
        window=(n0, n1),
        g_values=tuple(gs),
        liminf_estimate=LogMag(1, round(g_min * _SCALE)),
        limsup_estimate=LogMag(1, round(g_max * _SCALE)),
        verdict=verdict,
    )


def check_ratio_vanishing(coeffs: Sequence[SequenceSpec], window,
                          config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """Later coefficient families must vanish against earlier ones.

    For every pair i > j the magnitude ratio |c_i/c_j| must sit below the
    configured threshold at the window end and must not increase across
    the tail half (with a net strict decrease).
    """
    if len(coeffs) < 2:
        raise ValueError("need at least two coefficient sequences")
    n0, n1 = _validate_window(window, min_len=4)
    tail = _tail_half_start(n0, n1)
    thr = Fraction(config.vanish_threshold)

    def ratio(i: int, j: int, n: int) -> Fraction:
        ci, cj = coeffs[i].value(n), coeffs[j].value(n)
        if ci == 0 or cj == 0:
            raise ValueError("zero coefficient at n=%d" % n)
        return Fraction(abs(ci), abs(cj))

    margins: list[_Margin] = []
    verdict, at = VERDICT_SATISFIED, None
    pair_notes = []
    for n in range(n0, n1 + 1):
        worst = None
        for i in range(1, len(coeffs)):
            for j in range(i):
                r = ratio(i, j, n)
                sign = (thr > r) - (thr < r)
                fp = logmag_of_factors([(thr, 1)]).fp - logmag_of_factors([(r, 1)]).fp \
                    if r > 0 else 0
                m = _Margin(sign, fp)
                worst = m if worst is None or m.key() < worst.key() else worst
        margins.append(worst)
    for i in range(1, len(coeffs)):
        for j in range(i):
            end_ratio = ratio(i, j, n1)
            if end_ratio >= thr:
                verdict, at = VERDICT_VIOLATED, n1
                pair_notes.append("pair (%d,%d): end ratio %s >= threshold"
                                  % (i + 1, j + 1, end_ratio))
                continue
            prev = ratio(i, j, tail)
            for n in range(tail + 1, n1 + 1):
                cur = ratio(i, j, n)
                if cur > prev:
                    verdict, at = VERDICT_VIOLATED, n
                    pair_notes.append("pair (%d,%d): ratio increases at n=%d"
                                      % (i + 1, j + 1, n))
                    break
                prev = cur
            else:
                if ratio(i, j, n1) >= ratio(i, j, tail) and verdict == VERDICT_SATISFIED:
                    verdict, at = VERDICT_VIOLATED, n1
                    pair_notes.append("pair (%d,%d): no net decrease over the tail half"
                                      % (i + 1, j + 1))
    return ConditionVerdict(
        hypothesis="ratio-vanishing",
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in margins),
        trend=_trend([m.ratio_fp for m in margins]),
        details={"threshold": thr, "notes": pair_notes},
    )


# ---------------------------------------------------------------------------
# Coefficient-bound hypotheses with transcendental right-hand sides.
# ---------------------------------------------------------------------------


def _log2_of(spec_factors: list[Factor]) -> float:
    return logmag_of_factors(spec_factors).fp / _SCALE


def _power_floor_margin(denoms: SequenceSpec, n: int, one_plus_eps: Fraction) -> _Margin:
    """Exact margin of b_n >= n**(1+eps)."""
    lhs = denoms.value_factors(n)
    rhs: list[Factor] = [(n, one_plus_eps)] if n > 1 else []
    return _margin(lhs, rhs)


def _banded_margin(diff_log2: float, band: float) -> _Margin:
    """Margin decided in float log space, honest inside the band."""
    if abs(diff_log2) <= band:
        return _Margin(0, round(diff_log2 * _SCALE), decided=False)
    return _Margin(1 if diff_log2 > 0 else -1, round(diff_log2 * _SCALE))


def _coeff_bound_check(coeffs, denoms, epsilon: Fraction, window, config,
                       label: str, bound_log2_fn) -> ConditionVerdict:
    """Shared driver: c_{i,n} < 2**bound_log2(b_n) plus b_n >= n**(1+eps).

    The coefficient bound involves transcendental logs, so it is decided
    in float log space with an honest undecidable band (indices inside the
    band make the check inconclusive, never violated); the power floor
    b_n >= n**(1+eps) is decided exactly.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n0, n1 = _validate_window(window, min_len=4, allow_empty=True)
    if n1 < n0:
        return ConditionVerdict(
            hypothesis=label, window=(n0, n1), verdict=VERDICT_INCONCLUSIVE,
            violated_at=None, per_index_margin=(), trend="flat",
            details={"log_base": config.log_base},
        )
    band = config.transcendental_band
    margins: list[_Margin] = []
    for n in range(n0, n1 + 1):
        per = []
        lgb = _log2_of(denoms.value_factors(n))
        bound = bound_log2_fn(lgb)
        for i, c in enumerate(coeffs):
            cv = c.value(n)
            if cv == 0:
                raise ValueError("zero coefficient c_{%d,%d}" % (i + 1, n))
            if bound is None:
                # right-hand side undefined (b_n too small): counts against
                per.append(_Margin(-1, -_SCALE))
                continue
            lgc = _log2_of([(abs(cv), Fraction(1))])
            per.append(_banded_margin(bound - lgc, band))
        per.append(_power_floor_margin(denoms, n, 1 + epsilon))
        margins.append(min(per, key=_Margin.key))
    tail = _tail_half_start(n0, n1)
    verdict, at = VERDICT_SATISFIED, None
    for n in range(tail, n1 + 1):
        m = margins[n - n0]
        if m.decided and m.sign <= 0:
            verdict, at = VERDICT_VIOLATED, n
            break
        if not m.decided:
            verdict = VERDICT_INCONCLUSIVE
    return ConditionVerdict(
        hypothesis=label,
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in margins),
        trend=_trend([m.ratio_fp for m in margins]),
        details={"log_base": config.log_base, "band_log2": band},
    )


def check_coeff_logpower(coeffs: Sequence[SequenceSpec], denoms: SequenceSpec,
                         alpha: Fraction, epsilon: Fraction, window,
                         config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """c_{i,n} < 2**((ln b_n)**alpha) and b_n >= n**(1+eps) on the tail half.

    alpha defaults to 1/2 at the scenario layer; logs are natural and the
    base is recorded in the report details.
    """
    alpha_f = float(Fraction(alpha))

    def bound(lgb: float):
        lnb = lgb * _LN2
        if lnb < 0:
            return None
        return lnb**alpha_f

    label = "coeff-logpower(alpha=%s, epsilon=%s)" % (
        fraction_str(Fraction(alpha)), fraction_str(Fraction(epsilon)))
    return _coeff_bound_check(coeffs, denoms, epsilon, window, config, label, bound)


def check_coeff_loglog(coeffs: Sequence[SequenceSpec], denoms: SequenceSpec,
                       epsilon: Fraction, window,
                       config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """c_{i,n} < b_n**(1/(ln ln b_n)**(1+eps)) and b_n >= n**(1+eps).

    Indices with b_n <= e (where ln ln b_n is not positive) count against
    the bound; they can only occur early in honest instances.
    """
    eps_f = float(Fraction(epsilon))

    def bound(lgb: float):
        lnb = lgb * _LN2
        if lnb <= 1:  # b <= e: ln ln b <= 0, exponent undefined
            return None
        return lgb / (math.log(lnb) ** (1 + eps_f))

    label = "coeff-loglog(epsilon=%s)" % fraction_str(Fraction(epsilon))
    return _coeff_bound_check(coeffs, denoms, epsilon, window, config, label, bound)


def check_coeff_sqrt_power(dseq: SequenceSpec, delta: Fraction, window,
                           config: CriteriaConfig = DEFAULT_CONFIG) -> ConditionVerdict:
    """|d_n| < n**(1/2-delta) on the tail half, with nonzero entries.

    Exact decision (the exponent is rational).  The nonzero count over the
    whole window stands in for "nonzero infinitely often": zero nonzero
    entries make the check inconclusive, never satisfied.
    """
    delta = Fraction(delta)
    if 3 * delta <= 1:
        raise ValueError("delta must exceed 1/3")
    n0, n1 = _validate_window(window, min_len=4)
    s = Fraction(1, 2) - delta
    margins: list[_Margin] = []
    nonzero = 0
    for n in range(n0, n1 + 1):
        d = dseq.value(n)
        if d != 0:
            nonzero += 1
            lhs: list[Factor] = [(n, s)] if n > 1 else []
            m = _margin(lhs, [(abs(d), Fraction(1))])
        else:
            m = _Margin(1, logmag_of_factors([(n, s)] if n > 1 else []).fp)
        margins.append(m)
    tail = _tail_half_start(n0, n1)
    verdict, at = VERDICT_SATISFIED, None
    for n in range(tail, n1 + 1):
        if dseq.value(n) != 0 and margins[n - n0].sign <= 0:
            verdict, at = VERDICT_VIOLATED, n
            break
    if verdict == VERDICT_SATISFIED and nonzero == 0:
        verdict = VERDICT_INCONCLUSIVE
    return ConditionVerdict(
        hypothesis="coeff-sqrt-power(delta=%s)" % fraction_str(delta),
        window=(n0, n1),
        verdict=verdict,
        violated_at=at,
        per_index_margin=tuple(m.slack for m in margins),
        trend=_trend([m.ratio_fp for m in margins]),
        details={"nonzero_count": nonzero, "bound_exponent": s},
    )
