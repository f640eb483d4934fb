"""Convergent engine: exact partial sums/products, certified tails, exponents.

Every series here is written over the shared denominator q_N = b_1*...*b_N,
so the N-th convergent is an exact integer pair (p, q).  Tail certification
uses a term-ratio certificate: the ratio of consecutive term magnitudes is
verified exactly on a lookahead window, must stay below 1, and must be
non-increasing across the window (an increasing ratio trend signals
sub-geometric decay, where extrapolating a fixed ratio is unsound -- the
engine refuses instead of guessing).  Ratio dominance checks run on
factored values, so doubly-exponential denominators never have to be
materialized beyond the summed terms.

Three analytic error bounds are implemented next to the exact route:

* geometric: tail <= (|c_{N+1}|/b_{N+1}) * A/(A-1) once the cross ratio
  (b_{n+1}/b_n)(c_n/c_{n+1}) >= A > 1 is verified on the window;
* power: tail <= (1/eps) * (x-1)**(-eps) with x = (b_{N+1}/c_{N+1})**(1/(1+eps)),
  once the rooted step inequality x_{n+1} >= x_n + 1 is verified exactly;
* product: |beta - p/q| <= 3 * prod_{n<=N}(1 + c_n/b_n) * sum_{n>N} c_n/b_n,
  valid once the tail sum is certified below 1/4 (then exp(x) <= 1 + 2x
  covers the linearization constants).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactcore import (
    Enclosure,
    Factor,
    LogMag,
    RefusalError,
    cmp_products,
    decide_root_gap,
    nth_root_enclosure,
    to_logmag,
)
from .sequences import SequenceSpec

MODE_SUM_DIRECT = "sum-direct"
MODE_SUM_PREFIX = "sum-prefix"
MODE_PRODUCT = "product"
MODES = (MODE_SUM_DIRECT, MODE_SUM_PREFIX, MODE_PRODUCT)

#: Exponent granularity of reported approximation exponents.
EXPONENT_GRANULARITY = Fraction(1, 10**6)


@dataclass(frozen=True)
class ApproxConfig:
    """Knobs of the tail machinery."""

    ratio_check_terms: int = 8     # exact lookahead pairs behind a ratio certificate
    initial_lookahead: int = 1     # starting K for width-driven enclosures
    max_extra_terms: int = 64      # hard cap of the K-doubling escalation
    root_bits_cap: int = 4096      # refinement cap for radical comparisons


DEFAULT_CONFIG = ApproxConfig()


@dataclass(frozen=True)
class SeriesSpec:
    """One family of m series sharing a denominator sequence.

    mode 'sum-direct' is sum c_{i,n}/b_n, 'sum-prefix' is
    sum c_{i,n}/(b_1...b_n), 'product' is prod (1 + c_{i,n}/b_n).
    ``require_coeff_le_denom`` switches on the product-pipeline hypothesis
    c_{i,n} <= b_n, verified on every materialized index.
    """

    mode: str
    coefficients: tuple[SequenceSpec, ...]
    denominators: SequenceSpec
    delta: Fraction = Fraction(0)
    epsilon: Optional[Fraction] = None
    require_coeff_le_denom: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("unknown series mode %r" % (self.mode,))
        if not self.coefficients:
            raise ValueError("need at least one coefficient sequence")

    @property
    def m(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class Convergent:
    """Exact order-N approximant p/q with q = b_1*...*b_N (not reduced)."""

    series_index: int
    order: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class ErrorReport:
    """Exact error bracket plus whichever analytic bounds certified."""

    series_index: int
    order: int
    exact_error: Enclosure
    geometric_bound: Optional[LogMag]
    power_bound: Optional[LogMag]
    product_bound: Optional[LogMag]
    measured_exponent: Optional[Fraction]


@dataclass(frozen=True)
class SubspaceInstance:
    """Lattice point (p_1..p_m, q) with linear-form values and their product.

    form_values[0] encloses |q|; form_values[i] encloses |q*beta_i - p_i|.
    ``delta_prime_max`` is the largest exponent (1e-6 granularity) with
    product <= height**(-delta_prime_max), or None when the product is
    exactly zero (every exponent works).
    """

    order: int
    point: tuple[int, ...]
    height: int
    form_values: tuple[Enclosure, ...]
    product: LogMag
    product_enclosure: Enclosure
    delta_prime_max: Optional[Fraction]


# ---------------------------------------------------------------------------
# Shared per-spec state: denominator prefix products and partial numerators.
# ---------------------------------------------------------------------------


class _SeriesContext:
    """Append-only caches for one SeriesSpec (single-writer, many readers).

    Term values (b_n, c_{i,n}) and convergent state (prefix products q_n,
    partial numerators p_{i,n}) are materialized separately: tail
    certification far beyond the largest convergent order must not pay
    for multi-megabit prefix products.
    """

    def __init__(self, spec: SeriesSpec):
        self.spec = spec
        self.b: list[int] = [0]          # b[n], 1-indexed
        self.q: list[int] = [1]          # prefix products, q[0] = 1
        self.c: list[list[int]] = [[0] for _ in spec.coefficients]
        self.p: list[list[int]] = [[0 if spec.mode != MODE_PRODUCT else 1]
                                   for _ in spec.coefficients]
        self._lock = threading.Lock()

    def ensure_terms(self, up_to: int) -> None:
        if up_to < len(self.b):
            return
        with self._lock:
            spec = self.spec
            for n in range(len(self.b), up_to + 1):
                bn = spec.denominators.value(n)
                if bn < 1:
                    raise ValueError("denominator b_%d = %d is not positive" % (n, bn))
                self.b.append(bn)
                for i, cs in enumerate(spec.coefficients):
                    cn = cs.value(n)
                    if spec.mode == MODE_PRODUCT:
                        if bn + cn <= 0:
                            raise ValueError(
                                "product factor 1 + c_%d/b_%d is not positive" % (n, n)
                            )
                        if spec.require_coeff_le_denom and cn > bn:
                            raise ValueError(
                                "product-pipeline hypothesis c_n <= b_n fails at n=%d" % n
                            )
                    self.c[i].append(cn)

    def ensure(self, up_to: int) -> None:
        self.ensure_terms(up_to)
        if up_to < len(self.q):
            return
        with self._lock:
            spec = self.spec
            for n in range(len(self.q), up_to + 1):
                bn = self.b[n]
                self.q.append(self.q[-1] * bn)
                for i in range(len(spec.coefficients)):
                    cn = self.c[i][n]
                    if spec.mode == MODE_SUM_DIRECT:
                        pn = self.p[i][-1] * bn + cn * self.q[n - 1]
                    elif spec.mode == MODE_SUM_PREFIX:
                        pn = self.p[i][-1] * bn + cn
                    else:
                        pn = self.p[i][-1] * (bn + cn)
                    self.p[i].append(pn)

    def term(self, i: int, n: int) -> Fraction:
        """Term magnitude driver: c/b, c/q, or the product increment c/b."""
        if self.spec.mode == MODE_SUM_PREFIX:
            self.ensure(n)
            return Fraction(self.c[i][n], self.q[n])
        self.ensure_terms(n)
        return Fraction(self.c[i][n], self.b[n])

    # -- factored views (no materialization of huge denominators) ----------

    def term_factors(self, i: int, n: int) -> Optional[list[Factor]]:
        """|term| as factor list, or None when the term is zero."""
        spec = self.spec
        cn = spec.coefficients[i].value(n)
        if cn == 0:
            return None
        fac: list[Factor] = [(abs(cn), Fraction(1))]
        if spec.mode == MODE_SUM_PREFIX:
            fac.extend((b, -e) for b, e in spec.denominators.prefix_factors(n))
        else:
            fac.extend((b, -e) for b, e in spec.denominators.value_factors(n))
        return fac

    def coeff(self, i: int, n: int) -> int:
        return self.spec.coefficients[i].value(n)


_CONTEXTS: dict[SeriesSpec, _SeriesContext] = {}


def _ctx(spec: SeriesSpec) -> _SeriesContext:
    ctx = _CONTEXTS.get(spec)
    if ctx is None:
        ctx = _CONTEXTS.setdefault(spec, _SeriesContext(spec))
    return ctx


def _check_index(spec: SeriesSpec, i: int) -> None:
    if not 1 <= i <= spec.m:
        raise ValueError("series index %d outside 1..%d" % (i, spec.m))


def convergent(spec: SeriesSpec, i: int, order: int) -> Convergent:
    """Exact convergent p/q of series i at the given order (N >= 1)."""
    _check_index(spec, i)
    if order < 1:
        raise ValueError("order must be >= 1")
    ctx = _ctx(spec)
    ctx.ensure(order)
    return Convergent(i, order, ctx.p[i - 1][order], ctx.q[order])


# ---------------------------------------------------------------------------
# Ratio certificates and tail enclosures.
# ---------------------------------------------------------------------------


def _dyadic_roundup_ratio(t_next: Fraction, t_prev: Fraction, bits: int = 64) -> Fraction:
    """|t_next/t_prev| rounded up to `bits` fractional bits.

    Keeps the certificate constant small even when the terms themselves
    have multi-megabit components; rounding up preserves soundness.
    """
    num = abs(t_next.numerator) * t_prev.denominator
    den = abs(t_prev.numerator) * t_next.denominator
    scaled = -((-num << bits) // den)
    return Fraction(scaled, 1 << bits)


def _ratio_certificate(ctx: _SeriesContext, i: int, start: int,
                       config: ApproxConfig) -> Optional[Fraction]:
    """Certify |t_{n+1}| <= r*|t_n| for n >= start; return r < 1 or None for
    an all-zero tail.  Raises RefusalError when no certificate is obtainable.

    r is the first observed ratio rounded up to 64 fractional bits;
    subsequent ratios are verified (in factored form) to be non-increasing,
    which both establishes dominance by r and rejects sub-geometric decay.
    """
    idx = i - 1
    try:
        f_prev = ctx.term_factors(idx, start)
        f_next = ctx.term_factors(idx, start + 1)
        if f_prev is None:
            for j in range(config.ratio_check_terms + 1):
                if ctx.term_factors(idx, start + j) is not None:
                    raise RefusalError(
                        "zero term at n=%d followed by nonzero terms; no ratio "
                        "certificate" % start
                    )
            return None  # terminated series: zero remainder
        if f_next is None:
            for j in range(1, config.ratio_check_terms + 1):
                if ctx.term_factors(idx, start + j) is not None:
                    raise RefusalError(
                        "zero term at n=%d followed by nonzero terms; no ratio "
                        "certificate" % (start + 1)
                    )
            return None
        t_prev = ctx.term(idx, start)
        t_next = ctx.term(idx, start + 1)
        r = _dyadic_roundup_ratio(t_next, t_prev)
        if r >= 1:
            raise RefusalError(
                "term ratio >= %s at n=%d; no geometric certificate" % (r, start)
            )
        prev_pair = (f_prev, f_next)
        for j in range(1, config.ratio_check_terms):
            f_a = ctx.term_factors(idx, start + j)
            f_b = ctx.term_factors(idx, start + j + 1)
            if f_b is None or f_a is None:
                raise RefusalError(
                    "zero term inside the ratio check window at n~%d" % (start + j)
                )
            # ratio_{j+1} <= ratio_j  <=>  t_{b}*t_{prev_a} <= t_{a}*t_{prev_b}
            lhs = f_b + prev_pair[0]
            rhs = f_a + prev_pair[1]
            if cmp_products(lhs, rhs) > 0:
                raise RefusalError(
                    "term ratios increase near n=%d (sub-geometric decay); "
                    "a fixed-ratio remainder would be unsound" % (start + j)
                )
            prev_pair = (f_a, f_b)
        return r
    except LookupError as exc:
        raise RefusalError("sequence undefined inside ratio window: %s" % exc) from exc


def _sum_tail_enclosure(ctx: _SeriesContext, i: int, order: int, lookahead: int,
                        config: ApproxConfig) -> Enclosure:
    """Signed bracket of sum_{n>order} t_n from exact terms + certified remainder."""
    idx = i - 1
    ctx.ensure_terms(order + lookahead + 1)
    partial = sum(
        (ctx.term(idx, n) for n in range(order + 1, order + lookahead + 1)),
        Fraction(0),
    )
    last = order + lookahead
    r = _ratio_certificate(ctx, i, last, config)
    if r is None:
        return Enclosure.point(partial)
    remainder = abs(ctx.term(idx, last)) * r / (1 - r)
    positive = ctx.spec.coefficients[idx].is_structurally_positive()
    lower = partial if positive else partial - remainder
    return Enclosure(lower, partial + remainder)


def _product_tail_enclosure(ctx: _SeriesContext, i: int, order: int, lookahead: int,
                            config: ApproxConfig) -> Enclosure:
    """Bracket of beta - beta_N for product mode."""
    idx = i - 1
    ctx.ensure(order)
    ctx.ensure_terms(order + lookahead + 1)
    beta_n = Fraction(ctx.p[idx][order], ctx.q[order])
    pk = Fraction(1)
    for n in range(order + 1, order + lookahead + 1):
        pk *= 1 + ctx.term(idx, n)
    last = order + lookahead
    r = _ratio_certificate(ctx, i, last, config)
    if r is None:
        s = Fraction(0)
    else:
        s = abs(ctx.term(idx, last)) * r / (1 - r)
    if s >= 1:
        raise RefusalError("remainder sum bound %s >= 1; raise the lookahead" % s)
    # prod_{n>last}(1+t) within [1 - s, 1/(1-s)] (exp(x) <= 1/(1-x))
    positive = ctx.spec.coefficients[idx].is_structurally_positive()
    factor_lo = pk if positive else pk * (1 - s)
    factor_hi = pk / (1 - s)
    return Enclosure(beta_n * (factor_lo - 1), beta_n * (factor_hi - 1))


def tail_enclosure(spec: SeriesSpec, i: int, order: int, lookahead: int,
                   config: ApproxConfig = DEFAULT_CONFIG) -> Enclosure:
    """Rigorous bracket of the tail beyond ``order`` (signed for sums).

    Exact terms order+1 .. order+lookahead are summed rationally; the rest
    is bounded through the ratio certificate, giving width at most
    |t_{order+lookahead}| * r/(1-r).  Refuses when no certificate holds.
    """
    _check_index(spec, i)
    if order < 0:
        raise ValueError("order must be >= 0")
    if lookahead < 1:
        raise ValueError("lookahead must be >= 1")
    ctx = _ctx(spec)
    if spec.mode == MODE_PRODUCT:
        if order < 1:
            raise ValueError("product tails start at order 1")
        return _product_tail_enclosure(ctx, i, order, lookahead, config)
    return _sum_tail_enclosure(ctx, i, order, lookahead, config)


def tail_enclosure_with_width(spec: SeriesSpec, i: int, order: int,
                              width_log2: int,
                              config: ApproxConfig = DEFAULT_CONFIG) -> Enclosure:
    """Tail bracket no wider than 2**(-width_log2), K-doubling up to the cap."""
    target = Fraction(1, 2**width_log2) if width_log2 >= 0 else Fraction(2 ** (-width_log2))
    lookahead = config.initial_lookahead
    last_exc: Optional[RefusalError] = None
    while lookahead <= config.max_extra_terms:
        try:
            enc = tail_enclosure(spec, i, order, lookahead, config)
        except RefusalError as exc:
            last_exc = exc
            enc = None
        if enc is not None and enc.width <= target:
            return enc
        lookahead *= 2
    if last_exc is not None:
        raise RefusalError(
            "no certificate up to %d extra terms: %s" % (config.max_extra_terms, last_exc)
        )
    raise RefusalError(
        "tail width target 2**-%d not met within %d extra terms; raise the cap"
        % (width_log2, config.max_extra_terms)
    )


def value_enclosure(spec: SeriesSpec, i: int, width_log2: int,
                    config: ApproxConfig = DEFAULT_CONFIG,
                    max_order: int = 32) -> Enclosure:
    """Bracket of the full series value beta_i, no wider than 2**-width_log2.

    Walks the order up until the certified tail meets the width target;
    rapidly converging families need only a handful of terms.
    """
    _check_index(spec, i)
    last_exc: Optional[RefusalError] = None
    for order in range(1, max_order + 1):
        try:
            tail = tail_enclosure_with_width(spec, i, order, width_log2, config)
        except RefusalError as exc:
            last_exc = exc
            continue
        cv = convergent(spec, i, order)
        return Enclosure(cv.value + tail.lower, cv.value + tail.upper)
    raise RefusalError(
        "no order up to %d certifies width 2**-%d: %s" % (max_order, width_log2, last_exc)
    )


def error_enclosure(spec: SeriesSpec, i: int, order: int, lookahead: int = 0,
                    config: ApproxConfig = DEFAULT_CONFIG) -> Enclosure:
    """Bracket of |beta_i - p/q| at the given order."""
    if lookahead:
        return tail_enclosure(spec, i, order, lookahead, config).abs()
    # auto: widen until the bracket is sign-definite or exhausted
    lookahead = config.initial_lookahead
    last: Optional[Enclosure] = None
    while lookahead <= config.max_extra_terms:
        enc = tail_enclosure(spec, i, order, lookahead, config)
        last = enc
        if enc.lower > 0 or enc.upper < 0 or enc.width == 0:
            return enc.abs()
        lookahead *= 2
    assert last is not None
    return last.abs()


# ---------------------------------------------------------------------------
# Analytic tail bounds (each returns a LogMag; *_value exposes the rational).
# ---------------------------------------------------------------------------


def geometric_tail_bound_value(spec: SeriesSpec, i: int, order: int, ratio_floor: Fraction,
                               config: ApproxConfig = DEFAULT_CONFIG) -> Fraction:
    """Rational form of the geometric bound (|c_{N+1}|/b_{N+1}) * A/(A-1)."""
    _check_index(spec, i)
    if spec.mode == MODE_PRODUCT:
        raise ValueError("geometric bound applies to sum modes")
    ratio_floor = Fraction(ratio_floor)
    if ratio_floor <= 1:
        raise ValueError("ratio floor A must be > 1")
    ctx = _ctx(spec)
    idx = i - 1
    denom = spec.denominators
    coeff = spec.coefficients[idx]
    try:
        for n in range(order, order + config.ratio_check_terms + 1):
            n_eff = max(n, 1)
            cn, cn1 = coeff.value(n_eff), coeff.value(n_eff + 1)
            if cn == 0 or cn1 == 0:
                raise RefusalError("zero coefficient at n=%d breaks the ratio floor" % n_eff)
            lhs: list[Factor] = [(abs(cn), Fraction(1))]
            lhs.extend(denom.value_factors(n_eff + 1))
            rhs: list[Factor] = [(ratio_floor, Fraction(1)), (abs(cn1), Fraction(1))]
            rhs.extend(denom.value_factors(n_eff))
            if cmp_products(lhs, rhs) < 0:
                raise RefusalError(
                    "cross ratio (b_{n+1}/b_n)(c_n/c_{n+1}) < %s at n=%d"
                    % (ratio_floor, n_eff)
                )
    except LookupError as exc:
        raise RefusalError("sequence undefined inside ratio window: %s" % exc) from exc
    first = abs(ctx.term(idx, order + 1))
    return first * ratio_floor / (ratio_floor - 1)


def geometric_tail_bound(spec: SeriesSpec, i: int, order: int, ratio_floor: Fraction,
                         config: ApproxConfig = DEFAULT_CONFIG) -> LogMag:
    return to_logmag(geometric_tail_bound_value(spec, i, order, ratio_floor, config))


def _rooted_step_holds(x_next: Fraction, x_prev: Fraction, root: int,
                       config: ApproxConfig) -> bool:
    return decide_root_gap(x_next, x_prev, root, 1, config.root_bits_cap)


def power_tail_bound_enclosure(spec: SeriesSpec, i: int, order: int, epsilon: Fraction,
                               config: ApproxConfig = DEFAULT_CONFIG) -> Enclosure:
    """Rational bracket of (1/eps) * (x - 1)**(-eps), x = (b_{N+1}/c_{N+1})**(1/(1+eps))."""
    _check_index(spec, i)
    if spec.mode == MODE_PRODUCT:
        raise ValueError("power bound applies to sum modes")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    one_plus = 1 + epsilon
    root = one_plus.numerator
    inner_pow = one_plus.denominator
    idx = i - 1
    denom = spec.denominators
    coeff = spec.coefficients[idx]

    def rooted_base(n: int) -> Fraction:
        cn = coeff.value(n)
        if cn == 0:
            raise RefusalError("zero coefficient at n=%d" % n)
        return (Fraction(denom.value(n), abs(cn))) ** inner_pow

    try:
        for n in range(max(order, 1), max(order, 1) + config.ratio_check_terms):
            if not _rooted_step_holds(rooted_base(n + 1), rooted_base(n), root, config):
                raise RefusalError(
                    "rooted step inequality fails at n=%d; power bound refuses" % n
                )
    except LookupError as exc:
        raise RefusalError("sequence undefined inside check window: %s" % exc) from exc

    x_base = rooted_base(order + 1)
    bits = 128
    while True:
        x_enc = nth_root_enclosure(x_base, root, bits)
        if x_enc.lower > 1:
            break
        if x_enc.upper <= 1:
            raise RefusalError("x = (b/c)**(1/(1+eps)) <= 1 at N+1; bound undefined")
        bits *= 2
        if bits > config.root_bits_cap:
            raise RefusalError("cannot separate x from 1; bound undefined")
    # (x-1)**(-eps) is decreasing in x: evaluate at the bracket ends
    d_lo, d_hi = x_enc.lower - 1, x_enc.upper - 1
    en, ed = epsilon.numerator, epsilon.denominator
    hi_root = nth_root_enclosure(d_lo**en, ed, 128)
    lo_root = nth_root_enclosure(d_hi**en, ed, 128)
    if hi_root.lower <= 0 or lo_root.lower <= 0:
        raise RefusalError("degenerate bracket for (x-1)**eps")
    return Enclosure(1 / (epsilon * lo_root.upper), 1 / (epsilon * hi_root.lower))


def power_tail_bound(spec: SeriesSpec, i: int, order: int, epsilon: Fraction,
                     config: ApproxConfig = DEFAULT_CONFIG) -> LogMag:
    # the reported bound is the bracket's upper end: >= the analytic bound
    return to_logmag(power_tail_bound_enclosure(spec, i, order, epsilon, config).upper)


def product_prefix_factor(spec: SeriesSpec, order: int, i: int = 1) -> Fraction:
    """prod_{n<=N} (1 + c_n/b_n), exact."""
    _check_index(spec, i)
    if spec.mode != MODE_PRODUCT:
        raise ValueError("prefix factor applies to product mode")
    ctx = _ctx(spec)
    ctx.ensure(order)
    return Fraction(ctx.p[i - 1][order], ctx.q[order])


def product_tail_bound_value(spec: SeriesSpec, i: int, order: int,
                             config: ApproxConfig = DEFAULT_CONFIG) -> Fraction:
    """Rational form of 3 * prod_{n<=N}(1+c_n/b_n) * (certified tail-sum upper)."""
    _check_index(spec, i)
    if spec.mode != MODE_PRODUCT:
        raise ValueError("product bound applies to product mode")
    ctx = _ctx(spec)
    idx = i - 1
    check_up_to = order + config.ratio_check_terms + 1
    ctx.ensure(order)
    ctx.ensure_terms(check_up_to)
    for n in range(1, check_up_to + 1):
        if ctx.c[idx][n] > ctx.b[n]:
            raise RefusalError(
                "product hypothesis c_n <= b_n fails at n=%d" % n
            )
        if ctx.c[idx][n] < 0:
            raise RefusalError("product bound needs nonnegative coefficients")
    sum_tail = _sum_tail_enclosure(ctx, i, order, config.initial_lookahead, config)
    if sum_tail.upper >= Fraction(1, 4):
        raise RefusalError(
            "tail sum bound %s >= 1/4; the linearization constants are not "
            "certified -- raise the order" % sum_tail.upper
        )
    prefix = Fraction(ctx.p[idx][order], ctx.q[order])
    return 3 * prefix * sum_tail.upper


def product_tail_bound(spec: SeriesSpec, i: int, order: int,
                       config: ApproxConfig = DEFAULT_CONFIG) -> LogMag:
    return to_logmag(product_tail_bound_value(spec, i, order, config))


# ---------------------------------------------------------------------------
# Measured approximation exponents and linear-form instances.
# ---------------------------------------------------------------------------


def quantize_exponent(value: Fraction, round_down: bool = False) -> Fraction:
    steps = value / EXPONENT_GRANULARITY
    if round_down:
        return Fraction(math.floor(steps)) * EXPONENT_GRANULARITY
    return Fraction(round(steps)) * EXPONENT_GRANULARITY


def exponent_from_error(error_upper: Fraction, q: int) -> Fraction:
    """delta with error = q**-(1+delta), from the conservative upper error."""
    if error_upper <= 0:
        raise ValueError("error must be positive")
    if q < 2:
        raise ValueError("q must be >= 2")
    lg_err = to_logmag(error_upper)
    lg_q = to_logmag(q)
    return quantize_exponent(Fraction(-lg_err.fp, lg_q.fp) - 1)


def measured_exponent(spec: SeriesSpec, i: int, order: int,
                      config: ApproxConfig = DEFAULT_CONFIG) -> Fraction:
    """Largest delta_N (1e-6 granularity) with |beta - p/q| < q**-(1+delta_N).

    Conservative: computed from the upper end of the error bracket, so the
    reported exponent is certified achievable.
    """
    err = error_enclosure(spec, i, order, config=config)
    if err.upper == 0:
        raise ValueError("exact error is zero; the exponent is unbounded")
    if err.lower <= 0 < err.upper:
        raise RefusalError(
            "error bracket still straddles zero at the lookahead cap; "
            "escalate precision"
        )
    ctx = _ctx(spec)
    ctx.ensure(order)
    return exponent_from_error(err.upper, ctx.q[order])


def build_subspace_instance(spec: SeriesSpec, order: int, precision: int = 4,
                            config: ApproxConfig = DEFAULT_CONFIG) -> SubspaceInstance:
    """Assemble the order-N lattice point with certified form values.

    ``precision``: required decimal agreement of the admissible exponent
    between the two product bracket ends; tails are refined (K doubling)
    until it is met, else the builder refuses with an escalation hint.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    ctx = _ctx(spec)
    ctx.ensure(order)
    q = ctx.q[order]
    point = tuple(ctx.p[i][order] for i in range(spec.m)) + (q,)
    height = max(abs(x) for x in point)

    lookahead = config.initial_lookahead
    tol = Fraction(1, 10**precision)
    while True:
        tails = [tail_enclosure(spec, i, order, lookahead, config).abs()
                 for i in range(1, spec.m + 1)]
        forms = [Enclosure.point(q)] + [t.scaled(q) for t in tails]
        prod = Enclosure.point(Fraction(q))
        for f in forms[1:]:
            prod = prod.mul(f)
        if prod.upper == 0:
            product_lm = LogMag(0)
            delta_max = None
            break
        if prod.lower > 0:
            lg_h = to_logmag(height)
            d_hi = Fraction(-to_logmag(prod.lower).fp, lg_h.fp)
            d_lo = Fraction(-to_logmag(prod.upper).fp, lg_h.fp)
            if d_hi - d_lo <= tol:
                product_lm = to_logmag(prod.upper)
                delta_max = quantize_exponent(d_lo, round_down=True)
                # certify product <= H**(-delta_max) exactly
                while delta_max is not None and cmp_products(
                    [(prod.upper, Fraction(1))], [(height, -delta_max)]
                ) > 0:
                    delta_max -= EXPONENT_GRANULARITY
                break
        lookahead *= 2
        if lookahead > config.max_extra_terms:
            raise RefusalError(
                "product bracket too wide for %d-digit exponent at order %d; "
                "raise the lookahead cap" % (precision, order)
            )
    return SubspaceInstance(
        order=order,
        point=point,
        height=height,
        form_values=tuple(forms),
        product=product_lm,
        product_enclosure=prod,
        delta_prime_max=delta_max,
    )


def verify_forms_inequality(instance: SubspaceInstance, delta_prime: Fraction) -> bool:
    """Certified decision of product <= height**(-delta_prime)."""
    delta_prime = Fraction(delta_prime)
    if delta_prime <= 0:
        raise ValueError("exponent must be positive")
    prod = instance.product_enclosure
    if prod.upper == 0:
        return True
    rhs: list[Factor] = [(instance.height, -delta_prime)]
    if cmp_products([(prod.upper, Fraction(1))], rhs) <= 0:
        return True
    if prod.lower > 0 and cmp_products([(prod.lower, Fraction(1))], rhs) > 0:
        return False
    raise RefusalError(
        "form product bracket straddles height**(-delta'); refine the instance"
    )


def error_report(spec: SeriesSpec, i: int, order: int,
                 config: ApproxConfig = DEFAULT_CONFIG) -> ErrorReport:
    """Exact error plus every analytic bound whose preconditions certify."""
    exact = error_enclosure(spec, i, order, config=config)

    def try_bound(fn, *args):
        try:
            return fn(spec, i, order, *args)
        except (RefusalError, ValueError):
            return None

    geometric = try_bound(geometric_tail_bound, Fraction(2)) if spec.mode != MODE_PRODUCT else None
    power = (try_bound(power_tail_bound, spec.epsilon)
             if spec.mode != MODE_PRODUCT and spec.epsilon else None)
    product = try_bound(product_tail_bound) if spec.mode == MODE_PRODUCT else None
    try:
        exponent = measured_exponent(spec, i, order, config)
    except (RefusalError, ValueError):
        exponent = None
    return ErrorReport(i, order, exact, geometric, power, product, exponent)
