"""Exact and log-scale arithmetic substrate.

Everything downstream (hypothesis checks, tail bounds, relation search)
reduces inequality decisions to one of two routes:

* a fast log-domain route on ``LogMag`` values (sign + fixed-point log2 of
  the magnitude), used when the operands are astronomically large or small
  and the margin is far from zero, and
* exact rational arithmetic, used to settle every comparison that lands
  inside the log-domain tolerance band.

No verdict anywhere in the package is allowed to rest on rounding: the
log route only decides a comparison when the certified error budget is
strictly smaller than the observed gap, and ``cmp_products`` escalates to
exact integer arithmetic otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2

#: Exact arbitrary-precision rational; the only number type whose
#: arithmetic is trusted without an error budget.
BigRational = Fraction

#: Fixed-point fractional bits of the log2 representation.
FRAC_BITS = 64
_SCALE = 1 << FRAC_BITS

#: Guaranteed absolute accuracy of a stored log2 magnitude.
LOG2_TOLERANCE = Fraction(1, 1 << 40)
#: Same tolerance in fixed-point units (2**-40 * 2**64).
_TOL_FP = 1 << (FRAC_BITS - 40)

#: Per-integer-log worst case of the construction below, in fixed-point
#: units; well inside LOG2_TOLERANCE (kept separate so comparison budgets
#: are not needlessly slack).
_INT_LOG_ERR_FP = 1 << (FRAC_BITS - 49)

#: Hard cap (in bits) on integers materialized during exact escalation.
ESCALATION_BIT_CAP = 1 << 29

RationalLike = Union[int, Fraction]


class RefusalError(Exception):
    """Raised when an operation cannot certify its result.

    Carries a human-readable hint (usually: raise the lookahead, the
    precision target, or the escalation cap). A refusal is an honest
    "cannot decide", never a wrong answer.
    """


def _log2_fixed_int(n: int) -> int:
    """Fixed-point log2 of a positive integer; exact for powers of two."""
    if n <= 0:
        raise ValueError("log2 needs a positive integer")
    k = n.bit_length() - 1
    if n & (n - 1) == 0:
        return k << FRAC_BITS
    # 64-bit mantissa window; truncation error < 2**-62, float error < 2**-51.
    shift = k - 63
    m = n >> shift if shift > 0 else n << (-shift)
    frac = math.log2(m * 2.0**-63)
    return ((shift + 63) << FRAC_BITS) + round(frac * _SCALE)


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class LogMag:
    """Sign plus fixed-point log2-magnitude surrogate of a real number.

    ``sign`` is -1, 0 or +1.  ``fp`` stores log2(|value|) scaled by 2**64
    and is meaningless when ``sign == 0``.  Guaranteed accuracy when built
    from a nonzero rational: |fp/2**64 - log2|value|| <= 2**-40.
    """

    sign: int
    fp: int = 0

    @property
    def log2mag(self) -> float:
        """log2 of the absolute value, as a float (display only)."""
        if self.sign == 0:
            raise ValueError("log2mag undefined for zero")
        return self.fp / _SCALE

    def is_zero(self) -> bool:
        return self.sign == 0

    def serialize(self) -> dict:
        if self.sign == 0:
            return {"sign": 0}
        return {"sign": self.sign, "log2mag": f"{self.fp / _SCALE:.6f}"}

    def __mul__(self, other: "LogMag") -> "LogMag":
        if self.sign == 0 or other.sign == 0:
            return LogMag(0)
        return LogMag(self.sign * other.sign, self.fp + other.fp)

    def __truediv__(self, other: "LogMag") -> "LogMag":
        if other.sign == 0:
            raise ZeroDivisionError("division by zero LogMag")
        if self.sign == 0:
            return LogMag(0)
        return LogMag(self.sign * other.sign, self.fp - other.fp)


LOGMAG_ZERO = LogMag(0)
LOGMAG_ONE = LogMag(1, 0)


def to_logmag(r: RationalLike) -> LogMag:
    """Log-magnitude form of a rational; exact for powers of two."""
    r = Fraction(r)
    if r == 0:
        return LOGMAG_ZERO
    num, den = abs(r.numerator), r.denominator
    sign = 1 if r > 0 else -1
    return LogMag(sign, _log2_fixed_int(num) - _log2_fixed_int(den))


def scale_logmag(a: LogMag, e: RationalLike) -> LogMag:
    """Raise a positive magnitude to the exponent ``e`` in log domain.

    The stored log scales exactly by the rational ``e`` up to one
    fixed-point rounding; input error scales by |e|, which the comparison
    budget in :func:`cmp_products` accounts for.
    """
    if a.sign != 1:
        raise ValueError("log-domain exponentiation needs a positive base")
    e = Fraction(e)
    if e == 0:
        return LOGMAG_ONE
    scaled = a.fp * e
    return LogMag(1, round(scaled) if isinstance(scaled, Fraction) else scaled)


def cmp_logmag(a: LogMag, b: LogMag) -> str:
    """Compare two log-magnitude values: 'less'/'greater'/'equal'/'uncertain'.

    Returns 'uncertain' exactly when the signs agree and the stored logs
    sit within twice the guaranteed tolerance of each other; callers must
    escalate 'uncertain' to exact rational comparison.
    """
    if a.sign != b.sign:
        return "less" if a.sign < b.sign else "greater"
    if a.sign == 0:
        return "equal"
    diff = a.fp - b.fp
    if abs(diff) <= 2 * _TOL_FP:
        return "uncertain"
    magnitude_greater = diff > 0
    # For negative values a larger magnitude means a smaller number.
    if a.sign < 0:
        magnitude_greater = not magnitude_greater
    return "greater" if magnitude_greater else "less"


# ---------------------------------------------------------------------------
# Products of rational powers: the universal inequality decision device.
# ---------------------------------------------------------------------------

#: A factor (base, exponent): base a positive rational, exponent rational.
Factor = tuple[RationalLike, RationalLike]


def _norm_factors(factors: Iterable[Factor]) -> list[tuple[Fraction, Fraction]]:
    out = []
    for base, exp in factors:
        base = Fraction(base)
        exp = Fraction(exp)
        if base <= 0:
            raise ValueError("product factors need positive bases")
        if exp == 0 or base == 1:
            continue
        out.append((base, exp))
    return out


def logmag_of_factors(factors: Iterable[Factor]) -> LogMag:
    """LogMag of a product of rational powers, without materializing it."""
    fp = 0
    for base, exp in _norm_factors(factors):
        term = (_log2_fixed_int(base.numerator) - _log2_fixed_int(base.denominator)) * exp
        fp += round(term) if isinstance(term, Fraction) else term
    return LogMag(1, fp)


def _dyadic_log2(base: Fraction) -> Fraction | None:
    """Exact log2 of a rational whose numerator and denominator are powers of 2."""
    if _is_pow2(base.numerator) and _is_pow2(base.denominator):
        return Fraction(base.numerator.bit_length() - base.denominator.bit_length())
    return None


def _cmp_products_exact(factors: list[tuple[Fraction, Fraction]]) -> int:
    """Exact sign of log(prod base^exp) by integer arithmetic."""
    # Merge per base after splitting off powers of two.
    two_exp = Fraction(0)
    odd: dict[int, Fraction] = {}
    for base, exp in factors:
        for part, e in ((base.numerator, exp), (base.denominator, -exp)):
            k = (part & -part).bit_length() - 1
            two_exp += k * e
            rest = part >> k
            if rest != 1:
                odd[rest] = odd.get(rest, Fraction(0)) + e
    odd = {b: e for b, e in odd.items() if e != 0}
    if not odd:
        return (two_exp > 0) - (two_exp < 0)
    denom = two_exp.denominator
    for e in odd.values():
        denom = denom * e.denominator // math.gcd(denom, e.denominator)
    est_bits = abs(two_exp * denom)
    for b, e in odd.items():
        est_bits += abs(e * denom) * b.bit_length()
    if est_bits > ESCALATION_BIT_CAP:
        raise RefusalError(
            "exact comparison would need %d-bit integers; raise the cap or "
            "reformulate the comparison" % int(est_bits)
        )
    lhs, rhs = 1, 1
    k = two_exp * denom
    if k > 0:
        lhs <<= int(k)
    elif k < 0:
        rhs <<= int(-k)
    for b, e in odd.items():
        ei = int(e * denom)
        if ei > 0:
            lhs *= b**ei
        else:
            rhs *= b ** (-ei)
    return (lhs > rhs) - (lhs < rhs)


def cmp_products(lhs: Iterable[Factor], rhs: Iterable[Factor]) -> int:
    """Exact three-way comparison of two products of rational powers.

    Tries, in order: exact dyadic exponent arithmetic (all bases powers of
    two), the budgeted log-domain route, and finally exact integer
    escalation.  The result is always certified: -1, 0 or +1.
    """
    fl = _norm_factors(lhs)
    fr = _norm_factors(rhs)
    combined = fl + [(b, -e) for b, e in fr]

    exact_log = Fraction(0)
    all_dyadic = True
    for base, exp in combined:
        d = _dyadic_log2(base)
        if d is None:
            all_dyadic = False
            break
        exact_log += d * exp
    if all_dyadic:
        return (exact_log > 0) - (exact_log < 0)

    fp = 0
    budget = len(combined) + 2
    for base, exp in combined:
        term = (_log2_fixed_int(base.numerator) - _log2_fixed_int(base.denominator)) * exp
        fp += round(term) if isinstance(term, Fraction) else term
        budget += math.ceil(abs(exp) * _INT_LOG_ERR_FP) + 1
    if abs(fp) > 2 * budget:
        return 1 if fp > 0 else -1
    return _cmp_products_exact(combined)


# ---------------------------------------------------------------------------
# Rational enclosures.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval certified to contain a real value."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("enclosure endpoints out of order")

    @classmethod
    def point(cls, value: RationalLike) -> "Enclosure":
        v = Fraction(value)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, value: RationalLike) -> bool:
        return self.lower <= value <= self.upper

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def __add__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lower + other.lower, self.upper + other.upper)

    def scaled(self, k: RationalLike) -> "Enclosure":
        k = Fraction(k)
        if k >= 0:
            return Enclosure(self.lower * k, self.upper * k)
        return Enclosure(self.upper * k, self.lower * k)

    def abs(self) -> "Enclosure":
        if self.lower >= 0:
            return self
        if self.upper <= 0:
            return Enclosure(-self.upper, -self.lower)
        return Enclosure(Fraction(0), max(-self.lower, self.upper))

    def mul(self, other: "Enclosure") -> "Enclosure":
        products = [
            self.lower * other.lower,
            self.lower * other.upper,
            self.upper * other.lower,
            self.upper * other.upper,
        ]
        return Enclosure(min(products), max(products))


def enclose_sum(terms: Sequence[RationalLike], remainder_bound: RationalLike) -> Enclosure:
    """Bracket a series with nonnegative remainder: [sum, sum + bound]."""
    remainder_bound = Fraction(remainder_bound)
    if remainder_bound < 0:
        raise ValueError("remainder bound must be nonnegative")
    total = sum((Fraction(t) for t in terms), Fraction(0))
    return Enclosure(total, total + remainder_bound)


# ---------------------------------------------------------------------------
# Integer k-th roots and radical inequality decisions.
# ---------------------------------------------------------------------------


def nth_root_enclosure(x: RationalLike, k: int, bits: int = 64) -> Enclosure:
    """Rational bracket of x**(1/k) with width <= 2**-bits; exact when possible."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("even real roots of negatives are not defined here")
    if k < 1:
        raise ValueError("root order must be >= 1")
    if x == 0:
        return Enclosure.point(0)
    if k == 1:
        return Enclosure.point(x)
    num, den = x.numerator, x.denominator
    m = num * den ** (k - 1)
    root, exact = gmpy2.iroot(gmpy2.mpz(m << (k * bits)), k)
    root = int(root)
    scale = den << bits
    if exact:
        return Enclosure.point(Fraction(root, scale))
    return Enclosure(Fraction(root, scale), Fraction(root + 1, scale))


def exact_nth_root(x: RationalLike, k: int) -> Fraction | None:
    """The rational k-th root of x, or None when x is not a perfect power."""
    x = Fraction(x)
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    rn, en = gmpy2.iroot(gmpy2.mpz(x.numerator), k)
    if not en:
        return None
    rd, ed = gmpy2.iroot(gmpy2.mpz(x.denominator), k)
    if not ed:
        return None
    return Fraction(int(rn), int(rd))


def decide_root_gap(x: RationalLike, y: RationalLike, k: int, gap: RationalLike = 1,
                    max_bits: int = 4096) -> bool:
    """Decide x**(1/k) >= y**(1/k) + gap exactly (x, y, gap rational, >= 0).

    Perfect k-th powers are settled by rational arithmetic; otherwise the
    root brackets are refined until the comparison separates.  A tie
    between irrational sides cannot occur (it would force both roots
    rational), so refinement terminates; a residual tie at ``max_bits``
    raises :class:`RefusalError`.
    """
    x, y, gap = Fraction(x), Fraction(y), Fraction(gap)
    rx = exact_nth_root(x, k)
    ry = exact_nth_root(y, k)
    if rx is not None and ry is not None:
        return rx >= ry + gap
    bits = 64
    while bits <= max_bits:
        bx = Enclosure.point(rx) if rx is not None else nth_root_enclosure(x, k, bits)
        by = Enclosure.point(ry) if ry is not None else nth_root_enclosure(y, k, bits)
        if bx.lower >= by.upper + gap:
            return True
        if bx.upper < by.lower + gap:
            return False
        bits *= 2
    raise RefusalError(
        "root comparison undecided at %d bits; raise max_bits" % max_bits
    )


def log2_enclosure(x: RationalLike, bits: int = 64) -> Enclosure:
    """Rational bracket of log2(x) for x > 0, width <= 2**-bits + 2**-bits.

    Uses the identity log2(x) = k + log2(m) with m in [1, 2) and a
    bisection-free dyadic expansion of log2(m): repeated squaring emits
    one bit of the fractional part per step.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 needs a positive value")
    k = 0
    while x >= 2:
        x /= 2
        k += 1
    while x < 1:
        x *= 2
        k -= 1
    # x in [1, 2): extract `bits` fractional bits by squaring.
    frac = Fraction(0)
    step = Fraction(1, 2)
    # Bound the operand size: re-round x to ~4*bits bits each iteration.
    for _ in range(bits):
        x = x * x
        if x >= 2:
            frac += step
            x /= 2
        step /= 2
        limit = 1 << (4 * bits)
        if x.denominator > limit:
            num = x.numerator * limit // x.denominator
            x = Fraction(num, limit)  # floor-rounding keeps a valid lower bound
    lo = k + frac
    return Enclosure(lo, lo + Fraction(1, 1 << (bits - 1)))
