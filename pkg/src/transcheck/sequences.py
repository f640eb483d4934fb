"""Coefficient and denominator sequence families.

Sequences are described declaratively by :class:`SequenceSpec` so that the
rest of the package can evaluate them pointwise, sieve them in bulk, or --
crucially for the doubly-exponential denominator families -- reason about
them in factored ``base**exponent`` form without materializing integers
with millions of digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

KINDS = (
    "constant",
    "divisor-count",
    "sigma",
    "totient",
    "polynomial",
    "power",
    "table",
    "prefix-square-recurrence",
)

_ARITHMETIC_KINDS = ("divisor-count", "sigma", "totient")


def _factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division (adequate for n <= 1e7)."""
    fs = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            fs.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        fs.append((n, 1))
    return fs


def _require_positive_index(n: int) -> None:
    if n < 1:
        raise ValueError("sequence index must be >= 1, got %r" % (n,))


def divisor_count(n: int) -> int:
    """d(n): number of positive divisors."""
    _require_positive_index(n)
    out = 1
    for _, e in _factorize(n):
        out *= e + 1
    return out


def sigma(n: int) -> int:
    """sigma(n): sum of positive divisors."""
    _require_positive_index(n)
    out = 1
    for p, e in _factorize(n):
        out *= (p ** (e + 1) - 1) // (p - 1)
    return out


def totient(n: int) -> int:
    """phi(n): count of 1 <= k <= n coprime to n."""
    _require_positive_index(n)
    out = n
    for p, _ in _factorize(n):
        out -= out // p
    return out


@dataclass(frozen=True)
class SequenceWindow:
    """Consecutive sequence values starting at index ``start``."""

    start: int
    values: tuple[int, ...]

    def value_at(self, n: int) -> int:
        if not self.start <= n < self.start + len(self.values):
            raise LookupError("index %d outside window" % n)
        return self.values[n - self.start]

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def sieve_window(kind: str, n_max: int) -> SequenceWindow:
    """Sieve d / sigma / phi over 1..n_max in one pass."""
    if kind not in _ARITHMETIC_KINDS:
        raise ValueError("sieve_window supports %s, got %r" % (_ARITHMETIC_KINDS, kind))
    _require_positive_index(n_max)
    if kind == "totient":
        phi = list(range(n_max + 1))
        for p in range(2, n_max + 1):
            if phi[p] == p:  # p prime
                for m in range(p, n_max + 1, p):
                    phi[m] -= phi[m] // p
        return SequenceWindow(1, tuple(phi[1:]))
    acc = [0] * (n_max + 1)
    inc_is_divisor = kind == "sigma"
    for d in range(1, n_max + 1):
        step = d if inc_is_divisor else 1
        for m in range(d, n_max + 1, d):
            acc[m] += step
    return SequenceWindow(1, tuple(acc[1:]))


@dataclass(frozen=True)
class SequenceSpec:
    """Declarative description of one integer sequence.

    ``offset`` realigns the sequence: entry n evaluates the underlying
    family at index n + offset - 1, so offset 1 is the identity.  This is
    how "for all sufficiently large n" hypotheses get truncated families.
    """

    kind: str
    value_param: int = 0
    coeffs: tuple[int, ...] = ()
    base: int = 0
    table_values: tuple[int, ...] = ()
    seed: int = 0
    offset: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown sequence kind %r" % (self.kind,))
        if self.offset < 1:
            raise ValueError("offset must be a positive integer")

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, k: int, offset: int = 1) -> "SequenceSpec":
        return cls(kind="constant", value_param=k, offset=offset)

    @classmethod
    def divisor_count(cls, offset: int = 1) -> "SequenceSpec":
        return cls(kind="divisor-count", offset=offset)

    @classmethod
    def sigma(cls, offset: int = 1) -> "SequenceSpec":
        return cls(kind="sigma", offset=offset)

    @classmethod
    def totient(cls, offset: int = 1) -> "SequenceSpec":
        return cls(kind="totient", offset=offset)

    @classmethod
    def polynomial(cls, *coeffs: int, offset: int = 1) -> "SequenceSpec":
        """Polynomial in the index: coeffs[j] multiplies n**j."""
        return cls(kind="polynomial", coeffs=tuple(coeffs), offset=offset)

    @classmethod
    def power(cls, base: int, offset: int = 1) -> "SequenceSpec":
        """Pure geometric family base**n."""
        if base < 1:
            raise ValueError("power base must be >= 1")
        return cls(kind="power", base=base, offset=offset)

    @classmethod
    def table(cls, values, offset: int = 1) -> "SequenceSpec":
        vals = tuple(int(v) for v in values)
        if not vals:
            raise ValueError("table must not be empty")
        return cls(kind="table", table_values=vals, offset=offset)

    @classmethod
    def prefix_square(cls, seed: int = 2, offset: int = 1) -> "SequenceSpec":
        """b_1 = seed, b_{n+1} = (b_1*...*b_n)**2 from n = 1 on."""
        if seed < 1:
            raise ValueError("seed must be >= 1")
        return cls(kind="prefix-square-recurrence", seed=seed, offset=offset)

    # -- evaluation --------------------------------------------------------

    def value(self, n: int) -> int:
        """Exact value at index n >= 1 (may be a huge integer)."""
        _require_positive_index(n)
        idx = n + self.offset - 1
        kind = self.kind
        if kind == "constant":
            return self.value_param
        if kind == "divisor-count":
            return divisor_count(idx)
        if kind == "sigma":
            return sigma(idx)
        if kind == "totient":
            return totient(idx)
        if kind == "polynomial":
            return sum(c * idx**j for j, c in enumerate(self.coeffs))
        if kind == "power":
            return self.base**idx
        if kind == "table":
            if idx > len(self.table_values):
                raise LookupError(
                    "table of length %d has no entry %d" % (len(self.table_values), idx)
                )
            return self.table_values[idx - 1]
        # prefix-square-recurrence
        if idx == 1:
            return self.seed
        return self.seed ** self.prefix_square_exponent(idx)

    def prefix_square_exponent(self, idx: int) -> int:
        """Exponent of the seed at index idx: 1, then 2*3**(idx-2)."""
        return 1 if idx == 1 else 2 * 3 ** (idx - 2)

    def value_factors(self, n: int) -> list[tuple[int, Fraction]]:
        """Value at n as [(base, exponent)] without materializing it."""
        idx = n + self.offset - 1
        if self.kind == "power":
            return [(self.base, Fraction(idx))] if self.base != 1 else []
        if self.kind == "prefix-square-recurrence":
            if self.seed == 1:
                return []
            return [(self.seed, Fraction(self.prefix_square_exponent(idx)))]
        v = self.value(n)
        if v == 0:
            raise ValueError("zero value has no factored form")
        return [(abs(v), Fraction(1))]

    def prefix_factors(self, n: int) -> list[tuple[int, Fraction]]:
        """Factored form of value(1)*...*value(n)."""
        _require_positive_index(n)
        if self.kind == "power":
            first, last = 1 + self.offset - 1, n + self.offset - 1
            total = (first + last) * n // 2
            return [(self.base, Fraction(total))] if self.base != 1 else []
        if self.kind == "prefix-square-recurrence":
            if self.seed == 1:
                return []
            total = sum(self.prefix_square_exponent(k + self.offset - 1) for k in range(1, n + 1))
            return [(self.seed, Fraction(total))]
        out = []
        for k in range(1, n + 1):
            out.extend(self.value_factors(k))
        return out

    def is_structurally_positive(self) -> bool:
        """True when every entry is provably >= 1 without evaluation."""
        kind = self.kind
        if kind in _ARITHMETIC_KINDS:
            return True
        if kind == "constant":
            return self.value_param >= 1
        if kind in ("power", "prefix-square-recurrence"):
            return True  # bases/seeds are validated >= 1
        if kind == "polynomial":
            return bool(self.coeffs) and all(c >= 0 for c in self.coeffs) and any(
                c > 0 for c in self.coeffs
            )
        if kind == "table":
            return all(v >= 1 for v in self.table_values)
        return False


def prefix_square_denominators(n_max: int, seed: int = 2) -> SequenceWindow:
    """Materialize the doubly-exponential recurrence b_1=seed, b_{n+1}=(b_1..b_n)**2."""
    _require_positive_index(n_max)
    values = [seed]
    prefix = seed
    for _ in range(1, n_max):
        nxt = prefix * prefix
        values.append(nxt)
        prefix *= nxt
    return SequenceWindow(1, tuple(values))
