"""Integer-relation search and refutation among (1, beta_1, ..., beta_m).

A numerical search can never certify a relation among irrational values,
so candidate status is a strict four-step ladder:

* ``exact``                   -- all inputs are rational (width-0 brackets)
                                 and the residual is identically zero;
* ``confirmed-on-convergents``-- the integer identity z_0 q_N + sum z_i p_{i,N} = 0
                                 holds exactly at two or more orders, with
                                 no failure after the first success;
* ``numerically-plausible``   -- the residual bracket contains zero; the
                                 strongest label a search alone can award;
* ``refuted``                 -- the residual bracket excludes zero, or the
                                 elimination argument kills the candidate.

Enumeration order is fixed (sup-norm, then lexicographic) and vectors are
reported with their first nonzero coordinate positive, so results are
reproducible byte for byte.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .approx import MODE_SUM_DIRECT, SeriesSpec, convergent
from .exactcore import Enclosure, RefusalError
from .sequences import SequenceSpec, divisor_count

STATUS_EXACT = "exact"
STATUS_CONFIRMED = "confirmed-on-convergents"
STATUS_PLAUSIBLE = "numerically-plausible"
STATUS_REFUTED = "refuted"


@dataclass(frozen=True)
class SearchConfig:
    """Bounds of a relation search.

    ``lll_delta`` is the reduction quality parameter of the lattice
    method; the lattice itself is scaled by 2**precision_bits.
    """

    coefficient_bound: int
    precision_bits: int = 128
    method: str = "exhaustive"  # or "lattice"
    lll_delta: Fraction = Fraction(3, 4)

    def __post_init__(self):
        if self.coefficient_bound < 1:
            raise ValueError("coefficient bound must be >= 1")
        if self.method not in ("exhaustive", "lattice"):
            raise ValueError("unknown search method %r" % (self.method,))
        if not Fraction(1, 4) < self.lll_delta < 1:
            raise ValueError("reduction quality must lie in (1/4, 1)")


@dataclass(frozen=True)
class RelationCandidate:
    z: tuple[int, ...]
    residual: Enclosure
    status: str

    def to_record(self) -> dict:
        return {"z": list(self.z), "status": self.status, "residual": self.residual}


def _canonical(z: Sequence[int]) -> tuple[int, ...]:
    for v in z:
        if v != 0:
            return tuple(z) if v > 0 else tuple(-w for w in z)
    raise ValueError("the zero vector is not a relation candidate")


def _residual(values: Sequence[Enclosure], z: Sequence[int]) -> Enclosure:
    acc = Enclosure.point(0)
    for enc, coeff in zip(values, z):
        if coeff:
            acc = acc + enc.scaled(coeff)
    return acc


def _status_from_residual(values: Sequence[Enclosure], residual: Enclosure) -> str:
    if all(v.width == 0 for v in values) and residual.lower == residual.upper == 0:
        return STATUS_EXACT
    return STATUS_PLAUSIBLE


def find_relations(values: Sequence[Enclosure], config: SearchConfig) -> list[RelationCandidate]:
    """Candidates z (sup-norm <= bound) whose residual bracket contains zero.

    ``values`` are brackets of (1, beta_1, ..., beta_m) in that order.
    Candidates are canonical representatives (first nonzero coordinate
    positive); multiples are enumerated too, keeping completeness at the
    bound for exact-rational inputs.  The lattice method proposes short
    vectors from a scaled integer lattice; every proposal is re-verified
    through the residual bracket, so it never adds anything the exhaustive
    method would reject.
    """
    if len(values) < 2:
        raise ValueError("need the constant 1 plus at least one series value")
    target = Fraction(1, 2**config.precision_bits)
    for k, v in enumerate(values):
        if v.width > target:
            raise RefusalError(
                "input bracket %d has width %s > 2**-%d; recompute the values "
                "at the requested precision" % (k, v.width, config.precision_bits)
            )
    if config.method == "exhaustive":
        candidates = _exhaustive(values, config)
    else:
        candidates = _lattice(values, config)
    return sorted(candidates, key=lambda c: (max(map(abs, c.z)), c.z))


def _exhaustive(values, config) -> list[RelationCandidate]:
    bound = config.coefficient_bound
    dim = len(values)
    # integer endpoints over a common denominator: the inner loop is pure
    # integer arithmetic (tens of thousands of candidates at bound 20)
    denom = 1
    for v in values:
        for end in (v.lower, v.upper):
            denom = denom * end.denominator // math.gcd(denom, end.denominator)
    lows = [int(v.lower * denom) for v in values]
    highs = [int(v.upper * denom) for v in values]
    out = []
    for z in itertools.product(range(0, bound + 1), *([range(-bound, bound + 1)] * (dim - 1))):
        # canonical representatives only: first nonzero coordinate positive
        first = next((v for v in z if v != 0), 0)
        if first == 0:
            continue  # zero vector
        if first < 0:
            continue  # the negated twin is enumerated instead
        lo = hi = 0
        for coeff, a, b in zip(z, lows, highs):
            if coeff > 0:
                lo += coeff * a
                hi += coeff * b
            elif coeff < 0:
                lo += coeff * b
                hi += coeff * a
        if lo <= 0 <= hi:
            cz = _canonical(z)
            residual = _residual(values, cz)
            out.append(RelationCandidate(cz, residual, _status_from_residual(values, residual)))
    return out


def _gram(u: list[Fraction], v: list[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook Lenstra-Lenstra-Lovasz reduction in exact rationals."""
    b = [[Fraction(x) for x in row] for row in basis]
    n = len(b)

    def gram_schmidt():
        star: list[list[Fraction]] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        norms: list[Fraction] = []
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                mu[i][j] = _gram(b[i], star[j]) / norms[j]
                v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
            star.append(v)
            norms.append(_gram(v, v))
        return mu, norms

    mu, norms = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > Fraction(1, 2):
                q = round(mu[k][j])
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                mu, norms = gram_schmidt()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return [[int(x) for x in row] for row in b]


def _lattice(values, config) -> list[RelationCandidate]:
    dim = len(values)
    scale = 2**config.precision_bits
    rows = []
    for i, enc in enumerate(values):
        mid = (enc.lower + enc.upper) / 2
        row = [0] * dim + [round(mid * scale)]
        row[i] = 1
        rows.append(row)
    reduced = _lll_reduce(rows, config.lll_delta)
    out = []
    seen: set[tuple[int, ...]] = set()
    bound = config.coefficient_bound
    for row in reduced:
        z = row[:dim]
        if all(v == 0 for v in z) or max(map(abs, z)) > bound:
            continue
        cz = _canonical(z)
        if cz in seen:
            continue
        seen.add(cz)
        residual = _residual(values, cz)
        if residual.contains(0):
            out.append(RelationCandidate(cz, residual, _status_from_residual(values, residual)))
    return out


def verify_relation_on_convergents(z: Sequence[int], spec: SeriesSpec, window) -> str:
    """Exact check of z_0 q_N + sum_i z_i p_{i,N} = 0 across a window of orders.

    ``confirmed-on-convergents``: holds at two or more orders with no
    failure after the first success.  ``refuted``: fails at every order in
    the tail half with residual magnitudes growing.  Anything else stays
    ``numerically-plausible``.
    """
    z = tuple(int(v) for v in z)
    if len(z) != spec.m + 1:
        raise ValueError("relation vector needs %d entries" % (spec.m + 1))
    if all(v == 0 for v in z):
        raise ValueError("the zero vector is not a relation candidate")
    n0, n1 = int(window[0]), int(window[1])
    if not 1 <= n0 <= n1:
        raise ValueError("bad order window")
    residuals = []
    for order in range(n0, n1 + 1):
        cvs = [convergent(spec, i, order) for i in range(1, spec.m + 1)]
        value = z[0] * cvs[0].q + sum(zi * cv.p for zi, cv in zip(z[1:], cvs))
        residuals.append(value)
    zero_orders = [n0 + j for j, v in enumerate(residuals) if v == 0]
    if len(zero_orders) >= 2:
        after_first = residuals[zero_orders[0] - n0:]
        if all(v == 0 for v in after_first):
            return STATUS_CONFIRMED
    tail_from = n0 + (n1 - n0 + 1) // 2
    tail = residuals[tail_from - n0:]
    if all(v != 0 for v in tail):
        mags = [abs(v) for v in tail]
        if all(b > a for a, b in zip(mags, mags[1:])) or len(mags) == 1:
            return STATUS_REFUTED
    return STATUS_PLAUSIBLE


# ---------------------------------------------------------------------------
# Elimination probe for the unit/divisor-count pair.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of the elimination argument over (1, sum 1/b_n, sum d(n)/b_n).

    Any relation z_0 + z_1 beta_1 + z_2 beta_2 = 0 forces the terminal
    identity z_1 + z_2 d(N) = 0 for all large N; two window indices with
    different d-values therefore refute every candidate with
    (z_1, z_2) != (0, 0), and z_0-only candidates die on the exact integer
    residual z_0 q_N != 0.
    """

    bound: int
    window: tuple[int, int]
    total_candidates: int
    refuted: int
    witness: tuple[tuple[int, int], tuple[int, int]]  # ((N, d(N)), (N', d(N')))
    nonzero_residual_tail: int
    sample_residuals: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "bound": self.bound,
            "window": list(self.window),
            "total_candidates": self.total_candidates,
            "refuted": self.refuted,
            "witness": [list(self.witness[0]), list(self.witness[1])],
            "nonzero_residual_tail": self.nonzero_residual_tail,
            "sample_residuals": self.sample_residuals,
        }


def unit_divisor_pair_spec(seed: int = 2) -> SeriesSpec:
    """The two-series family c_1 = 1, c_2 = d(n) over the prefix-square b_n."""
    return SeriesSpec(
        mode=MODE_SUM_DIRECT,
        coefficients=(SequenceSpec.constant(1), SequenceSpec.divisor_count()),
        denominators=SequenceSpec.prefix_square(seed),
        delta=Fraction(3, 5),
    )


def probe_divisor_pair_independence(bound: int, window) -> ProbeReport:
    """Refute every nonzero (z_0, z_1, z_2) with sup-norm <= bound.

    Computes the exact integer residuals L_N = z_0 q_N + z_1 p_{1,N} +
    z_2 p_{2,N} on the window as evidence, then applies the terminal
    elimination: the witness pair of indices with distinct divisor counts
    makes z_1 + z_2 d(N) = 0 unsatisfiable unless z_1 = z_2 = 0, and then
    z_0 q_N != 0 finishes.  Indices below 2 are outside the elimination's
    reach and are skipped when picking the witness.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    n0, n1 = int(window[0]), int(window[1])
    if n1 < 6:
        raise ValueError("window end must be >= 6 for the elimination argument")
    spec = unit_divisor_pair_spec()
    qs, p1s, p2s = {}, {}, {}
    for order in range(n0, n1 + 1):
        cv1 = convergent(spec, 1, order)
        cv2 = convergent(spec, 2, order)
        qs[order], p1s[order], p2s[order] = cv1.q, cv1.p, cv2.p

    witness = None
    base = None
    for n in range(max(n0, 2), n1 + 1):
        d = divisor_count(n)
        if base is None:
            base = (n, d)
        elif d != base[1]:
            witness = (base, (n, d))
            break
    if witness is None:  # unreachable for windows reaching 4: d(2)=2, d(4)=3
        raise RefusalError("window contains no change in divisor counts")

    tail_from = n0 + (n1 - n0 + 1) // 2
    total = 0
    refuted = 0
    all_nonzero_tail = 0
    samples = {}
    for z0 in range(-bound, bound + 1):
        for z1 in range(-bound, bound + 1):
            for z2 in range(-bound, bound + 1):
                if z0 == z1 == z2 == 0:
                    continue
                total += 1
                if z1 == 0 and z2 == 0:
                    refuted += 1  # z_0 q_N is never zero
                else:
                    # z1 + z2*d(N) would have to vanish at both witnesses;
                    # distinct d-values make that impossible for (z1,z2) != 0
                    (_, da), (_, db) = witness
                    assert (z1 + z2 * da, z1 + z2 * db) != (0, 0)
                    refuted += 1
                residuals = [z0 * qs[n] + z1 * p1s[n] + z2 * p2s[n]
                             for n in range(tail_from, n1 + 1)]
                if all(v != 0 for v in residuals):
                    all_nonzero_tail += 1
                if abs(z0) <= 1 and abs(z1) <= 1 and abs(z2) <= 1:
                    samples["(%d,%d,%d)" % (z0, z1, z2)] = [
                        str(v) for v in residuals[:2]
                    ]
    return ProbeReport(
        bound=bound,
        window=(n0, n1),
        total_candidates=total,
        refuted=refuted,
        witness=witness,
        nonzero_residual_tail=all_nonzero_tail,
        sample_residuals=samples,
    )
