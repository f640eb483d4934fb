"""Seeded random series families shared by the approx and acceptance suites.

Generation is deliberately biased toward geometric-or-faster denominator
growth: that is the regime where the tail machinery's preconditions can
certify, which is what the soundness suites require.
"""

from __future__ import annotations

import random
from fractions import Fraction

from transcheck.approx import MODE_PRODUCT, MODE_SUM_DIRECT, SeriesSpec
from transcheck.sequences import SequenceSpec


def _random_denominator(rng: random.Random) -> SequenceSpec:
    pick = rng.randrange(3)
    if pick == 0:
        return SequenceSpec.power(rng.randint(2, 7))
    if pick == 1:
        return SequenceSpec.prefix_square(rng.randint(2, 3))
    base = rng.randint(3, 9)
    return SequenceSpec.power(base)


def _random_coefficient(rng: random.Random, small: bool = False) -> SequenceSpec:
    pick = rng.randrange(4)
    if pick == 0:
        return SequenceSpec.constant(rng.randint(1, 9))
    if pick == 1:
        return SequenceSpec.polynomial(rng.randint(0, 3), rng.randint(1, 3))
    if pick == 2 and not small:
        return SequenceSpec.table([rng.randint(1, 50) for _ in range(40)])
    return SequenceSpec.constant(rng.randint(1, 3))


def random_sum_spec(rng: random.Random) -> SeriesSpec:
    return SeriesSpec(
        mode=MODE_SUM_DIRECT,
        coefficients=(_random_coefficient(rng),),
        denominators=_random_denominator(rng),
        delta=Fraction(rng.randint(1, 9), 10),
    )


def random_power_spec(rng: random.Random) -> tuple[SeriesSpec, Fraction]:
    """Sum spec plus an epsilon for the power-bound pipeline."""
    eps = rng.choice([Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3)])
    spec = SeriesSpec(
        mode=MODE_SUM_DIRECT,
        coefficients=(_random_coefficient(rng, small=True),),
        denominators=SequenceSpec.power(rng.randint(4, 9))
        if rng.random() < 0.7
        else SequenceSpec.prefix_square(2),
        delta=Fraction(1, 2),
        epsilon=eps,
    )
    return spec, eps


def random_product_spec(rng: random.Random) -> SeriesSpec:
    return SeriesSpec(
        mode=MODE_PRODUCT,
        coefficients=(_random_coefficient(rng, small=True),),
        denominators=_random_denominator(rng),
        delta=Fraction(1, 2),
        require_coeff_le_denom=False,
    )


def table_recurrence_denominator(seed: int, power: int, length: int) -> SequenceSpec:
    """b_{n+1} = (b_1*...*b_n)**power materialized as a table."""
    values = [seed]
    prefix = seed
    for _ in range(1, length):
        nxt = prefix**power
        values.append(nxt)
        prefix *= nxt
    return SequenceSpec.table(values)
