"""Acceptance suite: one test per criterion, one printed line per verdict.

Every expected value is either computed by an independent oracle inside
the test or verified by exact arithmetic; tolerances are pinned in the
assertions.  Run with `pytest tests/test_acceptance.py -s` to see the
per-criterion lines.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

from families import random_power_spec, random_product_spec, random_sum_spec, \
    table_recurrence_denominator
from transcheck.approx import (
    MODE_SUM_DIRECT,
    SeriesSpec,
    build_subspace_instance,
    geometric_tail_bound_value,
    measured_exponent,
    power_tail_bound_enclosure,
    product_tail_bound_value,
    tail_enclosure,
    value_enclosure,
)
from transcheck.criteria import (
    VERDICT_SATISFIED,
    check_growth_window,
    check_spike_decay,
    check_spike_decay_strong,
)
from transcheck.exactcore import Enclosure, RefusalError, cmp_products
from transcheck.relations import (
    STATUS_CONFIRMED,
    SearchConfig,
    find_relations,
    probe_divisor_pair_independence,
    unit_divisor_pair_spec,
    verify_relation_on_convergents,
)
from transcheck.scenarios import builtin_scenario, run_scenario
from transcheck.sequences import (
    SequenceSpec,
    divisor_count,
    sieve_window,
    sigma,
    totient,
)


@contextmanager
def criterion(number: int, title: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print("[criterion %d] FAIL  %s" % (number, title))
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_seconds, (
        "criterion %d exceeded its %.0fs budget: %.2fs" % (number, budget_seconds, elapsed)
    )
    print("[criterion %d] PASS  %s (%.2fs)" % (number, title, elapsed))


def test_criterion_1_prefix_power_gap():
    with criterion(1, "exact prefix-power comparisons for N <= 12", 1.0):
        b = SequenceSpec.prefix_square(2)
        for n in range(1, 13):
            prefix = b.prefix_factors(n)
            nxt = b.value_factors(n + 1)
            lhs = [(base, e * Fraction(3, 2)) for base, e in prefix]
            assert cmp_products(lhs, nxt) <= 0  # (b_1..b_N)**1.5 <= b_{N+1}
            for delta in (Fraction(1, 100), Fraction(1)):
                lhs = [(base, e * (2 + delta)) for base, e in prefix]
                assert cmp_products(lhs, nxt) > 0  # (b_1..b_N)**(2+d) > b_{N+1}


def test_criterion_2_measured_exponents():
    with criterion(2, "desk-scale approximation exponents", 1.0):
        spec = unit_divisor_pair_spec()
        d13 = measured_exponent(spec, 1, 3)
        assert abs(d13 - 1) <= Fraction(1, 10**4)
        d23 = measured_exponent(spec, 2, 3)
        assert abs(d23 - Fraction(824, 1000)) <= Fraction(1, 10**3)
        for order in range(2, 9):
            for i in (1, 2):
                assert measured_exponent(spec, i, order) >= Fraction(51, 100)


def test_criterion_3_tail_bound_soundness():
    with criterion(3, "analytic tail bounds dominate certified tails (100+ each)", 30.0):
        rng = random.Random(20260810)
        checked = {"geometric": 0, "power": 0, "product": 0}
        while checked["geometric"] < 100:
            spec = random_sum_spec(rng)
            order = rng.randint(1, 4)
            try:
                bound = geometric_tail_bound_value(spec, 1, order, Fraction(2))
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, LookupError):
                continue
            assert bound >= tail.upper
            checked["geometric"] += 1
        while checked["power"] < 100:
            spec, eps = random_power_spec(rng)
            order = rng.randint(1, 4)
            try:
                enc = power_tail_bound_enclosure(spec, 1, order, eps)
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, LookupError):
                continue
            assert enc.lower >= tail.upper
            checked["power"] += 1
        while checked["product"] < 100:
            spec = random_product_spec(rng)
            order = rng.randint(1, 4)
            try:
                bound = product_tail_bound_value(spec, 1, order)
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, ValueError, LookupError):
                continue
            assert bound >= tail.upper
            checked["product"] += 1


def test_criterion_4_subspace_instances():
    with criterion(4, "linear-form instances over orders 3..8", 5.0):
        spec = unit_divisor_pair_spec()
        for order in range(3, 9):
            inst = build_subspace_instance(spec, order, precision=2)
            assert inst.delta_prime_max is not None
            assert inst.delta_prime_max >= Fraction(1, 2)
            if order == 3:
                assert abs(inst.delta_prime_max - Fraction(82, 100)) <= Fraction(2, 100)


def test_criterion_5_relation_recovery_and_refutation():
    with criterion(5, "relation recovery, empty search, independence probe", 60.0):
        planted = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(
                SequenceSpec.polynomial(0, 1),
                SequenceSpec.polynomial(0, 0, 1),
                SequenceSpec.polynomial(0, 1, 1),
            ),
            denominators=SequenceSpec.prefix_square(2),
            delta=Fraction(3, 5),
        )
        vals = [Enclosure.point(1)] + [value_enclosure(planted, i, 200) for i in (1, 2, 3)]
        found = find_relations(vals, SearchConfig(coefficient_bound=1, precision_bits=200))
        assert [c.z for c in found] == [(0, 1, 1, -1)]
        assert verify_relation_on_convergents(
            found[0].z, planted, (1, 6)) == STATUS_CONFIRMED

        pair = unit_divisor_pair_spec()
        pair_vals = [Enclosure.point(1)] + [value_enclosure(pair, i, 332) for i in (1, 2)]
        assert find_relations(
            pair_vals, SearchConfig(coefficient_bound=20, precision_bits=332)) == []

        probe = probe_divisor_pair_independence(10, (1, 8))
        assert probe.refuted == probe.total_candidates == 21**3 - 1
        assert probe.witness == ((2, 2), (4, 3))


def test_criterion_6_sieves_match_bruteforce():
    with criterion(6, "sieves equal brute-force enumeration up to 10**4", 5.0):
        n_max = 10**4
        dw = sieve_window("divisor-count", n_max)
        sw = sieve_window("sigma", n_max)
        tw = sieve_window("totient", n_max)
        for n in range(1, n_max + 1):
            cnt, tot = 0, 0
            d = 1
            while d * d <= n:
                if n % d == 0:
                    other = n // d
                    cnt += 1 if other == d else 2
                    tot += d if other == d else d + other
                d += 1
            assert dw.value_at(n) == cnt
            assert sw.value_at(n) == tot
            # independent totient route: trial-division factorization
            assert tw.value_at(n) == totient(n)
        for n in range(1, 1501):  # direct gcd-scan spot check for phi
            assert tw.value_at(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        # pointwise ops agree with the sieves where both are defined
        for n in (1, 2, 360, 9973, 10**4):
            assert divisor_count(n) == dw.value_at(n)
            assert sigma(n) == sw.value_at(n)


def test_criterion_7_checker_cross_validation():
    with criterion(7, "strong hypothesis implies plain + growth-window estimate", 10.0):
        rng = random.Random(424242)
        satisfied_seen = 0
        for _ in range(50):
            power = rng.choice([2, 3, 4])
            seed = rng.choice([2, 3, 5])
            b = table_recurrence_denominator(seed, power, 9)
            coeff = rng.choice([
                SequenceSpec.constant(1),
                SequenceSpec.divisor_count(),
                SequenceSpec.polynomial(0, 1),
            ])
            delta = rng.choice([Fraction(1, 2), Fraction(1)])
            strong = check_spike_decay_strong(coeff, b, delta, (1, 8))
            if strong.verdict == VERDICT_SATISFIED:
                satisfied_seen += 1
                plain = check_spike_decay([coeff], b, delta, (1, 8))
                assert plain.verdict == VERDICT_SATISFIED
        assert satisfied_seen >= 10

        rep = check_growth_window(SequenceSpec.prefix_square(2), 2, (1, 8))
        target = 2.0 ** (2.0 / 9.0)
        assert abs(2.0 ** rep.liminf_estimate.log2mag - target) <= 1e-6
        assert abs(2.0 ** rep.limsup_estimate.log2mag - target) <= 1e-6
        assert rep.verdict == "fails"


def test_criterion_8_deterministic_reports():
    with criterion(8, "byte-identical JSON reports for the builtin scenario", 30.0):
        first = run_scenario(builtin_scenario("corollary")).to_json()
        second = run_scenario(builtin_scenario("corollary")).to_json()
        assert first == second
        assert first.endswith("\n")
