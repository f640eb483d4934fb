import random
from fractions import Fraction

import pytest

from families import random_power_spec, random_product_spec, random_sum_spec
from transcheck.approx import (
    MODE_PRODUCT,
    MODE_SUM_DIRECT,
    MODE_SUM_PREFIX,
    RefusalError,
    SeriesSpec,
    build_subspace_instance,
    convergent,
    error_report,
    exponent_from_error,
    geometric_tail_bound_value,
    measured_exponent,
    power_tail_bound_enclosure,
    product_prefix_factor,
    product_tail_bound_value,
    tail_enclosure,
    tail_enclosure_with_width,
    verify_forms_inequality,
)
from transcheck.sequences import SequenceSpec, divisor_count


def pair_spec(mode=MODE_SUM_DIRECT) -> SeriesSpec:
    """The workhorse pair: c1 = 1, c2 = d(n) over b1=2, b_{n+1}=(b1..bn)**2."""
    return SeriesSpec(
        mode=mode,
        coefficients=(SequenceSpec.constant(1), SequenceSpec.divisor_count()),
        denominators=SequenceSpec.prefix_square(2),
        delta=Fraction(3, 5),
    )


def exact_series_value(spec: SeriesSpec, i: int, terms: int) -> Fraction:
    """Slow all-rational oracle: sum/product of `terms` leading terms."""
    total = Fraction(0) if spec.mode != MODE_PRODUCT else Fraction(1)
    prefix = 1
    for n in range(1, terms + 1):
        b = spec.denominators.value(n)
        c = spec.coefficients[i - 1].value(n)
        prefix *= b
        if spec.mode == MODE_SUM_DIRECT:
            total += Fraction(c, b)
        elif spec.mode == MODE_SUM_PREFIX:
            total += Fraction(c, prefix)
        else:
            total *= 1 + Fraction(c, b)
    return total


class TestConvergent:
    def test_unit_coefficients_order_three(self):
        cv = convergent(pair_spec(), 1, 3)
        assert (cv.p, cv.q) == (392, 512)

    def test_divisor_coefficients_order_three(self):
        cv = convergent(pair_spec(), 2, 3)
        assert (cv.p, cv.q) == (528, 512)

    def test_first_order(self):
        cv = convergent(pair_spec(), 1, 1)
        assert (cv.p, cv.q) == (1, 2)

    def test_q_is_never_reduced(self):
        cv = convergent(pair_spec(), 2, 3)
        assert cv.q == 2 * 4 * 64

    def test_matches_slow_oracle_all_modes(self):
        for mode in (MODE_SUM_DIRECT, MODE_SUM_PREFIX, MODE_PRODUCT):
            spec = pair_spec(mode)
            for i in (1, 2):
                for n in (1, 2, 4):
                    cv = convergent(spec, i, n)
                    assert cv.value == exact_series_value(spec, i, n)

    def test_reverse_order_resummation_identical(self):
        spec = pair_spec()
        for i in (1, 2):
            cv = convergent(spec, i, 5)
            total = Fraction(0)
            for n in reversed(range(1, 6)):
                total += Fraction(spec.coefficients[i - 1].value(n),
                                  spec.denominators.value(n))
            assert Fraction(cv.p, cv.q) == total

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            convergent(pair_spec(), 3, 1)
        with pytest.raises(ValueError):
            convergent(pair_spec(), 1, 0)

    def test_product_pipeline_hypothesis_enforced(self):
        spec = SeriesSpec(
            mode=MODE_PRODUCT,
            coefficients=(SequenceSpec.constant(5),),
            denominators=SequenceSpec.power(2),
            require_coeff_le_denom=True,
        )
        with pytest.raises(ValueError):
            convergent(spec, 1, 3)  # c=5 > b_1=2


class TestTailEnclosure:
    def test_pair_order_three(self):
        enc = tail_enclosure(pair_spec(), 1, 3, 2)
        target = Fraction(1, 2**18) + Fraction(1, 2**54)
        assert enc.contains(target)
        assert enc.width < Fraction(1, 2**100)

    def test_terminated_series_is_exact(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(0),),
            denominators=SequenceSpec.power(2),
        )
        enc = tail_enclosure(spec, 1, 2, 2)
        assert enc.width == 0 and enc.lower == 0

    def test_geometric_series_from_zero(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.power(2),
        )
        enc = tail_enclosure(spec, 1, 0, 1)
        assert enc.contains(1)

    def test_contains_true_value_with_many_more_terms(self):
        spec = pair_spec()
        for i in (1, 2):
            enc = tail_enclosure(spec, i, 2, 2)
            truth = exact_series_value(spec, i, 9) - exact_series_value(spec, i, 2)
            assert enc.contains(truth)

    def test_nested_refinement(self):
        spec = pair_spec()
        wide = tail_enclosure(spec, 1, 3, 1)
        tight = tail_enclosure(spec, 1, 3, 4)
        assert wide.contains_enclosure(tight)

    def test_refuses_subgeometric_decay(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.polynomial(0, 0, 0, 1),  # b_n = n**3
        )
        with pytest.raises(RefusalError):
            tail_enclosure(spec, 1, 10, 4)

    def test_width_driven_escalation(self):
        enc = tail_enclosure_with_width(pair_spec(), 1, 3, 200)
        assert enc.width <= Fraction(1, 2**200)

    def test_zero_then_nonzero_coefficients_refused(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.polynomial(-3, 1),),  # n - 3: zero at n=3
            denominators=SequenceSpec.power(2),
        )
        with pytest.raises(RefusalError):
            tail_enclosure(spec, 1, 2, 2)


class TestGeometricBound:
    def test_pure_geometric_equality(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.power(2),
        )
        bound = geometric_tail_bound_value(spec, 1, 5, Fraction(2))
        assert bound == Fraction(1, 2**5)
        tail = tail_enclosure(spec, 1, 5, 8)
        assert bound >= tail.upper

    def test_pair_bound_dominates_exact_tail(self):
        spec = pair_spec()
        bound = geometric_tail_bound_value(spec, 1, 3, Fraction(2))
        assert bound == Fraction(2, 2**18)
        assert bound >= tail_enclosure(spec, 1, 3, 4).upper

    def test_constant_denominators_refused(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.constant(2),
        )
        with pytest.raises(RefusalError):
            geometric_tail_bound_value(spec, 1, 3, Fraction(2))


class TestPowerBound:
    def test_pair_order_three(self):
        spec = pair_spec()
        enc = power_tail_bound_enclosure(spec, 1, 3, Fraction(2))
        assert enc.contains(Fraction(1, 7938))  # (1/2) * (64-1)**-2
        assert enc.lower >= tail_enclosure(spec, 1, 3, 4).upper

    def test_cubic_denominators_against_integral_oracle(self):
        # b_n = n**3: the bound (1/2)(b_11^(1/3) - 1)^-2 = 1/200 must dominate
        # the exact tail; oracle = partial sum + integral-test remainder.
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.polynomial(0, 0, 0, 1),
        )
        enc = power_tail_bound_enclosure(spec, 1, 10, Fraction(2))
        assert enc.contains(Fraction(1, 200))
        cutoff = 400
        partial = sum(Fraction(1, n**3) for n in range(11, cutoff + 1))
        oracle_upper = partial + Fraction(1, 2 * cutoff**2)
        assert enc.lower >= oracle_upper

    def test_refuses_when_x_is_one(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.power(2),),
            denominators=SequenceSpec.power(2),
        )
        with pytest.raises(RefusalError):
            power_tail_bound_enclosure(spec, 1, 3, Fraction(2))


class TestProductBound:
    def test_pair_product_order_three(self):
        spec = pair_spec(MODE_PRODUCT)
        bound = product_tail_bound_value(spec, 1, 3)
        prefix = Fraction(3, 2) * Fraction(5, 4) * Fraction(65, 64)
        assert product_prefix_factor(spec, 3) == prefix
        # oracle: exact product of 8 terms brackets the true value
        lower_truth = exact_series_value(spec, 1, 8)
        err_lower = lower_truth - exact_series_value(spec, 1, 3)
        assert bound >= err_lower
        assert bound >= tail_enclosure(spec, 1, 3, 4).upper

    def test_zero_tail_coefficients(self):
        spec = SeriesSpec(
            mode=MODE_PRODUCT,
            coefficients=(SequenceSpec.constant(0),),
            denominators=SequenceSpec.power(2),
        )
        bound = product_tail_bound_value(spec, 1, 2)
        assert bound == 0

    def test_coeff_equal_denominator_prefix_factor(self):
        spec = SeriesSpec(
            mode=MODE_PRODUCT,
            coefficients=(SequenceSpec.power(2),),
            denominators=SequenceSpec.power(2),
        )
        assert product_prefix_factor(spec, 2) == 4  # prod (1+1) = 2**N
        with pytest.raises(RefusalError):
            product_tail_bound_value(spec, 1, 2)


class TestMeasuredExponent:
    def test_definition_case(self):
        assert exponent_from_error(Fraction(1, 7**2), 7) == 1

    def test_pair_order_three(self):
        spec = pair_spec()
        d1 = measured_exponent(spec, 1, 3)
        assert abs(d1 - 1) < Fraction(1, 10**4)
        d2 = measured_exponent(spec, 2, 3)
        assert abs(d2 - Fraction(824, 1000)) < Fraction(1, 10**3)

    def test_monotone_in_error(self):
        assert exponent_from_error(Fraction(1, 2**30), 2**10) > exponent_from_error(
            Fraction(1, 2**25), 2**10
        )

    def test_zero_error_rejected(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(0),),
            denominators=SequenceSpec.power(2),
        )
        with pytest.raises(ValueError):
            measured_exponent(spec, 1, 2)


class TestSubspaceInstance:
    def test_pair_order_three(self):
        inst = build_subspace_instance(pair_spec(), 3, precision=3)
        assert inst.point == (392, 528, 512)
        assert inst.height == 528
        prod_float = float(inst.product_enclosure.upper)
        assert abs(prod_float - 5.86e-3) < 2e-4
        assert inst.delta_prime_max is not None
        assert abs(inst.delta_prime_max - Fraction(82, 100)) < Fraction(2, 100)

    def test_rational_hit_gives_zero_product(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(0),),
            denominators=SequenceSpec.power(2),
        )
        inst = build_subspace_instance(spec, 2)
        assert inst.product_enclosure.upper == 0
        assert inst.delta_prime_max is None
        assert verify_forms_inequality(inst, Fraction(7))

    def test_single_series_geometric(self):
        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.power(2),
        )
        inst = build_subspace_instance(spec, 2, precision=3)
        assert inst.point == (6, 8)
        assert inst.height == 8
        assert inst.product_enclosure.contains(16)  # q * (q * tail) = 8 * 2
        assert abs(inst.delta_prime_max + Fraction(4, 3)) < Fraction(1, 100)

    def test_forms_inequality_verdicts(self):
        inst = build_subspace_instance(pair_spec(), 3, precision=3)
        assert verify_forms_inequality(inst, Fraction(1, 2))
        assert not verify_forms_inequality(inst, Fraction(1))
        with pytest.raises(ValueError):
            verify_forms_inequality(inst, Fraction(0))

    def test_forms_inequality_refuses_on_straddling_bracket(self):
        import dataclasses

        from transcheck.approx import RefusalError
        from transcheck.exactcore import Enclosure

        inst = build_subspace_instance(pair_spec(), 3, precision=3)
        wide = dataclasses.replace(
            inst, product_enclosure=Enclosure(Fraction(1, 1000), Fraction(1, 2)))
        # 528**(-1/2) ~ 0.0435 sits strictly inside the bracket
        with pytest.raises(RefusalError):
            verify_forms_inequality(wide, Fraction(1, 2))

    def test_height_matches_padic_product_identity(self):
        # prod over finite p of max{1, |y_i|_p} is 1 for integer vectors,
        # so the height reduces to the max archimedean absolute value.
        rng = random.Random(11)
        for _ in range(20):
            vec = [rng.randint(-999, 999) for _ in range(4)]
            if all(v == 0 for v in vec):
                continue
            finite_part = 1
            for p in (2, 3, 5, 7, 11, 13):
                best = Fraction(1)
                for v in vec:
                    if v == 0:
                        continue
                    ord_p = 0
                    av = abs(v)
                    while av % p == 0:
                        av //= p
                        ord_p += 1
                    best = max(best, Fraction(1, p**ord_p))
                finite_part *= best
            assert finite_part == 1
            assert max(abs(v) for v in vec) == max(abs(v) for v in vec) * finite_part


class TestErrorReport:
    def test_pair_report_has_bounds_and_exponent(self):
        spec = pair_spec()
        rep = error_report(spec, 1, 3)
        assert rep.exact_error.lower > 0
        assert rep.geometric_bound is not None
        assert rep.measured_exponent is not None


class TestHypothesisExponentLinks:
    """Satisfied growth hypotheses must show up in the measured exponents."""

    def test_spike_decay_delta_realized(self):
        # the pair family satisfies the paired growth hypothesis at 3/5;
        # some window order must realize at least that exponent
        from transcheck.criteria import VERDICT_SATISFIED, check_spike_decay

        spec = pair_spec()
        verdict = check_spike_decay(list(spec.coefficients), spec.denominators,
                                    Fraction(3, 5), (1, 8))
        assert verdict.verdict == VERDICT_SATISFIED
        best = max(measured_exponent(spec, 1, n) for n in range(1, 9))
        assert best >= Fraction(3, 5)

    def test_rootstep_derived_exponent_realized(self):
        from transcheck.criteria import VERDICT_SATISFIED, check_spike_rootstep

        spec = SeriesSpec(
            mode=MODE_SUM_DIRECT,
            coefficients=(SequenceSpec.constant(1),),
            denominators=SequenceSpec.prefix_square(2),
            delta=Fraction(2, 5),
            epsilon=Fraction(2),
        )
        verdict = check_spike_rootstep(list(spec.coefficients), spec.denominators,
                                       Fraction(2, 5), Fraction(2), (1, 8))
        assert verdict.verdict == VERDICT_SATISFIED
        derived = Fraction(2, 5) * Fraction(2) / 3  # delta*eps/(1+eps)
        assert derived > 0
        best = max(measured_exponent(spec, 1, n) for n in range(1, 9))
        assert best >= derived

    def test_admissible_exponent_positive_on_window(self):
        # delta > 1/m satisfied: every order past the first has a positive
        # admissible exponent (the order-1 point still has form product > 1)
        spec = pair_spec()
        for order in range(2, 9):
            inst = build_subspace_instance(spec, order, precision=2)
            assert inst.delta_prime_max is not None
            assert inst.delta_prime_max > 0


class TestRandomizedSoundness:
    """Analytic bound >= certified tail upper end, on every spec whose
    preconditions certify (generator seeded for reproducibility)."""

    def test_geometric_bound_sound(self):
        rng = random.Random(2024)
        passed = 0
        while passed < 40:
            spec = random_sum_spec(rng)
            order = rng.randint(1, 4)
            try:
                bound = geometric_tail_bound_value(spec, 1, order, Fraction(2))
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, LookupError):
                continue
            assert bound >= tail.upper
            passed += 1

    def test_power_bound_sound(self):
        rng = random.Random(2025)
        passed = 0
        while passed < 40:
            spec, eps = random_power_spec(rng)
            order = rng.randint(1, 4)
            try:
                enc = power_tail_bound_enclosure(spec, 1, order, eps)
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, LookupError):
                continue
            assert enc.lower >= tail.upper
            passed += 1

    def test_product_bound_sound(self):
        rng = random.Random(2026)
        passed = 0
        while passed < 40:
            spec = random_product_spec(rng)
            order = rng.randint(1, 4)
            try:
                bound = product_tail_bound_value(spec, 1, order)
                tail = tail_enclosure(spec, 1, order, rng.randint(2, 6))
            except (RefusalError, ValueError, LookupError):
                continue
            assert bound >= tail.upper
            passed += 1
