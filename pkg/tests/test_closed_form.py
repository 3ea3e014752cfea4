from fractions import Fraction
from math import factorial, gcd

import pytest

from stickprob.closedform import (
    ExactProb,
    is_vacuous,
    pa_pickup,
    pn_broken,
    pn_exponential,
    pn_pickup,
    pn_pickup_quadrilateral,
    pn_pickup_truncated,
    pr_pickup,
)
from stickprob.constraints import m_constants
from stickprob.errors import DomainError, UnsupportedFormulaError
from stickprob.sequences import fib


class TestExactProb:
    def test_requires_lowest_terms(self):
        with pytest.raises(DomainError):
            ExactProb(2, 4)

    def test_requires_probability_range(self):
        with pytest.raises(DomainError):
            ExactProb(7, 6)
        with pytest.raises(DomainError):
            ExactProb(-1, 6)
        with pytest.raises(DomainError):
            ExactProb(1, 0)

    def test_from_fraction_reduces(self):
        prob = ExactProb.from_fraction(Fraction(6, 8))
        assert (prob.numerator, prob.denominator) == (3, 4)

    def test_decimal_rendering(self):
        assert ExactProb(1, 6).decimal(3) == "0.167"
        assert ExactProb(1, 1).decimal(2) == "1.00"
        assert ExactProb(1, 2).decimal(0) == "1"  # ties round away from zero
        assert ExactProb(1, 3).decimal(12) == "0.333333333333"

    def test_float_and_str(self):
        prob = ExactProb(3, 4)
        assert float(prob) == 0.75
        assert str(prob) == "3/4"


class TestPnPickup:
    def test_triangle_case(self):
        assert pn_pickup(2, 4).fraction == Fraction(1, 6)

    def test_quadrilateral_case(self):
        assert pn_pickup(3, 5).fraction == Fraction(1, 40)

    @pytest.mark.parametrize("n", range(3, 13))
    def test_top_polygon_reduces_to_factorial(self, n):
        assert pn_pickup(n - 1, n).fraction == Fraction(1, factorial(n - 1))

    @pytest.mark.parametrize("n", range(3, 21))
    def test_fibonorial_product(self, n):
        product = 1
        for i in range(1, n + 1):
            product *= fib(2, i)
        assert pn_pickup(2, n).fraction == Fraction(1, product)

    def test_vacuous_cases(self):
        assert pn_pickup(2, 1).fraction == 1
        assert pn_pickup(5, 5).fraction == 1
        assert is_vacuous(5, 5) and not is_vacuous(5, 6)

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            pn_pickup(1, 4)
        with pytest.raises(DomainError):
            pn_pickup(2, 0)


class TestQuadrilateralForm:
    @pytest.mark.parametrize(
        ("n", "expected"),
        [(4, Fraction(1, 6)), (5, Fraction(1, 40)), (6, Fraction(1, 504))],
    )
    def test_reference_values(self, n, expected):
        assert pn_pickup_quadrilateral(n).fraction == expected

    def test_matches_general_form(self):
        for n in range(4, 21):
            assert pn_pickup_quadrilateral(n).fraction == pn_pickup(3, n).fraction

    def test_rejects_small_n(self):
        with pytest.raises(DomainError):
            pn_pickup_quadrilateral(3)


class TestPnTruncated:
    def test_boundary_annihilation(self):
        assert pn_pickup_truncated(2, 3, Fraction(1, 2)).fraction == 0

    def test_reduces_at_zero(self):
        assert pn_pickup_truncated(2, 3, 0).fraction == pn_pickup(2, 3).fraction

    def test_worked_value(self):
        assert pn_pickup_truncated(2, 3, Fraction(1, 4)).fraction == Fraction(4, 27)

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            pn_pickup_truncated(2, 3, 1)
        with pytest.raises(DomainError):
            pn_pickup_truncated(2, 3, Fraction(-1, 10))

    def test_nonincreasing_to_zero(self):
        for p, n in ((2, 3), (2, 5), (3, 4)):
            cap = Fraction(1, m_constants(p, n)[0])
            grid = [cap * Fraction(j, 20) for j in range(21)]
            values = [pn_pickup_truncated(p, n, a).fraction for a in grid]
            assert all(x >= y for x, y in zip(values, values[1:]))
            assert values[-1] == 0

    def test_beyond_cap_is_zero(self):
        assert pn_pickup_truncated(2, 3, Fraction(3, 4)).fraction == 0

    def test_vacuous(self):
        assert pn_pickup_truncated(4, 3, Fraction(1, 5)).fraction == 1


class TestPnBroken:
    def test_triangle_case(self):
        assert pn_broken(2, 3).fraction == Fraction(3, 4)

    def test_square_from_four_pieces(self):
        assert pn_broken(3, 4).fraction == Fraction(1, 2)

    def test_quadrilateral_from_four(self):
        assert pn_broken(2, 4).fraction == Fraction(3, 7)

    @pytest.mark.parametrize("n", range(3, 13))
    def test_top_polygon_reduction(self, n):
        assert pn_broken(n - 1, n).fraction == Fraction(n, 2 ** (n - 1))

    def test_vacuous(self):
        assert pn_broken(4, 4).fraction == 1


class TestPnExponential:
    def test_small_values(self):
        assert pn_exponential(2, 3).fraction == Fraction(3, 4)
        assert pn_exponential(2, 4).fraction == Fraction(3, 7)

    def test_matches_broken_everywhere(self):
        for p in range(2, 6):
            for n in range(p + 1, 13):
                assert pn_exponential(p, n).fraction == pn_broken(p, n).fraction

    def test_vacuous(self):
        assert pn_exponential(3, 2).fraction == 1


class TestPaPickup:
    def test_triangle_values(self):
        assert pa_pickup(2, 3).fraction == Fraction(1, 2)
        assert pa_pickup(2, 6).fraction == Fraction(1, 16)

    def test_quadrilateral_values(self):
        assert pa_pickup(3, 4).fraction == Fraction(5, 6)

    @pytest.mark.parametrize("p", [2, 3])
    def test_complement_at_minimal_n(self, p):
        assert pa_pickup(p, p + 1).fraction == 1 - pn_pickup(p, p + 1).fraction

    def test_unsupported_above_quadrilaterals(self):
        with pytest.raises(UnsupportedFormulaError, match="Monte Carlo"):
            pa_pickup(4, 6)

    def test_vacuous(self):
        assert pa_pickup(3, 3).fraction == 1


class TestPrPickup:
    @pytest.mark.parametrize(
        ("p", "expected"),
        [(2, Fraction(1, 2)), (3, Fraction(5, 6)), (4, Fraction(23, 24))],
    )
    def test_values(self, p, expected):
        assert pr_pickup(p).fraction == expected

    def test_rejects_small_p(self):
        with pytest.raises(DomainError):
            pr_pickup(1)


def test_all_outputs_reduced_and_in_unit_interval():
    probs = []
    for p in range(2, 6):
        for n in range(1, 13):
            probs += [pn_pickup(p, n), pn_broken(p, n), pn_exponential(p, n)]
            probs.append(pn_pickup_truncated(p, n, Fraction(1, 17)))
            if p in (2, 3):
                probs.append(pa_pickup(p, n))
        probs.append(pr_pickup(p))
    for prob in probs:
        assert 0 <= prob.fraction <= 1
        assert gcd(prob.numerator, prob.denominator) == 1
