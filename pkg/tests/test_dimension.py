import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfractal import (
    WeightSpec,
    dimension_equation,
    evaluate_pressure,
    reciprocal_sum_audit,
    solve_dimension,
    t_module_weights,
)
from arithfractal.errors import NonExpandingWeightError

TOL = 1e-12


def bisect_oracle(weights, iterations=200):
    """Independent plain bisection for sum(w^-s) = 1."""
    lo, hi = 0.0, 1.0
    while sum(w**-hi for w in weights) > 1:
        hi *= 2
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if sum(w**-mid for w in weights) > 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_equal_weights_closed_form():
    # k equal weights w solve to log(k)/log(w)
    assert abs(solve_dimension(WeightSpec((2.0, 2.0))).s - 1.0) < 1e-10
    assert abs(solve_dimension(WeightSpec((10.0, 10.0))).s - math.log(2) / math.log(10)) < 1e-10


def test_single_weight_dimension_zero():
    assert solve_dimension(WeightSpec((2.0,))).s == 0.0


def test_golden_ratio_case():
    # 2^-s + 4^-s = 1: t + t^2 = 1 with t = 2^-s, so s = log2((1+sqrt 5)/2)
    expected = math.log((1 + math.sqrt(5)) / 2) / math.log(2)
    result = solve_dimension(WeightSpec((2.0, 4.0)))
    assert abs(result.s - expected) < 1e-10
    assert result.residual < TOL


def test_solver_matches_bisection_oracle():
    for weights in [(2.0, 3.0), (2.0, 5.0), (1.5, 1.5, 7.0), (10.0, 10.0, 10.0)]:
        assert abs(solve_dimension(WeightSpec(weights)).s - bisect_oracle(weights)) < 1e-9


def test_pressure_examples():
    assert evaluate_pressure(WeightSpec((2.0, 2.0)), 1.0) == pytest.approx(1.0)
    assert evaluate_pressure(WeightSpec((2.0, 2.0)), 2.0) == pytest.approx(0.5)
    assert evaluate_pressure(WeightSpec((10.0, 10.0)), 0.2) == pytest.approx(
        2 * 10**-0.2, abs=1e-12
    )


@settings(max_examples=60)
@given(
    st.lists(st.floats(min_value=1.01, max_value=16.0), min_size=1, max_size=8),
    st.randoms(use_true_random=False),
)
def test_residual_and_shuffle_consistency(weights, rng):
    spec = WeightSpec(tuple(weights))
    result = solve_dimension(spec, TOL)
    assert result.residual < TOL
    shuffled = list(weights)
    rng.shuffle(shuffled)
    again = solve_dimension(WeightSpec(tuple(shuffled)), TOL)
    assert abs(again.s - result.s) < 10 * TOL


@settings(max_examples=60)
@given(
    st.lists(st.floats(min_value=1.3, max_value=16.0), min_size=1, max_size=6),
    st.floats(min_value=1.3, max_value=16.0),
)
def test_monotonicity_append_and_delete(weights, extra):
    # Weights are kept away from 1 so the appended term w^-s stays above
    # the solver's resolution; the strict inequality is not observable in
    # double precision once the dimension climbs past ~12.
    base = solve_dimension(WeightSpec(tuple(weights))).s
    grown = solve_dimension(WeightSpec(tuple(weights) + (extra,))).s
    assert grown > base
    if len(weights) > 1:
        shrunk = solve_dimension(WeightSpec(tuple(weights[:-1]))).s
        assert shrunk < base


def test_composition_representation_independence():
    # {10x, 10x+1} composed with itself: four maps of weight 100.
    s_base = solve_dimension(WeightSpec((10.0, 10.0))).s
    s_composed = solve_dimension(WeightSpec((100.0,) * 4)).s
    assert abs(s_base - s_composed) < 10 * TOL


def test_dimension_equation_weights(z_binary, gauss_base, p1_doubling, q2_powers2):
    assert dimension_equation(z_binary).weights == (2.0, 2.0)
    assert dimension_equation(gauss_base).weights == (2.0, 2.0)
    assert dimension_equation(gauss_base, "abs").weights == (
        math.sqrt(2),
        math.sqrt(2),
    )
    assert dimension_equation(p1_doubling).weights == (2.0, 2.0)
    assert dimension_equation(q2_powers2).weights == (2.0, 2.0, 2.0, 2.0)


def test_gauss_conventions_scale_dimension(gauss_base):
    s_norm = solve_dimension(dimension_equation(gauss_base, "norm")).s
    s_abs = solve_dimension(dimension_equation(gauss_base, "abs")).s
    assert abs(s_norm - 1.0) < 1e-10
    assert abs(s_abs - 2.0) < 1e-10


def test_t_module_preset():
    # degrees r_i with rank d: weights r_i * d
    spec = t_module_weights([1, 2], 3)
    assert spec.weights == (3.0, 6.0)
    assert solve_dimension(spec).residual < TOL


def test_non_expanding_weight_rejected():
    with pytest.raises(NonExpandingWeightError):
        WeightSpec((1.0, 2.0)).validate()
    with pytest.raises(NonExpandingWeightError):
        solve_dimension(WeightSpec(()))


def test_reciprocal_audit_z_binary(z_binary):
    audit = reciprocal_sum_audit(z_binary)
    assert audit.reciprocal_sum == Fraction(1)
    assert audit.s_at_most_one


def test_reciprocal_audit_digit_systems(digits01, digits012):
    # Exact digit systems: dimension stays at most 1 even though the
    # reciprocal sum sits far below 1.
    for system, total in ((digits01, Fraction(1, 5)), (digits012, Fraction(3, 10))):
        audit = reciprocal_sum_audit(system)
        assert audit.reciprocal_sum == total
        assert audit.s_at_most_one
