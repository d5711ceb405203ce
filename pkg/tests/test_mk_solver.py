import numpy as np
import pytest

from lagot.costs import CostFunction, builtin, power_cost
from lagot.errors import (DimensionMismatch, Infeasible, TooLarge,
                          UnequalWeights)
from lagot.measures import random_measure, validate_measure
from lagot.mk_solver import brute_force_mk, solve_mk, t_p


def _uniform(points, dim=1):
    n = len(points)
    w = [1.0 / n] * (n - 1) + [1.0 - (n - 1) / n]
    return validate_measure([(p, wi) for p, wi in zip(points, w)], dim)


HALF = validate_measure([((0.0,), 0.5), ((1.0,), 0.5)], 1)
SQRT = builtin("power", [0.5])


def test_equal_marginals_zero():
    sol = solve_mk(HALF, HALF, SQRT)
    assert sol.value == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(sol.plan.plan, np.diag([0.5, 0.5]))


def test_crossing_beats_crossed():
    m0 = validate_measure([((0.0,), 0.5), ((3.0,), 0.5)], 1)
    m1 = validate_measure([((1.0,), 0.5), ((2.0,), 0.5)], 1)
    sol = solve_mk(m0, m1, SQRT)
    # monotone pairing costs 1+1 halves; the crossed one sqrt(2)+sqrt(2)
    assert sol.value == pytest.approx(1.0)
    assert sol.plan.plan[0, 0] == pytest.approx(0.5)


def test_forced_split():
    m0 = validate_measure([((0.0,), 1.0)], 1)
    m1 = validate_measure([((1.0,), 0.5), ((-1.0,), 0.5)], 1)
    assert solve_mk(m0, m1, SQRT).value == pytest.approx(1.0)


def test_dimension_mismatch():
    m2 = validate_measure([((0.0, 0.0), 1.0)], 2)
    with pytest.raises(DimensionMismatch):
        solve_mk(HALF, m2, SQRT)


def test_forbidden_arcs_increase_value_or_infeasible():
    m0 = validate_measure([((0.0,), 0.5), ((3.0,), 0.5)], 1)
    m1 = validate_measure([((1.0,), 0.5), ((2.0,), 0.5)], 1)
    base = solve_mk(m0, m1, SQRT).value
    constrained = solve_mk(m0, m1, SQRT,
                           forbidden_arcs=lambda i, j: (i, j) == (0, 0))
    assert constrained.value >= base - 1e-12
    with pytest.raises(Infeasible):
        solve_mk(m0, m1, SQRT, forbidden_arcs=lambda i, j: i == 0)


def test_brute_force_examples():
    m = _uniform([(0.0,), (1.0,), (2.0,)])
    assert brute_force_mk(m, m, SQRT).value == pytest.approx(0.0, abs=1e-12)
    m0 = validate_measure([((0.0,), 0.5), ((3.0,), 0.5)], 1)
    m1 = validate_measure([((1.0,), 0.5), ((2.0,), 0.5)], 1)
    assert brute_force_mk(m0, m1, SQRT).value == pytest.approx(1.0)


def test_brute_force_guards():
    m9 = _uniform([(float(i),) for i in range(9)])
    with pytest.raises(TooLarge):
        brute_force_mk(m9, m9, SQRT)
    with pytest.raises(UnequalWeights):
        brute_force_mk(HALF, validate_measure([((0.0,), 1.0)], 1), SQRT)
    uneven = validate_measure([((0.0,), 0.3), ((1.0,), 0.7)], 1)
    with pytest.raises(UnequalWeights):
        brute_force_mk(uneven, uneven, SQRT)


def test_lp_matches_brute_force_random():
    rng = np.random.default_rng(5)
    for trial in range(20):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, 4))
        m0 = _uniform(rng.uniform(-2, 2, size=(n, d)).tolist(), d)
        m1 = _uniform(rng.uniform(-2, 2, size=(n, d)).tolist(), d)
        cost = power_cost(float(rng.uniform(0.2, 1.0)))
        assert solve_mk(m0, m1, cost).value == pytest.approx(
            brute_force_mk(m0, m1, cost).value, abs=1e-9)


def test_t_p_examples():
    d0 = validate_measure([((0.0,), 1.0)], 1)
    d1 = validate_measure([((1.0,), 1.0)], 1)
    assert t_p(d0, d1, 1.0) == pytest.approx(1.0)
    split = validate_measure([((1.0,), 0.5), ((-1.0,), 0.5)], 1)
    assert t_p(d0, split, 1.0) == pytest.approx(1.0)
    m0 = validate_measure([((0.0,), 0.5), ((3.0,), 0.5)], 1)
    m1 = validate_measure([((1.0,), 0.5), ((2.0,), 0.5)], 1)
    assert t_p(m0, m1, 1.0) == pytest.approx(1.0)
    assert t_p(d0, d1, 2.0) == pytest.approx(1.0)  # exponents above 1 work too


def test_value_matches_plan_cost():
    m0 = random_measure(1, 4, 2, 2.0)
    m1 = random_measure(2, 3, 2, 2.0)
    sol = solve_mk(m0, m1, SQRT)
    diff = m0.points[:, None, :] - m1.points[None, :, :]
    c = np.sqrt(np.linalg.norm(diff, axis=2))
    assert sol.value == pytest.approx(float((sol.plan.plan * c).sum()),
                                      abs=1e-10)


def test_scaling_invariance():
    m0 = random_measure(10, 4, 2, 2.0)
    m1 = random_measure(11, 4, 2, 2.0)
    base = solve_mk(m0, m1, SQRT)
    scaled_cost = CostFunction(name="scaled", fn=lambda u: 3.0 * u ** 0.5)
    scaled = solve_mk(m0, m1, scaled_cost)
    assert scaled.value == pytest.approx(3.0 * base.value, rel=1e-10)
    # the scaled solver's plan is optimal for the unscaled problem
    diff = m0.points[:, None, :] - m1.points[None, :, :]
    c = np.sqrt(np.linalg.norm(diff, axis=2))
    assert float((scaled.plan.plan * c).sum()) == pytest.approx(base.value,
                                                                abs=1e-10)


def test_deterministic():
    m0 = random_measure(20, 5, 2, 2.0)
    m1 = random_measure(21, 5, 2, 2.0)
    a = solve_mk(m0, m1, SQRT)
    b = solve_mk(m0, m1, SQRT)
    assert np.array_equal(a.plan.plan, b.plan.plan)
    assert a.value == b.value
