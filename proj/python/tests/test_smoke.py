"""Smoke tests for the python bindings: thin checks that the compiled module is
sane; the heavy validation lives in the C++ suites."""

import math

import pytest

import randsum


def test_sum_exponents_branches():
    e = randsum.sum_exponents(2.0, 0.0)
    assert (e.power, e.log_power) == (2.0, 0.0)
    e = randsum.sum_exponents(float("inf"), 5.0)
    assert (e.power, e.log_power) == (2.0, 0.0)
    e = randsum.sum_exponents(1.0, -2.0)
    assert e.power == pytest.approx(2.0 / 3.0)
    assert e.log_power == pytest.approx(-4.0 / 3.0)
    with pytest.raises(ValueError):
        randsum.sum_exponents(1.5, 1.0)


def test_rate_function_matches_gaussian_closed_form():
    model = randsum.CumulantModel.normal()
    for x in (0.5, 1.0, 2.0, 3.0):
        assert randsum.rate_function(model, x) == pytest.approx(x * x / 2, abs=1e-6)


def test_orlicz_tail_and_sampling_free():
    spec = randsum.OrliczTailSpec(2.0, 0.0, 0.5)
    assert spec.tail(0.0) == 1.0
    assert spec.tail(2.0) == pytest.approx(math.exp(-2.0))
    assert spec.sd == pytest.approx(math.sqrt(2.0))


def test_random_sum_bound_dominates_exact_mixture():
    tail = randsum.TailFunction.standard_normal()
    model = randsum.CumulantModel.normal()
    law = randsum.IndexLaw.geometric(4.0)
    for x in (0.0, 1.0, 2.0, 3.0):
        bound = randsum.random_sum_bound(tail, model, law, 1.0, x)
        exact = sum(
            law.pmf(n) * randsum.normal_upper_tail(x * math.sqrt(4.0 / n))
            for n in range(1, 400)
        )
        assert exact <= bound <= 1.0


def test_two_point_floor():
    t = randsum.exact_two_point_tail(3.0)
    floor = randsum.normal_upper_tail(3.0 * math.sqrt(3.0 / 8.0)) / 9.0
    assert 9.0 * t.exact >= floor * 9.0 - 1e-15
    assert t.exact >= t.heavy_term


def test_simulate_tail_reproducible():
    summand = randsum.SummandLaw.standard_normal()
    law = randsum.IndexLaw.deterministic(4)
    a = randsum.simulate_tail(summand, law, [1.0, 2.0], 5000, seed=7)
    b = randsum.simulate_tail(summand, law, [1.0, 2.0], 5000, seed=7)
    assert a.hits == b.hits
    assert a.estimate == b.estimate
    # deterministic index of 4 normals: S is exactly standard normal
    psi2 = randsum.normal_upper_tail(2.0)
    assert a.ci_low[1] <= psi2 <= a.ci_high[1]


def test_stopped_exponents_identity():
    e = randsum.stopped_sum_exponents(2.0, 0.0, 2.0, 0.0)
    assert e.q == pytest.approx(4.0 / 7.0)
    assert e.w == pytest.approx(4.0 / 7.0)
    assert 1.0 / e.q == pytest.approx(1.0 + 1.0 / 4.0 + 1.0 / 2.0, abs=1e-12)
