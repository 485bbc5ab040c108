import math

import pytest

import _bassdp as bd


def test_arrival_rate_hand_values():
    params = bd.MarketParams(m=100, alpha=0.1, beta=0.4, phi=1.0)
    assert bd.arrival_rate(params, 0.0, 0.5) == pytest.approx(15.0)
    assert bd.arrival_rate(params, 2.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        bd.arrival_rate(params, -1.0, 0.5)


def test_fluid_closed_forms():
    params = bd.MarketParams(m=1, alpha=1.0, beta=0.0, phi=1.0)
    e = math.e
    assert bd.final_adoption(params, e) == pytest.approx(0.5, rel=1e-12)
    assert bd.optimal_price_curve(params, e, 0.0) == pytest.approx(1.0 + math.log(2.0), rel=1e-12)
    assert bd.optimal_policy_price(params, 0.0, e) == pytest.approx(1.0 + math.log(2.0), rel=1e-12)
    assert bd.det_value(params, 0.0, e) > 0.0
    assert bd.price_upper_bound(params, e) == pytest.approx(math.log(e + e), rel=1e-12)
    assert bd.segment_time(params, 0.0, 0.0, 0.5) == pytest.approx(math.log(2.0), rel=1e-12)


def test_kl_exponential():
    assert bd.kl_exponential(2.0, 1.0) == pytest.approx(1.0 - math.log(2.0), rel=1e-12)
    assert bd.kl_exponential(1.5, 1.5) == 0.0


def test_simulate_deterministic_and_pseudo_regret():
    params = bd.MarketParams(m=500, alpha=0.4, beta=0.5, phi=1.0)
    horizon = bd.default_horizon(0.4, 0.5)
    a = bd.simulate(params, horizon, "oracle", seed=42)
    b = bd.simulate(params, horizon, "oracle", seed=42)
    assert a.arrival_times == b.arrival_times
    assert a.prices == b.prices
    assert a.revenue == b.revenue
    assert a.adopters() > 0
    pr = bd.pseudo_regret(a, params, horizon)
    assert pr == pytest.approx(bd.det_value(params, 0.0, horizon) - a.revenue)


def test_learner_runs_and_prices_are_clamped():
    params = bd.MarketParams(m=5000, alpha=0.3, beta=0.5, phi=1.0)
    horizon = bd.default_horizon(0.3, 0.5)
    trace = bd.simulate(params, horizon, "algorithm1", seed=7)
    cap = math.log(math.e + 1.0 * horizon)
    assert trace.adopters() > 0
    assert all(0.0 <= p <= cap + 1e-12 for p in trace.prices)


def test_fluid_simulate_truncation():
    params = bd.MarketParams(m=1, alpha=1.0, beta=0.0, phi=1.0)
    traj = bd.fluid_simulate(params, math.log(2.0), [(0.0, 0.0), (0.99, 0.0)])
    assert traj.x_end() == pytest.approx(0.5, rel=1e-12)


def test_dp_oracle_below_fluid_value():
    params = bd.MarketParams(m=10, alpha=0.5, beta=0.5, phi=1.0)
    horizon = math.e
    dp = bd.stoch_value_dp(params, horizon, time_steps=800, price_points=80,
                           price_max=math.log(math.e + horizon))
    assert dp <= bd.det_value(params, 0.0, horizon) + 1e-6
