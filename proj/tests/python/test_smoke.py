import json
import math

import pytest

import phlb


def test_phase_type_basics():
    ph = phlb.PhaseType(alpha=[0.5, 0.5], T=[[-4.0, 3.0], [2.0, -7.0]])
    assert ph.order == 2
    assert ph.mean() == pytest.approx(4 / 11, rel=1e-12)
    assert ph.service_rate() == pytest.approx(2.75, rel=1e-12)
    assert list(ph.omega) == pytest.approx([0.5625, 0.4375], rel=1e-12)
    assert ph.theta(2) == pytest.approx(0.5078125, rel=1e-12)
    assert ph.residual().mean() == pytest.approx(ph.moment(2) / (2 * ph.mean()), rel=1e-12)

    doc = json.loads(ph.to_json())
    again = phlb.dist_from_json(json.dumps(doc))
    assert again.mean() == ph.mean()


def test_constructors_and_parse():
    assert phlb.erlang(2, 3).mean() == pytest.approx(2 / 3, rel=1e-12)
    assert phlb.exponential(2.0).mean() == pytest.approx(0.5, rel=1e-12)
    hyper = phlb.hyper_exponential([0.5, 0.5], [3.0, 10.0])
    assert hyper.mean() == pytest.approx(13 / 60, rel=1e-12)
    assert phlb.coxian2(1.0, 2.0, 2.0).moment(2) == pytest.approx(
        phlb.erlang(2, 2).moment(2), rel=1e-12
    )
    parsed = phlb.parse_dist("hyperexp:0.5,0.5;3,10")
    assert parsed.mean() == pytest.approx(hyper.mean(), rel=1e-14)
    with pytest.raises(ValueError):
        phlb.parse_dist("nope:1")


def test_fixed_point_and_sojourn():
    params = phlb.ModelParams(phlb.exponential(1.0), 0.9, 2)
    table = phlb.fixed_point_table(params)
    assert table.rho == pytest.approx(0.9, rel=1e-14)
    for k in range(1, 6):
        assert table.tail(k) == pytest.approx(0.9 ** (2**k - 1), rel=1e-12)

    pi2 = phlb.fixed_point_vector(params, 2)
    assert pi2[0] == pytest.approx(0.9**3, rel=1e-12)

    sojourn = phlb.expected_sojourn(params)
    series = 1.0 + sum(0.9 ** (2 * (2**k - 1)) for k in range(1, 40))
    assert sojourn == pytest.approx(series, rel=1e-12)

    report = phlb.balance_residuals(params, 6)
    assert report.max_scalar() < 1e-12
    assert report.max_vector() < 1e-12

    with pytest.raises(ValueError):
        phlb.fixed_point_table(phlb.ModelParams(phlb.exponential(1.0), 1.1, 2))


def test_mean_field_round_trip():
    params = phlb.ModelParams(phlb.exponential(1.0), 0.9, 2)
    table = phlb.fixed_point_table(params)
    pi_state = phlb.state_from_table(table)
    dx = phlb.derivative(pi_state, params)
    assert max(abs(row[0]) for row in dx) < 1e-12

    start = phlb.empty_state(1, table.depth())
    traj = phlb.integrate(start, params, 5.0, samples=8)
    assert len(traj.samples) == 9
    assert traj.halving_diff < 1e-8
    last = traj.samples[-1]
    assert phlb.ordering_holds(last, pi_state)
    assert phlb.ordering_violation_count(last, table) == 0
    assert phlb.lyapunov_distance(last, table) < phlb.lyapunov_distance(start, table)


def test_fit_round_trip():
    fit = phlb.fit_moments(phlb.MomentTriple(1.0, 1.5, 3.0))
    assert fit.flags == []
    assert fit.eta == pytest.approx(1.0, abs=1e-12)
    assert fit.xi1 == pytest.approx(2.0, rel=1e-12)
    assert phlb.verify_fit(fit) < 1e-12

    clamped = phlb.fit_moments(phlb.MomentTriple(1.0, 1.2, 3.0))
    assert clamped.flags == ["a1"]
    assert clamped.used.m2 == pytest.approx(1.5, rel=1e-12)


def test_simulation_smoke():
    cfg = phlb.SimConfig(phlb.exponential(1.0))
    cfg.n = 10
    cfg.d = 2
    cfg.lam = 0.5
    cfg.horizon = 50.0
    cfg.warmup = 10.0
    cfg.replications = 2
    cfg.seed = 11
    stats = phlb.simulate(cfg)
    assert stats.completed > 0
    assert not stats.overloaded
    assert 0.5 < stats.mean_response < 5.0
    assert len(stats.tail_fractions) == cfg.tail_depth
    again = phlb.simulate(cfg)
    assert again.mean_response == stats.mean_response

    rep = phlb.run_replication(cfg, 1)
    assert rep.completed <= rep.arrivals
    assert math.isfinite(rep.little_ratio)
