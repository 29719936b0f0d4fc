import math

import pytest

import epidsa


def test_version():
    assert epidsa.__version__ == "0.1.0"


def test_solve_conserves_mass():
    p = epidsa.ModelParams(epidsa.Variant.StandardSIR, beta=2.0, gamma=1.0, rho=0.05)
    traj = epidsa.solve(p, epidsa.GridSpec.dense(10.0))
    assert traj.times[0] == 0.0
    assert traj.t_end == 10.0
    for s, i, r in zip(traj.s, traj.iota, traj.r):
        assert abs(s + i + r - 1.05) < 1e-9
    assert all(a >= b for a, b in zip(traj.s, traj.s[1:]))
    assert traj.survival(0.0) == 1.0
    t = traj.invert_survival(0.5)
    assert abs(traj.survival(t) - 0.5) < 1e-9


def test_final_size():
    assert epidsa.solve_tau(2.0, 0.05) == pytest.approx(0.82687727687458525, abs=1e-12)


def test_parameter_validation():
    with pytest.raises(ValueError):
        epidsa.ModelParams(rho=1.5)
    with pytest.raises(ValueError):
        epidsa.ModelParams(gamma=0.0)
    ok = epidsa.ModelParams(beta=3.0, gamma=1.5)
    assert ok.r0() == pytest.approx(2.0)


def test_sellke_reproducible():
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    a = epidsa.sellke_simulate(p, 200, 10, 5.0, seed=11)
    b = epidsa.sellke_simulate(p, 200, 10, 5.0, seed=11)
    assert a.infection_times == b.infection_times
    assert a.total_infected == b.total_infected
    assert 0 <= a.total_infected <= 200
    assert len(a.periods) == a.total_infected
    # initial infectives still infected at the horizon carry no recovery time
    assert len(a.initial_recoveries) <= a.m
    c = epidsa.sellke_simulate(p, 200, 10, 5.0, seed=12)
    assert c.infection_times != a.infection_times


def test_counts_pipeline():
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    sched = [float(j) for j in range(9)]
    data = epidsa.simulate_dsa_counts(p, 500, 25, sched, seed=3)
    assert data.n == 500
    assert data.m == 25
    assert data.total <= 500
    at_truth = epidsa.loglik_counts(p, data)
    away = epidsa.loglik_counts(
        epidsa.ModelParams(beta=4.0, gamma=0.3, rho=0.05), data
    )
    assert math.isfinite(at_truth)
    assert at_truth > away


def test_aggregate_matches_events():
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    ev = epidsa.sellke_simulate(p, 150, 8, 4.0, seed=5)
    counts = epidsa.aggregate_counts(ev, [0.0, 1.0, 2.0, 3.0, 4.0])
    assert sum(counts.counts) == sum(1 for t in ev.infection_times if t <= 4.0)
    ll = epidsa.loglik_infection_times(p, ev.infection_times, 4.0, n=ev.n)
    assert math.isfinite(ll)
    assert math.isfinite(epidsa.loglik_complete(p, ev))


def test_counts_need_population():
    data = epidsa.CountData([0.0, 1.0, 2.0], [5, 3])
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    with pytest.raises(ValueError):
        epidsa.loglik_counts(p, data)
    data2 = epidsa.CountData([0.0, 1.0, 2.0], [5, 3], n=100, m=5)
    assert math.isfinite(epidsa.loglik_counts(p, data2))


def test_infection_density_normalizes():
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    horizon = 8.0
    n = 500
    h = horizon / n
    total = 0.0
    prev = epidsa.density_infection(p, 0.0, horizon)
    assert prev >= 0
    for j in range(1, n + 1):
        cur = epidsa.density_infection(p, j * h, horizon)
        assert cur >= 0
        total += 0.5 * (prev + cur) * h
        prev = cur
    assert total == pytest.approx(1.0, abs=1e-3)


def test_network_variant():
    p = epidsa.ModelParams(
        epidsa.Variant.PoissonNetwork, beta=2.0, gamma=0.5, rho=0.05
    )
    traj = epidsa.solve(p, epidsa.GridSpec.dense(6.0))
    assert traj.s[-1] < traj.s[0]
    with pytest.raises(ValueError):
        epidsa.sellke_simulate(p, 100, 5, 5.0, seed=1)


def test_population_estimate():
    p = epidsa.ModelParams(beta=2.0, gamma=1.0, rho=0.05)
    sched = [float(j) for j in range(11)]
    data = epidsa.simulate_dsa_counts(p, 800, 40, sched, seed=21)
    traj = epidsa.solve(p, epidsa.GridSpec.dense(10.0))
    n_hat = epidsa.estimate_population(data, traj)
    assert 600 <= n_hat <= 1000
