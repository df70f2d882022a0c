import numpy as np
import pytest

from glekin import (
    BarrierSpec,
    CovarianceError,
    InitialState,
    TimeGrid,
    ValidationError,
    correlation_form,
    decompose,
    empirical_kappa,
    ensemble_stats,
    integrate_gle,
    kinetics_curves,
    make_noise_model,
    mean_position,
    passing_probability,
    sample_noise_paths,
    simulate_ensemble,
    variance_closed,
)
from glekin.model import CorrelationForm
from glekin.sim import noise_covariance, simulate_trajectories

from .conftest import NOISE_KINDS


def test_grid():
    g = TimeGrid(5.0, 0.01)
    assert g.n == 501 and g.times[-1] == pytest.approx(5.0)
    with pytest.raises(ValidationError):
        TimeGrid(0.1, 0.2)


def test_same_seed_same_path():
    corr = correlation_form(make_noise_model("HAN"))
    g = TimeGrid(2.0, 0.01)
    a = sample_noise_paths(corr, g, 1, seed=5)
    b = sample_noise_paths(corr, g, 1, seed=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_noise_paths(corr, g, 1, seed=6))


def test_zero_intensity_paths_vanish():
    corr = correlation_form(make_noise_model("HN", eta=0.0))
    assert np.all(sample_noise_paths(corr, TimeGrid(1.0, 0.01), 3, seed=1) == 0)


@pytest.mark.parametrize("kind", NOISE_KINDS)
def test_lag_zero_variance(kind):
    corr = correlation_form(make_noise_model(kind))
    g = TimeGrid(0.2, 0.01)
    paths = sample_noise_paths(corr, g, 10_000, seed=17)
    sample = paths[:, 5]
    target = corr.smooth(0.0) + corr.delta_weight / g.dt
    se = target * np.sqrt(2 / (len(sample) - 1))
    assert abs(sample.var(ddof=1) - target) < 3 * se
    # the sampler's exact population variance differs from the point value by O(dt)
    assert noise_covariance(corr, g)[0, 0] == pytest.approx(target, rel=0.02)


def test_cell_averaged_covariance_converges_to_point_covariance():
    corr = correlation_form(make_noise_model("HVN"))
    for dt in (0.01, 0.001):
        cov = noise_covariance(corr, TimeGrid(10 * dt, dt))
        lags = np.arange(1, 10) * dt
        assert np.allclose(cov[0, 1:10], corr.smooth(lags), rtol=5 * dt)


def test_non_psd_covariance_is_reported():
    bad = CorrelationForm([-1.0], [-1.0], 0.0)
    with pytest.raises(CovarianceError, match="most negative eigenvalue") as info:
        sample_noise_paths(bad, TimeGrid(1.0, 0.1), 2, seed=0)
    assert info.value.min_eigenvalue < 0


def test_inverted_oscillator_without_friction(barrier):
    model = make_noise_model("Ohmic", gamma_ohmic=0.0, eta=0.0)
    errs = []
    for dt in (0.02, 0.01):
        g = TimeGrid(3.0, dt)
        x, _ = integrate_gle(model, barrier, np.zeros(g.n - 1), InitialState(0.0, 2.0), g)
        errs.append(np.max(np.abs(x - 2.0 * np.sinh(g.times))))
    assert errs[1] < 1e-3
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)


@pytest.mark.parametrize("kind", NOISE_KINDS + ("Ohmic",))
def test_noise_free_trajectory_follows_mean(kind, barrier):
    # with the noise switched off the trajectory is the mean position
    model = make_noise_model(kind, gamma_ohmic=1.0)
    d = decompose(model, barrier)
    st = InitialState(0.3, 2.0)
    errs = []
    for dt in (0.02, 0.01, 0.005):
        g = TimeGrid(4.0, dt)
        x, _ = integrate_gle(model, barrier, np.zeros(g.n - 1), st, g)
        errs.append(np.max(np.abs(x - mean_position(d, st, barrier, g.times))))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.2) & (ratios < 4.8)), ratios
    assert errs[1] < 5e-3 * np.max(np.abs(mean_position(d, st, barrier, 4.0)))


def test_identical_trajectories_stats():
    g = TimeGrid(1.0, 0.1)
    x = np.tile(np.linspace(-1, 1, g.n), (5, 1))
    r = ensemble_stats(x, g)
    assert np.all(r.var_hat == 0)
    assert set(np.unique(r.chi_hat)) <= {0.0, 1.0}


def test_ensemble_matches_analytic_small(barrier, state):
    model = make_noise_model("HN")
    d, c = decompose(model, barrier), correlation_form(model)
    g = TimeGrid(4.0, 0.01)
    r = simulate_ensemble(model, barrier, state, g, 3000, seed=3, workers=2)
    for t in (1.0, 2.0, 4.0):
        i = g.index(t)
        var = variance_closed(d, c, t)
        chi = passing_probability(mean_position(d, state, barrier, t), np.sqrt(var))
        assert abs(r.var_hat[i] - var) < 3 * r.se_var[i]
        assert abs(r.chi_hat[i] - chi) < 3 * np.sqrt(chi * (1 - chi) / r.n_traj)
        assert abs(r.kappa_hat[i] - kinetics_curves(model, barrier, state, [t]).kappa[0]) < \
            3 * r.se_kappa[i]


def test_worker_count_does_not_change_results(barrier, state):
    model = make_noise_model("HAN")
    g = TimeGrid(2.0, 0.01)
    a = simulate_trajectories(model, barrier, state, g, 600, seed=42, workers=1)
    b = simulate_trajectories(model, barrier, state, g, 600, seed=42, workers=8)
    assert np.array_equal(a, b)
    ka = empirical_kappa(model, barrier, g, 600, seed=1, workers=1)
    kb = empirical_kappa(model, barrier, g, 600, seed=1, workers=8)
    assert np.array_equal(ka.kappa, kb.kappa) and np.array_equal(ka.se, kb.se)


def test_empirical_kappa_noise_free(barrier):
    model = make_noise_model("HN", eta=0.0)
    est = empirical_kappa(model, barrier, TimeGrid(3.0, 0.01), 200, seed=0)
    assert np.all(est.kappa[1:] == 1.0)


def test_empirical_kappa_ohmic_kramers(ohmic, barrier):
    est = empirical_kappa(ohmic, barrier, TimeGrid(10.0, 0.01), 20_000, seed=8, workers=4)
    assert abs(est.kappa[-1] - (5**0.5 - 1) / 2) < 3 * est.se[-1]


@pytest.mark.parametrize("kind", NOISE_KINDS)
def test_empirical_kappa_matches_analytic(kind, barrier):
    model = make_noise_model(kind)
    g = TimeGrid(8.0, 0.01)
    est = empirical_kappa(model, barrier, g, 6000, seed=21, workers=4)
    exact = kinetics_curves(model, barrier, None, g.times).kappa
    for t in (1.0, 4.0, 8.0):
        i = g.index(t)
        assert abs(est.kappa[i] - exact[i]) < 3 * est.se[i]


def test_empirical_kappa_requires_ensemble(barrier):
    with pytest.raises(ValidationError):
        empirical_kappa(make_noise_model("HN"), barrier, TimeGrid(1.0, 0.1), 10, seed=0)


@pytest.mark.parametrize("kind", ["Ohmic", "HN"])
def test_stable_well_equipartition(kind):
    # stable well: long-time velocity variance must reach kT/m (validates the FDT convention)
    model = make_noise_model(kind, gamma_ohmic=1.0, kT=1.3, mass=1.0)
    barrier = BarrierSpec(1.0)
    corr = correlation_form(model)
    g = TimeGrid(15.0, 0.01)
    n = 1500
    rng = np.random.default_rng(4)
    x0 = rng.normal(0, np.sqrt(model.kT / model.mass), n)
    v0 = rng.normal(0, np.sqrt(model.kT / model.mass), n)
    noise = sample_noise_paths(corr, g, n, seed=4)
    _, v = integrate_gle(model, barrier, noise, (x0, v0), g, well=True)
    per_traj = np.mean(v[:, g.times >= 7.5] ** 2, axis=1)
    se = per_traj.std(ddof=1) / np.sqrt(n)
    assert abs(per_traj.mean() - model.kT / model.mass) < 3 * se


def test_statistical_consistency_over_seeds(barrier, state):
    model = make_noise_model("HN")
    d, c = decompose(model, barrier), correlation_form(model)
    g = TimeGrid(4.0, 0.02)
    times = (1.0, 2.0, 4.0)
    chi = {t: passing_probability(mean_position(d, state, barrier, t),
                                  np.sqrt(variance_closed(d, c, t))) for t in times}
    inside = {t: 0 for t in times}
    for seed in range(20):
        r = simulate_ensemble(model, barrier, state, g, 1500, seed=1000 + seed, workers=4)
        for t in times:
            se = np.sqrt(chi[t] * (1 - chi[t]) / r.n_traj)
            inside[t] += abs(r.chi_hat[g.index(t)] - chi[t]) <= 3 * se
    assert all(v >= 18 for v in inside.values()), inside
