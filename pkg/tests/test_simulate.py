import numpy as np
import pytest

from oudrift.models import generate_drift
from oudrift.simulate import (
    LevyRegime,
    ObservationSet,
    PathConfig,
    SimulationBlowupError,
    derive_seed,
    empirical_trunc_moment,
    sample_levy_increment,
    simulate_path,
)
from oudrift.simulate import _sample_increments


def test_regime_validation():
    with pytest.raises(ValueError):
        LevyRegime(tag="weird")
    with pytest.raises(ValueError):
        LevyRegime(tag="continuous", jump_rate=1.0)
    with pytest.raises(ValueError):
        LevyRegime(tag="polymoment", p=2.0)
    with pytest.raises(ValueError):
        LevyRegime(tag="subweibull", alpha=0.0)
    with pytest.raises(ValueError):
        LevyRegime(tag="bounded", z0=-1.0)


def test_continuous_zero_sigma_gives_zero_increment():
    regime = LevyRegime(tag="continuous", sigma=np.zeros((3, 3)))
    rng = np.random.default_rng(0)
    inc = sample_levy_increment(regime, dt=0.5, rng=rng)
    np.testing.assert_array_equal(inc, np.zeros(3))
    with pytest.raises(ValueError):
        sample_levy_increment(regime, dt=0.0, rng=rng)


def test_continuous_monte_carlo_moments():
    d = 3
    regime = LevyRegime(tag="continuous", sigma=np.eye(d))
    rng = np.random.default_rng(1)
    inc = _sample_increments(regime, 1.0, 10**5, d, rng)
    assert np.max(np.abs(inc.mean(axis=0))) <= 0.02
    cov = inc.T @ inc / inc.shape[0]
    assert np.max(np.abs(cov - np.eye(d))) <= 0.05


def test_bounded_jumps_never_exceed_z0():
    regime = LevyRegime(tag="bounded", sigma=None, jump_rate=3.0, jump_scale=2.0, z0=1.0)
    rng = np.random.default_rng(2)
    inc = _sample_increments(regime, 0.25, 20000, 2, rng)
    # single-jump windows dominate; compound sums can exceed z0, so check
    # the jump law directly as well
    from oudrift.simulate import _jump_radii

    radii = _jump_radii(regime, 10**5, rng)
    assert radii.max() <= 1.0
    assert np.all(np.isfinite(inc))


def test_martingale_property_all_regimes():
    d = 3
    regimes = [
        LevyRegime(tag="continuous", sigma=np.eye(d)),
        LevyRegime(tag="bounded", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, z0=1.0),
        LevyRegime(tag="subweibull", sigma=None, jump_rate=2.0, jump_scale=0.5, alpha=1.0),
        LevyRegime(tag="polymoment", sigma=None, jump_rate=2.0, jump_scale=0.5, p=4.0),
    ]
    for k, regime in enumerate(regimes):
        inc = _sample_increments(regime, 0.5, 10**5, d, np.random.default_rng(10 + k))
        mean = inc.mean(axis=0)
        std = inc.std(axis=0)
        assert np.all(np.abs(mean) <= 3.0 * std / np.sqrt(10**5) + 1e-12), regime.tag


def test_variance_scales_linearly_in_dt():
    d = 3
    regimes = [
        LevyRegime(tag="continuous", sigma=np.eye(d)),
        LevyRegime(tag="bounded", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, z0=1.0),
        LevyRegime(tag="subweibull", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, alpha=1.5),
        LevyRegime(tag="polymoment", sigma=0.5 * np.eye(d), jump_rate=1.0, jump_scale=0.5, p=4.0),
    ]
    for k, regime in enumerate(regimes):
        big = _sample_increments(regime, 0.2, 300000, d, np.random.default_rng(20 + k))
        small = _sample_increments(regime, 0.1, 300000, d, np.random.default_rng(21 + k))
        ratio = np.sum(big * big) / np.sum(small * small)
        assert 2.0 * 0.9 <= ratio <= 2.0 * 1.1, (regime.tag, ratio)


def test_noiseless_path_is_geometric_decay():
    a = 0.5
    d = 2
    model = generate_drift(d=d, r=0, s=0, seed=0, spectral_floor=a)  # a0 = a I
    regime = LevyRegime(tag="continuous", sigma=None)
    cfg = PathConfig(delta_n=0.2, n_obs=10, substeps=4, burn_in_time=0.0, seed=0)
    x0 = np.array([1.0, -2.0])
    obs = simulate_path(model, regime, cfg, x0=x0)
    dt = cfg.delta_n / cfg.substeps
    factor = (1.0 - a * dt) ** cfg.substeps
    expected = np.array([x0 * factor**k for k in range(cfg.n_obs + 1)])
    np.testing.assert_allclose(obs.states, expected, rtol=1e-12)


def test_path_determinism_bit_identical():
    model = generate_drift(d=4, r=1, s=3, seed=5)
    regime = LevyRegime(tag="bounded", sigma=0.5 * np.eye(4), jump_rate=1.0, jump_scale=0.4, z0=0.8)
    cfg = PathConfig(delta_n=0.1, n_obs=200, substeps=3, seed=77)
    a = simulate_path(model, regime, cfg)
    b = simulate_path(model, regime, cfg)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.increments, b.increments)


def test_increments_match_state_differences():
    model = generate_drift(d=3, r=1, s=2, seed=1)
    regime = LevyRegime(tag="continuous", sigma=np.eye(3))
    obs = simulate_path(model, regime, PathConfig(delta_n=0.1, n_obs=50, seed=4))
    np.testing.assert_array_equal(obs.increments, np.diff(obs.states, axis=0))


def test_simulation_blowup_raises():
    model = generate_drift(d=3, r=0, s=0, seed=0, spectral_floor=1.0)  # a0 = I
    regime = LevyRegime(tag="continuous", sigma=np.eye(3))
    cfg = PathConfig(delta_n=5.0, n_obs=2000, substeps=1, burn_in_time=0.0, seed=0)
    with pytest.raises(SimulationBlowupError):
        simulate_path(model, regime, cfg, x0=np.ones(3))


def test_empirical_trunc_moment():
    states = np.array([[0.0], [1.0], [3.0], [0.0]])  # increments 1, 2, -3
    obs = ObservationSet.from_states(states, delta_n=0.5)
    assert empirical_trunc_moment(obs, eta=100.0) == 0.0
    assert empirical_trunc_moment(obs, eta=1e-12) == pytest.approx((1 + 4 + 9) / 3)
    assert empirical_trunc_moment(obs, eta=1.5) == pytest.approx((4 + 9) / 3)
    with pytest.raises(ValueError):
        empirical_trunc_moment(obs, eta=0.0)


def test_csv_round_trip_exact(tmp_path):
    model = generate_drift(d=3, r=1, s=2, seed=2)
    regime = LevyRegime(tag="continuous", sigma=np.eye(3))
    obs = simulate_path(model, regime, PathConfig(delta_n=0.25, n_obs=40, seed=9))
    path = tmp_path / "obs.csv"
    obs.save_csv(path)
    loaded = ObservationSet.load_csv(path)
    assert loaded.d == obs.d
    assert loaded.delta_n == obs.delta_n
    np.testing.assert_array_equal(loaded.states, obs.states)
    np.testing.assert_array_equal(loaded.increments, obs.increments)


def test_path_config_validation():
    with pytest.raises(ValueError):
        PathConfig(delta_n=0.0, n_obs=10)
    with pytest.raises(ValueError):
        PathConfig(delta_n=0.1, n_obs=0)
    with pytest.raises(ValueError):
        PathConfig(delta_n=0.1, n_obs=10, substeps=0)
    with pytest.raises(ValueError):
        PathConfig(delta_n=0.1, n_obs=10, burn_in_time=-1.0)
    assert PathConfig(delta_n=0.1, n_obs=10).horizon == pytest.approx(1.0)


def test_derive_seed_stable_and_distinct():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
    assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
    assert derive_seed(1, "a", 2) != derive_seed(2, "a", 2)
    assert 0 <= derive_seed(123, "x") < 2**63
