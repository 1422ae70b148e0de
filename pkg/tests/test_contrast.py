import numpy as np
import pytest

from oudrift.contrast import (
    DegenerateLocalizationError,
    LocalizationConfig,
    _reduce_terms,
    build_context,
    empirical_norm_sq,
    estimate_disc_bias,
    gradient,
    localization_from_observations,
    loss,
)
from oudrift.models import generate_drift
from oudrift.simulate import LevyRegime, ObservationSet, PathConfig, simulate_path


def make_obs(d=4, n=400, seed=0, delta_n=0.1):
    model = generate_drift(d=d, r=1, s=d, seed=seed, spectral_floor=0.5)
    regime = LevyRegime(tag="continuous", sigma=np.eye(d))
    obs = simulate_path(model, regime, PathConfig(delta_n=delta_n, n_obs=n, substeps=4, seed=seed))
    return model, obs


def noiseless_obs(model, x0, n, delta_n):
    # substeps=1 makes the increment identity dX = -A0 X dn exact
    regime = LevyRegime(tag="continuous", sigma=None)
    cfg = PathConfig(delta_n=delta_n, n_obs=n, substeps=1, burn_in_time=0.0, seed=0)
    return simulate_path(model, regime, cfg, x0=x0)


def test_localization_config_validation():
    with pytest.raises(ValueError):
        LocalizationConfig(radius_b=0.0, eta=1.0)
    with pytest.raises(ValueError):
        LocalizationConfig(radius_b=1.0, eta=0.0)


def test_build_context_no_truncation():
    _, obs = make_obs()
    ctx = build_context(obs, LocalizationConfig(radius_b=1e9, eta=1e9))
    assert ctx.n_active == ctx.n
    x = obs.states[:-1]
    np.testing.assert_allclose(ctx.c_n, x.T @ x / ctx.n, atol=1e-12)


def test_build_context_total_truncation_errors():
    _, obs = make_obs()
    with pytest.raises(DegenerateLocalizationError):
        build_context(obs, LocalizationConfig(radius_b=1e9, eta=1e-15))


def test_build_context_hand_dataset():
    obs = ObservationSet.from_states(np.array([[1.0], [3.0]]), delta_n=1.0)
    ctx = build_context(obs, LocalizationConfig(radius_b=2.0, eta=10.0))
    assert ctx.n_active == 1
    np.testing.assert_allclose(ctx.c_n, [[1.0]])


def test_loss_zero_on_noiseless_data_at_truth():
    model = generate_drift(d=3, r=1, s=2, seed=4, spectral_floor=0.5)
    obs = noiseless_obs(model, x0=np.array([1.0, -1.0, 0.5]), n=30, delta_n=0.05)
    ctx = build_context(obs, LocalizationConfig(radius_b=1e9, eta=1e9))
    assert loss(ctx, model.a0) <= 1e-15  # exact cancellation up to fp roundoff
    np.testing.assert_allclose(gradient(ctx, model.a0), np.zeros((3, 3)), atol=1e-14)


def test_loss_at_zero_is_mean_squared_increment():
    _, obs = make_obs()
    ctx = build_context(obs, LocalizationConfig(radius_b=1e9, eta=1e9))
    expected = np.sum(obs.increments**2) / ctx.n
    assert loss(ctx, np.zeros((obs.d, obs.d))) == pytest.approx(expected)


def test_loss_and_gradient_hand_case():
    # one observation: X0 = 2, dX = -1, delta_n = 0.5, a = 0.5
    obs = ObservationSet.from_states(np.array([[2.0], [1.0]]), delta_n=0.5)
    ctx = build_context(obs, LocalizationConfig(radius_b=10.0, eta=10.0))
    a = np.array([[0.5]])
    # residual: -1 + 0.5 * 2 * 0.5 = -0.5
    assert loss(ctx, a) == pytest.approx(0.25)
    # gradient: 2 * 0.5 * (-0.5) * 2 = -1
    assert gradient(ctx, a)[0, 0] == pytest.approx(-1.0)


def test_gradient_matches_finite_differences():
    _, obs = make_obs(d=4, n=200, seed=3)
    ctx = build_context(obs, localization_from_observations(obs))
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = rng.standard_normal((4, 4))
        g = gradient(ctx, a)
        fd = np.zeros_like(g)
        h = 1e-6
        for i in range(4):
            for j in range(4):
                ap = a.copy(); ap[i, j] += h
                am = a.copy(); am[i, j] -= h
                fd[i, j] = (loss(ctx, ap) - loss(ctx, am)) / (2 * h)
        assert np.linalg.norm(fd - g) / np.linalg.norm(g) <= 1e-5


def test_empirical_norm_formulas_agree():
    _, obs = make_obs(d=3, n=150, seed=5)
    ctx = build_context(obs, localization_from_observations(obs))
    rng = np.random.default_rng(1)
    x = obs.states[:-1]
    for _ in range(10):
        a = rng.standard_normal((3, 3))
        direct = sum(
            float(np.sum((a @ x[k]) ** 2))
            for k in range(ctx.n)
            if ctx.active[k]
        ) / ctx.n
        assert abs(empirical_norm_sq(ctx, a) - direct) <= 1e-10 * max(1.0, direct)
    assert empirical_norm_sq(ctx, np.zeros((3, 3))) == 0.0
    assert empirical_norm_sq(ctx, np.eye(3)) == pytest.approx(np.trace(ctx.c_n))


def test_loss_is_exactly_quadratic():
    _, obs = make_obs(d=4, n=250, seed=6)
    ctx = build_context(obs, localization_from_observations(obs))
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4))
        lhs = loss(ctx, a)
        rhs = (
            loss(ctx, b)
            + float(np.sum(gradient(ctx, b) * (a - b)))
            + ctx.delta_n**2 * empirical_norm_sq(ctx, a - b)
        )
        assert abs(lhs - rhs) <= 1e-9


def test_loss_convexity_on_random_triples():
    _, obs = make_obs(d=3, n=100, seed=7)
    ctx = build_context(obs, localization_from_observations(obs))
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3))
        t = float(rng.uniform())
        mix = loss(ctx, t * a + (1 - t) * b)
        assert mix <= t * loss(ctx, a) + (1 - t) * loss(ctx, b) + 1e-10


def test_c_n_is_psd():
    _, obs = make_obs(d=5, n=300, seed=8)
    ctx = build_context(obs, localization_from_observations(obs))
    assert np.min(np.linalg.eigvalsh(ctx.c_n)) >= -1e-12


def test_enlarging_localization_never_shrinks_active_set():
    _, obs = make_obs(d=3, n=200, seed=9)
    base = localization_from_observations(obs, radius_mult=1.0, eta_mult=1.0)
    n_base = build_context(obs, base).n_active
    wider = LocalizationConfig(radius_b=2 * base.radius_b, eta=base.eta)
    taller = LocalizationConfig(radius_b=base.radius_b, eta=2 * base.eta)
    assert build_context(obs, wider).n_active >= n_base
    assert build_context(obs, taller).n_active >= n_base


def test_reduction_is_permutation_invariant():
    _, obs = make_obs(d=3, n=150, seed=10)
    x = obs.states[:-1]
    dx = obs.increments
    loc = localization_from_observations(obs)
    _, s0_a, m1_a, cn_a = _reduce_terms(x, dx, loc.radius_b, loc.eta)
    perm = np.random.default_rng(4).permutation(len(dx))
    _, s0_b, m1_b, cn_b = _reduce_terms(x[perm], dx[perm], loc.radius_b, loc.eta)
    assert abs(s0_a - s0_b) <= 1e-9
    np.testing.assert_allclose(m1_a, m1_b, atol=1e-9)
    np.testing.assert_allclose(cn_a, cn_b, atol=1e-9)


def test_disc_bias_zero_for_noiseless_linear_data():
    model = generate_drift(d=3, r=1, s=2, seed=12, spectral_floor=0.5)
    regime = LevyRegime(tag="continuous", sigma=None)
    loc = LocalizationConfig(radius_b=1e9, eta=1e9)
    table = estimate_disc_bias(
        model, regime, loc, [0.2, 0.1, 0.05], t_fixed=5.0, substeps=1,
        replicates=2, seed=0, x0=np.array([1.0, 0.5, -0.5]), burn_in_time=0.0,
    )
    assert table.shape == (3, 2)
    assert np.all(table[:, 1] <= 1e-15)  # zero up to fp roundoff


def test_disc_bias_single_mesh_single_row():
    model = generate_drift(d=2, r=0, s=1, seed=13, spectral_floor=0.5)
    regime = LevyRegime(tag="continuous", sigma=np.eye(2))
    loc = LocalizationConfig(radius_b=1e9, eta=1e9)
    table = estimate_disc_bias(model, regime, loc, [0.1], t_fixed=5.0, replicates=2, seed=1)
    assert table.shape == (1, 2)
    assert table[0, 0] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        estimate_disc_bias(model, regime, loc, [], t_fixed=5.0)
