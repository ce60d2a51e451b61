import numpy as np
import pytest
from oracles import gaussian_evidence

from vbmix.cavi import (
    ModelPriors,
    elbo,
    fit_best,
    init_responsibilities,
    run_cavi,
    update_component_blocks,
    update_responsibilities,
)
from vbmix.errors import NumericalError
from vbmix.family import GaussianParams, gaussian_location, exponential_rate
from vbmix.mixture import Dataset, MixtureParams, sample
from vbmix.presets import gauss6_two


def _priors(spec, phi0=1.0):
    return ModelPriors(spec, phi0)


def _gauss_data(n=200, seed=0, d=1, mus=(-2.0, 2.0)):
    comps = np.array([[m] * d for m in mus], dtype=float)
    theta = MixtureParams(gaussian_location(d), np.full(len(mus), 1.0 / len(mus)), comps)
    return sample(theta, n, seed)


def test_init_responsibilities_k_init_one():
    P = init_responsibilities(6, 3, 1, seed=0)
    assert np.array_equal(P[:, 0], np.ones(6))
    assert P[:, 1:].sum() == 0.0


def test_init_responsibilities_even_split():
    P = init_responsibilities(4, 2, 2, seed=1)
    assert np.array_equal(np.sort(P.sum(axis=0)), [2.0, 2.0])
    assert np.all(P.sum(axis=1) == 1.0)
    # sizes differ by at most 1 in the uneven case
    P = init_responsibilities(7, 3, 3, seed=1)
    sizes = P.sum(axis=0)
    assert sizes.max() - sizes.min() <= 1.0


def test_init_responsibilities_deterministic():
    assert np.array_equal(
        init_responsibilities(50, 4, 3, seed=9), init_responsibilities(50, 4, 3, seed=9)
    )


def test_init_responsibilities_validates():
    with pytest.raises(ValueError):
        init_responsibilities(10, 3, 0, seed=0)
    with pytest.raises(ValueError):
        init_responsibilities(10, 3, 4, seed=0)
    with pytest.raises(ValueError):
        init_responsibilities(2, 3, 1, seed=0)


def test_update_component_blocks_uniform_symmetry():
    data = _gauss_data(60)
    priors = _priors(data.spec)
    P = np.full((data.n, 3), 1.0 / 3.0)
    alpha, posts = update_component_blocks(data, P, priors)
    assert np.allclose(alpha, data.n / 3.0 + 1.0)
    for p in posts[1:]:
        assert np.allclose(p.mean, posts[0].mean)
        assert p.precision == posts[0].precision


def test_update_component_blocks_class_counts_and_empty_column():
    data = _gauss_data(40)
    priors = _priors(data.spec)
    P = np.zeros((data.n, 3))
    P[data.labels == 0, 0] = 1.0
    P[data.labels == 1, 1] = 1.0  # column 3 stays empty
    alpha, posts = update_component_blocks(data, P, priors)
    counts = np.array([(data.labels == 0).sum(), (data.labels == 1).sum(), 0.0])
    assert np.allclose(alpha, counts + 1.0)
    assert posts[2].precision == priors.component.precision
    assert np.allclose(posts[2].mean, priors.component.mean)


def test_update_responsibilities_k1_and_symmetry():
    data = _gauss_data(30)
    spec = data.spec
    P1 = update_responsibilities(data, np.array([5.0]), [GaussianParams([0.0], 2.0)], spec)
    assert np.allclose(P1, 1.0)
    same = [GaussianParams([0.0], 2.0), GaussianParams([0.0], 2.0)]
    P2 = update_responsibilities(data, np.array([3.0, 3.0]), same, spec)
    assert np.allclose(P2, 0.5)


def test_update_responsibilities_separated_components():
    spec = gaussian_location(1)
    data = Dataset(spec, np.array([[-2.0]]))
    posts = [GaussianParams([-2.0], 1e8), GaussianParams([2.0], 1e8)]
    P = update_responsibilities(data, np.array([1000.0, 1000.0]), posts, spec)
    assert P[0, 0] > 0.99


def test_elbo_matches_exact_evidence_k1():
    data = _gauss_data(100, seed=3, d=2, mus=(0.5,))
    priors = _priors(data.spec)
    fit = run_cavi(data, 1, priors, np.ones((data.n, 1)), tol=1e-12)
    exact = gaussian_evidence(data.observations, sigma2=1.0, tau0=1.0)
    assert fit.elbo == pytest.approx(exact, rel=1e-9)
    assert fit.elbo <= exact + 1e-9


def test_elbo_permutation_invariance():
    data = _gauss_data(80, seed=4)
    priors = _priors(data.spec)
    P = init_responsibilities(data.n, 3, 3, seed=5)
    alpha, posts = update_component_blocks(data, P, priors)
    P_new = update_responsibilities(data, alpha, posts, priors.spec)
    base = elbo(data, P_new, alpha, posts, priors)
    perm = [2, 0, 1]
    base_p = elbo(data, P_new[:, perm], alpha[perm], [posts[i] for i in perm], priors)
    assert base_p == pytest.approx(base, abs=1e-10)


def test_run_cavi_fixed_point_stops_fast():
    data = _gauss_data(100, seed=6)
    priors = _priors(data.spec)
    first = run_cavi(
        data, 2, priors, init_responsibilities(data.n, 2, 2, seed=1), tol=1e-14, max_iter=3000
    )
    again = run_cavi(data, 2, priors, first.state.responsibilities, max_iter=400)
    assert again.iterations <= 2
    assert again.elbo == pytest.approx(first.elbo, rel=1e-10)


def test_run_cavi_monotone_trace_random_instances():
    rng = np.random.default_rng(123)
    for trial in range(50):
        n = int(rng.integers(20, 80))
        K = int(rng.integers(1, 5))
        d = int(rng.integers(1, 4))
        X = rng.normal(scale=2.0, size=(n, d))
        data = Dataset(gaussian_location(d), X)
        priors = _priors(data.spec, phi0=float(rng.uniform(0.3, 6.0)))
        fit = run_cavi(
            data, K, priors,
            init_responsibilities(n, K, int(rng.integers(1, K + 1)), seed=trial),
            max_iter=60,
        )
        t = np.array(fit.state.elbo_trace)
        slack = 1e-8 * (1.0 + np.abs(t[1:]))
        assert np.all(np.diff(t) >= -slack)


def test_run_cavi_row_stochastic_and_count_invariants():
    data = _gauss_data(150, seed=8)
    priors = _priors(data.spec)
    fit = run_cavi(data, 3, priors, init_responsibilities(data.n, 3, 2, seed=2))
    P = fit.state.responsibilities
    assert np.max(np.abs(P.sum(axis=1) - 1.0)) <= 1e-10
    assert abs(fit.state.counts.sum() - data.n) <= 1e-8
    assert np.allclose(fit.state.dirichlet_alpha, fit.state.counts + priors.phi0)
    assert fit.elbo == fit.state.elbo_trace[-1]


def test_run_cavi_nonfinite_raises_with_sweep():
    # squared magnitudes overflow -> NaN logits on the first sweep
    spec = gaussian_location(1)
    data = Dataset(spec, np.array([[1e200], [-1e200], [0.0]]))
    with pytest.raises(NumericalError) as exc:
        run_cavi(data, 2, _priors(spec), init_responsibilities(3, 2, 2, seed=0))
    assert exc.value.sweep == 1


def test_fit_best_is_max_over_restarts():
    data = _gauss_data(120, seed=10)
    priors = _priors(data.spec)
    best = fit_best(data, 3, priors, seed=77)
    from vbmix.rng import child_rng

    elbos = []
    for k_init in range(1, 4):
        init = init_responsibilities(data.n, 3, k_init, child_rng(77, "cavi.init", k_init))
        elbos.append(run_cavi(data, 3, priors, init).elbo)
    assert best.elbo == pytest.approx(max(elbos), rel=0, abs=0)
    assert best.elbo >= max(elbos) - 1e-12
    assert "k_init=" in best.init_tag


def test_fit_best_k1_single_run():
    data = _gauss_data(50, seed=12)
    fit = fit_best(data, 1, _priors(data.spec), seed=3)
    assert fit.init_tag == "k_init=1 seed=3"
    assert np.allclose(fit.weight_means, [1.0])


def test_permutation_equivariance_of_init_columns():
    data = _gauss_data(90, seed=13)
    priors = _priors(data.spec)
    init = init_responsibilities(data.n, 3, 3, seed=4)
    perm = [1, 2, 0]
    a = run_cavi(data, 3, priors, init, max_iter=40)
    b = run_cavi(data, 3, priors, init[:, perm], max_iter=40)
    assert b.elbo == pytest.approx(a.elbo, abs=1e-10)
    # the fitted state is the same up to the column permutation
    assert np.allclose(a.weight_means[perm], b.weight_means, atol=1e-10)
    assert np.allclose(a.component_means[perm], b.component_means, atol=1e-8)


def test_emptying_out_smoke_table1_scale():
    # n=1000 version of the overfitted five-component fit: two live, three dead
    truth = gauss6_two()
    data = sample(truth, 1000, seed=21)
    fit = fit_best(data, 5, ModelPriors(truth.spec, 1.0), seed=5)
    w = np.sort(fit.weight_means)[::-1]
    assert abs(w[0] - 0.5) < 0.06 and abs(w[1] - 0.5) < 0.06
    assert np.all(w[2:] < 0.02)


def test_exponential_family_cavi_runs():
    theta = MixtureParams(exponential_rate(), np.array([0.5, 0.5]), np.array([[0.3], [4.0]]))
    data = sample(theta, 400, seed=30)
    fit = fit_best(data, 2, ModelPriors(data.spec, 1.0), seed=1)
    rates = np.sort(fit.component_means[:, 0])
    assert rates[0] == pytest.approx(0.3, abs=0.12)
    assert rates[1] == pytest.approx(4.0, abs=1.0)


def test_multinomial_family_cavi_runs():
    from vbmix.family import multinomial

    spec = multinomial(3, trials=10)
    theta = MixtureParams(
        spec, np.array([0.5, 0.5]), np.array([[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]])
    )
    data = sample(theta, 500, seed=31)
    fit = fit_best(data, 2, ModelPriors(spec, 1.0), seed=2)
    t = np.array(fit.state.elbo_trace)
    assert np.all(np.diff(t) >= -1e-8 * (1.0 + np.abs(t[1:])))
    fitted = fit.component_means[np.argsort(fit.component_means[:, 0])]
    assert np.max(np.abs(fitted - theta.components[[1, 0]])) < 0.06
    assert np.max(np.abs(fit.weight_means - 0.5)) < 0.08
