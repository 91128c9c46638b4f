import numpy as np
import pytest

from metasub.diag import (
    check_discrete_integral,
    check_expectation_inequality,
    check_one_sided_smooth,
    classify,
    gamma_parameter,
    multilinear_exact,
    multilinear_gradient_exact,
    multilinear_hessian_exact,
    multilinear_mc,
    pair_seed_constant,
    verify_lemmas,
)
from metasub.errors import GuardError
from metasub.matroid import UniformMatroid
from metasub.setfn import build_coverage, build_diversity, build_table, build_weighted_sum, mask_of
from util import random_coverage, random_diversity, random_metric, random_mixed_oracle


def all_ones_diversity(n=4):
    return build_diversity(np.ones((n, n)) - np.eye(n))


def test_gamma_all_ones_diversity():
    report = gamma_parameter(all_ones_diversity())
    assert report.gamma == pytest.approx(1.0)
    s, i, j = report.witness
    # equality is attained at the witness
    fn = all_ones_diversity()
    lhs = s.bit_count() * fn.second_difference(i, j, s)
    rhs = report.gamma * (fn.marginal(i, s) + fn.marginal(j, s))
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_gamma_submodular_is_vacuous():
    rng = np.random.default_rng(0)
    report = gamma_parameter(random_coverage(rng, 6))
    assert report.vacuous
    assert report.gamma == 0.0


def test_gamma_squared_line_diversity():
    D = np.array([[0, 1, 4], [1, 0, 1], [4, 1, 0]], dtype=float)
    report = gamma_parameter(build_diversity(D))
    assert report.gamma <= 2 + 1e-6


def test_gamma_infinite_flag():
    # a positive second difference with zero marginals
    fn = build_table([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    report = gamma_parameter(fn)
    assert report.is_infinite
    assert report.zero_denominators >= 1


def test_gamma_scale_invariant():
    rng = np.random.default_rng(1)
    fn = random_diversity(rng, 5)
    doubled = build_weighted_sum([(fn, 2.0)])
    assert gamma_parameter(fn).gamma == pytest.approx(gamma_parameter(doubled).gamma)


def test_gamma_guard():
    with pytest.raises(GuardError):
        gamma_parameter(all_ones_diversity(4), n_max=3)


def test_classify_metric_diversity():
    rng = np.random.default_rng(2)
    rep = classify(random_diversity(rng, 6))
    assert rep.monotone and rep.supermodular and rep.second_order_submodular
    assert not rep.submodular


def test_classify_coverage():
    rng = np.random.default_rng(3)
    rep = classify(random_coverage(rng, 6))
    assert rep.monotone and rep.submodular


def test_classify_non_monotone_witness():
    rep = classify(build_table([0.0, 1.0, 1.0, 0.5]))
    assert not rep.monotone
    w = rep.witnesses["monotone"]
    assert w["B"] == pytest.approx(-0.5)


def test_multilinear_indicator_identities():
    rng = np.random.default_rng(4)
    fn = random_mixed_oracle(rng, 6)
    for mask in (0, 0b1011, 0b111111):
        x = np.array([(mask >> i) & 1 for i in range(6)], dtype=float)
        assert multilinear_exact(fn, x) == pytest.approx(fn.value(mask), abs=1e-12)
        for i in range(6):
            assert multilinear_gradient_exact(fn, x, i) == pytest.approx(
                fn.marginal(i, mask), abs=1e-12
            )
            for j in range(6):
                assert multilinear_hessian_exact(fn, x, i, j) == pytest.approx(
                    fn.second_difference(i, j, mask), abs=1e-12
                )


def test_multilinear_quadratic_closed_form():
    rng = np.random.default_rng(5)
    D = random_metric(rng, 5)
    g = rng.random(5)
    fn = build_diversity(D, g)
    for _ in range(20):
        x = rng.random(5)
        closed = 0.5 * x @ D @ x + g @ x
        assert multilinear_exact(fn, x) == pytest.approx(closed, rel=1e-9)


def test_multilinear_gradient_matches_finite_difference():
    rng = np.random.default_rng(6)
    fn = random_mixed_oracle(rng, 6)
    h = 1e-5
    for _ in range(20):
        x = rng.random(6) * 0.9 + 0.05
        i = int(rng.integers(0, 6))
        plus, minus = x.copy(), x.copy()
        plus[i] += h
        minus[i] -= h
        fd = (multilinear_exact(fn, plus) - multilinear_exact(fn, minus)) / (2 * h)
        assert abs(multilinear_gradient_exact(fn, x, i) - fd) < 1e-6


def test_multilinear_mc_degenerate_and_convergent():
    rng = np.random.default_rng(7)
    fn = random_diversity(rng, 6)
    est, err = multilinear_mc(fn, np.zeros(6), 100, seed=0)
    assert est == 0.0 and err == 0.0
    mask = mask_of([0, 2, 4])
    x = np.array([(mask >> i) & 1 for i in range(6)], dtype=float)
    est, err = multilinear_mc(fn, x, 100, seed=0)
    assert est == pytest.approx(fn.value(mask)) and err == pytest.approx(0.0, abs=1e-12)

    hits = 0
    x = rng.random(6)
    exact = multilinear_exact(fn, x)
    for seed in range(50):
        est, err = multilinear_mc(fn, x, 20_000, seed=seed)
        if abs(est - exact) <= 4 * err:
            hits += 1
    assert hits >= 48  # >= 95% of seeded trials


def test_smoothness_supermodular_prediction():
    rng = np.random.default_rng(8)
    fn = random_diversity(rng, 6)
    gamma = gamma_parameter(fn).gamma
    sigma = max(3 * gamma, 2 * gamma + 1)
    for _ in range(20):
        x = rng.random(6) * 0.9 + 0.05
        u = rng.random(6)
        assert check_one_sided_smooth(fn, x, u, sigma).residual <= 1e-9
        i, j = rng.choice(6, size=2, replace=False)
        assert check_expectation_inequality(fn, x, int(i), int(j), sigma) <= 1e-9


def test_smoothness_zero_direction_and_zero_point():
    fn = all_ones_diversity()
    chk = check_one_sided_smooth(fn, np.full(4, 0.5), np.zeros(4), 1.0)
    assert chk.lhs == 0.0 and chk.rhs == 0.0
    with pytest.raises(GuardError):
        check_one_sided_smooth(fn, np.zeros(4), np.ones(4), 1.0)


def test_smoothness_violation_at_gamma_witness():
    # the meta-submodularity inequality is exactly one-sided smoothness at
    # indicator points with direction 1_{i,j} and sigma = gamma/2
    rng = np.random.default_rng(9)
    fn = random_diversity(rng, 6, power=2.0)
    report = gamma_parameter(fn)
    s, i, j = report.witness
    x = np.array([(s >> b) & 1 for b in range(6)], dtype=float)
    u = np.zeros(6)
    u[i] = u[j] = 1.0
    assert check_one_sided_smooth(fn, x, u, report.gamma / 2).residual <= 1e-9
    too_small = report.gamma * 0.99 / 2
    assert check_one_sided_smooth(fn, x, u, too_small).residual > 0


def test_subdomain_smoothness():
    rng = np.random.default_rng(10)
    fn = random_diversity(rng, 6, power=2.0)
    gamma = gamma_parameter(fn).gamma
    for alpha in (1.0, 1.5, 2.0):
        for _ in range(10):
            mask = int(rng.integers(1, 1 << 6))
            size = mask.bit_count()
            x = np.array([(mask >> b) & 1 for b in range(6)], dtype=float)
            slackvec = rng.random(6) * (1 - x)
            budget = alpha * size - size
            if slackvec.sum() > 0:
                x = x + slackvec * min(1.0, budget / slackvec.sum())
            u = rng.random(6)
            assert check_one_sided_smooth(fn, x, u, alpha * gamma).residual <= 1e-9


def test_discrete_integral_modular_and_random():
    modular = build_diversity(np.zeros((4, 4)), weights=[1.0, 2.0, 3.0, 4.0])
    assert check_discrete_integral(modular).passed
    rng = np.random.default_rng(11)
    for _ in range(5):
        assert check_discrete_integral(random_mixed_oracle(rng, 6)).passed


def test_verify_lemmas_metric_diversity():
    rng = np.random.default_rng(12)
    fn = random_diversity(rng, 8)
    checks = verify_lemmas(fn, matroid=UniformMatroid(8, 3))
    for name in (
        "discrete_integral",
        "marginal_sum_bound",
        "second_order_marginal_bound",
        "gradient_growth",
        "kleinberg_equivalence",
        "pair_seed_bound",
    ):
        assert checks[name].passed, (name, checks[name])


def test_verify_lemmas_skips_when_hypotheses_fail():
    non_monotone = build_table([0.0, 1.0, 1.0, 0.5])
    checks = verify_lemmas(non_monotone)
    assert checks["marginal_sum_bound"].passed is None
    assert checks["marginal_sum_bound"].skipped_reason


def test_pair_seed_constant_small_cases():
    assert pair_seed_constant(2, 1.0) == 1.0
    assert pair_seed_constant(3, 1.0) == pytest.approx(1.0 + 3.0)  # 2*gamma+1 at stage 3
    assert pair_seed_constant(4, 1.0) == pytest.approx(1.0 + 3.0 + 3.0 * 2.0)
