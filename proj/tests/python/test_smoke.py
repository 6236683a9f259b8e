import math

import preqmc


def test_sobol_dim1_is_radical_inverse():
    pts = preqmc.sobol_points(8, 1)
    assert pts[:, 0].tolist() == [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]


def test_scrambled_sobol_differs_and_stays_in_unit_cube():
    a = preqmc.sobol_points(64, 4, scramble_seed=1)
    b = preqmc.sobol_points(64, 4, scramble_seed=2)
    assert (a != b).any()
    assert (a >= 0.0).all() and (a < 1.0).all()


def test_inverse_normal_roundtrip():
    for u in (1e-9, 0.025, 0.5, 0.9, 1 - 1e-9):
        assert abs(preqmc.normal_cdf(preqmc.inv_normal_cdf(u)) - u) < 1e-12


def test_factorization_residuals():
    for method in ("standard", "bridge", "pca"):
        assert preqmc.factorization_residual(method, 64) < 1e-9


def test_one_dim_price_is_analytic():
    v = preqmc.price(method="pre-qmc", d=1, n=4096, seed=7)
    assert abs(v - preqmc.analytic_digital_price()) < 1e-9


def test_price_within_payoff_bounds():
    v = preqmc.price(method="pre-qmc", d=16, n=4096, seed=7)
    assert 0.0 <= v <= math.exp(-0.1)


def test_anova_shares_sum_to_total():
    shares = preqmc.anova_shares(d=2, nodes=24)
    total = shares.pop("total")
    shares.pop("mean")
    assert math.isclose(sum(shares.values()), total, rel_tol=1e-6)
    assert all(v >= -1e-12 for v in shares.values())
