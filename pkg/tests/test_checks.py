import math

import pytest

from divkit import (
    DomainError,
    GaussianDensity,
    affine_transform,
    bracket_integrals,
    exp_minus_one_phi,
    fdp_divergence,
    identity_phi,
    identity_xi,
    log_phi,
    power_phi,
    power_xi,
)
from divkit.checks import (
    check_affine_invariance,
    check_fdps_lower_bound,
    check_uv_consistency,
    equality_condition_probe,
    random_discrete_density,
    verify_jhhb_holder_representation,
)

REPORT_KEYS = {"theorem", "parameters", "trials", "seed", "worst_case", "pass"}


# ---------------------------------------------------------------------------
# affine invariance
# ---------------------------------------------------------------------------


def test_gaussian_dpd_doubles_under_sigma_two(gaussian_pair):
    # closed-form oracle: D = (1 - exp(-1/4)) / sqrt(pi) for N(0,1) vs N(1,1)
    g, f = gaussian_pair
    d = fdp_divergence(bracket_integrals(g, f, 1.0), power_phi(1.0))
    assert d == pytest.approx((1.0 - math.exp(-0.25)) / math.sqrt(math.pi), rel=1e-12)
    g_t, f_t = affine_transform(g, 2.0, 0.0), affine_transform(f, 2.0, 0.0)
    d_t = fdp_divergence(bracket_integrals(g_t, f_t, 1.0), power_phi(1.0))
    assert d_t == pytest.approx(2.0 * d, rel=1e-12)
    assert 0.5 * d_t == pytest.approx(d, rel=1e-12)  # h = |sigma|**(-gamma zeta)


@pytest.mark.parametrize("phi", [power_phi(0.5), power_phi(1.0), power_phi(2.0), log_phi()])
@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_invariance_holds_for_the_characterized_class(phi, gamma):
    report = check_affine_invariance(phi, gamma, trials=30, seed=101)
    assert report.characterized
    assert report.passed
    assert report.max_relative_violation <= 1e-5
    assert report.skipped == 0


def test_log_generator_is_scale_invariant_h_equals_one():
    report = check_affine_invariance(log_phi(), 1.0, trials=10, seed=3,
                                     representation="gaussian")
    assert report.zeta == 0.0
    assert report.predicted_scale == pytest.approx(1.0)
    assert report.max_relative_violation <= 1e-12


def test_uncharacterized_generator_yields_a_counterexample():
    report = check_affine_invariance(exp_minus_one_phi(), 1.0, trials=100, seed=11)
    assert not report.characterized
    assert report.max_relative_violation >= 1e-2
    assert not report.passed


def test_invariance_gamma_zero_branch():
    report = check_affine_invariance(power_phi(0.5), 0.0, trials=20, seed=7)
    assert report.passed


def test_invariance_report_shape():
    report = check_affine_invariance(log_phi(), 1.0, trials=5, seed=1).to_report()
    assert set(report) >= REPORT_KEYS
    assert report["seed"] == 1


# ---------------------------------------------------------------------------
# representation of the (gamma, zeta) family
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("zeta", [0.0, 0.25, 0.5, 1.0, 2.0])
def test_representation_routes_agree(zeta):
    report = verify_jhhb_holder_representation(zeta, 1.0, trials=300, seed=17)
    assert report.passed
    assert report.max_abs_error <= 1e-10


def test_representation_affine_case_is_exact():
    report = verify_jhhb_holder_representation(1.0, 1.0, trials=300, seed=17)
    assert report.max_abs_error <= 1e-12


# ---------------------------------------------------------------------------
# lower bound
# ---------------------------------------------------------------------------


def test_lower_bound_hand_example():
    # identity generator on the worked brackets: -0.32 >= -0.25/0.68
    report = check_fdps_lower_bound(identity_phi(), 1.0, trials=1, seed=1)
    assert report.holds
    b_vals = {"X": 0.5, "Y": 0.68}
    lhs = 1.0 * b_vals["Y"] - 2.0 * b_vals["X"]
    rhs = -math.exp(-(math.log(b_vals["Y"]) - 2.0 * math.log(b_vals["X"])))
    assert lhs >= rhs
    assert rhs == pytest.approx(-0.25 / 0.68, abs=1e-14)


def test_lower_bound_is_tight_at_equal_brackets():
    # X = Y makes both sides equal -phi(Y)
    for phi in (identity_phi(), power_phi(2.0)):
        y = 1.7
        lhs = 1.0 * phi(y) - 2.0 * phi(y)
        rhs = -math.exp(-(math.log(phi(y)) - 2.0 * math.log(phi(y))))
        assert lhs == pytest.approx(rhs, rel=1e-14)


@pytest.mark.parametrize("phi,is_fdps", [(identity_phi(), True),
                                         (power_phi(0.5), False),
                                         (power_phi(2.0), False)])
def test_lower_bound_holds_and_flag_matches(phi, is_fdps):
    report = check_fdps_lower_bound(phi, 1.0, trials=2000, seed=23)
    assert report.holds
    assert report.worst_gap >= -1e-12
    assert report.bound_is_fdps is is_fdps
    assert report.invalid_trials == 0


def test_lower_bound_report_shape():
    report = check_fdps_lower_bound(identity_phi(), 0.5, trials=50, seed=2).to_report()
    assert set(report) >= REPORT_KEYS
    assert report["parameters"]["bound_is_fdps"] is True


# ---------------------------------------------------------------------------
# structural consistency and equality conditions
# ---------------------------------------------------------------------------


def test_uv_consistency(rng):
    densities = [random_discrete_density(rng) for _ in range(25)]
    for xi in (identity_xi(), power_xi(0.5)):
        report = check_uv_consistency(xi, 1.0, densities)
        assert report.passed
        assert report.max_abs_error <= 1e-12


def test_uv_consistency_mixed_representations(gaussian_pair):
    g, f = gaussian_pair
    report = check_uv_consistency(power_xi(2.0), 0.5, [g, f])
    assert report.passed


def test_equality_probe_affine_lift_gives_zero(discrete_pair):
    _, f = discrete_pair
    report = equality_condition_probe(log_phi(), 1.0, f, c=2.0)
    assert abs(report.D_value) <= 1e-10
    assert not report.psi_strictly_convex
    assert report.consistent


def test_equality_probe_strictly_convex_lift_is_positive(discrete_pair):
    # hand value: D = 0.68 (3 - 2 sqrt(2)) for g = sqrt(2) f
    _, f = discrete_pair
    report = equality_condition_probe(identity_phi(), 1.0, f, c=2.0)
    assert report.D_value == pytest.approx(0.68 * (3.0 - 2.0 * math.sqrt(2.0)), abs=1e-9)
    assert report.psi_strictly_convex
    assert report.consistent


def test_equality_probe_c_one_is_zero_for_any_generator(discrete_pair):
    _, f = discrete_pair
    for phi in (identity_phi(), power_phi(2.0), log_phi()):
        report = equality_condition_probe(phi, 1.0, f, c=1.0)
        assert abs(report.D_value) <= 1e-12
        assert report.consistent


def test_equality_probe_gaussian_input():
    report = equality_condition_probe(log_phi(), 0.5, GaussianDensity(0.0, 1.0), c=3.0)
    assert abs(report.D_value) <= 1e-10


def test_equality_probe_rejects_bad_c(discrete_pair):
    _, f = discrete_pair
    with pytest.raises(DomainError):
        equality_condition_probe(log_phi(), 1.0, f, c=-1.0)


def test_checks_are_reproducible():
    a = verify_jhhb_holder_representation(0.5, 1.0, trials=100, seed=9)
    b = verify_jhhb_holder_representation(0.5, 1.0, trials=100, seed=9)
    assert a == b
