#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "toric/noise.hpp"
#include "toric/scaling.hpp"

using namespace toric;

namespace {

double threshold_model(int L, double p, const ThresholdStart& t) {
    const double x = (p - t.p_c0) * std::pow(L, 1.0 / t.nu0);
    return t.A + t.B * x + t.C * x * x + t.D * std::pow(L, -1.0 / t.mu);
}

std::vector<DataPoint> synthetic_threshold_grid(const ThresholdStart& truth,
                                                double sigma) {
    std::vector<DataPoint> data;
    for (int L : {5, 7, 9, 11, 13}) {
        for (int k = 0; k < 13; ++k) {
            const double p = 0.095 + 0.0013 * k;
            data.push_back({L, p, threshold_model(L, p, truth), sigma});
        }
    }
    return data;
}

double gaussian(Pcg32& rng) {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

TEST_CASE("rescale matches a hand-computed value") {
    CHECK(rescale(11, 0.1128, 0.1028, 1.530) ==
          doctest::Approx(0.047934567568408604).epsilon(1e-14));
    CHECK(rescale(11, 0.1028, 0.1028, 1.530) == 0.0);
    CHECK_THROWS_AS(rescale(0, 0.1, 0.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(rescale(5, 0.1, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("noiseless threshold data is recovered to high precision") {
    const ThresholdStart truth{0.25, 1.8, 2.1, -0.03, 0.1030, 1.52, 1.18};
    const auto data = synthetic_threshold_grid(truth, 2e-4);

    ThresholdFitOptions options;
    options.restarts = 4;
    options.seed = 11;
    const ThresholdFit fit = fit_threshold(data, options);

    CHECK(fit.converged_restarts > 0);
    CHECK(fit.p_c0.value == doctest::Approx(truth.p_c0).epsilon(1e-6));
    CHECK(fit.nu0.value == doctest::Approx(truth.nu0).epsilon(1e-4));
    CHECK(fit.A.value == doctest::Approx(truth.A).epsilon(1e-4));
    CHECK(fit.B.value == doctest::Approx(truth.B).epsilon(1e-3));
    CHECK(fit.C.value == doctest::Approx(truth.C).epsilon(1e-2));
    CHECK(fit.mu.value == doctest::Approx(truth.mu).epsilon(0.05));
    CHECK(fit.chi2_per_dof < 1e-8);
}

TEST_CASE("freezing mu removes it from the fit") {
    const ThresholdStart truth{0.25, 1.8, 2.1, -0.03, 0.1030, 1.52, 1.18};
    const auto data = synthetic_threshold_grid(truth, 2e-4);

    ThresholdFitOptions options;
    options.restarts = 4;
    options.freeze_mu = 1.18;
    const ThresholdFit fit = fit_threshold(data, options);
    CHECK(fit.mu.value == 1.18);
    CHECK(fit.mu.uncertainty == 0.0);
    CHECK(fit.p_c0.value == doctest::Approx(truth.p_c0).epsilon(1e-7));
    CHECK(fit.chi2_per_dof < 1e-10);
}

TEST_CASE("noisy threshold data is recovered within uncertainties") {
    const ThresholdStart truth{0.25, 1.8, 2.1, -0.03, 0.1030, 1.52, 1.18};
    auto data = synthetic_threshold_grid(truth, 2e-3);
    Pcg32 rng(555, 0);
    for (DataPoint& d : data) {
        d.p_fail += d.sigma * gaussian(rng);
    }

    ThresholdFitOptions options;
    options.freeze_mu = 1.18;  // mu is hopeless at this noise level
    const ThresholdFit fit = fit_threshold(data, options);
    CHECK(std::fabs(fit.p_c0.value - truth.p_c0) < 4.0 * fit.p_c0.uncertainty);
    CHECK(fit.p_c0.uncertainty > 1e-6);
    CHECK(fit.p_c0.uncertainty < 5e-3);
    CHECK(fit.chi2_per_dof > 0.3);
    CHECK(fit.chi2_per_dof < 3.0);
}

TEST_CASE("threshold fit failure is reported, not fabricated") {
    const ThresholdStart truth{0.25, 1.8, 2.1, -0.03, 0.1030, 1.52, 1.18};
    const auto data = synthetic_threshold_grid(truth, 2e-4);

    ThresholdFitOptions options;
    options.restarts = 1;
    options.max_iterations = 1;  // cannot satisfy xtol from a cold start
    options.start.p_c0 = 0.2;
    CHECK_THROWS_AS(fit_threshold(data, options), FitError);
}

TEST_CASE("threshold fit validates its inputs") {
    std::vector<DataPoint> tiny = {{5, 0.1, 0.2, 1e-3}};
    CHECK_THROWS_AS(fit_threshold(tiny), std::invalid_argument);

    const ThresholdStart truth{0.25, 1.8, 2.1, -0.03, 0.1030, 1.52, 1.18};
    auto data = synthetic_threshold_grid(truth, 1e-3);
    data[0].sigma = 0.0;
    CHECK_THROWS_AS(fit_threshold(data), std::invalid_argument);
}

TEST_CASE("quadratic log fit recovers exact coefficients") {
    const double alpha = -0.5, beta = -0.8, gamma = 0.001;
    std::vector<DataPoint> data;
    for (int L : {5, 7, 9, 11, 13, 15}) {
        const double lnP = alpha + beta * L + gamma * L * L;
        const double P = std::exp(lnP);
        data.push_back({L, 0.05, P, 0.05 * P});
    }
    const QuadraticLogFit fit = fit_quadratic_logL(data);
    CHECK(fit.alpha.value == doctest::Approx(alpha).epsilon(1e-9));
    CHECK(fit.beta.value == doctest::Approx(beta).epsilon(1e-9));
    CHECK(fit.gamma.value == doctest::Approx(gamma).epsilon(1e-6));
    CHECK(fit.chi2_per_dof < 1e-12);
    CHECK(fit.beta.uncertainty > 0.0);

    data.resize(3);
    CHECK_THROWS_AS(fit_quadratic_logL(data), std::invalid_argument);
    std::vector<DataPoint> bad = {{5, 0.05, 0.0, 1e-3},
                                  {7, 0.05, 0.1, 1e-3},
                                  {9, 0.05, 0.1, 1e-3},
                                  {11, 0.05, 0.1, 1e-3}};
    CHECK_THROWS_AS(fit_quadratic_logL(bad), std::invalid_argument);
}

TEST_CASE("decay constant comes back exactly on synthetic data") {
    const UniversalScalingParams truth;
    std::vector<DataPoint> data;
    for (int L : {9, 11, 13}) {
        for (double p : {0.05, 0.06, 0.07, 0.08}) {
            const double P = p_fail_ush(L, p, truth);
            data.push_back({L, p, P, 1e-3 * P});
        }
    }
    const DecayFit fit = fit_decay_constant(data, truth.A, truth.p_c0, truth.nu0);
    CHECK(fit.points_used == 12);
    CHECK(fit.points_rejected == 0);
    CHECK(fit.a.value == doctest::Approx(truth.a).epsilon(1e-9));
    CHECK(fit.a.uncertainty > 0.0);
    CHECK(fit.chi2_per_dof < 1e-12);

    SUBCASE("points outside the validity window are rejected and counted") {
        data.push_back({9, 0.03, p_fail_ush(9, 0.03, truth), 1e-6});  // below p_ush(9)
        data.push_back({9, 0.11, 0.3, 1e-3});                         // above p_c0
        data.push_back({9, 0.05, 0.0, 1e-3});                         // unmeasurable
        const DecayFit audited =
            fit_decay_constant(data, truth.A, truth.p_c0, truth.nu0);
        CHECK(audited.points_used == 12);
        CHECK(audited.points_rejected == 3);
        CHECK(audited.a.value == doctest::Approx(truth.a).epsilon(1e-9));
    }

    SUBCASE("an empty validity window is an error") {
        std::vector<DataPoint> outside = {{9, 0.01, 1e-4, 1e-6},
                                          {11, 0.01, 1e-5, 1e-7}};
        CHECK_THROWS_AS(fit_decay_constant(outside, truth.A, truth.p_c0, truth.nu0),
                        FitError);
    }
}

TEST_CASE("model evaluations match frozen reference values") {
    CHECK(p_fail_ush(11, 0.08) ==
          doctest::Approx(0.082513428228997888).epsilon(1e-14));
    CHECK(p_fail_ush(13, 0.05) ==
          doctest::Approx(0.0023156777930253298).epsilon(1e-14));
    CHECK(p_fail_lowp(11, 1e-3) == doctest::Approx(1.0164e-14).epsilon(1e-14));
    CHECK(p_fail_lowp(3, 0.0) == 0.0);
    CHECK_THROWS_AS(p_fail_ush(11, 0.1028), std::domain_error);
    CHECK_THROWS_AS(p_fail_ush(11, 0.2), std::domain_error);
    CHECK_THROWS_AS(p_fail_lowp(4, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(p_fail_lowp(11, 0.7), std::invalid_argument);
}

TEST_CASE("low-p evaluation is continuous across the exact/log switchover") {
    // L = 63 uses the lgamma path but the exact coefficient still fits in 64
    // bits, so both routes can be compared directly.
    const double exact_coeff =
        2.0 * 63 * static_cast<double>(ChainEnumerator::count(63, 31));
    const double expected = exact_coeff * std::pow(0.01, 32.0);
    CHECK(p_fail_lowp(63, 0.01) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("validity limits match frozen reference values") {
    CHECK(p_ush(11) == doctest::Approx(0.036550445784759152).epsilon(1e-14));
    CHECK(p_lp(11) == doctest::Approx(0.017168562479703658).epsilon(1e-14));
    CHECK(p_ush(11) == p_ush_continuous(11.0));
    CHECK(p_lp(11) == p_lp_continuous(11.0));
    CHECK_THROWS_AS(p_ush(2), std::invalid_argument);
    CHECK_THROWS_AS(p_ush_continuous(0.0), std::domain_error);

    for (int L = 3; L <= 101; L += 2) {
        CHECK(p_lp(L) < p_ush(L));
        CHECK(p_lp(L) > 0.0);
    }
}

TEST_CASE("regime classification uses the validity limits") {
    CHECK(classify_regime(11, 0.01) == Regime::LowP);
    CHECK(classify_regime(11, 0.05) == Regime::UniversalScaling);
    CHECK(classify_regime(11, 0.025) == Regime::Crossover);
    CHECK(classify_regime(11, p_ush(11)) == Regime::UniversalScaling);
    CHECK(classify_regime(11, p_lp(11)) == Regime::LowP);
    CHECK_THROWS_AS(classify_regime(4, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(11, 0.6), std::invalid_argument);

    CHECK(regime_name(Regime::UniversalScaling) ==
          std::string("universal_scaling"));
    CHECK(regime_name(Regime::LowP) == std::string("low_p"));
    CHECK(regime_name(Regime::Crossover) == std::string("crossover"));
}
