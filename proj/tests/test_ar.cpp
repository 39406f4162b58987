#include <gtest/gtest.h>

#include <cmath>

#include "arident/ar.hpp"
#include "arident/least_squares.hpp"
#include "stat_helpers.hpp"

using namespace arident;

namespace {

void expect_rel(double actual, double expected, double tol, const char* label) {
    EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected)))
        << label << ": " << actual << " vs " << expected;
}

SystemParams reference_params() { return testutil::white_params(1.0 / 3.0, 4.0, 9.0); }

} // namespace

TEST(ArIdentify, FirstOrderOptimumAtReferencePoint) {
    const CovarianceSeq cov = theoretical_covariance(reference_params(), 2);
    const ArEstimate est = optimal_ar1(cov);
    expect_rel(est.coeffs[0], 1.0 / 9.0, 1e-9, "phi1");
    expect_rel(*est.pred_error_variance, 40.0 / 3.0, 1e-9, "pev");
}

TEST(ArIdentify, SecondOrderOptimumAtReferencePoint) {
    const CovarianceSeq cov = theoretical_covariance(reference_params(), 2);
    const ArEstimate est = optimal_ar2(cov);
    expect_rel(est.coeffs[0], 39.0 / 360.0, 1e-9, "phi1");
    expect_rel(est.coeffs[1], 1.0 / 40.0, 1e-9, "phi2");
    expect_rel(*est.pred_error_variance, 13.325, 1e-9, "pev");
}

// Nonzero output mean shifts the no-intercept optimum: with mean 5.5 the
// raw moments give phi = (1.5 + 30.25) / (13.5 + 30.25) = 127/175.
TEST(ArIdentify, FirstOrderOptimumWithNonzeroMean) {
    const CovarianceSeq cov = theoretical_covariance(
        testutil::white_params(1.0 / 3.0, 4.0, 9.0, 1.0, 4.0), 2);
    ASSERT_EQ(cov.mean, 5.5);
    const ArEstimate est = optimal_ar1(cov);
    expect_rel(est.coeffs[0], 127.0 / 175.0, 1e-12, "phi1 with mean");
    // Independent derivative-free minimiser of the same cost.
    EXPECT_NEAR(testutil::minimize_cost_ar1(cov), est.coeffs[0], 1e-7);
}

TEST(ArIdentify, OptimumMinimisesPredictionCost) {
    for (const auto& point : testutil::parameter_grid()) {
        for (double qbar : {0.0, 1.0}) {
            const SystemParams params = testutil::white_params(
                point.lambda, point.delta2, point.xi2, qbar, qbar == 0.0 ? 0.0 : 4.0);
            const CovarianceSeq cov = theoretical_covariance(params, 2);
            const ArEstimate ar1 = optimal_ar1(cov);
            const ArEstimate ar2 = optimal_ar2(cov);

            const double c1 = prediction_cost(cov, ar1.coeffs);
            for (double eps : {-1e-5, 1e-5}) {
                const double perturbed[] = {ar1.coeffs[0] + eps};
                EXPECT_GE(prediction_cost(cov, perturbed), c1 - 1e-12 * c1);
            }
            const double c2 = prediction_cost(cov, ar2.coeffs);
            for (double eps : {-1e-5, 1e-5}) {
                const double p1[] = {ar2.coeffs[0] + eps, ar2.coeffs[1]};
                const double p2[] = {ar2.coeffs[0], ar2.coeffs[1] + eps};
                EXPECT_GE(prediction_cost(cov, p1), c2 - 1e-12 * c2);
                EXPECT_GE(prediction_cost(cov, p2), c2 - 1e-12 * c2);
            }
        }
    }
}

// The richer model can never predict worse at the optimum.
TEST(ArIdentify, SecondOrderNeverWorseThanFirst) {
    for (const auto& point : testutil::parameter_grid()) {
        const CovarianceSeq cov = theoretical_covariance(
            testutil::white_params(point.lambda, point.delta2, point.xi2), 2);
        const double pev1 = *optimal_ar1(cov).pred_error_variance;
        const double pev2 = *optimal_ar2(cov).pred_error_variance;
        EXPECT_LE(pev2, pev1 + 1e-12 * pev1);
        EXPECT_GE(pev2, 0.0);
        EXPECT_LE(pev2, cov.at(0) * (1.0 + 1e-12));
    }
}

TEST(ArIdentify, OptimaAreStablePredictors) {
    for (const auto& point : testutil::parameter_grid()) {
        const CovarianceSeq cov = theoretical_covariance(
            testutil::white_params(point.lambda, point.delta2, point.xi2), 2);
        EXPECT_TRUE(is_stable(optimal_ar1(cov)));
        EXPECT_TRUE(is_stable(optimal_ar2(cov)));
    }
}

TEST(ArIdentify, ClosedFormMatchesMomentRouteOnGrid) {
    for (const auto& point : testutil::parameter_grid()) {
        const SystemParams params =
            testutil::white_params(point.lambda, point.delta2, point.xi2);
        const CovarianceSeq cov = theoretical_covariance(params, 2);
        for (int order : {1, 2}) {
            const ArEstimate via_moments = optimal_ar(cov, order);
            const ArEstimate direct = closed_form_white(params, order);
            for (int j = 0; j < order; ++j) {
                expect_rel(direct.coeffs[static_cast<std::size_t>(j)],
                           via_moments.coeffs[static_cast<std::size_t>(j)], 1e-12,
                           "coefficient route consistency");
            }
            expect_rel(*direct.pred_error_variance,
                       *via_moments.pred_error_variance, 1e-12,
                       "variance route consistency");
        }
    }
}

TEST(ArIdentify, ClosedFormMatchesMomentRouteWithMeans) {
    const SystemParams params =
        testutil::white_params(1.0 / 3.0, 4.0, 9.0, 1.0, 4.0);
    const CovarianceSeq cov = theoretical_covariance(params, 2);
    for (int order : {1, 2}) {
        const ArEstimate via_moments = optimal_ar(cov, order);
        const ArEstimate direct = closed_form_white(params, order);
        for (int j = 0; j < order; ++j) {
            expect_rel(direct.coeffs[static_cast<std::size_t>(j)],
                       via_moments.coeffs[static_cast<std::size_t>(j)], 1e-12,
                       "coefficient route consistency (mean)");
        }
        expect_rel(*direct.pred_error_variance, *via_moments.pred_error_variance,
                   1e-12, "variance route consistency (mean)");
    }
}

// Without measurement noise the output is a pure AR(1) signal; the optimal
// one-step predictor is the pole itself and the second coefficient carries
// no information.  With a power-of-two input variance the closed form is
// exact in floating point.
TEST(ArIdentify, NoiseFreeRecoveryOfThePole) {
    {
        const ArEstimate est =
            closed_form_white(testutil::white_params(0.5, 4.0, 0.0), 1);
        EXPECT_EQ(est.coeffs[0], 0.5);
    }
    {
        const ArEstimate est =
            closed_form_white(testutil::white_params(0.5, 4.0, 0.0), 2);
        EXPECT_EQ(est.coeffs[0], 0.5);
        EXPECT_EQ(est.coeffs[1], 0.0);
    }
    for (double lambda : {-0.9, 1.0 / 3.0, 0.9}) {
        const SystemParams params = testutil::white_params(lambda, 4.0, 0.0);
        const ArEstimate ar1 = optimal_ar1(theoretical_covariance(params, 2));
        EXPECT_DOUBLE_EQ(ar1.coeffs[0], lambda);
        const ArEstimate ar2 = optimal_ar2(theoretical_covariance(params, 2));
        EXPECT_NEAR(ar2.coeffs[0], lambda, 1e-14);
        EXPECT_NEAR(ar2.coeffs[1], 0.0, 1e-14);
    }
}

// Empirical check of the cost function itself: the mean squared one-step
// error of an arbitrary (suboptimal) predictor on simulated data.
TEST(ArIdentify, PredictionCostMatchesSimulation) {
    const SystemParams params = reference_params();
    const CovarianceSeq cov = theoretical_covariance(params, 2);
    const Trajectory traj = simulate(params, 1000000, 1000, {4242, 0});
    const double phi = 0.3;
    double mse = 0.0;
    for (std::size_t t = 1; t < traj.values.size(); ++t) {
        const double e = traj.values[t] - phi * traj.values[t - 1];
        mse += e * e;
    }
    mse /= static_cast<double>(traj.values.size() - 1);
    const double coeffs[] = {phi};
    EXPECT_NEAR(prediction_cost(cov, coeffs), mse, 0.1);
}

TEST(ArIdentify, ConstantProcessIsDegenerate) {
    CovarianceSeq flat;
    flat.mean = 5.0;
    flat.values = {0.0, 0.0, 0.0};
    // A constant is predicted perfectly by its own past at first order...
    const ArEstimate ar1 = optimal_ar1(flat);
    EXPECT_DOUBLE_EQ(ar1.coeffs[0], 1.0);
    EXPECT_NEAR(*ar1.pred_error_variance, 0.0, 1e-15);
    // ...but the second-order normal matrix is singular.
    EXPECT_THROW(optimal_ar2(flat), non_identifiable_error);

    CovarianceSeq dead;
    dead.mean = 0.0;
    dead.values = {0.0, 0.0, 0.0};
    EXPECT_THROW(optimal_ar1(dead), non_identifiable_error);
    EXPECT_THROW(optimal_ar2(dead), non_identifiable_error);
}

TEST(ArIdentify, GuardsOnOrderAndInputs) {
    const CovarianceSeq cov = theoretical_covariance(reference_params(), 2);
    EXPECT_THROW(optimal_ar(cov, 3), spec_error);
    EXPECT_THROW(prediction_cost(cov, std::vector<double>{}), spec_error);
    EXPECT_THROW(prediction_cost(cov, std::vector<double>{0.1, 0.2, 0.3}), spec_error);
    EXPECT_THROW(closed_form_white(testutil::colored_params(1.0 / 3.0, -0.5, 1.0, 9.0), 1),
                 spec_error);
    EXPECT_THROW(closed_form_white(reference_params(), 3), spec_error);

    CovarianceSeq short_cov;
    short_cov.values = {13.5, 1.5};
    EXPECT_THROW(optimal_ar2(short_cov), spec_error);
}

// The colored-input optimum flips sign: lag-1 ratio -1/47 at first order,
// [-1/48, 1/48] at second order.
TEST(ArIdentify, ColoredInputOptima) {
    const CovarianceSeq cov =
        colored_covariance(testutil::colored_params(1.0 / 3.0, -0.5, 1.0, 9.0), 2);
    const ArEstimate ar1 = optimal_ar1(cov);
    expect_rel(ar1.coeffs[0], -1.0 / 47.0, 1e-12, "colored phi1");
    const ArEstimate ar2 = optimal_ar2(cov);
    expect_rel(ar2.coeffs[0], -1.0 / 48.0, 1e-12, "colored ar2 phi1");
    expect_rel(ar2.coeffs[1], 1.0 / 48.0, 1e-12, "colored ar2 phi2");
}
