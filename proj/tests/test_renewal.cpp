#include <doctest.h>

#include <cmath>
#include <vector>

#include "seqdet/errors.hpp"
#include "seqdet/exp_model.hpp"
#include "seqdet/renewal.hpp"
#include "support/deterministic_model.hpp"

using namespace seqdet;
using seqdet::testing::DeterministicDriftModel;
using seqdet::testing::ScriptedPath;

namespace {

/// Model whose declared drift wildly overstates the actual increment, so the
/// internal overshoot horizon ceil(10 b / q) is far too short to cross.
class SlowWalkModel final : public Model {
public:
    LlrCapability capability() const override { return LlrCapability::IncrementStationary; }
    double drift() const override { return 10.0; }
    std::unique_ptr<LlrPath> sample_path(std::size_t, std::size_t n_max,
                                         std::uint64_t) const override {
        return std::make_unique<ScriptedPath>(std::vector<double>{1e-3}, n_max);
    }
    const char* name() const override { return "slow-walk"; }
};

}  // namespace

TEST_CASE("overshoot constants for the exponential model at Q=1") {
    // The one-sided overshoot is exactly Exp(mean Q) for the exponential
    // model at any b, so zeta = 1/(1+Q) = 0.5 and kappa_bar = Q = 1.
    ExpModel m(1.0);
    OvershootEstimate e = estimate_overshoot(m, 20.0, 100000, 301);
    CHECK(e.censored == 0);
    CHECK(std::fabs(e.zeta_hat - 0.5) < 0.005);
    CHECK(std::fabs(e.kappa_bar_hat - 1.0) < 0.01);
    CHECK(e.se_zeta < 0.002);
    CHECK(e.se_kappa < 0.005);
}

TEST_CASE("overshoot constants for the exponential model at Q=3") {
    ExpModel m(3.0);
    OvershootEstimate e = estimate_overshoot(m, 20.0, 20000, 302);
    CHECK(std::fabs(e.zeta_hat - 0.25) < 4.0 * e.se_zeta);
    CHECK(std::fabs(e.kappa_bar_hat - 3.0) < 4.0 * e.se_kappa);
}

TEST_CASE("exponential overshoot exactness holds at small b too") {
    // zeta (1+Q) = 1 and kappa_bar / Q = 1 for every threshold level.
    ExpModel m(1.5);
    OvershootEstimate e = estimate_overshoot(m, 3.0, 20000, 303);
    CHECK(std::fabs(e.zeta_hat * 2.5 - 1.0) < 4.0 * 2.5 * e.se_zeta);
    CHECK(std::fabs(e.kappa_bar_hat / 1.5 - 1.0) < 4.0 * e.se_kappa / 1.5);
}

TEST_CASE("overshoot stability across threshold levels") {
    ExpModel m(1.0);
    OvershootEstimate a = estimate_overshoot(m, 10.0, 20000, 304);
    OvershootEstimate b = estimate_overshoot(m, 20.0, 20000, 305);
    double se = std::sqrt(a.se_zeta * a.se_zeta + b.se_zeta * b.se_zeta);
    CHECK(std::fabs(a.zeta_hat - b.zeta_hat) < 3.0 * se);
}

TEST_CASE("deterministic walk crossing a multiple of the step has no overshoot") {
    DeterministicDriftModel m(0.5);
    OvershootEstimate e = estimate_overshoot(m, 5.0, 200, 306);
    CHECK(e.zeta_hat == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.kappa_bar_hat == doctest::Approx(0.0));
    CHECK(e.se_kappa == doctest::Approx(0.0));
}

TEST_CASE("overshoot estimation refuses heavy censoring") {
    SlowWalkModel m;
    CHECK_THROWS_AS(estimate_overshoot(m, 20.0, 200, 307), RefusalError);
}

TEST_CASE("overshoot estimation input validation") {
    ExpModel m(1.0);
    CHECK_THROWS_AS(estimate_overshoot(m, 0.0, 100, 0), ConfigError);
    CHECK_THROWS_AS(estimate_overshoot(m, 5.0, 0, 0), ConfigError);
}

TEST_CASE("overshoot-corrected false-alarm probability") {
    CHECK(pfa_corrected(50.0, 1.0) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(pfa_corrected(50.0, 0.5) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(pfa_corrected(200.0, 0.5) == doctest::Approx(0.0025).epsilon(1e-15));
    CHECK_THROWS_AS(pfa_corrected(1.0, 0.5), ConfigError);
    CHECK_THROWS_AS(pfa_corrected(50.0, 0.0), ConfigError);
    CHECK_THROWS_AS(pfa_corrected(50.0, 1.5), ConfigError);
}

TEST_CASE("threshold calibration") {
    using Cal = ThresholdPolicy::Calibration;
    CHECK(calibrate_threshold(0.01, Cal::ConservativeBound).threshold ==
          doctest::Approx(100.0).epsilon(1e-15));
    CHECK(calibrate_threshold(0.01, Cal::OvershootCorrected, 0.5).threshold ==
          doctest::Approx(200.0).epsilon(1e-15));
    CHECK(calibrate_threshold(0.001, Cal::OvershootCorrected, 0.25).threshold ==
          doctest::Approx(4000.0).epsilon(1e-12));
    CHECK_THROWS_AS(calibrate_threshold(0.0, Cal::ConservativeBound), ConfigError);
    CHECK_THROWS_AS(calibrate_threshold(1.0, Cal::ConservativeBound), ConfigError);
    CHECK_THROWS_AS(calibrate_threshold(0.01, Cal::OvershootCorrected, 0.0), ConfigError);
}

TEST_CASE("average-delay approximation arithmetic") {
    // Pure formula checks with all inputs pinned: A=200, entropy constant for
    // the rho=0.1 geometric prior, kappa_bar = 1, I = 0.193147.
    const double c_pi = 3.2508297339144824;
    const double i = 0.193147;
    double fo = add_approx(200.0, i, c_pi, 1.0, ApproxOrder::FirstOrder);
    double ho = add_approx(200.0, i, c_pi, 1.0, ApproxOrder::HigherOrder);
    CHECK(fo == doctest::Approx(39.08).epsilon(2e-4));
    CHECK(ho == doctest::Approx(44.26).epsilon(2e-4));
    CHECK(ho - fo == doctest::Approx(1.0 / i).epsilon(1e-12));
    CHECK(add_approx(200.0, i, c_pi, 1.0, ApproxOrder::DriftOnly) ==
          doctest::Approx((std::log(200.0) + c_pi) / i).epsilon(1e-12));
    CHECK_THROWS_AS(add_approx(1.0, i, c_pi, 1.0, ApproxOrder::FirstOrder), ConfigError);
    CHECK_THROWS_AS(add_approx(200.0, 0.0, c_pi, 1.0, ApproxOrder::FirstOrder),
                    ConfigError);
}

TEST_CASE("zero mean overshoot collapses the higher-order form") {
    for (double a : {10.0, 200.0, 1e4})
        CHECK(add_approx(a, 0.3, 1.0, 0.0, ApproxOrder::HigherOrder) ==
              doctest::Approx(add_approx(a, 0.3, 1.0, 0.0, ApproxOrder::FirstOrder))
                  .epsilon(1e-14));
}

TEST_CASE("higher order dominates first order") {
    for (double kbar : {0.1, 1.0, 3.0})
        CHECK(add_approx(100.0, 0.5, 2.0, kbar, ApproxOrder::HigherOrder) >=
              add_approx(100.0, 0.5, 2.0, kbar, ApproxOrder::FirstOrder));
}

TEST_CASE("approximation slope in log A is 1/I") {
    const double e = std::exp(1.0);
    for (ApproxOrder ord :
         {ApproxOrder::FirstOrder, ApproxOrder::HigherOrder, ApproxOrder::DriftOnly}) {
        double d = add_approx(100.0 * e, 0.25, 1.5, 0.7, ord) -
                   add_approx(100.0, 0.25, 1.5, 0.7, ord);
        CHECK(d == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("conditional delay approximation arithmetic") {
    const double i = 0.193147;
    double ho = cond_add_approx(200.0, 0.5, i, 1.0, ApproxOrder::HigherOrder);
    CHECK(ho == doctest::Approx(31.02).epsilon(2e-4));  // log(400)/I
    // For a geometric prior, pi_{k+1} = (1-rho) pi_k, so consecutive change
    // points differ by exactly |log(1-rho)| / I.
    Prior p = Prior::geometric(0.5);
    for (std::size_t k = 1; k <= 5; ++k) {
        double d = cond_add_approx(200.0, p.pi(k + 1), i, 1.0, ApproxOrder::HigherOrder) -
                   cond_add_approx(200.0, p.pi(k), i, 1.0, ApproxOrder::HigherOrder);
        CHECK(d == doctest::Approx(std::log(2.0) / i).epsilon(1e-10));
    }
    CHECK_THROWS_AS(cond_add_approx(200.0, 0.0, i, 1.0, ApproxOrder::FirstOrder),
                    ConfigError);
}
