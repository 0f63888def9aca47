#include <doctest.h>

#include <cmath>
#include <vector>

#include "seqdet/errors.hpp"
#include "seqdet/exp_model.hpp"
#include "seqdet/renewal.hpp"
#include "seqdet/simulate.hpp"
#include "support/deterministic_model.hpp"

using namespace seqdet;
using seqdet::testing::DeterministicDriftModel;

TEST_CASE("no-change trial at an astronomical threshold is censored") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(1e12);
    TrialRecord r = run_trial(m, p, policy, ChangePointMode::NoChange, 0, 100, 401);
    CHECK(r.change_point == kNoChange);
    CHECK(!r.stop_step.has_value());
    CHECK(r.censored);
    CHECK(!r.false_alarm);
    CHECK(r.delay == 0.0);
}

TEST_CASE("fixed change point on the deterministic walk") {
    // q = 1, A = e^5, pi_1 = 0.5: the dominating one-sided time is
    // nu_1 = ceil(log(A / pi_1)) = ceil(5 + log 2) = 6 and tau_A <= nu_1.
    DeterministicDriftModel m(1.0);
    Prior p = Prior::geometric(0.5);
    auto policy = ThresholdPolicy::from_threshold(std::exp(5.0));
    TrialRecord r = run_trial(m, p, policy, ChangePointMode::Fixed, 1, 50, 402);
    REQUIRE(r.stop_step.has_value());
    REQUIRE(r.nu_k_step.has_value());
    CHECK(*r.nu_k_step == 6);
    CHECK(*r.stop_step <= 6);
    CHECK(!r.false_alarm);
    CHECK(r.delay == doctest::Approx(static_cast<double>(*r.stop_step - 1)));
}

TEST_CASE("fixed change point requires k >= 1") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.5);
    auto policy = ThresholdPolicy::from_threshold(10.0);
    CHECK_THROWS_AS(run_trial(m, p, policy, ChangePointMode::Fixed, 0, 100, 0),
                    ConfigError);
}

TEST_CASE("trials are deterministic given the seed") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    TrialRecord a = run_trial(m, p, policy, ChangePointMode::FromPrior, 0, 2000, 403);
    TrialRecord b = run_trial(m, p, policy, ChangePointMode::FromPrior, 0, 2000, 403);
    CHECK(a.change_point == b.change_point);
    CHECK(a.stop_step == b.stop_step);
    CHECK(a.delay == b.delay);
    CHECK(a.false_alarm == b.false_alarm);
}

TEST_CASE("horizon must cover the prior in FromPrior mode") {
    ExpModel m(1.0);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    // Geometric rho=0.1: tail beyond 50 is 0.9^50 ~ 0.005 > 1e-6.
    CHECK_THROWS_AS(run_trial(m, Prior::geometric(0.1), policy,
                              ChangePointMode::FromPrior, 0, 50, 0),
                    ConfigError);
    CHECK_THROWS_AS(run_trial(m, Prior::tabulated({0.5, 0.5}, 9), policy,
                              ChangePointMode::FromPrior, 0, 5, 0),
                    ConfigError);
}

TEST_CASE("global false-alarm probability at an unreachable threshold is zero") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(1e12);
    CampaignOptions opts;
    opts.threads = 1;
    EstimateSummary s = estimate_pfa_global(m, p, policy, 200, 10000, 404, opts);
    CHECK(s.value == 0.0);
    CHECK(s.censored == 10000);
    CHECK(s.n_trials == 10000);
}

TEST_CASE("global false-alarm probability respects the 1/A ceiling") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    CampaignOptions opts;
    opts.threads = 1;
    EstimateSummary s = estimate_pfa_global(m, p, policy, 5000, 20000, 405, opts);
    CHECK(s.value <= 0.02 + 3.0 * s.stderr_);
    CHECK(s.value > 0.005);  // the bound is not vacuous at A=50
    // Alarmed plus censored accounts for every trial.
    auto alarms = static_cast<std::size_t>(std::lround(s.value * 20000.0));
    CHECK(alarms + s.censored == s.n_trials);
}

TEST_CASE("campaigns are bit-reproducible") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    CampaignOptions opts;
    opts.threads = 2;
    EstimateSummary a = estimate_pfa_global(m, p, policy, 2000, 4000, 406, opts);
    EstimateSummary b = estimate_pfa_global(m, p, policy, 2000, 4000, 406, opts);
    CHECK(a.value == b.value);
    CHECK(a.censored == b.censored);
}

TEST_CASE("delay moments obey Jensen and report accounting") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(200.0);
    std::size_t horizon = default_horizon(p, m.drift(), 200.0);
    CampaignOptions opts;
    opts.threads = 1;
    auto out = estimate_delay_moments(m, p, policy, {1, 2}, horizon, 2000, 407, opts);
    REQUIRE(out.size() == 4);
    CHECK(out[0].metric == "ADD");
    CHECK(out[1].metric == "ADD_unconditional");
    CHECK(out[2].metric == "D2");
    CHECK(out[3].metric == "D2_unconditional");
    // E[D^2 | .] >= (E[D | .])^2.
    CHECK(out[2].value >= out[0].value * out[0].value);
    CHECK(out[0].effective <= out[0].n_trials - out[0].censored);
    CHECK(out[0].value > 5.0);   // loose sanity band around the true ~22
    CHECK(out[0].value < 40.0);
}

TEST_CASE("delay estimation refuses tiny campaigns") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(200.0);
    std::size_t horizon = default_horizon(p, m.drift(), 200.0);
    CampaignOptions opts;
    opts.threads = 1;
    CHECK_THROWS_AS(estimate_delay_moments(m, p, policy, {1}, horizon, 50, 408, opts),
                    RefusalError);
}

TEST_CASE("degenerate prior makes conditional and prior-averaged delays agree") {
    // All prior mass at k=1: CondADD(1) and ADD estimate the same quantity.
    ExpModel m(1.0);
    Prior p = Prior::tabulated({1.0});
    auto policy = ThresholdPolicy::from_threshold(100.0);
    std::size_t horizon = default_horizon(p, m.drift(), 100.0);
    CampaignOptions opts;
    opts.threads = 1;
    auto add = estimate_delay_moments(m, p, policy, {1}, horizon, 2000, 409, opts);
    auto cond = estimate_cond_add(m, p, policy, {1}, horizon, 2000, 410, opts);
    double se = std::sqrt(add[0].stderr_ * add[0].stderr_ +
                          cond[0].stderr_ * cond[0].stderr_);
    CHECK(std::fabs(add[0].value - cond[0].value) < 3.0 * se);
}

TEST_CASE("conditional delays record the dominating-time audit") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(100.0);
    for (std::uint64_t t = 0; t < 50; ++t) {
        TrialRecord r =
            run_trial(m, p, policy, ChangePointMode::Fixed, 5, 2000, trial_seed(411, t));
        REQUIRE(r.nu_k_step.has_value());
        if (r.stop_step) CHECK(*r.stop_step <= *r.nu_k_step);
    }
}

TEST_CASE("false alarms under the prior stay within the global bound") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    const std::size_t n = 2000, horizon = 2000;
    std::size_t false_alarms = 0, stopped = 0, censored = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
        TrialRecord r = run_trial(m, p, policy, ChangePointMode::FromPrior, 0, horizon,
                                  trial_seed(412, t));
        false_alarms += r.false_alarm;
        stopped += r.stop_step.has_value();
        censored += r.censored;
    }
    CHECK(stopped + censored == n);
    CampaignOptions opts;
    opts.threads = 1;
    EstimateSummary pfa = estimate_pfa_global(m, p, policy, horizon, 20000, 413, opts);
    double fa_rate = static_cast<double>(false_alarms) / static_cast<double>(n);
    double se = std::sqrt(fa_rate * (1.0 - fa_rate) / n + pfa.stderr_ * pfa.stderr_);
    CHECK(fa_rate <= pfa.value + 3.0 * std::max(se, 1e-3));
}

TEST_CASE("slope study on the deterministic walk recovers 1/q exactly") {
    // q = 0.5, prior concentrated at k=1: log G_n = n/2 exactly, so
    // tau = ceil(2 log A) and the delays lie on the line 2 log A - 1/2 for
    // thresholds with 2 log A = integer + 1/2.
    DeterministicDriftModel m(0.5);
    Prior p = Prior::tabulated({1.0});
    std::vector<double> grid = {std::exp(1.25), std::exp(3.75), std::exp(6.25)};
    CampaignOptions opts;
    opts.threads = 1;
    SlopeReport rep = slope_study(m, p, grid, 100, 414, opts);
    CHECK(rep.one_over_q == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rep.slope == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.relative_deviation < 1e-9);
    CHECK(rep.add_values[0] == doctest::Approx(2.0));   // tau=3 at 2logA=2.5
    CHECK(rep.add_values[2] == doctest::Approx(12.0));  // tau=13 at 2logA=12.5
}

TEST_CASE("slope study input validation") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    CampaignOptions opts;
    opts.threads = 1;
    CHECK_THROWS_AS(slope_study(m, p, {10.0, 1000.0}, 200, 0, opts), ConfigError);
    CHECK_THROWS_AS(slope_study(m, p, {10.0, 50.0, 100.0}, 200, 0, opts), ConfigError);
    CHECK_THROWS_AS(slope_study(m, p, {0.5, 10.0, 100.0}, 200, 0, opts), ConfigError);
}

TEST_CASE("paired rule comparison runs and reports both rules") {
    ExpModel m(1.0);
    Prior p = Prior::geometric(0.1);
    auto policy = ThresholdPolicy::from_threshold(50.0);
    CampaignOptions opts;
    opts.threads = 1;
    CompareReport rep = compare_rules(m, p, policy, 1.0 - 1.0 / 50.0, 2000, 500, 415, opts);
    CHECK(rep.tau_add.effective > 100);
    CHECK(rep.shiryaev_add.effective > 100);
    CHECK(rep.tau_add.value > 0.0);
    CHECK(rep.shiryaev_add.value > 0.0);
    CHECK_THROWS_AS(compare_rules(m, p, policy, 1.5, 100, 10, 0, opts), ConfigError);
}

TEST_CASE("default horizon covers prior and crossing comfortably") {
    Prior p = Prior::geometric(0.1);
    std::size_t h = default_horizon(p, 0.3, 200.0);
    // Coverage of the rho=0.1 tail needs ~131 steps; crossing ~ 4 log(200)/0.3.
    CHECK(h >= 131 + static_cast<std::size_t>(4.0 * std::log(200.0) / 0.3));
    CHECK(h < 1000);
}
