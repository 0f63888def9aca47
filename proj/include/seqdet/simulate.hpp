#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "seqdet/detect.hpp"
#include "seqdet/model.hpp"
#include "seqdet/prior.hpp"

namespace seqdet {

enum class ChangePointMode { FromPrior, Fixed, NoChange };

/// Outcome of a single detection trial.
struct TrialRecord {
    std::size_t change_point = kNoChange;  // lambda (kNoChange under P_inf)
    std::optional<std::size_t> stop_step;  // tau_A; empty when censored
    double delay = 0.0;                    // (tau - lambda)^+ when stopped, lambda finite
    bool false_alarm = false;              // tau < lambda
    bool censored = false;                 // horizon reached without stopping
    bool abandoned = false;                // no-change path abandoned early
    std::size_t prior_rejections = 0;      // lambda draws beyond the horizon, resampled
    std::optional<std::size_t> nu_k_step;  // dominating time, recorded in Fixed mode
};

struct EstimateSummary {
    std::string metric;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_trials = 0;
    std::size_t horizon = 0;
    std::size_t censored = 0;   // never silently dropped
    std::size_t effective = 0;  // trials entering the estimate
};

struct CampaignOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
    DetectorOptions detector;
};

/// Smallest horizon covering the prior (tail mass < 1e-6) plus a generous
/// multiple of the expected crossing time log(A)/q.
std::size_t default_horizon(const Prior& prior, double drift, double threshold_a);

/// One trial: sample lambda (per mode), generate a trajectory, run tau_A.
/// Deterministic given the seed. In Fixed mode also records the dominating
/// one-sided crossing nu_k(A) on the same path.
TrialRecord run_trial(const Model& model, const Prior& prior, const ThresholdPolicy& policy,
                      ChangePointMode mode, std::size_t fixed_k, std::size_t horizon,
                      std::uint64_t seed, const DetectorOptions& detector = {});

/// P_inf(tau_A <= horizon) over no-change trials; a lower bound on the
/// infinite-horizon PFA (Lemma-style hard ceiling: 1/A).
EstimateSummary estimate_pfa_global(const Model& model, const Prior& prior,
                                    const ThresholdPolicy& policy, std::size_t horizon,
                                    std::size_t n_trials, std::uint64_t seed,
                                    const CampaignOptions& opts = {});

/// Conditional delay moments D_m = E[(tau-lambda)^m | tau >= lambda] over
/// FromPrior trials, one summary per m, plus the unconditioned
/// E[((tau-lambda)^+)^m] companions. Refuses below 100 effective trials.
std::vector<EstimateSummary> estimate_delay_moments(
    const Model& model, const Prior& prior, const ThresholdPolicy& policy,
    const std::vector<unsigned>& m_list, std::size_t horizon, std::size_t n_trials,
    std::uint64_t seed, const CampaignOptions& opts = {});

/// Conditional ADD given lambda = k for each k in k_list (Fixed mode).
std::vector<EstimateSummary> estimate_cond_add(const Model& model, const Prior& prior,
                                               const ThresholdPolicy& policy,
                                               const std::vector<std::size_t>& k_list,
                                               std::size_t horizon, std::size_t n_trials,
                                               std::uint64_t seed,
                                               const CampaignOptions& opts = {});

struct SlopeReport {
    std::vector<double> thresholds;
    std::vector<double> add_values;
    std::vector<double> add_se;
    double slope = 0.0;
    double intercept = 0.0;
    double one_over_q = 0.0;
    double relative_deviation = 0.0;        // |slope - 1/q| / (1/q)
    double median_delay_over_log_a = 0.0;   // at the largest threshold
};

/// Regression of simulated ADD on log A over a threshold grid spanning at
/// least two decades with >= 3 points.
SlopeReport slope_study(const Model& model, const Prior& prior,
                        const std::vector<double>& a_grid, std::size_t n_trials,
                        std::uint64_t seed, const CampaignOptions& opts = {});

/// Paired comparison of tau_A and the Shiryaev rule nu_B on shared
/// trajectories (FromPrior).
struct CompareReport {
    EstimateSummary tau_add;
    EstimateSummary shiryaev_add;
    double tau_false_alarm_rate = 0.0;
    double shiryaev_false_alarm_rate = 0.0;
    std::size_t n_trials = 0;
};

CompareReport compare_rules(const Model& model, const Prior& prior,
                            const ThresholdPolicy& policy, double shiryaev_b,
                            std::size_t horizon, std::size_t n_trials, std::uint64_t seed,
                            const CampaignOptions& opts = {});

unsigned resolve_threads(unsigned requested);

/// Static-free work-stealing loop; per-trial results must be written to
/// slots indexed by trial so reductions stay order-independent.
template <class Fn>
void for_each_trial(std::size_t n_trials, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n_trials < 2) {
        for (std::size_t t = 0; t < n_trials; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        constexpr std::size_t chunk = 64;
        for (;;) {
            std::size_t t = next.fetch_add(chunk);
            if (t >= n_trials) return;
            std::size_t end = std::min(n_trials, t + chunk);
            try {
                for (; t < end; ++t) fn(t);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace seqdet
