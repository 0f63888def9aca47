#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "seqdet/llr.hpp"
#include "seqdet/numerics.hpp"
#include "seqdet/prior.hpp"

namespace seqdet {

/// Threshold A > 1 for the rule "stop at the first n with G_n >= A".
struct ThresholdPolicy {
    enum class Calibration { ConservativeBound, OvershootCorrected };

    double threshold = 0.0;  // A
    Calibration calibration = Calibration::ConservativeBound;

    double log_threshold() const;
    static ThresholdPolicy from_threshold(double a,
                                          Calibration c = Calibration::ConservativeBound);
};

/// Running state of the detection statistic. All accumulation happens in the
/// log domain; G_n can exceed 1e300 in long post-change runs.
struct DetectorState {
    std::size_t n = 0;
    double log_g = 0.0;      // log G_n, G_0 = 1
    double log_s = kNegInf;  // log sum_{k<=n} pi_k e^{Z_n^k}
    double posterior = 0.0;  // P(lambda <= n | F_n) = (G_n - Pi_{n+1}) / G_n
    std::optional<std::size_t> stopped_at;
    std::vector<double> per_k_terms;  // direct mode: log pi_k + Z_n^k
};

/// One-step recursion G_n = (G_{n-1} - Pi_{n+1}) e^{dz} + Pi_{n+1}, valid only
/// for IncrementStationary sources.
DetectorState update_recursive(DetectorState state, double dz, const Prior& prior);

/// Exact direct form G_n = sum_{k<=n} pi_k e^{Z_n^k} + Pi_{n+1}, O(n) per
/// step, any capability. Consumes observation state.n + 1 from the path.
DetectorState update_direct(DetectorState state, LlrPath& path, const Prior& prior);

/// P(lambda <= n | F_n); recomputed from the log-domain components.
double posterior_of(const DetectorState& state);

/// The increasing posterior threshold 1 - Pi_{n+1}/A equivalent to G_n >= A.
double posterior_threshold(const Prior& prior, std::size_t n, double threshold_a);

/// G-form stop check: G_n >= A (ties stop). Returns the step if stopping.
std::optional<std::size_t> check_stop_tau_a(const DetectorState& state,
                                            const ThresholdPolicy& policy);

/// Posterior-form stop check for tau_A; must agree pathwise with the G-form.
std::optional<std::size_t> check_stop_tau_a_posterior(const DetectorState& state,
                                                      const Prior& prior,
                                                      const ThresholdPolicy& policy);

/// Shiryaev baseline: stop when the posterior reaches a constant B in (0,1).
std::optional<std::size_t> check_stop_shiryaev(const DetectorState& state, double b);

enum class DetectorMode { Auto, Recursive, Direct };

struct DetectorOptions {
    DetectorMode mode = DetectorMode::Auto;
    /// Documented approximation: drop per-k terms once their summed bound is
    /// below 1e-12 * G_n. Off by default; never used in acceptance runs.
    bool truncate_terms = false;
    /// For no-change campaigns only: abandon a path once
    /// sup_m P_inf(G_m >= A | F_n) <= G_n / A falls below this ratio
    /// (maximal inequality for the nonnegative P_inf-martingale G).
    /// 0 disables. Invalid under P_k, where G drifts upward.
    double early_abandon_ratio = 0.0;
};

struct RunOutcome {
    std::optional<std::size_t> stop_step;
    DetectorState state;  // at the stopping step, or at the horizon
    bool abandoned = false;
    std::size_t steps_run = 0;
};

using TraceFn = std::function<void(std::size_t n, double x, double log_g, double posterior,
                                   double post_threshold, bool stopped)>;

/// Run tau_A on one path up to the horizon. Horizon exhaustion without
/// stopping is a first-class outcome, not an error.
RunOutcome run_detector(LlrPath& path, const Prior& prior, const ThresholdPolicy& policy,
                        std::size_t horizon, const DetectorOptions& opts = {},
                        const TraceFn* trace = nullptr);

/// One-sided dominating time nu_k(A) = min{n >= k : Z_n^k >= log(A/pi_k)};
/// tau_A <= nu_k(A) pathwise for every k with pi_k > 0.
std::optional<std::size_t> dominating_time_nu_k(LlrPath& path, const Prior& prior,
                                                std::size_t k, double threshold_a,
                                                std::size_t horizon);

struct OneSidedCrossing {
    std::optional<std::size_t> step;  // eta_b, empty if censored at the horizon
    double overshoot = 0.0;           // kappa_b = Z^1_{eta_b} - b
};

/// eta_b = min{n >= 1 : Z_n^1 >= b} with its overshoot; run under P_1.
OneSidedCrossing one_sided_test_eta(LlrPath& path, double b, std::size_t horizon);

}  // namespace seqdet
