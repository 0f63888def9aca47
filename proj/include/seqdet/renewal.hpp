#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seqdet/detect.hpp"
#include "seqdet/model.hpp"
#include "seqdet/prior.hpp"

namespace seqdet {

/// Monte Carlo estimates of the limiting overshoot constants of the
/// one-sided test: zeta = lim E_1 e^{-kappa_b} and kappa_bar = lim E_1 kappa_b.
struct OvershootEstimate {
    double zeta_hat = 0.0;
    double kappa_bar_hat = 0.0;
    double se_zeta = 0.0;
    double se_kappa = 0.0;
    double b_used = 0.0;
    std::size_t n_trials = 0;
    std::size_t censored = 0;
};

struct OvershootSamples {
    std::vector<double> overshoots;  // kappa_b per uncensored trial
    std::size_t censored = 0;
    double b_used = 0.0;
};

/// Raw overshoot draws at threshold b under P_1; horizon = ceil(10 b / q).
OvershootSamples collect_overshoots(const Model& model, double b, std::size_t n_trials,
                                    std::uint64_t seed);

/// Estimates at a single large b (default in calibrate: b = max(25, 25 q)).
/// Refuses when more than 1% of trials are censored.
OvershootEstimate estimate_overshoot(const Model& model, double b, std::size_t n_trials,
                                     std::uint64_t seed);

/// Overshoot-corrected asymptotic PFA: P_inf(tau_A < inf) ~ zeta / A.
double pfa_corrected(double threshold_a, double zeta);

/// ConservativeBound: A = 1/alpha (hard PFA <= alpha).
/// OvershootCorrected: A = 1/(zeta alpha) (asymptotic equality).
ThresholdPolicy calibrate_threshold(double alpha, ThresholdPolicy::Calibration mode,
                                    double zeta = 1.0);

enum class ApproxOrder {
    FirstOrder,   // (log A + C_pi - 1) / I
    HigherOrder,  // (log A + C_pi + kappa_bar - 1) / I
    DriftOnly,    // (log A + C_pi) / I; no accuracy claim
};

/// Average-detection-delay approximation from the prior-averaged surrogate.
double add_approx(double threshold_a, double kl_number, double entropy_constant,
                  double kappa_bar, ApproxOrder order);

/// Conditional ADD given lambda = k; grows as |log pi_k|.
double cond_add_approx(double threshold_a, double pi_k, double kl_number,
                       double kappa_bar, ApproxOrder order);

}  // namespace seqdet
