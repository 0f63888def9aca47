#include "seqdet/renewal.hpp"

#include <cmath>
#include <string>

#include "seqdet/errors.hpp"
#include "seqdet/numerics.hpp"

namespace seqdet {

OvershootSamples collect_overshoots(const Model& model, double b, std::size_t n_trials,
                                    std::uint64_t seed) {
    if (!(b > 0.0)) throw ConfigError("overshoot estimation requires b > 0");
    if (n_trials == 0) throw ConfigError("overshoot estimation requires trials");
    const std::size_t horizon =
        static_cast<std::size_t>(std::ceil(10.0 * b / model.drift()));
    OvershootSamples out;
    out.b_used = b;
    out.overshoots.reserve(n_trials);
    for (std::size_t t = 0; t < n_trials; ++t) {
        auto path = model.sample_path(1, horizon, trial_seed(seed, t));
        OneSidedCrossing c = one_sided_test_eta(*path, b, horizon);
        if (c.step)
            out.overshoots.push_back(c.overshoot);
        else
            ++out.censored;
    }
    return out;
}

OvershootEstimate estimate_overshoot(const Model& model, double b, std::size_t n_trials,
                                     std::uint64_t seed) {
    OvershootSamples s = collect_overshoots(model, b, n_trials, seed);
    double censor_rate =
        static_cast<double>(s.censored) / static_cast<double>(n_trials);
    if (censor_rate > 0.01)
        throw RefusalError("overshoot estimate refused: " +
                           std::to_string(100.0 * censor_rate) +
                           "% of trials censored at the horizon; increase b or trials");

    std::vector<double> exp_neg(s.overshoots.size());
    for (std::size_t i = 0; i < s.overshoots.size(); ++i)
        exp_neg[i] = std::exp(-s.overshoots[i]);

    MeanSe z = mean_and_se(exp_neg);
    MeanSe k = mean_and_se(s.overshoots);
    OvershootEstimate out;
    out.zeta_hat = z.mean;
    out.se_zeta = z.se;
    out.kappa_bar_hat = k.mean;
    out.se_kappa = k.se;
    out.b_used = b;
    out.n_trials = n_trials;
    out.censored = s.censored;
    return out;
}

double pfa_corrected(double threshold_a, double zeta) {
    if (!(threshold_a > 1.0)) throw ConfigError("pfa_corrected requires A > 1");
    if (!(zeta > 0.0) || !(zeta <= 1.0)) throw ConfigError("zeta must lie in (0,1]");
    return zeta / threshold_a;
}

ThresholdPolicy calibrate_threshold(double alpha, ThresholdPolicy::Calibration mode,
                                    double zeta) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (mode == ThresholdPolicy::Calibration::ConservativeBound)
        return ThresholdPolicy::from_threshold(1.0 / alpha, mode);
    if (!(zeta > 0.0) || !(zeta <= 1.0))
        throw ConfigError("overshoot-corrected calibration needs zeta in (0,1]");
    return ThresholdPolicy::from_threshold(1.0 / (zeta * alpha), mode);
}

double add_approx(double threshold_a, double kl_number, double entropy_constant,
                  double kappa_bar, ApproxOrder order) {
    if (!(threshold_a > 1.0)) throw ConfigError("add_approx requires A > 1");
    if (!(kl_number > 0.0)) throw ConfigError("add_approx requires I > 0");
    double num = std::log(threshold_a) + entropy_constant;
    switch (order) {
        case ApproxOrder::FirstOrder: num -= 1.0; break;
        case ApproxOrder::HigherOrder: num += kappa_bar - 1.0; break;
        case ApproxOrder::DriftOnly: break;
    }
    return num / kl_number;
}

double cond_add_approx(double threshold_a, double pi_k, double kl_number,
                       double kappa_bar, ApproxOrder order) {
    if (!(pi_k > 0.0)) throw ConfigError("cond_add_approx requires pi_k > 0");
    if (!(kl_number > 0.0)) throw ConfigError("cond_add_approx requires I > 0");
    double num = std::log(threshold_a / pi_k);
    switch (order) {
        case ApproxOrder::FirstOrder: num -= 1.0; break;
        case ApproxOrder::HigherOrder: num += kappa_bar - 1.0; break;
        case ApproxOrder::DriftOnly: break;
    }
    return num / kl_number;
}

}  // namespace seqdet
