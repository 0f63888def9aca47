#include "seqdet/detect.hpp"

#include <cmath>

#include "seqdet/errors.hpp"

namespace seqdet {

double ThresholdPolicy::log_threshold() const { return std::log(threshold); }

ThresholdPolicy ThresholdPolicy::from_threshold(double a, Calibration c) {
    if (!(a > 1.0)) throw ConfigError("threshold A must exceed 1");
    return ThresholdPolicy{a, c};
}

namespace {

void finish_update(DetectorState& state, const Prior& prior) {
    state.log_g = log_add_exp(state.log_s, prior.log_tail(state.n + 1));
    state.posterior = std::exp(state.log_s - state.log_g);
}

}  // namespace

DetectorState update_recursive(DetectorState state, double dz, const Prior& prior) {
    state.n += 1;
    state.log_s = log_add_exp(state.log_s, prior.log_pi(state.n)) + dz;
    finish_update(state, prior);
    return state;
}

DetectorState update_direct(DetectorState state, LlrPath& path, const Prior& prior) {
    const std::size_t n = state.n + 1;
    for (std::size_t k = 1; k < n; ++k)
        if (state.per_k_terms[k - 1] != kNegInf)
            state.per_k_terms[k - 1] += path.step(k, n);
    state.per_k_terms.push_back(prior.log_pi(n) + path.step(n, n));
    state.n = n;
    state.log_s = log_sum_exp(state.per_k_terms);
    finish_update(state, prior);
    return state;
}

double posterior_of(const DetectorState& state) {
    return std::exp(state.log_s - state.log_g);
}

double posterior_threshold(const Prior& prior, std::size_t n, double threshold_a) {
    return 1.0 - prior.tail(n + 1) / threshold_a;
}

std::optional<std::size_t> check_stop_tau_a(const DetectorState& state,
                                            const ThresholdPolicy& policy) {
    if (state.n >= 1 && state.log_g >= policy.log_threshold()) return state.n;
    return std::nullopt;
}

std::optional<std::size_t> check_stop_tau_a_posterior(const DetectorState& state,
                                                      const Prior& prior,
                                                      const ThresholdPolicy& policy) {
    if (state.n >= 1 &&
        posterior_of(state) >= posterior_threshold(prior, state.n, policy.threshold))
        return state.n;
    return std::nullopt;
}

std::optional<std::size_t> check_stop_shiryaev(const DetectorState& state, double b) {
    if (!(b > 0.0) || !(b < 1.0)) throw ConfigError("Shiryaev threshold B must lie in (0,1)");
    if (state.n >= 1 && state.posterior >= b) return state.n;
    return std::nullopt;
}

RunOutcome run_detector(LlrPath& path, const Prior& prior, const ThresholdPolicy& policy,
                        std::size_t horizon, const DetectorOptions& opts,
                        const TraceFn* trace) {
    DetectorMode mode = opts.mode;
    if (mode == DetectorMode::Auto)
        mode = path.capability() == LlrCapability::IncrementStationary
                   ? DetectorMode::Recursive
                   : DetectorMode::Direct;
    if (mode == DetectorMode::Recursive &&
        path.capability() != LlrCapability::IncrementStationary)
        throw ConfigError(
            "recursive G update requires an increment-stationary LLR source");

    const double log_a = policy.log_threshold();
    const double abandon_at =
        opts.early_abandon_ratio > 0.0 ? log_a + std::log(opts.early_abandon_ratio)
                                       : kNegInf;

    RunOutcome out;
    DetectorState state;
    for (std::size_t n = 1; n <= horizon; ++n) {
        if (mode == DetectorMode::Recursive)
            state = update_recursive(std::move(state), path.increment(n), prior);
        else
            state = update_direct(std::move(state), path, prior);

        if (mode == DetectorMode::Direct && opts.truncate_terms) {
            // A term k may be dropped once even n_active copies of it would
            // contribute less than 1e-12 G_n; dropped terms stay dropped.
            double cutoff = state.log_g + std::log(1e-12) -
                            std::log(static_cast<double>(state.per_k_terms.size()));
            for (double& t : state.per_k_terms)
                if (t != kNegInf && t < cutoff) t = kNegInf;
        }

        out.steps_run = n;
        bool stopped = state.log_g >= log_a;
        if (trace)
            (*trace)(n, path.observation_scalar(n), state.log_g, state.posterior,
                     posterior_threshold(prior, n, policy.threshold), stopped);
        if (stopped) {
            state.stopped_at = n;
            out.stop_step = n;
            out.state = std::move(state);
            return out;
        }
        if (state.log_g <= abandon_at) {
            out.abandoned = true;
            break;
        }
    }
    out.state = std::move(state);
    return out;
}

std::optional<std::size_t> dominating_time_nu_k(LlrPath& path, const Prior& prior,
                                                std::size_t k, double threshold_a,
                                                std::size_t horizon) {
    if (k == 0) throw ConfigError("nu_k requires k >= 1");
    double log_pi_k = prior.log_pi(k);
    if (log_pi_k == kNegInf) throw ConfigError("nu_k undefined: pi_k = 0");
    const double level = std::log(threshold_a) - log_pi_k;
    double z = 0.0;
    for (std::size_t n = k; n <= horizon; ++n) {
        z += path.step(k, n);
        if (z >= level) return n;
    }
    return std::nullopt;
}

OneSidedCrossing one_sided_test_eta(LlrPath& path, double b, std::size_t horizon) {
    if (!(b > 0.0)) throw ConfigError("one-sided test requires b > 0");
    OneSidedCrossing out;
    double z = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        z += path.step(1, n);
        if (z >= b) {
            out.step = n;
            out.overshoot = z - b;
            return out;
        }
    }
    return out;
}

}  // namespace seqdet
