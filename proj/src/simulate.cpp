#include "seqdet/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "seqdet/errors.hpp"
#include "seqdet/numerics.hpp"

namespace seqdet {

namespace {

// Martingale maximal-inequality bound used to abandon hopeless no-change
// paths: once G_n/A <= this ratio the residual alarm probability is below
// it, orders of magnitude under the Monte Carlo resolution.
constexpr double kNoChangeAbandonRatio = 1e-12;

std::size_t prior_coverage(const Prior& prior) {
    if (prior.finite_support()) return prior.support_cap();
    // smallest n with Pi_{n+1} < 1e-6
    std::size_t lo = 1;
    while (prior.tail(lo + 1) >= 1e-6) ++lo;
    return lo;
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
    if (requested) return requested;
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

std::size_t default_horizon(const Prior& prior, double drift, double threshold_a) {
    std::size_t crossing =
        static_cast<std::size_t>(std::ceil(4.0 * std::log(threshold_a) / drift));
    return prior_coverage(prior) + crossing + 200;
}

TrialRecord run_trial(const Model& model, const Prior& prior, const ThresholdPolicy& policy,
                      ChangePointMode mode, std::size_t fixed_k, std::size_t horizon,
                      std::uint64_t seed, const DetectorOptions& detector) {
    if (horizon < 1) throw ConfigError("trial horizon must be >= 1");
    TrialRecord rec;
    Rng rng(seed);

    switch (mode) {
        case ChangePointMode::NoChange:
            rec.change_point = kNoChange;
            break;
        case ChangePointMode::Fixed:
            if (fixed_k == 0) throw ConfigError("fixed change point must be >= 1");
            rec.change_point = fixed_k;
            break;
        case ChangePointMode::FromPrior: {
            if (!prior.finite_support() && prior.tail(horizon + 1) >= 1e-6)
                throw ConfigError(
                    "horizon too small for the prior: more than 1e-6 tail mass beyond it");
            if (prior.finite_support() && prior.support_cap() > horizon)
                throw ConfigError("horizon too small for the tabulated prior support");
            std::size_t lambda = prior.sample(rng);
            while (lambda > horizon) {
                ++rec.prior_rejections;
                lambda = prior.sample(rng);
            }
            rec.change_point = lambda;
            break;
        }
    }

    DetectorOptions opts = detector;
    if (mode != ChangePointMode::NoChange) opts.early_abandon_ratio = 0.0;

    auto path = model.sample_path(rec.change_point, horizon, rng.next_u64());
    RunOutcome out = run_detector(*path, prior, policy, horizon, opts);
    rec.stop_step = out.stop_step;
    rec.abandoned = out.abandoned;
    rec.censored = !out.stop_step.has_value();
    if (out.stop_step && rec.change_point != kNoChange) {
        rec.false_alarm = *out.stop_step < rec.change_point;
        rec.delay = *out.stop_step >= rec.change_point
                        ? static_cast<double>(*out.stop_step - rec.change_point)
                        : 0.0;
    }

    if (mode == ChangePointMode::Fixed) {
        rec.nu_k_step =
            dominating_time_nu_k(*path, prior, fixed_k, policy.threshold, horizon);
        bool violated = rec.stop_step && rec.nu_k_step && *rec.stop_step > *rec.nu_k_step;
        if (violated || (rec.nu_k_step && !rec.stop_step))
            throw std::logic_error("domination audit failed: tau_A > nu_k on a path");
    }
    return rec;
}

EstimateSummary estimate_pfa_global(const Model& model, const Prior& prior,
                                    const ThresholdPolicy& policy, std::size_t horizon,
                                    std::size_t n_trials, std::uint64_t seed,
                                    const CampaignOptions& opts) {
    std::vector<char> alarmed(n_trials, 0);
    DetectorOptions det = opts.detector;
    if (det.early_abandon_ratio == 0.0) det.early_abandon_ratio = kNoChangeAbandonRatio;
    for_each_trial(n_trials, opts.threads, [&](std::size_t t) {
        TrialRecord rec = run_trial(model, prior, policy, ChangePointMode::NoChange, 0,
                                    horizon, trial_seed(seed, t), det);
        alarmed[t] = rec.stop_step.has_value() ? 1 : 0;
    });
    std::size_t alarms = 0;
    for (char a : alarmed) alarms += a;
    EstimateSummary s;
    s.metric = "PFA_global";
    s.n_trials = n_trials;
    s.horizon = horizon;
    s.censored = n_trials - alarms;
    s.effective = n_trials;
    s.value = static_cast<double>(alarms) / static_cast<double>(n_trials);
    s.stderr_ = binomial_se(s.value, n_trials);
    return s;
}

std::vector<EstimateSummary> estimate_delay_moments(
    const Model& model, const Prior& prior, const ThresholdPolicy& policy,
    const std::vector<unsigned>& m_list, std::size_t horizon, std::size_t n_trials,
    std::uint64_t seed, const CampaignOptions& opts) {
    std::vector<TrialRecord> recs(n_trials);
    for_each_trial(n_trials, opts.threads, [&](std::size_t t) {
        recs[t] = run_trial(model, prior, policy, ChangePointMode::FromPrior, 0, horizon,
                            trial_seed(seed, t), opts.detector);
    });

    std::vector<double> delays;  // conditional on tau >= lambda, stopped trials
    delays.reserve(n_trials);
    std::size_t censored = 0;
    for (const TrialRecord& r : recs) {
        if (r.censored)
            ++censored;
        else if (!r.false_alarm)
            delays.push_back(r.delay);
    }
    if (delays.size() < 100)
        throw RefusalError("delay estimate refused: only " +
                           std::to_string(delays.size()) + " effective trials");

    std::vector<EstimateSummary> out;
    std::vector<double> powers(delays.size());
    std::vector<double> powers_all(n_trials);
    for (unsigned m : m_list) {
        for (std::size_t i = 0; i < delays.size(); ++i)
            powers[i] = std::pow(delays[i], static_cast<double>(m));
        MeanSe cond = mean_and_se(powers);

        EstimateSummary s;
        s.metric = m == 1 ? "ADD" : "D" + std::to_string(m);
        s.value = cond.mean;
        s.stderr_ = cond.se;
        s.n_trials = n_trials;
        s.horizon = horizon;
        s.censored = censored;
        s.effective = delays.size();
        out.push_back(s);

        // Unconditioned E^pi[((tau-lambda)^+)^m]; censored trials excluded
        // and reported (they cannot occur in the infinite-horizon theory).
        std::size_t j = 0;
        for (const TrialRecord& r : recs)
            if (!r.censored)
                powers_all[j++] = std::pow(r.delay, static_cast<double>(m));
        MeanSe uncond = mean_and_se({powers_all.data(), j});

        EstimateSummary u = s;
        u.metric = s.metric + "_unconditional";
        u.value = uncond.mean;
        u.stderr_ = uncond.se;
        u.effective = j;
        out.push_back(u);
    }
    return out;
}

std::vector<EstimateSummary> estimate_cond_add(const Model& model, const Prior& prior,
                                               const ThresholdPolicy& policy,
                                               const std::vector<std::size_t>& k_list,
                                               std::size_t horizon, std::size_t n_trials,
                                               std::uint64_t seed,
                                               const CampaignOptions& opts) {
    std::vector<EstimateSummary> out;
    for (std::size_t idx = 0; idx < k_list.size(); ++idx) {
        const std::size_t k = k_list[idx];
        std::vector<TrialRecord> recs(n_trials);
        std::uint64_t campaign_seed = splitmix64(seed + idx);
        for_each_trial(n_trials, opts.threads, [&](std::size_t t) {
            recs[t] = run_trial(model, prior, policy, ChangePointMode::Fixed, k, horizon,
                                trial_seed(campaign_seed, t), opts.detector);
        });
        std::vector<double> delays;
        std::size_t censored = 0;
        for (const TrialRecord& r : recs) {
            if (r.censored)
                ++censored;
            else if (!r.false_alarm)
                delays.push_back(r.delay);
        }
        if (delays.size() < 100)
            throw RefusalError("conditional ADD at k=" + std::to_string(k) +
                               " refused: only " + std::to_string(delays.size()) +
                               " effective trials");
        MeanSe m = mean_and_se(delays);
        EstimateSummary s;
        s.metric = "CondADD(" + std::to_string(k) + ")";
        s.value = m.mean;
        s.stderr_ = m.se;
        s.n_trials = n_trials;
        s.horizon = horizon;
        s.censored = censored;
        s.effective = delays.size();
        out.push_back(s);
    }
    return out;
}

SlopeReport slope_study(const Model& model, const Prior& prior,
                        const std::vector<double>& a_grid, std::size_t n_trials,
                        std::uint64_t seed, const CampaignOptions& opts) {
    if (a_grid.size() < 3) throw ConfigError("slope study needs at least 3 thresholds");
    double lo = a_grid.front(), hi = a_grid.front();
    for (double a : a_grid) {
        if (!(a > 1.0)) throw ConfigError("slope study thresholds must exceed 1");
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi / lo < 100.0 * (1.0 - 1e-12))
        throw ConfigError("slope study grid must span at least two decades");

    SlopeReport rep;
    rep.one_over_q = 1.0 / model.drift();
    std::vector<double> log_as;
    std::vector<double> largest_a_delays;
    double largest_a = hi;
    for (std::size_t idx = 0; idx < a_grid.size(); ++idx) {
        const double a = a_grid[idx];
        ThresholdPolicy policy = ThresholdPolicy::from_threshold(a);
        std::size_t horizon = default_horizon(prior, model.drift(), a);
        std::vector<TrialRecord> recs(n_trials);
        std::uint64_t campaign_seed = splitmix64(seed + idx);
        for_each_trial(n_trials, opts.threads, [&](std::size_t t) {
            recs[t] = run_trial(model, prior, policy, ChangePointMode::FromPrior, 0,
                                horizon, trial_seed(campaign_seed, t), opts.detector);
        });
        std::vector<double> delays;
        for (const TrialRecord& r : recs)
            if (!r.censored && !r.false_alarm) delays.push_back(r.delay);
        if (delays.size() < 100)
            throw RefusalError("slope study at A=" + std::to_string(a) +
                               ": too few effective trials");
        MeanSe m = mean_and_se(delays);
        rep.thresholds.push_back(a);
        rep.add_values.push_back(m.mean);
        rep.add_se.push_back(m.se);
        log_as.push_back(std::log(a));
        if (a == largest_a) {
            largest_a_delays = delays;
            for (double& d : largest_a_delays) d /= std::log(a);
        }
    }
    LinearFit fit = least_squares(log_as, rep.add_values);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.relative_deviation = std::abs(rep.slope - rep.one_over_q) / rep.one_over_q;
    rep.median_delay_over_log_a = median_inplace(largest_a_delays);
    return rep;
}

CompareReport compare_rules(const Model& model, const Prior& prior,
                            const ThresholdPolicy& policy, double shiryaev_b,
                            std::size_t horizon, std::size_t n_trials, std::uint64_t seed,
                            const CampaignOptions& opts) {
    if (!(shiryaev_b > 0.0) || !(shiryaev_b < 1.0))
        throw ConfigError("Shiryaev threshold B must lie in (0,1)");
    struct Pair {
        std::size_t lambda = 0;
        std::optional<std::size_t> tau, nu;
    };
    std::vector<Pair> recs(n_trials);
    for_each_trial(n_trials, opts.threads, [&](std::size_t t) {
        Rng rng(trial_seed(seed, t));
        if (!prior.finite_support() && prior.tail(horizon + 1) >= 1e-6)
            throw ConfigError("horizon too small for the prior");
        std::size_t lambda = prior.sample(rng);
        while (lambda > horizon) lambda = prior.sample(rng);
        auto path = model.sample_path(lambda, horizon, rng.next_u64());

        // Shared trajectory: step both rules over the same per-step states.
        std::optional<std::size_t> tau, nu;
        DetectorState state;
        bool direct = path->capability() == LlrCapability::ChangePointDependent;
        for (std::size_t n = 1; n <= horizon && (!tau || !nu); ++n) {
            if (direct)
                state = update_direct(std::move(state), *path, prior);
            else
                state = update_recursive(std::move(state), path->increment(n), prior);
            if (!tau && state.log_g >= policy.log_threshold()) tau = n;
            if (!nu && state.posterior >= shiryaev_b) nu = n;
        }
        recs[t] = Pair{lambda, tau, nu};
    });

    auto summarize = [&](auto get_stop, const char* name) {
        std::vector<double> delays;
        std::size_t censored = 0, alarms = 0;
        for (const Pair& p : recs) {
            auto stop = get_stop(p);
            if (!stop) {
                ++censored;
                continue;
            }
            if (*stop < p.lambda)
                ++alarms;
            else
                delays.push_back(static_cast<double>(*stop - p.lambda));
        }
        MeanSe m = mean_and_se(delays);
        EstimateSummary s;
        s.metric = name;
        s.value = m.mean;
        s.stderr_ = m.se;
        s.n_trials = n_trials;
        s.horizon = horizon;
        s.censored = censored;
        s.effective = delays.size();
        return std::pair<EstimateSummary, double>(
            s, static_cast<double>(alarms) / static_cast<double>(n_trials));
    };

    CompareReport rep;
    rep.n_trials = n_trials;
    auto [tau_s, tau_fa] = summarize([](const Pair& p) { return p.tau; }, "ADD_tauA");
    auto [nu_s, nu_fa] = summarize([](const Pair& p) { return p.nu; }, "ADD_shiryaev");
    rep.tau_add = tau_s;
    rep.shiryaev_add = nu_s;
    rep.tau_false_alarm_rate = tau_fa;
    rep.shiryaev_false_alarm_rate = nu_fa;
    return rep;
}

}  // namespace seqdet
