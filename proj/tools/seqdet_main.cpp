// Command-line front end: thin orchestration over the detection library.
// Subcommands: calibrate, simulate, trace, approx, compare.
// Exit codes: 0 success, 2 config error, 3 runtime refusal.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "seqdet/config.hpp"
#include "seqdet/errors.hpp"
#include "seqdet/exp_model.hpp"
#include "seqdet/renewal.hpp"
#include "seqdet/simulate.hpp"

namespace {

using namespace seqdet;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
    unsigned threads_override = 0;
    bool has_threads_override = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: .)");
    cmd->add_option("--seed", args.seed_override, "override the config seed")
        ->each([&args](const std::string&) { args.has_seed_override = true; });
    cmd->add_option("--threads", args.threads_override, "override worker thread count")
        ->each([&args](const std::string&) { args.has_threads_override = true; });
}

RunConfig load(const CommonArgs& args) {
    RunConfig c = load_config(args.config_path);
    if (args.has_seed_override) c.seed = args.seed_override;
    if (args.has_threads_override) c.threads = args.threads_override;
    return c;
}

std::ofstream open_output(const CommonArgs& args, const std::string& filename) {
    std::filesystem::create_directories(args.out_dir);
    std::filesystem::path p = std::filesystem::path(args.out_dir) / filename;
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot open output file: " + p.string());
    out << std::setprecision(17);
    return out;
}

void write_provenance(std::ostream& out, const RunConfig& c) {
    out << "# version=" << kVersion << " config_hash=" << std::hex << c.config_hash
        << std::dec << " seed=" << c.seed << "\n";
}

/// kappa_bar for the higher-order delay approximation: exact for the
/// exponential model, Monte Carlo for everything else.
OvershootEstimate overshoot_constants(const RunConfig& c) {
    if (const auto* exp_model = dynamic_cast<const ExpModel*>(c.model.get())) {
        OvershootEstimate e;
        e.zeta_hat = exp_model->zeta_exact();
        e.kappa_bar_hat = exp_model->kappa_bar_exact();
        e.b_used = 0.0;  // analytic, no simulation
        return e;
    }
    double b = c.overshoot_b > 0.0 ? c.overshoot_b
                                   : std::max(25.0, 25.0 * c.model->drift());
    return estimate_overshoot(*c.model, b, c.overshoot_trials, c.seed);
}

std::size_t campaign_horizon(const RunConfig& c, const ThresholdPolicy& policy) {
    if (c.horizon > 0) return c.horizon;
    return default_horizon(*c.prior, c.model->drift(), policy.threshold);
}

int cmd_calibrate(const CommonArgs& args) {
    RunConfig c = load(args);
    ResolvedPolicy r = resolve_policy(c);
    std::ofstream out = open_output(args, "calibration.csv");
    write_provenance(out, c);
    out << "alpha,calibration,zeta_hat,se_zeta,kappa_bar_hat,se_kappa,A\n";
    double alpha = c.alpha ? *c.alpha : 1.0 / r.policy.threshold;
    const char* cal = r.policy.calibration == ThresholdPolicy::Calibration::ConservativeBound
                          ? "conservative"
                          : "corrected";
    if (r.overshoot) {
        out << alpha << ',' << cal << ',' << r.overshoot->zeta_hat << ','
            << r.overshoot->se_zeta << ',' << r.overshoot->kappa_bar_hat << ','
            << r.overshoot->se_kappa << ',' << r.policy.threshold << "\n";
    } else {
        out << alpha << ',' << cal << ",,,,," << r.policy.threshold << "\n";
    }
    std::cout << "A = " << std::setprecision(17) << r.policy.threshold << " ("
              << cal << ")\n";
    return 0;
}

void write_summary_rows(std::ostream& out, const std::vector<EstimateSummary>& rows) {
    out << "metric,value,stderr,n_trials,horizon,censored,effective\n";
    for (const auto& s : rows)
        out << s.metric << ',' << s.value << ',' << s.stderr_ << ',' << s.n_trials << ','
            << s.horizon << ',' << s.censored << ',' << s.effective << "\n";
}

int cmd_simulate(const CommonArgs& args) {
    RunConfig c = load(args);
    ResolvedPolicy r = resolve_policy(c);
    std::size_t horizon = campaign_horizon(c, r.policy);
    CampaignOptions opts;
    opts.threads = c.threads;

    std::vector<EstimateSummary> rows;
    if (c.campaign == "pfa") {
        rows.push_back(estimate_pfa_global(*c.model, *c.prior, r.policy, horizon,
                                           c.n_trials, c.seed, opts));
    } else if (c.campaign == "add") {
        rows = estimate_delay_moments(*c.model, *c.prior, r.policy, c.m_list, horizon,
                                      c.n_trials, c.seed, opts);
    } else if (c.campaign == "cond_add") {
        std::vector<std::size_t> ks = c.k_list.empty()
                                          ? std::vector<std::size_t>{1}
                                          : c.k_list;
        rows = estimate_cond_add(*c.model, *c.prior, r.policy, ks, horizon, c.n_trials,
                                 c.seed, opts);
    } else {  // slope
        if (c.a_grid.size() < 3)
            throw ConfigError("config key 'A_grid': slope campaign needs >= 3 thresholds");
        SlopeReport rep =
            slope_study(*c.model, *c.prior, c.a_grid, c.n_trials, c.seed, opts);
        std::ofstream out = open_output(args, "slope.csv");
        write_provenance(out, c);
        out << "A,add,add_se\n";
        for (std::size_t i = 0; i < rep.thresholds.size(); ++i)
            out << rep.thresholds[i] << ',' << rep.add_values[i] << ','
                << rep.add_se[i] << "\n";
        out << "# slope=" << rep.slope << " intercept=" << rep.intercept
            << " one_over_q=" << rep.one_over_q
            << " relative_deviation=" << rep.relative_deviation
            << " median_delay_over_logA=" << rep.median_delay_over_log_a << "\n";
        std::cout << "slope = " << std::setprecision(17) << rep.slope
                  << " (1/q = " << rep.one_over_q << ")\n";
        return 0;
    }

    std::ofstream out = open_output(args, "campaign.csv");
    write_provenance(out, c);
    write_summary_rows(out, rows);
    for (const auto& s : rows)
        std::cout << s.metric << " = " << std::setprecision(17) << s.value << " (se "
                  << s.stderr_ << ", effective " << s.effective << ")\n";
    return 0;
}

int cmd_trace(const CommonArgs& args) {
    RunConfig c = load(args);
    ResolvedPolicy r = resolve_policy(c);
    std::size_t horizon = campaign_horizon(c, r.policy);
    std::size_t k = c.change_point == 0 ? kNoChange : c.change_point;

    std::ofstream out = open_output(args, "trace.csv");
    write_provenance(out, c);
    out << "n,x,G,posterior,posterior_threshold,stopped\n";
    TraceFn trace = [&](std::size_t n, double x, double log_g, double posterior,
                        double post_threshold, bool stopped) {
        out << n << ',' << x << ',' << std::exp(log_g) << ',' << posterior << ','
            << post_threshold << ',' << (stopped ? 1 : 0) << "\n";
    };
    auto path = c.model->sample_path(k, horizon, c.seed);
    DetectorOptions dopts;
    RunOutcome outcome = run_detector(*path, *c.prior, r.policy, horizon, dopts, &trace);
    if (outcome.stop_step)
        std::cout << "stopped at n = " << *outcome.stop_step << "\n";
    else
        std::cout << "no alarm within the horizon (" << horizon << " steps)\n";
    return 0;
}

int cmd_approx(const CommonArgs& args) {
    RunConfig c = load(args);
    if (c.a_grid.empty())
        throw ConfigError("config key 'A_grid': required for the approx command");
    OvershootEstimate e = overshoot_constants(c);
    double kl = c.model->drift();
    double c_pi = c.prior->entropy_constant();

    std::ofstream out = open_output(args, "approx.csv");
    write_provenance(out, c);
    out << "A,fo_add,ho_add,pfa_corrected\n";
    for (double a : c.a_grid)
        out << a << ','
            << add_approx(a, kl, c_pi, e.kappa_bar_hat, ApproxOrder::FirstOrder) << ','
            << add_approx(a, kl, c_pi, e.kappa_bar_hat, ApproxOrder::HigherOrder) << ','
            << pfa_corrected(a, e.zeta_hat) << "\n";
    std::cout << "wrote " << c.a_grid.size() << " rows (I = " << std::setprecision(17)
              << kl << ", C_pi = " << c_pi << ", kappa_bar = " << e.kappa_bar_hat
              << ")\n";
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    RunConfig c = load(args);
    ResolvedPolicy r = resolve_policy(c);
    std::size_t horizon = campaign_horizon(c, r.policy);
    CampaignOptions opts;
    opts.threads = c.threads;
    // Default Shiryaev level: the posterior level matching G >= A at large n.
    double b = c.shiryaev_b > 0.0 ? c.shiryaev_b : 1.0 - 1.0 / r.policy.threshold;
    CompareReport rep = compare_rules(*c.model, *c.prior, r.policy, b, horizon,
                                      c.n_trials, c.seed, opts);
    std::ofstream out = open_output(args, "compare.csv");
    write_provenance(out, c);
    out << "rule,add,add_se,false_alarm_rate,n_trials,effective\n";
    out << "tau_A," << rep.tau_add.value << ',' << rep.tau_add.stderr_ << ','
        << rep.tau_false_alarm_rate << ',' << rep.n_trials << ','
        << rep.tau_add.effective << "\n";
    out << "shiryaev," << rep.shiryaev_add.value << ',' << rep.shiryaev_add.stderr_
        << ',' << rep.shiryaev_false_alarm_rate << ',' << rep.n_trials << ','
        << rep.shiryaev_add.effective << "\n";
    std::cout << "tau_A ADD = " << std::setprecision(17) << rep.tau_add.value
              << ", Shiryaev ADD = " << rep.shiryaev_add.value << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Bayesian change-point detection"};
    app.require_subcommand(1);

    CommonArgs calibrate_args, simulate_args, trace_args, approx_args, compare_args;
    auto* calibrate =
        app.add_subcommand("calibrate", "resolve the detection threshold A");
    add_common(calibrate, calibrate_args);
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo campaign");
    add_common(simulate, simulate_args);
    auto* trace = app.add_subcommand("trace", "export a single-path per-step trace");
    add_common(trace, trace_args);
    auto* approx = app.add_subcommand("approx", "tabulate delay approximations");
    add_common(approx, approx_args);
    auto* compare =
        app.add_subcommand("compare", "paired comparison against the Shiryaev rule");
    add_common(compare, compare_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed()) return cmd_calibrate(calibrate_args);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (trace->parsed()) return cmd_trace(trace_args);
        if (approx->parsed()) return cmd_approx(approx_args);
        if (compare->parsed()) return cmd_compare(compare_args);
    } catch (const seqdet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const seqdet::RefusalError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
