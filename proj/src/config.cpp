#include "seqdet/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "seqdet/ar_model.hpp"
#include "seqdet/errors.hpp"
#include "seqdet/exp_model.hpp"
#include "seqdet/mixture_model.hpp"
#include "seqdet/state_space_model.hpp"

namespace seqdet {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number()) fail(key, "missing or not a number");
    return j[key].get<double>();
}

Density parse_density(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains("family")) fail(key, "expected {family, ...}");
    std::string family = j["family"].get<std::string>();
    if (family == "gaussian")
        return Density::gaussian(require_number(j, "mean"), require_number(j, "stddev"));
    if (family == "exponential") return Density::exponential(require_number(j, "mean"));
    fail(key + ".family", "unknown density family '" + family + "'");
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) fail(key, "expected a nonempty matrix (array of rows)");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols) fail(key, "ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& key) {
    if (!j.is_array()) fail(key, "expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

std::shared_ptr<Model> parse_model(const json& j) {
    if (!j.is_object() || !j.contains("kind")) fail("model", "expected {kind, ...}");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "exponential") return std::make_shared<ExpModel>(require_number(j, "Q"));
    if (kind == "ar") {
        if (!j.contains("deltas") || !j["deltas"].is_array())
            fail("model.deltas", "expected an array of AR coefficients");
        return std::make_shared<ArModel>(require_number(j, "theta"),
                                         require_number(j, "sigma"),
                                         j["deltas"].get<std::vector<double>>());
    }
    if (kind == "state_space")
        return std::make_shared<StateSpaceModel>(
            parse_matrix(j.at("F"), "model.F"), parse_matrix(j.at("K_W"), "model.K_W"),
            parse_matrix(j.at("K_V"), "model.K_V"),
            parse_vector(j.at("nu_theta"), "model.nu_theta"),
            parse_vector(j.at("nu_x"), "model.nu_x"));
    if (kind == "mixture")
        return std::make_shared<MixtureModel>(require_number(j, "beta"),
                                              parse_density(j.at("g1"), "model.g1"),
                                              parse_density(j.at("g2"), "model.g2"),
                                              parse_density(j.at("f1"), "model.f1"));
    fail("model.kind", "unknown model kind '" + kind + "'");
}

Prior parse_prior(const json& j) {
    if (!j.is_object() || !j.contains("kind")) fail("prior", "expected {kind, ...}");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "geometric") return Prior::geometric(require_number(j, "rho"));
    if (kind == "tabulated") {
        if (j.contains("csv"))
            return Prior::tabulated_from_csv(j["csv"].get<std::string>());
        if (j.contains("weights") && j["weights"].is_array())
            return Prior::tabulated(j["weights"].get<std::vector<double>>());
        fail("prior", "tabulated prior needs 'weights' or 'csv'");
    }
    fail("prior.kind", "unknown prior kind '" + kind + "'");
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    if (!j.contains("model")) fail("model", "required");
    if (!j.contains("prior")) fail("prior", "required");
    c.model = parse_model(j["model"]);
    c.prior = parse_prior(j["prior"]);

    bool has_alpha = j.contains("alpha");
    bool has_a = j.contains("A");
    if (has_alpha == has_a) fail("alpha/A", "exactly one of 'alpha' and 'A' is required");
    if (has_alpha) {
        c.alpha = require_number(j, "alpha");
        if (!(*c.alpha > 0.0) || !(*c.alpha < 1.0)) fail("alpha", "must lie in (0,1)");
    } else {
        c.threshold_a = require_number(j, "A");
        if (!(*c.threshold_a > 1.0)) fail("A", "must exceed 1");
    }

    if (j.contains("calibration")) {
        std::string cal = j["calibration"].get<std::string>();
        if (cal == "conservative")
            c.calibration = ThresholdPolicy::Calibration::ConservativeBound;
        else if (cal == "corrected")
            c.calibration = ThresholdPolicy::Calibration::OvershootCorrected;
        else
            fail("calibration", "expected 'conservative' or 'corrected'");
    }

    auto get_uint = [&](const char* key, std::size_t fallback) -> std::size_t {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_unsigned()) fail(key, "must be a nonnegative integer");
        return j[key].get<std::size_t>();
    };
    c.horizon = get_uint("horizon", 0);
    c.n_trials = get_uint("n_trials", c.n_trials);
    if (c.n_trials == 0) fail("n_trials", "must be positive");
    c.seed = get_uint("seed", 1);
    c.change_point = get_uint("change_point", 1);
    c.overshoot_trials = get_uint("overshoot_trials", c.overshoot_trials);
    c.threads = static_cast<unsigned>(get_uint("threads", 0));

    if (j.contains("m_list")) {
        c.m_list = j["m_list"].get<std::vector<unsigned>>();
        if (c.m_list.empty()) fail("m_list", "must be nonempty");
        for (unsigned m : c.m_list)
            if (m == 0) fail("m_list", "moments must be >= 1");
    }
    if (j.contains("k_list")) {
        c.k_list = j["k_list"].get<std::vector<std::size_t>>();
        for (std::size_t k : c.k_list)
            if (k == 0) fail("k_list", "change points must be >= 1");
    }
    if (j.contains("A_grid")) c.a_grid = j["A_grid"].get<std::vector<double>>();
    if (j.contains("campaign")) {
        c.campaign = j["campaign"].get<std::string>();
        if (c.campaign != "pfa" && c.campaign != "add" && c.campaign != "cond_add" &&
            c.campaign != "slope")
            fail("campaign", "expected pfa|add|cond_add|slope");
    }
    if (j.contains("shiryaev_B")) {
        c.shiryaev_b = require_number(j, "shiryaev_B");
        if (!(c.shiryaev_b > 0.0) || !(c.shiryaev_b < 1.0))
            fail("shiryaev_B", "must lie in (0,1)");
    }
    if (j.contains("overshoot_b")) {
        c.overshoot_b = require_number(j, "overshoot_b");
        if (!(c.overshoot_b > 0.0)) fail("overshoot_b", "must be positive");
    }

    c.canonical_json = j.dump();
    c.config_hash = fnv1a64(c.canonical_json);
    return c;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ResolvedPolicy resolve_policy(const RunConfig& config) {
    ResolvedPolicy out;
    if (config.threshold_a) {
        out.policy = ThresholdPolicy::from_threshold(*config.threshold_a,
                                                     config.calibration);
        return out;
    }
    if (config.calibration == ThresholdPolicy::Calibration::ConservativeBound) {
        out.policy = calibrate_threshold(*config.alpha, config.calibration);
        return out;
    }
    double b = config.overshoot_b > 0.0
                   ? config.overshoot_b
                   : std::max(25.0, 25.0 * config.model->drift());
    out.overshoot =
        estimate_overshoot(*config.model, b, config.overshoot_trials, config.seed);
    out.policy =
        calibrate_threshold(*config.alpha, config.calibration, out.overshoot->zeta_hat);
    return out;
}

}  // namespace seqdet
