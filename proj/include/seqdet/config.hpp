#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqdet/detect.hpp"
#include "seqdet/model.hpp"
#include "seqdet/prior.hpp"
#include "seqdet/renewal.hpp"

namespace seqdet {

inline constexpr const char* kVersion = "0.1.0";

/// Parsed run configuration (single JSON document). Exactly one of
/// {alpha, A} must be present; numeric fields are validated at load time
/// against the module preconditions, naming the offending key.
struct RunConfig {
    std::shared_ptr<Model> model;
    std::optional<Prior> prior;
    std::optional<double> alpha;
    std::optional<double> threshold_a;
    ThresholdPolicy::Calibration calibration =
        ThresholdPolicy::Calibration::ConservativeBound;
    std::size_t horizon = 0;  // 0 = derive from prior and threshold
    std::size_t n_trials = 10000;
    std::uint64_t seed = 1;
    std::vector<unsigned> m_list = {1};
    std::vector<std::size_t> k_list;
    std::vector<double> a_grid;
    std::string campaign = "add";  // pfa | add | cond_add | slope
    double shiryaev_b = 0.0;       // 0 = default 1 - alpha (or posterior form of A)
    std::size_t change_point = 1;  // for traces; 0 means no change
    double overshoot_b = 0.0;      // 0 = default max(25, 25 q)
    std::size_t overshoot_trials = 100000;
    unsigned threads = 0;

    std::string canonical_json;  // re-serialized config (sorted keys)
    std::uint64_t config_hash = 0;
};

RunConfig load_config(const std::filesystem::path& file);
RunConfig parse_config(const std::string& json_text);

/// The threshold for this run: explicit A, or 1/alpha, or 1/(zeta alpha)
/// with zeta estimated by Monte Carlo (overshoot estimate returned when run).
struct ResolvedPolicy {
    ThresholdPolicy policy;
    std::optional<OvershootEstimate> overshoot;
};

ResolvedPolicy resolve_policy(const RunConfig& config);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace seqdet
