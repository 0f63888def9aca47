#pragma once

#include <memory>

#include "seqdet/llr.hpp"
#include "seqdet/rng.hpp"

namespace seqdet {

/// An observation model: samples trajectories under P_k (change at k) or
/// P_inf (no change, k = kNoChange) and evaluates the LLR along them.
///
/// Immutable after construction and shareable across trial workers; each
/// sampled path owns its RNG stream and caches.
class Model {
public:
    virtual ~Model() = default;

    virtual LlrCapability capability() const = 0;

    /// Asymptotic per-step LLR drift q under P_k (the Kullback-Leibler
    /// number I in the i.i.d. case).
    virtual double drift() const = 0;

    /// Sample X_1..X_{n_max} with the change at k (kNoChange for pure
    /// pre-change) and wrap the trajectory in an LLR evaluator.
    /// Deterministic given the seed.
    virtual std::unique_ptr<LlrPath> sample_path(std::size_t change_point,
                                                 std::size_t n_max,
                                                 std::uint64_t seed) const = 0;

    virtual const char* name() const = 0;
};

}  // namespace seqdet
