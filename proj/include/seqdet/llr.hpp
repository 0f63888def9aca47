#pragma once

#include <cstddef>
#include <limits>

namespace seqdet {

/// Index used for "change never happens" (pure pre-change trajectories).
inline constexpr std::size_t kNoChange = std::numeric_limits<std::size_t>::max();

enum class LlrCapability {
    /// Increments depend only on the current observation (and its history),
    /// so Z_n^k is a plain partial sum and G_n admits an O(1) recursion.
    IncrementStationary,
    /// The post-change law depends on the hypothesized change point k; the
    /// detector must carry one term per k.
    ChangePointDependent,
};

/// Per-trajectory provider of log-likelihood-ratio values Z_n^k for the
/// hypotheses "change at k" vs "no change".
///
/// Observations are generated lazily: querying step n materializes the
/// trajectory up to n and caches it, so abandoned runs never pay for the
/// full horizon.
///
/// step(k, n) must be called with n nondecreasing for a given k (the
/// detector's scan order); llr(k, n) is a convenience sum for tests and the
/// one-sided stopping times.
class LlrPath {
public:
    virtual ~LlrPath() = default;

    virtual LlrCapability capability() const = 0;

    /// Maximum trajectory length this path can produce.
    virtual std::size_t length() const = 0;

    /// Z_n^k - Z_{n-1}^k for n > k, and Z_k^k for n == k (Z_{k-1}^k := 0).
    virtual double step(std::size_t k, std::size_t n) = 0;

    /// Z_n^k, k <= n.
    virtual double llr(std::size_t k, std::size_t n) {
        double z = 0.0;
        for (std::size_t m = k; m <= n; ++m) z += step(k, m);
        return z;
    }

    /// ΔZ_n for IncrementStationary sources (== step(1, n) == step(k, n)).
    double increment(std::size_t n) { return step(1, n); }

    /// Scalar view of observation n for traces/exports (first component for
    /// vector-valued observations).
    virtual double observation_scalar(std::size_t n) = 0;
};

}  // namespace seqdet
