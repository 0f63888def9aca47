#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <vector>

#include "seqdet/rng.hpp"

namespace seqdet {

/// Prior distribution of the change point over k = 1, 2, ...
///
/// No mass at k = 0: the hypotheses "change at 0" and "change at 1" are
/// indistinguishable, so mass at 0 is rejected at construction.
///
/// Geometric priors carry their tail analytically and are never truncated;
/// tabulated priors have finite support and zero tail beyond it.
class Prior {
public:
    enum class Kind { Geometric, Tabulated };

    static Prior geometric(double rho);

    /// weights[i] is the raw weight of pi_{first_index + i}. Weights are
    /// normalized on construction; a deviation of the raw sum from 1 by more
    /// than 1e-6 is reported on stderr.
    static Prior tabulated(std::vector<double> weights, std::size_t first_index = 1);

    /// One-column CSV, row i (1-based) = raw weight of pi_i.
    static Prior tabulated_from_csv(const std::filesystem::path& file);

    Kind kind() const { return kind_; }
    double rho() const { return rho_; }

    /// pi_k = P(lambda = k), k >= 1.
    double pi(std::size_t k) const;
    double log_pi(std::size_t k) const;

    /// Tail Pi_n = P(lambda >= n), n >= 1. Zero beyond tabulated support.
    double tail(std::size_t n) const;
    double log_tail(std::size_t n) const;

    /// C_pi = sum_k pi_k |log pi_k|. Closed form for the geometric prior,
    /// direct summation for tabulated ones.
    double entropy_constant() const;

    /// Largest k with pi_k > 0 (max() for the geometric prior).
    std::size_t support_cap() const { return support_cap_; }
    bool finite_support() const { return kind_ == Kind::Tabulated; }

    /// Draw lambda ~ pi by inverse CDF.
    std::size_t sample(Rng& rng) const;

private:
    Prior() = default;

    Kind kind_ = Kind::Geometric;
    double rho_ = 0.0;
    std::vector<double> weights_;  // normalized, weights_[k-1] = pi_k
    std::vector<double> tails_;    // tails_[n-1] = Pi_n, size support_cap_+1
    std::size_t support_cap_ = std::numeric_limits<std::size_t>::max();
};

}  // namespace seqdet
