#pragma once

#include <vector>

#include "seqdet/model.hpp"

namespace seqdet {

/// Constant signal theta appearing at the change point in zero-mean stable
/// Gaussian AR(p) noise. Whitening reduces the problem to independent
/// Gaussian innovations; the signal profile seen after whitening depends on
/// the time since the change for the first p steps, so the model is treated
/// as change-point dependent in full generality.
class ArModel : public Model {
public:
    ArModel(double theta, double sigma, std::vector<double> deltas);

    double theta() const { return theta_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& deltas() const { return deltas_; }
    std::size_t order() const { return deltas_.size(); }

    /// Whitened sequence: X~_1 = X_1, then the (partial) p-term window.
    std::vector<double> whiten(const std::vector<double>& xs) const;

    /// theta~_i(k) for i >= k: theta at i = k, partial-sum adjusted up to
    /// i = p+k-1, theta(1 - sum delta_j) from i = p+k on.
    double signal_profile(std::size_t k, std::size_t i) const;

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    /// q = theta^2 (1 - sum delta_j)^2 / (2 sigma^2).
    double drift() const override;
    std::unique_ptr<LlrPath> sample_path(std::size_t change_point, std::size_t n_max,
                                         std::uint64_t seed) const override;
    const char* name() const override { return "ar"; }

private:
    double theta_;
    double sigma_;
    std::vector<double> deltas_;
    std::vector<double> delta_prefix_;  // delta_prefix_[j] = sum of first j coefficients
};

}  // namespace seqdet
