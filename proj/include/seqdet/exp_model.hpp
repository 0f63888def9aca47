#pragma once

#include "seqdet/model.hpp"

namespace seqdet {

/// i.i.d. exponential scale change: pre-change Exp(1), post-change mean 1+Q.
class ExpModel : public Model {
public:
    explicit ExpModel(double q_shift);

    double q_shift() const { return q_; }

    /// ΔZ(x) = -log(1+Q) + [Q/(1+Q)] x, x >= 0.
    double llr_increment(double x) const;

    /// Kullback-Leibler number I = E_1[dZ] = Q - log(1+Q): the post-change
    /// drift of the LLR random walk, which governs detection delays.
    double kl_number() const;

    /// Reverse divergence log(1+Q) - Q/(1+Q) = -E_inf[dZ]: the pre-change
    /// decay rate of the LLR.
    double reverse_kl_number() const;

    /// Exact one-sided-test overshoot constants: zeta = 1/(1+Q), kappa_bar = Q.
    double zeta_exact() const { return 1.0 / (1.0 + q_); }
    double kappa_bar_exact() const { return q_; }

    LlrCapability capability() const override { return LlrCapability::IncrementStationary; }
    double drift() const override { return kl_number(); }
    std::unique_ptr<LlrPath> sample_path(std::size_t change_point, std::size_t n_max,
                                         std::uint64_t seed) const override;
    const char* name() const override { return "exponential"; }

private:
    double q_;
};

}  // namespace seqdet
