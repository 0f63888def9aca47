#pragma once

#include <vector>

#include "seqdet/model.hpp"

namespace seqdet {

/// One-dimensional density from a small parametric menu with analytic
/// log-density, so the KL admission check can be done by quadrature.
struct Density {
    enum class Family { Gaussian, Exponential };

    Family family = Family::Gaussian;
    double a = 0.0;  // Gaussian mean / Exponential mean
    double b = 1.0;  // Gaussian stddev (unused for Exponential)

    static Density gaussian(double mean, double stddev);
    static Density exponential(double mean);

    double log_pdf(double x) const;
    double sample(Rng& rng) const;

    bool operator==(const Density&) const = default;
};

/// Pre-change observations follow the mixture joint density
/// beta * prod g1 + (1-beta) * prod g2 (a single component drawn per
/// trajectory); post-change observations are i.i.d. f1.
///
/// The LLR carries a correction term through the running component odds,
/// which depends on the hypothesized change point.
class MixtureModel : public Model {
public:
    MixtureModel(double beta, Density g1, Density g2, Density f1);

    double beta() const { return beta_; }
    double odds() const { return beta_ / (1.0 - beta_); }  // v
    double kl1() const { return i1_; }                     // I_1 = E_1 R_1(1)
    double kl2() const { return i2_; }                     // I_2 = E_1 R_2(1)
    const Density& g1() const { return g1_; }
    const Density& g2() const { return g2_; }
    const Density& f1() const { return f1_; }

    /// Z_n^k = sum_{i=k}^n R_2(i) + log[(1 + v xi_{k-1}) / (1 + v xi_n)]
    /// evaluated on raw observations.
    double llr_from_observations(const std::vector<double>& xs, std::size_t k,
                                 std::size_t n) const;

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    double drift() const override { return i2_; }
    std::unique_ptr<LlrPath> sample_path(std::size_t change_point, std::size_t n_max,
                                         std::uint64_t seed) const override;
    const char* name() const override { return "mixture"; }

private:
    double beta_;
    Density g1_, g2_, f1_;
    double i1_ = 0.0, i2_ = 0.0;
};

}  // namespace seqdet
