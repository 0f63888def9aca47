#include "seqdet/ar_model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "seqdet/errors.hpp"

namespace seqdet {

namespace {

// Stability of 1 - sum delta_j y^j having no roots inside the unit circle,
// checked via the companion matrix of z^p - delta_1 z^{p-1} - ... - delta_p.
bool is_stable(const std::vector<double>& deltas) {
    const std::size_t p = deltas.size();
    bool all_zero = true;
    for (double d : deltas)
        if (d != 0.0) all_zero = false;
    if (all_zero) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t j = 0; j < p; ++j) companion(0, j) = deltas[j];
    for (std::size_t j = 1; j < p; ++j) companion(j, j - 1) = 1.0;
    Eigen::VectorXcd roots = companion.eigenvalues();
    for (Eigen::Index i = 0; i < roots.size(); ++i)
        if (std::abs(roots[i]) >= 1.0 - 1e-10) return false;
    return true;
}

class ArPath final : public LlrPath {
public:
    ArPath(const ArModel& model, std::size_t change_point, std::size_t n_max,
           std::uint64_t seed)
        : model_(model), change_(change_point), n_max_(n_max), rng_(seed) {}

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    std::size_t length() const override { return n_max_; }

    double step(std::size_t k, std::size_t n) override {
        ensure(n);
        double th = model_.signal_profile(k, n);
        double s2 = model_.sigma() * model_.sigma();
        return (th * whitened_[n - 1] - 0.5 * th * th) / s2;
    }

    double observation_scalar(std::size_t n) override {
        ensure(n);
        return xs_[n - 1];
    }

private:
    void ensure(std::size_t n) {
        const std::size_t p = model_.order();
        const auto& d = model_.deltas();
        while (xs_.size() < n) {
            std::size_t i = xs_.size() + 1;
            double v = rng_.gaussian(0.0, model_.sigma());
            for (std::size_t j = 1; j <= p && j < i; ++j) v += d[j - 1] * vs_[i - 1 - j];
            vs_.push_back(v);
            double x = v + ((i >= change_) ? model_.theta() : 0.0);
            xs_.push_back(x);
            double w = x;
            for (std::size_t j = 1; j <= p && j < i; ++j) w -= d[j - 1] * xs_[i - 1 - j];
            whitened_.push_back(w);
        }
    }

    const ArModel& model_;
    std::size_t change_;
    std::size_t n_max_;
    Rng rng_;
    std::vector<double> vs_;        // noise process V_n
    std::vector<double> xs_;        // observations
    std::vector<double> whitened_;  // X~_n
};

}  // namespace

ArModel::ArModel(double theta, double sigma, std::vector<double> deltas)
    : theta_(theta), sigma_(sigma), deltas_(std::move(deltas)) {
    if (theta_ == 0.0 || !std::isfinite(theta_))
        throw ConfigError("AR model requires theta != 0");
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_))
        throw ConfigError("AR model requires sigma > 0");
    if (deltas_.empty()) throw ConfigError("AR model requires at least one coefficient");
    if (!is_stable(deltas_)) throw ConfigError("AR coefficients are not stable");
    delta_prefix_.assign(deltas_.size() + 1, 0.0);
    for (std::size_t j = 0; j < deltas_.size(); ++j)
        delta_prefix_[j + 1] = delta_prefix_[j] + deltas_[j];
    if (drift() <= 0.0) throw ConfigError("AR model has zero drift (theta sum cancels)");
}

std::vector<double> ArModel::whiten(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    const std::size_t p = deltas_.size();
    for (std::size_t i = 1; i <= xs.size(); ++i) {
        double w = xs[i - 1];
        for (std::size_t j = 1; j <= p && j < i; ++j) w -= deltas_[j - 1] * xs[i - 1 - j];
        out[i - 1] = w;
    }
    return out;
}

double ArModel::signal_profile(std::size_t k, std::size_t i) const {
    if (k == 0 || i < k) throw ConfigError("signal_profile requires 1 <= k <= i");
    const std::size_t p = deltas_.size();
    if (i == k) return theta_;
    if (i >= p + k) return theta_ * (1.0 - delta_prefix_[p]);
    return theta_ * (1.0 - delta_prefix_[i - k]);
}

double ArModel::drift() const {
    double g = 1.0 - delta_prefix_[deltas_.size()];
    return theta_ * theta_ * g * g / (2.0 * sigma_ * sigma_);
}

std::unique_ptr<LlrPath> ArModel::sample_path(std::size_t change_point, std::size_t n_max,
                                              std::uint64_t seed) const {
    return std::make_unique<ArPath>(*this, change_point, n_max, seed);
}

}  // namespace seqdet
