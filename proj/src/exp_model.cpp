#include "seqdet/exp_model.hpp"

#include <cmath>
#include <vector>

#include "seqdet/errors.hpp"

namespace seqdet {

namespace {

class ExpPath final : public LlrPath {
public:
    ExpPath(const ExpModel& model, std::size_t change_point, std::size_t n_max,
            std::uint64_t seed)
        : model_(model), change_(change_point), n_max_(n_max), rng_(seed) {
        xs_.reserve(std::min<std::size_t>(n_max, 4096));
    }

    LlrCapability capability() const override { return LlrCapability::IncrementStationary; }
    std::size_t length() const override { return n_max_; }

    double step(std::size_t, std::size_t n) override {
        return model_.llr_increment(observation(n));
    }

    double observation_scalar(std::size_t n) override { return observation(n); }

private:
    double observation(std::size_t n) {
        while (xs_.size() < n) {
            std::size_t i = xs_.size() + 1;
            double mean = (i >= change_) ? 1.0 + model_.q_shift() : 1.0;
            xs_.push_back(rng_.exponential(mean));
        }
        return xs_[n - 1];
    }

    const ExpModel& model_;
    std::size_t change_;
    std::size_t n_max_;
    Rng rng_;
    std::vector<double> xs_;
};

}  // namespace

ExpModel::ExpModel(double q_shift) : q_(q_shift) {
    if (!(q_ > 0.0) || !std::isfinite(q_))
        throw ConfigError("exponential model requires Q > 0");
}

double ExpModel::llr_increment(double x) const {
    if (x < 0.0) throw ConfigError("exponential observation outside support (x < 0)");
    return -std::log1p(q_) + (q_ / (1.0 + q_)) * x;
}

double ExpModel::kl_number() const { return q_ - std::log1p(q_); }

double ExpModel::reverse_kl_number() const { return std::log1p(q_) - q_ / (1.0 + q_); }

std::unique_ptr<LlrPath> ExpModel::sample_path(std::size_t change_point, std::size_t n_max,
                                               std::uint64_t seed) const {
    return std::make_unique<ExpPath>(*this, change_point, n_max, seed);
}

}  // namespace seqdet
