#include "seqdet/mixture_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "seqdet/errors.hpp"
#include "seqdet/numerics.hpp"

namespace seqdet {

namespace {

double kl_by_quadrature(const Density& f, const Density& g) {
    // int f(x) log(f/g) dx over the effective support of f, composite Simpson.
    double lo, hi;
    if (f.family == Density::Family::Gaussian) {
        lo = f.a - 13.0 * f.b;
        hi = f.a + 13.0 * f.b;
    } else {
        lo = 0.0;
        hi = 60.0 * f.a;
    }
    const std::size_t n = 40000;  // even
    const double h = (hi - lo) / static_cast<double>(n);
    auto integrand = [&](double x) {
        double lf = f.log_pdf(x);
        if (lf < -700.0) return 0.0;
        double lg = g.log_pdf(x);
        if (lg == kNegInf) return std::numeric_limits<double>::infinity();
        return std::exp(lf) * (lf - lg);
    };
    double s = integrand(lo) + integrand(hi);
    for (std::size_t i = 1; i < n; ++i)
        s += (i % 2 == 1 ? 4.0 : 2.0) * integrand(lo + h * static_cast<double>(i));
    return s * h / 3.0;
}

class MixturePath final : public LlrPath {
public:
    MixturePath(const MixtureModel& model, std::size_t change_point, std::size_t n_max,
                std::uint64_t seed)
        : model_(model), change_(change_point), n_max_(n_max), rng_(seed) {
        component_g1_ = rng_.bernoulli(model_.beta());
        log_v_ = std::log(model_.odds());
        // c_0 = log(1 + v): xi_0 = 1 by the empty-product convention.
        corr_.push_back(log_add_exp(0.0, log_v_));
        log_xi_ = 0.0;
    }

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    std::size_t length() const override { return n_max_; }

    double step(std::size_t, std::size_t n) override {
        ensure(n);
        return r2_[n - 1] + corr_[n - 1] - corr_[n];
    }

    double observation_scalar(std::size_t n) override {
        ensure(n);
        return xs_[n - 1];
    }

private:
    void ensure(std::size_t n) {
        while (xs_.size() < n) {
            std::size_t i = xs_.size() + 1;
            double x;
            if (i >= change_)
                x = model_.f1().sample(rng_);
            else
                x = component_g1_ ? model_.g1().sample(rng_) : model_.g2().sample(rng_);
            xs_.push_back(x);

            double lf1 = model_.f1().log_pdf(x);
            double lg1 = model_.g1().log_pdf(x);
            double lg2 = model_.g2().log_pdf(x);
            if (lf1 == kNegInf || lg1 == kNegInf || lg2 == kNegInf)
                throw std::domain_error("mixture density vanished at observation index " +
                                        std::to_string(i));
            r2_.push_back(lf1 - lg2);
            log_xi_ += lg1 - lg2;
            corr_.push_back(log_add_exp(0.0, log_v_ + log_xi_));
        }
    }

    const MixtureModel& model_;
    std::size_t change_;
    std::size_t n_max_;
    Rng rng_;
    bool component_g1_;
    double log_v_;
    double log_xi_;
    std::vector<double> xs_;
    std::vector<double> r2_;    // R_2(i) = log f1(X_i) - log g2(X_i)
    std::vector<double> corr_;  // corr_[i] = log(1 + v xi_i), corr_[0] for xi_0
};

}  // namespace

Density Density::gaussian(double mean, double stddev) {
    if (!(stddev > 0.0)) throw ConfigError("Gaussian density requires stddev > 0");
    return Density{Family::Gaussian, mean, stddev};
}

Density Density::exponential(double mean) {
    if (!(mean > 0.0)) throw ConfigError("Exponential density requires mean > 0");
    return Density{Family::Exponential, mean, 0.0};
}

double Density::log_pdf(double x) const {
    if (family == Family::Gaussian) {
        double z = (x - a) / b;
        return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    if (x < 0.0) return kNegInf;
    return -x / a - std::log(a);
}

double Density::sample(Rng& rng) const {
    if (family == Family::Gaussian) return rng.gaussian(a, b);
    return rng.exponential(a);
}

MixtureModel::MixtureModel(double beta, Density g1, Density g2, Density f1)
    : beta_(beta), g1_(g1), g2_(g2), f1_(f1) {
    if (!(beta_ > 0.0) || !(beta_ < 1.0))
        throw ConfigError("mixture model requires beta in (0,1)");
    if (f1_ == g1_ || f1_ == g2_)
        throw ConfigError("mixture model requires f1 distinct from g1 and g2");
    i1_ = kl_by_quadrature(f1_, g1_);
    i2_ = kl_by_quadrature(f1_, g2_);
    if (!std::isfinite(i1_) || !std::isfinite(i2_))
        throw ConfigError("mixture KL numbers are not finite (support mismatch)");
    if (!(i2_ > 0.0)) throw ConfigError("mixture model requires I_2 > 0");
    if (i1_ < i2_) throw ConfigError("mixture model requires I_1 > I_2");
}

double MixtureModel::llr_from_observations(const std::vector<double>& xs, std::size_t k,
                                           std::size_t n) const {
    if (k == 0 || k > n || n > xs.size())
        throw ConfigError("mixture LLR requires 1 <= k <= n <= length");
    double log_v = std::log(odds());
    double sum_r2 = 0.0;
    double log_xi = 0.0;
    double corr_km1 = log_add_exp(0.0, log_v);  // will hold log(1 + v xi_{k-1})
    for (std::size_t i = 1; i <= n; ++i) {
        double lf1 = f1_.log_pdf(xs[i - 1]);
        double lg1 = g1_.log_pdf(xs[i - 1]);
        double lg2 = g2_.log_pdf(xs[i - 1]);
        if (lf1 == kNegInf || lg1 == kNegInf || lg2 == kNegInf)
            throw std::domain_error("mixture density vanished at observation index " +
                                    std::to_string(i));
        if (i >= k) sum_r2 += lf1 - lg2;
        log_xi += lg1 - lg2;
        if (i == k - 1) corr_km1 = log_add_exp(0.0, log_v + log_xi);
    }
    double corr_n = log_add_exp(0.0, log_v + log_xi);
    return sum_r2 + corr_km1 - corr_n;
}

std::unique_ptr<LlrPath> MixtureModel::sample_path(std::size_t change_point,
                                                   std::size_t n_max,
                                                   std::uint64_t seed) const {
    return std::make_unique<MixturePath>(*this, change_point, n_max, seed);
}

}  // namespace seqdet
