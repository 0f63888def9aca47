#include "seqdet/prior.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seqdet/errors.hpp"
#include "seqdet/numerics.hpp"

namespace seqdet {

Prior Prior::geometric(double rho) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw ConfigError("geometric prior requires rho in (0,1)");
    Prior p;
    p.kind_ = Kind::Geometric;
    p.rho_ = rho;
    return p;
}

Prior Prior::tabulated(std::vector<double> weights, std::size_t first_index) {
    if (first_index > 1) throw ConfigError("tabulated prior must start at index 0 or 1");
    if (first_index == 0) {
        if (!weights.empty() && weights.front() > 0.0)
            throw ConfigError("prior mass at lambda=0 is not supported (pi_0 must be 0)");
        if (!weights.empty()) weights.erase(weights.begin());
    }
    if (weights.empty()) throw ConfigError("tabulated prior needs at least one weight");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ConfigError("tabulated prior weights must be finite and nonnegative");
        sum += w;
    }
    if (!(sum > 0.0)) throw ConfigError("tabulated prior has zero total mass");
    if (std::abs(sum - 1.0) > 1e-6)
        std::cerr << "seqdet: tabulated prior renormalized (raw sum " << sum << ")\n";

    Prior p;
    p.kind_ = Kind::Tabulated;
    p.support_cap_ = weights.size();
    p.weights_.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) p.weights_[i] = weights[i] / sum;

    // Backward cumulative sums so that Pi_n - Pi_{n+1} == pi_n per element.
    p.tails_.assign(weights.size() + 1, 0.0);
    for (std::size_t n = weights.size(); n >= 1; --n)
        p.tails_[n - 1] = p.weights_[n - 1] + p.tails_[n];
    return p;
}

Prior Prior::tabulated_from_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open prior CSV: " + file.string());
    std::vector<double> weights;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double w;
        if (!(row >> w)) throw ConfigError("bad prior CSV row: '" + line + "'");
        weights.push_back(w);
    }
    return tabulated(std::move(weights));
}

double Prior::pi(std::size_t k) const {
    if (k == 0) throw ConfigError("pi(0) is undefined: prior has no mass at 0");
    if (kind_ == Kind::Geometric)
        return rho_ * std::pow(1.0 - rho_, static_cast<double>(k - 1));
    return k <= weights_.size() ? weights_[k - 1] : 0.0;
}

double Prior::log_pi(std::size_t k) const {
    if (k == 0) throw ConfigError("pi(0) is undefined: prior has no mass at 0");
    if (kind_ == Kind::Geometric)
        return std::log(rho_) + static_cast<double>(k - 1) * std::log1p(-rho_);
    if (k > weights_.size() || weights_[k - 1] == 0.0) return kNegInf;
    return std::log(weights_[k - 1]);
}

double Prior::tail(std::size_t n) const {
    if (n == 0) throw ConfigError("tail(0) is undefined: indices start at 1");
    if (kind_ == Kind::Geometric)
        return std::pow(1.0 - rho_, static_cast<double>(n - 1));
    return n <= tails_.size() ? tails_[n - 1] : 0.0;
}

double Prior::log_tail(std::size_t n) const {
    if (n == 0) throw ConfigError("tail(0) is undefined: indices start at 1");
    if (kind_ == Kind::Geometric)
        return static_cast<double>(n - 1) * std::log1p(-rho_);
    if (n > tails_.size() || tails_[n - 1] == 0.0) return kNegInf;
    return std::log(tails_[n - 1]);
}

double Prior::entropy_constant() const {
    if (kind_ == Kind::Geometric)
        return std::log((1.0 - rho_) / rho_) - std::log1p(-rho_) / rho_;
    double c = 0.0;
    for (double w : weights_)
        if (w > 0.0) c += w * std::abs(std::log(w));
    return c;
}

std::size_t Prior::sample(Rng& rng) const {
    if (kind_ == Kind::Geometric) {
        double u = rng.uniform();
        return 1 + static_cast<std::size_t>(std::floor(std::log(u) / std::log1p(-rho_)));
    }
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 1; k <= weights_.size(); ++k) {
        acc += weights_[k - 1];
        if (u <= acc) return k;
    }
    return weights_.size();
}

}  // namespace seqdet
