#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace seqdet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for -inf operands.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs)
        if (x > m) m = x;
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Compensated accumulator; merge order does not affect results enough to
/// matter, and summing per-trial values in index order keeps campaigns
/// bit-reproducible.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSe mean_and_se(std::span<const double> xs) {
    MeanSe out;
    out.n = xs.size();
    if (out.n == 0) return out;
    KahanSum s;
    for (double x : xs) s.add(x);
    out.mean = s.value() / static_cast<double>(out.n);
    if (out.n < 2) return out;
    KahanSum sq;
    for (double x : xs) {
        double d = x - out.mean;
        sq.add(d * d);
    }
    double var = sq.value() / static_cast<double>(out.n - 1);
    out.se = std::sqrt(var / static_cast<double>(out.n));
    return out;
}

/// SE of a binomial proportion estimate.
inline double binomial_se(double p_hat, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    LinearFit f;
    const std::size_t n = x.size();
    if (n < 2) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

inline double median_inplace(std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.end());
    return 0.5 * (hi + xs[mid - 1]);
}

}  // namespace seqdet
