#include "kpz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kpz/error.hpp"

namespace kpz::stats {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : values_(std::move(samples)) {
    require(!values_.empty(), ErrorCode::InsufficientSamples, "empirical distribution needs at least one sample");
    for (double v : values_) require(!std::isnan(v), ErrorCode::InvalidParameter, "NaN sample");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const noexcept {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double p) const {
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "quantile level outside [0,1]");
    const double pos = p * static_cast<double>(values_.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values_.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return values_[lo] * (1.0 - w) + values_[hi] * w;
}

double EmpiricalDistribution::mean() const { return stats::mean(values_); }
double EmpiricalDistribution::variance() const { return stats::variance(values_); }

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    require(a.count() > 0 && b.count() > 0, ErrorCode::InsufficientSamples, "KS needs nonempty samples");
    const auto xa = a.sorted();
    const auto xb = b.sorted();
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double v = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == v) ++i;
        while (j < xb.size() && xb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), ErrorCode::InsufficientSamples, "KS needs nonempty samples");
    return ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b));
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_gaussian(const EmpiricalDistribution& a, double mean, double variance) {
    require(variance > 0.0, ErrorCode::InvalidParameter, "variance must be positive");
    require(a.count() > 0, ErrorCode::InsufficientSamples, "KS needs a nonempty sample");
    const double sd = std::sqrt(variance);
    const auto x = a.sorted();
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf((x[i] - mean) / sd);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_gaussian(std::span<const double> a, double mean, double variance) {
    require(!a.empty(), ErrorCode::InsufficientSamples, "KS needs a nonempty sample");
    return ks_gaussian(EmpiricalDistribution(a), mean, variance);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorCode::InvalidParameter, "fit inputs differ in length");
    require(x.size() >= 3, ErrorCode::InsufficientSamples, "fit needs at least 3 pairs");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorCode::FitFailure, "abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.stderr_slope = std::sqrt(ssr / static_cast<double>(x.size() - 2) / sxx);
    return fit;
}

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorCode::InvalidParameter, "fit inputs differ in length");
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::InvalidParameter, "log-log fit needs positive values");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const LinearFit f = linear_fit(lx, ly);
    return {f.slope, f.intercept, f.stderr_slope};
}

double mean(std::span<const double> v) {
    require(!v.empty(), ErrorCode::InsufficientSamples, "mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    require(v.size() >= 2, ErrorCode::InsufficientSamples, "variance needs two samples");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double covariance(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size() && a.size() >= 2, ErrorCode::InsufficientSamples, "covariance needs paired samples");
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

}  // namespace kpz::stats
