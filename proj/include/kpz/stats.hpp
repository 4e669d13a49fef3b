#pragma once

#include <span>
#include <vector>

namespace kpz::stats {

class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    explicit EmpiricalDistribution(std::vector<double> samples);
    explicit EmpiricalDistribution(std::span<const double> samples)
        : EmpiricalDistribution(std::vector<double>(samples.begin(), samples.end())) {}

    std::span<const double> sorted() const noexcept { return values_; }
    std::size_t count() const noexcept { return values_.size(); }
    double cdf(double x) const noexcept;
    double quantile(double p) const;
    double mean() const;
    double variance() const;  // unbiased

private:
    std::vector<double> values_;
};

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_gaussian(const EmpiricalDistribution& a, double mean, double variance);
double ks_gaussian(std::span<const double> a, double mean, double variance);

double normal_cdf(double x) noexcept;

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double variance(std::span<const double> v);
double covariance(std::span<const double> a, std::span<const double> b);

}  // namespace kpz::stats
