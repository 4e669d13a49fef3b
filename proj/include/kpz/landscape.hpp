#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpz/airy.hpp"

namespace kpz::landscape {

struct DyadicLandscape {
    unsigned level = 0;
    std::vector<double> spatial_grid;
    std::vector<airy::AirySheetSample> sheets;  // slot i covers [i 2^-k, (i+1) 2^-k]
    std::vector<std::uint64_t> seeds;
    std::size_t n_approx = 0;

    std::size_t slots() const noexcept { return sheets.size(); }
    double slot_scale() const noexcept;
};

std::vector<double> uniform_grid(double half_width, double step);

DyadicLandscape build_dyadic(unsigned k, double x_window, double grid_step, std::size_t n_approx, std::uint64_t seed,
                             const airy::SheetOptions& opts = {});

// L(x, s; y, t) for dyadic s < t; spatial points must lie on the landscape grid.
double landscape_eval(const DyadicLandscape& l, double x, double s, double y, double t);
// The composed sheet over [s, t]; its scale is (t - s)^{1/3}.
airy::AirySheetSample landscape_sheet(const DyadicLandscape& l, double s, double t);

// Piecewise-linear data on [knots.front(), knots.back()], minus infinity elsewhere.
class FinitaryInitial {
public:
    FinitaryInitial(std::vector<double> knots, std::vector<double> values);
    static FinitaryInitial narrow_wedge(double u, double value = 0.0);
    static FinitaryInitial flat(double left, double right, double value = 0.0);

    std::optional<double> operator()(double x) const;
    double left() const noexcept { return knots_.front(); }
    double right() const noexcept { return knots_.back(); }
    double upper_bound() const noexcept;
    std::span<const double> knots() const noexcept { return knots_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

struct FinitaryReport {
    bool finitary = false;
    std::string reason;
    std::vector<double> probe_x;
    std::vector<double> ratios;  // (f(x) - x^2/t)/|x| at probe_x
};

FinitaryReport finitary_check(const FinitaryInitial& h0, double t);
FinitaryReport finitary_check(const std::function<double(double)>& f, double t);

struct FixedPointProfile {
    double t = 0.0;
    std::vector<double> y_grid;
    std::vector<double> values;
    std::vector<double> argmax;
    double containment_left = 0.0;
    double containment_right = 0.0;
};

// Requires sheet.scale^3 == t. y_grid must be drawn from the sheet's y grid (empty means all of it).
FixedPointProfile kpz_fixed_point(const airy::AirySheetSample& sheet, const FinitaryInitial& h0, double t,
                                  std::span<const double> y_grid = {});
FixedPointProfile kpz_fixed_point(const DyadicLandscape& l, const FinitaryInitial& h0, double t,
                                  std::span<const double> y_grid = {});

// t^{1/3} v log_+^{4/3}(1/t)
double theta(double t);
double growth_weight(double x, double y, double t);

struct GrowthBoundReport {
    double constant = 0.0;        // smallest C on the full grid
    double inner_constant = 0.0;  // same on the half-width window
    bool stable = false;          // constant <= 2 inner_constant
    double worst_x = 0.0;
    double worst_y = 0.0;
    std::size_t pairs = 0;
};

GrowthBoundReport growth_bound_check(const airy::AirySheetSample& sheet, double t);

struct WeakBrownianReport {
    std::vector<double> eps;
    std::vector<double> ks;  // KS of F_eps(1) against N(0, 2)
    std::vector<double> t_grid;
    std::vector<std::vector<double>> mean;      // mean[e][k] of F_eps(t_grid[k])
    std::vector<std::vector<double>> variance;  // variance[e][k]
};

WeakBrownianReport weak_local_brownian_stat(std::span<const FixedPointProfile> profiles, std::span<const double> eps_list,
                                            double base_point, std::span<const double> t_grid = {});

struct HolderEstimate {
    double norm = 0.0;
    double lag_exponent = 0.0;
    double exponent_stderr = 0.0;
    std::vector<std::size_t> lags;
    std::vector<double> mean_abs_increment;
};

// lags in grid steps; empty means 2..20
HolderEstimate holder_norm_estimate(std::span<const double> grid, std::span<const double> values, double beta, double a,
                                    double b, std::span<const std::size_t> lags = {});
HolderEstimate holder_norm_estimate(const FixedPointProfile& p, double beta, double a, double b);

double quadratic_variation(std::span<const double> grid, std::span<const double> values, double a, double b);
double quadratic_variation(const FixedPointProfile& p, double a, double b);

void write_profile_csv(const FixedPointProfile& p, const std::string& path);
void write_landscape_manifest(const DyadicLandscape& l, const std::string& path);

}  // namespace kpz::landscape
