#include "kpz/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kpz/error.hpp"
#include "kpz/io.hpp"
#include "kpz/stats.hpp"

namespace kpz::landscape {

double DyadicLandscape::slot_scale() const noexcept { return std::pow(2.0, -static_cast<double>(level) / 3.0); }

std::vector<double> uniform_grid(double half_width, double step) {
    require(half_width >= 0.0 && step > 0.0, ErrorCode::InvalidParameter, "grid needs half width >= 0 and step > 0");
    const auto half = static_cast<long long>(std::llround(half_width / step));
    require(std::abs(static_cast<double>(half) * step - half_width) <= 1e-9 * std::max(1.0, half_width),
            ErrorCode::InvalidParameter, "half width must be a multiple of the step");
    std::vector<double> g;
    for (long long i = -half; i <= half; ++i) g.push_back(static_cast<double>(i) * step);
    return g;
}

DyadicLandscape build_dyadic(unsigned k, double x_window, double grid_step, std::size_t n_approx, std::uint64_t seed,
                             const airy::SheetOptions& opts) {
    require(k <= 10, ErrorCode::InvalidParameter, "level above 10 is not supported");
    require(n_approx >= 1, ErrorCode::InvalidParameter, "n_approx must be positive");
    DyadicLandscape l;
    l.level = k;
    l.spatial_grid = uniform_grid(x_window, grid_step);
    l.n_approx = n_approx;
    const std::size_t slots = std::size_t{1} << k;
    const double s = l.slot_scale();
    std::vector<double> unit_grid = l.spatial_grid;
    for (double& x : unit_grid) x /= s * s;
    for (std::size_t i = 0; i < slots; ++i) l.seeds.push_back(derive_seed(seed, i));
    l.sheets = map_replicas<airy::AirySheetSample>(slots, [&](std::size_t i) {
        auto sheet = airy::sheet_rescale(airy::airy_sheet_sample(n_approx, unit_grid, unit_grid, l.seeds[i], opts), s);
        sheet.x_grid = l.spatial_grid;
        sheet.y_grid = l.spatial_grid;
        return sheet;
    });
    return l;
}

namespace {

std::size_t dyadic_index(const DyadicLandscape& l, double t) {
    const double scaled = t * static_cast<double>(l.slots());
    const double r = std::round(scaled);
    if (std::abs(scaled - r) > 1e-9 || r < 0.0 || r > static_cast<double>(l.slots()))
        fail(ErrorCode::NonDyadicTime, "time " + io::format_double(t) + " is not on the level-" +
                                           std::to_string(l.level) + " dyadic grid of [0,1]");
    return static_cast<std::size_t>(r);
}

std::size_t grid_index(std::span<const double> g, double x) {
    const auto it = std::lower_bound(g.begin(), g.end(), x - 1e-9 * std::max(1.0, std::abs(x)));
    if (it == g.end() || std::abs(*it - x) > 1e-9 * std::max(1.0, std::abs(x)))
        fail(ErrorCode::OutOfWindow, "point " + io::format_double(x) + " is not on the spatial grid");
    return static_cast<std::size_t>(it - g.begin());
}

}  // namespace

airy::AirySheetSample landscape_sheet(const DyadicLandscape& l, double s, double t) {
    const std::size_t i0 = dyadic_index(l, s);
    const std::size_t i1 = dyadic_index(l, t);
    require(i0 < i1, ErrorCode::InvalidQuery, "landscape needs s < t");
    airy::AirySheetSample acc = l.sheets[i0];
    for (std::size_t i = i0 + 1; i < i1; ++i) acc = airy::sheet_compose(acc, l.sheets[i]);
    return acc;
}

double landscape_eval(const DyadicLandscape& l, double x, double s, double y, double t) {
    const std::size_t i0 = dyadic_index(l, s);
    const std::size_t i1 = dyadic_index(l, t);
    require(i0 < i1, ErrorCode::InvalidQuery, "landscape needs s < t");
    const std::size_t xi = grid_index(l.spatial_grid, x);
    const std::size_t yi = grid_index(l.spatial_grid, y);
    const std::size_t m = l.spatial_grid.size();
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = l.sheets[i0](xi, j);
    std::vector<double> next(m);
    for (std::size_t slot = i0 + 1; slot < i1; ++slot) {
        std::fill(next.begin(), next.end(), lpp::kNegInf);
        for (std::size_t z = 0; z < m; ++z) {
            if (row[z] == lpp::kNegInf) continue;
            for (std::size_t j = 0; j < m; ++j) next[j] = std::max(next[j], row[z] + l.sheets[slot](z, j));
        }
        row.swap(next);
    }
    return row[yi];
}

FinitaryInitial::FinitaryInitial(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    require(!knots_.empty(), ErrorCode::InvalidParameter, "initial data cannot be identically minus infinity");
    require(knots_.size() == values_.size(), ErrorCode::InvalidParameter, "knots and values differ in length");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        require(std::isfinite(knots_[i]) && std::isfinite(values_[i]), ErrorCode::InvalidParameter,
                "initial data must be finite on its support");
        require(i == 0 || knots_[i] > knots_[i - 1], ErrorCode::InvalidParameter, "knots must increase");
    }
}

FinitaryInitial FinitaryInitial::narrow_wedge(double u, double value) { return FinitaryInitial({u}, {value}); }

FinitaryInitial FinitaryInitial::flat(double left, double right, double value) {
    require(left < right, ErrorCode::InvalidParameter, "flat support needs left < right");
    return FinitaryInitial({left, right}, {value, value});
}

std::optional<double> FinitaryInitial::operator()(double x) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (x < knots_.front() - tol || x > knots_.back() + tol) return std::nullopt;
    if (knots_.size() == 1) return values_.front();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    if (it == knots_.begin()) return values_.front();
    if (it == knots_.end()) return values_.back();
    const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
    const double w = (x - knots_[hi - 1]) / (knots_[hi] - knots_[hi - 1]);
    return values_[hi - 1] * (1.0 - w) + values_[hi] * w;
}

double FinitaryInitial::upper_bound() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

FinitaryReport finitary_check(const FinitaryInitial& h0, double t) {
    require(t > 0.0, ErrorCode::InvalidParameter, "t must be positive");
    FinitaryReport r;
    r.finitary = std::isfinite(h0.upper_bound());
    r.reason = r.finitary ? "compactly defined and bounded above" : "not bounded above";
    return r;
}

FinitaryReport finitary_check(const std::function<double(double)>& f, double t) {
    require(t > 0.0, ErrorCode::InvalidParameter, "t must be positive");
    FinitaryReport r;
    r.finitary = true;
    for (double sign : {1.0, -1.0}) {
        std::vector<double> side;
        for (int k = 1; k <= 30; ++k) {
            const double x = sign * std::ldexp(1.0, k);
            const double ratio = (f(x) - x * x / t) / std::abs(x);
            r.probe_x.push_back(x);
            r.ratios.push_back(ratio);
            side.push_back(ratio);
        }
        for (std::size_t i = 1; i < side.size(); ++i)
            if (!(side[i] < side[i - 1])) {
                r.finitary = false;
                r.reason = "ratio is not strictly decreasing along the probe sequence";
            }
        if (r.finitary && !(side.back() <= side.front() - 10.0)) {
            r.finitary = false;
            r.reason = "ratio does not diverge to minus infinity";
        }
    }
    if (r.finitary) r.reason = "ratio decreases without bound";
    return r;
}

double theta(double t) {
    require(t > 0.0, ErrorCode::InvalidParameter, "theta needs t > 0");
    const double lp = std::max(std::log(1.0 / t), 0.0);
    return std::max(std::cbrt(t), std::pow(lp, 4.0 / 3.0));
}

double growth_weight(double x, double y, double t) {
    return (1.0 + std::pow(std::abs(x), 0.2) + std::pow(std::abs(y), 0.2) + std::pow(std::abs(t), 0.2)) * theta(t);
}

GrowthBoundReport growth_bound_check(const airy::AirySheetSample& sheet, double t) {
    require(t > 0.0, ErrorCode::InvalidParameter, "t must be positive");
    GrowthBoundReport r;
    double reach = 0.0;
    for (double x : sheet.x_grid) reach = std::max(reach, std::abs(x));
    for (double y : sheet.y_grid) reach = std::max(reach, std::abs(y));
    const double inner = reach / 2.0 + 1e-12;
    for (std::size_t i = 0; i < sheet.x_grid.size(); ++i)
        for (std::size_t j = 0; j < sheet.y_grid.size(); ++j) {
            const double v = sheet(i, j);
            if (!std::isfinite(v)) continue;
            const double x = sheet.x_grid[i], y = sheet.y_grid[j];
            const double c = std::abs(v + (x - y) * (x - y) / t) / growth_weight(x, y, t);
            ++r.pairs;
            if (c > r.constant) {
                r.constant = c;
                r.worst_x = x;
                r.worst_y = y;
            }
            if (std::abs(x) <= inner && std::abs(y) <= inner) r.inner_constant = std::max(r.inner_constant, c);
        }
    require(r.pairs > 0, ErrorCode::InsufficientSamples, "sheet has no finite entries");
    r.stable = r.constant <= 2.0 * r.inner_constant;
    return r;
}

FixedPointProfile kpz_fixed_point(const airy::AirySheetSample& sheet, const FinitaryInitial& h0, double t,
                                  std::span<const double> y_grid) {
    require(t > 0.0, ErrorCode::InvalidParameter, "t must be positive");
    const double s3 = sheet.scale * sheet.scale * sheet.scale;
    require(std::abs(s3 - t) <= 1e-9 * std::max(1.0, t), ErrorCode::InvalidParameter,
            "sheet scale does not match t (need scale^3 == t)");
    std::vector<std::size_t> cols;
    if (y_grid.empty()) {
        for (std::size_t j = 0; j < sheet.y_grid.size(); ++j) cols.push_back(j);
    } else {
        for (double y : y_grid) cols.push_back(grid_index(sheet.y_grid, y));
    }
    std::vector<std::size_t> rows;
    std::vector<double> init;
    for (std::size_t i = 0; i < sheet.x_grid.size(); ++i)
        if (const auto v = h0(sheet.x_grid[i])) {
            rows.push_back(i);
            init.push_back(*v);
        }
    require(!rows.empty(), ErrorCode::WindowTooSmall, "initial data support contains no sheet grid point");
    const double tol = 1e-9;
    const bool open_left = h0.left() < sheet.x_grid.front() - tol;
    const bool open_right = h0.right() > sheet.x_grid.back() + tol;
    const bool compact_inside = !open_left && !open_right;

    FixedPointProfile p;
    p.t = t;
    double c2 = 0.0;
    if (!compact_inside) c2 = 2.0 * growth_bound_check(sheet, t).constant;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t col : cols) {
        const double y = sheet.y_grid[col];
        double best = lpp::kNegInf, arg = 0.0;
        double floor_value = lpp::kNegInf;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double v = sheet(rows[r], col);
            if (v == lpp::kNegInf) continue;
            const double x = sheet.x_grid[rows[r]];
            if (init[r] + v >= best) {
                best = init[r] + v;
                arg = x;
            }
            const double slack = c2 * growth_weight(x, y, t);
            floor_value = std::max(floor_value, init[r] - (x - y) * (x - y) / t - slack);
        }
        if (best == lpp::kNegInf)
            fail(ErrorCode::WindowTooSmall, "no finite passage value for y = " + io::format_double(y));
        double cand_lo = arg, cand_hi = arg;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (sheet(rows[r], col) == lpp::kNegInf) continue;
            const double x = sheet.x_grid[rows[r]];
            const double slack = c2 * growth_weight(x, y, t);
            if (init[r] - (x - y) * (x - y) / t + slack >= floor_value) {
                cand_lo = std::min(cand_lo, x);
                cand_hi = std::max(cand_hi, x);
            }
        }
        if ((open_left && cand_lo <= sheet.x_grid.front() + tol) || (open_right && cand_hi >= sheet.x_grid.back() - tol))
            fail(ErrorCode::WindowTooSmall, "maximizer window for y = " + io::format_double(y) +
                                                " reaches the edge of the sheet grid");
        lo = std::min(lo, cand_lo);
        hi = std::max(hi, cand_hi);
        p.y_grid.push_back(y);
        p.values.push_back(best);
        p.argmax.push_back(arg);
    }
    p.containment_left = lo;
    p.containment_right = hi;
    return p;
}

FixedPointProfile kpz_fixed_point(const DyadicLandscape& l, const FinitaryInitial& h0, double t,
                                  std::span<const double> y_grid) {
    return kpz_fixed_point(landscape_sheet(l, 0.0, t), h0, t, y_grid);
}

namespace {

double interpolate(std::span<const double> grid, std::span<const double> values, double x) {
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (x < grid.front() - tol || x > grid.back() + tol)
        fail(ErrorCode::OutOfWindow, "point " + io::format_double(x) + " outside the profile grid");
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return values.front();
    if (it == grid.end()) return values.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const double w = (x - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
    if (w <= tol) return values[hi - 1];
    return values[hi - 1] * (1.0 - w) + values[hi] * w;
}

double min_spacing(std::span<const double> g) {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < g.size(); ++i) h = std::min(h, g[i] - g[i - 1]);
    return h;
}

std::pair<std::size_t, std::size_t> interval_indices(std::span<const double> grid, double a, double b) {
    require(a < b, ErrorCode::InvalidParameter, "interval needs a < b");
    const double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    require(a >= grid.front() - tol && b <= grid.back() + tol, ErrorCode::OutOfWindow, "interval outside the grid");
    const auto first = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), a - tol) - grid.begin());
    const auto last = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), b + tol) - grid.begin()) - 1;
    return {first, last};
}

}  // namespace

WeakBrownianReport weak_local_brownian_stat(std::span<const FixedPointProfile> profiles, std::span<const double> eps_list,
                                            double base_point, std::span<const double> t_grid) {
    require(!profiles.empty() && !eps_list.empty(), ErrorCode::InsufficientSamples, "need profiles and eps values");
    WeakBrownianReport r;
    r.eps.assign(eps_list.begin(), eps_list.end());
    if (t_grid.empty())
        r.t_grid = {0.25, 0.5, 0.75, 1.0};
    else
        r.t_grid.assign(t_grid.begin(), t_grid.end());
    const double t_max = *std::max_element(r.t_grid.begin(), r.t_grid.end());
    const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
    require(eps_min > 0.0, ErrorCode::InvalidParameter, "eps must be positive");
    const double h = min_spacing(profiles.front().y_grid);
    if (eps_min * eps_min * t_max < 20.0 * h * (1.0 - 1e-9))
        fail(ErrorCode::GridResolution, "smallest eps spans fewer than 20 grid steps");
    for (double eps : eps_list) {
        std::vector<double> ones;
        std::vector<double> means, vars;
        for (double tt : r.t_grid) {
            std::vector<double> v;
            v.reserve(profiles.size());
            for (const auto& p : profiles) {
                const double f0 = interpolate(p.y_grid, p.values, base_point);
                v.push_back((interpolate(p.y_grid, p.values, base_point + eps * eps * tt) - f0) / eps);
            }
            means.push_back(stats::mean(v));
            vars.push_back(v.size() > 1 ? stats::variance(v) : 0.0);
            if (tt == 1.0) ones = v;
        }
        if (ones.empty()) {
            for (const auto& p : profiles) {
                const double f0 = interpolate(p.y_grid, p.values, base_point);
                ones.push_back((interpolate(p.y_grid, p.values, base_point + eps * eps) - f0) / eps);
            }
        }
        r.ks.push_back(stats::ks_gaussian(ones, 0.0, 2.0));
        r.mean.push_back(std::move(means));
        r.variance.push_back(std::move(vars));
    }
    return r;
}

HolderEstimate holder_norm_estimate(std::span<const double> grid, std::span<const double> values, double beta, double a,
                                    double b, std::span<const std::size_t> lags) {
    require(beta > 0.0 && beta < 0.5 + 1e-12, ErrorCode::InvalidParameter, "beta must lie in (0, 1/2)");
    require(grid.size() == values.size(), ErrorCode::InvalidParameter, "grid and values differ in length");
    const auto [first, last] = interval_indices(grid, a, b);
    require(last > first, ErrorCode::GridResolution, "interval holds fewer than two grid points");
    HolderEstimate est;
    for (std::size_t i = first; i <= last; ++i)
        for (std::size_t j = i + 1; j <= last; ++j)
            est.norm = std::max(est.norm, std::abs(values[j] - values[i]) / std::pow(grid[j] - grid[i], beta));
    if (lags.empty()) {
        for (std::size_t k = 2; k <= 20; k += 2) est.lags.push_back(k);
    } else {
        est.lags.assign(lags.begin(), lags.end());
    }
    std::vector<double> lag_len;
    for (std::size_t k : est.lags) {
        require(k >= 1 && first + k <= last, ErrorCode::GridResolution, "lag longer than the interval");
        double s = 0.0, span = 0.0;
        std::size_t count = 0;
        for (std::size_t i = first; i + k <= last; ++i) {
            s += std::abs(values[i + k] - values[i]);
            span += grid[i + k] - grid[i];
            ++count;
        }
        est.mean_abs_increment.push_back(s / static_cast<double>(count));
        lag_len.push_back(span / static_cast<double>(count));
    }
    const auto fit = stats::loglog_fit(lag_len, est.mean_abs_increment);
    est.lag_exponent = fit.slope;
    est.exponent_stderr = fit.stderr_slope;
    return est;
}

HolderEstimate holder_norm_estimate(const FixedPointProfile& p, double beta, double a, double b) {
    return holder_norm_estimate(p.y_grid, p.values, beta, a, b);
}

double quadratic_variation(std::span<const double> grid, std::span<const double> values, double a, double b) {
    require(grid.size() == values.size(), ErrorCode::InvalidParameter, "grid and values differ in length");
    const auto [first, last] = interval_indices(grid, a, b);
    require(last >= first + 100, ErrorCode::GridResolution, "quadratic variation needs at least 100 grid steps");
    double q = 0.0;
    for (std::size_t i = first + 1; i <= last; ++i) q += (values[i] - values[i - 1]) * (values[i] - values[i - 1]);
    return q;
}

double quadratic_variation(const FixedPointProfile& p, double a, double b) {
    return quadratic_variation(p.y_grid, p.values, a, b);
}

void write_profile_csv(const FixedPointProfile& p, const std::string& path) {
    std::ostringstream out;
    out << "y,h,argmax_x\n";
    for (std::size_t j = 0; j < p.y_grid.size(); ++j)
        out << io::format_double(p.y_grid[j]) << ',' << io::format_double(p.values[j]) << ','
            << io::format_double(p.argmax[j]) << '\n';
    io::write_text(path, out.str());
}

void write_landscape_manifest(const DyadicLandscape& l, const std::string& path) {
    io::Json doc;
    doc["level"] = l.level;
    doc["slots"] = l.slots();
    doc["slot_scale"] = l.slot_scale();
    doc["n_approx"] = l.n_approx;
    doc["grid"] = {{"left", l.spatial_grid.front()}, {"right", l.spatial_grid.back()}, {"points", l.spatial_grid.size()}};
    io::Json scales = io::Json::array(), seeds = io::Json::array();
    for (std::size_t i = 0; i < l.slots(); ++i) {
        scales.push_back(l.sheets[i].scale);
        seeds.push_back(l.seeds[i]);
    }
    doc["scales"] = scales;
    doc["seeds"] = seeds;
    io::write_json(path, doc);
}

}  // namespace kpz::landscape
