#include "kpz/airy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kpz/error.hpp"
#include "kpz/io.hpp"
#include "kpz/stats.hpp"

namespace kpz::airy {

std::vector<double> AiryLineSample::line(std::size_t i) const {
    require(i >= 1 && i <= line_count, ErrorCode::InvalidParameter, "line index out of range");
    const auto first = values.begin() + static_cast<std::ptrdiff_t>((i - 1) * y_grid.size());
    return {first, first + static_cast<std::ptrdiff_t>(y_grid.size())};
}

bool AiryLineSample::strictly_ordered() const {
    for (std::size_t i = 1; i < line_count; ++i)
        for (std::size_t j = 0; j < y_grid.size(); ++j)
            if (!((*this)(i, j) > (*this)(i + 1, j))) return false;
    return true;
}

double melon_time(std::size_t n, double y) { return 1.0 + 2.0 * y / std::cbrt(static_cast<double>(n)); }

namespace {

void check_y_grid(std::span<const double> y) {
    require(!y.empty(), ErrorCode::InvalidParameter, "y grid is empty");
    for (std::size_t j = 0; j < y.size(); ++j) {
        require(std::isfinite(y[j]), ErrorCode::InvalidParameter, "y grid must be finite");
        require(j == 0 || y[j] > y[j - 1], ErrorCode::InvalidParameter, "y grid must be strictly increasing");
    }
}

double rescale_value(std::size_t n, double y, double melon_value) {
    const double nn = static_cast<double>(n);
    const double n16 = std::pow(nn, 1.0 / 6.0);
    return n16 * (melon_value - 2.0 * std::sqrt(nn) - 2.0 * y * n16);
}

// Hermitian matrix with independent entries: real diagonal N(0, v), complex off-diagonal with E|h|^2 = v.
Eigen::MatrixXcd hermitian_increment(std::size_t n, double v, RngStream& rng) {
    Eigen::MatrixXcd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double sd_diag = std::sqrt(v);
    const double sd_off = std::sqrt(v / 2.0);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        h(i, i) = sd_diag * rng.normal();
        for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
            const std::complex<double> z(sd_off * rng.normal(), sd_off * rng.normal());
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    }
    return h;
}

}  // namespace

std::vector<double> gue_eigenvalues_tridiagonal(std::size_t n, double t, RngStream& rng) {
    require(n >= 1 && t > 0.0, ErrorCode::InvalidParameter, "need n >= 1 and t > 0");
    // beta = 2 Hermite ensemble: diagonal N(0,1), off-diagonal chi_{2k} / sqrt(2) = sqrt(Gamma(k))
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (std::size_t i = 0; i < n; ++i) diag(static_cast<Eigen::Index>(i)) = rng.normal();
    for (std::size_t i = 0; i + 1 < n; ++i) sub(static_cast<Eigen::Index>(i)) = std::sqrt(rng.gamma(static_cast<double>(n - 1 - i)));
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = diag(0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < n; ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - i));
    }
    const double s = std::sqrt(t);
    for (double& v : out) v *= s;
    return out;
}

AiryLineSample rescaled_melon(std::size_t n, std::span<const double> y_grid, std::uint64_t seed,
                              const MelonOptions& opts) {
    require(n >= 1, ErrorCode::InvalidParameter, "melon size must be at least 1");
    check_y_grid(y_grid);
    const std::size_t keep = opts.lines == 0 ? n : opts.lines;
    require(keep <= n, ErrorCode::InvalidParameter, "cannot keep more lines than the melon has");
    for (double y : y_grid)
        require(melon_time(n, y) > 0.0, ErrorCode::DomainShortfall,
                "y = " + io::format_double(y) + " maps to a nonpositive melon time");

    if (opts.method == MelonMethod::PitmanNetwork) {
        const double t_max = melon_time(n, y_grid.back());
        lpp::BrownianSpec spec;
        spec.lines = n;
        spec.step = opts.grid_step;
        spec.length = std::ceil(t_max / opts.grid_step) * opts.grid_step;
        const auto w = pitman::melon(lpp::brownian_ensemble(spec, seed, Execution::Serial));
        return rescale_melon(w, y_grid, keep);
    }

    AiryLineSample out{n, {y_grid.begin(), y_grid.end()}, keep, std::vector<double>(keep * y_grid.size())};
    RngStream rng(seed);
    const std::size_t m = y_grid.size();
    if (m == 1) {
        const auto ev = gue_eigenvalues_tridiagonal(n, melon_time(n, y_grid[0]), rng);
        for (std::size_t i = 0; i < keep; ++i) out.values[i] = rescale_value(n, y_grid[0], ev[i]);
        return out;
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double t_prev = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = melon_time(n, y_grid[j]);
        h += hermitian_increment(n, t - t_prev, rng);
        t_prev = t;
        es.compute(h, Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < keep; ++i)
            out.at(i + 1, j) = rescale_value(n, y_grid[j], es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - i)));
    }
    return out;
}

AiryLineSample rescale_melon(const pitman::MelonEnsemble& w, std::span<const double> y_grid, std::size_t lines) {
    check_y_grid(y_grid);
    const std::size_t n = w.line_count();
    const std::size_t keep = lines == 0 ? n : lines;
    require(keep <= n, ErrorCode::InvalidParameter, "cannot keep more lines than the melon has");
    AiryLineSample out{n, {y_grid.begin(), y_grid.end()}, keep, std::vector<double>(keep * y_grid.size())};
    for (std::size_t j = 0; j < y_grid.size(); ++j) {
        const std::size_t t = w.lines().grid().nearest(melon_time(n, y_grid[j]));
        // centred at the grid time actually read, not at the requested one
        const double y_read = (w.lines().grid().at(t) - 1.0) * std::cbrt(static_cast<double>(n)) / 2.0;
        for (std::size_t i = 1; i <= keep; ++i) out.at(i, j) = rescale_value(n, y_read, w.lines()(i, t));
    }
    return out;
}

double light_cone(std::size_t n) { return std::cbrt(static_cast<double>(n)) / 2.0; }

namespace {

void check_sheet_grids(std::span<const double> xs, std::span<const double> ys) {
    check_y_grid(xs);
    check_y_grid(ys);
}

}  // namespace

AirySheetSample airy_sheet_from_ensemble(const lpp::CurveEnsemble& f, std::size_t n, std::span<const double> x_grid,
                                         std::span<const double> y_grid, const SheetOptions& opts) {
    check_sheet_grids(x_grid, y_grid);
    require(n >= 1 && n <= f.line_count(), ErrorCode::InvalidParameter, "sheet size must not exceed the line count");
    const lpp::CurveEnsemble base = n == f.line_count() ? f : f.top(n);
    const double c = std::cbrt(static_cast<double>(n));
    const std::size_t stride = opts.refinement ? 4 : 1;
    const auto& g = base.grid();
    const auto snap = [&](double t) -> std::size_t {
        const double pos = (t - g.origin) / (g.step * static_cast<double>(stride));
        const double r = std::round(pos);
        const double last = static_cast<double>((g.points - 1) / stride);
        if (r < 0.0 || r > last || std::abs(pos - r) > 0.5 + 1e-9)
            fail(ErrorCode::DomainShortfall, "sheet endpoint time " + io::format_double(t) + " outside the ensemble grid");
        return static_cast<std::size_t>(r);
    };
    std::vector<std::size_t> starts, targets;
    for (double x : x_grid) starts.push_back(snap(2.0 * x / c));
    for (double y : y_grid) targets.push_back(snap(1.0 + 2.0 * y / c));

    std::vector<double> coarse;
    if (opts.refinement) {
        const lpp::IncrementTable inc(base.subsample(stride));
        coarse = lpp::bottom_to_top_table(inc, starts, targets, opts.execution);
    }
    std::vector<std::size_t> fine_starts = starts, fine_targets = targets;
    for (auto& s : fine_starts) s *= stride;
    for (auto& t : fine_targets) t *= stride;
    const lpp::IncrementTable inc(base);
    const std::vector<double> fine = lpp::bottom_to_top_table(inc, fine_starts, fine_targets, opts.execution);

    AirySheetSample out;
    out.scale = 1.0;
    out.x_grid.assign(x_grid.begin(), x_grid.end());
    out.y_grid.assign(y_grid.begin(), y_grid.end());
    out.source_n = n;
    out.values.resize(fine.size());
    const double nn = static_cast<double>(n);
    const double n16 = std::pow(nn, 1.0 / 6.0);
    // Endpoints sit on the snapped grid times; centring at the requested x, y instead would
    // add a position-dependent shift of up to half a coarse step times the passage slope.
    const auto snapped = [&](std::size_t idx) { return g.at(idx * stride) * c / 2.0; };
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        for (std::size_t j = 0; j < y_grid.size(); ++j) {
            const std::size_t k = i * y_grid.size() + j;
            double l = fine[k];
            if (opts.refinement && std::isfinite(l)) l = 2.0 * fine[k] - coarse[k];
            const double span = snapped(targets[j]) - c / 2.0 - snapped(starts[i]);
            out.values[k] = std::isfinite(l) ? n16 * (l - 2.0 * std::sqrt(nn) - 2.0 * span * n16) : lpp::kNegInf;
        }
    }
    return out;
}

AirySheetSample airy_sheet_sample(std::size_t n, std::span<const double> x_grid, std::span<const double> y_grid,
                                  std::uint64_t seed, const SheetOptions& opts) {
    check_sheet_grids(x_grid, y_grid);
    require(n >= 1, ErrorCode::InvalidParameter, "sheet size must be at least 1");
    require(opts.grid_step > 0.0, ErrorCode::InvalidParameter, "grid step must be positive");
    const double c = std::cbrt(static_cast<double>(n));
    const double coarse_step = opts.grid_step * (opts.refinement ? 4.0 : 1.0);
    const double t0 = std::floor(2.0 * x_grid.front() / c / coarse_step) * coarse_step;
    const double t1 = std::ceil((1.0 + 2.0 * y_grid.back() / c) / coarse_step) * coarse_step;
    require(t1 > t0, ErrorCode::DomainShortfall, "sheet grids admit no passage");
    lpp::BrownianSpec spec;
    spec.lines = n;
    spec.step = opts.grid_step;
    spec.origin = t0;
    spec.length = t1 - t0;
    const auto f = lpp::brownian_ensemble(spec, seed, opts.execution);
    AirySheetSample s = airy_sheet_from_ensemble(f, n, x_grid, y_grid, opts);
    s.seed = seed;
    return s;
}

AirySheetSample sheet_rescale(const AirySheetSample& sheet, double s) {
    require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidParameter, "scale factor must be positive");
    AirySheetSample out = sheet;
    out.scale = sheet.scale * s;
    for (double& x : out.x_grid) x *= s * s;
    for (double& y : out.y_grid) y *= s * s;
    for (double& v : out.values) v *= s;
    return out;
}

namespace {

// Bracketing index and weight for v in a sorted grid; the weight is 0 at grid points.
std::pair<std::size_t, double> bracket(std::span<const double> g, double v) {
    const double tol = 1e-12 * std::max(1.0, std::abs(v));
    if (v < g.front() - tol || v > g.back() + tol)
        fail(ErrorCode::OutOfWindow, "point " + io::format_double(v) + " outside the sheet grid hull");
    if (g.size() == 1) return {0, 0.0};
    auto it = std::upper_bound(g.begin(), g.end(), v);
    std::size_t hi = static_cast<std::size_t>(it - g.begin());
    if (hi == 0) return {0, 0.0};
    if (hi >= g.size()) return {g.size() - 1, 0.0};
    const std::size_t lo = hi - 1;
    const double w = (v - g[lo]) / (g[hi] - g[lo]);
    return {lo, std::clamp(w, 0.0, 1.0)};
}

}  // namespace

double sheet_interpolate(const AirySheetSample& s, double x, double y) {
    const auto [i, wx] = bracket(s.x_grid, x);
    const auto [j, wy] = bracket(s.y_grid, y);
    const auto value = [&](std::size_t a, std::size_t b, double w) { return w == 0.0 ? 0.0 : w * s(a, b); };
    const std::size_t i1 = std::min(i + 1, s.x_grid.size() - 1);
    const std::size_t j1 = std::min(j + 1, s.y_grid.size() - 1);
    const double v = value(i, j, (1 - wx) * (1 - wy)) + value(i1, j, wx * (1 - wy)) + value(i, j1, (1 - wx) * wy) +
                     value(i1, j1, wx * wy);
    return std::isnan(v) ? lpp::kNegInf : v;
}

AirySheetSample sheet_rescale(const AirySheetSample& sheet, double s, std::span<const double> x_target,
                              std::span<const double> y_target) {
    require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidParameter, "scale factor must be positive");
    check_sheet_grids(x_target, y_target);
    AirySheetSample out;
    out.scale = sheet.scale * s;
    out.x_grid.assign(x_target.begin(), x_target.end());
    out.y_grid.assign(y_target.begin(), y_target.end());
    out.source_n = sheet.source_n;
    out.seed = sheet.seed;
    out.values.reserve(x_target.size() * y_target.size());
    for (double x : x_target)
        for (double y : y_target) out.values.push_back(s * sheet_interpolate(sheet, x / (s * s), y / (s * s)));
    return out;
}

bool same_grid(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

namespace {

AirySheetSample compose_shell(const AirySheetSample& a, const AirySheetSample& b) {
    require(same_grid(a.y_grid, b.x_grid), ErrorCode::GridMismatch, "composition needs A.y_grid == B.x_grid");
    AirySheetSample q;
    q.scale = std::cbrt(a.scale * a.scale * a.scale + b.scale * b.scale * b.scale);
    q.x_grid = a.x_grid;
    q.y_grid = b.y_grid;
    q.source_n = a.source_n;
    q.seed = derive_seed(a.seed, b.seed);
    q.values.assign(a.x_grid.size() * b.y_grid.size(), lpp::kNegInf);
    return q;
}

}  // namespace

AirySheetSample sheet_compose(const AirySheetSample& a, const AirySheetSample& b, Execution mode) {
    AirySheetSample q = compose_shell(a, b);
    const std::size_t mid = a.y_grid.size();
    const std::size_t cols = b.y_grid.size();
    for_each_index(
        a.x_grid.size(),
        [&](std::size_t i) {
            double* row = q.values.data() + i * cols;
            for (std::size_t y = 0; y < mid; ++y) {
                const double left = a(i, y);
                if (left == lpp::kNegInf) continue;
                const double* brow = b.values.data() + y * cols;
                for (std::size_t z = 0; z < cols; ++z) row[z] = std::max(row[z], left + brow[z]);
            }
        },
        mode);
    return q;
}

AirySheetSample sheet_compose_reference(const AirySheetSample& a, const AirySheetSample& b) {
    AirySheetSample q = compose_shell(a, b);
    for (std::size_t i = 0; i < a.x_grid.size(); ++i)
        for (std::size_t z = 0; z < b.y_grid.size(); ++z) {
            double best = lpp::kNegInf;
            for (std::size_t y = 0; y < a.y_grid.size(); ++y) {
                if (a(i, y) == lpp::kNegInf || b(y, z) == lpp::kNegInf) continue;
                best = std::max(best, a(i, y) + b(y, z));
            }
            q.at(i, z) = best;
        }
    return q;
}

namespace {

// Rejection sampler over line-major values on the given times.
std::size_t resample_lines(std::vector<double>& values, std::span<const double> times, std::size_t line_count,
                           const GibbsWindow& w, std::uint64_t seed, std::size_t max_attempts, double diffusion) {
    const std::size_t m = times.size();
    require(w.k >= 1 && w.k <= line_count, ErrorCode::InvalidParameter, "window must resample 1..line_count lines");
    require(w.a > 0 && w.a < w.b && w.b + 1 < m, ErrorCode::InvalidParameter, "window must sit strictly inside the grid");
    require(diffusion > 0.0, ErrorCode::InvalidParameter, "diffusion must be positive");
    require(max_attempts >= 1, ErrorCode::InvalidParameter, "rejection budget must be positive");
    const auto v = [&](std::size_t line, std::size_t j) -> double& { return values[(line - 1) * m + j]; };
    const std::size_t inner = w.b - w.a - 1;
    std::vector<double> proposal(w.k * inner);
    RngStream rng(seed);
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        for (std::size_t i = 1; i <= w.k; ++i) {
            double cur = v(i, w.a);
            const double end = v(i, w.b);
            for (std::size_t j = w.a + 1; j < w.b; ++j) {
                const double dt = times[j] - times[j - 1];
                const double rest = times[w.b] - times[j - 1];
                const double mean = cur + dt / rest * (end - cur);
                const double var = diffusion * dt * (times[w.b] - times[j]) / rest;
                cur = mean + std::sqrt(var) * rng.normal();
                proposal[(i - 1) * inner + (j - w.a - 1)] = cur;
            }
        }
        bool ok = true;
        for (std::size_t j = 0; j < inner && ok; ++j) {
            for (std::size_t i = 1; i < w.k && ok; ++i) ok = proposal[(i - 1) * inner + j] > proposal[i * inner + j];
            if (ok && w.k < line_count) ok = proposal[(w.k - 1) * inner + j] > v(w.k + 1, w.a + 1 + j);
        }
        if (!ok) continue;
        for (std::size_t i = 1; i <= w.k; ++i)
            for (std::size_t j = 0; j < inner; ++j) v(i, w.a + 1 + j) = proposal[(i - 1) * inner + j];
        return attempt;
    }
    fail(ErrorCode::RejectionBudget,
         "no non-crossing proposal within " + std::to_string(max_attempts) + " attempts");
}

}  // namespace

GibbsResult<AiryLineSample> gibbs_resample(const AiryLineSample& lines, const GibbsWindow& w, std::uint64_t seed,
                                           std::size_t max_attempts, double diffusion) {
    GibbsResult<AiryLineSample> r{lines, 0.0, 0};
    r.attempts = resample_lines(r.sample.values, lines.y_grid, lines.line_count, w, seed, max_attempts, diffusion);
    r.acceptance_rate = 1.0 / static_cast<double>(r.attempts);
    return r;
}

GibbsResult<pitman::MelonEnsemble> gibbs_resample(const pitman::MelonEnsemble& melon, const GibbsWindow& w,
                                                  std::uint64_t seed, std::size_t max_attempts, double diffusion) {
    const auto& f = melon.lines();
    std::vector<double> values(f.raw().begin(), f.raw().end());
    std::vector<double> times(f.points());
    for (std::size_t t = 0; t < times.size(); ++t) times[t] = f.grid().at(t);
    const std::size_t attempts = resample_lines(values, times, f.line_count(), w, seed, max_attempts, diffusion);
    return {pitman::MelonEnsemble(lpp::CurveEnsemble(f.grid(), f.line_count(), std::move(values), f.two_sided())),
            1.0 / static_cast<double>(attempts), attempts};
}

std::vector<std::vector<double>> parabolic_stationarity_check(std::span<const AiryLineSample> replicas,
                                                              bool add_parabola) {
    require(replicas.size() >= 200, ErrorCode::InsufficientSamples, "stationarity check needs at least 200 replicas");
    const auto& y = replicas.front().y_grid;
    require(y.size() >= 2, ErrorCode::InvalidParameter, "stationarity check needs at least two y values");
    for (const auto& r : replicas)
        require(same_grid(r.y_grid, y) && r.line_count >= 1, ErrorCode::GridMismatch, "replicas must share the y grid");
    std::vector<stats::EmpiricalDistribution> laws;
    for (std::size_t j = 0; j < y.size(); ++j) {
        std::vector<double> v;
        v.reserve(replicas.size());
        for (const auto& r : replicas) v.push_back(r(1, j) + (add_parabola ? y[j] * y[j] : 0.0));
        laws.emplace_back(std::move(v));
    }
    std::vector<std::vector<double>> ks(y.size(), std::vector<double>(y.size(), 0.0));
    for (std::size_t a = 0; a < y.size(); ++a)
        for (std::size_t b = a + 1; b < y.size(); ++b) ks[a][b] = ks[b][a] = stats::ks_two_sample(laws[a], laws[b]);
    return ks;
}

void write_sheet_csv(const AirySheetSample& s, const std::string& csv_path, const std::string& sidecar_path) {
    std::ostringstream out;
    out << "x,y,value\n";
    for (std::size_t i = 0; i < s.x_grid.size(); ++i)
        for (std::size_t j = 0; j < s.y_grid.size(); ++j)
            out << io::format_double(s.x_grid[i]) << ',' << io::format_double(s.y_grid[j]) << ','
                << io::format_double(s(i, j)) << '\n';
    io::write_text(csv_path, out.str());
    io::Json meta;
    meta["scale"] = s.scale;
    meta["n"] = s.source_n;
    meta["seed"] = s.seed;
    io::write_json(sidecar_path, meta);
}

void write_lines_csv(const AiryLineSample& s, const std::string& csv_path) {
    std::ostringstream out;
    out << "line,y,value\n";
    for (std::size_t i = 1; i <= s.line_count; ++i)
        for (std::size_t j = 0; j < s.y_grid.size(); ++j)
            out << i << ',' << io::format_double(s.y_grid[j]) << ',' << io::format_double(s(i, j)) << '\n';
    io::write_text(csv_path, out.str());
}

}  // namespace kpz::airy
