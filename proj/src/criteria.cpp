#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>

#include "kpz/airy.hpp"
#include "kpz/error.hpp"
#include "kpz/experiment.hpp"
#include "kpz/growth.hpp"
#include "kpz/landscape.hpp"
#include "kpz/lpp.hpp"
#include "kpz/pitman.hpp"
#include "kpz/rng.hpp"
#include "kpz/stats.hpp"

namespace kpz::experiment {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t replica_seed(const ExperimentManifest& m, std::uint64_t r) {
    return derive_seed(m.seed, hash_label(m.target), r);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string column_csv(const std::string& header, const std::vector<std::vector<double>>& cols) {
    std::ostringstream out;
    out << header << '\n';
    const std::size_t rows = cols.empty() ? 0 : cols.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << io::format_double(cols[c][r]);
        out << '\n';
    }
    return out.str();
}

std::vector<double> index_column(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return v;
}

double rost_shape(double x) { return std::abs(x) < 1.0 ? 0.5 * (1.0 + x * x) : std::abs(x); }

std::vector<CriterionResult> corner_limit_shape(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const double M = m.param("M", 400.0);
    const double x_max = m.param("x_max", 1.5);
    const double x_step = m.param("x_step", 0.05);
    const auto half = std::max<std::int64_t>(growth::corner_window_for(M), std::llround(std::ceil(x_max * M)) + 4);
    std::vector<double> xs;
    for (double x = -x_max; x <= x_max + 1e-9; x += x_step) xs.push_back(std::round(x / x_step) * x_step);
    const auto profiles = map_replicas<std::vector<double>>(
        m.replicas,
        [&](std::size_t r) {
            const auto trace = growth::simulate_corner_growth(growth::SiteWindow::symmetric(half), M, replica_seed(m, r));
            const auto& h = trace.snapshots.back();
            std::vector<double> out;
            for (double x : xs) out.push_back(static_cast<double>(h.at(std::llround(x * M))) / M);
            return out;
        },
        ctx.execution());
    std::vector<double> mean(xs.size(), 0.0), limit(xs.size());
    double mad = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        limit[j] = rost_shape(xs[j]);
        for (const auto& p : profiles) {
            mean[j] += p[j] / static_cast<double>(m.replicas);
            mad += std::abs(p[j] - limit[j]);
        }
    }
    mad /= static_cast<double>(xs.size() * m.replicas);
    ctx.write("limit_shape.csv", column_csv("x,mean_scaled_height,limit", {xs, mean, limit}));
    return {check("mean_abs_deviation", mad, Comparison::AtMost, m.threshold("mean_abs_deviation", 0.05)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 60.0))};
}

std::vector<CriterionResult> random_deposition_clt(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const double t = m.param("t_end", 1000.0);
    const std::size_t sites = m.param_size("sites", 2000);
    const auto trace = growth::simulate_random_deposition({0, static_cast<std::int64_t>(sites) - 1}, t, 1.0, m.seed);
    const auto& h = trace.snapshots.back().heights;
    std::vector<double> ratio, z;
    for (auto v : h) {
        ratio.push_back(static_cast<double>(v) / t);
        z.push_back((static_cast<double>(v) - t) / std::sqrt(t));
    }
    ctx.write("heights.csv", column_csv("site,height", {index_column(h.size()), [&] {
                                              std::vector<double> v(h.begin(), h.end());
                                              return v;
                                          }()}));
    const double mean_ratio = stats::mean(ratio);
    return {check("mean_h_over_t_abs_error", std::abs(mean_ratio - 1.0), Comparison::AtMost,
                  m.threshold("mean_h_over_t_abs_error", 0.02)),
            check("ks_normal", stats::ks_gaussian(z, 0.0, 1.0), Comparison::AtMost, m.threshold("ks_normal", 0.05)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 10.0))};
}

lpp::CurveEnsemble random_ensemble(RngStream& rng, std::size_t lines, std::size_t points) {
    std::vector<double> v(lines * points);
    for (std::size_t i = 0; i < lines; ++i) {
        double acc = rng.normal();
        for (std::size_t t = 0; t < points; ++t) {
            v[i * points + t] = acc;
            acc += rng.normal() * 0.1;
        }
    }
    return lpp::CurveEnsemble({0.0, 1.0 / static_cast<double>(points - 1), points}, lines, std::move(v));
}

std::size_t uniform_index(RngStream& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

std::vector<CriterionResult> metric_composition(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const std::size_t max_lines = m.param_size("max_lines", 5);
    const std::size_t max_points = m.param_size("max_points", 512);
    const std::size_t splits = m.param_size("splits_per_ensemble", 5);
    std::vector<std::vector<double>> cols(9);
    double worst_gap = 0.0, worst_slack = INFINITY;
    for (std::size_t c = 0; c < m.replicas; ++c) {
        RngStream rng(replica_seed(m, c));
        const std::size_t lines = uniform_index(rng, 1, max_lines);
        const std::size_t points = uniform_index(rng, 2, max_points);
        const auto f = random_ensemble(rng, lines, points);
        for (std::size_t s = 0; s < splits; ++s) {
            std::size_t x = uniform_index(rng, 0, points - 1), y = uniform_index(rng, 0, points - 1);
            if (x > y) std::swap(x, y);
            std::size_t l = uniform_index(rng, 1, lines), mm = uniform_index(rng, 1, lines);
            if (l < mm) std::swap(l, mm);
            const std::size_t k = uniform_index(rng, mm, l);
            const std::size_t z = uniform_index(rng, x, y);
            const auto r = lpp::check_metric_composition(f, {x, y, l, mm}, k, z);
            worst_gap = std::max(worst_gap, std::abs(r.gap));
            worst_slack = std::min(worst_slack, r.slack);
            const double row[] = {static_cast<double>(c), static_cast<double>(lines), static_cast<double>(points),
                                  static_cast<double>(x), static_cast<double>(y), static_cast<double>(k),
                                  static_cast<double>(z), r.slack, r.gap};
            for (std::size_t i = 0; i < 9; ++i) cols[i].push_back(row[i]);
        }
    }
    ctx.write("composition.csv", column_csv("ensemble,lines,points,x,y,k,z,slack,gap", cols));
    return {check("max_abs_gap", worst_gap, Comparison::AtMost, m.threshold("max_abs_gap", 1e-9)),
            check("min_slack", worst_slack, Comparison::AtLeast, m.threshold("min_slack", -1e-9)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 5.0))};
}

// Every non-increasing jump tuple, scored with path_length.
double enumerate_last_passage(const lpp::CurveEnsemble& f, const lpp::LastPassageQuery& q) {
    const std::size_t jumps = q.l - q.m;
    lpp::GridPath p{q.x, q.l, q.y, q.m, std::vector<std::size_t>(jumps, q.x)};
    double best = lpp::kNegInf;
    // jumps[0] >= jumps[1] >= ... ; iterate like an odometer over [x, y]
    std::vector<std::size_t>& t = p.jumps;
    for (;;) {
        bool ordered = true;
        for (std::size_t i = 1; i < jumps; ++i) ordered = ordered && t[i] <= t[i - 1];
        if (ordered) best = std::max(best, lpp::path_length(f, p));
        std::size_t i = 0;
        while (i < jumps && t[i] == q.y) t[i++] = q.x;
        if (i == jumps) break;
        ++t[i];
    }
    return best;
}

std::vector<CriterionResult> dp_enumeration(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    std::vector<double> dp_col, enum_col;
    double mismatches = 0.0;
    for (std::size_t c = 0; c < m.replicas; ++c) {
        RngStream rng(replica_seed(m, c));
        const std::size_t lines = uniform_index(rng, 1, m.param_size("max_lines", 3));
        const std::size_t points = uniform_index(rng, 2, m.param_size("max_points", 12));
        const auto f = random_ensemble(rng, lines, points);
        std::size_t x = uniform_index(rng, 0, points - 1), y = uniform_index(rng, 0, points - 1);
        if (x > y) std::swap(x, y);
        std::size_t l = uniform_index(rng, 1, lines), mm = uniform_index(rng, 1, lines);
        if (l < mm) std::swap(l, mm);
        const lpp::LastPassageQuery q{x, y, l, mm};
        const double dp = lpp::last_passage(f, q);
        const double en = enumerate_last_passage(f, q);
        if (dp != en) mismatches += 1.0;
        dp_col.push_back(dp);
        enum_col.push_back(en);
    }
    ctx.write("dp_vs_enumeration.csv", column_csv("case,dp,enumeration", {index_column(dp_col.size()), dp_col, enum_col}));
    return {check("bitwise_mismatches", mismatches, Comparison::Equal, 0.0),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 5.0))};
}

// Values on the dyadic lattice 2^-20 so that sums and differences are exact.
double quantize(double v) { return std::ldexp(std::round(std::ldexp(v, 20)), -20); }

std::vector<CriterionResult> pitman_identities(const ExperimentManifest& m, RunContext& ctx) {
    const std::size_t points = m.param_size("points", 1001);
    std::vector<double> residuals, sums;
    double worst_top = 0.0, worst_sum = 0.0;
    for (std::size_t c = 0; c < m.replicas; ++c) {
        RngStream rng(replica_seed(m, c));
        const lpp::UniformGrid g{0.0, 1.0 / static_cast<double>(points - 1), points};
        std::vector<double> a(points), b(points);
        a[0] = quantize(rng.normal());
        b[0] = quantize(rng.normal());
        const double sd = std::sqrt(g.step);
        for (std::size_t t = 1; t < points; ++t) {
            a[t] = quantize(a[t - 1] + sd * rng.normal());
            b[t] = quantize(b[t - 1] + sd * rng.normal());
        }
        const pitman::CurvePair f(g, a, b);
        const double top = pitman::top_line_identity_check(f);
        const auto w = pitman::pitman_pair(f);
        double sum = 0.0;
        for (std::size_t t = 0; t < points; ++t) sum = std::max(sum, std::abs((w.first[t] + w.second[t]) - (a[t] + b[t])));
        worst_top = std::max(worst_top, top);
        worst_sum = std::max(worst_sum, sum);
        residuals.push_back(top);
        sums.push_back(sum);
    }
    // f1 = 0.1 x^4 + 1, f2 = 2 exp(-x) on [0, 2]
    const std::size_t fig_points = m.param_size("figure_points", 2001);
    const lpp::UniformGrid fg{0.0, 2.0 / static_cast<double>(fig_points - 1), fig_points};
    std::vector<double> f1(fig_points), f2(fig_points);
    for (std::size_t t = 0; t < fig_points; ++t) {
        const double x = fg.at(t);
        f1[t] = 0.1 * x * x * x * x + 1.0;
        f2[t] = 2.0 * std::exp(-x);
    }
    const pitman::CurvePair fig(fg, f1, f2);
    double gap_residual = 0.0;
    for (std::size_t t = 0; t < fig_points; ++t) gap_residual = std::max(gap_residual, std::abs(pitman::max_gap(fig, 0, t) - 1.0));
    const double fig_top = pitman::top_line_identity_check(fig);
    ctx.write("pitman_pairs.csv", column_csv("pair,top_line_residual,sum_residual", {index_column(residuals.size()), residuals, sums}));
    return {check("top_line_residual", worst_top, Comparison::AtMost, m.threshold("top_line_residual", 1e-9)),
            check("figure_gap_residual", gap_residual, Comparison::AtMost, m.threshold("figure_gap_residual", 1e-9)),
            check("figure_top_line_residual", fig_top, Comparison::AtMost, m.threshold("top_line_residual", 1e-9)),
            check("sum_conservation_residual", worst_sum, Comparison::Equal, 0.0)};
}

std::vector<CriterionResult> reduction_identity(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const std::size_t k_min = m.param_size("k_min", 2), k_max = m.param_size("k_max", 6);
    const std::size_t points = m.param_size("points", 501);
    const double absent = m.param("absent_probability", 0.2);
    std::vector<double> ks, idx, res;
    double worst = 0.0;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        for (std::size_t c = 0; c < m.replicas; ++c) {
            RngStream rng(derive_seed(replica_seed(m, c), k));
            lpp::BrownianSpec spec;
            spec.lines = k;
            spec.step = 1.0 / static_cast<double>(points - 1);
            spec.length = 1.0;
            const auto f = lpp::brownian_ensemble(spec, rng.next_u64(), Execution::Serial);
            pitman::BoundaryData g;
            g.g.push_back(rng.normal());
            for (std::size_t l = 2; l <= k; ++l) {
                const bool keep = rng.uniform() >= absent || l == k;
                const double v = rng.normal();
                g.g.push_back(keep ? std::optional<double>(v) : std::nullopt);
            }
            const double r = pitman::reduction_identity_check(f, g);
            worst = std::max(worst, r);
            ks.push_back(static_cast<double>(k));
            idx.push_back(static_cast<double>(c));
            res.push_back(r);
        }
    }
    ctx.write("reduction.csv", column_csv("k,ensemble,residual", {ks, idx, res}));
    return {check("max_residual", worst, Comparison::AtMost, m.threshold("max_residual", 1e-9)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 30.0))};
}

std::vector<CriterionResult> melon_vs_tasep(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const std::size_t n = m.param_size("n", 512);
    const double eps = m.param("epsilon", 0.05);
    const std::size_t tasep_reps = m.param_size("tasep_replicas", m.replicas);
    const double y0[] = {0.0};
    const auto melon = map_replicas<double>(
        m.replicas, [&](std::size_t r) { return airy::rescaled_melon(n, y0, derive_seed(replica_seed(m, r), 1))(1, 0); },
        ctx.execution());
    const double T = 2.0 * std::pow(eps, -1.5);
    const auto half = growth::tasep_window_for(T);
    const growth::TasepState init = growth::TasepState::step(growth::SiteWindow::symmetric(half));
    const double snap[] = {T};
    const auto tasep = map_replicas<double>(
        tasep_reps,
        [&](std::size_t r) {
            const auto trace = growth::simulate_tasep(init, T, derive_seed(replica_seed(m, r), 2), snap);
            return growth::kpz_rescale(growth::to_growth_trace(trace), {eps}, 1.0, 0.0);
        },
        ctx.execution());
    ctx.write("melon_samples.csv", column_csv("replica,value", {index_column(melon.size()), melon}));
    ctx.write("tasep_samples.csv", column_csv("replica,value", {index_column(tasep.size()), tasep}));
    return {check("ks_two_sample", stats::ks_two_sample(melon, tasep), Comparison::AtMost, m.threshold("ks_two_sample", 0.10)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 600.0))};
}

airy::SheetOptions sheet_options(const ExperimentManifest& m, Execution mode) {
    airy::SheetOptions o;
    o.grid_step = 1.0 / m.param("steps_per_unit", 16384.0);
    o.refinement = m.param_bool("refinement", true);
    o.execution = mode;
    return o;
}

std::vector<CriterionResult> sheet_composition(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const std::size_t n = m.param_size("n", 128);
    const auto grid = landscape::uniform_grid(m.param("half_width", 2.4), m.param("grid_step", 0.1));
    const auto opts = sheet_options(m, Execution::Serial);
    const double origin[] = {0.0};
    struct Pair {
        double composed = 0, direct = 0;
    };
    const auto pairs = map_replicas<Pair>(
        m.replicas,
        [&](std::size_t r) {
            const std::uint64_t s = replica_seed(m, r);
            const auto a = airy::airy_sheet_sample(n, origin, grid, derive_seed(s, 1), opts);
            const auto b = airy::airy_sheet_sample(n, grid, origin, derive_seed(s, 2), opts);
            const auto q = airy::sheet_compose(a, b, Execution::Serial);
            const auto d = airy::airy_sheet_sample(n, origin, origin, derive_seed(s, 3), opts);
            // r^{-1} Q(x r^2, z r^2) at x = z = 0
            return Pair{q(0, 0) / q.scale, d(0, 0)};
        },
        ctx.execution());
    std::vector<double> comp, direct;
    for (const auto& p : pairs) {
        comp.push_back(p.composed);
        direct.push_back(p.direct);
    }
    ctx.write("sheet_composition.csv", column_csv("replica,composed_rescaled,direct", {index_column(comp.size()), comp, direct}));
    return {check("ks_two_sample", stats::ks_two_sample(comp, direct), Comparison::AtMost, m.threshold("ks_two_sample", 0.10)),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 600.0))};
}

std::vector<CriterionResult> gibbs_invariance(const ExperimentManifest& m, RunContext& ctx) {
    const std::size_t n = m.param_size("n", 16);
    const auto ys = landscape::uniform_grid(m.param("half_width", 1.0), m.param("grid_step", 0.05));
    const double a = m.param("window_left", -0.5), b = m.param("window_right", 0.5);
    const std::size_t k = m.param_size("k", 1);
    const std::size_t budget = m.param_size("max_attempts", airy::kDefaultRejectionBudget);
    const auto index_of = [&](double v) {
        return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), v - 1e-9) - ys.begin());
    };
    const std::size_t ia = index_of(a), ib = index_of(b), mid = (ia + ib) / 2;
    struct Draw {
        double before = 0, after = 0, attempts = 0, budget_error = 0;
    };
    const auto draws = map_replicas<Draw>(
        m.replicas,
        [&](std::size_t r) {
            const std::uint64_t s = replica_seed(m, r);
            airy::MelonOptions mo;
            mo.lines = k + 1 <= n ? k + 1 : n;
            const auto lines = airy::rescaled_melon(n, ys, derive_seed(s, 1), mo);
            Draw d;
            d.before = lines(1, mid);
            try {
                const auto res = airy::gibbs_resample(lines, {k, ia, ib}, derive_seed(s, 2), budget);
                d.after = res.sample(1, mid);
                d.attempts = static_cast<double>(res.attempts);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::RejectionBudget) throw;
                d.after = NAN;
                d.budget_error = 1.0;
            }
            return d;
        },
        ctx.execution());
    std::vector<double> before, after, attempts;
    double budget_errors = 0.0;
    for (const auto& d : draws) {
        before.push_back(d.before);
        attempts.push_back(d.attempts);
        budget_errors += d.budget_error;
        if (!std::isnan(d.after)) after.push_back(d.after);
    }
    std::vector<double> after_col;
    for (const auto& d : draws) after_col.push_back(d.after);
    ctx.write("gibbs.csv", column_csv("replica,before,after,attempts", {index_column(before.size()), before, after_col, attempts}));
    const double ks = after.empty() ? 1.0 : stats::ks_two_sample(before, after);
    return {check("ks_two_sample", ks, Comparison::AtMost, m.threshold("ks_two_sample", 0.10)),
            check("rejection_budget_errors", budget_errors, Comparison::Equal, 0.0),
            check("mean_acceptance_rate", static_cast<double>(attempts.size()) /
                                              std::max(1.0, [&] {
                                                  double s = 0;
                                                  for (double v : attempts) s += v;
                                                  return s;
                                              }()),
                  Comparison::AtLeast, m.threshold("mean_acceptance_rate", 1e-3))};
}

std::vector<CriterionResult> fixed_point_regularity(const ExperimentManifest& m, RunContext& ctx) {
    const auto t0 = Clock::now();
    const std::size_t n = m.param_size("n", 128);
    const double support = m.param("support_half_width", 0.5);
    const auto xs = landscape::uniform_grid(support, m.param("x_step", 0.025));
    const double y_step = m.param("y_step", 0.0025);
    const double y_max = m.param("y_max", 1.5);
    std::vector<double> ys;
    for (std::size_t j = 0; static_cast<double>(j) * y_step <= y_max + 1e-9; ++j) ys.push_back(static_cast<double>(j) * y_step);
    const auto opts = sheet_options(m, Execution::Serial);
    const auto h0 = landscape::FinitaryInitial::flat(-support, support);
    const double qa = m.param("qv_left", 0.0), qb = m.param("qv_right", 1.0);
    const double base = m.param("base_point", 0.5);
    const auto profiles = map_replicas<landscape::FixedPointProfile>(
        m.replicas,
        [&](std::size_t r) {
            const auto sheet = airy::airy_sheet_sample(n, xs, ys, replica_seed(m, r), opts);
            return landscape::kpz_fixed_point(sheet, h0, 1.0);
        },
        ctx.execution());
    std::vector<double> qv, holder, contained;
    for (const auto& p : profiles) {
        qv.push_back(landscape::quadratic_variation(p, qa, qb));
        holder.push_back(landscape::holder_norm_estimate(p, m.param("beta", 0.4), qa, qb).lag_exponent);
        bool inside = true;
        for (double a : p.argmax) inside = inside && a >= p.containment_left && a <= p.containment_right;
        contained.push_back(inside ? 1.0 : 0.0);
    }
    const double eps[] = {1.0, 0.5, 0.25};
    const auto wlb = landscape::weak_local_brownian_stat(profiles, eps, base);
    double worst_increase = -INFINITY;
    for (std::size_t i = 1; i < wlb.ks.size(); ++i) worst_increase = std::max(worst_increase, wlb.ks[i] - wlb.ks[i - 1]);
    ctx.write("fixed_point_stats.csv", column_csv("replica,quadratic_variation,holder_lag_exponent,argmax_contained",
                                                  {index_column(qv.size()), qv, holder, contained}));
    ctx.write("weak_local_brownian.csv", column_csv("eps,ks", {wlb.eps, wlb.ks}));
    ctx.write("profile_0.csv", [&] {
        std::vector<double> y = profiles[0].y_grid, h = profiles[0].values, a = profiles[0].argmax;
        return column_csv("y,h,argmax_x", {y, h, a});
    }());
    const double qv_mean = stats::mean(qv) / (qb - qa);
    const double holder_mean = stats::mean(holder);
    double all_contained = 1.0;
    for (double c : contained) all_contained = std::min(all_contained, c);
    return {check("qv_relative_error", std::abs(qv_mean / 2.0 - 1.0), Comparison::AtMost, m.threshold("qv_relative_error", 0.2)),
            check("holder_exponent_error", std::abs(holder_mean - 0.5), Comparison::AtMost,
                  m.threshold("holder_exponent_error", 0.07)),
            check("wlb_ks_max_increase", worst_increase, Comparison::AtMost, m.threshold("wlb_ks_max_increase", 0.0)),
            check("argmax_contained", all_contained, Comparison::Equal, 1.0),
            check("runtime_seconds", seconds_since(t0), Comparison::AtMost, m.threshold("runtime_seconds", 600.0))};
}

std::vector<CriterionResult> tracy_widom_mean(const ExperimentManifest& m, RunContext& ctx) {
    const std::size_t n = m.param_size("n", 1024);
    require(m.parameters.contains("reference_mean"), ErrorCode::Config, "tracy-widom target needs reference_mean");
    const double ref = m.param("reference_mean", 0.0);
    const double y0[] = {0.0};
    const auto samples = map_replicas<double>(
        m.replicas, [&](std::size_t r) { return airy::rescaled_melon(n, y0, replica_seed(m, r))(1, 0); }, ctx.execution());
    ctx.write("top_line_samples.csv", column_csv("replica,value", {index_column(samples.size()), samples}));
    return {check("mean_abs_error", std::abs(stats::mean(samples) - ref), Comparison::AtMost,
                  m.threshold("mean_abs_error", 0.1), true)};
}

}  // namespace

void register_builtin_targets() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto& r = Registry::instance();
        r.add("corner-limit-shape", corner_limit_shape);
        r.add("random-deposition-clt", random_deposition_clt);
        r.add("lpp-metric-composition", metric_composition);
        r.add("lpp-dp-enumeration", dp_enumeration);
        r.add("pitman-identities", pitman_identities);
        r.add("pitman-reduction", reduction_identity);
        r.add("melon-vs-tasep", melon_vs_tasep);
        r.add("sheet-composition", sheet_composition);
        r.add("gibbs-invariance", gibbs_invariance);
        r.add("fixed-point-regularity", fixed_point_regularity);
        r.add("tracy-widom-mean", tracy_widom_mean);
    });
}

}  // namespace kpz::experiment
