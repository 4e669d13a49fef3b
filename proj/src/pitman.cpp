#include "kpz/pitman.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/error.hpp"

namespace kpz::pitman {

CurvePair::CurvePair(lpp::UniformGrid g, std::vector<double> f1, std::vector<double> f2)
    : grid(g), first(std::move(f1)), second(std::move(f2)) {
    grid.validate();
    require(first.size() == grid.points && second.size() == grid.points, ErrorCode::InvalidParameter,
            "pair lines must share the grid");
    for (std::size_t i = 0; i < grid.points; ++i)
        require(std::isfinite(first[i]) && std::isfinite(second[i]), ErrorCode::InvalidParameter, "pair values must be finite");
}

CurvePair CurvePair::from_ensemble(const lpp::CurveEnsemble& f, std::size_t upper) {
    const auto a = f.line(upper);
    const auto b = f.line(upper + 1);
    return CurvePair(f.grid(), {a.begin(), a.end()}, {b.begin(), b.end()});
}

lpp::CurveEnsemble CurvePair::to_ensemble() const { return lpp::CurveEnsemble(grid, {first, second}); }

double max_gap(const CurvePair& f, std::size_t x, std::size_t y) {
    require(x <= y, ErrorCode::InvalidQuery, "max_gap needs x <= y");
    require(y < f.grid.points, ErrorCode::InvalidQuery, "max_gap index out of range");
    double g = 0.0;
    for (std::size_t s = x; s <= y; ++s) g = std::max(g, f.second[s] - f.first[s]);
    return g;
}

namespace {

// In-place Pitman operator on two rows. Returns whether anything moved.
bool pitman_rows(double* a, double* b, std::size_t points) {
    double g = 0.0;
    bool moved = false;
    for (std::size_t t = 0; t < points; ++t) {
        g = std::max(g, b[t] - a[t]);
        if (g > 0.0) {
            a[t] += g;
            b[t] -= g;
            moved = true;
        }
    }
    return moved;
}

}  // namespace

CurvePair pitman_pair(const CurvePair& f) {
    CurvePair w = f;
    pitman_rows(w.first.data(), w.second.data(), w.grid.points);
    return w;
}

double top_line_identity_check(const CurvePair& f) {
    const CurvePair w = pitman_pair(f);
    const lpp::CurveEnsemble e = f.to_ensemble();
    const auto from2 = lpp::last_passage_profile(e, 0, 2, 1);
    const auto from1 = lpp::last_passage_profile(e, 0, 1, 1);
    double worst = 0.0;
    for (std::size_t t = 0; t < f.grid.points; ++t) {
        const double rhs = std::max(f.first[0] + from1.values[t], f.second[0] + from2.values[t]);
        worst = std::max(worst, std::abs(w.first[t] - rhs));
    }
    return worst;
}

MelonEnsemble::MelonEnsemble(lpp::CurveEnsemble lines) : lines_(std::move(lines)) {
    for (std::size_t i = 1; i < lines_.line_count(); ++i)
        for (std::size_t t = 0; t < lines_.points(); ++t)
            require(lines_(i, t) >= lines_(i + 1, t), ErrorCode::InvalidParameter, "melon lines must be ordered");
}

MelonEnsemble melon(const lpp::CurveEnsemble& f) {
    const std::size_t n = f.line_count();
    const std::size_t p = f.points();
    std::vector<double> v(f.raw().begin(), f.raw().end());
    auto row = [&](std::size_t i) { return v.data() + (i - 1) * p; };
    // reduced word of the longest permutation, bottom pair first, then each higher line
    // bubbled down: s_{n-1}, s_{n-2} s_{n-1}, ... On grid data this order makes the top
    // line equal the grid last-passage value exactly; the reverse order only does so in the limit.
    for (std::size_t top = n - 1; top >= 1; --top)
        for (std::size_t i = top; i < n; ++i) pitman_rows(row(i), row(i + 1), p);
    std::size_t passes = 0;
    bool moved = true;
    while (moved && passes < n + 1) {
        moved = false;
        for (std::size_t i = 1; i < n; ++i) moved = pitman_rows(row(i), row(i + 1), p) || moved;
        ++passes;
    }
    return MelonEnsemble(lpp::CurveEnsemble(f.grid(), n, std::move(v), f.two_sided()), passes);
}

double melon_topline_check(const lpp::CurveEnsemble& f) {
    const MelonEnsemble w = melon(f);
    std::vector<double> best(f.points(), lpp::kNegInf);
    for (std::size_t l = 1; l <= f.line_count(); ++l) {
        const auto prof = lpp::last_passage_profile(f, 0, l, 1);
        for (std::size_t t = 0; t < f.points(); ++t) best[t] = std::max(best[t], f(l, 0) + prof.values[t]);
    }
    double worst = 0.0;
    for (std::size_t t = 0; t < f.points(); ++t) worst = std::max(worst, std::abs(w.lines()(1, t) - best[t]));
    return worst;
}

void BoundaryData::validate() const {
    require(!g.empty(), ErrorCode::InvalidParameter, "boundary data needs k >= 1");
    bool any = false;
    for (const auto& v : g) {
        if (!v) continue;
        require(std::isfinite(*v), ErrorCode::InvalidParameter, "boundary entries must be finite or absent");
        any = true;
    }
    require(any, ErrorCode::InvalidParameter, "boundary data cannot be entirely absent");
}

namespace {

// max_{first <= l <= k} (g_l + f[(0,l) -> (y,target)])
std::vector<double> shifted_profile_max(const lpp::CurveEnsemble& f, const BoundaryData& g, std::size_t first,
                                        std::size_t target) {
    std::vector<double> out(f.points(), lpp::kNegInf);
    for (std::size_t l = first; l <= g.k(); ++l) {
        if (!g.g[l - 1]) continue;
        const auto prof = lpp::last_passage_profile(f, 0, l, target);
        for (std::size_t t = 0; t < f.points(); ++t) out[t] = std::max(out[t], *g.g[l - 1] + prof.values[t]);
    }
    return out;
}

}  // namespace

std::vector<double> h_field(const lpp::CurveEnsemble& f, const BoundaryData& g) {
    g.validate();
    require(g.k() <= f.line_count(), ErrorCode::InvalidParameter, "k exceeds the line count");
    return shifted_profile_max(f, g, 1, 1);
}

double reduction_identity_check(const lpp::CurveEnsemble& f, const BoundaryData& g) {
    g.validate();
    require(g.k() >= 2, ErrorCode::InvalidParameter, "reduction identity needs k >= 2");
    require(g.k() <= f.line_count(), ErrorCode::InvalidParameter, "k exceeds the line count");
    require(g.g[0].has_value(), ErrorCode::InvalidParameter, "reduction identity needs g_1 present");
    bool lower = false;
    for (std::size_t l = 2; l <= g.k(); ++l) lower = lower || g.g[l - 1].has_value();
    require(lower, ErrorCode::InvalidParameter, "reduction identity needs some g_l present for l >= 2");

    const std::vector<double> h = h_field(f, g);
    const std::vector<double> h_prime = shifted_profile_max(f, g, 2, 2);
    std::vector<double> first(f.points());
    const double g1 = *g.g[0];
    for (std::size_t t = 0; t < f.points(); ++t) first[t] = g1 + (f(1, t) - f(1, 0));
    const CurvePair w = pitman_pair(CurvePair(f.grid(), std::move(first), h_prime));
    double worst = 0.0;
    for (std::size_t t = 0; t < f.points(); ++t) worst = std::max(worst, std::abs(h[t] - w.first[t]));
    return worst;
}

}  // namespace kpz::pitman
