#pragma once

#include <optional>
#include <vector>

#include "kpz/lpp.hpp"

namespace kpz::pitman {

struct CurvePair {
    lpp::UniformGrid grid;
    std::vector<double> first;
    std::vector<double> second;

    CurvePair(lpp::UniformGrid g, std::vector<double> f1, std::vector<double> f2);
    static CurvePair from_ensemble(const lpp::CurveEnsemble& f, std::size_t upper = 1);
    lpp::CurveEnsemble to_ensemble() const;
};

// max(max_{s in [x, y]} (f2(s) - f1(s)), 0) over grid indices
double max_gap(const CurvePair& f, std::size_t x, std::size_t y);

// W(f1, f2) = (f1 + G(0, .), f2 - G(0, .))
CurvePair pitman_pair(const CurvePair& f);

// sup_t |Wf1(t) - max_i (f_i(0) + f[(0,i) -> (t,1)])|
double top_line_identity_check(const CurvePair& f);

class MelonEnsemble {
public:
    explicit MelonEnsemble(lpp::CurveEnsemble lines);
    const lpp::CurveEnsemble& lines() const noexcept { return lines_; }
    std::size_t line_count() const noexcept { return lines_.line_count(); }
    std::size_t passes() const noexcept { return passes_; }

private:
    friend MelonEnsemble melon(const lpp::CurveEnsemble& f);
    MelonEnsemble(lpp::CurveEnsemble lines, std::size_t passes) : lines_(std::move(lines)), passes_(passes) {}
    lpp::CurveEnsemble lines_;
    std::size_t passes_ = 0;
};

// Pitman operators on adjacent pairs in bubble-sort order, then full sweeps until nothing changes.
MelonEnsemble melon(const lpp::CurveEnsemble& f);

// sup_t |(Wf)_1(t) - max_l (f_l(0) + f[(0,l) -> (t,1)])|
double melon_topline_check(const lpp::CurveEnsemble& f);

// g_l for l = 1..k; an empty optional stands for minus infinity.
struct BoundaryData {
    std::vector<std::optional<double>> g;

    std::size_t k() const noexcept { return g.size(); }
    void validate() const;
};

// H_{k,g}(y) = max_{1<=l<=k} (g_l + f[(0,l) -> (y,1)]) over the whole grid.
std::vector<double> h_field(const lpp::CurveEnsemble& f, const BoundaryData& g);

// sup_y |H_{k,g}(y) - (W Lhat)_1(y)| with Lhat = (g_1 + f_1, H'_{k-1,g'}).
double reduction_identity_check(const lpp::CurveEnsemble& f, const BoundaryData& g);

}  // namespace kpz::pitman
