#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kpz/parallel.hpp"

namespace kpz::lpp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct UniformGrid {
    double origin = 0.0;
    double step = 1.0;
    std::size_t points = 1;

    double at(std::size_t i) const noexcept { return origin + step * static_cast<double>(i); }
    double back() const noexcept { return at(points - 1); }
    // Nearest grid index to t; throws DomainShortfall when t is off the grid by more than half a step.
    std::size_t nearest(double t) const;
    bool contains(double t) const noexcept;
    void validate() const;

    friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

// Lines are 1-based, line 1 is the top line. Values are stored line-major.
class CurveEnsemble {
public:
    CurveEnsemble() = default;
    CurveEnsemble(UniformGrid grid, std::size_t lines, std::vector<double> values, bool two_sided = false);
    CurveEnsemble(UniformGrid grid, const std::vector<std::vector<double>>& lines, bool two_sided = false);

    const UniformGrid& grid() const noexcept { return grid_; }
    std::size_t line_count() const noexcept { return lines_; }
    std::size_t points() const noexcept { return grid_.points; }
    bool two_sided() const noexcept { return two_sided_; }

    double operator()(std::size_t line, std::size_t index) const noexcept {
        return values_[(line - 1) * grid_.points + index];
    }
    std::span<const double> line(std::size_t i) const;
    std::span<const double> raw() const noexcept { return values_; }

    // Every stride-th grid point, starting at offset.
    CurveEnsemble subsample(std::size_t stride, std::size_t offset = 0) const;
    // The first `lines` lines.
    CurveEnsemble top(std::size_t lines) const;

private:
    UniformGrid grid_{};
    std::size_t lines_ = 0;
    std::vector<double> values_;
    bool two_sided_ = false;
};

struct GridPath {
    std::size_t start_index = 0;  // x
    std::size_t start_line = 1;   // l
    std::size_t end_index = 0;    // y
    std::size_t end_line = 1;     // m
    // jumps[i - m] is t_i, the grid index where the path moves from line i+1 up to line i
    std::vector<std::size_t> jumps;

    std::size_t jump(std::size_t i) const { return jumps.at(i - end_line); }
    friend bool operator==(const GridPath&, const GridPath&) = default;
};

struct LastPassageQuery {
    std::size_t x = 0;  // start grid index
    std::size_t y = 0;  // end grid index
    std::size_t l = 1;  // start line (bottom)
    std::size_t m = 1;  // end line (top)
};

enum class TieBreak { Rightmost, Leftmost };

void validate(const CurveEnsemble& f, const LastPassageQuery& q);
void validate(const CurveEnsemble& f, const GridPath& p);

// Length accumulated from grid increments f_i(t) - f_i(t-1) in time order; this
// summation order is shared with the DP so both agree bit for bit.
double path_length(const CurveEnsemble& f, const GridPath& p);
double last_passage(const CurveEnsemble& f, const LastPassageQuery& q);

struct PassageProfile {
    std::size_t start_index = 0;
    std::vector<double> values;  // values[j] is the passage value to grid index start_index + j

    double at(std::size_t y) const;
    std::size_t end_index() const noexcept { return start_index + values.size() - 1; }
};

PassageProfile last_passage_profile(const CurveEnsemble& f, std::size_t x, std::size_t l, std::size_t m);
GridPath rightmost_geodesic(const CurveEnsemble& f, const LastPassageQuery& q, TieBreak tie = TieBreak::Rightmost);

struct CompositionResidual {
    double slack = 0.0;  // f[(x,l)->(y,m)] - (f[(x,l)->(z,k)] + f[(z,k)->(y,m)])
    double gap = 0.0;    // f[(x,l)->(y,m)] - max_k of the split at z
};

CompositionResidual check_metric_composition(const CurveEnsemble& f, const LastPassageQuery& q, std::size_t k,
                                             std::size_t z);

struct BrownianSpec {
    std::size_t lines = 1;
    double length = 1.0;  // one-sided domain [0, length]; two-sided covers [-length, length]
    double step = 1e-3;
    double diffusion = 1.0;
    bool two_sided = false;
    double origin = 0.0;               // shift of the time axis; the start value sits at time `origin`
    std::vector<double> start_values;  // empty means all zero
};

CurveEnsemble brownian_ensemble(const BrownianSpec& spec, std::uint64_t seed, Execution mode = Execution::Parallel);

// Time-major increments: inc[t * lines + (i - 1)] = f_i(t) - f_i(t - 1), row t = 0 unused.
class IncrementTable {
public:
    explicit IncrementTable(const CurveEnsemble& f);
    std::size_t lines() const noexcept { return lines_; }
    std::size_t points() const noexcept { return points_; }
    const double* row(std::size_t t) const noexcept { return data_.data() + t * lines_; }
    // Table of g_i(s) = -f_{n+1-i}(T - s): passages (x, n) -> (y, 1) become (T - y, n) -> (T - x, 1).
    IncrementTable reversed() const;

private:
    std::size_t lines_;
    std::size_t points_;
    std::vector<double> data_;
};

// Passage values from (x, lines) to (y, 1) for every x in starts and every y in targets
// with y >= x; other entries are -inf. Result is row-major over (starts, targets).
// Sweeps once per start, or once per target on the reversed table when targets are fewer.
std::vector<double> bottom_to_top_table(const IncrementTable& inc, std::span<const std::size_t> starts,
                                        std::span<const std::size_t> targets, Execution mode = Execution::Parallel);

// Serial reference for bottom_to_top_table, written as a plain loop over starts.
std::vector<double> bottom_to_top_table_reference(const IncrementTable& inc, std::span<const std::size_t> starts,
                                                  std::span<const std::size_t> targets);

// Serialization: CSV `line,grid_index,value` plus a JSON sidecar with the grid.
void write_ensemble_csv(const CurveEnsemble& f, const std::string& csv_path, const std::string& sidecar_path);
CurveEnsemble read_ensemble_csv(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace kpz::lpp
