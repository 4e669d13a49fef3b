#include "kpz/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kpz/error.hpp"
#include "kpz/io.hpp"
#include "kpz/rng.hpp"

namespace kpz::lpp {

std::size_t UniformGrid::nearest(double t) const {
    const double pos = (t - origin) / step;
    const double r = std::round(pos);
    if (r < 0.0 || r > static_cast<double>(points - 1) || std::abs(pos - r) > 0.5 + 1e-9)
        fail(ErrorCode::DomainShortfall, "time " + io::format_double(t) + " is outside the ensemble grid");
    return static_cast<std::size_t>(r);
}

bool UniformGrid::contains(double t) const noexcept {
    const double pos = (t - origin) / step;
    return pos >= -0.5 && pos <= static_cast<double>(points - 1) + 0.5;
}

void UniformGrid::validate() const {
    require(step > 0.0 && std::isfinite(step), ErrorCode::InvalidParameter, "grid step must be positive");
    require(points >= 1, ErrorCode::InvalidParameter, "grid needs at least one point");
    require(std::isfinite(origin), ErrorCode::InvalidParameter, "grid origin must be finite");
}

CurveEnsemble::CurveEnsemble(UniformGrid grid, std::size_t lines, std::vector<double> values, bool two_sided)
    : grid_(grid), lines_(lines), values_(std::move(values)), two_sided_(two_sided) {
    grid_.validate();
    require(lines_ >= 1, ErrorCode::InvalidParameter, "ensemble needs at least one line");
    require(values_.size() == lines_ * grid_.points, ErrorCode::InvalidParameter, "ensemble value count mismatch");
    for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidParameter, "ensemble values must be finite");
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& lines, std::size_t points) {
    std::vector<double> out;
    out.reserve(lines.size() * points);
    for (const auto& l : lines) {
        require(l.size() == points, ErrorCode::InvalidParameter, "all lines must share the grid");
        out.insert(out.end(), l.begin(), l.end());
    }
    return out;
}

}  // namespace

CurveEnsemble::CurveEnsemble(UniformGrid grid, const std::vector<std::vector<double>>& lines, bool two_sided)
    : CurveEnsemble(grid, lines.size(), flatten(lines, grid.points), two_sided) {}

std::span<const double> CurveEnsemble::line(std::size_t i) const {
    require(i >= 1 && i <= lines_, ErrorCode::InvalidParameter, "line index out of range");
    return std::span<const double>(values_).subspan((i - 1) * grid_.points, grid_.points);
}

CurveEnsemble CurveEnsemble::subsample(std::size_t stride, std::size_t offset) const {
    require(stride >= 1 && offset < grid_.points, ErrorCode::InvalidParameter, "bad subsample stride");
    UniformGrid g{grid_.at(offset), grid_.step * static_cast<double>(stride), (grid_.points - 1 - offset) / stride + 1};
    std::vector<double> v;
    v.reserve(lines_ * g.points);
    for (std::size_t i = 0; i < lines_; ++i)
        for (std::size_t j = 0; j < g.points; ++j) v.push_back(values_[i * grid_.points + offset + j * stride]);
    return CurveEnsemble(g, lines_, std::move(v), two_sided_);
}

CurveEnsemble CurveEnsemble::top(std::size_t lines) const {
    require(lines >= 1 && lines <= lines_, ErrorCode::InvalidParameter, "line count out of range");
    return CurveEnsemble(grid_, lines,
                         std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(lines * grid_.points)),
                         two_sided_);
}

void validate(const CurveEnsemble& f, const LastPassageQuery& q) {
    require(q.m >= 1 && q.m <= q.l && q.l <= f.line_count(), ErrorCode::InvalidQuery, "line indices must satisfy 1 <= m <= l <= n");
    require(q.x <= q.y && q.y < f.points(), ErrorCode::InvalidQuery, "grid indices must satisfy x <= y < points");
}

void validate(const CurveEnsemble& f, const GridPath& p) {
    require(p.end_line >= 1 && p.end_line <= p.start_line && p.start_line <= f.line_count(), ErrorCode::InvalidPath,
            "path lines out of range");
    require(p.start_index <= p.end_index && p.end_index < f.points(), ErrorCode::InvalidPath, "path grid range invalid");
    require(p.jumps.size() == p.start_line - p.end_line, ErrorCode::InvalidPath, "path needs one jump per line change");
    std::size_t prev = p.end_index;
    for (std::size_t t : p.jumps) {
        require(t <= prev && t >= p.start_index, ErrorCode::InvalidPath, "jump indices must be ordered inside [x, y]");
        prev = t;
    }
}

double path_length(const CurveEnsemble& f, const GridPath& p) {
    validate(f, p);
    std::size_t line = p.start_line;
    double acc = 0.0;
    for (std::size_t t = p.start_index + 1; t <= p.end_index; ++t) {
        while (line > p.end_line && p.jumps[line - 1 - p.end_line] < t) --line;
        acc += f(line, t) - f(line, t - 1);
    }
    return acc;
}

namespace {

// One DP sweep from (x, l) to line m, calling sink(t, D(m, t)) for t = x..y_end.
template <class Sink>
void sweep(const CurveEnsemble& f, std::size_t x, std::size_t l, std::size_t m, std::size_t y_end, Sink&& sink) {
    const std::size_t width = l - m + 1;
    std::vector<double> d(width, 0.0);  // d[j] holds line m + j
    sink(x, 0.0);
    for (std::size_t t = x + 1; t <= y_end; ++t) {
        d[width - 1] += f(l, t) - f(l, t - 1);
        for (std::size_t j = width - 1; j-- > 0;) {
            const std::size_t i = m + j;
            d[j] = std::max(d[j] + (f(i, t) - f(i, t - 1)), d[j + 1]);
        }
        sink(t, d[0]);
    }
}

}  // namespace

double last_passage(const CurveEnsemble& f, const LastPassageQuery& q) {
    validate(f, q);
    double out = 0.0;
    sweep(f, q.x, q.l, q.m, q.y, [&](std::size_t t, double v) {
        if (t == q.y) out = v;
    });
    return out;
}

double PassageProfile::at(std::size_t y) const {
    require(y >= start_index && y - start_index < values.size(), ErrorCode::InvalidQuery, "profile index out of range");
    return values[y - start_index];
}

PassageProfile last_passage_profile(const CurveEnsemble& f, std::size_t x, std::size_t l, std::size_t m) {
    validate(f, LastPassageQuery{x, x, l, m});
    PassageProfile prof;
    prof.start_index = x;
    prof.values.reserve(f.points() - x);
    sweep(f, x, l, m, f.points() - 1, [&](std::size_t, double v) { prof.values.push_back(v); });
    return prof;
}

GridPath rightmost_geodesic(const CurveEnsemble& f, const LastPassageQuery& q, TieBreak tie) {
    validate(f, q);
    const std::size_t width = q.l - q.m + 1;
    const std::size_t span = q.y - q.x + 1;
    // table[(t - x) * width + j] = D(m + j, t)
    std::vector<double> table(span * width, 0.0);
    for (std::size_t t = q.x + 1; t <= q.y; ++t) {
        const double* prev = &table[(t - 1 - q.x) * width];
        double* cur = &table[(t - q.x) * width];
        cur[width - 1] = prev[width - 1] + (f(q.l, t) - f(q.l, t - 1));
        for (std::size_t j = width - 1; j-- > 0;) {
            const std::size_t i = q.m + j;
            cur[j] = std::max(prev[j] + (f(i, t) - f(i, t - 1)), cur[j + 1]);
        }
    }
    GridPath path{q.x, q.l, q.y, q.m, std::vector<std::size_t>(q.l - q.m, q.x)};
    std::size_t j = 0;
    std::size_t t = q.y;
    while (j + 1 < width) {
        if (t == q.x) break;  // remaining jumps all sit at x
        const double* cur = &table[(t - q.x) * width];
        const double* prev = &table[(t - 1 - q.x) * width];
        const std::size_t i = q.m + j;
        const double advance = prev[j] + (f(i, t) - f(i, t - 1));
        const double drop = cur[j + 1];
        const bool take_drop = tie == TieBreak::Rightmost ? drop >= advance : drop > advance;
        if (take_drop) {
            path.jumps[j] = t;
            ++j;
        } else {
            --t;
        }
    }
    return path;
}

CompositionResidual check_metric_composition(const CurveEnsemble& f, const LastPassageQuery& q, std::size_t k,
                                             std::size_t z) {
    validate(f, q);
    require(k >= q.m && k <= q.l, ErrorCode::InvalidQuery, "split line must satisfy m <= k <= l");
    require(z >= q.x && z <= q.y, ErrorCode::InvalidQuery, "split point must satisfy x <= z <= y");
    const double whole = last_passage(f, q);
    const auto left = [&](std::size_t kk) { return last_passage(f, {q.x, z, q.l, kk}); };
    const auto right = [&](std::size_t kk) { return last_passage(f, {z, q.y, kk, q.m}); };
    CompositionResidual r;
    r.slack = whole - (left(k) + right(k));
    double best = kNegInf;
    for (std::size_t kk = q.m; kk <= q.l; ++kk) best = std::max(best, left(kk) + right(kk));
    r.gap = whole - best;
    return r;
}

CurveEnsemble brownian_ensemble(const BrownianSpec& spec, std::uint64_t seed, Execution mode) {
    require(spec.step > 0.0 && std::isfinite(spec.step), ErrorCode::InvalidParameter, "grid step must be positive");
    require(spec.length > 0.0, ErrorCode::InvalidParameter, "domain length must be positive");
    require(spec.diffusion > 0.0, ErrorCode::InvalidParameter, "diffusion must be positive");
    require(spec.lines >= 1, ErrorCode::InvalidParameter, "need at least one line");
    require(spec.start_values.empty() || spec.start_values.size() == spec.lines, ErrorCode::InvalidParameter,
            "start values must match line count");
    const auto half = static_cast<std::size_t>(std::llround(spec.length / spec.step));
    require(half >= 1, ErrorCode::InvalidParameter, "domain shorter than one grid step");
    const std::size_t zero = spec.two_sided ? half : 0;
    const UniformGrid grid{spec.origin - spec.step * static_cast<double>(zero), spec.step, zero + half + 1};
    const double sd = std::sqrt(spec.diffusion * spec.step);
    std::vector<double> values(spec.lines * grid.points);
    for_each_index(
        spec.lines,
        [&](std::size_t i) {
            RngStream rng(derive_seed(seed, i + 1));
            double* row = values.data() + i * grid.points;
            row[zero] = spec.start_values.empty() ? 0.0 : spec.start_values[i];
            for (std::size_t t = zero + 1; t < grid.points; ++t) row[t] = row[t - 1] + sd * rng.normal();
            for (std::size_t t = zero; t-- > 0;) row[t] = row[t + 1] + sd * rng.normal();
        },
        mode);
    return CurveEnsemble(grid, spec.lines, std::move(values), spec.two_sided);
}

IncrementTable::IncrementTable(const CurveEnsemble& f)
    : lines_(f.line_count()), points_(f.points()), data_(f.line_count() * f.points(), 0.0) {
    for (std::size_t i = 1; i <= lines_; ++i)
        for (std::size_t t = 1; t < points_; ++t) data_[t * lines_ + (i - 1)] = f(i, t) - f(i, t - 1);
}

IncrementTable IncrementTable::reversed() const {
    IncrementTable r(*this);
    const std::size_t last = points_ - 1;
    for (std::size_t s = 1; s < points_; ++s)
        for (std::size_t j = 0; j < lines_; ++j) r.data_[s * lines_ + j] = data_[(last - s + 1) * lines_ + (lines_ - 1 - j)];
    return r;
}

namespace {

void check_table_args(const IncrementTable& inc, std::span<const std::size_t> starts,
                      std::span<const std::size_t> targets) {
    for (std::size_t s : starts) require(s < inc.points(), ErrorCode::InvalidQuery, "start index out of range");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        require(targets[i] < inc.points(), ErrorCode::InvalidQuery, "target index out of range");
        require(i == 0 || targets[i] >= targets[i - 1], ErrorCode::InvalidQuery, "targets must be sorted");
    }
}

void table_row(const IncrementTable& inc, std::size_t x, std::span<const std::size_t> targets, double* out,
               std::vector<double>& d) {
    const std::size_t n = inc.lines();
    std::size_t next = 0;
    while (next < targets.size() && targets[next] < x) out[next++] = kNegInf;
    if (next == targets.size()) return;
    d.assign(n, 0.0);
    while (next < targets.size() && targets[next] == x) out[next++] = 0.0;
    for (std::size_t t = x + 1; next < targets.size(); ++t) {
        const double* r = inc.row(t);
        d[n - 1] += r[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) d[j] = std::max(d[j] + r[j], d[j + 1]);
        while (next < targets.size() && targets[next] == t) out[next++] = d[0];
    }
}

}  // namespace

std::vector<double> bottom_to_top_table(const IncrementTable& inc, std::span<const std::size_t> starts,
                                        std::span<const std::size_t> targets, Execution mode) {
    check_table_args(inc, starts, targets);
    std::vector<double> out(starts.size() * targets.size(), kNegInf);
    if (starts.size() > targets.size() && !targets.empty()) {
        // One sweep per target: reverse time and flip the line order, which swaps the roles of starts and targets.
        const std::size_t last = inc.points() - 1;
        const IncrementTable rev = inc.reversed();
        std::vector<std::size_t> rev_targets;
        for (std::size_t s : starts) rev_targets.push_back(last - s);
        std::sort(rev_targets.begin(), rev_targets.end());
        rev_targets.erase(std::unique(rev_targets.begin(), rev_targets.end()), rev_targets.end());
        std::vector<double> rev_out(targets.size() * rev_targets.size(), kNegInf);
        for_each_index(
            targets.size(),
            [&](std::size_t c) {
                thread_local std::vector<double> d;
                table_row(rev, last - targets[c], rev_targets, rev_out.data() + c * rev_targets.size(), d);
            },
            mode);
        for (std::size_t r = 0; r < starts.size(); ++r) {
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(rev_targets.begin(), rev_targets.end(), last - starts[r]) - rev_targets.begin());
            for (std::size_t c = 0; c < targets.size(); ++c)
                out[r * targets.size() + c] = rev_out[c * rev_targets.size() + pos];
        }
        return out;
    }
    for_each_index(
        starts.size(),
        [&](std::size_t r) {
            thread_local std::vector<double> d;
            table_row(inc, starts[r], targets, out.data() + r * targets.size(), d);
        },
        mode);
    return out;
}

std::vector<double> bottom_to_top_table_reference(const IncrementTable& inc, std::span<const std::size_t> starts,
                                                  std::span<const std::size_t> targets) {
    check_table_args(inc, starts, targets);
    const std::size_t n = inc.lines();
    std::vector<double> out(starts.size() * targets.size(), kNegInf);
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const std::size_t x = starts[r];
        const std::size_t last = targets.empty() ? x : std::max(targets.back(), x);
        // full (line, time) table, no reuse
        std::vector<std::vector<double>> dp(n + 2, std::vector<double>(last - x + 1, kNegInf));
        for (std::size_t i = 1; i <= n; ++i) dp[i][0] = 0.0;
        for (std::size_t t = x + 1; t <= last; ++t) {
            const double* row = inc.row(t);
            for (std::size_t i = n; i >= 1; --i) {
                const double advance = dp[i][t - 1 - x] + row[i - 1];
                dp[i][t - x] = i == n ? advance : std::max(advance, dp[i + 1][t - x]);
            }
        }
        for (std::size_t c = 0; c < targets.size(); ++c)
            if (targets[c] >= x) out[r * targets.size() + c] = dp[1][targets[c] - x];
    }
    return out;
}

void write_ensemble_csv(const CurveEnsemble& f, const std::string& csv_path, const std::string& sidecar_path) {
    std::ostringstream out;
    out << "line,grid_index,value\n";
    for (std::size_t i = 1; i <= f.line_count(); ++i)
        for (std::size_t t = 0; t < f.points(); ++t) out << i << ',' << t << ',' << io::format_double(f(i, t)) << '\n';
    io::write_text(csv_path, out.str());
    io::Json meta;
    meta["lines"] = f.line_count();
    meta["grid_origin"] = f.grid().origin;
    meta["grid_step"] = f.grid().step;
    meta["points"] = f.points();
    meta["two_sided"] = f.two_sided();
    io::write_json(sidecar_path, meta);
}

CurveEnsemble read_ensemble_csv(const std::string& csv_path, const std::string& sidecar_path) {
    const io::Json meta = io::read_json(sidecar_path);
    UniformGrid grid;
    std::size_t lines = 0;
    bool two_sided = false;
    try {
        grid = {meta.at("grid_origin").get<double>(), meta.at("grid_step").get<double>(),
                meta.at("points").get<std::size_t>()};
        lines = meta.at("lines").get<std::size_t>();
        two_sided = meta.at("two_sided").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Io, sidecar_path + ": " + e.what());
    }
    std::vector<double> values(lines * grid.points, 0.0);
    std::vector<char> seen(values.size(), 0);
    std::istringstream in(io::read_text(csv_path));
    std::string row;
    std::getline(in, row);
    require(row == "line,grid_index,value", ErrorCode::Io, csv_path + ": unexpected header");
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        const auto c1 = row.find(',');
        const auto c2 = row.find(',', c1 + 1);
        require(c1 != std::string::npos && c2 != std::string::npos, ErrorCode::Io, csv_path + ": malformed row");
        const auto line = static_cast<std::size_t>(std::stoull(row.substr(0, c1)));
        const auto t = static_cast<std::size_t>(std::stoull(row.substr(c1 + 1, c2 - c1 - 1)));
        require(line >= 1 && line <= lines && t < grid.points, ErrorCode::Io, csv_path + ": index out of range");
        values[(line - 1) * grid.points + t] = io::parse_double(std::string_view(row).substr(c2 + 1));
        seen[(line - 1) * grid.points + t] = 1;
    }
    require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }), ErrorCode::Io,
            csv_path + ": missing entries");
    return CurveEnsemble(grid, lines, std::move(values), two_sided);
}

}  // namespace kpz::lpp
