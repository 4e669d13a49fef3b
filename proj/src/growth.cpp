#include "kpz/growth.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "kpz/error.hpp"
#include "kpz/io.hpp"
#include "kpz/rng.hpp"
#include "kpz/stats.hpp"

namespace kpz::growth {

void SiteWindow::validate() const {
    require(x_min <= x_max, ErrorCode::InvalidParameter, "site window is empty");
}

std::int64_t LatticeHeight::at(std::int64_t x) const {
    if (!sites.contains(x)) fail(ErrorCode::OutOfWindow, "site " + std::to_string(x) + " outside the height window");
    return heights[static_cast<std::size_t>(x - sites.x_min)];
}

bool LatticeHeight::has_unit_slopes() const noexcept {
    for (std::size_t i = 1; i < heights.size(); ++i)
        if (std::abs(heights[i] - heights[i - 1]) != 1) return false;
    return true;
}

std::string to_string(GrowthModel m) {
    switch (m) {
    case GrowthModel::RandomDeposition: return "random-deposition";
    case GrowthModel::BallisticDeposition: return "ballistic-deposition";
    case GrowthModel::CornerGrowth: return "corner-growth";
    case GrowthModel::Tasep: return "tasep";
    }
    return "unknown";
}

GrowthModel parse_growth_model(const std::string& name) {
    for (auto m : {GrowthModel::RandomDeposition, GrowthModel::BallisticDeposition, GrowthModel::CornerGrowth,
                   GrowthModel::Tasep})
        if (to_string(m) == name) return m;
    if (name == "random") return GrowthModel::RandomDeposition;
    if (name == "ballistic") return GrowthModel::BallisticDeposition;
    if (name == "corner") return GrowthModel::CornerGrowth;
    fail(ErrorCode::UnknownTarget, "unknown growth model '" + name + "'");
}

void GrowthTrace::validate() const {
    for (std::size_t i = 1; i < snapshots.size(); ++i)
        require(snapshots[i].time > snapshots[i - 1].time, ErrorCode::InvalidParameter,
                "snapshot times must be strictly increasing");
}

const LatticeHeight& GrowthTrace::at_time(double t) const {
    for (const auto& s : snapshots)
        if (std::abs(s.time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
    fail(ErrorCode::OutOfWindow, "no snapshot at time " + io::format_double(t));
}

namespace {

std::vector<double> snapshot_list(double t_end, std::span<const double> requested) {
    require(t_end >= 0.0 && std::isfinite(t_end), ErrorCode::InvalidParameter, "t_end must be finite and nonnegative");
    if (requested.empty()) return {t_end};
    std::vector<double> out(requested.begin(), requested.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        require(out[i] >= 0.0 && out[i] <= t_end, ErrorCode::InvalidParameter, "snapshot time outside [0, t_end]");
        require(i == 0 || out[i] > out[i - 1], ErrorCode::InvalidParameter, "snapshot times must increase");
    }
    return out;
}

void check_rate_params(SiteWindow w, double t_end, double rate) {
    w.validate();
    require(t_end > 0.0 && std::isfinite(t_end), ErrorCode::InvalidParameter, "t_end must be positive");
    require(rate > 0.0 && std::isfinite(rate), ErrorCode::InvalidParameter, "rate must be positive");
}

struct Clock {
    double time;
    std::size_t site;
    std::uint64_t version;
    bool operator>(const Clock& o) const noexcept {
        return time != o.time ? time > o.time : site > o.site;
    }
};

using ClockQueue = std::priority_queue<Clock, std::vector<Clock>, std::greater<>>;

}  // namespace

GrowthTrace simulate_random_deposition(SiteWindow window, double t_end, double rate, std::uint64_t seed,
                                       std::span<const double> snapshot_times) {
    check_rate_params(window, t_end, rate);
    const auto times = snapshot_list(t_end, snapshot_times);
    GrowthTrace trace{GrowthModel::RandomDeposition, seed, {}};
    for (double t : times) trace.snapshots.push_back({window, std::vector<std::int64_t>(window.size(), 0), t});
    for (std::size_t s = 0; s < window.size(); ++s) {
        RngStream rng(derive_seed(seed, s));
        double clock = rng.exponential(rate);
        std::int64_t count = 0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            while (clock <= times[k]) {
                ++count;
                clock += rng.exponential(rate);
            }
            trace.snapshots[k].heights[s] = count;
        }
    }
    return trace;
}

void ballistic_deposit(LatticeHeight& h, std::int64_t x) {
    const std::size_t i = static_cast<std::size_t>(x - h.sites.x_min);
    require(h.sites.contains(x), ErrorCode::OutOfWindow, "deposition column outside the window");
    const std::size_t n = h.heights.size();
    const auto neighbour = [&](std::ptrdiff_t j) -> std::int64_t {
        if (j < 0) j = n > 1 ? 1 : 0;
        if (j >= static_cast<std::ptrdiff_t>(n)) j = n > 1 ? static_cast<std::ptrdiff_t>(n) - 2 : 0;
        return h.heights[static_cast<std::size_t>(j)];
    };
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const std::int64_t left = n > 1 ? neighbour(ii - 1) : h.heights[i];
    const std::int64_t right = n > 1 ? neighbour(ii + 1) : h.heights[i];
    h.heights[i] = std::max({left, h.heights[i] + 1, right});
}

GrowthTrace simulate_ballistic_deposition(SiteWindow window, double t_end, double rate, std::uint64_t seed,
                                          std::span<const double> snapshot_times) {
    check_rate_params(window, t_end, rate);
    const auto times = snapshot_list(t_end, snapshot_times);
    GrowthTrace trace{GrowthModel::BallisticDeposition, seed, {}};
    LatticeHeight h{window, std::vector<std::int64_t>(window.size(), 0), 0.0};
    RngStream rng(seed);
    ClockQueue queue;
    for (std::size_t s = 0; s < window.size(); ++s) queue.push({rng.exponential(rate), s, 0});
    std::size_t next_snap = 0;
    while (next_snap < times.size()) {
        const Clock c = queue.top();
        while (next_snap < times.size() && times[next_snap] < c.time) {
            h.time = times[next_snap++];
            trace.snapshots.push_back(h);
        }
        if (next_snap == times.size()) break;
        queue.pop();
        ballistic_deposit(h, window.x_min + static_cast<std::int64_t>(c.site));
        queue.push({c.time + rng.exponential(rate), c.site, 0});
    }
    return trace;
}

std::int64_t corner_window_for(double t) {
    return static_cast<std::int64_t>(std::ceil(t + 8.0 * std::sqrt(t) + 10.0));
}

GrowthTrace simulate_corner_growth(SiteWindow window, double t_end, std::uint64_t seed, const CornerOptions& opts) {
    window.validate();
    require(window.x_min < 0 && window.x_max > 0, ErrorCode::InvalidParameter, "corner window must straddle 0");
    require(opts.death_rate >= 0.0, ErrorCode::InvalidParameter, "death rate must be nonnegative");
    const auto times = snapshot_list(t_end, opts.snapshot_times);
    GrowthTrace trace{GrowthModel::CornerGrowth, seed, {}};
    LatticeHeight h{window, {}, 0.0};
    for (std::int64_t x = window.x_min; x <= window.x_max; ++x) h.heights.push_back(std::abs(x));
    const std::size_t n = window.size();
    RngStream rng(seed);
    ClockQueue queue;
    std::vector<std::uint64_t> version(n, 0);
    // +2 for a local minimum, -2 for a local maximum, 0 otherwise
    const auto move_of = [&](std::size_t i) -> int {
        if (i == 0 || i + 1 == n) return 0;
        const auto c = h.heights[i];
        if (h.heights[i - 1] > c && h.heights[i + 1] > c) return 2;
        if (opts.death_rate > 0.0 && h.heights[i - 1] < c && h.heights[i + 1] < c) return -2;
        return 0;
    };
    const auto reschedule = [&](std::size_t i, double now) {
        ++version[i];
        const int mv = move_of(i);
        if (mv == 0) return;
        queue.push({now + rng.exponential(mv > 0 ? 1.0 : opts.death_rate), i, version[i]});
    };
    for (std::size_t i = 0; i < n; ++i) reschedule(i, 0.0);
    std::size_t next_snap = 0;
    while (next_snap < times.size()) {
        while (!queue.empty() && queue.top().version != version[queue.top().site]) queue.pop();
        const double next_time = queue.empty() ? INFINITY : queue.top().time;
        while (next_snap < times.size() && times[next_snap] < next_time) {
            h.time = times[next_snap++];
            trace.snapshots.push_back(h);
        }
        if (next_snap == times.size()) break;
        const Clock c = queue.top();
        queue.pop();
        if (c.site <= 1 || c.site + 2 >= n)
            fail(ErrorCode::DomainOverflow, "corner growth reached the window edge; widen the window");
        h.heights[c.site] += move_of(c.site);
        for (std::size_t j = c.site - 1; j <= c.site + 1; ++j) reschedule(j, c.time);
    }
    return trace;
}

TasepState::TasepState(SiteWindow window, std::vector<std::int64_t> positions, std::int64_t first_label,
                       bool left_filled, double time)
    : window_(window), positions_(std::move(positions)), first_label_(first_label), left_filled_(left_filled),
      time_(time) {
    validate();
    if (left_filled_ || (!positions_.empty() && positions_.back() <= -1)) reference_ = inverse(-1);
}

TasepState TasepState::step(SiteWindow window) {
    window.validate();
    require(window.x_min <= -1 && window.x_max >= 0, ErrorCode::InvalidParameter, "step data needs sites -1 and 0");
    std::vector<std::int64_t> pos;
    for (std::int64_t x = -1; x >= window.x_min; --x) pos.push_back(x);
    return TasepState(window, std::move(pos), 1, true, 0.0);
}

void TasepState::validate() const {
    window_.validate();
    for (std::size_t j = 0; j < positions_.size(); ++j) {
        require(window_.contains(positions_[j]), ErrorCode::InvalidParameter, "particle outside the window");
        require(j == 0 || positions_[j] < positions_[j - 1], ErrorCode::InvalidParameter,
                "positions must strictly decrease with label");
    }
}

bool TasepState::occupied(std::int64_t z) const {
    if (z < window_.x_min) return left_filled_;
    if (z > window_.x_max) return false;
    return std::binary_search(positions_.begin(), positions_.end(), z, std::greater<>());
}

std::int64_t TasepState::position(std::int64_t label) const {
    const std::int64_t j = label - first_label_;
    const auto n = static_cast<std::int64_t>(positions_.size());
    if (j >= 0 && j < n) return positions_[static_cast<std::size_t>(j)];
    if (j >= n && left_filled_) return window_.x_min - 1 - (j - n);
    fail(ErrorCode::OutOfWindow, "particle label " + std::to_string(label) + " is not tracked");
}

std::int64_t TasepState::inverse(std::int64_t u) const {
    const auto it = std::lower_bound(positions_.begin(), positions_.end(), u, std::greater<>());
    const auto n = static_cast<std::int64_t>(positions_.size());
    if (it != positions_.end()) return first_label_ + (it - positions_.begin());
    if (!left_filled_) fail(ErrorCode::OutOfWindow, "no particle at or left of " + std::to_string(u));
    if (u >= window_.x_min - 1) return first_label_ + n;
    return first_label_ + n + (window_.x_min - 1 - u);
}

void TasepState::jump(std::size_t index) {
    require(index < positions_.size(), ErrorCode::InvalidParameter, "particle index out of range");
    const std::int64_t target = positions_[index] + 1;
    require(!occupied(target), ErrorCode::InvalidParameter, "jump target occupied");
    if (target > window_.x_max) fail(ErrorCode::DomainOverflow, "TASEP particle left the window");
    if (left_filled_ && index + 1 == positions_.size() && positions_[index] == window_.x_min)
        fail(ErrorCode::DomainOverflow, "TASEP reservoir became active at the left edge");
    positions_[index] = target;
}

std::int64_t tasep_window_for(double t) { return corner_window_for(t); }

TasepTrace simulate_tasep(const TasepState& initial, double t_end, std::uint64_t seed,
                          std::span<const double> snapshot_times) {
    initial.validate();
    const auto times = snapshot_list(t_end, snapshot_times);
    if (initial.left_filled() && !initial.occupied(initial.window().x_min))
        fail(ErrorCode::DomainOverflow, "left reservoir borders an empty site");
    TasepTrace trace{seed, {}};
    TasepState state = initial;
    const std::size_t n = state.positions().size();
    RngStream rng(seed);
    ClockQueue queue;
    std::vector<std::uint64_t> version(n, 0);
    std::vector<char> armed(n, 0);
    const auto free_ahead = [&](std::size_t j) {
        const std::int64_t target = state.positions()[j] + 1;
        return j == 0 ? true : state.positions()[j - 1] != target;
    };
    const auto refresh = [&](std::size_t j, double now) {
        const bool can = free_ahead(j);
        if (can && !armed[j]) {
            armed[j] = 1;
            queue.push({now + rng.exponential(1.0), j, ++version[j]});
        } else if (!can && armed[j]) {
            armed[j] = 0;
            ++version[j];
        }
    };
    for (std::size_t j = 0; j < n; ++j) refresh(j, initial.time());
    std::size_t next_snap = 0;
    while (next_snap < times.size()) {
        while (!queue.empty() && queue.top().version != version[queue.top().site]) queue.pop();
        const double next_time = queue.empty() ? INFINITY : queue.top().time;
        while (next_snap < times.size() && times[next_snap] < next_time) {
            state.set_time(times[next_snap++]);
            trace.snapshots.push_back(state);
        }
        if (next_snap == times.size()) break;
        const Clock c = queue.top();
        queue.pop();
        armed[c.site] = 0;
        state.jump(c.site);
        refresh(c.site, c.time);
        if (c.site + 1 < n) refresh(c.site + 1, c.time);
    }
    return trace;
}

std::int64_t tasep_height(const TasepState& state, std::int64_t z) {
    const auto& w = state.window();
    if (z < w.x_min || z > w.x_max + 1)
        fail(ErrorCode::OutOfWindow, "height site " + std::to_string(z) + " outside the covered window");
    const auto ref = state.reference_inverse();
    if (!ref) fail(ErrorCode::OutOfWindow, "initial configuration has no particle at or left of -1");
    return -2 * (state.inverse(z - 1) - *ref) - z;
}

LatticeHeight tasep_heights(const TasepState& state) {
    const auto& w = state.window();
    LatticeHeight h{{w.x_min, w.x_max + 1}, {}, state.time()};
    h.heights.reserve(h.sites.size());
    for (std::int64_t z = w.x_min; z <= w.x_max + 1; ++z) h.heights.push_back(tasep_height(state, z));
    return h;
}

GrowthTrace to_growth_trace(const TasepTrace& trace) {
    GrowthTrace out{GrowthModel::Tasep, trace.rng_seed, {}};
    for (const auto& s : trace.snapshots) out.snapshots.push_back(tasep_heights(s));
    return out;
}

std::vector<bool> occupancy_from_heights(const LatticeHeight& h) {
    require(h.has_unit_slopes(), ErrorCode::InvalidParameter, "heights must have unit slopes");
    std::vector<bool> occ;
    for (std::size_t i = 1; i < h.heights.size(); ++i) occ.push_back(h.heights[i] - h.heights[i - 1] == 1);
    return occ;
}

TasepState tasep_from_heights(const LatticeHeight& h, std::int64_t first_label, bool left_filled) {
    const auto occ = occupancy_from_heights(h);
    require(!occ.empty(), ErrorCode::InvalidParameter, "need at least two height sites");
    const SiteWindow w{h.sites.x_min, h.sites.x_max - 1};
    std::vector<std::int64_t> pos;
    for (std::size_t i = occ.size(); i-- > 0;)
        if (occ[i]) pos.push_back(w.x_min + static_cast<std::int64_t>(i));
    return TasepState(w, std::move(pos), first_label, left_filled, h.time);
}

void ScalingParams::validate() const {
    require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::InvalidParameter, "epsilon must be positive");
}

namespace {

double interpolate_sites(const LatticeHeight& h, double x) {
    const double lo = std::floor(x);
    const auto ilo = static_cast<std::int64_t>(lo);
    if (!h.sites.contains(ilo) || (x > lo && !h.sites.contains(ilo + 1)))
        fail(ErrorCode::OutOfWindow, "rescaled site " + io::format_double(x) + " outside the simulated window");
    const double w = x - lo;
    const double a = static_cast<double>(h.at(ilo));
    return w == 0.0 ? a : a * (1.0 - w) + static_cast<double>(h.at(ilo + 1)) * w;
}

}  // namespace

double kpz_rescale(const GrowthTrace& trace, const ScalingParams& p, double t, double x) {
    p.validate();
    require(!trace.snapshots.empty(), ErrorCode::OutOfWindow, "trace has no snapshots");
    const double e32 = std::pow(p.epsilon, -1.5);
    const double T = 2.0 * e32 * t;
    const double X = 2.0 * x / p.epsilon;
    const auto& snaps = trace.snapshots;
    const double tol = 1e-9 * std::max(1.0, std::abs(T));
    double h = 0.0;
    if (T < snaps.front().time - tol || T > snaps.back().time + tol)
        fail(ErrorCode::OutOfWindow, "rescaled time " + io::format_double(T) + " outside the simulated range");
    std::size_t k = 0;
    while (k + 1 < snaps.size() && snaps[k + 1].time <= T + tol) ++k;
    if (std::abs(snaps[k].time - T) <= tol || k + 1 == snaps.size()) {
        h = interpolate_sites(snaps[k], X);
    } else {
        const double w = (T - snaps[k].time) / (snaps[k + 1].time - snaps[k].time);
        h = interpolate_sites(snaps[k], X) * (1.0 - w) + interpolate_sites(snaps[k + 1], X) * w;
    }
    return std::sqrt(p.epsilon) * (h + e32 * t);
}

double interface_width(const LatticeHeight& h) {
    require(!h.heights.empty(), ErrorCode::InvalidParameter, "empty height profile");
    double m = 0.0;
    for (auto v : h.heights) m += static_cast<double>(v);
    m /= static_cast<double>(h.heights.size());
    double s = 0.0;
    for (auto v : h.heights) s += (static_cast<double>(v) - m) * (static_cast<double>(v) - m);
    return std::sqrt(s / static_cast<double>(h.heights.size()));
}

ExponentFit fluctuation_exponent(std::span<const double> times, std::span<const double> widths) {
    require(times.size() == widths.size(), ErrorCode::InvalidParameter, "times and widths differ in length");
    std::set<double> distinct(times.begin(), times.end());
    require(distinct.size() >= 5, ErrorCode::FitFailure, "need at least 5 distinct times");
    require(*distinct.begin() > 0.0 && *distinct.rbegin() >= 10.0 * *distinct.begin(), ErrorCode::FitFailure,
            "times must span at least one decade");
    for (double w : widths) require(w > 0.0 && std::isfinite(w), ErrorCode::FitFailure, "widths must be positive");
    const bool constant = std::all_of(widths.begin(), widths.end(), [&](double w) { return w == widths[0]; });
    require(!constant, ErrorCode::FitFailure, "widths are constant; no growth to fit");
    const auto fit = stats::loglog_fit(times, widths);
    return {fit.slope, fit.stderr_slope, fit.intercept};
}

}  // namespace kpz::growth
