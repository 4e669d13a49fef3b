#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kpz::growth {

struct SiteWindow {
    std::int64_t x_min = 0;
    std::int64_t x_max = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(x_max - x_min + 1); }
    bool contains(std::int64_t x) const noexcept { return x >= x_min && x <= x_max; }
    void validate() const;
    static SiteWindow symmetric(std::int64_t half_width) { return {-half_width, half_width}; }
};

struct LatticeHeight {
    SiteWindow sites;
    std::vector<std::int64_t> heights;
    double time = 0.0;

    std::int64_t at(std::int64_t x) const;
    // |h(z+1) - h(z)| == 1 everywhere
    bool has_unit_slopes() const noexcept;
};

enum class GrowthModel { RandomDeposition, BallisticDeposition, CornerGrowth, Tasep };

std::string to_string(GrowthModel m);
GrowthModel parse_growth_model(const std::string& name);

struct GrowthTrace {
    GrowthModel model = GrowthModel::RandomDeposition;
    std::uint64_t rng_seed = 0;
    std::vector<LatticeHeight> snapshots;

    void validate() const;
    const LatticeHeight& at_time(double t) const;
};

// Snapshot times default to {t_end}. Explicit lists must be strictly increasing inside [0, t_end].
GrowthTrace simulate_random_deposition(SiteWindow window, double t_end, double rate, std::uint64_t seed,
                                       std::span<const double> snapshot_times = {});
GrowthTrace simulate_ballistic_deposition(SiteWindow window, double t_end, double rate, std::uint64_t seed,
                                          std::span<const double> snapshot_times = {});

// Applies one ballistic deposition at column x (reflecting neighbours at the edges).
void ballistic_deposit(LatticeHeight& h, std::int64_t x);

struct CornerOptions {
    double death_rate = 0.0;
    std::vector<double> snapshot_times;
};

GrowthTrace simulate_corner_growth(SiteWindow window, double t_end, std::uint64_t seed, const CornerOptions& opts = {});

// Half-width comfortably containing the active region of the wedge up to t.
std::int64_t corner_window_for(double t);

// Particles are tracked by label; positions strictly decrease with label.
// With left_filled, every site left of the window is taken by particles whose
// labels continue the tracked sequence.
class TasepState {
public:
    TasepState(SiteWindow window, std::vector<std::int64_t> positions, std::int64_t first_label = 1,
               bool left_filled = false, double time = 0.0);

    // X_0(k) = -k for k >= 1, tracked down to the window's left edge.
    static TasepState step(SiteWindow window);

    const SiteWindow& window() const noexcept { return window_; }
    std::span<const std::int64_t> positions() const noexcept { return positions_; }
    std::int64_t first_label() const noexcept { return first_label_; }
    bool left_filled() const noexcept { return left_filled_; }
    double time() const noexcept { return time_; }
    std::optional<std::int64_t> reference_inverse() const noexcept { return reference_; }

    bool occupied(std::int64_t z) const;
    std::int64_t position(std::int64_t label) const;
    // X^{-1}(u) = min{k : X(k) <= u}
    std::int64_t inverse(std::int64_t u) const;
    void validate() const;

    // Moves the particle with the given label one step right; throws when blocked.
    void jump(std::size_t index);
    void set_time(double t) noexcept { time_ = t; }
    void set_reference(std::optional<std::int64_t> r) noexcept { reference_ = r; }

    friend bool operator==(const TasepState& a, const TasepState& b) {
        return a.window_.x_min == b.window_.x_min && a.window_.x_max == b.window_.x_max &&
               a.positions_ == b.positions_ && a.first_label_ == b.first_label_ && a.left_filled_ == b.left_filled_;
    }

private:
    SiteWindow window_;
    std::vector<std::int64_t> positions_;
    std::int64_t first_label_;
    bool left_filled_;
    double time_;
    std::optional<std::int64_t> reference_;  // X_0^{-1}(-1), fixed at construction
};

struct TasepTrace {
    std::uint64_t rng_seed = 0;
    std::vector<TasepState> snapshots;
};

TasepTrace simulate_tasep(const TasepState& initial, double t_end, std::uint64_t seed,
                          std::span<const double> snapshot_times = {});

// h(t,z) = -2 (X_t^{-1}(z-1) - X_0^{-1}(-1)) - z
std::int64_t tasep_height(const TasepState& state, std::int64_t z);
// Heights on [x_min, x_max + 1].
LatticeHeight tasep_heights(const TasepState& state);
GrowthTrace to_growth_trace(const TasepTrace& trace);

// Occupancy from a unit-slope height profile: site z occupied iff h(z+1) - h(z) = +1.
std::vector<bool> occupancy_from_heights(const LatticeHeight& h);
// Rebuilds the particle configuration on heights.sites minus its last site.
TasepState tasep_from_heights(const LatticeHeight& h, std::int64_t first_label, bool left_filled);

std::int64_t tasep_window_for(double t);

struct ScalingParams {
    double epsilon = 1.0;
    static constexpr double fluctuation_exponent = 0.5;
    static constexpr double dynamic_exponent = 1.5;
    void validate() const;
};

// h_eps(t,x) = eps^{1/2} (h(2 eps^{-3/2} t, 2 eps^{-1} x) + eps^{-3/2} t), linear in between sites and snapshots.
double kpz_rescale(const GrowthTrace& trace, const ScalingParams& p, double t, double x);

// Standard deviation of the heights across the window.
double interface_width(const LatticeHeight& h);

struct ExponentFit {
    double exponent = 0.0;
    double stderr_exponent = 0.0;
    double intercept = 0.0;
};

ExponentFit fluctuation_exponent(std::span<const double> times, std::span<const double> widths);

}  // namespace kpz::growth
