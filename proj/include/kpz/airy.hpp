#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpz/lpp.hpp"
#include "kpz/parallel.hpp"
#include "kpz/pitman.hpp"
#include "kpz/rng.hpp"

namespace kpz::airy {

struct AiryLineSample {
    std::size_t n = 0;
    std::vector<double> y_grid;
    std::size_t line_count = 0;
    std::vector<double> values;  // line-major: values[(i - 1) * y_grid.size() + j]

    double operator()(std::size_t line, std::size_t j) const { return values[(line - 1) * y_grid.size() + j]; }
    double& at(std::size_t line, std::size_t j) { return values[(line - 1) * y_grid.size() + j]; }
    std::vector<double> line(std::size_t i) const;
    bool strictly_ordered() const;
};

enum class MelonMethod {
    // Eigenvalues of Hermitian Brownian motion: the n-melon in law, exact at the sampled times.
    Spectral,
    // Sorting-network melon of a simulated Brownian ensemble on a time grid.
    PitmanNetwork,
};

struct MelonOptions {
    MelonMethod method = MelonMethod::Spectral;
    double grid_step = 1e-3;  // PitmanNetwork only
    std::size_t lines = 0;    // lines kept; 0 keeps all n
};

// Melon time for a rescaled coordinate: 1 + 2 y n^{-1/3}
double melon_time(std::size_t n, double y);

AiryLineSample rescaled_melon(std::size_t n, std::span<const double> y_grid, std::uint64_t seed,
                              const MelonOptions& opts = {});

// A^n_i(y) = n^{1/6} ((WB^n)_i(1 + 2 y n^{-1/3}) - 2 sqrt(n) - 2 y n^{1/6}), melon read at the nearest grid time.
AiryLineSample rescale_melon(const pitman::MelonEnsemble& w, std::span<const double> y_grid, std::size_t lines = 0);

// Eigenvalues (descending) of a GUE matrix with entry variance t, via the tridiagonal model.
std::vector<double> gue_eigenvalues_tridiagonal(std::size_t n, double t, RngStream& rng);

struct SheetOptions {
    double grid_step = 1.0 / 16384.0;
    // Richardson step in sqrt(delta): 2 L_delta - L_{4 delta}, with endpoints on the coarse grid.
    bool refinement = true;
    Execution execution = Execution::Parallel;
};

struct AirySheetSample {
    double scale = 1.0;
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    std::vector<double> values;  // x-major; -inf where no path exists (x - y beyond the light cone)
    std::size_t source_n = 0;
    std::uint64_t seed = 0;

    double operator()(std::size_t i, std::size_t j) const { return values[i * y_grid.size() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * y_grid.size() + j]; }
};

// Rescaled passage values need x - y < n^{1/3} / 2 to be finite.
double light_cone(std::size_t n);

AirySheetSample airy_sheet_sample(std::size_t n, std::span<const double> x_grid, std::span<const double> y_grid,
                                  std::uint64_t seed, const SheetOptions& opts = {});

// Sheet from a given ensemble; its bottom line is line n.
AirySheetSample airy_sheet_from_ensemble(const lpp::CurveEnsemble& f, std::size_t n, std::span<const double> x_grid,
                                         std::span<const double> y_grid, const SheetOptions& opts = {});

// S_s(x, y) = s S(x / s^2, y / s^2) with the grids mapped exactly.
AirySheetSample sheet_rescale(const AirySheetSample& sheet, double s);
// Same law, evaluated on target grids by bilinear interpolation inside the sample's hull.
AirySheetSample sheet_rescale(const AirySheetSample& sheet, double s, std::span<const double> x_target,
                              std::span<const double> y_target);
double sheet_interpolate(const AirySheetSample& sheet, double x, double y);

// Q(x,z) = max_y A(x,y) + B(y,z) over the shared grid; scale r with r^3 = s^3 + t^3.
AirySheetSample sheet_compose(const AirySheetSample& a, const AirySheetSample& b, Execution mode = Execution::Parallel);
AirySheetSample sheet_compose_reference(const AirySheetSample& a, const AirySheetSample& b);

bool same_grid(std::span<const double> a, std::span<const double> b);

struct GibbsWindow {
    std::size_t k = 1;  // lines 1..k are resampled
    std::size_t a = 0;  // grid index of the left end
    std::size_t b = 0;  // grid index of the right end
};

template <class Sample>
struct GibbsResult {
    Sample sample;
    double acceptance_rate = 0.0;
    std::size_t attempts = 0;
};

inline constexpr std::size_t kDefaultRejectionBudget = 100000;

// Bridges of diffusion 2, the Airy line ensemble convention.
GibbsResult<AiryLineSample> gibbs_resample(const AiryLineSample& lines, const GibbsWindow& w, std::uint64_t seed,
                                           std::size_t max_attempts = kDefaultRejectionBudget, double diffusion = 2.0);
// Bridges of diffusion 1 for a melon of standard Brownian motions.
GibbsResult<pitman::MelonEnsemble> gibbs_resample(const pitman::MelonEnsemble& melon, const GibbsWindow& w,
                                                  std::uint64_t seed,
                                                  std::size_t max_attempts = kDefaultRejectionBudget,
                                                  double diffusion = 1.0);

// KS matrix between the laws of A_1(y_i) + y_i^2 across replicas; parabola can be switched off.
std::vector<std::vector<double>> parabolic_stationarity_check(std::span<const AiryLineSample> replicas,
                                                              bool add_parabola = true);

void write_sheet_csv(const AirySheetSample& s, const std::string& csv_path, const std::string& sidecar_path);
void write_lines_csv(const AiryLineSample& s, const std::string& csv_path);

}  // namespace kpz::airy
