#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "kpz/error.hpp"
#include "kpz/io.hpp"
#include "kpz/landscape.hpp"
#include "kpz/lpp.hpp"
#include "kpz/stats.hpp"

using namespace kpz;
using namespace kpz::landscape;

namespace {

airy::SheetOptions small_sheet() {
    airy::SheetOptions o;
    o.grid_step = 1.0 / 1024.0;
    o.execution = Execution::Serial;
    return o;
}

airy::AirySheetSample synthetic(std::vector<double> xs, std::vector<double> ys, std::uint64_t seed) {
    airy::AirySheetSample s;
    s.x_grid = std::move(xs);
    s.y_grid = std::move(ys);
    RngStream rng(seed);
    for (double x : s.x_grid)
        for (double y : s.y_grid) s.values.push_back(-(x - y) * (x - y) + rng.normal());
    return s;
}

// Brownian path of diffusion `d` on a uniform grid, zero at index 0
std::vector<double> brownian_path(std::span<const double> grid, double d, RngStream& rng) {
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) v[i] = v[i - 1] + std::sqrt(d * (grid[i] - grid[i - 1])) * rng.normal();
    return v;
}

std::vector<double> column(const airy::AirySheetSample& s, std::size_t i) {
    std::vector<double> r;
    for (std::size_t j = 0; j < s.y_grid.size(); ++j) r.push_back(s(i, j));
    return r;
}

}  // namespace

TEST_SUITE("landscape") {
    TEST_CASE("uniform grid") {
        const auto g = uniform_grid(1.0, 0.25);
        REQUIRE(g.size() == 9);
        CHECK(g.front() == -1.0);
        CHECK(g[4] == 0.0);
        CHECK_THROWS_AS(uniform_grid(1.0, 0.3), Error);
        CHECK_THROWS_AS(uniform_grid(1.0, 0.0), Error);
    }

    TEST_CASE("level 0 is a single scale-1 sheet") {
        const auto l = build_dyadic(0, 1.0, 0.25, 8, 11, small_sheet());
        REQUIRE(l.slots() == 1);
        CHECK(l.sheets[0].scale == doctest::Approx(1.0));
        CHECK(l.slot_scale() == 1.0);
        const auto direct = airy::airy_sheet_sample(8, l.spatial_grid, l.spatial_grid, l.seeds[0], small_sheet());
        CHECK(direct.values == l.sheets[0].values);
    }

    TEST_CASE("level 1 slots") {
        const auto l = build_dyadic(1, 1.0, 0.25, 8, 11, small_sheet());
        REQUIRE(l.slots() == 2);
        CHECK(l.seeds[0] != l.seeds[1]);
        for (const auto& s : l.sheets) {
            CHECK(s.scale == doctest::Approx(std::pow(2.0, -1.0 / 3.0)));
            CHECK(s.x_grid == l.spatial_grid);
            CHECK(s.y_grid == l.spatial_grid);
        }
        const auto again = build_dyadic(1, 1.0, 0.25, 8, 11, small_sheet());
        for (std::size_t i = 0; i < 2; ++i) CHECK(again.sheets[i].values == l.sheets[i].values);
        CHECK_THROWS_AS(build_dyadic(1, 1.0, 0.3, 8, 11, small_sheet()), Error);
        CHECK_THROWS_AS(build_dyadic(1, 1.0, 0.25, 0, 11, small_sheet()), Error);
    }

    TEST_CASE("landscape evaluation") {
        const auto l = build_dyadic(2, 1.0, 0.25, 8, 5, small_sheet());
        const auto& g = l.spatial_grid;
        // adjacent slots are a lookup
        CHECK(landscape_eval(l, -0.5, 0.25, 0.75, 0.5) == l.sheets[1](2, 7));
        // two slots are one sup over the grid
        double best = lpp::kNegInf;
        for (std::size_t z = 0; z < g.size(); ++z) best = std::max(best, l.sheets[0](4, z) + l.sheets[1](z, 5));
        CHECK(landscape_eval(l, 0.0, 0.0, 0.25, 0.5) == best);
        // the composed sheet agrees with pointwise evaluation
        const auto whole = landscape_sheet(l, 0.0, 1.0);
        CHECK(whole.scale == doctest::Approx(1.0));
        for (std::size_t i = 0; i < g.size(); i += 2)
            for (std::size_t j = 0; j < g.size(); j += 2) {
                const double v = landscape_eval(l, g[i], 0.0, g[j], 1.0);
                if (whole(i, j) == lpp::kNegInf)
                    CHECK(v == lpp::kNegInf);
                else
                    CHECK(v == doctest::Approx(whole(i, j)));
            }
        CHECK_THROWS_AS(landscape_eval(l, 0.0, 0.1, 0.0, 1.0), Error);
        try {
            landscape_eval(l, 0.0, 0.0, 0.0, 0.3);
            FAIL("expected NonDyadicTime");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonDyadicTime);
        }
        CHECK_THROWS_AS(landscape_eval(l, 0.0, 0.5, 0.0, 0.5), Error);
        CHECK_THROWS_AS(landscape_eval(l, 0.1, 0.0, 0.0, 1.0), Error);
    }

    TEST_CASE("reverse triangle through intermediate points") {
        const auto l = build_dyadic(2, 1.0, 0.25, 8, 9, small_sheet());
        const auto& g = l.spatial_grid;
        for (double x : {-0.5, 0.0, 0.75})
            for (double y : {-0.25, 0.0, 1.0}) {
                const double whole = landscape_eval(l, x, 0.0, y, 1.0);
                for (double z : g)
                    for (double tm : {0.25, 0.5, 0.75}) {
                        const double split = landscape_eval(l, x, 0.0, z, tm) + landscape_eval(l, z, tm, y, 1.0);
                        // sums associate differently on the two sides
                        CHECK(whole >= split - 1e-12);
                    }
            }
    }

    TEST_CASE("finitary initial data") {
        const auto w = FinitaryInitial::narrow_wedge(0.5, 2.0);
        CHECK(w(0.5) == 2.0);
        CHECK_FALSE(w(0.6).has_value());
        const auto f = FinitaryInitial::flat(-1.0, 1.0, 0.5);
        CHECK(f(0.0) == 0.5);
        CHECK(f(-1.0) == 0.5);
        CHECK_FALSE(f(1.01).has_value());
        const FinitaryInitial tent({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
        CHECK(*tent(0.5) == doctest::Approx(0.5));
        CHECK(tent.upper_bound() == 1.0);
        CHECK_THROWS_AS(FinitaryInitial({}, {}), Error);
        CHECK_THROWS_AS(FinitaryInitial({0.0, 0.0}, {1.0, 1.0}), Error);
        CHECK_THROWS_AS(FinitaryInitial({0.0, 1.0}, {1.0}), Error);
        CHECK_THROWS_AS(FinitaryInitial({0.0}, {std::nan("")}), Error);
        CHECK_THROWS_AS(FinitaryInitial::flat(1.0, 1.0), Error);
    }

    TEST_CASE("finitary check") {
        CHECK(finitary_check(FinitaryInitial::flat(-3.0, 3.0, 7.0), 1.0).finitary);
        CHECK(finitary_check(FinitaryInitial::narrow_wedge(0.0), 0.5).finitary);
        const double t = 2.0;
        const auto parabola = finitary_check([t](double x) { return x * x / t; }, t);
        CHECK_FALSE(parabola.finitary);
        const auto sub = finitary_check([t](double x) { return x * x / t - std::pow(std::abs(x), 1.5); }, t);
        CHECK(sub.finitary);
        CHECK(sub.ratios.size() == sub.probe_x.size());
        CHECK_FALSE(finitary_check([](double x) { return x * x; }, 1.5).finitary);
        CHECK_THROWS_AS(finitary_check(FinitaryInitial::narrow_wedge(0.0), 0.0), Error);
    }

    TEST_CASE("theta and growth weight") {
        CHECK(theta(1.0) == 1.0);
        CHECK(theta(8.0) == doctest::Approx(2.0));
        CHECK(theta(0.5) == doctest::Approx(std::cbrt(0.5)));
        CHECK(theta(0.01) == doctest::Approx(std::pow(std::log(100.0), 4.0 / 3.0)));
        CHECK(growth_weight(0.0, 0.0, 1.0) == doctest::Approx(2.0));
        CHECK_THROWS_AS(theta(0.0), Error);
    }

    TEST_CASE("growth bound on a synthetic sheet") {
        const auto s = synthetic(uniform_grid(4.0, 0.5), uniform_grid(4.0, 0.5), 3);
        const auto r = growth_bound_check(s, 1.0);
        double c = 0.0, inner = 0.0;
        for (std::size_t i = 0; i < s.x_grid.size(); ++i)
            for (std::size_t j = 0; j < s.y_grid.size(); ++j) {
                const double x = s.x_grid[i], y = s.y_grid[j];
                const double v = std::abs(s(i, j) + (x - y) * (x - y)) / growth_weight(x, y, 1.0);
                c = std::max(c, v);
                if (std::abs(x) <= 2.0 && std::abs(y) <= 2.0) inner = std::max(inner, v);
            }
        CHECK(r.constant == doctest::Approx(c));
        CHECK(r.inner_constant == doctest::Approx(inner));
        CHECK(r.pairs == s.values.size());
        CHECK(r.stable == (c <= 2.0 * inner));
        // at the origin the bound reads |L| <= 2 C theta(1)
        const std::size_t o = 8;
        CHECK(std::abs(s(o, o)) <= 2.0 * r.constant * theta(1.0) + 1e-12);
    }

    TEST_CASE("narrow wedge at the origin gives S(0, .)") {
        const auto s = airy::airy_sheet_sample(8, uniform_grid(1.0, 0.25), uniform_grid(1.0, 0.25), 21, small_sheet());
        const auto p = kpz_fixed_point(s, FinitaryInitial::narrow_wedge(0.0), 1.0);
        CHECK(p.values == column(s, 4));
        for (double a : p.argmax) CHECK(a == 0.0);
        CHECK(p.containment_left == 0.0);
        CHECK(p.containment_right == 0.0);
    }

    TEST_CASE("flat data gives the column maximum") {
        const auto xs = uniform_grid(8.0, 0.25), ys = uniform_grid(1.0, 0.25);
        const auto s = synthetic(xs, ys, 4);
        auto colmax = [&](std::size_t j) {
            double m = lpp::kNegInf;
            for (std::size_t i = 0; i < xs.size(); ++i) m = std::max(m, s(i, j));
            return m;
        };
        const auto inside = kpz_fixed_point(s, FinitaryInitial::flat(-8.0, 8.0), 1.0);
        const auto huge = kpz_fixed_point(s, FinitaryInitial::flat(-1e6, 1e6), 1.0);
        for (std::size_t j = 0; j < ys.size(); ++j) {
            CHECK(inside.values[j] == colmax(j));
            CHECK(huge.values[j] == colmax(j));
            CHECK(huge.argmax[j] >= huge.containment_left);
            CHECK(huge.argmax[j] <= huge.containment_right);
        }
        // a support far wider than a narrow grid cannot certify the maximizer
        const auto narrow = synthetic(uniform_grid(1.0, 0.25), ys, 5);
        try {
            kpz_fixed_point(narrow, FinitaryInitial::flat(-1e6, 1e6), 1.0);
            FAIL("expected WindowTooSmall");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::WindowTooSmall);
        }
    }

    TEST_CASE("fixed point is monotone and shift covariant") {
        const auto g = uniform_grid(2.0, 0.25);
        const auto s = synthetic(g, g, 6);
        const FinitaryInitial lo({-1.0, 0.0, 1.0}, {0.0, 0.5, -0.25});
        const FinitaryInitial hi({-1.0, 0.0, 1.0}, {0.1, 0.5, 0.0});
        const FinitaryInitial up({-1.0, 0.0, 1.0}, {1.0, 1.5, 0.75});
        const auto a = kpz_fixed_point(s, lo, 1.0), b = kpz_fixed_point(s, hi, 1.0), c = kpz_fixed_point(s, up, 1.0);
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(b.values[j] >= a.values[j]);
            CHECK(c.values[j] == doctest::Approx(a.values[j] + 1.0));
            CHECK(a.argmax[j] >= a.containment_left);
            CHECK(a.argmax[j] <= a.containment_right);
        }
        const std::vector<double> ys{-0.5, 0.5};
        const auto sub = kpz_fixed_point(s, lo, 1.0, ys);
        CHECK(sub.values == std::vector<double>{a.values[6], a.values[10]});
    }

    TEST_CASE("fixed point errors") {
        const auto g = uniform_grid(1.0, 0.25);
        const auto s = synthetic(g, g, 7);
        CHECK_THROWS_AS(kpz_fixed_point(s, FinitaryInitial::narrow_wedge(0.0), 2.0), Error);
        CHECK_THROWS_AS(kpz_fixed_point(s, FinitaryInitial::narrow_wedge(0.1), 1.0), Error);
        const std::vector<double> off{0.1};
        CHECK_THROWS_AS(kpz_fixed_point(s, FinitaryInitial::narrow_wedge(0.0), 1.0, off), Error);
        CHECK_THROWS_AS(kpz_fixed_point(s, FinitaryInitial::narrow_wedge(0.0), 0.0), Error);
    }

    TEST_CASE("fixed point on a landscape uses the composed sheet") {
        const auto l = build_dyadic(1, 1.0, 0.25, 8, 13, small_sheet());
        const auto p = kpz_fixed_point(l, FinitaryInitial::narrow_wedge(0.0), 1.0);
        for (std::size_t j = 0; j < l.spatial_grid.size(); ++j)
            CHECK(p.values[j] == doctest::Approx(landscape_eval(l, 0.0, 0.0, l.spatial_grid[j], 1.0)));
    }

    TEST_CASE("weak local brownian statistic on brownian input") {
        const auto g = uniform_grid(1.0, 1.0 / 512.0);
        RngStream rng(31);
        std::vector<FixedPointProfile> ps(400);
        for (auto& p : ps) {
            p.y_grid = g;
            p.values = brownian_path(g, 2.0, rng);
            p.argmax.assign(g.size(), 0.0);
        }
        const std::vector<double> eps{1.0, 0.5, 0.25};
        const auto r = weak_local_brownian_stat(ps, eps, 0.0);
        REQUIRE(r.ks.size() == 3);
        for (double k : r.ks) CHECK(k < 0.1);
        // eps = 1 is the plain increment
        std::vector<double> inc;
        for (const auto& p : ps) inc.push_back(p.values[g.size() - 1] - p.values[512]);
        CHECK(r.mean[0].back() == doctest::Approx(stats::mean(inc)));
        CHECK(r.variance[0].back() == doctest::Approx(stats::variance(inc)));
        for (double v : r.variance[2]) CHECK(v > 0.0);
        const std::vector<double> tiny{0.05};
        CHECK_THROWS_AS(weak_local_brownian_stat(ps, tiny, 0.0), Error);
        CHECK_THROWS_AS(weak_local_brownian_stat(ps, eps, 0.5), Error);
    }

    TEST_CASE("hoelder estimate") {
        const auto g = uniform_grid(1.0, 1.0 / 256.0);
        std::vector<double> affine;
        for (double y : g) affine.push_back(3.0 * y + 1.0);
        const auto a = holder_norm_estimate(g, affine, 0.4, -1.0, 1.0);
        CHECK(a.lag_exponent == doctest::Approx(1.0));
        CHECK(a.norm == doctest::Approx(3.0 * std::pow(2.0, 0.6)));
        RngStream rng(8);
        const auto fine = uniform_grid(1.0, 1e-3);
        std::vector<double> exps;
        for (int rep = 0; rep < 20; ++rep) {
            const auto b = brownian_path(fine, 2.0, rng);
            const std::vector<std::size_t> lags{2, 4, 8, 16, 32};
            exps.push_back(holder_norm_estimate(fine, b, 0.4, -1.0, 1.0, lags).lag_exponent);
        }
        CHECK(std::abs(stats::mean(exps) - 0.5) < 0.07);
        CHECK_THROWS_AS(holder_norm_estimate(g, affine, 0.6, -1.0, 1.0), Error);
        CHECK_THROWS_AS(holder_norm_estimate(g, affine, 0.4, -2.0, 1.0), Error);
        const std::vector<std::size_t> too_long{1000};
        CHECK_THROWS_AS(holder_norm_estimate(g, affine, 0.4, -1.0, 1.0, too_long), Error);
    }

    TEST_CASE("quadratic variation") {
        RngStream rng(12);
        std::vector<double> g;
        for (int i = 0; i <= 10000; ++i) g.push_back(i * 1e-4);
        const auto b = brownian_path(g, 2.0, rng);
        CHECK(std::abs(quadratic_variation(g, b, 0.0, 1.0) - 2.0) < 0.3);
        std::vector<double> affine;
        for (double y : g) affine.push_back(5.0 * y);
        CHECK(quadratic_variation(g, affine, 0.0, 1.0) == doctest::Approx(25.0 * 1e-4));
        CHECK_THROWS_AS(quadratic_variation(g, b, 0.0, 0.005), Error);
        CHECK_THROWS_AS(quadratic_variation(g, b, 0.5, 0.4), Error);
    }

    TEST_CASE("profile and landscape exports") {
        const auto dir = std::filesystem::temp_directory_path() / "kpz_landscape_test";
        std::filesystem::create_directories(dir);
        const auto l = build_dyadic(1, 1.0, 0.5, 8, 2, small_sheet());
        const auto p = kpz_fixed_point(l, FinitaryInitial::flat(-1.0, 1.0), 1.0);
        write_profile_csv(p, (dir / "p.csv").string());
        const auto text = io::read_text((dir / "p.csv").string());
        CHECK(text.rfind("y,h,argmax_x\n", 0) == 0);
        write_landscape_manifest(l, (dir / "l.json").string());
        const auto doc = io::Json::parse(io::read_text((dir / "l.json").string()));
        CHECK(doc["level"] == 1);
        CHECK(doc["slots"] == 2);
        std::filesystem::remove_all(dir);
    }
}
