#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "kpz/error.hpp"
#include "kpz/lpp.hpp"
#include "kpz/rng.hpp"
#include "kpz/stats.hpp"

using namespace kpz;
using namespace kpz::lpp;

namespace {

CurveEnsemble random_ensemble(std::uint64_t seed, std::size_t lines, std::size_t points) {
    RngStream rng(seed);
    std::vector<double> v(lines * points);
    for (auto& x : v) x = rng.normal();
    return CurveEnsemble({0.0, 1.0 / static_cast<double>(points - 1), points}, lines, std::move(v));
}

// f_1(s) = s, f_2 = 0 on [0, 1]
CurveEnsemble ramp_over_zero(std::size_t points) {
    std::vector<double> top(points), bottom(points, 0.0);
    for (std::size_t t = 0; t < points; ++t) top[t] = static_cast<double>(t) / static_cast<double>(points - 1);
    return CurveEnsemble({0.0, 1.0 / static_cast<double>(points - 1), points}, {top, bottom});
}

// Independent brute force: every non-increasing jump tuple.
double brute_force(const CurveEnsemble& f, const LastPassageQuery& q) {
    const std::size_t k = q.l - q.m;
    std::vector<std::size_t> t(k, q.x);
    double best = kNegInf;
    for (;;) {
        bool ok = true;
        for (std::size_t i = 1; i < k; ++i) ok = ok && t[i] <= t[i - 1];
        if (ok) best = std::max(best, path_length(f, GridPath{q.x, q.l, q.y, q.m, t}));
        std::size_t i = 0;
        while (i < k && t[i] == q.y) t[i++] = q.x;
        if (i == k) return best;
        ++t[i];
    }
}

}  // namespace

TEST_SUITE("lpp") {
    TEST_CASE("grid and ensemble validation") {
        CHECK_THROWS_AS(CurveEnsemble({0.0, 0.0, 5}, 1, std::vector<double>(5)), Error);
        CHECK_THROWS_AS(CurveEnsemble({0.0, 1.0, 5}, 2, std::vector<double>(5)), Error);
        CHECK_THROWS_AS(CurveEnsemble({0.0, 1.0, 2}, 1, {0.0, NAN}), Error);
        const UniformGrid g{-1.0, 0.25, 9};
        CHECK(g.back() == 1.0);
        CHECK(g.nearest(0.5) == 6);
        CHECK(g.contains(0.0));
        CHECK(g.nearest(0.1) == 4);
        CHECK_THROWS_AS(g.nearest(1.2), Error);
    }

    TEST_CASE("path length formula") {
        const auto f = ramp_over_zero(11);
        CHECK(path_length(f, GridPath{0, 2, 10, 1, {0}}) == doctest::Approx(1.0));
        CHECK(path_length(f, GridPath{0, 2, 10, 1, {5}}) == doctest::Approx(0.5));
        CHECK(path_length(f, GridPath{2, 1, 7, 1, {}}) == doctest::Approx(0.5));
        const CurveEnsemble flat({0, 1, 6}, 3, std::vector<double>(18, 4.0));
        CHECK(path_length(flat, GridPath{0, 3, 5, 1, {4, 1}}) == 0.0);
        CHECK_THROWS_AS(path_length(f, GridPath{0, 2, 10, 1, {11}}), Error);
        CHECK_THROWS_AS(path_length(flat, GridPath{0, 3, 5, 1, {1, 4}}), Error);
    }

    TEST_CASE("last passage small cases") {
        const auto f = ramp_over_zero(11);
        CHECK(last_passage(f, {0, 10, 2, 1}) == doctest::Approx(1.0));
        CHECK(last_passage(f, {0, 10, 2, 1}) == brute_force(f, {0, 10, 2, 1}));
        const auto g = random_ensemble(3, 1, 20);
        CHECK(last_passage(g, {3, 17, 1, 1}) == g(1, 17) - g(1, 3));
        CHECK_THROWS_AS(last_passage(g, {5, 4, 1, 1}), Error);
        CHECK_THROWS_AS(last_passage(g, {0, 4, 1, 2}), Error);
        CHECK_THROWS_AS(last_passage(g, {0, 20, 1, 1}), Error);
    }

    TEST_CASE("dp equals brute force bitwise") {
        for (std::uint64_t s = 0; s < 300; ++s) {
            RngStream rng(derive_seed(17, s));
            const std::size_t lines = 1 + rng.next_u64() % 3, points = 2 + rng.next_u64() % 11;
            const auto f = random_ensemble(rng.next_u64(), lines, points);
            std::size_t x = rng.next_u64() % points, y = rng.next_u64() % points;
            if (x > y) std::swap(x, y);
            std::size_t l = 1 + rng.next_u64() % lines, m = 1 + rng.next_u64() % lines;
            if (l < m) std::swap(l, m);
            CHECK(last_passage(f, {x, y, l, m}) == brute_force(f, {x, y, l, m}));
        }
    }

    TEST_CASE("pitman consistency for two lines started at zero") {
        auto f = random_ensemble(8, 2, 200);
        std::vector<std::vector<double>> lines{std::vector<double>(f.line(1).begin(), f.line(1).end()),
                                               std::vector<double>(f.line(2).begin(), f.line(2).end())};
        for (auto& l : lines) {
            const double s = l[0];
            for (auto& v : l) v -= s;
        }
        const CurveEnsemble g(f.grid(), lines);
        double gap = 0.0;
        for (std::size_t t = 0; t < 200; ++t) {
            gap = std::max(gap, g(2, t) - g(1, t));
            CHECK(last_passage(g, {0, t, 2, 1}) == doctest::Approx(g(1, t) + gap).epsilon(1e-12));
        }
    }

    TEST_CASE("profile agrees with scalar dp exactly") {
        const auto f = random_ensemble(5, 4, 300);
        const auto p = last_passage_profile(f, 10, 4, 1);
        CHECK(p.start_index == 10);
        CHECK(p.end_index() == 299);
        RngStream rng(6);
        for (int i = 0; i < 50; ++i) {
            const std::size_t y = 10 + rng.next_u64() % 290;
            CHECK(p.at(y) == last_passage(f, {10, y, 4, 1}));
        }
        for (double v : p.values) CHECK(std::isfinite(v));
        const auto single = last_passage_profile(f, 0, 2, 2);
        for (std::size_t y = 0; y < 300; ++y) CHECK(std::abs(single.at(y) - (f(2, y) - f(2, 0))) <= 1e-12);
    }

    TEST_CASE("rightmost geodesic") {
        const auto ramp = ramp_over_zero(9);
        const auto p = rightmost_geodesic(ramp, {0, 8, 2, 1});
        CHECK(p.jumps == std::vector<std::size_t>{0});
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto f = random_ensemble(derive_seed(40, s), 5, 64);
            const LastPassageQuery q{3, 60, 5, 1};
            const auto g = rightmost_geodesic(f, q);
            CHECK(path_length(f, g) == last_passage(f, q));
            CHECK(rightmost_geodesic(f, q) == g);
        }
        const auto single = random_ensemble(2, 1, 10);
        CHECK(path_length(single, rightmost_geodesic(single, {2, 8, 1, 1})) == single(1, 8) - single(1, 2));
    }

    TEST_CASE("tie breaking on a flat ensemble") {
        const CurveEnsemble flat({0, 1, 6}, 3, std::vector<double>(18, 0.0));
        CHECK(rightmost_geodesic(flat, {0, 5, 3, 1}).jumps == std::vector<std::size_t>{5, 5});
        CHECK(rightmost_geodesic(flat, {0, 5, 3, 1}, TieBreak::Leftmost).jumps == std::vector<std::size_t>{0, 0});
    }

    TEST_CASE("metric composition") {
        const auto single = random_ensemble(1, 1, 50);
        const auto r1 = check_metric_composition(single, {0, 49, 1, 1}, 1, 20);
        CHECK(std::abs(r1.slack) < 1e-12);
        CHECK(std::abs(r1.gap) < 1e-12);
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto f = random_ensemble(derive_seed(50, s), 5, 100);
            RngStream rng(s);
            const std::size_t z = rng.next_u64() % 100, k = 1 + rng.next_u64() % 5;
            const auto r = check_metric_composition(f, {0, 99, 5, 1}, k, z);
            CHECK(r.slack >= -1e-9);
            CHECK(std::abs(r.gap) <= 1e-9);
        }
        const auto f = random_ensemble(9, 4, 30);
        CHECK(check_metric_composition(f, {0, 29, 4, 1}, 4, 0).slack == doctest::Approx(0.0));
        CHECK_THROWS_AS(check_metric_composition(f, {5, 29, 4, 2}, 1, 10), Error);
        CHECK_THROWS_AS(check_metric_composition(f, {5, 29, 4, 2}, 3, 2), Error);
    }

    TEST_CASE("monotone in the endpoint for nondecreasing lines") {
        std::vector<std::vector<double>> lines(3, std::vector<double>(80));
        RngStream rng(4);
        for (auto& l : lines) {
            double acc = 0;
            for (auto& v : l) v = acc += std::abs(rng.normal());
        }
        const CurveEnsemble f({0, 1, 80}, lines);
        double prev = kNegInf;
        for (std::size_t y = 5; y < 80; ++y) {
            const double v = last_passage(f, {5, y, 3, 1});
            CHECK(v >= prev);
            prev = v;
        }
    }

    TEST_CASE("brownian ensemble") {
        BrownianSpec spec;
        spec.lines = 3;
        spec.step = 0.01;
        spec.diffusion = 2.0;
        spec.start_values = {1.0, 0.0, -1.0};
        const auto f = brownian_ensemble(spec, 3);
        CHECK(f.points() == 101);
        CHECK(f(1, 0) == 1.0);
        CHECK(f(3, 0) == -1.0);
        spec.step = 0.0;
        CHECK_THROWS_AS(brownian_ensemble(spec, 3), Error);
        spec.step = 0.1;
        spec.two_sided = true;
        const auto two = brownian_ensemble(spec, 3);
        CHECK(two.points() == 21);
        CHECK(two.grid().origin == doctest::Approx(-1.0));
        CHECK(two(2, 10) == 0.0);
        CHECK(two.two_sided());
    }

    TEST_CASE("brownian increments: variance and independence") {
        BrownianSpec spec;
        spec.lines = 2;
        spec.step = 1e-4;
        spec.diffusion = 2.0;
        const auto f = brownian_ensemble(spec, 12);
        std::vector<double> d1, d2;
        double qv = 0;
        for (std::size_t t = 1; t < f.points(); ++t) {
            d1.push_back(f(1, t) - f(1, t - 1));
            d2.push_back(f(2, t) - f(2, t - 1));
            qv += d1.back() * d1.back();
        }
        CHECK(std::abs(qv / 2.0 - 1.0) < 0.1);
        CHECK(stats::variance(d1) == doctest::Approx(2e-4).epsilon(0.05));
        const double r = stats::covariance(d1, d2) / std::sqrt(stats::variance(d1) * stats::variance(d2));
        CHECK(std::abs(r) < 5.0 / std::sqrt(1e4));
    }

    TEST_CASE("ensemble csv round trip") {
        const auto f = random_ensemble(77, 3, 17);
        const auto dir = std::filesystem::temp_directory_path() / "kpz_tests" / "ens";
        write_ensemble_csv(f, (dir / "e.csv").string(), (dir / "e.json").string());
        const auto g = read_ensemble_csv((dir / "e.csv").string(), (dir / "e.json").string());
        CHECK(g.grid() == f.grid());
        CHECK(std::equal(g.raw().begin(), g.raw().end(), f.raw().begin(), f.raw().end()));
    }

    TEST_CASE("subsample and top") {
        const auto f = random_ensemble(5, 3, 9);
        const auto s = f.subsample(4);
        CHECK(s.points() == 3);
        CHECK(s(2, 1) == f(2, 4));
        CHECK(s.grid().step == doctest::Approx(f.grid().step * 4));
        const auto t = f.top(2);
        CHECK(t.line_count() == 2);
        CHECK(t(2, 8) == f(2, 8));
    }
}
