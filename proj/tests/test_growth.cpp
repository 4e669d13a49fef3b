#include <doctest.h>

#include <cmath>

#include "kpz/error.hpp"
#include "kpz/growth.hpp"
#include "kpz/rng.hpp"
#include "kpz/stats.hpp"

using namespace kpz;
using namespace kpz::growth;

TEST_SUITE("growth") {
    TEST_CASE("random deposition basics") {
        const auto t0 = simulate_random_deposition({0, 0}, 1e-12, 3.0, 1);
        CHECK(t0.snapshots.back().heights[0] == 0);
        CHECK_THROWS_AS(simulate_random_deposition({0, 10}, 0.0 - 1.0, 1.0, 1), Error);
        CHECK_THROWS_AS(simulate_random_deposition({0, 10}, 1.0, 0.0, 1), Error);
        const auto a = simulate_random_deposition({-5, 5}, 50.0, 1.0, 9);
        const auto b = simulate_random_deposition({-5, 5}, 50.0, 1.0, 9);
        CHECK(a.snapshots.back().heights == b.snapshots.back().heights);
        CHECK(a.model == GrowthModel::RandomDeposition);
    }

    TEST_CASE("random deposition counts are Poisson(rate t)") {
        const double t = 20.0, rate = 1.5;
        const auto tr = simulate_random_deposition({0, 3999}, t, rate, 4);
        std::vector<double> h(tr.snapshots.back().heights.begin(), tr.snapshots.back().heights.end());
        CHECK(std::abs(stats::mean(h) - rate * t) < 5.0 * std::sqrt(rate * t / 4000.0));
        CHECK(std::abs(stats::variance(h) / (rate * t) - 1.0) < 0.1);
    }

    TEST_CASE("random deposition sites are uncorrelated") {
        std::vector<double> a, b;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            const auto tr = simulate_random_deposition({0, 1}, 10.0, 1.0, derive_seed(77, s));
            a.push_back(static_cast<double>(tr.snapshots.back().heights[0]));
            b.push_back(static_cast<double>(tr.snapshots.back().heights[1]));
        }
        const double r = stats::covariance(a, b) / std::sqrt(stats::variance(a) * stats::variance(b));
        CHECK(std::abs(r) < 5.0 / std::sqrt(2000.0));
    }

    TEST_CASE("random deposition snapshots") {
        const std::vector<double> snaps{1.0, 2.0, 5.0};
        const auto tr = simulate_random_deposition({0, 9}, 5.0, 1.0, 3, snaps);
        REQUIRE(tr.snapshots.size() == 3);
        CHECK_NOTHROW(tr.validate());
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(tr.snapshots[0].heights[i] <= tr.snapshots[1].heights[i]);
            CHECK(tr.snapshots[1].heights[i] <= tr.snapshots[2].heights[i]);
        }
        const std::vector<double> bad{2.0, 1.0};
        CHECK_THROWS_AS(simulate_random_deposition({0, 9}, 5.0, 1.0, 3, bad), Error);
    }

    TEST_CASE("ballistic deposition rule") {
        LatticeHeight h{{0, 4}, {0, 0, 0, 0, 0}, 0.0};
        ballistic_deposit(h, 2);
        CHECK(h.heights == std::vector<std::int64_t>{0, 0, 1, 0, 0});
        ballistic_deposit(h, 3);
        CHECK(h.heights == std::vector<std::int64_t>{0, 0, 1, 1, 0});
        ballistic_deposit(h, 4);  // sticks to its left neighbour
        CHECK(h.heights[4] == 1);
        LatticeHeight step{{0, 2}, {5, 0, 0}, 0.0};
        ballistic_deposit(step, 1);
        CHECK(step.heights[1] == 5);
        ballistic_deposit(step, 0);  // reflecting: left neighbour mirrors column 1
        CHECK(step.heights[0] == 6);
    }

    TEST_CASE("ballistic deposition on one site matches random deposition in law") {
        std::vector<double> a, b;
        for (std::uint64_t s = 0; s < 2000; ++s) {
            a.push_back(static_cast<double>(simulate_ballistic_deposition({0, 0}, 10.0, 1.0, derive_seed(1, s)).snapshots[0].heights[0]));
            b.push_back(static_cast<double>(simulate_random_deposition({0, 0}, 10.0, 1.0, derive_seed(2, s)).snapshots[0].heights[0]));
        }
        CHECK(stats::ks_two_sample(a, b) < 0.06);
        CHECK(std::abs(stats::mean(a) - 10.0) < 0.35);
    }

    TEST_CASE("corner growth starts from the wedge and keeps unit slopes") {
        const auto t0 = simulate_corner_growth(SiteWindow::symmetric(20), 0.0, 1);
        for (std::int64_t x = -20; x <= 20; ++x) CHECK(t0.snapshots[0].at(x) == std::abs(x));
        CornerOptions o;
        o.snapshot_times = {1.0, 5.0, 10.0};
        const auto tr = simulate_corner_growth(SiteWindow::symmetric(corner_window_for(10.0)), 10.0, 2, o);
        for (const auto& s : tr.snapshots) CHECK(s.has_unit_slopes());
        for (std::int64_t x = -10; x <= 10; ++x) CHECK(tr.snapshots[2].at(x) >= tr.snapshots[0].at(x));
    }

    TEST_CASE("corner growth refuses a window that is too small") {
        CHECK_THROWS_AS(simulate_corner_growth(SiteWindow::symmetric(5), 50.0, 1), Error);
        try {
            simulate_corner_growth(SiteWindow::symmetric(5), 50.0, 1);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DomainOverflow);
        }
    }

    TEST_CASE("corner growth with death stays a unit-slope path") {
        CornerOptions o;
        o.death_rate = 1.0;
        const auto tr = simulate_corner_growth(SiteWindow::symmetric(60), 20.0, 3, o);
        CHECK(tr.snapshots.back().has_unit_slopes());
    }

    TEST_CASE("tasep step data and heights") {
        const auto s = TasepState::step(SiteWindow::symmetric(10));
        CHECK(tasep_height(s, 0) == 0);
        for (std::int64_t z = -10; z <= 11; ++z) CHECK(tasep_height(s, z) == -std::abs(z));
        CHECK_THROWS_AS(tasep_height(s, 12), Error);
        const auto h = tasep_heights(s);
        for (std::int64_t z = -10; z <= 10; ++z) CHECK((h.at(z + 1) - h.at(z) == 1) == s.occupied(z));
    }

    TEST_CASE("a particle jump lowers the local maximum by two") {
        auto s = TasepState::step(SiteWindow::symmetric(10));
        const auto before = tasep_heights(s);
        s.jump(0);  // the front particle at -1 moves to 0
        const auto after = tasep_heights(s);
        CHECK(after.at(0) == before.at(0) - 2);
        for (std::int64_t z = -10; z <= 11; ++z)
            if (z != 0) CHECK(after.at(z) == before.at(z));
        CHECK(after.has_unit_slopes());
    }

    TEST_CASE("tasep exclusion and duality") {
        const auto init = TasepState::step(SiteWindow::symmetric(tasep_window_for(30.0)));
        const std::vector<double> snaps{10.0, 20.0, 30.0};
        const auto tr = simulate_tasep(init, 30.0, 5, snaps);
        for (const auto& st : tr.snapshots) {
            CHECK_NOTHROW(st.validate());
            const auto pos = st.positions();
            for (std::size_t i = 1; i < pos.size(); ++i) CHECK(pos[i] < pos[i - 1]);
            const auto h = tasep_heights(st);
            CHECK(h.has_unit_slopes());
            const auto back = tasep_from_heights(h, st.first_label(), st.left_filled());
            CHECK(std::equal(back.positions().begin(), back.positions().end(), pos.begin(), pos.end()));
        }
    }

    TEST_CASE("single particle moves by a Poisson(t) amount") {
        std::vector<double> moves;
        for (std::uint64_t s = 0; s < 3000; ++s) {
            const TasepState one(SiteWindow{0, 200}, {0});
            const auto tr = simulate_tasep(one, 7.0, derive_seed(3, s));
            moves.push_back(static_cast<double>(tr.snapshots.back().positions()[0]));
        }
        CHECK(std::abs(stats::mean(moves) - 7.0) < 5.0 * std::sqrt(7.0 / 3000.0));
        CHECK(std::abs(stats::variance(moves) / 7.0 - 1.0) < 0.1);
    }

    TEST_CASE("the rear particle never overtakes") {
        const TasepState two(SiteWindow{0, 400}, {1, 0});
        const std::vector<double> snaps{1, 2, 3, 4, 5, 10, 20, 40};
        const auto tr = simulate_tasep(two, 40.0, 8, snaps);
        for (const auto& st : tr.snapshots) CHECK(st.positions()[1] < st.positions()[0]);
    }

    TEST_CASE("kpz rescale bookkeeping") {
        GrowthTrace g;
        g.model = GrowthModel::CornerGrowth;
        LatticeHeight h{{-10, 10}, {}, 4.0};
        for (std::int64_t x = -10; x <= 10; ++x) h.heights.push_back(x * x % 7);
        g.snapshots = {h};
        // eps = 1: h_1(t, x) = h(2t, 2x) + t
        CHECK(kpz_rescale(g, {1.0}, 2.0, 3.0) == doctest::Approx(static_cast<double>(h.at(6)) + 2.0));
        CHECK(kpz_rescale(g, {1.0}, 2.0, 0.25) ==
              doctest::Approx(0.5 * static_cast<double>(h.at(0) + h.at(1)) + 2.0));
        CHECK_THROWS_AS(kpz_rescale(g, {1.0}, 2.0, 6.0), Error);
        CHECK_THROWS_AS(kpz_rescale(g, {1.0}, 1.0, 0.0), Error);
        CHECK_THROWS_AS(kpz_rescale(g, {0.0}, 2.0, 0.0), Error);
    }

    TEST_CASE("kpz rescale cancels the drift") {
        const double eps = 0.25, t = 0.5;
        const double s = 2.0 * std::pow(eps, -1.5) * t;
        GrowthTrace g;
        LatticeHeight h{{-100, 100}, std::vector<std::int64_t>(201, -static_cast<std::int64_t>(s / 2)), s};
        g.snapshots = {h};
        CHECK(kpz_rescale(g, {eps}, t, 1.0) == doctest::Approx(0.0));
    }

    TEST_CASE("kpz rescale interpolates between snapshots") {
        GrowthTrace g;
        g.snapshots = {LatticeHeight{{-2, 2}, {0, 0, 0, 0, 0}, 2.0}, LatticeHeight{{-2, 2}, {4, 4, 4, 4, 4}, 4.0}};
        CHECK(kpz_rescale(g, {1.0}, 1.5, 0.0) == doctest::Approx(2.0 + 1.5));
    }

    TEST_CASE("interface width and fluctuation exponent") {
        LatticeHeight h{{0, 3}, {1, 3, 1, 3}, 0.0};
        CHECK(interface_width(h) == doctest::Approx(1.0));
        std::vector<double> t, w12, w13;
        for (double v = 1; v <= 32; v *= 2) {
            t.push_back(v);
            w12.push_back(2 * std::sqrt(v));
            w13.push_back(2 * std::cbrt(v));
        }
        CHECK(fluctuation_exponent(t, w12).exponent == doctest::Approx(0.5));
        CHECK(fluctuation_exponent(t, w13).exponent == doctest::Approx(1.0 / 3.0));
        const std::vector<double> flat(t.size(), 2.0);
        CHECK_THROWS_AS(fluctuation_exponent(t, flat), Error);
        const std::vector<double> narrow{1, 2, 3, 4, 5};
        CHECK_THROWS_AS(fluctuation_exponent(narrow, std::span(w12).first(5)), Error);
    }

    TEST_CASE("model names") {
        for (auto m : {GrowthModel::RandomDeposition, GrowthModel::BallisticDeposition, GrowthModel::CornerGrowth,
                       GrowthModel::Tasep})
            CHECK(parse_growth_model(to_string(m)) == m);
        CHECK_THROWS_AS(parse_growth_model("eden"), Error);
    }
}
