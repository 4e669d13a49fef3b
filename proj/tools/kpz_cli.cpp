#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "kpz/airy.hpp"
#include "kpz/error.hpp"
#include "kpz/experiment.hpp"
#include "kpz/growth.hpp"
#include "kpz/io.hpp"
#include "kpz/landscape.hpp"
#include "kpz/lpp.hpp"
#include "kpz/pitman.hpp"
#include "kpz/stats.hpp"

namespace fs = std::filesystem;
using namespace kpz;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::size_t replicas = 0;
    std::string out = "runs";
    std::string config;
    bool serial = false;
};

Execution execution(const Globals& g) { return g.serial ? Execution::Serial : Execution::Parallel; }

// Writes report.json for an exploratory run: named statistics, no thresholds.
void write_report(const fs::path& dir, const std::string& name, const Globals& g,
                  const std::vector<std::pair<std::string, double>>& stats, const std::vector<std::string>& artifacts) {
    experiment::RunReport r;
    r.experiment = name;
    r.seed = g.seed;
    for (const auto& [k, v] : stats) r.criteria.push_back({k, v, NAN, experiment::Comparison::AtMost, true, true});
    r.artifacts = artifacts;
    io::write_json((dir / "report.json").string(), r.to_json());
}

void print_report(const experiment::RunReport& r) {
    for (const auto& c : r.criteria) {
        std::printf("  %-4s %-32s value=%-14.6g threshold=%.6g%s\n", c.optional && !c.pass ? "WARN" : c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.value, c.threshold, c.optional ? " (optional)" : "");
    }
}

int run_simulate(const Globals& g, const std::string& model_name, double t_end, std::int64_t half, double rate,
                 const std::vector<double>& snapshots) {
    const auto model = growth::parse_growth_model(model_name);
    const fs::path dir = fs::path(g.out) / ("simulate-" + growth::to_string(model));
    growth::GrowthTrace trace;
    switch (model) {
        case growth::GrowthModel::RandomDeposition:
            trace = growth::simulate_random_deposition(growth::SiteWindow::symmetric(half), t_end, rate, g.seed, snapshots);
            break;
        case growth::GrowthModel::BallisticDeposition:
            trace = growth::simulate_ballistic_deposition(growth::SiteWindow::symmetric(half), t_end, rate, g.seed, snapshots);
            break;
        case growth::GrowthModel::CornerGrowth: {
            growth::CornerOptions o;
            o.snapshot_times = snapshots;
            const std::int64_t w = half > 0 ? half : growth::corner_window_for(t_end);
            trace = growth::simulate_corner_growth(growth::SiteWindow::symmetric(w), t_end, g.seed, o);
            break;
        }
        case growth::GrowthModel::Tasep: {
            const std::int64_t w = half > 0 ? half : growth::tasep_window_for(t_end);
            const auto init = growth::TasepState::step(growth::SiteWindow::symmetric(w));
            trace = growth::to_growth_trace(growth::simulate_tasep(init, t_end, g.seed, snapshots));
            break;
        }
    }
    std::ostringstream csv;
    csv << "time,site,height\n";
    std::vector<std::pair<std::string, double>> stats;
    for (const auto& s : trace.snapshots) {
        for (std::size_t i = 0; i < s.heights.size(); ++i)
            csv << io::format_double(s.time) << ',' << s.sites.x_min + static_cast<std::int64_t>(i) << ',' << s.heights[i]
                << '\n';
    }
    const auto& last = trace.snapshots.back();
    stats.emplace_back("interface_width", growth::interface_width(last));
    io::write_text((dir / "heights.csv").string(), csv.str());
    write_report(dir, "simulate-" + growth::to_string(model), g, stats, {"heights.csv"});
    std::cout << "wrote " << (dir / "heights.csv").string() << " (" << trace.snapshots.size() << " snapshots)\n";
    return 0;
}

int run_lpp(const Globals& g, std::size_t lines, std::size_t points, std::size_t x, std::size_t y, std::size_t l,
            std::size_t m) {
    lpp::BrownianSpec spec;
    spec.lines = lines;
    spec.step = 1.0 / static_cast<double>(points - 1);
    const auto f = lpp::brownian_ensemble(spec, g.seed, execution(g));
    const lpp::LastPassageQuery q{x, std::min(y, points - 1), l == 0 ? lines : l, m};
    const double value = lpp::last_passage(f, q);
    const auto path = lpp::rightmost_geodesic(f, q);
    const fs::path dir = fs::path(g.out) / "lpp";
    lpp::write_ensemble_csv(f, (dir / "ensemble.csv").string(), (dir / "ensemble.json").string());
    std::ostringstream csv;
    csv << "line,jump_index,jump_time\n";
    for (std::size_t i = q.m; i < q.l; ++i)
        csv << i << ',' << path.jump(i) << ',' << io::format_double(f.grid().at(path.jump(i))) << '\n';
    io::write_text((dir / "geodesic.csv").string(), csv.str());
    write_report(dir, "lpp", g, {{"last_passage", value}, {"geodesic_length", lpp::path_length(f, path)}},
                 {"ensemble.csv", "geodesic.csv"});
    std::printf("f[(%zu,%zu) -> (%zu,%zu)] = %.17g\n", q.x, q.l, q.y, q.m, value);
    return 0;
}

int run_melon(const Globals& g, std::size_t n, double y_half, double y_step, std::size_t lines, bool network) {
    const auto ys = landscape::uniform_grid(y_half, y_step);
    airy::MelonOptions o;
    o.lines = lines;
    o.method = network ? airy::MelonMethod::PitmanNetwork : airy::MelonMethod::Spectral;
    const std::size_t reps = std::max<std::size_t>(g.replicas, 1);
    const fs::path dir = fs::path(g.out) / "melon";
    std::vector<double> top;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto s = airy::rescaled_melon(n, ys, derive_seed(g.seed, r), o);
        airy::write_lines_csv(s, (dir / ("lines_" + std::to_string(r) + ".csv")).string());
        top.push_back(s(1, ys.size() / 2));
    }
    std::vector<std::pair<std::string, double>> stats{{"top_line_mid_mean", stats::mean(top)}};
    if (top.size() > 1) stats.emplace_back("top_line_mid_variance", stats::variance(top));
    write_report(dir, "melon", g, stats, {});
    std::printf("%zu replicas, mean A1(%g) = %.6f\n", reps, ys[ys.size() / 2], stats::mean(top));
    return 0;
}

int run_airy(const Globals& g, std::size_t n, double half, double step, double grid_step) {
    const auto grid = landscape::uniform_grid(half, step);
    airy::SheetOptions o;
    o.grid_step = grid_step;
    o.execution = execution(g);
    const auto s = airy::airy_sheet_sample(n, grid, grid, g.seed, o);
    const fs::path dir = fs::path(g.out) / "airy";
    airy::write_sheet_csv(s, (dir / "sheet.csv").string(), (dir / "sheet.json").string());
    const auto gb = landscape::growth_bound_check(s, 1.0);
    write_report(dir, "airy", g, {{"growth_constant", gb.constant}, {"inner_growth_constant", gb.inner_constant}},
                 {"sheet.csv"});
    std::printf("sheet %zux%zu written, growth constant %.4f\n", grid.size(), grid.size(), gb.constant);
    return 0;
}

int run_landscape(const Globals& g, unsigned level, double half, double step, std::size_t n, double grid_step, double s,
                  double t) {
    airy::SheetOptions o;
    o.grid_step = grid_step;
    o.execution = execution(g);
    const auto l = landscape::build_dyadic(level, half, step, n, g.seed, o);
    const fs::path dir = fs::path(g.out) / "landscape";
    landscape::write_landscape_manifest(l, (dir / "landscape.json").string());
    const auto sheet = landscape::landscape_sheet(l, s, t);
    airy::write_sheet_csv(sheet, (dir / "sheet.csv").string(), (dir / "sheet.json").string());
    write_report(dir, "landscape", g, {{"slots", static_cast<double>(l.slots())}, {"scale", sheet.scale}},
                 {"landscape.json", "sheet.csv"});
    std::printf("level %u landscape, L(.,%g;.,%g) written\n", level, s, t);
    return 0;
}

int run_fixed_point(const Globals& g, const std::string& initial, double support, std::size_t n, double x_step,
                    double y_max, double y_step, double grid_step) {
    const auto h0 = initial == "wedge" ? landscape::FinitaryInitial::narrow_wedge(0.0)
                                       : landscape::FinitaryInitial::flat(-support, support);
    const auto xs = initial == "wedge" ? std::vector<double>{0.0} : landscape::uniform_grid(support, x_step);
    const auto ys = landscape::uniform_grid(y_max, y_step);
    airy::SheetOptions o;
    o.grid_step = grid_step;
    o.execution = execution(g);
    const auto sheet = airy::airy_sheet_sample(n, xs, ys, g.seed, o);
    const auto p = landscape::kpz_fixed_point(sheet, h0, 1.0);
    const fs::path dir = fs::path(g.out) / "fixed-point";
    landscape::write_profile_csv(p, (dir / "profile.csv").string());
    // the variation estimate needs 100 steps on [0, 1]; coarser profiles are written without it
    std::vector<std::pair<std::string, double>> stats;
    const double qv_end = std::min(1.0, y_max);
    if (qv_end / y_step >= 100.0 - 1e-9) stats.emplace_back("quadratic_variation", landscape::quadratic_variation(p, 0.0, qv_end));
    write_report(dir, "fixed-point", g, stats, {"profile.csv"});
    std::printf("profile with %zu points written\n", p.y_grid.size());
    return 0;
}

std::vector<fs::path> manifests_of(const std::string& suite) {
    if (fs::is_directory(suite)) return experiment::suite_manifests(suite);
    if (fs::exists(suite)) return {fs::path(suite)};
    for (const fs::path base : {fs::path("manifests") / suite, fs::path(KPZ_SOURCE_DIR) / "manifests" / suite})
        if (fs::is_directory(base)) return experiment::suite_manifests(base);
    fail(ErrorCode::Io, "no suite or manifest named " + suite);
}

int run_verify(const Globals& g, bool seed_set, const std::string& suite, bool determinism) {
    int failures = 0;
    for (const auto& path : manifests_of(suite)) {
        auto m = experiment::load_manifest(path);
        experiment::RunOptions opts;
        opts.root = g.out;
        if (seed_set) opts.seed = g.seed;
        if (g.replicas) opts.replicas = g.replicas;
        opts.execution = execution(g);
        const auto t0 = std::chrono::steady_clock::now();
        const auto report = experiment::run_experiment(m, opts);
        std::printf("%s %s (%.1f s)\n", report.passed() ? "PASS" : "FAIL", m.name.c_str(),
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        print_report(report);
        if (!report.passed()) ++failures;
        if (determinism) {
            experiment::RunOptions again = opts;
            again.root = fs::path(g.out) / "rerun";
            experiment::run_experiment(m, again);
            const auto diff = experiment::compare_csv_outputs(fs::path(g.out) / m.output, again.root / m.output);
            std::printf("  %-4s determinism (%zu differing CSV files)\n", diff.empty() ? "PASS" : "FAIL", diff.size());
            for (const auto& d : diff) std::printf("       %s\n", d.c_str());
            if (!diff.empty()) ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_report(const Globals& g) {
    int failures = 0;
    std::vector<fs::path> reports;
    for (const auto& e : fs::recursive_directory_iterator(g.out))
        if (e.path().filename() == "report.json") reports.push_back(e.path());
    std::sort(reports.begin(), reports.end());
    for (const auto& p : reports) {
        const auto doc = io::read_json(p.string());
        std::printf("%s  [%s]\n", doc.value("experiment", std::string("?")).c_str(), p.parent_path().string().c_str());
        for (const auto& c : doc.at("criteria")) {
            const bool pass = c.value("pass", false);
            const bool optional = c.value("optional", false);
            if (!pass && !optional) ++failures;
            std::printf("  %-4s %-32s %s\n", pass ? "PASS" : optional ? "WARN" : "FAIL",
                        c.value("name", std::string()).c_str(), c.at("value").dump().c_str());
        }
    }
    if (reports.empty()) std::printf("no report.json under %s\n", g.out.c_str());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulations and diagnostics for KPZ growth, last passage percolation and the directed landscape"};
    app.set_version_flag("--version", std::string(KPZ_VERSION));
    app.require_subcommand(0, 1);
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--replicas", g.replicas, "replica count override");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--config", g.config, "TOML experiment manifest to run")->check(CLI::ExistingFile);
    app.add_flag("--serial", g.serial, "disable OpenMP loops");

    std::string model;
    double t_end = 100.0, rate = 1.0;
    std::int64_t half = 0;
    std::vector<double> snapshots;
    auto* sim = app.add_subcommand("simulate", "run a growth model");
    sim->add_option("model", model, "random-deposition | ballistic-deposition | corner-growth | tasep")->required();
    sim->add_option("--t-end", t_end)->capture_default_str();
    sim->add_option("--half-width", half, "site window half width (0 picks one for the model)");
    sim->add_option("--rate", rate)->capture_default_str();
    sim->add_option("--snapshots", snapshots, "snapshot times");

    std::size_t lines = 3, points = 1001, x = 0, y = 1000, l = 0, m = 1;
    auto* lpp_cmd = app.add_subcommand("lpp", "last passage in a Brownian ensemble");
    lpp_cmd->add_option("--lines", lines)->capture_default_str();
    lpp_cmd->add_option("--points", points)->capture_default_str()->check(CLI::Range(2, 100000000));
    lpp_cmd->add_option("--x", x, "start grid index")->capture_default_str();
    lpp_cmd->add_option("--y", y, "end grid index")->capture_default_str();
    lpp_cmd->add_option("--from-line", l, "start line (0 means the bottom line)");
    lpp_cmd->add_option("--to-line", m)->capture_default_str();

    std::size_t n = 64, keep = 10;
    double y_half = 2.0, y_step = 0.05;
    bool network = false;
    auto* melon_cmd = app.add_subcommand("melon", "rescaled Brownian melon (Airy line ensemble approximation)");
    melon_cmd->add_option("--n", n)->capture_default_str();
    melon_cmd->add_option("--y-half", y_half)->capture_default_str();
    melon_cmd->add_option("--y-step", y_step)->capture_default_str();
    melon_cmd->add_option("--lines", keep)->capture_default_str();
    melon_cmd->add_flag("--network", network, "build the melon by Pitman sorting instead of spectrally");

    double sheet_half = 1.0, sheet_step = 0.1, grid_step = 1.0 / 4096.0;
    auto* airy_cmd = app.add_subcommand("airy", "prelimiting Airy sheet sample");
    airy_cmd->add_option("--n", n)->capture_default_str();
    airy_cmd->add_option("--half-width", sheet_half)->capture_default_str();
    airy_cmd->add_option("--step", sheet_step)->capture_default_str();
    airy_cmd->add_option("--grid-step", grid_step, "Brownian time step")->capture_default_str();

    unsigned level = 2;
    double s_time = 0.0, t_time = 1.0;
    auto* land_cmd = app.add_subcommand("landscape", "dyadic directed landscape approximation");
    land_cmd->add_option("--level", level)->capture_default_str();
    land_cmd->add_option("--n", n)->capture_default_str();
    land_cmd->add_option("--half-width", sheet_half)->capture_default_str();
    land_cmd->add_option("--step", sheet_step)->capture_default_str();
    land_cmd->add_option("--grid-step", grid_step)->capture_default_str();
    land_cmd->add_option("--s", s_time)->capture_default_str();
    land_cmd->add_option("--t", t_time)->capture_default_str();

    std::string initial = "flat";
    double support = 0.5, x_step = 0.05, y_max = 1.5;
    auto* fp_cmd = app.add_subcommand("fixed-point", "KPZ fixed point at t = 1 from a finitary initial condition");
    fp_cmd->add_option("--initial", initial)->check(CLI::IsMember({"flat", "wedge"}))->capture_default_str();
    fp_cmd->add_option("--support", support, "flat support half width")->capture_default_str();
    fp_cmd->add_option("--n", n)->capture_default_str();
    fp_cmd->add_option("--x-step", x_step)->capture_default_str();
    fp_cmd->add_option("--y-half", y_max)->capture_default_str();
    fp_cmd->add_option("--y-step", y_step)->capture_default_str();
    fp_cmd->add_option("--grid-step", grid_step)->capture_default_str();

    std::string suite = "acceptance";
    bool determinism = false;
    auto* verify_cmd = app.add_subcommand("verify", "run a manifest suite and check its criteria");
    verify_cmd->add_option("suite", suite, "suite name, directory or manifest file")->capture_default_str();
    verify_cmd->add_flag("--check-determinism", determinism, "rerun each manifest and compare CSV outputs");

    auto* report_cmd = app.add_subcommand("report", "summarize report.json files under --out");

    CLI11_PARSE(app, argc, argv);
    try {
        const bool seed_set = seed_opt->count() > 0;
        if (*sim) return run_simulate(g, model, t_end, half, rate, snapshots);
        if (*lpp_cmd) return run_lpp(g, lines, points, x, y, l, m);
        if (*melon_cmd) return run_melon(g, n, y_half, y_step, keep, network);
        if (*airy_cmd) return run_airy(g, n, sheet_half, sheet_step, grid_step);
        if (*land_cmd) return run_landscape(g, level, sheet_half, sheet_step, n, grid_step, s_time, t_time);
        if (*fp_cmd) return run_fixed_point(g, initial, support, n, x_step, y_max, y_step, grid_step);
        if (*verify_cmd) return run_verify(g, seed_set, suite, determinism);
        if (*report_cmd) return run_report(g);
        if (!g.config.empty()) return run_verify(g, seed_set, g.config, false);
        std::cout << app.help();
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
        return 2;
    }
}
