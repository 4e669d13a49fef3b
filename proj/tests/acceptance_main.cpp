// Runs the shipped acceptance manifests and prints one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/airy.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "kpz/error.hpp"
#include "kpz/experiment.hpp"

namespace fs = std::filesystem;
using namespace kpz;
using namespace kpz::experiment;

namespace {

constexpr int kCriteria = 12;

// GUE Tracy-Widom distribution F(s) = det(I - K_Ai) on L^2(s, inf), by Nystroem
// discretization with Gauss-Legendre nodes on (s, s + 16).
double tracy_widom_cdf(double s) {
    using boost::math::airy_ai;
    using boost::math::airy_ai_prime;
    using Rule = boost::math::quadrature::gauss<double, 40>;
    std::vector<double> x, w;
    const double half = 8.0, mid = s + half;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        const double a = Rule::abscissa()[i], wt = Rule::weights()[i];
        x.push_back(mid + half * a);
        w.push_back(half * wt);
        if (a != 0.0) {
            x.push_back(mid - half * a);
            w.push_back(half * wt);
        }
    }
    const auto m = static_cast<Eigen::Index>(x.size());
    std::vector<double> ai(x.size()), aip(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        ai[i] = airy_ai(x[i]);
        aip[i] = airy_ai_prime(x[i]);
    }
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto p = static_cast<std::size_t>(i), q = static_cast<std::size_t>(j);
            const double k = i == j ? aip[p] * aip[p] - x[p] * ai[p] * ai[p]
                                    : (ai[p] * aip[q] - aip[p] * ai[q]) / (x[p] - x[q]);
            a(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(w[p]) * k * std::sqrt(w[q]);
        }
    return a.partialPivLu().determinant();
}

// Mean as the integral of 1 - F over (0, inf) minus the integral of F over (-inf, 0).
double tracy_widom_mean() {
    using Rule = boost::math::quadrature::gauss<double, 40>;
    double left = 0.0, right = 0.0;
    for (double a = -10.0; a < 0.0; a += 2.0) left += Rule::integrate(tracy_widom_cdf, a, a + 2.0);
    for (double a = 0.0; a < 8.0; a += 2.0)
        right += Rule::integrate([](double s) { return 1.0 - tracy_widom_cdf(s); }, a, a + 2.0);
    return right - left;
}

fs::path manifest_for(const fs::path& dir, int k) {
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02d_", k);
    for (const auto& p : suite_manifests(dir))
        if (p.filename().string().rfind(prefix, 0) == 0) return p;
    fail(ErrorCode::Io, "no manifest for criterion " + std::to_string(k) + " in " + dir.string());
}

std::string describe(const CriterionResult& c) {
    const char* op = c.comparison == Comparison::AtMost ? "<=" : c.comparison == Comparison::AtLeast ? ">=" : "==";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.6g %s %.6g%s%s", c.name.c_str(), c.value, op, c.threshold,
                  c.pass ? "" : " (fails)", c.optional ? " [optional]" : "");
    return buf;
}

struct Line {
    bool pass = true;
    std::string detail;
};

void print(int k, const std::string& name, const Line& l) {
    std::printf("[%s] criterion %2d %s: %s\n", l.pass ? "PASS" : "FAIL", k, name.c_str(), l.detail.c_str());
    std::fflush(stdout);
}

Line from_report(const RunReport& r) {
    Line l;
    l.pass = r.passed();
    for (const auto& c : r.criteria) {
        if (!l.detail.empty()) l.detail += "; ";
        l.detail += describe(c);
    }
    return l;
}

RunOptions options(const fs::path& root, bool serial) {
    RunOptions o;
    o.root = root;
    o.execution = serial ? Execution::Serial : Execution::Parallel;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    std::string out = "acceptance_runs";
    std::string dir = std::string(KPZ_SOURCE_DIR) + "/manifests/acceptance";
    bool serial = false;
    app.add_option("--criterion", only, "run a single criterion (1-12); 0 runs all")->check(CLI::Range(0, kCriteria));
    app.add_option("--out", out, "run directory")->capture_default_str();
    app.add_option("--manifests", dir, "acceptance manifest directory")->capture_default_str();
    app.add_flag("--serial", serial, "run replica loops serially");
    CLI11_PARSE(app, argc, argv);
    register_builtin_targets();

    const fs::path first = fs::path(out) / "first";
    const fs::path rerun = fs::path(out) / "rerun";
    int failures = 0;
    try {
        for (int k = 1; k <= kCriteria; ++k) {
            if (only != 0 && only != k) continue;
            if (k < kCriteria) {
                const auto m = load_manifest(manifest_for(dir, k));
                Line l = from_report(run_experiment(m, options(first, serial)));
                if (m.target == "tracy-widom-mean") {
                    const double oracle = tracy_widom_mean();
                    const double frozen = m.param("reference_mean", 0.0);
                    const bool agree = std::abs(oracle - frozen) <= 1e-8;
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "; oracle mean %.10f %s manifest reference", oracle,
                                  agree ? "matches" : "DIFFERS FROM");
                    l.detail += buf;
                    l.pass = l.pass && agree;
                }
                print(k, m.name, l);
                failures += !l.pass;
                continue;
            }
            // every manifest rerun with the same seed must reproduce its CSV files bit for bit
            Line l;
            std::size_t compared = 0;
            for (const auto& path : suite_manifests(dir)) {
                const auto m = load_manifest(path);
                if (!fs::exists(first / m.output / "report.json")) run_experiment(m, options(first, serial));
                run_experiment(m, options(rerun, serial));
                for (const auto& d : compare_csv_outputs(first / m.output, rerun / m.output)) {
                    l.pass = false;
                    l.detail += (l.detail.empty() ? "" : ", ") + m.output + "/" + d;
                }
                ++compared;
            }
            if (l.pass) l.detail = std::to_string(compared) + " manifests reproduce bit-identical CSV output";
            else l.detail = "differing files: " + l.detail;
            print(k, "determinism", l);
            failures += !l.pass;
        }
    } catch (const Error& e) {
        std::printf("[FAIL] error [%s]: %s\n", to_string(e.code()), e.what());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
