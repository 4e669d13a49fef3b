#include "kpz/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "kpz/config.hpp"
#include "kpz/error.hpp"

namespace kpz::experiment {

namespace fs = std::filesystem;

void ExperimentManifest::validate() const {
    require(!name.empty(), ErrorCode::Config, "manifest needs a name");
    require(!target.empty(), ErrorCode::Config, "manifest needs a target");
    require(has_seed, ErrorCode::Config, "manifest needs a seed");
    require(replicas >= 1, ErrorCode::Config, "replica count must be at least 1");
    require(parameters.is_object() && thresholds.is_object(), ErrorCode::Config, "parameters must be tables");
}

double ExperimentManifest::param(const std::string& key, double fallback) const {
    if (!parameters.contains(key)) return fallback;
    const auto& v = parameters.at(key);
    require(v.is_number(), ErrorCode::Config, "parameter '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t ExperimentManifest::param_size(const std::string& key, std::size_t fallback) const {
    if (!parameters.contains(key)) return fallback;
    const auto& v = parameters.at(key);
    require(v.is_number_integer() && v.get<std::int64_t>() >= 0, ErrorCode::Config,
            "parameter '" + key + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

bool ExperimentManifest::param_bool(const std::string& key, bool fallback) const {
    if (!parameters.contains(key)) return fallback;
    const auto& v = parameters.at(key);
    require(v.is_boolean(), ErrorCode::Config, "parameter '" + key + "' must be a boolean");
    return v.get<bool>();
}

double ExperimentManifest::threshold(const std::string& key, double fallback) const {
    if (!thresholds.contains(key)) return fallback;
    const auto& v = thresholds.at(key);
    require(v.is_number(), ErrorCode::Config, "threshold '" + key + "' must be a number");
    return v.get<double>();
}

ExperimentManifest manifest_from_json(const io::Json& doc) {
    require(doc.is_object(), ErrorCode::Config, "manifest must be a table");
    ExperimentManifest m;
    try {
        m.name = doc.at("name").get<std::string>();
        m.target = doc.at("target").get<std::string>();
        if (doc.contains("seed")) {
            const auto& s = doc.at("seed");
            require(s.is_number_integer(), ErrorCode::Config, "seed must be an integer");
            m.seed = s.is_number_unsigned() ? s.get<std::uint64_t>() : static_cast<std::uint64_t>(s.get<std::int64_t>());
            m.has_seed = true;
        }
        if (doc.contains("replicas")) {
            const auto& r = doc.at("replicas");
            require(r.is_number_integer() && r.get<std::int64_t>() >= 0, ErrorCode::Config,
                    "replicas must be a nonnegative integer");
            m.replicas = r.get<std::size_t>();
        }
        m.output = doc.contains("output") ? doc.at("output").get<std::string>() : m.name;
        if (doc.contains("parameters")) m.parameters = doc.at("parameters");
        if (doc.contains("thresholds")) m.thresholds = doc.at("thresholds");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Config, std::string("malformed manifest: ") + e.what());
    }
    m.validate();
    return m;
}

ExperimentManifest load_manifest(const fs::path& path) { return manifest_from_json(config::load_toml(path)); }

io::Json to_json(const ExperimentManifest& m) {
    io::Json doc;
    doc["name"] = m.name;
    doc["target"] = m.target;
    doc["seed"] = m.seed;
    doc["replicas"] = m.replicas;
    doc["output"] = m.output;
    doc["parameters"] = m.parameters;
    doc["thresholds"] = m.thresholds;
    return doc;
}

CriterionResult check(std::string name, double value, Comparison cmp, double threshold, bool optional) {
    CriterionResult r{std::move(name), value, threshold, cmp, false, optional};
    switch (cmp) {
    case Comparison::AtMost: r.pass = value <= threshold; break;
    case Comparison::AtLeast: r.pass = value >= threshold; break;
    case Comparison::Equal: r.pass = value == threshold; break;
    }
    return r;
}

bool RunReport::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass || c.optional; });
}

io::Json RunReport::to_json() const {
    io::Json doc;
    doc["experiment"] = experiment;
    doc["seed"] = seed;
    io::Json list = io::Json::array();
    for (const auto& c : criteria) {
        io::Json e;
        e["name"] = c.name;
        e["value"] = io::number_or_string(c.value);
        e["threshold"] = io::number_or_string(c.threshold);
        e["pass"] = c.pass;
        e["comparison"] = c.comparison == Comparison::AtMost ? "<=" : c.comparison == Comparison::AtLeast ? ">=" : "==";
        if (c.optional) e["optional"] = true;
        list.push_back(e);
    }
    doc["criteria"] = list;
    doc["artifacts"] = artifacts;
    doc["metadata"] = {{"seconds", seconds}, {"code_version", io::code_version()}};
    return doc;
}

void RunContext::write(const std::string& name, const std::string& text) {
    io::write_text(dir_ / name, text);
    artifacts_.push_back(name);
}

Registry& Registry::instance() {
    static Registry r;
    return r;
}

void Registry::add(const std::string& name, Target fn) { targets_[name] = std::move(fn); }

const Target& Registry::find(const std::string& name) const {
    const auto it = targets_.find(name);
    if (it == targets_.end()) fail(ErrorCode::UnknownTarget, "no experiment target named '" + name + "'");
    return it->second;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : targets_) out.push_back(k);
    return out;
}

RunReport run_experiment(ExperimentManifest manifest, const RunOptions& opts) {
    register_builtin_targets();
    if (opts.seed) {
        manifest.seed = *opts.seed;
        manifest.has_seed = true;
    }
    if (opts.replicas) manifest.replicas = *opts.replicas;
    manifest.validate();
    const Target& target = Registry::instance().find(manifest.target);
    RunContext ctx(opts.root / manifest.output, opts.execution);
    std::error_code ec;
    fs::create_directories(ctx.dir(), ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + ctx.dir().string());

    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.experiment = manifest.name;
    report.seed = manifest.seed;
    try {
        report.criteria = target(manifest, ctx);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io || e.code() == ErrorCode::UnknownTarget || e.code() == ErrorCode::Config) throw;
        fail(ErrorCode::CriterionEvaluation, manifest.name + ": " + e.what());
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.artifacts = ctx.artifacts();
    io::write_json(ctx.dir() / "report.json", report.to_json());
    return report;
}

std::vector<fs::path> suite_manifests(const fs::path& dir) {
    require(fs::is_directory(dir), ErrorCode::Io, "suite directory " + dir.string() + " not found");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".toml") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    require(!out.empty(), ErrorCode::Io, "suite directory " + dir.string() + " holds no manifests");
    return out;
}

std::vector<std::string> compare_csv_outputs(const fs::path& a, const fs::path& b) {
    const auto collect = [](const fs::path& root) {
        std::set<std::string> files;
        if (!fs::exists(root)) return files;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file() && e.path().extension() == ".csv")
                files.insert(fs::relative(e.path(), root).generic_string());
        return files;
    };
    const auto fa = collect(a);
    const auto fb = collect(b);
    std::vector<std::string> diff;
    for (const auto& f : fa)
        if (!fb.count(f) || io::read_text(a / f) != io::read_text(b / f)) diff.push_back(f);
    for (const auto& f : fb)
        if (!fa.count(f)) diff.push_back(f);
    return diff;
}

}  // namespace kpz::experiment
