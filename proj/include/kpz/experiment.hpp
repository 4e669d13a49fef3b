#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kpz/io.hpp"
#include "kpz/parallel.hpp"

namespace kpz::experiment {

struct ExperimentManifest {
    std::string name;
    std::string target;
    io::Json parameters = io::Json::object();
    io::Json thresholds = io::Json::object();
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::size_t replicas = 1;
    std::string output;  // directory relative to the run root

    void validate() const;
    double param(const std::string& key, double fallback) const;
    std::size_t param_size(const std::string& key, std::size_t fallback) const;
    bool param_bool(const std::string& key, bool fallback) const;
    double threshold(const std::string& key, double fallback) const;
};

ExperimentManifest manifest_from_json(const io::Json& doc);
ExperimentManifest load_manifest(const std::filesystem::path& path);
io::Json to_json(const ExperimentManifest& m);

enum class Comparison { AtMost, AtLeast, Equal };

struct CriterionResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    Comparison comparison = Comparison::AtMost;
    bool pass = false;
    bool optional = false;
};

CriterionResult check(std::string name, double value, Comparison cmp, double threshold, bool optional = false);

struct RunReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> artifacts;
    double seconds = 0.0;

    // Every non-optional criterion passed.
    bool passed() const;
    io::Json to_json() const;
};

// Where a target writes its artifacts.
class RunContext {
public:
    RunContext(std::filesystem::path dir, Execution mode) : dir_(std::move(dir)), mode_(mode) {}

    const std::filesystem::path& dir() const noexcept { return dir_; }
    Execution execution() const noexcept { return mode_; }
    std::filesystem::path file(const std::string& name) const { return dir_ / name; }
    void write(const std::string& name, const std::string& text);
    const std::vector<std::string>& artifacts() const noexcept { return artifacts_; }

private:
    std::filesystem::path dir_;
    Execution mode_;
    std::vector<std::string> artifacts_;
};

using Target = std::function<std::vector<CriterionResult>(const ExperimentManifest&, RunContext&)>;

class Registry {
public:
    static Registry& instance();
    void add(const std::string& name, Target fn);
    const Target& find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, Target> targets_;
};

struct RunOptions {
    std::filesystem::path root = "runs";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    Execution execution = Execution::Parallel;
};

// Runs the manifest's target, writes CSV artifacts and report.json into root/output.
RunReport run_experiment(ExperimentManifest manifest, const RunOptions& opts = {});

// Manifests of a suite directory, sorted by file name.
std::vector<std::filesystem::path> suite_manifests(const std::filesystem::path& dir);

// CSV files that differ (or exist on one side only) between two run directories.
std::vector<std::string> compare_csv_outputs(const std::filesystem::path& a, const std::filesystem::path& b);

void register_builtin_targets();

}  // namespace kpz::experiment
