#pragma once

// Batch driver: generate superpositions, trace their vortex lines, analyze the
// curves and aggregate statistics. Every (N, seed) task lives in its own
// directory
//
//   <out>/<system>_N<N>/seed_<seed>/{manifest.txt, curves.txt, analysis.csv}
//
// and a stage is skipped when its output already exists, so an interrupted
// batch is completed by running the same command again. Aggregates go to
// <out>/stats/*.csv and every command writes <out>/run_report.json.

#include "vk/basis.hpp"
#include "vk/errors.hpp"
#include "vk/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace vk {

struct ConfigError : Error {
    using Error::Error;
};

struct RunConfig {
    SystemKind system = SystemKind::ThreeSphere;
    std::vector<int> N = {7};
    int seed_count = 10;                  // seeds 1..seed_count
    std::vector<std::uint64_t> seed_list; // overrides seed_count when non-empty
    double spacing = 0.1;                 // initial grid spacing, lambda
    int refinement_factor = 2;
    int max_depth = 6;
    double truncation = 2.0; // oscillator cutoff in classical radii
    int projection_retries = 10;
    std::string output_dir = "out";
    int workers = 1;

    // statistics
    int bins_per_decade = 8;
    int min_bin_count = 10;
    double fit_min = 0; // lambda; 0 = automatic window
    double fit_max = 0;

    std::vector<std::uint64_t> seeds() const;
    void validate() const; // throws ConfigError
    bool operator==(const RunConfig&) const = default;
};

// VORTEX_KNOTS_OUT if set, otherwise "out"
std::string default_output_dir();

// Registers one option per RunConfig field (and --config for a config file).
void bind_options(CLI::App& app, RunConfig& cfg);
// Config file text, readable by the --config option and parse_config_text.
std::string to_config_text(const RunConfig& cfg);
RunConfig parse_config_text(const std::string& text); // throws ConfigError

std::filesystem::path task_dir(const RunConfig& cfg, int N, std::uint64_t seed);

struct Failure {
    std::string stage;
    int curve = -1;
    std::string error; // exception class
    std::string message;
};

enum class StageState { NotRun, Done, Skipped, Failed };
std::string to_string(StageState s);

struct TaskReport {
    int N = 0;
    std::uint64_t seed = 0;
    StageState generate = StageState::NotRun;
    StageState trace = StageState::NotRun;
    StageState analyze = StageState::NotRun;
    int curves = -1;
    int eligible = -1;
    int knotted = -1;
    int unanalyzed = -1;
    int depth_used = -1;
    std::vector<Failure> failures;
};

struct RunReport {
    std::string command;
    std::vector<TaskReport> tasks;
    int records = 0; // analysis files aggregated by stats
    std::vector<Failure> failures; // run-level (stats inputs)
    bool input_error = false;

    // 0 success, 1 partial (failed tasks or unanalyzed curves), 2 input error
    int exit_code() const;
};

// Analysis of one traced tangle: simplification against the rest of the
// tangle, projection invariants, table lookup and antipodal partners.
TangleRecord analyze_tangle(const std::vector<VortexCurve>& curves, const ModeSpec& mode, std::uint64_t seed,
                            double spacing, int projection_retries, std::vector<Failure>* failures = nullptr,
                            std::vector<Eigen::Matrix3Xd>* simplified = nullptr);

RunReport cmd_generate(const RunConfig& cfg);
RunReport cmd_trace(const RunConfig& cfg);
RunReport cmd_analyze(const RunConfig& cfg);
RunReport cmd_stats(const RunConfig& cfg);
RunReport cmd_pipeline(const RunConfig& cfg);

void write_run_report(const std::filesystem::path& path, const RunConfig& cfg, const RunReport& r);

// Replaces `path` by `content` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace vk
