#pragma once

// Shared pipeline runs for the acceptance criteria. Runs live below one root
// directory and every stage skips outputs that already exist, so criteria
// that need the same ensemble trace it only once per build tree. Delete the
// root after changing the library.

#include "vk/pipeline.hpp"
#include "vk/stats.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vk::acceptance {

std::filesystem::path runs_root();

struct Run {
    SystemKind system;
    std::vector<int> N;
    int seeds = 20;
    double spacing = 0.1;
    int workers = 1;
    std::string name; // subdirectory below runs_root()
};

// Runs (or completes) the pipeline and returns its analysis records in
// (N, seed) order; a run whose report is not clean throws.
std::vector<TangleRecord> ensure(const Run& r);

// all analysis records found below `dir`
std::vector<TangleRecord> load_records(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& p);

// the shared ensembles
Run stability_run(SystemKind s, double spacing, int workers = 1);
Run arclength_run(SystemKind s);   // cube N=9, sphere N=17
Run parity_run();                  // oscillator N=9,10
Run trend_run();                   // sphere N=5..17 odd

} // namespace vk::acceptance
