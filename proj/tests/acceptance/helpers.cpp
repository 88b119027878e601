#include "helpers.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace vk::acceptance {

fs::path runs_root() { return fs::path(VK_ACCEPTANCE_DIR); }

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<TangleRecord> load_records(const fs::path& dir)
{
    std::vector<TangleRecord> out;
    if (!fs::is_directory(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == "analysis.csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::istringstream is(read_file(p));
        out.push_back(read_analysis(is));
    }
    std::sort(out.begin(), out.end(), [](const TangleRecord& a, const TangleRecord& b) {
        return std::tie(a.system, a.N, a.seed) < std::tie(b.system, b.N, b.seed);
    });
    return out;
}

std::vector<TangleRecord> ensure(const Run& r)
{
    RunConfig cfg;
    cfg.system = r.system;
    cfg.N = r.N;
    cfg.seed_count = r.seeds;
    cfg.spacing = r.spacing;
    cfg.workers = r.workers;
    cfg.output_dir = (runs_root() / r.name).string();
    std::cerr << "run " << r.name << " ..." << std::endl;
    const RunReport rep = cmd_pipeline(cfg);
    write_run_report(fs::path(cfg.output_dir) / "run_report.json", cfg, rep);
    if (rep.exit_code() == 2) throw std::runtime_error("run " + r.name + " failed on its inputs");
    std::vector<TangleRecord> out;
    for (int N : r.N)
        for (auto seed : cfg.seeds()) {
            std::istringstream is(read_file(task_dir(cfg, N, seed) / "analysis.csv"));
            out.push_back(read_analysis(is));
        }
    return out;
}

// every 0.1-lambda single-worker run shares one tree, so overlapping
// ensembles (sphere N=7 and N=17, oscillator N=9) are traced once
Run stability_run(SystemKind s, double spacing, int workers)
{
    const int N = s == SystemKind::PeriodicCube ? 5 : s == SystemKind::ThreeSphere ? 7 : 9;
    std::string name = workers == 1 && spacing == 0.1 ? "ensemble" : spacing == 0.1 ? "coarse" : "fine";
    if (workers != 1) name += "_w" + std::to_string(workers);
    return {s, {N}, 20, spacing, workers, name};
}

Run arclength_run(SystemKind s)
{
    return {s, {s == SystemKind::PeriodicCube ? 9 : 17}, 50, 0.1, 1, "ensemble"};
}

Run parity_run() { return {SystemKind::Harmonic3D, {9, 10}, 50, 0.1, 1, "ensemble"}; }

Run trend_run() { return {SystemKind::ThreeSphere, {5, 7, 9, 11, 13, 15, 17}, 30, 0.1, 1, "ensemble"}; }

} // namespace vk::acceptance
