#include "vk/pipeline.hpp"
#include "vk/knots.hpp"
#include "vk/tracker.hpp"

#include "io_util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace fs = std::filesystem;

namespace vk {

namespace {

std::mutex log_mutex;

void notice(const std::string& s)
{
    std::lock_guard lk(log_mutex);
    std::cerr << s << '\n';
}

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// Runs f(0..n-1) on `workers` threads; each index is handled exactly once and
// results are stored by index, so the outcome does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, int workers, F f)
{
    const int w = std::max(1, std::min<int>(workers, int(n)));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int k = 0; k < w; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
}

template <typename E>
void record_failure(TaskReport& t, const std::string& stage, const char* cls, const E& e, int curve = -1)
{
    t.failures.push_back({stage, curve, cls, e.what()});
}

} // namespace

// ---- configuration --------------------------------------------------------

std::vector<std::uint64_t> RunConfig::seeds() const
{
    if (!seed_list.empty()) return seed_list;
    std::vector<std::uint64_t> s;
    for (int k = 1; k <= seed_count; ++k) s.push_back(std::uint64_t(k));
    return s;
}

void RunConfig::validate() const
{
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    need(!N.empty(), "at least one N is required");
    for (int n : N) {
        need(n >= 0, "N must be non-negative");
        try {
            (void)mode_spec(system, n);
        }
        catch (const std::exception& e) {
            throw ConfigError(std::string("N = ") + std::to_string(n) + ": " + e.what());
        }
    }
    need(std::set<int>(N.begin(), N.end()).size() == N.size(), "duplicate N");
    need(seed_list.empty() ? seed_count > 0 : true, "seed count must be positive");
    need(std::set<std::uint64_t>(seed_list.begin(), seed_list.end()).size() == seed_list.size(), "duplicate seed");
    need(spacing > 0 && std::isfinite(spacing), "spacing must be positive");
    need(refinement_factor >= 2, "refinement factor must be at least 2");
    need(max_depth >= 1, "max depth must be at least 1");
    need(truncation > 0 && std::isfinite(truncation), "truncation must be positive");
    need(projection_retries >= 1, "projection retries must be positive");
    need(!output_dir.empty(), "output directory must be set");
    need(workers >= 1, "workers must be positive");
    need(bins_per_decade >= 1, "bins per decade must be positive");
    need(min_bin_count >= 1, "minimum bin count must be positive");
    need(fit_min >= 0 && fit_max >= 0, "fit window must be non-negative");
    need(!(fit_min > 0 && fit_max > 0) || fit_min < fit_max, "fit window is empty");
}

std::string default_output_dir()
{
    if (const char* d = std::getenv("VORTEX_KNOTS_OUT"); d && *d) return d;
    return "out";
}

void bind_options(CLI::App& app, RunConfig& cfg)
{
    const std::map<std::string, SystemKind> systems = {{"cube", SystemKind::PeriodicCube},
                                                       {"sphere", SystemKind::ThreeSphere},
                                                       {"ho", SystemKind::Harmonic3D}};
    app.add_option("--system", cfg.system, "cube | sphere | ho")
        ->transform(CLI::CheckedTransformer(systems, CLI::ignore_case));
    app.add_option("-N,--N", cfg.N, "principal quantum numbers")->delimiter(',');
    app.add_option("--seeds", cfg.seed_count, "number of seeds (1..count)");
    app.add_option("--seed-list", cfg.seed_list, "explicit seeds, overrides --seeds")->delimiter(',');
    app.add_option("--spacing", cfg.spacing, "initial grid spacing in wavelengths");
    app.add_option("--refinement-factor", cfg.refinement_factor, "subdivision per refinement level");
    app.add_option("--max-depth", cfg.max_depth, "maximum refinement depth");
    app.add_option("--truncation", cfg.truncation, "oscillator cutoff in classical radii");
    app.add_option("--projection-retries", cfg.projection_retries, "degenerate projections tolerated per curve");
    app.add_option("--out", cfg.output_dir, "output directory (default $VORTEX_KNOTS_OUT or ./out)");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--bins-per-decade", cfg.bins_per_decade, "length bins per decade");
    app.add_option("--min-bin-count", cfg.min_bin_count, "curves needed for a bin to enter the fit");
    app.add_option("--fit-min", cfg.fit_min, "lower end of the fit window in wavelengths (0 = automatic)");
    app.add_option("--fit-max", cfg.fit_max, "upper end of the fit window in wavelengths (0 = automatic)");
    app.set_config("--config", "", "config file (key = value lines)");
}

std::string to_config_text(const RunConfig& c)
{
    std::ostringstream os;
    auto list = [&](const auto& v) {
        os << '[';
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
        os << "]\n";
    };
    os << "# vk-run-config 1\n";
    os << "system=\"" << to_string(c.system) << "\"\n";
    os << "N=";
    list(c.N);
    os << "seeds=" << c.seed_count << '\n';
    if (!c.seed_list.empty()) {
        os << "seed-list=";
        list(c.seed_list);
    }
    os << "spacing=" << io::fmt(c.spacing) << '\n';
    os << "refinement-factor=" << c.refinement_factor << '\n';
    os << "max-depth=" << c.max_depth << '\n';
    os << "truncation=" << io::fmt(c.truncation) << '\n';
    os << "projection-retries=" << c.projection_retries << '\n';
    os << "out=\"" << c.output_dir << "\"\n";
    os << "workers=" << c.workers << '\n';
    os << "bins-per-decade=" << c.bins_per_decade << '\n';
    os << "min-bin-count=" << c.min_bin_count << '\n';
    os << "fit-min=" << io::fmt(c.fit_min) << '\n';
    os << "fit-max=" << io::fmt(c.fit_max) << '\n';
    return os.str();
}

RunConfig parse_config_text(const std::string& text)
{
    RunConfig cfg;
    CLI::App app;
    bind_options(app, cfg);
    std::istringstream is(text);
    try {
        app.parse_from_stream(is);
    }
    catch (const CLI::Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

fs::path task_dir(const RunConfig& cfg, int N, std::uint64_t seed)
{
    return fs::path(cfg.output_dir) / (to_string(cfg.system) + "_N" + std::to_string(N)) /
           ("seed_" + std::to_string(seed));
}

std::string to_string(StageState s)
{
    switch (s) {
    case StageState::NotRun: return "not run";
    case StageState::Done: return "done";
    case StageState::Skipped: return "skipped";
    case StageState::Failed: return "failed";
    }
    return "?";
}

int RunReport::exit_code() const
{
    if (input_error) return 2;
    if (!failures.empty()) return 1;
    for (const auto& t : tasks)
        if (!t.failures.empty() || t.unanalyzed > 0) return 1;
    return 0;
}

void write_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---- analysis of one tangle ----------------------------------------------

TangleRecord analyze_tangle(const std::vector<VortexCurve>& curves, const ModeSpec& mode, std::uint64_t seed,
                            double spacing, int projection_retries, std::vector<Failure>* failures,
                            std::vector<Eigen::Matrix3Xd>* simplified)
{
    TangleRecord rec;
    rec.system = mode.system;
    rec.N = mode.N;
    rec.seed = seed;
    rec.energy = mode.energy;
    rec.lambda = mode.wavelength;
    rec.spacing = spacing;

    std::vector<AntipodalMatch> match;
    if (mode.system != SystemKind::PeriodicCube) match = antipodal_partners(curves, spacing);
    if (simplified) simplified->assign(curves.size(), Eigen::Matrix3Xd());

    const KnotTable& table = KnotTable::bundled();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const VortexCurve& c = curves[i];
        CurveRow row;
        row.id = c.id;
        row.length = c.arclength_lambda;
        row.length_classical = c.system == SystemKind::Harmonic3D ? arclength_classical(c) : row.length;
        row.closed = c.closed;
        row.homology = c.homology;
        row.eligible = eligible_for_knotting(c);
        if (!match.empty() && match[i].partner >= 0) {
            row.partner = curves[match[i].partner].id;
            row.passes_origin = match[i].passes_origin;
        }
        if (!row.eligible) {
            row.status = "ineligible";
            rec.rows.push_back(std::move(row));
            continue;
        }
        std::vector<Eigen::Matrix3Xd> obstacles;
        obstacles.reserve(curves.size() - 1);
        for (std::size_t j = 0; j < curves.size(); ++j)
            if (j != i) obstacles.push_back(curves[j].embedding);
        const VortexCurve s = simplify(c, obstacles);
        if (simplified) (*simplified)[i] = s.vertices;
        try {
            const RobustResult r = robust_invariants(s, projection_retries);
            row.inv = r.inv;
            row.retries = r.retries;
            const KnotId id = table.classify(r.inv);
            row.knot = id.name;
            if (id.candidates.size() > 1) row.candidates = id.candidates;
        }
        catch (const PersistentDegeneracy& e) {
            row.status = "PersistentDegeneracy";
            row.retries = projection_retries;
            if (failures) failures->push_back({"analyze", c.id, row.status, e.what()});
        }
        catch (const InvariantDisagreement& e) {
            row.status = "InvariantDisagreement";
            if (failures) failures->push_back({"analyze", c.id, row.status, e.what()});
        }
        rec.rows.push_back(std::move(row));
    }
    return rec;
}

// ---- stages -----------------------------------------------------------------

namespace {

struct Task {
    int N;
    std::uint64_t seed;
};

std::vector<Task> tasks_of(const RunConfig& cfg)
{
    std::vector<Task> t;
    for (int n : cfg.N)
        for (auto s : cfg.seeds()) t.push_back({n, s});
    return t;
}

void fill_counts(TaskReport& t, const TangleRecord& rec)
{
    t.curves = int(rec.rows.size());
    t.eligible = t.knotted = t.unanalyzed = 0;
    for (const auto& r : rec.rows) {
        if (!r.eligible) continue;
        ++t.eligible;
        if (r.knotted()) ++t.knotted;
        if (!r.analyzed()) ++t.unanalyzed;
    }
}

// false: the stage could not produce its output
bool stage_generate(const RunConfig& cfg, const Task& k, TaskReport& t, bool& input_error)
{
    const fs::path p = task_dir(cfg, k.N, k.seed) / "manifest.txt";
    if (fs::exists(p)) {
        notice("skipping existing " + p.string());
        t.generate = StageState::Skipped;
        return true;
    }
    try {
        const RandomSuperposition sup = draw_superposition(mode_spec(cfg.system, k.N), k.seed);
        std::ostringstream os;
        write_manifest(os, sup);
        write_atomic(p, os.str());
        t.generate = StageState::Done;
        return true;
    }
    catch (const std::exception& e) {
        record_failure(t, "generate", "OutputError", e);
        t.generate = StageState::Failed;
        input_error = true;
        return false;
    }
}

bool stage_trace(const RunConfig& cfg, const Task& k, TaskReport& t, bool& input_error)
{
    const fs::path dir = task_dir(cfg, k.N, k.seed);
    const fs::path p = dir / "curves.txt";
    if (fs::exists(p)) {
        notice("skipping existing " + p.string());
        t.trace = StageState::Skipped;
        return true;
    }
    t.trace = StageState::Failed;
    RandomSuperposition sup;
    try {
        std::istringstream is(read_file(dir / "manifest.txt"));
        sup = read_manifest(is);
    }
    catch (const FormatError& e) {
        record_failure(t, "trace", "FormatError", e);
        input_error = true;
        return false;
    }
    catch (const std::exception& e) {
        record_failure(t, "trace", "MissingInput", e);
        input_error = true;
        return false;
    }
    if (sup.mode.system != cfg.system || sup.mode.N != k.N || sup.seed != k.seed) {
        t.failures.push_back({"trace", -1, "FormatError", "manifest does not match its directory"});
        input_error = true;
        return false;
    }
    try {
        const GridSpec grid =
            default_grid(sup.mode, cfg.spacing, k.seed, cfg.max_depth, cfg.refinement_factor, cfg.truncation);
        TraceStats st;
        const std::vector<VortexCurve> curves = trace(sup, grid, &st);
        CurveFileHeader h;
        h.system = cfg.system;
        h.N = k.N;
        h.seed = k.seed;
        h.spacing = grid.spacing;
        h.depth_used = st.max_level_used;
        h.lambda = grid.lambda;
        if (cfg.system == SystemKind::Harmonic3D) {
            h.classical_radius = std::sqrt(2 * sup.mode.energy);
            h.truncation_radius = cfg.truncation * h.classical_radius;
        }
        if (!curves.empty()) h.pole = curves.front().pole;
        std::vector<CurveRecord> recs;
        for (const auto& c : curves) recs.push_back({c, std::nullopt});
        std::ostringstream os;
        write_curves(os, h, recs);
        write_atomic(p, os.str());
        t.curves = int(curves.size());
        t.depth_used = h.depth_used;
        t.trace = StageState::Done;
        return true;
    }
    catch (const RecursionExhausted& e) {
        record_failure(t, "trace", "RecursionExhausted", e);
    }
    catch (const DegenerateField& e) {
        record_failure(t, "trace", "DegenerateField", e);
    }
    catch (const TrackingIncomplete& e) {
        record_failure(t, "trace", "TrackingIncomplete", e);
    }
    catch (const NetIdentificationError& e) {
        record_failure(t, "trace", "NetIdentificationError", e);
    }
    return false;
}

bool stage_analyze(const RunConfig& cfg, const Task& k, TaskReport& t, bool& input_error)
{
    const fs::path dir = task_dir(cfg, k.N, k.seed);
    const fs::path p = dir / "analysis.csv";
    if (fs::exists(p)) {
        notice("skipping existing " + p.string());
        t.analyze = StageState::Skipped;
        try {
            std::istringstream is(read_file(p));
            fill_counts(t, read_analysis(is));
            return true;
        }
        catch (const std::exception& e) {
            record_failure(t, "analyze", "FormatError", e);
            t.analyze = StageState::Failed;
            input_error = true;
            return false;
        }
    }
    t.analyze = StageState::Failed;
    CurveFileHeader h;
    std::vector<CurveRecord> recs;
    try {
        std::istringstream is(read_file(dir / "curves.txt"));
        recs = read_curves(is, h);
    }
    catch (const FormatError& e) {
        record_failure(t, "analyze", "FormatError", e);
        input_error = true;
        return false;
    }
    catch (const std::exception& e) {
        record_failure(t, "analyze", "MissingInput", e);
        input_error = true;
        return false;
    }
    if (h.system != cfg.system || h.N != k.N || h.seed != k.seed) {
        t.failures.push_back({"analyze", -1, "FormatError", "curve file does not match its directory"});
        input_error = true;
        return false;
    }
    std::vector<VortexCurve> curves;
    for (const auto& r : recs) curves.push_back(r.curve);
    std::vector<Eigen::Matrix3Xd> simplified;
    const TangleRecord rec = analyze_tangle(curves, mode_spec(h.system, h.N), k.seed, h.spacing,
                                            cfg.projection_retries, &t.failures, &simplified);
    for (std::size_t i = 0; i < recs.size(); ++i)
        recs[i].simplified = simplified[i].cols() ? std::optional(simplified[i]) : std::nullopt;
    std::ostringstream cs, as;
    write_curves(cs, h, recs);
    write_atomic(dir / "curves.txt", cs.str());
    write_analysis(as, rec);
    write_atomic(p, as.str());
    fill_counts(t, rec);
    t.depth_used = h.depth_used;
    t.analyze = StageState::Done;
    return true;
}

using StageFn = bool (*)(const RunConfig&, const Task&, TaskReport&, bool&);

RunReport run_stages(const RunConfig& cfg, const std::string& command, std::initializer_list<StageFn> stages)
{
    cfg.validate();
    const auto tasks = tasks_of(cfg);
    RunReport r;
    r.command = command;
    r.tasks.resize(tasks.size());
    std::vector<char> input_error(tasks.size(), 0);
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
        TaskReport& t = r.tasks[i];
        t.N = tasks[i].N;
        t.seed = tasks[i].seed;
        bool bad = false;
        for (StageFn f : stages)
            if (!f(cfg, tasks[i], t, bad)) break;
        input_error[i] = bad;
        for (const auto& f : t.failures)
            notice(to_string(cfg.system) + " N=" + std::to_string(t.N) + " seed=" + std::to_string(t.seed) + ": " +
                   f.stage + " " + f.error + (f.curve >= 0 ? " (curve " + std::to_string(f.curve) + ")" : "") + ": " +
                   f.message);
    });
    r.input_error = std::any_of(input_error.begin(), input_error.end(), [](char c) { return c != 0; });
    return r;
}

} // namespace

RunReport cmd_generate(const RunConfig& cfg) { return run_stages(cfg, "generate", {stage_generate}); }
RunReport cmd_trace(const RunConfig& cfg) { return run_stages(cfg, "trace", {stage_trace}); }
RunReport cmd_analyze(const RunConfig& cfg) { return run_stages(cfg, "analyze", {stage_analyze}); }

RunReport cmd_stats(const RunConfig& cfg)
{
    cfg.validate();
    RunReport r;
    r.command = "stats";
    // every analysis file below the output directory, in (system, N, seed) order
    struct Entry {
        SystemKind system;
        int N;
        std::uint64_t seed;
        fs::path dir;
        bool operator<(const Entry& o) const { return std::tie(system, N, seed) < std::tie(o.system, o.N, o.seed); }
    };
    std::vector<Entry> found;
    const fs::path root(cfg.output_dir);
    if (!fs::is_directory(root)) {
        r.failures.push_back({"stats", -1, "MissingInput", "no output directory " + root.string()});
        r.input_error = true;
        return r;
    }
    for (const auto& g : fs::directory_iterator(root)) {
        if (!g.is_directory()) continue;
        const std::string name = g.path().filename().string();
        const auto us = name.rfind("_N");
        if (us == std::string::npos) continue;
        SystemKind sys;
        int N;
        try {
            sys = parse_system(name.substr(0, us));
            N = io::parse_int<int>(name.substr(us + 2), 0);
        }
        catch (const std::exception&) {
            continue;
        }
        for (const auto& s : fs::directory_iterator(g.path())) {
            const std::string sn = s.path().filename().string();
            if (!s.is_directory() || sn.rfind("seed_", 0) != 0) continue;
            std::uint64_t seed;
            try {
                seed = io::parse_int<std::uint64_t>(sn.substr(5), 0);
            }
            catch (const std::exception&) {
                continue;
            }
            if (fs::exists(s.path() / "analysis.csv")) found.push_back({sys, N, seed, s.path()});
        }
    }
    std::sort(found.begin(), found.end());

    std::vector<TangleRecord> records;
    std::vector<SymmetryReport> audits;
    for (const auto& e : found) {
        TangleRecord rec;
        try {
            std::istringstream is(read_file(e.dir / "analysis.csv"));
            rec = read_analysis(is);
        }
        catch (const std::exception& ex) {
            r.failures.push_back({"stats", -1, "FormatError", (e.dir / "analysis.csv").string() + ": " + ex.what()});
            r.input_error = true;
            continue;
        }
        try {
            CurveFileHeader h;
            std::istringstream is(read_file(e.dir / "curves.txt"));
            const auto recs = read_curves(is, h);
            std::vector<VortexCurve> curves;
            for (const auto& c : recs) curves.push_back(c.curve);
            audits.push_back(symmetry_audit(curves, rec));
        }
        catch (const std::exception& ex) {
            r.failures.push_back({"stats", -1, "FormatError", (e.dir / "curves.txt").string() + ": " + ex.what()});
            r.input_error = true;
        }
        records.push_back(std::move(rec));
    }
    r.records = int(records.size());

    BinOptions bo;
    bo.bins_per_decade = cfg.bins_per_decade;
    bo.min_count = cfg.min_bin_count;
    if (cfg.fit_min > 0) bo.fit_min = cfg.fit_min;
    if (cfg.fit_max > 0) bo.fit_max = cfg.fit_max;
    std::vector<std::pair<SystemKind, UnknotTable>> fig2;
    std::vector<std::pair<SystemKind, ComplexityHistogram>> inset;
    for (SystemKind sys : {SystemKind::PeriodicCube, SystemKind::ThreeSphere, SystemKind::Harmonic3D}) {
        std::vector<TangleRecord> sub;
        for (const auto& rec : records)
            if (rec.system == sys) sub.push_back(rec);
        if (sub.empty()) continue;
        fig2.push_back({sys, unknot_probability(sub, bo)});
        inset.push_back({sys, complexity_histogram(sub, cfg.bins_per_decade)});
    }
    const fs::path out = root / "stats";
    std::ostringstream a, b, c, d, e;
    write_fig2_main(a, fig2);
    write_fig2_inset(b, inset);
    write_fig3(c, knotting_probability_vs_energy(records));
    write_arclength_check(d, arclength_energy_check(records));
    write_symmetry_audit(e, audits);
    write_atomic(out / "fig2_main.csv", a.str());
    write_atomic(out / "fig2_inset.csv", b.str());
    write_atomic(out / "fig3.csv", c.str());
    write_atomic(out / "arclength_check.csv", d.str());
    write_atomic(out / "symmetry_audit.csv", e.str());
    return r;
}

RunReport cmd_pipeline(const RunConfig& cfg)
{
    RunReport r = run_stages(cfg, "pipeline", {stage_generate, stage_trace, stage_analyze});
    const RunReport s = cmd_stats(cfg);
    r.records = s.records;
    r.failures = s.failures;
    r.input_error = r.input_error || s.input_error;
    return r;
}

void write_run_report(const fs::path& path, const RunConfig& cfg, const RunReport& r)
{
    using json = nlohmann::ordered_json;
    json j;
    j["format"] = "vk-run-report 1";
    j["command"] = r.command;
    j["config"] = to_config_text(cfg);
    j["exit_code"] = r.exit_code();
    auto failure = [](const Failure& f) {
        json x;
        x["stage"] = f.stage;
        if (f.curve >= 0) x["curve"] = f.curve;
        x["error"] = f.error;
        x["message"] = f.message;
        return x;
    };
    json tasks = json::array();
    int failed = 0, unanalyzed = 0;
    for (const auto& t : r.tasks) {
        json x;
        x["system"] = to_string(cfg.system);
        x["N"] = t.N;
        x["seed"] = t.seed;
        x["generate"] = to_string(t.generate);
        x["trace"] = to_string(t.trace);
        x["analyze"] = to_string(t.analyze);
        if (t.curves >= 0) x["curves"] = t.curves;
        if (t.eligible >= 0) x["eligible"] = t.eligible;
        if (t.knotted >= 0) x["knotted"] = t.knotted;
        if (t.unanalyzed >= 0) x["unanalyzed"] = t.unanalyzed;
        if (t.depth_used >= 0) x["depth_used"] = t.depth_used;
        json fs = json::array();
        for (const auto& f : t.failures) fs.push_back(failure(f));
        x["failures"] = fs;
        failed += !t.failures.empty();
        unanalyzed += std::max(0, t.unanalyzed);
        tasks.push_back(x);
    }
    j["tasks"] = tasks;
    json rf = json::array();
    for (const auto& f : r.failures) rf.push_back(failure(f));
    j["failures"] = rf;
    j["summary"] = {{"tasks", r.tasks.size()},
                    {"tasks_with_failures", failed},
                    {"unanalyzed_curves", unanalyzed},
                    {"records_aggregated", r.records}};
    write_atomic(path, j.dump(2) + "\n");
}

} // namespace vk
