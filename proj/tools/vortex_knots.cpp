// vortex-knots: generate | trace | analyze | stats | pipeline
//
//   vortex-knots pipeline --system sphere -N 5,7 --seeds 10 --out runs/s
//   vortex-knots stats --out runs/s
//   vortex-knots pipeline --config run.toml --workers 4
//
// Exit status: 0 success, 1 partial (failed tasks or unanalyzed curves),
// 2 configuration or input error.

#include "vk/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    vk::RunConfig cfg;
    cfg.output_dir = vk::default_output_dir();

    CLI::App app{"Knotted nodal lines in random degenerate eigenfunctions"};
    app.fallthrough();
    app.require_subcommand(1);
    vk::bind_options(app, cfg);
    bool print_config = false;
    app.add_flag("--print-config", print_config, "print the effective configuration and exit");

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"generate", "draw random superpositions and write their manifests"},
        {"trace", "track the vortex lines of every manifest"},
        {"analyze", "simplify curves and compute knot invariants"},
        {"stats", "aggregate every analysis file under the output directory"},
        {"pipeline", "generate, trace, analyze and aggregate"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (print_config) {
        std::cout << vk::to_config_text(cfg);
        return 0;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        cfg.validate();
        vk::RunReport r;
        if (cmd == "generate") r = vk::cmd_generate(cfg);
        else if (cmd == "trace") r = vk::cmd_trace(cfg);
        else if (cmd == "analyze") r = vk::cmd_analyze(cfg);
        else if (cmd == "stats") r = vk::cmd_stats(cfg);
        else r = vk::cmd_pipeline(cfg);
        vk::write_run_report(std::filesystem::path(cfg.output_dir) / "run_report.json", cfg, r);

        int failed = 0, unanalyzed = 0;
        for (const auto& t : r.tasks) {
            failed += !t.failures.empty();
            unanalyzed += std::max(0, t.unanalyzed);
        }
        std::cout << cmd << ": " << r.tasks.size() << " tasks, " << failed << " with failures, " << unanalyzed
                  << " unanalyzed curves";
        if (cmd == "stats" || cmd == "pipeline") std::cout << ", " << r.records << " records aggregated";
        std::cout << "\nreport: " << (std::filesystem::path(cfg.output_dir) / "run_report.json").string() << '\n';
        return r.exit_code();
    }
    catch (const vk::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
