#include "lefschetz/scenes.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

// Exit codes: 0 ok, 2 config error, 3 tolerance failure, 4 numeric-domain error.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kToleranceFailure = 3;
constexpr int kNumericError = 4;

int run_check() {
    bool all = true;
    for (const auto& r : lefschetz::scenes::run_acceptance()) {
        std::printf("%s %s - %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all = all && r.pass;
    }
    return all ? kOk : kToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivariant-index scene runner"};
    std::string scene, config_path, out_path, format;
    std::vector<double> t_grid;
    int cutoff = -1, mesh = -1;
    bool check = false;
    app.add_option("--scene", scene, "Scene name");
    app.add_option("--config", config_path, "Config file: one JSON object");
    app.add_option("--t-grid", t_grid, "Heat times, descending (a,b,c)")->delimiter(',');
    app.add_option("--cutoff", cutoff, "Lattice cutoff (0: from the tail bound)");
    app.add_option("--mesh", mesh, "Quadrature mesh resolution");
    app.add_option("--out", out_path, "Report path (default: stdout)");
    app.add_option("--format", format, "Report format: json|csv");
    app.add_flag("--check", check, "Run the seven-point verification suite and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        if (check) return run_check();

        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) {
                std::cerr << "config: cannot open '" << config_path << "'\n";
                return kConfigError;
            }
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                std::cerr << "config: malformed document: " << e.what() << "\n";
                return kConfigError;
            }
            if (!doc.is_object()) {
                std::cerr << "config: expected a single top-level object\n";
                return kConfigError;
            }
        }
        // Flags override config-file fields.
        if (!scene.empty()) doc["scene"] = scene;
        if (!t_grid.empty()) doc["t_grid"] = t_grid;
        if (cutoff >= 0) doc["lattice_cutoff"] = cutoff;
        if (mesh >= 0) doc["mesh_resolution"] = mesh;
        if (!out_path.empty()) doc["output"] = out_path;
        if (!format.empty()) doc["format"] = format;

        const lefschetz::scenes::SceneConfig cfg = lefschetz::scenes::load_config(doc.dump());

        const auto start = std::chrono::steady_clock::now();
        const lefschetz::scenes::RunReport report = lefschetz::scenes::run_scene(cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const std::string rendered = lefschetz::scenes::render_report(report, cfg.format);
        if (cfg.output.empty()) {
            std::cout << rendered;
        } else {
            std::ofstream out(cfg.output, std::ios::binary);
            if (!out) {
                std::cerr << "config: cannot write '" << cfg.output << "'\n";
                return kConfigError;
            }
            out << rendered;
        }
        // Timings stay out of the report so identical configs give identical bytes.
        std::fprintf(stderr, "scene %s finished in %.3f s\n", cfg.scene.c_str(), secs);

        if (!report.ok) {
            std::fprintf(stderr, "tolerance failure:\n");
            for (const auto& row : report.checks)
                std::fprintf(stderr, "  %-40s delta=%11.4e tol=%11.4e %s\n", row.name.c_str(),
                             row.delta, row.tolerance, row.pass ? "ok" : "FAIL");
            return kToleranceFailure;
        }
        return kOk;
    } catch (const lefschetz::scenes::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric domain error: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::range_error& e) {
        std::cerr << "numeric domain error: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericError;
    }
}
