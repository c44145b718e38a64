// Command-line driver for the anisoperimetric-ratio gradient flow.
//
//   anisoflow run <config.json> [--out DIR]
//   anisoflow preset <name> [--out DIR] [--override key=value ...] [--list] [--emit DIR]
//   anisoflow verify <series.csv>
//   anisoflow constants --sigma SPEC [--mu SPEC] [--nodes N]
//
// Anisotropy SPEC is either inline JSON ('{"kind":"cosine","eps":0.08,"m":3}')
// or the shorthand constant:<c> / cosine:<eps>,<m>.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/config.hpp"
#include "anisoflow/harness.hpp"
#include "anisoflow/output.hpp"

namespace {

using anisoflow::json;

json parse_sigma_arg(const std::string& text) {
    if (!text.empty() && text.front() == '{') return json::parse(text);
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "constant") {
        const double c = colon == std::string::npos ? 1.0 : std::stod(text.substr(colon + 1));
        return json{{"kind", "constant"}, {"c", c}};
    }
    if (kind == "cosine") {
        if (colon == std::string::npos)
            throw anisoflow::ConfigError("sigma", "cosine needs eps,m");
        const std::string rest = text.substr(colon + 1);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw anisoflow::ConfigError("sigma", "cosine needs eps,m");
        return json{{"kind", "cosine"},
                    {"eps", std::stod(rest.substr(0, comma))},
                    {"m", std::stoi(rest.substr(comma + 1))}};
    }
    throw anisoflow::ConfigError("sigma", "cannot parse anisotropy '" + text + "'");
}

int execute(const json& config_json, const std::string& out_dir) {
    json cfg_json = config_json;
    if (!out_dir.empty()) cfg_json["out"] = out_dir;
    const auto cfg = anisoflow::parse_config(cfg_json);
    const auto result = anisoflow::run(cfg);

    const auto& rec = result.record;
    std::printf("steps: %zu  final t: %s\n", rec.steps, anisoflow::fmt17(rec.final_time).c_str());
    if (!rec.series.empty()) {
        const auto& last = rec.series.back();
        std::printf("final: A=%s L=%s L_sigma=%s Pi=%s mesh=%s\n",
                    anisoflow::fmt17(last.area).c_str(), anisoflow::fmt17(last.length).c_str(),
                    anisoflow::fmt17(last.energy).c_str(), anisoflow::fmt17(last.ratio).c_str(),
                    anisoflow::fmt17(last.mesh_ratio).c_str());
    }
    if (result.crossing_time)
        std::printf("reference crossing at t = %s\n",
                    anisoflow::fmt17(*result.crossing_time).c_str());
    else if (result.comparison)
        std::printf("no reference crossing detected\n");
    if (!rec.ok) {
        std::fprintf(stderr, "run stopped at step %zu: %s\n", rec.error_step, rec.error.c_str());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisoperimetric-ratio gradient flow of closed plane curves"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* cmd_run = app.add_subcommand("run", "run a flow from a config file");
    cmd_run->add_option("config", config_path, "JSON config file")->required();
    cmd_run->add_option("--out", out_dir, "output directory (overrides config)");

    std::string preset_name, emit_dir;
    std::vector<std::string> overrides;
    bool list_presets = false;
    auto* cmd_preset = app.add_subcommand("preset", "run a named experiment preset");
    cmd_preset->add_option("name", preset_name, "preset name (fig3..fig6, stationary, ...)");
    cmd_preset->add_option("--out", out_dir, "output directory");
    cmd_preset->add_option("--override", overrides, "key=value config overrides");
    cmd_preset->add_flag("--list", list_presets, "list available presets");
    cmd_preset->add_option("--emit", emit_dir, "write all preset config files to a directory");

    std::string csv_path;
    auto* cmd_verify = app.add_subcommand("verify", "re-check invariants of an emitted series CSV");
    cmd_verify->add_option("record", csv_path, "series.csv produced by a run")->required();

    std::string sigma_text, mu_text = "constant:1";
    int nodes = anisoflow::Anisotropy::stability_grid;
    auto* cmd_const = app.add_subcommand("constants", "print Wulff-shape constants");
    cmd_const->add_option("--sigma", sigma_text, "anisotropy")->required();
    cmd_const->add_option("--mu", mu_text, "second anisotropy (default: constant 1)");
    cmd_const->add_option("--nodes", nodes, "quadrature nodes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::fprintf(stderr, "cannot open %s\n", config_path.c_str());
                return 1;
            }
            return execute(json::parse(in), out_dir);
        }
        if (cmd_preset->parsed()) {
            if (list_presets) {
                for (const auto& [name, cfg] : anisoflow::presets())
                    std::printf("%s\n", name.c_str());
                return 0;
            }
            if (!emit_dir.empty()) {
                for (const auto& [name, cfg] : anisoflow::presets())
                    anisoflow::write_file_atomic(std::filesystem::path(emit_dir) / (name + ".json"),
                                                 cfg.dump(2) + "\n");
                return 0;
            }
            if (preset_name.empty()) {
                std::fprintf(stderr, "preset name required (or --list / --emit)\n");
                return 1;
            }
            json cfg = anisoflow::preset_config(preset_name);
            for (const auto& ov : overrides) anisoflow::apply_override(cfg, ov);
            return execute(cfg, out_dir);
        }
        if (cmd_verify->parsed()) {
            const auto report = anisoflow::verify_series_csv(csv_path);
            for (const auto& c : report.checks)
                std::printf("%-36s %s%s%s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                            c.detail.empty() ? "" : "  ", c.detail.c_str());
            return report.ok() ? 0 : 1;
        }
        if (cmd_const->parsed()) {
            const auto sigma = anisoflow::parse_anisotropy(parse_sigma_arg(sigma_text), "sigma");
            const auto mu = anisoflow::parse_anisotropy(parse_sigma_arg(mu_text), "mu");
            const double w_sigma = anisoflow::wulff_area(sigma, nodes);
            const double w_mu = anisoflow::wulff_area(mu, nodes);
            std::printf("|W_sigma|        = %s\n", anisoflow::fmt17(w_sigma).c_str());
            std::printf("|W_mu|           = %s\n", anisoflow::fmt17(w_mu).c_str());
            std::printf("L_sigma(dW_mu)   = %s\n",
                        anisoflow::fmt17(anisoflow::wulff_energy(sigma, mu, nodes)).c_str());
            std::printf("L_mu(dW_sigma)   = %s\n",
                        anisoflow::fmt17(anisoflow::wulff_energy(mu, sigma, nodes)).c_str());
            std::printf("K_{sigma,mu}     = %s\n",
                        anisoflow::fmt17(anisoflow::mixed_constant(sigma, mu, nodes)).c_str());
            std::printf("minimizer        = sqrt(|W_mu|) sigma + sqrt(|W_sigma|) mu = %s sigma + %s mu\n",
                        anisoflow::fmt17(std::sqrt(w_mu)).c_str(),
                        anisoflow::fmt17(std::sqrt(w_sigma)).c_str());
            return 0;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
