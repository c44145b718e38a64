#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/curves.hpp"
#include "anisoflow/errors.hpp"

namespace anisoflow {

using json = nlohmann::json;

// One run of the flow, as described by a config file.
struct FlowConfig {
    CurveSpec curve;
    Anisotropy sigma = Anisotropy::constant(1.0);
    int n = 400;
    double final_time = 1.5;
    double omega = 1000.0;
    double lambda = 1.0;
    double max_tau = 0.0;        // 0 -> 1e-3 * final_time
    double snapshot_dt = 0.0;    // 0 -> final_time / 100
    std::size_t snapshot_stride = 0;
    std::size_t series_stride = 1;
    int quad_nodes = Anisotropy::stability_grid;
    std::string out_dir;
    unsigned seed = 0;           // consumed only by randomized test tooling
    std::string label;
    json raw;                    // config as given, echoed into the summary
};

namespace cfgdetail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing");
    return j.at(key);
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback,
                        const std::string& path) {
    if (!j.contains(key)) return fallback;
    return number(j.at(key), path.empty() ? key : path + "." + key);
}

inline int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

inline std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

}  // namespace cfgdetail

// {"kind":"constant","c":..} | {"kind":"cosine","eps":..,"m":..}
// | {"kind":"mixed","weights":[w1,w2],"components":[spec,spec]}
inline Anisotropy parse_anisotropy(const json& j, const std::string& path) {
    using namespace cfgdetail;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::string kind = text(require(j, "kind", path), path + ".kind");
    try {
        if (kind == "constant") {
            return Anisotropy::constant(number_or(j, "c", 1.0, path));
        }
        if (kind == "cosine") {
            const double eps = number(require(j, "eps", path), path + ".eps");
            const int m = integer(require(j, "m", path), path + ".m");
            return Anisotropy::cosine(eps, m);
        }
        if (kind == "mixed") {
            const json& w = require(j, "weights", path);
            const json& comp = require(j, "components", path);
            if (!w.is_array() || w.size() != 2)
                throw ConfigError(path + ".weights", "expected an array of two numbers");
            if (!comp.is_array() || comp.size() != 2)
                throw ConfigError(path + ".components", "expected an array of two anisotropies");
            return Anisotropy::mixed(number(w[0], path + ".weights[0]"),
                                     parse_anisotropy(comp[0], path + ".components[0]"),
                                     number(w[1], path + ".weights[1]"),
                                     parse_anisotropy(comp[1], path + ".components[1]"));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const FlowError& err) {
        throw ConfigError(path, err.what());
    }
    throw ConfigError(path + ".kind", "unknown anisotropy kind '" + kind + "'");
}

inline CurveSpec parse_curve(const json& j, int n, const Anisotropy& flow_sigma,
                             const std::string& path) {
    using namespace cfgdetail;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    CurveSpec spec;
    spec.n = n;
    const std::string kind = text(require(j, "kind", path), path + ".kind");
    if (kind == "ellipse") {
        spec.kind = CurveKind::Ellipse;
        spec.a = number_or(j, "a", 2.0, path);
        spec.b = number_or(j, "b", 1.0, path);
    } else if (kind == "dumbbell") {
        spec.kind = CurveKind::Dumbbell;
    } else if (kind == "wave3") {
        spec.kind = CurveKind::Wave3;
    } else if (kind == "wave5") {
        spec.kind = CurveKind::Wave5;
    } else if (kind == "thin_dumbbell") {
        spec.kind = CurveKind::ThinDumbbell;
        spec.beam = number_or(j, "beam", 3.0, path);
        spec.rad = number_or(j, "rad", 1.0, path);
        spec.eps = number_or(j, "eps", 0.1, path);
    } else if (kind == "wulff") {
        spec.kind = CurveKind::Wulff;
        spec.scale = number_or(j, "scale", 1.0, path);
        const std::string mode =
            j.contains("sampling") ? text(j.at("sampling"), path + ".sampling")
                                   : "uniform_arclength";
        if (mode == "uniform_nu")
            spec.sampling = WulffSampling::UniformNu;
        else if (mode == "uniform_arclength")
            spec.sampling = WulffSampling::UniformArclength;
        else
            throw ConfigError(path + ".sampling", "unknown sampling mode '" + mode + "'");
        if (j.contains("sigma")) spec.shape_sigma = parse_anisotropy(j.at("sigma"), path + ".sigma");
        else spec.shape_sigma = flow_sigma;
    } else if (kind == "counterexample") {
        spec.kind = CurveKind::Counterexample;
        spec.radius = number_or(j, "r", 1.5, path);
        spec.blend = number_or(j, "blend", 0.15, path);
        if (j.contains("sigma")) spec.shape_sigma = parse_anisotropy(j.at("sigma"), path + ".sigma");
        else spec.shape_sigma = flow_sigma;
    } else if (kind == "file") {
        spec.kind = CurveKind::File;
        spec.path = text(require(j, "path", path), path + ".path");
    } else {
        throw ConfigError(path + ".kind", "unknown curve kind '" + kind + "'");
    }
    return spec;
}

inline FlowConfig parse_config(const json& j) {
    using namespace cfgdetail;
    if (!j.is_object()) throw ConfigError("", "config root must be an object");
    FlowConfig cfg;
    cfg.raw = j;
    cfg.sigma = parse_anisotropy(require(j, "sigma", ""), "sigma");
    cfg.n = integer(require(j, "N", ""), "N");
    if (cfg.n < 16) throw ConfigError("N", "flow runs need N >= 16");
    cfg.final_time = number(require(j, "T", ""), "T");
    if (!(cfg.final_time > 0.0)) throw ConfigError("T", "final time must be positive");
    cfg.omega = number_or(j, "omega", 1000.0, "omega");
    if (cfg.omega < 0.0) throw ConfigError("omega", "relaxation rate must be >= 0");
    cfg.lambda = number_or(j, "lambda", 1.0, "lambda");
    if (!(cfg.lambda > 0.0)) throw ConfigError("lambda", "dominance margin must be positive");
    cfg.max_tau = number_or(j, "max_tau", 0.0, "max_tau");
    cfg.snapshot_dt = number_or(j, "snapshot_dt", 0.0, "snapshot_dt");
    if (j.contains("snapshot_stride"))
        cfg.snapshot_stride =
            static_cast<std::size_t>(integer(j.at("snapshot_stride"), "snapshot_stride"));
    if (j.contains("series_stride"))
        cfg.series_stride =
            static_cast<std::size_t>(integer(j.at("series_stride"), "series_stride"));
    if (j.contains("quad_nodes")) cfg.quad_nodes = integer(j.at("quad_nodes"), "quad_nodes");
    if (j.contains("out")) cfg.out_dir = text(j.at("out"), "out");
    if (j.contains("seed")) cfg.seed = static_cast<unsigned>(integer(j.at("seed"), "seed"));
    if (j.contains("label")) cfg.label = text(j.at("label"), "label");
    cfg.curve = parse_curve(require(j, "curve", ""), cfg.n, cfg.sigma, "curve");
    return cfg;
}

// Experiment presets. The cosine amplitude follows eps = 0.99 / (m^2 - 1)
// except where a gentler profile keeps the coarse meshes admissible.
inline std::map<std::string, json> presets() {
    const auto cosine = [](int m) {
        return json{{"kind", "cosine"}, {"eps", 0.99 / (m * m - 1)}, {"m", m}};
    };
    // sqrt(pi) * sigma + sqrt(|W_sigma|): the profile whose Wulff boundary
    // starts the area-decreasing run.
    const auto mixed_bar = [&](int m) {
        const double eps = 0.99 / (m * m - 1);
        const double area = cosine_wulff_area(eps, m);
        return json{{"kind", "mixed"},
                    {"weights", {std::sqrt(std::numbers::pi), std::sqrt(area)}},
                    {"components", {cosine(m), json{{"kind", "constant"}, {"c", 1.0}}}}};
    };
    const json gentle3{{"kind", "cosine"}, {"eps", 0.08}, {"m", 3}};

    std::map<std::string, json> out;
    out["fig3"] = json{{"label", "fig3"},
                       {"sigma", cosine(6)},
                       {"curve", {{"kind", "wulff"}, {"sampling", "uniform_nu"}, {"sigma", mixed_bar(6)}}},
                       {"N", 120},
                       {"T", 1.5},
                       {"omega", 1000.0}};
    out["fig4"] = json{{"label", "fig4"},
                       {"sigma", cosine(6)},
                       {"curve",
                        {{"kind", "wulff"}, {"sampling", "uniform_arclength"}, {"sigma", mixed_bar(6)}}},
                       {"N", 120},
                       {"T", 1.5},
                       {"omega", 1000.0}};
    out["fig5a"] = json{{"label", "fig5a"},
                        {"sigma", cosine(2)},
                        {"curve", {{"kind", "ellipse"}, {"a", 2.0}, {"b", 1.0}}},
                        {"N", 256},
                        {"T", 1.5},
                        {"omega", 1000.0}};
    out["fig5b"] = json{{"label", "fig5b"},
                        {"sigma", cosine(3)},
                        {"curve", {{"kind", "dumbbell"}}},
                        {"N", 256},
                        {"T", 1.5},
                        {"omega", 1000.0}};
    out["fig5c"] = json{{"label", "fig5c"},
                        {"sigma", cosine(4)},
                        {"curve", {{"kind", "wave3"}}},
                        {"N", 256},
                        {"T", 1.5},
                        {"omega", 1000.0}};
    out["fig5d"] = json{{"label", "fig5d"},
                        {"sigma", cosine(5)},
                        {"curve", {{"kind", "wave5"}}},
                        {"N", 256},
                        {"T", 1.5},
                        {"omega", 1000.0}};
    out["fig5e"] = json{{"label", "fig5e"},
                        {"sigma", cosine(6)},
                        {"curve", {{"kind", "thin_dumbbell"}, {"beam", 3.0}, {"rad", 1.0}, {"eps", 0.1}}},
                        {"N", 400},
                        {"T", 1.5},
                        {"omega", 1000.0}};
    out["fig6"] = json{{"label", "fig6"},
                       {"sigma", gentle3},
                       {"curve", {{"kind", "counterexample"}, {"r", 1.5}, {"blend", 0.15}}},
                       {"N", 600},
                       {"T", 0.02},
                       {"omega", 1000.0},
                       {"snapshot_dt", 0.004}};
    out["stationary"] = json{{"label", "stationary"},
                             {"sigma", gentle3},
                             {"curve", {{"kind", "wulff"}, {"sampling", "uniform_arclength"}}},
                             {"N", 512},
                             {"T", 0.5},
                             {"omega", 1000.0},
                             {"snapshot_dt", 0.05}};
    out["iso-ellipse"] = json{{"label", "iso-ellipse"},
                              {"sigma", {{"kind", "constant"}, {"c", 1.0}}},
                              {"curve", {{"kind", "ellipse"}, {"a", 2.0}, {"b", 1.0}}},
                              {"N", 400},
                              {"T", 1.5},
                              {"omega", 1000.0}};
    return out;
}

inline json preset_config(const std::string& name) {
    const auto all = presets();
    const auto it = all.find(name);
    if (it == all.end()) throw ConfigError("preset", "unknown preset '" + name + "'");
    return it->second;
}

// Applies "dotted.path=value" overrides; values parse as JSON when possible,
// otherwise they are taken as strings.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override", "expected key=value, got '" + assignment + "'");
    std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::string pointer = "/";
    for (char ch : key) pointer += (ch == '.') ? '/' : ch;
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;
    }
    try {
        j[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception& err) {
        throw ConfigError(key, err.what());
    }
}

}  // namespace anisoflow
