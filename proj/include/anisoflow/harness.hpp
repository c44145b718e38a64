#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisoflow/config.hpp"
#include "anisoflow/curves.hpp"
#include "anisoflow/intersect.hpp"
#include "anisoflow/output.hpp"
#include "anisoflow/stepper.hpp"

namespace anisoflow {

struct RunOutput {
    RunRecord record;
    PolyCurve initial;
    // Present for counterexample runs.
    std::optional<ComparisonCounterexample> comparison;
    std::optional<double> crossing_time;
};

// Earliest snapshot time at which the evolved polygon properly crosses the
// reference polygon. Segment pairs inside the designated coincidence arcs
// are skipped: those segments are copies of each other at t = 0 by
// construction, so contact there is not a crossing.
inline std::optional<double> detect_crossing(const RunRecord& rec, const PolyCurve& reference,
                                             const SegmentRange& curve_arc = {},
                                             const SegmentRange& reference_arc = {}) {
    for (const auto& snap : rec.snapshots) {
        if (polygons_properly_cross(snap.curve, reference, curve_arc, reference_arc))
            return snap.t;
    }
    return std::nullopt;
}

// Builds the initial curve, runs the flow and (when out_dir is set) writes
// series.csv, snapshots, SVG plots and run_summary.json.
inline RunOutput run(const FlowConfig& cfg) {
    RunOutput out;

    CurveSpec spec = cfg.curve;
    spec.n = cfg.n;
    if (spec.kind == CurveKind::File) {
        out.initial = read_curve_txt(spec.path);
    } else if (spec.kind == CurveKind::Counterexample) {
        out.comparison = counterexample_curve(spec.shape_sigma.value_or(cfg.sigma), spec.radius,
                                              spec.blend, spec.n, cfg.quad_nodes);
        out.initial = out.comparison->curve;
    } else {
        out.initial = generate(spec, cfg.sigma);
    }

    FlowParams params;
    params.sigma = cfg.sigma;
    params.wulff_area_value = wulff_area(cfg.sigma, cfg.quad_nodes);
    params.final_time = cfg.final_time;
    params.omega = cfg.omega;
    params.lambda = cfg.lambda;
    params.max_tau = cfg.max_tau;
    params.snapshot_dt = cfg.snapshot_dt > 0.0 ? cfg.snapshot_dt : cfg.final_time / 100.0;
    params.snapshot_stride = cfg.snapshot_stride;
    params.series_stride = cfg.series_stride;
    params.quad_nodes = cfg.quad_nodes;

    out.record = evolve(out.initial, params);

    if (out.comparison)
        out.crossing_time = detect_crossing(out.record, out.comparison->reference,
                                            out.comparison->curve_arc,
                                            out.comparison->reference_arc);

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir(cfg.out_dir);
        EmitOptions opts;
        if (out.comparison) opts.reference = &out.comparison->reference;
        emit(out.record, dir, opts);
        if (out.comparison)
            write_file_atomic(dir / "reference.txt", curve_txt(out.comparison->reference));

        json summary;
        summary["config"] = cfg.raw;
        summary["status"] = out.record.ok ? "ok" : "error";
        if (!out.record.ok) {
            summary["error"] = out.record.error;
            summary["error_step"] = out.record.error_step;
        }
        summary["steps"] = out.record.steps;
        summary["final_time"] = out.record.final_time;
        if (!out.record.series.empty()) {
            const auto& last = out.record.series.back();
            summary["final"] = {{"area", last.area},
                                {"length", last.length},
                                {"energy", last.energy},
                                {"ratio", last.ratio},
                                {"mesh_ratio", last.mesh_ratio}};
        }
        summary["wulff_area"] = params.wulff_area_value;
        if (out.crossing_time)
            summary["crossing_time"] = *out.crossing_time;
        else if (out.comparison)
            summary["crossing_time"] = nullptr;
        json final_curve = json::array();
        for (const auto& p : out.record.final_curve.pts) final_curve.push_back({p.x, p.y});
        summary["final_curve"] = std::move(final_curve);
        write_file_atomic(dir / "run_summary.json", summary.dump(2) + "\n");
    }
    return out;
}

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// Re-checks the record invariants from an emitted CSV: column layout, time
// monotonicity, finiteness, per-step dissipation of the anisoperimetric
// ratio and sane candidate tags.
inline VerifyReport verify_series_csv(const std::filesystem::path& path) {
    VerifyReport rep;
    std::ifstream in(path);
    if (!in) {
        rep.checks.push_back({"readable", false, "cannot open " + path.string()});
        return rep;
    }
    std::string header;
    std::getline(in, header);
    std::string expected;
    for (std::size_t i = 0; i < series_columns().size(); ++i)
        expected += (i ? "," : "") + series_columns()[i];
    rep.checks.push_back({"header", header == expected, header});

    std::vector<std::vector<double>> rows;
    std::string line;
    bool parse_ok = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                parse_ok = false;
            }
        }
        if (row.size() != series_columns().size()) parse_ok = false;
        rows.push_back(std::move(row));
    }
    rep.checks.push_back({"parse", parse_ok && !rows.empty(),
                          std::to_string(rows.size()) + " data rows"});
    if (!parse_ok || rows.empty()) return rep;

    bool finite = true, increasing = true, dissipative = true, candidates = true;
    double worst_jump = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (double v : rows[i]) finite = finite && std::isfinite(v);
        const int cand = static_cast<int>(rows[i][10]);
        candidates = candidates && cand >= 0 && cand <= 3;
        if (i > 0) {
            increasing = increasing && rows[i][0] > rows[i - 1][0];
            const double jump = rows[i][5] - rows[i - 1][5];
            worst_jump = std::max(worst_jump, jump);
            dissipative = dissipative && jump <= 1e-9;
        }
    }
    rep.checks.push_back({"finite", finite, ""});
    rep.checks.push_back({"time strictly increasing", increasing, ""});
    rep.checks.push_back({"ratio non-increasing (1e-9/step)", dissipative,
                          "worst step increase " + fmt17(worst_jump)});
    rep.checks.push_back({"candidate tags in range", candidates, ""});
    return rep;
}

}  // namespace anisoflow
