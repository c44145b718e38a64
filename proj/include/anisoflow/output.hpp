#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisoflow/errors.hpp"
#include "anisoflow/polycurve.hpp"
#include "anisoflow/stepper.hpp"

namespace anisoflow {

// All floating-point output uses 17 significant digits so values round-trip
// exactly through text.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Writes via a temporary file and renames into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FlowError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw FlowError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw FlowError("rename failed for " + path.string() + ": " + ec.message());
}

inline const std::vector<std::string>& series_columns() {
    static const std::vector<std::string> cols = {
        "t",       "tau",     "area",      "length",  "energy",    "ratio",     "r_min",
        "r_max",   "mesh_ratio", "phi_min", "candidate", "err_area", "err_ratio", "conservation"};
    return cols;
}

inline std::string series_csv(const RunRecord& rec) {
    std::ostringstream out;
    const auto& cols = series_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& r : rec.series) {
        out << fmt17(r.t) << ',' << fmt17(r.tau) << ',' << fmt17(r.area) << ',' << fmt17(r.length)
            << ',' << fmt17(r.energy) << ',' << fmt17(r.ratio) << ',' << fmt17(r.r_min) << ','
            << fmt17(r.r_max) << ',' << fmt17(r.mesh_ratio) << ',' << fmt17(r.phi_min) << ','
            << r.candidate << ',' << fmt17(r.err_area) << ',' << fmt17(r.err_ratio) << ','
            << fmt17(r.conservation) << "\n";
    }
    return out.str();
}

// Snapshot format: one "x y" pair per line, vertices in order, no closing
// duplicate.
inline std::string curve_txt(const PolyCurve& curve) {
    std::ostringstream out;
    for (const auto& p : curve.pts) out << fmt17(p.x) << ' ' << fmt17(p.y) << "\n";
    return out.str();
}

inline PolyCurve read_curve_txt(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FlowError("cannot open curve file " + path.string());
    PolyCurve c;
    double x, y;
    while (in >> x >> y) c.pts.push_back({x, y});
    if (c.pts.size() < 3) throw DegenerateSpec("curve file " + path.string() + " holds fewer than 3 vertices");
    return c;
}

// Standalone SVG with equal-aspect axes; the optional reference polygon is
// drawn dashed underneath.
inline std::string curve_svg(const PolyCurve& curve, const PolyCurve* reference = nullptr,
                             int pixels = 640) {
    double xmin = curve.pts[0].x, xmax = xmin, ymin = curve.pts[0].y, ymax = ymin;
    const auto grow = [&](const PolyCurve& c) {
        for (const auto& p : c.pts) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    };
    grow(curve);
    if (reference) grow(*reference);
    const double span = std::max(xmax - xmin, ymax - ymin);
    const double pad = 0.05 * (span > 0.0 ? span : 1.0);
    const double w = (xmax - xmin) + 2 * pad;
    const double h = (ymax - ymin) + 2 * pad;
    const double side = std::max(w, h);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
        << pixels << "\" viewBox=\"" << fmt17(xmin - pad) << ' ' << fmt17(-(ymax + pad)) << ' '
        << fmt17(side) << ' ' << fmt17(side) << "\">\n";
    const auto polygon = [&](const PolyCurve& c, const char* style) {
        out << "  <polygon points=\"";
        for (std::size_t i = 0; i < c.pts.size(); ++i)
            out << (i ? " " : "") << fmt17(c.pts[i].x) << ',' << fmt17(-c.pts[i].y);
        out << "\" style=\"" << style << "\" vector-effect=\"non-scaling-stroke\"/>\n";
    };
    if (reference)
        polygon(*reference, "fill:none;stroke:#999999;stroke-width:0.5%;stroke-dasharray:1%,1%");
    polygon(curve, "fill:none;stroke:#003366;stroke-width:0.5%");
    out << "</svg>\n";
    return out.str();
}

struct EmitOptions {
    bool csv = true;
    bool snapshots = true;
    bool svg = true;
    const PolyCurve* reference = nullptr;  // drawn into every SVG when set
};

// Writes series.csv, snapshot_XXXX.{txt,svg} and snapshots.json into dir.
inline std::vector<std::filesystem::path> emit(const RunRecord& rec,
                                               const std::filesystem::path& dir,
                                               const EmitOptions& opt = {}) {
    namespace fs = std::filesystem;
    std::vector<fs::path> written;
    if (opt.csv) {
        const fs::path p = dir / "series.csv";
        write_file_atomic(p, series_csv(rec));
        written.push_back(p);
    }
    if (opt.snapshots || opt.svg) {
        nlohmann::json index = nlohmann::json::array();
        for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%04zu", k);
            nlohmann::json entry{{"t", rec.snapshots[k].t}};
            if (opt.snapshots) {
                const fs::path p = dir / (std::string(name) + ".txt");
                write_file_atomic(p, curve_txt(rec.snapshots[k].curve));
                written.push_back(p);
                entry["txt"] = p.filename().string();
            }
            if (opt.svg) {
                const fs::path p = dir / (std::string(name) + ".svg");
                write_file_atomic(p, curve_svg(rec.snapshots[k].curve, opt.reference));
                written.push_back(p);
                entry["svg"] = p.filename().string();
            }
            index.push_back(entry);
        }
        const fs::path p = dir / "snapshots.json";
        write_file_atomic(p, index.dump(2) + "\n");
        written.push_back(p);
    }
    return written;
}

}  // namespace anisoflow
