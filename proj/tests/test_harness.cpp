#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "anisoflow/config.hpp"
#include "anisoflow/harness.hpp"
#include "anisoflow/output.hpp"
#include "oracles.hpp"

using namespace anisoflow;
using Catch::Approx;

namespace {

json small_run_config() {
    return json{{"sigma", {{"kind", "constant"}, {"c", 1.0}}},
                {"curve", {{"kind", "ellipse"}, {"a", 2.0}, {"b", 1.0}}},
                {"N", 64},
                {"T", 0.002},
                {"omega", 1000.0}};
}

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("anisoflow_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing reports field paths", "[harness]") {
    CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
    try {
        parse_config(json{{"sigma", {{"kind", "constant"}}}, {"N", 64}, {"T", 1.0}});
        FAIL("expected missing curve to throw");
    } catch (const ConfigError& err) {
        CHECK(err.path == "curve");
    }
    try {
        auto j = small_run_config();
        j["sigma"] = {{"kind", "cosine"}, {"m", 3}};
        parse_config(j);
        FAIL("expected missing eps to throw");
    } catch (const ConfigError& err) {
        CHECK(err.path == "sigma.eps");
    }
    try {
        auto j = small_run_config();
        j["N"] = 8;
        parse_config(j);
        FAIL("expected N >= 16 to be enforced");
    } catch (const ConfigError& err) {
        CHECK(err.path == "N");
    }
    // unstable cosine parameters surface as config errors on the sigma path
    try {
        auto j = small_run_config();
        j["sigma"] = {{"kind", "cosine"}, {"eps", 0.2}, {"m", 3}};
        parse_config(j);
        FAIL("expected unstable anisotropy to throw");
    } catch (const ConfigError& err) {
        CHECK(err.path == "sigma");
    }
}

TEST_CASE("preset configs parse and overrides apply", "[harness]") {
    for (const auto& [name, cfg] : presets()) {
        INFO(name);
        CHECK_NOTHROW(parse_config(cfg));
    }
    auto j = preset_config("fig4");
    apply_override(j, "N=512");
    apply_override(j, "T=0.25");
    apply_override(j, "curve.sampling=uniform_nu");
    const auto cfg = parse_config(j);
    CHECK(cfg.n == 512);
    CHECK(cfg.final_time == 0.25);
    CHECK(cfg.curve.sampling == WulffSampling::UniformNu);
}

TEST_CASE("csv emission shape and determinism", "[harness]") {
    auto j = small_run_config();
    const auto dir = temp_dir("csv");
    j["out"] = (dir / "a").string();
    const auto out1 = run(parse_config(j));
    REQUIRE(out1.record.ok);

    std::ifstream csv(dir / "a" / "series.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "t,tau,area,length,energy,ratio,r_min,r_max,mesh_ratio,phi_min,candidate,err_area,"
          "err_ratio,conservation");
    std::size_t rows = 0, cols_ok = 0;
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        ++rows;
        cols_ok += std::count(line.begin(), line.end(), ',') == 13;
    }
    CHECK(rows == out1.record.series.size());
    CHECK(cols_ok == rows);

    // identical config -> bit-identical CSV
    j["out"] = (dir / "b").string();
    const auto out2 = run(parse_config(j));
    REQUIRE(out2.record.ok);
    std::ifstream f1(dir / "a" / "series.csv"), f2(dir / "b" / "series.csv");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    std::filesystem::remove_all(dir);
}

TEST_CASE("snapshot text and svg", "[harness]") {
    PolyCurve sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    const std::string txt = curve_txt(sq);
    CHECK(txt == "0 0\n1 0\n1 1\n0 1\n");

    const auto dir = temp_dir("snap");
    write_file_atomic(dir / "c.txt", txt);
    const auto back = read_curve_txt(dir / "c.txt");
    REQUIRE(back.size() == 4);
    CHECK(back.pts[2].x == 1.0);
    CHECK(back.pts[2].y == 1.0);

    const std::string svg = curve_svg(sq);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);
    CHECK(svg.find("1,-1 0,-1") != std::string::npos);  // y axis flipped for screen coordinates
    std::filesystem::remove_all(dir);
}

TEST_CASE("run emits snapshots and a summary", "[harness]") {
    auto j = small_run_config();
    j["snapshot_dt"] = 0.0005;
    const auto dir = temp_dir("emit");
    j["out"] = (dir / "run").string();
    const auto out = run(parse_config(j));
    REQUIRE(out.record.ok);
    CHECK(std::filesystem::exists(dir / "run" / "series.csv"));
    CHECK(std::filesystem::exists(dir / "run" / "snapshot_0000.txt"));
    CHECK(std::filesystem::exists(dir / "run" / "snapshot_0000.svg"));
    CHECK(std::filesystem::exists(dir / "run" / "snapshots.json"));
    CHECK(std::filesystem::exists(dir / "run" / "run_summary.json"));

    std::ifstream s(dir / "run" / "run_summary.json");
    const json summary = json::parse(s);
    CHECK(summary.at("status") == "ok");
    CHECK(summary.at("final_curve").size() == 64);
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify accepts good runs and flags doctored ones", "[harness]") {
    auto j = small_run_config();
    const auto dir = temp_dir("verify");
    j["out"] = (dir / "run").string();
    const auto out = run(parse_config(j));
    REQUIRE(out.record.ok);
    const auto good = verify_series_csv(dir / "run" / "series.csv");
    CHECK(good.ok());

    // doctor one ratio entry upward so dissipation fails
    std::ifstream in(dir / "run" / "series.csv");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const auto rec = out.record;
    const std::string needle = fmt17(rec.series[2].ratio);
    const auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, needle.size(), fmt17(rec.series[2].ratio + 1.0));
    write_file_atomic(dir / "run" / "doctored.csv", text);
    const auto bad = verify_series_csv(dir / "run" / "doctored.csv");
    CHECK_FALSE(bad.ok());
    std::filesystem::remove_all(dir);
}

TEST_CASE("detect crossing on static squares", "[harness]") {
    RunRecord rec;
    PolyCurve sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    PolyCurve offset = sq;
    for (auto& p : offset.pts) p += Vec2{0.5, 0.5};
    rec.snapshots.push_back({0.0, offset});
    CHECK(detect_crossing(rec, sq).value() == 0.0);

    RunRecord clean;
    PolyCurve far = sq;
    for (auto& p : far.pts) p += Vec2{3.0, 0.0};
    clean.snapshots.push_back({0.0, far});
    CHECK_FALSE(detect_crossing(clean, sq).has_value());
}

TEST_CASE("file-backed curves load through the harness", "[harness]") {
    const auto dir = temp_dir("file");
    PolyCurve hex;
    for (int i = 0; i < 32; ++i) {
        const double th = two_pi * i / 32;
        hex.pts.push_back({std::cos(th), std::sin(th)});
    }
    write_file_atomic(dir / "curve.txt", curve_txt(hex));
    json j = small_run_config();
    j["curve"] = {{"kind", "file"}, {"path", (dir / "curve.txt").string()}};
    j["N"] = 32;
    const auto out = run(parse_config(j));
    CHECK(out.record.ok);
    CHECK(out.initial.size() == 32);
    std::filesystem::remove_all(dir);
}
