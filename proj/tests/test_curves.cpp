#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "anisoflow/curves.hpp"
#include "anisoflow/intersect.hpp"
#include "anisoflow/polycurve.hpp"
#include "oracles.hpp"

using namespace anisoflow;
using Catch::Approx;

namespace {

CurveSpec make_spec(CurveKind kind, int n) {
    CurveSpec s;
    s.kind = kind;
    s.n = n;
    return s;
}

const Anisotropy& iso() {
    static const Anisotropy one = Anisotropy::constant(1.0);
    return one;
}

}  // namespace

TEST_CASE("ellipse sampling", "[curves]") {
    auto spec = make_spec(CurveKind::Ellipse, 4);
    spec.a = spec.b = 1.0;
    const auto sq = generate(spec, iso());
    REQUIRE(sq.size() == 4);
    CHECK(sq.pts[0].x == Approx(1.0));
    CHECK(sq.pts[1].y == Approx(1.0));
    CHECK(sq.pts[2].x == Approx(-1.0));
    CHECK(sq.pts[3].y == Approx(-1.0));

    auto big = make_spec(CurveKind::Ellipse, 4000);
    big.a = 2.0;
    big.b = 1.0;
    const auto e = generate(big, iso());
    const auto fr = build_frames(e);
    CHECK(polygon_area(e) == Approx(2.0 * std::numbers::pi).epsilon(1e-5));
    CHECK(fr.length() == Approx(oracles::ellipse_perimeter(2.0, 1.0)).epsilon(1e-5));
}

TEST_CASE("thin dumbbell symmetry and admissibility", "[curves]") {
    auto spec = make_spec(CurveKind::ThinDumbbell, 400);
    const auto c = generate(spec, iso());
    REQUIRE(c.size() == 400);
    // point symmetry: u and u + 1/2 map to opposite points
    for (int i = 0; i < 200; ++i) {
        CHECK(c.pts[i + 200].x == Approx(-c.pts[i].x).margin(1e-12));
        CHECK(c.pts[i + 200].y == Approx(-c.pts[i].y).margin(1e-12));
    }
    const auto fr = build_frames(c);
    CHECK(fr.winding() == 1);
    CHECK(polygon_area(c) > 0.0);

    auto bad = spec;
    bad.eps = 2.0;  // eps >= rad
    CHECK_THROWS_AS(generate(bad, iso()), DegenerateSpec);
    bad = spec;
    bad.beam = 0.0;
    CHECK_THROWS_AS(generate(bad, iso()), DegenerateSpec);
}

TEST_CASE("all test curves are simple and positively oriented", "[curves]") {
    for (auto kind : {CurveKind::Ellipse, CurveKind::Dumbbell, CurveKind::Wave3, CurveKind::Wave5,
                      CurveKind::ThinDumbbell}) {
        const auto c = generate(make_spec(kind, 400), iso());
        INFO("kind " << static_cast<int>(kind));
        CHECK(polygon_is_simple(c));
        CHECK(build_frames(c).winding() == 1);
    }
    for (int m = 2; m <= 6; ++m) {
        const auto sig = Anisotropy::cosine(0.99 / (m * m - 1), m);
        const auto w = sample_wulff(sig, 360, WulffSampling::UniformNu);
        INFO("wulff m = " << m);
        CHECK(polygon_is_simple(w));
        CHECK(build_frames(w).winding() == 1);
    }
}

TEST_CASE("wulff sampling of the unit disc gives a regular polygon", "[curves]") {
    for (auto mode : {WulffSampling::UniformNu, WulffSampling::UniformArclength}) {
        const auto poly = sample_wulff(iso(), 60, mode);
        const auto fr = build_frames(poly);
        for (const auto& p : poly.pts) CHECK(norm(p) == Approx(1.0).epsilon(1e-12));
        const double expected = 2.0 * std::sin(std::numbers::pi / 60.0);
        for (double r : fr.edge_len) CHECK(r == Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("uniform arclength sampling equalizes edge lengths", "[curves]") {
    const auto sig = Anisotropy::cosine(0.99 / 35.0, 6);
    for (int n : {120, 512}) {
        const auto poly = sample_wulff(sig, n, WulffSampling::UniformArclength);
        const auto fr = build_frames(poly);
        const double spread = fr.max_edge() - fr.min_edge();
        CHECK(spread < 1e-8 * fr.length() / n);
    }
    // uniform-nu sampling is visibly non-uniform for the same profile
    const auto nu_poly = sample_wulff(sig, 120, WulffSampling::UniformNu);
    const auto nu_fr = build_frames(nu_poly);
    CHECK(nu_fr.max_edge() - nu_fr.min_edge() > 1e-3 * nu_fr.length() / 120);
}

TEST_CASE("wulff scale factor", "[curves]") {
    const auto sig = Anisotropy::cosine(0.08, 3);
    const auto s1 = sample_wulff(sig, 64, WulffSampling::UniformNu, 1.0);
    const auto s3 = sample_wulff(sig, 64, WulffSampling::UniformNu, 3.0);
    for (int i = 0; i < 64; ++i) {
        CHECK(s3.pts[i].x == Approx(3.0 * s1.pts[i].x).margin(1e-14));
        CHECK(s3.pts[i].y == Approx(3.0 * s1.pts[i].y).margin(1e-14));
    }
}

TEST_CASE("counterexample construction", "[curves]") {
    const auto sig = Anisotropy::cosine(0.08, 3);

    // admissibility threshold: r must exceed L_sigma(unit circle)/(2 pi) = 1
    CHECK_THROWS_AS(counterexample_curve(sig, 0.5, 0.15, 600), RadiusTooSmall);

    const auto ce = counterexample_curve(sig, 1.5, 0.15, 600);
    REQUIRE(ce.curve.size() == 600);
    CHECK(polygon_is_simple(ce.curve));
    const auto fr = build_frames(ce.curve);
    CHECK(fr.winding() == 1);

    // enclosed area is the wulff area plus the disc, up to a neck correction
    const double w = wulff_area(sig);
    const double expected = w + std::numbers::pi * 1.5 * 1.5;
    CHECK(std::abs(polygon_area(ce.curve) - expected) < 0.15 * 1.5);

    // designated coincidence arc: vertices copied bit for bit
    REQUIRE(ce.curve_arc.count > 0);
    REQUIRE(ce.reference_arc.count == ce.curve_arc.count);
    for (std::size_t k = 0; k <= ce.curve_arc.count; ++k) {
        const auto& a = ce.curve.pts[(ce.curve_arc.begin + k) % ce.curve.size()];
        const auto& b = ce.reference.pts[(ce.reference_arc.begin + k) % ce.reference.size()];
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
    }

    // at t = 0 the two polygons do not properly cross
    CHECK_FALSE(polygons_properly_cross(ce.curve, ce.reference).has_value());

    // nonlocal velocity stays above -1 on the unperturbed union of the two
    // boundaries when r is large enough
    const double ell = wulff_energy(sig, Anisotropy::constant(1.0));
    const double f_hat = -(2.0 * w + 1.5 * ell) / (2.0 * w + two_pi * 1.5 * 1.5);
    CHECK(f_hat > -1.0);
}

TEST_CASE("segment crossing predicate", "[curves]") {
    CHECK(segments_properly_cross({0, 0}, {1, 1}, {0, 1}, {1, 0}));
    CHECK_FALSE(segments_properly_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));      // parallel
    CHECK_FALSE(segments_properly_cross({0, 0}, {1, 0}, {1, 0}, {1, 1}));      // shared endpoint
    CHECK_FALSE(segments_properly_cross({0, 0}, {2, 0}, {1, 0}, {1, -1}));     // touch, no cross
    CHECK_FALSE(segments_properly_cross({0, 0}, {1, 0}, {0.25, 0}, {0.75, 0}));  // collinear overlap

    PolyCurve sq1{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    PolyCurve sq2 = sq1;
    for (auto& p : sq2.pts) p += Vec2{0.5, 0.5};
    CHECK(polygons_properly_cross(sq1, sq2).has_value());
    PolyCurve far = sq1;
    for (auto& p : far.pts) p += Vec2{5.0, 0.0};
    CHECK_FALSE(polygons_properly_cross(sq1, far).has_value());
}
