#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/curves.hpp"
#include "anisoflow/polycurve.hpp"
#include "oracles.hpp"

using namespace anisoflow;
using Catch::Approx;

TEST_CASE("closed-form evaluators per family", "[anisotropy]") {
    const auto one = Anisotropy::constant(1.0);
    CHECK(one.eval(1.3, 0) == 1.0);
    CHECK(one.eval(1.3, 1) == 0.0);
    CHECK(one.eval(1.3, 2) == 0.0);

    // 1 + eps cos(m nu) and its exact derivatives
    const double eps = 0.12, m = 3;
    const auto cos3 = Anisotropy::cosine(eps, 3);
    CHECK(cos3.eval(0.0, 0) == Approx(1.0 + eps).epsilon(1e-15));
    CHECK(cos3.eval(0.0, 1) == Approx(0.0).margin(1e-15));
    CHECK(cos3.eval(0.0, 2) == Approx(-eps * m * m).epsilon(1e-15));
    const double nu = 0.7;
    CHECK(cos3.eval(nu, 1) == Approx(-eps * m * std::sin(m * nu)).epsilon(1e-14));

    const auto combo = Anisotropy::mixed(2.0, cos3, 0.5, Anisotropy::constant(3.0));
    CHECK(combo.value(nu) == Approx(2.0 * cos3.value(nu) + 1.5).epsilon(1e-15));
    CHECK(combo.deriv2(nu) == Approx(2.0 * cos3.deriv2(nu)).epsilon(1e-15));
}

TEST_CASE("evaluators are 2*pi periodic", "[anisotropy]") {
    const auto sig = Anisotropy::cosine(0.2, 2).affine(1.3, 0.4);
    for (int order = 0; order <= 2; ++order)
        for (double nu : {0.0, 0.3, 1.9, 4.4})
            CHECK(sig.eval(nu + two_pi, order) == Approx(sig.eval(nu, order)).margin(1e-12));
}

TEST_CASE("construction rejects unstable densities", "[anisotropy]") {
    // eps (m^2 - 1) >= 1 makes sigma + sigma'' change sign
    CHECK_THROWS_AS(Anisotropy::cosine(0.2, 3), FlowError);
    CHECK_THROWS_AS(Anisotropy::cosine(0.5, 2), FlowError);
    CHECK_THROWS_AS(Anisotropy::constant(-1.0), FlowError);
    CHECK_THROWS_AS(Anisotropy::constant(0.0), FlowError);
    CHECK_NOTHROW(Anisotropy::cosine(0.99 / 35.0, 6));
}

TEST_CASE("wulff boundary points", "[anisotropy]") {
    const auto one = Anisotropy::constant(1.0);
    CHECK(wulff_point(one, 0.0).x == Approx(0.0).margin(1e-15));
    CHECK(wulff_point(one, 0.0).y == Approx(-1.0).epsilon(1e-15));
    CHECK(wulff_point(one, std::numbers::pi / 2).x == Approx(1.0).epsilon(1e-15));
    CHECK(wulff_point(one, std::numbers::pi / 2).y == Approx(0.0).margin(1e-15));

    // sigma'(0) = 0 for the cosine family, so the point sits at -sigma(0) N.
    const double eps = 0.11;
    const auto cos3 = Anisotropy::cosine(eps, 3);
    CHECK(wulff_point(cos3, 0.0).x == Approx(0.0).margin(1e-15));
    CHECK(wulff_point(cos3, 0.0).y == Approx(-(1.0 + eps)).epsilon(1e-15));
}

TEST_CASE("wulff area against closed form and independent quadrature", "[anisotropy]") {
    CHECK(wulff_area(Anisotropy::constant(1.0)) == Approx(std::numbers::pi).epsilon(1e-12));

    const double eps = 0.33;
    const auto sig = Anisotropy::cosine(eps, 2);
    const double closed = cosine_wulff_area(eps, 2);
    CHECK(closed == Approx(std::numbers::pi / 2.0 * (2.0 - eps * eps * 3.0)).epsilon(1e-15));

    const double by_oracle = 0.5 * oracles::periodic_integral([&](double nu) {
        const double s = 1.0 + eps * std::cos(2.0 * nu);
        const double s2 = -eps * 4.0 * std::cos(2.0 * nu);
        return s * (s + s2);
    });
    CHECK(wulff_area(sig) == Approx(by_oracle).epsilon(1e-10));
    CHECK(wulff_area(sig) == Approx(closed).epsilon(1e-10));
    CHECK(closed == Approx(2.6284134936259004).epsilon(1e-12));

    const auto sig6 = Anisotropy::cosine(0.99 / 35.0, 6);
    CHECK(wulff_area(sig6) == Approx(cosine_wulff_area(0.99 / 35.0, 6)).epsilon(1e-10));
}

TEST_CASE("energies of wulff boundaries", "[anisotropy]") {
    const auto one = Anisotropy::constant(1.0);
    const auto sig = Anisotropy::cosine(0.25, 2);

    // integral of sigma'' over a period vanishes, so both mixed energies are 2*pi
    CHECK(wulff_energy(one, sig) == Approx(two_pi).epsilon(1e-12));
    CHECK(wulff_energy(sig, one) == Approx(two_pi).epsilon(1e-12));
    CHECK(wulff_energy(one, one) == Approx(two_pi).epsilon(1e-13));

    const double by_oracle = oracles::periodic_integral([&](double nu) {
        const double s = 1.0 + 0.25 * std::cos(2.0 * nu);
        const double s2 = -cos(2.0 * nu);
        return 1.0 * (s + s2);
    }, 200'000);
    CHECK(wulff_energy(one, sig) == Approx(by_oracle).margin(1e-8));
}

TEST_CASE("duality of mixed interfacial energies", "[anisotropy]") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_int_distribution<int> deg(2, 6);
    for (int trial = 0; trial < 20; ++trial) {
        const int m1 = deg(rng), m2 = deg(rng);
        const auto sig = Anisotropy::cosine(unit(rng) * 0.99 / (m1 * m1 - 1), m1);
        const auto mu = Anisotropy::cosine(unit(rng) * 0.99 / (m2 * m2 - 1), m2);
        const double lhs = wulff_energy(mu, sig);
        const double rhs = wulff_energy(sig, mu);
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(std::abs(lhs), std::abs(rhs)));
    }
}

TEST_CASE("mixed anisoperimetric constant", "[anisotropy]") {
    const auto one = Anisotropy::constant(1.0);
    CHECK(mixed_constant(one, one) == Approx(4.0 * std::numbers::pi).epsilon(1e-12));

    const auto sig = Anisotropy::cosine(0.33, 2);
    const double w = wulff_area(sig);
    CHECK(mixed_constant(sig, sig) == Approx(4.0 * w).epsilon(1e-10));

    // K_{sigma,1} = 2 sqrt(pi |W_sigma|) + 2*pi for the cosine family
    const double expected = 2.0 * std::sqrt(std::numbers::pi * w) + two_pi;
    CHECK(mixed_constant(sig, one) == Approx(expected).epsilon(1e-10));
    CHECK(mixed_constant(sig, one) == Approx(12.0303).margin(2e-4));
    CHECK(mixed_constant(sig, one) == Approx(mixed_constant(one, sig)).epsilon(1e-12));
}

TEST_CASE("minimizing anisotropy", "[anisotropy]") {
    const auto one = Anisotropy::constant(1.0);
    const auto both = minimizing_anisotropy(one, one);
    CHECK(both.value(0.4) == Approx(2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-12));

    const double eps = 0.99 / 35.0;
    const auto sig = Anisotropy::cosine(eps, 6);
    const auto bar = minimizing_anisotropy(sig, one);
    const double root_w = std::sqrt(wulff_area(sig));
    for (double nu : {0.0, 0.5, 2.2}) {
        CHECK(bar.value(nu) ==
              Approx(std::sqrt(std::numbers::pi) * sig.value(nu) + root_w).epsilon(1e-12));
        CHECK(bar.stability(nu) ==
              Approx(std::sqrt(std::numbers::pi) * sig.stability(nu) + root_w).epsilon(1e-12));
        CHECK(bar.stability(nu) > 0.0);
    }
}

TEST_CASE("wulff boundary curvature converges to 1/delta at 2nd order", "[anisotropy]") {
    const auto sig = Anisotropy::cosine(0.08, 3);
    auto worst_curvature_error = [&](int n) {
        const double h = two_pi / n;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double nu = h * i;
            const Vec2 a = wulff_point(sig, nu - h);
            const Vec2 b = wulff_point(sig, nu);
            const Vec2 c = wulff_point(sig, nu + h);
            // curvature of the circumcircle through three nearby samples
            const double area2 = cross(b - a, c - a);
            const double k = 2.0 * area2 / (dist(a, b) * dist(b, c) * dist(a, c));
            worst = std::max(worst, std::abs(k - 1.0 / sig.stability(nu)));
        }
        return worst;
    };
    const double e1 = worst_curvature_error(256);
    const double e2 = worst_curvature_error(512);
    CHECK(e1 / e2 > 3.5);
    CHECK(e2 < 1e-3);
}

TEST_CASE("anisoperimetric ratio of the sampled wulff boundary tends to one", "[anisotropy]") {
    const auto sig = Anisotropy::cosine(0.08, 3);
    const double w = wulff_area(sig);
    auto ratio_gap = [&](int n) {
        const PolyCurve poly = sample_wulff(sig, n, WulffSampling::UniformArclength);
        const auto fr = build_frames(poly);
        return std::abs(metrics(poly, fr, sig, w).ratio - 1.0);
    };
    const double g1 = ratio_gap(128);
    const double g2 = ratio_gap(512);
    CHECK(g2 < g1);
    CHECK(g2 < 5e-5);
}

TEST_CASE("initial area rate for the mixed wulff profile", "[anisotropy]") {
    const auto sig = Anisotropy::cosine(0.99 / 35.0, 6);
    const double rate = mixed_wulff_area_rate(sig);
    CHECK(rate == Approx(std::sqrt(std::numbers::pi * wulff_area(sig)) - std::numbers::pi)
                      .epsilon(1e-12));
    CHECK(rate < 0.0);
}
