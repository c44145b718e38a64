#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/errors.hpp"
#include "anisoflow/intersect.hpp"
#include "anisoflow/polycurve.hpp"
#include "anisoflow/vec2.hpp"

namespace anisoflow {

enum class WulffSampling { UniformNu, UniformArclength };

enum class CurveKind { Ellipse, Dumbbell, Wave3, Wave5, ThinDumbbell, Wulff, Counterexample, File };

// Everything needed to build an initial curve. Fields are read per kind;
// shape_sigma defaults to the run anisotropy when unset.
struct CurveSpec {
    CurveKind kind = CurveKind::Ellipse;
    int n = 400;

    double a = 2.0, b = 1.0;               // ellipse semi-axes
    double beam = 3.0, rad = 1.0, eps = 0.1;  // thin dumbbell
    std::optional<Anisotropy> shape_sigma;    // wulff / counterexample
    WulffSampling sampling = WulffSampling::UniformArclength;
    double scale = 1.0;
    double radius = 1.5, blend = 0.15;        // counterexample
    std::string path;                          // file kind
};

namespace detail {

inline PolyCurve sample_parametric(const std::function<Vec2(double)>& f, int n) {
    PolyCurve c;
    c.pts.resize(n);
    for (int i = 0; i < n; ++i) c.pts[i] = f(static_cast<double>(i) / n);
    for (int i = 0; i < n; ++i)
        if (!(dist(c.pts[i], c.pts[(i + 1) % n]) > 0.0))
            throw DegenerateSpec("sampled curve has a zero-length edge at vertex " +
                                 std::to_string(i));
    return c;
}

inline Vec2 thin_dumbbell_quarter(double u, double beam, double rad, double eps) {
    const double theta_eps = std::asin(eps / rad);
    if (u < 0.125) {
        const double th = 8.0 * (std::numbers::pi - theta_eps) * u;
        return {beam + rad * (1.0 + std::cos(th)), rad * std::sin(th)};
    }
    return {2.0 * (beam + rad * (1.0 - std::cos(theta_eps))) * (1.0 - 4.0 * u), eps};
}

inline Vec2 thin_dumbbell_half(double u, double beam, double rad, double eps) {
    if (u < 0.25) return thin_dumbbell_quarter(u, beam, rad, eps);
    const Vec2 q = thin_dumbbell_quarter(0.5 - u, beam, rad, eps);
    return {-q.x, q.y};
}

inline Vec2 thin_dumbbell_point(double u, double beam, double rad, double eps) {
    if (u < 0.5) return thin_dumbbell_half(u, beam, rad, eps);
    return -thin_dumbbell_half(u - 0.5, beam, rad, eps);
}

}  // namespace detail

// Uniformly spaced tangent-angle sampling of the Wulff boundary.
inline PolyCurve sample_wulff_uniform_nu(const Anisotropy& sigma, int n, double scale = 1.0) {
    PolyCurve c;
    c.pts.resize(n);
    for (int i = 0; i < n; ++i) c.pts[i] = scale * wulff_point(sigma, two_pi * i / n);
    return c;
}

// Resamples the Wulff boundary to N vertices with equal edge (chord) lengths.
// Marches around the curve placing each vertex at the angle where the chord
// from the previous vertex reaches a trial length, then adjusts the trial
// length by bisection until the walk closes after exactly N chords, so the
// edge lengths agree to well below 1e-8 * L/N.
inline PolyCurve sample_wulff_uniform_arclength(const Anisotropy& sigma, int n,
                                                double scale = 1.0) {
    const double total = wulff_boundary_length(sigma, 1 << 15);
    const double mean_step = total / n;

    // Lifted angle at which the chord from w(nu0) attains length rho.
    const auto advance = [&](double nu0, double rho) {
        const Vec2 base = wulff_point(sigma, nu0);
        auto gap = [&](double nu) { return dist(wulff_point(sigma, nu), base) - rho; };
        double lo = nu0;
        double hi = nu0 + rho / std::max(sigma.stability(nu0), 1e-12);
        for (int guard = 0; gap(hi) < 0.0; ++guard) {
            hi = nu0 + 2.0 * (hi - nu0);
            if (guard > 60) throw FlowError("chord marching failed to bracket");
        }
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    // Lifted angle after n chords of length rho; equals 2*pi at closure.
    const auto walk_end = [&](double rho, std::vector<double>* out) {
        double nu = 0.0;
        if (out) out->assign(1, 0.0);
        for (int i = 1; i < n; ++i) {
            nu = advance(nu, rho);
            if (out) out->push_back(nu);
        }
        return advance(nu, rho);
    };

    double rho_lo = 0.5 * mean_step;
    double rho_hi = mean_step * (1.0 + 1e-9);
    if (walk_end(rho_lo, nullptr) > two_pi) rho_lo = 0.05 * mean_step;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (rho_lo + rho_hi);
        (walk_end(mid, nullptr) < two_pi ? rho_lo : rho_hi) = mid;
        if (rho_hi - rho_lo < 1e-15 * mean_step) break;
    }

    std::vector<double> nus;
    const double rho = 0.5 * (rho_lo + rho_hi);
    walk_end(rho, &nus);

    PolyCurve c;
    c.pts.resize(n);
    for (int i = 0; i < n; ++i) c.pts[i] = scale * wulff_point(sigma, nus[i]);
    return c;
}

inline PolyCurve sample_wulff(const Anisotropy& sigma, int n, WulffSampling mode,
                              double scale = 1.0) {
    return mode == WulffSampling::UniformNu ? sample_wulff_uniform_nu(sigma, n, scale)
                                            : sample_wulff_uniform_arclength(sigma, n, scale);
}

// Smooth perturbation of the union of the Wulff boundary and an externally
// tangent circle, plus the reference Wulff polygon it was cut from.
// `curve_arc` / `reference_arc` mark the designated coincidence arc (vertices
// copied bit-for-bit between the two polygons, diametrically opposite the
// touching point).
struct ComparisonCounterexample {
    PolyCurve curve;          // simple closed curve enclosing Wulff shape + circle
    PolyCurve reference;      // uniform-nu polygonization of the Wulff boundary
    SegmentRange curve_arc;
    SegmentRange reference_arc;
    double touch_nu = 0.0;    // tangent angle of the touching point
    double fillet_radius_upper = 0.0;
    double fillet_radius_lower = 0.0;
};

// Builds the comparison-breaking initial curve: the Wulff boundary of sigma
// and the circle of radius `radius` touching it from outside where the
// outward normal points along +x, joined by two tangent-continuous circular
// fillets that cut an angular width `blend` off the Wulff nose on each side.
// Requires radius > L_sigma(unit circle) / (2*pi) so that the nonlocal term
// keeps the normal velocity positive on the coincidence region.
inline ComparisonCounterexample counterexample_curve(const Anisotropy& sigma, double radius,
                                                     double blend, int n,
                                                     int quad_nodes = Anisotropy::stability_grid) {
    const double threshold = wulff_energy(sigma, Anisotropy::constant(1.0), quad_nodes) / two_pi;
    if (!(radius > threshold)) throw RadiusTooSmall(radius, threshold);
    if (!(blend > 0.0 && blend < 1.0)) throw DegenerateSpec("blend must lie in (0, 1)");
    if (n < 64) throw DegenerateSpec("counterexample needs at least 64 vertices");

    const double nose = 0.5 * std::numbers::pi;  // outward normal (sin, -cos) = (+1, 0)
    const Vec2 touch = wulff_point(sigma, nose);
    const Vec2 center = touch + Vec2{radius, 0.0};

    // Fillet tangent to the Wulff boundary at angle nu_cut and to the circle.
    struct Fillet {
        double rho;
        Vec2 center;
        Vec2 on_circle;
        double eta_wulff, eta_circle;  // angles of the two tangency points around the fillet
    };
    const auto make_fillet = [&](double nu_cut) {
        const Vec2 w = wulff_point(sigma, nu_cut);
        const Vec2 nrm{-std::sin(nu_cut), std::cos(nu_cut)};  // inward normal of the Wulff
        auto excess = [&](double rho) { return dist(w - rho * nrm, center) - (radius + rho); };
        if (!(excess(0.0) > 0.0))
            throw DegenerateSpec("fillet construction failed: cut point not outside the circle");
        double lo = 0.0, hi = 1e-3 * radius;
        for (int guard = 0; excess(hi) > 0.0; ++guard) {
            hi *= 2.0;
            if (guard > 80) throw DegenerateSpec("fillet radius bracket failed");
        }
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? lo : hi) = mid;
        }
        Fillet f;
        f.rho = 0.5 * (lo + hi);
        f.center = w - f.rho * nrm;
        const Vec2 dir = (f.center - center) / dist(f.center, center);
        f.on_circle = center + radius * dir;
        f.eta_wulff = nu_cut + 0.5 * std::numbers::pi;  // angle of (w - center_f) = rho * N
        f.eta_circle = std::atan2(-dir.y, -dir.x);
        return f;
    };

    const double nu_hi = nose + blend;
    const double nu_lo = nose - blend;
    const Fillet fu = make_fillet(nu_hi);
    const Fillet fl = make_fillet(nu_lo);

    // Approximate lengths to budget vertices.
    const double wulff_len = wulff_energy(sigma, Anisotropy::constant(1.0), quad_nodes);
    const double arc_len = wulff_len * (two_pi - 2.0 * blend) / two_pi;
    const double theta_u = std::atan2(fu.center.y - center.y, fu.center.x - center.x);
    const double theta_l = std::atan2(fl.center.y - center.y, fl.center.x - center.x);
    double circle_sweep = (theta_u + two_pi) - theta_l;
    while (circle_sweep > two_pi) circle_sweep -= two_pi;
    while (circle_sweep < 0.0) circle_sweep += two_pi;
    const double circle_len = radius * circle_sweep;
    const double total_len = arc_len + circle_len + std::numbers::pi * (fu.rho + fl.rho);
    const double h_target = total_len / n;

    // Global tangent-angle grid shared with the reference polygon.
    const int grid_n = std::max(32, static_cast<int>(std::lround(wulff_len / h_target)));
    std::vector<Vec2> grid(grid_n);
    for (int k = 0; k < grid_n; ++k) grid[k] = wulff_point(sigma, two_pi * k / grid_n);

    PolyCurve reference;
    reference.pts = grid;

    // Wulff arc: exact cut endpoints plus every grid point strictly between
    // the cuts (margin keeps slivers away). Tracks which curve vertices are
    // grid point k for the coincidence bookkeeping.
    std::vector<Vec2> pts;
    std::vector<long> grid_index_of_vertex;
    const double margin = 0.3 * (two_pi / grid_n);
    pts.push_back(wulff_point(sigma, nu_hi));
    grid_index_of_vertex.push_back(-1);
    const int k_begin = static_cast<int>(std::ceil((nu_hi + margin) / (two_pi / grid_n)));
    const int k_end = static_cast<int>(std::floor((nu_lo + two_pi - margin) / (two_pi / grid_n)));
    for (int k = k_begin; k <= k_end; ++k) {
        pts.push_back(grid[((k % grid_n) + grid_n) % grid_n]);
        grid_index_of_vertex.push_back(((k % grid_n) + grid_n) % grid_n);
    }
    pts.push_back(wulff_point(sigma, nu_lo));
    grid_index_of_vertex.push_back(-1);

    // Clockwise fillet sweep from eta_from to eta_to (interior points only).
    const auto append_fillet = [&](const Fillet& f, double eta_from, double eta_to, int count) {
        double sweep = eta_from - eta_to;
        while (sweep <= 0.0) sweep += two_pi;
        for (int i = 1; i <= count; ++i) {
            const double eta = eta_from - sweep * i / (count + 1);
            pts.push_back(f.center + f.rho * Vec2{std::cos(eta), std::sin(eta)});
            grid_index_of_vertex.push_back(-1);
        }
    };

    const int n_fl = std::max(6, static_cast<int>(std::lround(std::numbers::pi * fl.rho / h_target)));
    const int n_fu = std::max(6, static_cast<int>(std::lround(std::numbers::pi * fu.rho / h_target)));
    const int used = static_cast<int>(pts.size()) + n_fl + n_fu + 2;
    const int n_circle_interior = n - used;
    if (n_circle_interior < 8)
        throw DegenerateSpec("vertex budget too small for the circle arc; increase N");

    // Lower fillet: leave the Wulff at nu_lo heading for the circle.
    append_fillet(fl, fl.eta_wulff, fl.eta_circle, n_fl);

    // Circle arc from the lower to the upper junction, counterclockwise.
    pts.push_back(fl.on_circle);
    grid_index_of_vertex.push_back(-1);
    for (int i = 1; i <= n_circle_interior; ++i) {
        const double th = theta_l + circle_sweep * i / (n_circle_interior + 1);
        pts.push_back(center + radius * Vec2{std::cos(th), std::sin(th)});
        grid_index_of_vertex.push_back(-1);
    }
    pts.push_back(fu.on_circle);
    grid_index_of_vertex.push_back(-1);

    // Upper fillet back onto the Wulff boundary.
    append_fillet(fu, fu.eta_circle, fu.eta_wulff, n_fu);

    ComparisonCounterexample out;
    out.curve.pts = std::move(pts);
    out.reference = std::move(reference);
    out.touch_nu = nose;
    out.fillet_radius_upper = fu.rho;
    out.fillet_radius_lower = fl.rho;

    // Designated coincidence arc: grid points within pi/4 of the angle
    // diametrically opposite the touching point.
    const double opp = nose + std::numbers::pi;
    const double half_width = 0.25 * std::numbers::pi;
    std::size_t first_vertex = 0, count = 0;
    long first_grid = -1, last_grid = -1;
    for (std::size_t i = 0; i < out.curve.pts.size(); ++i) {
        const long k = grid_index_of_vertex[i];
        if (k < 0) continue;
        const double nu_k = two_pi * static_cast<double>(k) / grid_n;
        double off = nu_k - opp;
        while (off > std::numbers::pi) off -= two_pi;
        while (off < -std::numbers::pi) off += two_pi;
        if (std::abs(off) <= half_width) {
            if (count == 0) {
                first_vertex = i;
                first_grid = k;
            }
            last_grid = k;
            ++count;
        }
    }
    if (count >= 2) {
        out.curve_arc = {first_vertex, count - 1};
        const std::size_t ref_count = static_cast<std::size_t>(last_grid - first_grid);
        out.reference_arc = {static_cast<std::size_t>(first_grid), ref_count};
    }
    return out;
}

// Samples the parameterized test curves at u_i = i/N.
inline PolyCurve generate(const CurveSpec& spec, const Anisotropy& flow_sigma) {
    if (spec.n < 3) throw DegenerateSpec("curve needs at least 3 vertices");
    const int n = spec.n;
    switch (spec.kind) {
        case CurveKind::Ellipse:
            return detail::sample_parametric(
                [&](double u) {
                    return Vec2{spec.a * std::cos(two_pi * u), spec.b * std::sin(two_pi * u)};
                },
                n);
        case CurveKind::Dumbbell:
            return detail::sample_parametric(
                [&](double u) {
                    const double z = two_pi * u;
                    const double s = std::sin(z);
                    return Vec2{std::cos(z), 2.0 * s - 1.99 * s * s * s};
                },
                n);
        case CurveKind::Wave3:
            return detail::sample_parametric(
                [&](double u) {
                    const double z = two_pi * u;
                    const double x1 = std::cos(z);
                    const double x3 = std::sin(3.0 * z) * std::sin(z);
                    return Vec2{x1, 0.7 * std::sin(z) + std::sin(x1) + x3 * x3};
                },
                n);
        case CurveKind::Wave5:
            return detail::sample_parametric(
                [&](double u) {
                    const double z = two_pi * u;
                    const double x1 = 1.5 * std::cos(z);
                    const double x3 = std::sin(3.0 * z) * std::sin(z);
                    const double x4 = 2.0 * x1 * x1;
                    const double x5 = 3.0 * std::exp(-x1);
                    return Vec2{x1, 1.5 * (0.6 * std::sin(z) + 0.5 * x3 * x3 +
                                           0.4 * std::sin(x4) + 0.1 * std::sin(x5))};
                },
                n);
        case CurveKind::ThinDumbbell: {
            if (!(spec.beam > 0.0))
                throw DegenerateSpec("thin dumbbell requires beam > 0");
            if (!(spec.eps > 0.0 && spec.eps < spec.rad))
                throw DegenerateSpec("thin dumbbell requires 0 < eps < rad");
            const double beam = spec.beam, rad = spec.rad, eps = spec.eps;
            return detail::sample_parametric(
                [=](double u) { return detail::thin_dumbbell_point(u, beam, rad, eps); }, n);
        }
        case CurveKind::Wulff:
            return sample_wulff(spec.shape_sigma.value_or(flow_sigma), n, spec.sampling,
                                spec.scale);
        case CurveKind::Counterexample:
            return counterexample_curve(spec.shape_sigma.value_or(flow_sigma), spec.radius,
                                        spec.blend, n)
                .curve;
        case CurveKind::File:
            throw DegenerateSpec("file-backed curves are loaded by the harness");
    }
    throw DegenerateSpec("unknown curve kind");
}

}  // namespace anisoflow
