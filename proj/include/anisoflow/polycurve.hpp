#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/errors.hpp"
#include "anisoflow/vec2.hpp"

namespace anisoflow {

// Closed polygon given by its vertices in order; the edge after the last
// vertex wraps back to the first. Orientation is implied by the ordering
// (counterclockwise encloses positive area).
struct PolyCurve {
    std::vector<Vec2> pts;

    std::size_t size() const { return pts.size(); }
};

// Discrete frames of a polygon with N vertices.
//
// Index conventions (everything size N, cyclic):
//   edge e       joins pts[e] -> pts[(e+1)%N]; carries r, T, N = T^perp, nu.
//   joint slot m is the corner between edge m and edge m+1, i.e. the vertex
//                at pts[(m+1)%N]; carries phi, c = cos(phi/2), s = sin(phi/2),
//                t = tan(phi/2), the dual length r* = (r_m + r_{m+1})/2 and
//                the averaged frame (nu*, T*, N*).
// The tangent angles are lifted edge to edge, so nu is continuous along the
// polygon and the total turning equals 2*pi times the winding number.
struct CurveFrames {
    std::size_t n = 0;

    // per edge
    std::vector<double> edge_len;   // r
    std::vector<Vec2> tangent;      // T
    std::vector<Vec2> normal;       // N, inward for counterclockwise polygons
    std::vector<double> angle;      // nu, lifted
    double angle_wrap = 0.0;        // lift of edge 0 continued past the last edge

    // per joint slot
    std::vector<double> turn;       // phi
    std::vector<double> cos_half;   // c
    std::vector<double> sin_half;   // s
    std::vector<double> tan_half;   // t
    std::vector<double> dual_len;   // r*
    std::vector<double> star_angle; // nu* = nu + phi/2
    std::vector<Vec2> star_tangent; // T*
    std::vector<Vec2> star_normal;  // N*

    double total_turn = 0.0;        // sum of phi

    double length() const {
        double L = 0.0;
        for (double r : edge_len) L += r;
        return L;
    }

    int winding() const { return static_cast<int>(std::lround(total_turn / two_pi)); }

    double min_edge() const { return *std::min_element(edge_len.begin(), edge_len.end()); }
    double max_edge() const { return *std::max_element(edge_len.begin(), edge_len.end()); }
    double min_turn() const { return *std::min_element(turn.begin(), turn.end()); }

    // max_i |r_i - L/N| / (L/N); zero for a perfectly uniform mesh.
    double mesh_ratio() const {
        const double mean = length() / static_cast<double>(n);
        double worst = 0.0;
        for (double r : edge_len) worst = std::max(worst, std::abs(r - mean));
        return worst / mean;
    }

    // A polygon is (discretely) convex iff every turning angle is positive.
    bool convex() const {
        return std::all_of(turn.begin(), turn.end(), [](double p) { return p > 0.0; });
    }
};

namespace detail {

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace detail

// Builds edge and joint frames. The tangent-angle lift follows the branch
// rule: nu_0 = +-acos(T0.x) by the sign of T0.y, then across each joint
// nu advances by -+acos(T_e . T_{e+1}) with the sign of det(T_e, T_{e+1}),
// staying put when the determinant vanishes. Determinants within +-1e-14
// are treated as zero; a vanishing determinant with negative dot product is
// an exact reversal and is rejected as a folded vertex.
inline CurveFrames build_frames(const PolyCurve& curve) {
    const std::size_t n = curve.size();
    if (n < 3) throw FlowError("polygon needs at least 3 vertices");

    CurveFrames fr;
    fr.n = n;
    fr.edge_len.resize(n);
    fr.tangent.resize(n);
    fr.normal.resize(n);
    fr.angle.resize(n);

    for (std::size_t e = 0; e < n; ++e) {
        const Vec2 d = curve.pts[(e + 1) % n] - curve.pts[e];
        const double r = norm(d);
        if (!(r > 0.0)) throw DegenerateEdge(e);
        fr.edge_len[e] = r;
        fr.tangent[e] = d / r;
        fr.normal[e] = perp(fr.tangent[e]);
    }

    constexpr double det_deadband = 1e-14;
    constexpr double fold_margin = 1e-9;

    const Vec2 t0 = fr.tangent[0];
    fr.angle[0] = (t0.y < 0.0) ? -std::acos(detail::clamp_unit(t0.x))
                               : std::acos(detail::clamp_unit(t0.x));
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2 a = fr.tangent[e];
        const Vec2 b = fr.tangent[(e + 1) % n];
        const double det = cross(a, b);
        const double dotp = detail::clamp_unit(dot(a, b));
        double next = fr.angle[e];
        if (std::abs(det) <= det_deadband) {
            if (dotp < 0.0) throw FoldedVertex((e + 1) % n, std::numbers::pi);
        } else if (det < 0.0) {
            next -= std::acos(dotp);
        } else {
            next += std::acos(dotp);
        }
        if (e + 1 < n)
            fr.angle[e + 1] = next;
        else
            fr.angle_wrap = next;
    }

    fr.turn.resize(n);
    fr.cos_half.resize(n);
    fr.sin_half.resize(n);
    fr.tan_half.resize(n);
    fr.dual_len.resize(n);
    fr.star_angle.resize(n);
    fr.star_tangent.resize(n);
    fr.star_normal.resize(n);

    fr.total_turn = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double next = (m + 1 < n) ? fr.angle[m + 1] : fr.angle_wrap;
        const double phi = next - fr.angle[m];
        if (std::abs(phi) >= std::numbers::pi - fold_margin)
            throw FoldedVertex((m + 1) % n, phi);
        fr.turn[m] = phi;
        fr.total_turn += phi;
        const double half = 0.5 * phi;
        fr.cos_half[m] = std::cos(half);
        fr.sin_half[m] = std::sin(half);
        fr.tan_half[m] = std::tan(half);
        fr.dual_len[m] = 0.5 * (fr.edge_len[m] + fr.edge_len[(m + 1) % n]);
        fr.star_angle[m] = fr.angle[m] + half;
        fr.star_tangent[m] = {std::cos(fr.star_angle[m]), std::sin(fr.star_angle[m])};
        fr.star_normal[m] = perp(fr.star_tangent[m]);
    }
    return fr;
}

// Polygonal curvature per edge: k_e = (t_e + t_{e-1}) / r_e, using the
// half-angle tangents at the edge's two endpoints. Positive on convex
// counterclockwise polygons, matching the inward normal convention.
inline std::vector<double> curvature(const CurveFrames& fr) {
    const std::size_t n = fr.n;
    std::vector<double> k(n);
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t prev = (e + n - 1) % n;
        k[e] = (fr.tan_half[e] + fr.tan_half[prev]) / fr.edge_len[e];
    }
    return k;
}

// Discrete anisotropic curvature. The weight delta_e discretizes
// sigma + sigma'' at the edge angle; k_sigma = delta * k collapses to
//   k_sigma_e = num_e / (2 r_e)
// which stays well-defined when t_e + t_{e-1} = 0 (there delta is reported
// as the pointwise limit sigma(nu_e) + sigma''(nu_e)).
struct AnisoCurvature {
    std::vector<double> delta;    // delta_e
    std::vector<double> kappa;    // k_sigma_e
};

inline AnisoCurvature aniso_curvature(const CurveFrames& fr, const Anisotropy& sigma) {
    const std::size_t n = fr.n;
    std::vector<double> s0(n), s1(n);
    for (std::size_t e = 0; e < n; ++e) {
        s0[e] = sigma.value(fr.angle[e]);
        s1[e] = sigma.deriv(fr.angle[e]);
    }
    AnisoCurvature out;
    out.delta.resize(n);
    out.kappa.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t nxt = (e + 1) % n;
        const std::size_t prv = (e + n - 1) % n;
        const double te = fr.tan_half[e];
        const double tp = fr.tan_half[prv];
        const double num = s1[nxt] - s1[prv] + s0[nxt] * te + s0[e] * (te + tp) + s0[prv] * tp;
        out.kappa[e] = num / (2.0 * fr.edge_len[e]);
        const double tsum = te + tp;
        if (std::abs(tsum) > 1e-12 * (1.0 + std::abs(te) + std::abs(tp)))
            out.delta[e] = num / (2.0 * tsum);
        else
            out.delta[e] = sigma.stability(fr.angle[e]);
    }
    return out;
}

// Global quantities of a polygon under a fixed anisotropy.
struct CurveMetrics {
    double length = 0.0;        // L
    double area = 0.0;          // A (shoelace)
    double energy = 0.0;        // L_sigma = sum sigma(nu_e) r_e
    double ratio = 0.0;         // Pi_sigma = L_sigma^2 / (4 |W_sigma| A)
    double conservation = 0.0;  // sum k_sigma_e r_e; tracks L(dW_sigma) along a flow
    std::vector<double> curv;   // k_e
    std::vector<double> delta;  // delta_e
    std::vector<double> aniso_curv;  // k_sigma_e
};

inline double polygon_area(const PolyCurve& curve) {
    const std::size_t n = curve.size();
    double twice = 0.0;
    for (std::size_t e = 0; e < n; ++e) twice += cross(curve.pts[e], curve.pts[(e + 1) % n]);
    return 0.5 * twice;
}

inline CurveMetrics metrics(const PolyCurve& curve, const CurveFrames& fr,
                            const Anisotropy& sigma, double wulff_area_value) {
    if (!(wulff_area_value > 0.0)) throw FlowError("Wulff area must be positive");
    CurveMetrics cm;
    cm.length = fr.length();
    cm.area = polygon_area(curve);
    if (!(cm.area > 0.0)) throw NonpositiveArea(cm.area);
    cm.energy = 0.0;
    for (std::size_t e = 0; e < fr.n; ++e) cm.energy += sigma.value(fr.angle[e]) * fr.edge_len[e];
    cm.ratio = cm.energy * cm.energy / (4.0 * wulff_area_value * cm.area);
    cm.curv = curvature(fr);
    auto ac = aniso_curvature(fr, sigma);
    cm.delta = std::move(ac.delta);
    cm.aniso_curv = std::move(ac.kappa);
    cm.conservation = 0.0;
    for (std::size_t e = 0; e < fr.n; ++e) cm.conservation += cm.aniso_curv[e] * fr.edge_len[e];
    return cm;
}

}  // namespace anisoflow
