#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/errors.hpp"
#include "anisoflow/polycurve.hpp"

namespace anisoflow {

// Guard thresholds for the velocity closure.
struct FlowGuards {
    double c_min = 1e-8;        // minimum |cos(phi/2)| before vertex averaging degenerates
    double r_min_scale = 1e-12; // |R| < r_min_scale * N triggers the alpha1 = 0 fallback
};

// Bookkeeping of the extra linear equation that pins the tangential gauge.
// R and Q follow the closure R = c_0 sum p_m / c_m, Q = sum_{m>=1} (p_m / c_m) Psi_m;
// the candidate with the largest |R| wins (ties to the smallest index).
struct CandidateReport {
    std::array<double, 3> R{0.0, 0.0, 0.0};
    std::array<double, 3> Q{0.0, 0.0, 0.0};
    int chosen = 0;             // 1-based candidate index
    double alpha1 = 0.0;
    bool fallback_used = false; // all |R| negligible; alpha1 pinned to zero
};

struct VelocityField {
    std::vector<double> beta_star;  // per edge
    std::vector<double> beta;       // per joint slot
    std::vector<double> alpha;      // per joint slot
    CandidateReport report;
};

// Edge normal velocity of the anisoperimetric-ratio gradient flow:
//   beta*_e = k_sigma_e - L_sigma / (2A).
// Vanishes exactly on (homothets of) the Wulff boundary.
inline std::vector<double> normal_velocity(const CurveMetrics& cm) {
    if (!(cm.area > 0.0)) throw NonpositiveArea(cm.area);
    const double pull = cm.energy / (2.0 * cm.area);
    std::vector<double> b(cm.aniso_curv.size());
    for (std::size_t e = 0; e < b.size(); ++e) b[e] = cm.aniso_curv[e] - pull;
    return b;
}

// Vertex normal velocity: beta_m = (beta*_m + beta*_{m+1}) / (2 c_m).
inline std::vector<double> vertex_velocity(const std::vector<double>& beta_star,
                                           const CurveFrames& fr, double c_min = 1e-8) {
    const std::size_t n = fr.n;
    std::vector<double> beta(n);
    for (std::size_t m = 0; m < n; ++m) {
        if (std::abs(fr.cos_half[m]) <= c_min) throw NearlyFoldedVertex(m, fr.cos_half[m]);
        beta[m] = (beta_star[m] + beta_star[(m + 1) % n]) / (2.0 * fr.cos_half[m]);
    }
    return beta;
}

// Right-hand sides of the N-1 redistribution equations
//   c_m alpha_m - c_{m-1} alpha_{m-1} = psi_m,
// which enforce  dr_e/dt - (dL/dt)/N = (L/N - r_e) omega  edge by edge, so
// the mesh relaxes toward uniform spacing at rate omega.
struct Redistribution {
    std::vector<double> psi;     // psi[0] unused (kept zero)
    std::vector<double> prefix;  // prefix[m] = psi_1 + ... + psi_m, prefix[0] = 0
};

inline Redistribution redistribution_rhs(const CurveFrames& fr, const std::vector<double>& beta,
                                         const CurveMetrics& cm, double omega) {
    const std::size_t n = fr.n;
    double beta_s_sum = 0.0;
    for (std::size_t m = 0; m < n; ++m) beta_s_sum += beta[m] * fr.sin_half[m];
    const double mean_len = cm.length / static_cast<double>(n);

    Redistribution rd;
    rd.psi.assign(n, 0.0);
    rd.prefix.assign(n, 0.0);
    for (std::size_t m = 1; m < n; ++m) {
        rd.psi[m] = beta[m] * fr.sin_half[m] + beta[m - 1] * fr.sin_half[m - 1] -
                    (2.0 / static_cast<double>(n)) * beta_s_sum +
                    (mean_len - fr.edge_len[m]) * omega;
        rd.prefix[m] = rd.prefix[m - 1] + rd.psi[m];
    }
    return rd;
}

namespace detail {

// p_tilde_m = (sigma'_m + sigma'_{m+1}) s_m + (sigma_m - sigma_{m+1}) c_m;
// the anisotropic correction entering candidate 3 and the ratio error term.
inline std::vector<double> tangential_energy_weights(const CurveFrames& fr,
                                                     const Anisotropy& sigma) {
    const std::size_t n = fr.n;
    std::vector<double> s0(n), s1(n), pt(n);
    for (std::size_t e = 0; e < n; ++e) {
        s0[e] = sigma.value(fr.angle[e]);
        s1[e] = sigma.deriv(fr.angle[e]);
    }
    for (std::size_t m = 0; m < n; ++m) {
        const std::size_t nxt = (m + 1) % n;
        pt[m] = (s1[m] + s1[nxt]) * fr.sin_half[m] + (s0[m] - s0[nxt]) * fr.cos_half[m];
    }
    return pt;
}

// P shared by candidates 1 and 3: sum beta*_e (r_{e+1} - 2 r_e + r_{e-1}) / 4.
inline double curvature_weighted_p(const CurveFrames& fr, const std::vector<double>& beta_star) {
    const std::size_t n = fr.n;
    double p = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
        const double d2 =
            fr.edge_len[(e + 1) % n] - 2.0 * fr.edge_len[e] + fr.edge_len[(e + n - 1) % n];
        p += beta_star[e] * d2 / 4.0;
    }
    return p;
}

}  // namespace detail

// Completes the tangential velocities. The N-1 redistribution equations leave
// alpha_0 free; one extra equation sum p_m alpha_m = P closes the system.
// Three candidate (p, P) pairs are formed and the one with the largest |R|
// is used:
//   1. p_m = s_m (r_{m+1} - r_m)/2, P as above  -> makes err_A vanish;
//   2. p_m = r*_m, P = 0                         -> zero-average alpha;
//   3. candidate 1 minus (2A/L_sigma) p_tilde    -> makes err_ratio vanish.
// force_candidate (1..3) bypasses the selection; 0 selects automatically.
inline std::pair<std::vector<double>, CandidateReport> tangential_velocity(
    const CurveFrames& fr, const std::vector<double>& beta_star, const std::vector<double>& beta,
    const Redistribution& rd, const CurveMetrics& cm, const Anisotropy& sigma,
    const FlowGuards& guards = {}, int force_candidate = 0) {
    (void)beta;
    const std::size_t n = fr.n;
    for (std::size_t m = 0; m < n; ++m)
        if (std::abs(fr.cos_half[m]) <= guards.c_min) throw NearlyFoldedVertex(m, fr.cos_half[m]);

    const double p_shared = detail::curvature_weighted_p(fr, beta_star);
    const auto p_tilde = detail::tangential_energy_weights(fr, sigma);
    const double ratio_scale = 2.0 * cm.area / cm.energy;

    std::array<std::vector<double>, 3> p;
    for (auto& v : p) v.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double diff = fr.edge_len[(m + 1) % n] - fr.edge_len[m];
        p[0][m] = fr.sin_half[m] * diff / 2.0;
        p[1][m] = fr.dual_len[m];
        p[2][m] = p[0][m] - ratio_scale * p_tilde[m];
    }
    const std::array<double, 3> P{p_shared, 0.0, p_shared};

    CandidateReport rep;
    for (int l = 0; l < 3; ++l) {
        double sum_pc = 0.0, q = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double pc = p[l][m] / fr.cos_half[m];
            sum_pc += pc;
            q += pc * rd.prefix[m];  // prefix[0] = 0
        }
        rep.R[l] = fr.cos_half[0] * sum_pc;
        rep.Q[l] = q;
    }

    int best = 0;
    if (force_candidate >= 1 && force_candidate <= 3) {
        best = force_candidate - 1;
    } else {
        for (int l = 1; l < 3; ++l)
            if (std::abs(rep.R[l]) > std::abs(rep.R[best])) best = l;
    }
    rep.chosen = best + 1;

    if (std::abs(rep.R[best]) < guards.r_min_scale * static_cast<double>(n)) {
        rep.fallback_used = true;
        rep.alpha1 = 0.0;
    } else {
        rep.alpha1 = (P[best] - rep.Q[best]) / rep.R[best];
    }

    std::vector<double> alpha(n);
    for (std::size_t m = 0; m < n; ++m)
        alpha[m] = rd.prefix[m] / fr.cos_half[m] + (fr.cos_half[0] / fr.cos_half[m]) * rep.alpha1;
    return {std::move(alpha), rep};
}

// Convenience pipeline: beta* -> beta -> psi -> alpha.
inline VelocityField compute_velocity(const CurveFrames& fr, const CurveMetrics& cm,
                                      const Anisotropy& sigma, double omega,
                                      const FlowGuards& guards = {}) {
    VelocityField vf;
    vf.beta_star = normal_velocity(cm);
    vf.beta = vertex_velocity(vf.beta_star, fr, guards.c_min);
    const auto rd = redistribution_rhs(fr, vf.beta, cm, omega);
    auto [alpha, rep] = tangential_velocity(fr, vf.beta_star, vf.beta, rd, cm, sigma, guards);
    vf.alpha = std::move(alpha);
    vf.report = rep;
    return vf;
}

// Defect of the semi-discrete area identity dA/dt = -sum beta*_e r_e; zero on
// uniform meshes or when candidate 1 holds exactly.
inline double area_error_term(const CurveFrames& fr, const std::vector<double>& beta_star,
                              const std::vector<double>& alpha) {
    const std::size_t n = fr.n;
    double corr = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double diff = fr.edge_len[(m + 1) % n] - fr.edge_len[m];
        corr += alpha[m] * fr.sin_half[m] * diff / 2.0;
    }
    return -detail::curvature_weighted_p(fr, beta_star) + corr;
}

// Defect of the semi-discrete dissipation identity for L_sigma^2 / A; zero
// when candidate 3 holds exactly.
inline double ratio_error_term(const CurveFrames& fr, const std::vector<double>& beta_star,
                               const std::vector<double>& alpha, const CurveMetrics& cm,
                               const Anisotropy& sigma) {
    const auto p_tilde = detail::tangential_energy_weights(fr, sigma);
    double s = 0.0;
    for (std::size_t m = 0; m < fr.n; ++m) s += p_tilde[m] * alpha[m];
    return s - (cm.energy / (2.0 * cm.area)) * area_error_term(fr, beta_star, alpha);
}

}  // namespace anisoflow
