#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/errors.hpp"
#include "anisoflow/flow.hpp"
#include "anisoflow/polycurve.hpp"
#include "anisoflow/tridiagonal.hpp"

namespace anisoflow {

struct StepConfig {
    double lambda = 1.0;     // diagonal-dominance margin, > 0
    double omega = 1000.0;   // mesh relaxation rate
    double max_tau = 0.0;    // cap on the time step; also the stationary-curve step
    FlowGuards guards{};
    double solver_tol = 1e-12;
};

// Interpolation weight between the two equivalent forms of the vertex update:
//   mu = min|s_m| / max|s_m|, zero exactly when some turning angle vanishes.
inline double mu_parameter(const CurveFrames& fr) {
    double lo = std::abs(fr.sin_half[0]), hi = lo;
    for (double s : fr.sin_half) {
        lo = std::min(lo, std::abs(s));
        hi = std::max(hi, std::abs(s));
    }
    if (!(hi > 0.0)) throw AllFlat();
    return lo / hi;
}

// b_m = (1 - mu) s_m + mu / s_m for mu in (0, 1]; b_m = s_m for mu = 0.
inline std::vector<double> b_coefficients(const CurveFrames& fr, double mu) {
    std::vector<double> b(fr.n);
    if (mu == 0.0) {
        b = fr.sin_half;
        return b;
    }
    for (std::size_t m = 0; m < fr.n; ++m) {
        if (fr.sin_half[m] == 0.0)
            throw FlowError("mu > 0 with a vanishing sin(phi/2); inconsistent mu/s pair");
        b[m] = (1.0 - mu) * fr.sin_half[m] + mu / fr.sin_half[m];
    }
    return b;
}

// Adaptive step keeping the implicit system strictly diagonally dominant:
//   tau = min_e r_e / (2 (1 + lambda) (max|alpha/c| + max|beta b|)),
// capped by max_tau when set. A stationary curve (both maxima zero) advances
// by max_tau so that clock time still moves.
inline double adaptive_timestep(const CurveFrames& fr, const std::vector<double>& alpha,
                                const std::vector<double>& beta, const std::vector<double>& b,
                                double lambda, double max_tau) {
    double a_max = 0.0, b_max = 0.0;
    for (std::size_t m = 0; m < fr.n; ++m) {
        a_max = std::max(a_max, std::abs(alpha[m] / fr.cos_half[m]));
        b_max = std::max(b_max, std::abs(beta[m] * b[m]));
    }
    const double denom = a_max + b_max;
    if (denom == 0.0) {
        if (!(max_tau > 0.0)) throw FlowError("stationary curve needs a positive max_tau");
        return max_tau;
    }
    double tau = fr.min_edge() / (2.0 * (1.0 + lambda) * denom);
    if (max_tau > 0.0) tau = std::min(tau, max_tau);
    return tau;
}

// One semi-implicit position update. Per coordinate the cyclic tridiagonal
// system
//   tau a-_m x_{m-1} + (1 - tau a0_m) x_m + tau a+_m x_{m+1} = x_m^old + tau f_m
// is solved, with
//   a-_m = (alpha_m/c_m - beta_m b_m) / (2 r_m),
//   a+_m = -(alpha_m/c_m + beta_m b_m) / (2 r_{m+1}),
//   a0_m = a-_m + a+_m,
//   f_m  = beta_m c_m (1 - mu) (N_m + N_{m+1}) / 2.
// Joint slot m updates the vertex at pts[(m+1)%N]. The time step from
// adaptive_timestep guarantees strict diagonal dominance, which is asserted.
inline PolyCurve assemble_and_solve(const PolyCurve& curve, const CurveFrames& fr,
                                    const std::vector<double>& alpha,
                                    const std::vector<double>& beta, const std::vector<double>& b,
                                    double mu, double tau, double solver_tol = 1e-12) {
    const std::size_t n = fr.n;
    std::vector<double> sub(n), diag(n), sup(n), rhs_x(n), rhs_y(n);

    for (std::size_t m = 0; m < n; ++m) {
        const double drift = alpha[m] / fr.cos_half[m];
        const double spread = beta[m] * b[m];
        const double a_minus = (drift - spread) / (2.0 * fr.edge_len[m]);
        const double a_plus = -(drift + spread) / (2.0 * fr.edge_len[(m + 1) % n]);
        const double a_zero = a_minus + a_plus;

        sub[m] = tau * a_minus;
        diag[m] = 1.0 - tau * a_zero;
        sup[m] = tau * a_plus;

        const double margin = std::abs(diag[m]) - std::abs(sub[m]) - std::abs(sup[m]);
        if (!(margin > 0.0))
            throw SolveFailure("diagonal dominance lost at row " + std::to_string(m));

        const Vec2 forcing = beta[m] * fr.cos_half[m] * (1.0 - mu) * 0.5 *
                             (fr.normal[m] + fr.normal[(m + 1) % n]);
        const Vec2 old = curve.pts[(m + 1) % n];
        rhs_x[m] = old.x + tau * forcing.x;
        rhs_y[m] = old.y + tau * forcing.y;
    }

    const auto sol_x = solve_cyclic_tridiagonal(sub, diag, sup, rhs_x, solver_tol);
    const auto sol_y = solve_cyclic_tridiagonal(sub, diag, sup, rhs_y, solver_tol);

    PolyCurve next;
    next.pts.resize(n);
    for (std::size_t m = 0; m < n; ++m) next.pts[(m + 1) % n] = {sol_x[m], sol_y[m]};
    return next;
}

struct StepResult {
    double tau = 0.0;
    double mu = 0.0;
    CandidateReport report;
    double err_area = 0.0;
    double err_ratio = 0.0;
};

// Frames + metrics of one state; what a step consumes and a record row reports.
struct FlowState {
    PolyCurve curve;
    CurveFrames frames;
    CurveMetrics metrics;
};

inline FlowState analyze(PolyCurve curve, const Anisotropy& sigma, double wulff_area_value) {
    FlowState st;
    st.frames = build_frames(curve);
    st.metrics = metrics(curve, st.frames, sigma, wulff_area_value);
    st.curve = std::move(curve);
    return st;
}

// Step cap from the curvature feedback loop. The velocity-based bound scales
// like r^2/delta exactly when the normal velocity is of size delta*k, but it
// diverges on near-stationary curves; there sawtooth perturbations are still
// amplified at the explicit rate delta/r^2 between steps, so the cap
//   tau <= min_e r_e^2 / (2 (1 + lambda) max_e delta_e)
// has to hold as well. The mesh relaxation adds the analogous explicit-rate
// bound tau <= 1 / ((1 + lambda) omega).
inline double stability_cap(const CurveFrames& fr, const CurveMetrics& cm, double lambda,
                            double omega) {
    double delta_max = 0.0;
    for (double d : cm.delta) delta_max = std::max(delta_max, std::abs(d));
    const double r = fr.min_edge();
    double cap = r * r / (2.0 * (1.0 + lambda) * std::max(delta_max, 1e-300));
    if (omega > 0.0) cap = std::min(cap, 1.0 / ((1.0 + lambda) * omega));
    return cap;
}

// Full pipeline for one step: velocities, gauge closure, mu/b/tau, implicit solve.
inline std::pair<FlowState, StepResult> step(const FlowState& state, const Anisotropy& sigma,
                                             double wulff_area_value, const StepConfig& cfg) {
    const auto& fr = state.frames;
    const auto& cm = state.metrics;

    VelocityField vf = compute_velocity(fr, cm, sigma, cfg.omega, cfg.guards);
    const double mu = mu_parameter(fr);
    const auto b = b_coefficients(fr, mu);
    double cap = stability_cap(fr, cm, cfg.lambda, cfg.omega);
    if (cfg.max_tau > 0.0) cap = std::min(cap, cfg.max_tau);
    const double tau = adaptive_timestep(fr, vf.alpha, vf.beta, b, cfg.lambda, cap);

    PolyCurve next =
        assemble_and_solve(state.curve, fr, vf.alpha, vf.beta, b, mu, tau, cfg.solver_tol);

    StepResult res;
    res.tau = tau;
    res.mu = mu;
    res.report = vf.report;
    res.err_area = area_error_term(fr, vf.beta_star, vf.alpha);
    res.err_ratio = ratio_error_term(fr, vf.beta_star, vf.alpha, cm, sigma);

    return {analyze(std::move(next), sigma, wulff_area_value), res};
}

// One observation of the run: the state at time t plus the diagnostics of the
// step that left it (zeros on the final row, which no step leaves).
struct SeriesRow {
    double t = 0.0;
    double tau = 0.0;
    double area = 0.0;
    double length = 0.0;
    double energy = 0.0;
    double ratio = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double mesh_ratio = 0.0;
    double phi_min = 0.0;
    int candidate = 0;
    double err_area = 0.0;
    double err_ratio = 0.0;
    double conservation = 0.0;
};

struct Snapshot {
    double t = 0.0;
    PolyCurve curve;
};

struct RunRecord {
    std::vector<SeriesRow> series;
    std::vector<Snapshot> snapshots;
    PolyCurve final_curve;
    double final_time = 0.0;
    std::size_t steps = 0;
    bool ok = true;
    std::string error;        // empty when ok
    std::size_t error_step = 0;
};

struct FlowParams {
    Anisotropy sigma;
    double wulff_area_value = 0.0;  // computed from sigma when <= 0
    double final_time = 1.5;
    double omega = 1000.0;
    double lambda = 1.0;
    double max_tau = 0.0;           // defaults to 1e-3 * final_time when <= 0
    double snapshot_dt = 0.0;       // flow-time cadence; <= 0 disables
    std::size_t snapshot_stride = 0;  // every k-th step; 0 disables
    std::size_t series_stride = 1;
    FlowGuards guards{};
    double solver_tol = 1e-12;
    int quad_nodes = Anisotropy::stability_grid;
};

namespace detail {

inline SeriesRow make_row(double t, const FlowState& st, const StepResult* sr) {
    SeriesRow row;
    row.t = t;
    row.area = st.metrics.area;
    row.length = st.metrics.length;
    row.energy = st.metrics.energy;
    row.ratio = st.metrics.ratio;
    row.r_min = st.frames.min_edge();
    row.r_max = st.frames.max_edge();
    row.mesh_ratio = st.frames.mesh_ratio();
    row.phi_min = st.frames.min_turn();
    row.conservation = st.metrics.conservation;
    if (sr) {
        row.tau = sr->tau;
        row.candidate = sr->report.chosen;
        row.err_area = sr->err_area;
        row.err_ratio = sr->err_ratio;
    }
    return row;
}

}  // namespace detail

// Runs the flow from `initial` until the accumulated time reaches
// params.final_time, recording the time series and snapshots. Requires a
// positively oriented simple input (winding +1). On a runtime error the
// partially filled record is returned with the error tag and step index.
inline RunRecord evolve(const PolyCurve& initial, const FlowParams& params) {
    RunRecord rec;
    const double T = params.final_time;
    if (!(T > 0.0)) throw FlowError("final time must be positive");

    StepConfig cfg;
    cfg.lambda = params.lambda;
    cfg.omega = params.omega;
    cfg.max_tau = params.max_tau > 0.0 ? params.max_tau : 1e-3 * T;
    cfg.guards = params.guards;
    cfg.solver_tol = params.solver_tol;

    const double wulff_area_value = params.wulff_area_value > 0.0
                                        ? params.wulff_area_value
                                        : wulff_area(params.sigma, params.quad_nodes);

    double t = 0.0;
    std::size_t j = 0;
    FlowState state;
    try {
        state = analyze(initial, params.sigma, wulff_area_value);
        if (state.frames.winding() != 1)
            throw FlowError("flow requires winding +1, got " +
                            std::to_string(state.frames.winding()));
    } catch (const FlowError& err) {
        rec.ok = false;
        rec.error = err.what();
        rec.error_step = 0;
        return rec;
    }

    rec.snapshots.push_back({0.0, state.curve});
    double next_snap = params.snapshot_dt > 0.0 ? params.snapshot_dt : -1.0;

    while (t < T) {
        try {
            auto [next_state, sr] = step(state, params.sigma, wulff_area_value, cfg);
            if (params.series_stride > 0 && j % params.series_stride == 0)
                rec.series.push_back(detail::make_row(t, state, &sr));
            t += sr.tau;
            ++j;
            state = std::move(next_state);

            const bool stride_snap = params.snapshot_stride > 0 && j % params.snapshot_stride == 0;
            const bool time_snap = next_snap > 0.0 && t >= next_snap;
            if (stride_snap || time_snap) {
                rec.snapshots.push_back({t, state.curve});
                if (time_snap)
                    while (next_snap <= t) next_snap += params.snapshot_dt;
            }
        } catch (const FlowError& err) {
            rec.ok = false;
            rec.error = err.what();
            rec.error_step = j;
            break;
        }
    }

    rec.series.push_back(detail::make_row(t, state, nullptr));
    if (rec.snapshots.empty() || rec.snapshots.back().t != t)
        rec.snapshots.push_back({t, state.curve});
    rec.final_curve = state.curve;
    rec.final_time = t;
    rec.steps = j;
    return rec;
}

}  // namespace anisoflow
