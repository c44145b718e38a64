#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "anisoflow/errors.hpp"
#include "anisoflow/vec2.hpp"

namespace anisoflow {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace detail {

// Trapezoid rule on [0, 2*pi] for a 2*pi-periodic integrand. For smooth
// periodic functions this converges spectrally; for trigonometric
// polynomials of degree < n/2 it is exact up to rounding.
template <typename F>
double periodic_trapezoid(F&& f, int nodes) {
    const double h = two_pi / nodes;
    double sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double v = f(h * k);
        if (!std::isfinite(v)) throw FlowError("non-finite integrand in periodic quadrature");
        sum += v;
    }
    return h * sum;
}

}  // namespace detail

// Interfacial energy density sigma(nu): a strictly positive 2*pi-periodic
// weight on the tangent angle. Instances know their exact first and second
// derivatives (no numerical differentiation), and the built-in families are
// closed under affine and two-term linear combination.
//
// Construction enforces the parabolicity condition
//     delta(nu) = sigma(nu) + sigma''(nu) > 0
// by dense sampling; an instance that fails it is never handed out.
class Anisotropy {
  public:
    static constexpr int stability_grid = 4096;

    // sigma(nu) = c
    static Anisotropy constant(double c) {
        Node n;
        n.kind = Kind::Constant;
        n.c = c;
        n.label = "constant(" + trim_num(c) + ")";
        return make(std::move(n));
    }

    // sigma(nu) = 1 + eps * cos(m * nu). Requires eps * (m^2 - 1) < 1, which
    // is exactly delta > 0 for this family.
    static Anisotropy cosine(double eps, int m) {
        if (m < 1) throw FlowError("cosine anisotropy requires m >= 1");
        if (eps * (m * m - 1) >= 1.0)
            throw FlowError("unstable cosine anisotropy: eps*(m^2-1) = " +
                            std::to_string(eps * (m * m - 1)) + " >= 1");
        Node n;
        n.kind = Kind::Cosine;
        n.eps = eps;
        n.m = m;
        n.label = "cosine(" + trim_num(eps) + "," + std::to_string(m) + ")";
        return make(std::move(n));
    }

    // w1 * a + w2 * b; derivatives combine linearly.
    static Anisotropy mixed(double w1, const Anisotropy& a, double w2, const Anisotropy& b) {
        Node n;
        n.kind = Kind::Combo;
        n.w1 = w1;
        n.w2 = w2;
        n.left = a.node_;
        n.right = b.node_;
        n.label = trim_num(w1) + "*" + a.describe() + " + " + trim_num(w2) + "*" + b.describe();
        return make(std::move(n));
    }

    // scale * sigma + offset
    Anisotropy affine(double scale, double offset) const {
        return mixed(scale, *this, offset, constant(1.0));
    }

    double value(double nu) const { return node_->eval(nu, 0); }
    double deriv(double nu) const { return node_->eval(nu, 1); }
    double deriv2(double nu) const { return node_->eval(nu, 2); }

    double eval(double nu, int order) const {
        if (order < 0 || order > 2) throw FlowError("derivative order must be 0, 1 or 2");
        return node_->eval(nu, order);
    }

    // delta(nu) = sigma + sigma''; the reciprocal curvature of the Wulff boundary.
    double stability(double nu) const { return node_->eval(nu, 0) + node_->eval(nu, 2); }

    const std::string& describe() const { return node_->label; }

  private:
    enum class Kind { Constant, Cosine, Combo };

    struct Node {
        Kind kind = Kind::Constant;
        double c = 1.0;
        double eps = 0.0;
        int m = 1;
        double w1 = 0.0, w2 = 0.0;
        std::shared_ptr<const Node> left, right;
        std::string label;

        double eval(double nu, int order) const {
            switch (kind) {
                case Kind::Constant:
                    return order == 0 ? c : 0.0;
                case Kind::Cosine:
                    switch (order) {
                        case 0: return 1.0 + eps * std::cos(m * nu);
                        case 1: return -eps * m * std::sin(m * nu);
                        default: return -eps * m * m * std::cos(m * nu);
                    }
                case Kind::Combo:
                    return w1 * left->eval(nu, order) + w2 * right->eval(nu, order);
            }
            return 0.0;  // unreachable
        }
    };

    static Anisotropy make(Node&& n) {
        Anisotropy a;
        a.node_ = std::make_shared<const Node>(std::move(n));
        a.check_admissible();
        return a;
    }

    void check_admissible() const {
        const double h = two_pi / stability_grid;
        for (int k = 0; k < stability_grid; ++k) {
            const double nu = h * k;
            const double s = node_->eval(nu, 0);
            const double d = s + node_->eval(nu, 2);
            if (!(s > 0.0))
                throw FlowError("anisotropy not strictly positive at nu = " + std::to_string(nu) +
                                " [" + node_->label + "]");
            if (!(d > 0.0))
                throw FlowError("unstable anisotropy: sigma + sigma'' = " + std::to_string(d) +
                                " at nu = " + std::to_string(nu) + " [" + node_->label + "]");
        }
    }

    static std::string trim_num(double v) {
        std::string s = std::to_string(v);
        while (s.size() > 1 && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }

    std::shared_ptr<const Node> node_;
};

// Point of the Wulff boundary with tangent angle nu:
//   x(nu) = -sigma(nu) N + sigma'(nu) T,  T = (cos nu, sin nu), N = T^perp.
// Tracing nu over [0, 2*pi) yields a convex closed curve whose curvature is
// 1/delta(nu), so its anisotropic curvature is identically one.
inline Vec2 wulff_point(const Anisotropy& sigma, double nu) {
    const double s = sigma.value(nu);
    const double s1 = sigma.deriv(nu);
    const Vec2 tangent{std::cos(nu), std::sin(nu)};
    const Vec2 normal = perp(tangent);
    return -s * normal + s1 * tangent;
}

// Area of the Wulff shape: |W_sigma| = (1/2) integral of sigma (sigma'' + sigma).
inline double wulff_area(const Anisotropy& sigma, int nodes = Anisotropy::stability_grid) {
    return 0.5 * detail::periodic_trapezoid(
                     [&](double nu) { return sigma.value(nu) * sigma.stability(nu); }, nodes);
}

// Closed form of |W_sigma| for sigma = 1 + eps*cos(m nu).
inline double cosine_wulff_area(double eps, int m) {
    return 0.5 * std::numbers::pi * (2.0 - eps * eps * (m * m - 1));
}

// Total interfacial energy of the Wulff boundary of sigma weighted by mu:
//   L_mu(dW_sigma) = integral of mu(nu) (sigma(nu) + sigma''(nu)) d nu.
// Symmetric in (mu, sigma): L_mu(dW_sigma) = L_sigma(dW_mu).
inline double wulff_energy(const Anisotropy& mu, const Anisotropy& sigma,
                           int nodes = Anisotropy::stability_grid) {
    return detail::periodic_trapezoid(
        [&](double nu) { return mu.value(nu) * sigma.stability(nu); }, nodes);
}

// Boundary length L(dW_sigma) = L_1(dW_sigma).
inline double wulff_boundary_length(const Anisotropy& sigma,
                                    int nodes = Anisotropy::stability_grid) {
    return wulff_energy(Anisotropy::constant(1.0), sigma, nodes);
}

// Sharp constant of the mixed anisoperimetric inequality
//   L_sigma(G) L_mu(G) / A(G) >= K_{sigma,mu} = 2 sqrt(|W_sigma| |W_mu|) + L_sigma(dW_mu).
inline double mixed_constant(const Anisotropy& sigma, const Anisotropy& mu,
                             int nodes = Anisotropy::stability_grid) {
    return 2.0 * std::sqrt(wulff_area(sigma, nodes) * wulff_area(mu, nodes)) +
           wulff_energy(sigma, mu, nodes);
}

// The anisotropy whose Wulff boundary attains equality in the mixed
// inequality: sqrt(|W_mu|) sigma + sqrt(|W_sigma|) mu.
inline Anisotropy minimizing_anisotropy(const Anisotropy& sigma, const Anisotropy& mu,
                                        int nodes = Anisotropy::stability_grid) {
    return Anisotropy::mixed(std::sqrt(wulff_area(mu, nodes)), sigma,
                             std::sqrt(wulff_area(sigma, nodes)), mu);
}

// Initial rate dA/dt for the anisoperimetric-ratio gradient flow started from
// (any homothet of) the Wulff boundary of sqrt(pi) sigma + sqrt(|W_sigma|):
//   dA/dt|0 = sqrt(pi |W_sigma|) - L(dW_sigma) / 2.
// Strictly negative for nonconstant sigma.
inline double mixed_wulff_area_rate(const Anisotropy& sigma,
                                    int nodes = Anisotropy::stability_grid) {
    return std::sqrt(std::numbers::pi * wulff_area(sigma, nodes)) -
           0.5 * wulff_boundary_length(sigma, nodes);
}

// Anisotropy together with the two Wulff-shape scalars everything downstream needs.
struct WulffGeometry {
    Anisotropy density;
    double area;             // |W_sigma|
    double boundary_length;  // L(dW_sigma)
};

inline WulffGeometry make_wulff_geometry(const Anisotropy& sigma,
                                         int nodes = Anisotropy::stability_grid) {
    return {sigma, wulff_area(sigma, nodes), wulff_boundary_length(sigma, nodes)};
}

}  // namespace anisoflow
