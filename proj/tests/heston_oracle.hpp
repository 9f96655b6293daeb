#pragma once

// Operator consistency check for the assembled Heston system against the
// analytic right-hand side of the PDE for a smooth function
//
//   u(s, v) = s + A cos(pi s / S_max) phi(v),  phi(v) = exp(-v) + 0.3 v^2
//
// which has u_s = 1 and u_sv = 0 at s = S_max, matching the boundary model.

#include "scsplit/heston.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace testsupport {

struct SmoothHestonFunction {
    double S = 800.0;
    double A = 10.0;

    [[nodiscard]] double phi(double v) const { return std::exp(-v) + 0.3 * v * v; }
    [[nodiscard]] double dphi(double v) const { return -std::exp(-v) + 0.6 * v; }
    [[nodiscard]] double ddphi(double v) const { return std::exp(-v) + 0.6; }

    [[nodiscard]] double u(double s, double v) const { return s + A * std::cos(std::numbers::pi * s / S) * phi(v); }

    [[nodiscard]] double pde(const scsplit::HestonCase& hc, double s, double v) const {
        const double k = std::numbers::pi / S;
        const double c = std::cos(k * s);
        const double sn = std::sin(k * s);
        const double u_s = 1.0 - A * k * sn * phi(v);
        const double u_ss = -A * k * k * c * phi(v);
        const double u_v = A * c * dphi(v);
        const double u_vv = A * c * ddphi(v);
        const double u_sv = -A * k * sn * dphi(v);
        return 0.5 * s * s * v * u_ss + hc.rho * hc.sigma * s * v * u_sv + 0.5 * hc.sigma * hc.sigma * v * u_vv +
               (hc.r_d - hc.r_f) * s * u_s + hc.kappa * (hc.eta - v) * u_v - hc.r_d * u(s, v);
    }
};

/// Max over all non-Dirichlet rows of |(A_0 + A_1 + A_2) u + g(0) - L u|.
inline double heston_consistency_error(const scsplit::HestonCase& hc, std::size_t m1, std::size_t m2) {
    scsplit::GridParams p;
    p.m1 = m1;
    p.m2 = m2;
    const auto grid = scsplit::build_grid(hc, p);
    const auto hs = scsplit::assemble(hc, grid);
    const SmoothHestonFunction f{grid.s_max, 10.0};
    std::vector<double> u(grid.size());
    for (std::size_t j = 0; j <= grid.m2(); ++j) {
        for (std::size_t i = 0; i <= grid.m1(); ++i) u[grid.index(i, j)] = f.u(grid.s[i], grid.v[j]);
    }
    const auto lu = hs.system.eval_total(0.0, u);
    double err = 0.0;
    for (std::size_t j = 0; j < grid.m2(); ++j) {
        for (std::size_t i = 1; i <= grid.m1(); ++i) {
            err = std::max(err, std::abs(lu[grid.index(i, j)] - f.pde(hc, grid.s[i], grid.v[j])));
        }
    }
    return err;
}

}  // namespace testsupport
