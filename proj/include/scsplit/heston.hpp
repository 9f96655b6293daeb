#pragma once

// Finite-difference semi-discretization of the Heston PDE for European calls
//
//   u_t = 1/2 s^2 v u_ss + rho sigma s v u_sv + 1/2 sigma^2 v u_vv
//         + (r_d - r_f) s u_s + kappa (eta - v) u_v - r_d u
//
// on [0, S_max] x [0, V_max], split as A_0 (mixed derivative), A_1 (all
// s-derivative terms) and A_2 (all v-derivative terms), with the reaction term
// shared between A_1 and A_2.
//
// Boundary treatment:
//   s = 0      u = 0                       (Dirichlet, zero rows)
//   s = S_max  u_s = exp(-r_f t)           (one-sided differences, data in g_1)
//   v = V_max  u = s exp(-r_f t)           (Dirichlet, zero rows, data in g_2)
//   v = 0      PDE with v = 0, u_v by a forward three-point formula
//
// Unknowns cover the full (m1 + 1) x (m2 + 1) node set, s-index fastest.

#include "scsplit/split_system.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scsplit {

struct HestonCase {
    std::string name;
    double kappa = 0.0;
    double eta = 0.0;
    double sigma = 0.0;
    double rho = 0.0;
    double r_d = 0.0;
    double r_f = 0.0;
    double T = 0.0;
    double K = 0.0;

    /// Throws std::invalid_argument unless kappa, eta, sigma, T, K > 0 and |rho| <= 1.
    void validate() const;
};

/// The six benchmark parameter sets "A".."F".
[[nodiscard]] const std::vector<HestonCase>& builtin_heston_cases();
[[nodiscard]] HestonCase heston_case(std::string_view name);

/// Reads a JSON file {"cases": [{"name": "A", "kappa": 3, ...}, ...]}.
[[nodiscard]] std::vector<HestonCase> load_heston_cases(const std::filesystem::path& path);

struct GridParams {
    std::size_t m1 = 100;    // s intervals
    std::size_t m2 = 50;     // v intervals
    double s_max = 0.0;      // 0 selects 8 K
    double v_max = 5.0;
    double s_stretch = 0.0;  // 0 selects K / 5
    double v_stretch = 0.0;  // 0 selects V_max / 500
};

struct HestonGrid {
    std::vector<double> s;
    std::vector<double> v;
    double s_max = 0.0;
    double v_max = 0.0;
    double s_stretch = 0.0;
    double v_stretch = 0.0;

    [[nodiscard]] std::size_t m1() const noexcept { return s.size() - 1; }
    [[nodiscard]] std::size_t m2() const noexcept { return v.size() - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return s.size() * v.size(); }
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return i + s.size() * j; }
};

/// s_i = K + c sinh(xi_i) with xi uniform on [asinh(-K/c), asinh((S_max-K)/c)],
/// v_j = d sinh(zeta_j) with zeta uniform on [0, asinh(V_max/d)].
[[nodiscard]] HestonGrid build_grid(const HestonCase& hc, const GridParams& params);
[[nodiscard]] HestonGrid build_grid(const HestonCase& hc, std::size_t m1, std::size_t m2, double s_max,
                                    double v_max);

/// Three-point weights applied to (u_left, u_mid, u_right).
struct StencilWeights {
    double left = 0.0;
    double mid = 0.0;
    double right = 0.0;
};

struct CentralWeights {
    StencilWeights first;
    StencilWeights second;
};

/// First and second derivative at x_mid, exact on quadratics.
[[nodiscard]] CentralWeights fd_weights_central(double x_left, double x_mid, double x_right);

/// First derivative at x0 from (u0, u1, u2), exact on quadratics.
[[nodiscard]] StencilWeights fd_weights_forward(double x0, double x1, double x2);

/// Second derivative at the right end x2 from (u0, u1, u2) and a prescribed
/// slope u'(x2), exact on cubics.
struct NeumannWeights {
    StencilWeights values;
    double slope = 0.0;
};
[[nodiscard]] NeumannWeights fd_weights_neumann_second(double x0, double x1, double x2);

struct HestonSystem {
    SplitAffineSystem system;
    HestonGrid grid;
    HestonCase hcase;
    std::vector<std::size_t> roi;  // indices inside K/2 < s < 3K/2, 0 < v < 1
};

/// reaction_share_s is the fraction of -r_d u assigned to A_1 (rest to A_2).
[[nodiscard]] HestonSystem assemble(const HestonCase& hc, const HestonGrid& grid, double reaction_share_s = 0.5);

/// Payoff max(0, s - K) with cell averaging around the strike; Dirichlet nodes
/// at v = V_max carry their boundary value s at t = 0.
[[nodiscard]] std::vector<double> initial_vector(const HestonCase& hc, const HestonGrid& grid);

[[nodiscard]] std::vector<std::size_t> roi_indices(const HestonGrid& grid, double K);

/// Max-norm difference over the region of interest. Throws when it is empty.
[[nodiscard]] double roi_error(std::span<const double> u_num, std::span<const double> u_ref, const HestonGrid& grid,
                               double K);

}  // namespace scsplit
