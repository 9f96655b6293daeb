#pragma once

// Split linear test systems with known exact solutions, used for order studies.
// Every F_j(t, u_ex(t)) equals u_ex'(t) / (s + 1), so each part carries the
// same smooth share of the time derivative.

#include "scsplit/split_system.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace scsplit {

struct ManufacturedProblem {
    std::string name;
    std::shared_ptr<const SplitAffineSystem> system;
    std::function<std::vector<double>(double)> exact;
    double T = 1.0;
};

/// Small dense system (A_0 full, A_1 and A_2 symmetric negative definite)
/// drawn from a fixed seed.
[[nodiscard]] ManufacturedProblem manufactured_linear(std::uint64_t seed = 7, std::size_t dim = 4);

/// Central differences for u_t = u_xx + c u_xy + u_yy on the unit square with
/// n x n interior nodes and homogeneous Dirichlet data, c = 2 gamma.
[[nodiscard]] ManufacturedProblem manufactured_mixed2d(std::size_t n = 15, double gamma = 0.5);

/// "linear4" or "mixed2d".
[[nodiscard]] ManufacturedProblem manufactured_problem(std::string_view id);
[[nodiscard]] const std::vector<std::string>& manufactured_ids();

}  // namespace scsplit
