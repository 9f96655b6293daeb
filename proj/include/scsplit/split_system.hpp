#pragma once

// Split affine ODE systems u' = sum_j (A_j u + g_j(t)), j = 0..s, where A_0 is
// treated explicitly and A_1..A_s implicitly, plus the cached implicit factors
// I - theta*dt*A_j used by every stabilizing correction step.

#include "scsplit/linsolve.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace scsplit {

/// Writes g_j(t) into out. An empty function means g_j = 0.
using SourceFn = std::function<void(double t, std::span<double> out)>;

/// A partition of the unknowns into independent lines: an operator that
/// respects the partition never couples entries of two different lines, so
/// I - c*A_j factorizes line by line. Each line lists global indices in the
/// order used to build its band matrix.
struct LineSet {
    std::vector<std::vector<std::size_t>> lines;

    [[nodiscard]] static LineSet single(std::size_t dim);
};

class SplitAffineSystem {
public:
    /// ops holds A_0..A_s, sources holds g_0..g_s (same length, entries may be
    /// empty). lines, when given, holds one LineSet per implicit operator A_1..A_s.
    SplitAffineSystem(std::vector<SparseMatrix> ops, std::vector<SourceFn> sources,
                      std::vector<LineSet> lines = {});

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    /// Number of implicit parts s.
    [[nodiscard]] int parts() const noexcept { return static_cast<int>(ops_.size()) - 1; }

    [[nodiscard]] const SparseMatrix& op(int j) const { return ops_.at(static_cast<std::size_t>(j)); }
    [[nodiscard]] const LineSet& lines(int j) const { return lines_.at(static_cast<std::size_t>(j - 1)); }
    [[nodiscard]] bool has_source(int j) const { return static_cast<bool>(sources_.at(static_cast<std::size_t>(j))); }

    /// out = g_j(t)
    void source(int j, double t, std::span<double> out) const;
    /// out += alpha * g_j(t)
    void add_source(int j, double t, double alpha, std::span<double> out) const;

    /// out = F_j(t, u) = A_j u + g_j(t)
    void eval(int j, double t, std::span<const double> u, std::span<double> out) const;
    [[nodiscard]] std::vector<double> eval(int j, double t, std::span<const double> u) const;
    /// F(t, u) = sum_j F_j(t, u)
    [[nodiscard]] std::vector<double> eval_total(double t, std::span<const double> u) const;

private:
    std::size_t dim_ = 0;
    std::vector<SparseMatrix> ops_;
    std::vector<SourceFn> sources_;
    std::vector<LineSet> lines_;
};

/// Band LU factors of I - theta_dt * A_j for j = 1..s. Immutable after
/// construction and safe to share between threads.
class ImplicitFactors {
public:
    ImplicitFactors(const SplitAffineSystem& sys, double theta_dt);

    [[nodiscard]] double theta_dt() const noexcept { return theta_dt_; }
    [[nodiscard]] int parts() const noexcept { return static_cast<int>(factors_.size()); }

    /// Overwrites rhs with the solution of (I - theta_dt*A_j) x = rhs.
    void solve_in_place(int j, std::span<double> rhs) const;

private:
    struct Line {
        std::vector<std::size_t> index;
        BandedLU lu;
    };
    double theta_dt_;
    std::vector<std::vector<Line>> factors_;
};

}  // namespace scsplit
