#pragma once

// Banded LU with partial pivoting and a compressed-row sparse matrix.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scsplit {

/// Raised when a factorization meets a pivot below the singularity threshold.
class LinearSolveError : public std::runtime_error {
public:
    LinearSolveError(const std::string& what, std::size_t row, double pivot, int operator_index = -1)
        : std::runtime_error(what), row_(row), pivot_(pivot), operator_index_(operator_index) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] double pivot() const noexcept { return pivot_; }
    /// Index j of the split operator whose implicit factor failed, -1 if unknown.
    [[nodiscard]] int operator_index() const noexcept { return operator_index_; }

private:
    std::size_t row_;
    double pivot_;
    int operator_index_;
};

inline constexpr double kSingularPivot = 1e-300;

/// Square band matrix. Storage leaves room for the lower_bw extra
/// superdiagonals that partial pivoting can fill in.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t dim, int lower_bw, int upper_bw);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] int lower_bw() const noexcept { return kl_; }
    [[nodiscard]] int upper_bw() const noexcept { return ku_; }

    [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept;

    /// Element access; throws std::out_of_range outside the declared band.
    [[nodiscard]] double get(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);
    void add(std::size_t i, std::size_t j, double value);

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] double norm_inf() const;

private:
    friend class BandedLU;

    [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(2 * kl_ + ku_ + 1); }
    // Raw slot for (i, j); caller guarantees i - kl <= j <= i + kl + ku.
    [[nodiscard]] double& slot(std::size_t i, std::size_t j) noexcept {
        return data_[i * width() + (j + static_cast<std::size_t>(kl_) - i)];
    }
    [[nodiscard]] double slot(std::size_t i, std::size_t j) const noexcept {
        return data_[i * width() + (j + static_cast<std::size_t>(kl_) - i)];
    }

    std::size_t dim_ = 0;
    int kl_ = 0;
    int ku_ = 0;
    std::vector<double> data_;
};

/// LU factors of a band matrix, reusable for many right-hand sides.
class BandedLU {
public:
    /// Factorizes; throws LinearSolveError when a pivot falls below kSingularPivot.
    explicit BandedLU(BandedMatrix m);

    [[nodiscard]] std::size_t dim() const noexcept { return lu_.dim(); }

    void solve_in_place(std::span<double> rhs) const;
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    BandedMatrix lu_;
    std::vector<std::size_t> pivots_;
};

[[nodiscard]] inline BandedLU factorize(const BandedMatrix& m) { return BandedLU(m); }
[[nodiscard]] inline std::vector<double> solve(const BandedLU& f, std::span<const double> rhs) {
    return f.solve(rhs);
}

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed-row sparse matrix. Duplicate coordinates are summed on construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(std::size_t dim) : dim_(dim), row_start_(dim + 1, 0) {}
    SparseMatrix(std::size_t dim, std::vector<Triplet> entries);

    [[nodiscard]] static SparseMatrix identity(std::size_t dim);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }

    [[nodiscard]] std::span<const std::size_t> row_cols(std::size_t i) const {
        return {cols_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
    }
    [[nodiscard]] std::span<const double> row_values(std::size_t i) const {
        return {values_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
    }

    /// Value at (i, j), zero when not stored.
    [[nodiscard]] double coeff(std::size_t i, std::size_t j) const;

    /// y = A x
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    /// y += alpha * A x
    void multiply_add(std::span<const double> x, double alpha, std::span<double> y) const;

    [[nodiscard]] std::vector<Triplet> triplets() const;
    [[nodiscard]] bool is_zero() const;

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_start_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

[[nodiscard]] inline std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
    return a.multiply(x);
}

[[nodiscard]] SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace scsplit
