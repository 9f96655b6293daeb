#include "scsplit/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace scsplit {

BandedMatrix::BandedMatrix(std::size_t dim, int lower_bw, int upper_bw)
    : dim_(dim), kl_(lower_bw), ku_(upper_bw) {
    if (lower_bw < 0 || upper_bw < 0) throw std::invalid_argument("BandedMatrix: negative bandwidth");
    data_.assign(dim * width(), 0.0);
}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const noexcept {
    if (i >= dim_ || j >= dim_) return false;
    return j + static_cast<std::size_t>(kl_) >= i && j <= i + static_cast<std::size_t>(ku_);
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) throw std::out_of_range("BandedMatrix: index out of range");
    if (!in_band(i, j)) return 0.0;
    return slot(i, j);
}

void BandedMatrix::set(std::size_t i, std::size_t j, double value) {
    if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: entry outside band");
    slot(i, j) = value;
}

void BandedMatrix::add(std::size_t i, std::size_t j, double value) {
    if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: entry outside band");
    slot(i, j) += value;
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("BandedMatrix::multiply: dimension mismatch");
    std::vector<double> y(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(kl_) ? i - kl_ : 0;
        const std::size_t hi = std::min(dim_ - 1, i + static_cast<std::size_t>(ku_));
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += slot(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

double BandedMatrix::norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(kl_) ? i - kl_ : 0;
        const std::size_t hi = std::min(dim_ - 1, i + static_cast<std::size_t>(ku_));
        double row = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) row += std::abs(slot(i, j));
        best = std::max(best, row);
    }
    return best;
}

BandedLU::BandedLU(BandedMatrix m) : lu_(std::move(m)), pivots_(lu_.dim()) {
    const std::size_t n = lu_.dim();
    const auto kl = static_cast<std::size_t>(lu_.kl_);
    const auto ku = static_cast<std::size_t>(lu_.ku_);
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t last_row = std::min(n - 1, c + kl);
        const std::size_t last_col = std::min(n - 1, c + kl + ku);

        std::size_t p = c;
        double best = std::abs(lu_.slot(c, c));
        for (std::size_t r = c + 1; r <= last_row; ++r) {
            const double v = std::abs(lu_.slot(r, c));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (!(best >= kSingularPivot)) {
            throw LinearSolveError("singular band matrix: pivot " + std::to_string(best) + " at row " +
                                       std::to_string(c),
                                   c, best);
        }
        pivots_[c] = p;
        if (p != c) {
            for (std::size_t j = c; j <= last_col; ++j) std::swap(lu_.slot(c, j), lu_.slot(p, j));
        }
        const double inv = 1.0 / lu_.slot(c, c);
        for (std::size_t r = c + 1; r <= last_row; ++r) {
            const double l = lu_.slot(r, c) * inv;
            lu_.slot(r, c) = l;
            if (l == 0.0) continue;
            for (std::size_t j = c + 1; j <= last_col; ++j) lu_.slot(r, j) -= l * lu_.slot(c, j);
        }
    }
}

void BandedLU::solve_in_place(std::span<double> b) const {
    const std::size_t n = lu_.dim();
    if (b.size() != n) throw std::invalid_argument("BandedLU::solve: dimension mismatch");
    const auto kl = static_cast<std::size_t>(lu_.kl_);
    const auto ku = static_cast<std::size_t>(lu_.ku_);
    for (std::size_t c = 0; c < n; ++c) {
        if (pivots_[c] != c) std::swap(b[c], b[pivots_[c]]);
        const double bc = b[c];
        if (bc == 0.0) continue;
        const std::size_t last_row = std::min(n - 1, c + kl);
        for (std::size_t r = c + 1; r <= last_row; ++r) b[r] -= lu_.slot(r, c) * bc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t last_col = std::min(n - 1, ii + kl + ku);
        double acc = b[ii];
        for (std::size_t j = ii + 1; j <= last_col; ++j) acc -= lu_.slot(ii, j) * b[j];
        b[ii] = acc / lu_.slot(ii, ii);
    }
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
}

SparseMatrix::SparseMatrix(std::size_t dim, std::vector<Triplet> entries) : dim_(dim) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_start_.assign(dim + 1, 0);
    cols_.reserve(entries.size());
    values_.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const Triplet& t = entries[e];
        if (t.row >= dim || t.col >= dim) throw std::out_of_range("SparseMatrix: entry out of range");
        if (!std::isfinite(t.value)) throw std::invalid_argument("SparseMatrix: non-finite entry");
        if (e > 0 && entries[e - 1].row == t.row && entries[e - 1].col == t.col) {
            values_.back() += t.value;
            continue;
        }
        cols_.push_back(t.col);
        values_.push_back(t.value);
        ++row_start_[t.row + 1];
    }
    for (std::size_t i = 0; i < dim; ++i) row_start_[i + 1] += row_start_[i];
}

SparseMatrix SparseMatrix::identity(std::size_t dim) {
    std::vector<Triplet> t;
    t.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) t.push_back({i, i, 1.0});
    return SparseMatrix(dim, std::move(t));
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) throw std::out_of_range("SparseMatrix: index out of range");
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(dim_, 0.0);
    multiply_add(x, 1.0, y);
    return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, double alpha, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) throw std::invalid_argument("SparseMatrix: dimension mismatch");
    for (std::size_t i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) acc += values_[p] * x[cols_[p]];
        y[i] += alpha * acc;
    }
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) out.push_back({i, cols_[p], values_[p]});
    }
    return out;
}

bool SparseMatrix::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("SparseMatrix: dimension mismatch");
    auto t = a.triplets();
    auto tb = b.triplets();
    t.insert(t.end(), tb.begin(), tb.end());
    return SparseMatrix(a.dim(), std::move(t));
}

}  // namespace scsplit
