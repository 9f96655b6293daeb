#include "scsplit/split_system.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace scsplit {

LineSet LineSet::single(std::size_t dim) {
    LineSet ls;
    ls.lines.emplace_back(dim);
    std::iota(ls.lines.front().begin(), ls.lines.front().end(), std::size_t{0});
    return ls;
}

SplitAffineSystem::SplitAffineSystem(std::vector<SparseMatrix> ops, std::vector<SourceFn> sources,
                                     std::vector<LineSet> lines)
    : ops_(std::move(ops)), sources_(std::move(sources)), lines_(std::move(lines)) {
    if (ops_.size() < 2) throw std::invalid_argument("SplitAffineSystem: need A_0 and at least one implicit part");
    if (sources_.empty()) sources_.resize(ops_.size());
    if (sources_.size() != ops_.size()) throw std::invalid_argument("SplitAffineSystem: one source per operator");
    dim_ = ops_.front().dim();
    for (const auto& a : ops_) {
        if (a.dim() != dim_) throw std::invalid_argument("SplitAffineSystem: operator dimensions differ");
    }
    if (lines_.empty()) lines_.assign(ops_.size() - 1, LineSet::single(dim_));
    if (lines_.size() != ops_.size() - 1) throw std::invalid_argument("SplitAffineSystem: one LineSet per implicit part");
}

void SplitAffineSystem::source(int j, double t, std::span<double> out) const {
    const auto& g = sources_.at(static_cast<std::size_t>(j));
    if (g) {
        g(t, out);
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

void SplitAffineSystem::add_source(int j, double t, double alpha, std::span<double> out) const {
    const auto& g = sources_.at(static_cast<std::size_t>(j));
    if (!g) return;
    std::vector<double> tmp(dim_);
    g(t, tmp);
    for (std::size_t i = 0; i < dim_; ++i) out[i] += alpha * tmp[i];
}

void SplitAffineSystem::eval(int j, double t, std::span<const double> u, std::span<double> out) const {
    source(j, t, out);
    op(j).multiply_add(u, 1.0, out);
}

std::vector<double> SplitAffineSystem::eval(int j, double t, std::span<const double> u) const {
    std::vector<double> out(dim_);
    eval(j, t, u, out);
    return out;
}

std::vector<double> SplitAffineSystem::eval_total(double t, std::span<const double> u) const {
    std::vector<double> total(dim_, 0.0);
    std::vector<double> part(dim_);
    for (int j = 0; j <= parts(); ++j) {
        eval(j, t, u, part);
        for (std::size_t i = 0; i < dim_; ++i) total[i] += part[i];
    }
    return total;
}

ImplicitFactors::ImplicitFactors(const SplitAffineSystem& sys, double theta_dt) : theta_dt_(theta_dt) {
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    const std::size_t n = sys.dim();
    std::vector<std::size_t> line_of(n);
    std::vector<std::size_t> pos_in_line(n);

    factors_.resize(static_cast<std::size_t>(sys.parts()));
    for (int j = 1; j <= sys.parts(); ++j) {
        const SparseMatrix& a = sys.op(j);
        const LineSet& ls = sys.lines(j);
        std::fill(line_of.begin(), line_of.end(), npos);
        for (std::size_t l = 0; l < ls.lines.size(); ++l) {
            for (std::size_t p = 0; p < ls.lines[l].size(); ++p) {
                const std::size_t g = ls.lines[l][p];
                if (g >= n || line_of[g] != npos) {
                    throw std::invalid_argument("LineSet for operator " + std::to_string(j) +
                                                " is not a partition of the unknowns");
                }
                line_of[g] = l;
                pos_in_line[g] = p;
            }
        }
        if (std::find(line_of.begin(), line_of.end(), npos) != line_of.end()) {
            throw std::invalid_argument("LineSet for operator " + std::to_string(j) + " misses unknowns");
        }

        auto& out = factors_[static_cast<std::size_t>(j - 1)];
        out.reserve(ls.lines.size());
        for (std::size_t l = 0; l < ls.lines.size(); ++l) {
            const auto& idx = ls.lines[l];
            int kl = 0;
            int ku = 0;
            for (std::size_t p = 0; p < idx.size(); ++p) {
                for (std::size_t col : a.row_cols(idx[p])) {
                    if (line_of[col] != l) {
                        throw std::invalid_argument("operator " + std::to_string(j) + " couples distinct lines");
                    }
                    const auto off = static_cast<long>(pos_in_line[col]) - static_cast<long>(p);
                    kl = std::max(kl, static_cast<int>(-off));
                    ku = std::max(ku, static_cast<int>(off));
                }
            }
            BandedMatrix m(idx.size(), kl, ku);
            for (std::size_t p = 0; p < idx.size(); ++p) {
                m.add(p, p, 1.0);
                const auto cols = a.row_cols(idx[p]);
                const auto vals = a.row_values(idx[p]);
                for (std::size_t q = 0; q < cols.size(); ++q) m.add(p, pos_in_line[cols[q]], -theta_dt * vals[q]);
            }
            try {
                out.push_back(Line{idx, BandedLU(std::move(m))});
            } catch (const LinearSolveError& e) {
                throw LinearSolveError("implicit factor I - theta*dt*A_" + std::to_string(j) + " is singular (line " +
                                           std::to_string(l) + "): " + e.what(),
                                       idx[e.row()], e.pivot(), j);
            }
        }
    }
}

void ImplicitFactors::solve_in_place(int j, std::span<double> rhs) const {
    const auto& lines = factors_.at(static_cast<std::size_t>(j - 1));
    std::vector<double> buf;
    for (const auto& line : lines) {
        buf.resize(line.index.size());
        for (std::size_t p = 0; p < buf.size(); ++p) buf[p] = rhs[line.index[p]];
        line.lu.solve_in_place(buf);
        for (std::size_t p = 0; p < buf.size(); ++p) rhs[line.index[p]] = buf[p];
    }
}

}  // namespace scsplit
