#include "scsplit/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace scsplit {

namespace {

// Exact solution u(t) = sum_m phi_m(t) w_m.
struct Modes {
    std::vector<std::function<double(double)>> phi;
    std::vector<std::function<double(double)>> dphi;
    std::vector<std::vector<double>> w;
};

std::vector<double> combine(const Modes& m, double t, bool derivative) {
    std::vector<double> out(m.w.front().size(), 0.0);
    for (std::size_t k = 0; k < m.w.size(); ++k) {
        const double c = derivative ? m.dphi[k](t) : m.phi[k](t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * m.w[k][i];
    }
    return out;
}

// g_j(t) = u'(t) / (s + 1) - A_j u(t)
ManufacturedProblem finish(std::string name, std::vector<SparseMatrix> ops, std::vector<LineSet> lines,
                           std::shared_ptr<const Modes> modes) {
    const auto parts = ops.size();
    std::vector<SourceFn> sources;
    for (std::size_t j = 0; j < parts; ++j) {
        std::vector<std::vector<double>> aw;
        for (const auto& w : modes->w) aw.push_back(ops[j].multiply(w));
        const double share = 1.0 / static_cast<double>(parts);
        sources.emplace_back([modes, aw = std::move(aw), share](double t, std::span<double> out) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.0;
            for (std::size_t k = 0; k < aw.size(); ++k) {
                const double c = modes->phi[k](t);
                const double dc = share * modes->dphi[k](t);
                for (std::size_t i = 0; i < out.size(); ++i) out[i] += dc * modes->w[k][i] - c * aw[k][i];
            }
        });
    }
    ManufacturedProblem p;
    p.name = std::move(name);
    p.system = std::make_shared<const SplitAffineSystem>(std::move(ops), std::move(sources), std::move(lines));
    p.exact = [modes](double t) { return combine(*modes, t, false); };
    p.T = 1.0;
    return p;
}

}  // namespace

ManufacturedProblem manufactured_linear(std::uint64_t seed, std::size_t dim) {
    if (dim < 1) throw std::invalid_argument("manufactured_linear: dim must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    auto spd = [&] {
        std::vector<double> b(dim * dim);
        for (auto& x : b) x = unif(rng);
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) s += b[i * dim + k] * b[j * dim + k];
                t.push_back({i, j, -0.5 * s - (i == j ? 0.5 : 0.0)});
            }
        }
        return SparseMatrix(dim, std::move(t));
    };
    std::vector<Triplet> t0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) t0.push_back({i, j, 0.5 * unif(rng)});
    }
    std::vector<SparseMatrix> ops;
    ops.emplace_back(dim, std::move(t0));
    ops.push_back(spd());
    ops.push_back(spd());

    auto modes = std::make_shared<Modes>();
    const std::vector<std::function<double(double)>> phi = {
        [](double t) { return std::sin(t + 1.0); }, [](double t) { return std::cos(2.0 * t); },
        [](double t) { return std::exp(-0.5 * t); }, [](double t) { return 1.0 / (1.0 + t); }};
    const std::vector<std::function<double(double)>> dphi = {
        [](double t) { return std::cos(t + 1.0); }, [](double t) { return -2.0 * std::sin(2.0 * t); },
        [](double t) { return -0.5 * std::exp(-0.5 * t); }, [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); }};
    for (std::size_t i = 0; i < dim; ++i) {
        modes->phi.push_back(phi[i % phi.size()]);
        modes->dphi.push_back(dphi[i % dphi.size()]);
        std::vector<double> e(dim, 0.0);
        e[i] = 1.0 + 0.25 * static_cast<double>(i / phi.size());
        modes->w.push_back(std::move(e));
    }
    return finish("linear" + std::to_string(dim), std::move(ops), {}, modes);
}

ManufacturedProblem manufactured_mixed2d(std::size_t n, double gamma) {
    if (n < 3) throw std::invalid_argument("manufactured_mixed2d: need at least 3 interior nodes per direction");
    const double h = 1.0 / static_cast<double>(n + 1);
    const std::size_t dim = n * n;
    auto idx = [n](std::size_t i, std::size_t j) { return i + n * j; };
    const double c_mixed = 2.0 * gamma;

    std::vector<Triplet> t0;
    std::vector<Triplet> t1;
    std::vector<Triplet> t2;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = idx(i, j);
            const double d2 = 1.0 / (h * h);
            t1.push_back({row, row, -2.0 * d2});
            t2.push_back({row, row, -2.0 * d2});
            if (i > 0) t1.push_back({row, idx(i - 1, j), d2});
            if (i + 1 < n) t1.push_back({row, idx(i + 1, j), d2});
            if (j > 0) t2.push_back({row, idx(i, j - 1), d2});
            if (j + 1 < n) t2.push_back({row, idx(i, j + 1), d2});
            const double dm = c_mixed / (4.0 * h * h);
            for (int dj : {-1, 1}) {
                for (int di : {-1, 1}) {
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(n) || jj >= static_cast<std::ptrdiff_t>(n)) {
                        continue;
                    }
                    t0.push_back({row, idx(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)), di * dj * dm});
                }
            }
        }
    }
    std::vector<SparseMatrix> ops;
    ops.emplace_back(dim, std::move(t0));
    ops.emplace_back(dim, std::move(t1));
    ops.emplace_back(dim, std::move(t2));

    LineSet x_lines;
    LineSet y_lines;
    for (std::size_t j = 0; j < n; ++j) {
        auto& line = x_lines.lines.emplace_back();
        for (std::size_t i = 0; i < n; ++i) line.push_back(idx(i, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& line = y_lines.lines.emplace_back();
        for (std::size_t j = 0; j < n; ++j) line.push_back(idx(i, j));
    }

    auto modes = std::make_shared<Modes>();
    std::vector<double> w1(dim);
    std::vector<double> w2(dim);
    const double pi = std::numbers::pi;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i + 1) * h;
            const double y = static_cast<double>(j + 1) * h;
            w1[idx(i, j)] = std::sin(pi * x) * std::sin(pi * y);
            w2[idx(i, j)] = x * (1.0 - x) * y * (1.0 - y) * (1.0 + x - y);
        }
    }
    modes->w = {std::move(w1), std::move(w2)};
    modes->phi = {[](double t) { return 1.0 + std::sin(2.0 * t); }, [](double t) { return std::exp(0.5 * t); }};
    modes->dphi = {[](double t) { return 2.0 * std::cos(2.0 * t); }, [](double t) { return 0.5 * std::exp(0.5 * t); }};
    return finish("mixed2d", std::move(ops), {std::move(x_lines), std::move(y_lines)}, modes);
}

const std::vector<std::string>& manufactured_ids() {
    static const std::vector<std::string> ids = {"linear4", "mixed2d"};
    return ids;
}

ManufacturedProblem manufactured_problem(std::string_view id) {
    if (id == "linear4") return manufactured_linear();
    if (id == "mixed2d") return manufactured_mixed2d();
    throw std::invalid_argument("unknown manufactured problem '" + std::string(id) + "'");
}

}  // namespace scsplit
