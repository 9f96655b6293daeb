#pragma once

// Shared fixtures for the unit and acceptance tests: random split systems with
// dense copies, and an independently assembled IMEX multistep step.

#include "scsplit/schemes.hpp"
#include "scsplit/split_system.hpp"
#include "scsplit/stepper.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <memory>
#include <random>
#include <vector>

namespace testsupport {

using scsplit::SparseMatrix;
using scsplit::SplitAffineSystem;
using scsplit::Triplet;

inline SparseMatrix to_sparse(const Eigen::MatrixXd& m) {
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
        }
    }
    return SparseMatrix(static_cast<std::size_t>(m.rows()), std::move(t));
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// g_j(t) = p_j + sin(t) q_j
struct DenseSystem {
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::VectorXd> p;
    std::vector<Eigen::VectorXd> q;
    std::shared_ptr<SplitAffineSystem> sys;

    [[nodiscard]] Eigen::VectorXd g(std::size_t j, double t) const { return p[j] + std::sin(t) * q[j]; }
    [[nodiscard]] Eigen::VectorXd F(std::size_t j, double t, const Eigen::VectorXd& u) const { return A[j] * u + g(j, t); }
};

inline DenseSystem make_dense_system(std::vector<Eigen::MatrixXd> A, std::vector<Eigen::VectorXd> p,
                                     std::vector<Eigen::VectorXd> q) {
    DenseSystem d{std::move(A), std::move(p), std::move(q), nullptr};
    std::vector<SparseMatrix> ops;
    std::vector<scsplit::SourceFn> src;
    for (std::size_t j = 0; j < d.A.size(); ++j) {
        ops.push_back(to_sparse(d.A[j]));
        src.emplace_back([pj = d.p[j], qj = d.q[j]](double t, std::span<double> out) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = pj(static_cast<Eigen::Index>(i)) + std::sin(t) * qj(static_cast<Eigen::Index>(i));
            }
        });
    }
    d.sys = std::make_shared<SplitAffineSystem>(std::move(ops), std::move(src));
    return d;
}

// A_0 small and general, A_1..A_s symmetric negative definite.
inline DenseSystem random_system(std::mt19937_64& rng, int m, int s) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rnd = [&](int r, int c) {
        Eigen::MatrixXd x(r, c);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) x(i, j) = u(rng);
        }
        return x;
    };
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::VectorXd> p;
    std::vector<Eigen::VectorXd> q;
    A.push_back(0.3 * rnd(m, m));
    for (int j = 1; j <= s; ++j) {
        const Eigen::MatrixXd b = rnd(m, m);
        A.push_back(-(b * b.transpose()) - 0.2 * Eigen::MatrixXd::Identity(m, m));
    }
    for (int j = 0; j <= s; ++j) {
        p.push_back(rnd(m, 1));
        q.push_back(rnd(m, 1));
    }
    return make_dense_system(std::move(A), std::move(p), std::move(q));
}

struct OracleRecord {
    double t;
    Eigen::VectorXd u;
};

// u_n = sum a_i u_{n-i} + dt sum b_hat_i F_0(n-i) + dt [theta F_1(t_n, u_n) + sum b_i F_1(n-i)]
// solved directly for s = 1. history.front() is the newest record.
inline OracleRecord imex_step(const scsplit::ExactScheme& exact, const DenseSystem& d,
                              const std::deque<OracleRecord>& history, double dt) {
    const auto m = d.A[0].rows();
    const double theta = scsplit::to_double(exact.theta);
    const double t_n = history.front().t + dt;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < exact.k; ++i) {
        const auto& rec = history[static_cast<std::size_t>(i)];
        const auto ui = static_cast<std::size_t>(i);
        rhs += scsplit::to_double(exact.a[ui]) * rec.u;
        rhs += dt * scsplit::to_double(exact.b_hat[ui]) * d.F(0, rec.t, rec.u);
        rhs += dt * scsplit::to_double(exact.b[ui]) * d.F(1, rec.t, rec.u);
    }
    rhs += dt * theta * d.g(1, t_n);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m) - dt * theta * d.A[1];
    return {t_n, lhs.partialPivLu().solve(rhs)};
}

}  // namespace testsupport
