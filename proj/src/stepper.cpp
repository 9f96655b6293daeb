#include "scsplit/stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scsplit {

namespace {

std::shared_ptr<const ImplicitFactors> factors_for(const SplitAffineSystem& sys, double theta_dt,
                                                   std::shared_ptr<const ImplicitFactors> cached) {
    if (cached && cached->theta_dt() == theta_dt) return cached;
    return std::make_shared<const ImplicitFactors>(sys, theta_dt);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

HistoryRecord make_record(const SplitAffineSystem& sys, double t, std::vector<double> u) {
    HistoryRecord rec;
    rec.t = t;
    rec.f.resize(static_cast<std::size_t>(sys.parts() + 1));
    for (int j = 0; j <= sys.parts(); ++j) rec.f[static_cast<std::size_t>(j)] = sys.eval(j, t, u);
    rec.u = std::move(u);
    return rec;
}

std::vector<double> step_multistep(const Scheme& scheme, const SplitAffineSystem& sys, StepperState& state,
                                   Correction correction) {
    const auto k = static_cast<std::size_t>(scheme.k);
    if (state.history.size() != k) {
        throw std::logic_error("step_multistep: history holds " + std::to_string(state.history.size()) +
                               " records, scheme needs " + std::to_string(k));
    }
    const double dt = state.dt;
    const double theta = scheme.theta;
    state.factors = factors_for(sys, theta * dt, state.factors);

    const int s = sys.parts();
    const std::size_t m = sys.dim();
    const double t_n = state.history.front().t + dt;
    const auto& pred = correction == Correction::modified ? scheme.b_check : scheme.b_hat;

    // Prediction.
    std::vector<double> v(m, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const HistoryRecord& rec = state.history[i];
        axpy(scheme.a[i], rec.u, v);
        axpy(dt * scheme.b_hat[i], rec.f[0], v);
        for (int j = 1; j <= s; ++j) axpy(dt * pred[i], rec.f[static_cast<std::size_t>(j)], v);
    }

    // Corrections, one per implicit operator.
    for (int j = 1; j <= s; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            axpy(dt * (scheme.b[i] - pred[i]), state.history[i].f[static_cast<std::size_t>(j)], v);
        }
        sys.add_source(j, t_n, theta * dt, v);
        state.factors->solve_in_place(j, v);
    }

    state.history.push_front(make_record(sys, t_n, v));
    if (state.history.size() > k) state.history.pop_back();
    ++state.n;
    return v;
}

std::vector<double> step_onestep(const OneStepMethod& method, const SplitAffineSystem& sys, double t_prev,
                                 std::span<const double> u_prev, double dt, const ImplicitFactors* factors) {
    const double theta = method.theta;
    if (!(theta >= 0.25)) throw std::invalid_argument("one-step method: theta must be >= 1/4");
    if (u_prev.size() != sys.dim()) throw std::invalid_argument("step_onestep: state has wrong dimension");
    std::shared_ptr<const ImplicitFactors> owned;
    if (!factors || factors->theta_dt() != theta * dt) {
        owned = std::make_shared<const ImplicitFactors>(sys, theta * dt);
        factors = owned.get();
    }
    const int s = sys.parts();
    const std::size_t m = sys.dim();
    const double t_n = t_prev + dt;

    std::vector<std::vector<double>> f_prev(static_cast<std::size_t>(s + 1));
    for (int j = 0; j <= s; ++j) f_prev[static_cast<std::size_t>(j)] = sys.eval(j, t_prev, u_prev);

    // Douglas sweep: v_0 = u + dt F(t_prev, u), then s corrections.
    auto corrections = [&](std::vector<double> v) {
        for (int j = 1; j <= s; ++j) {
            axpy(-theta * dt, f_prev[static_cast<std::size_t>(j)], v);
            sys.add_source(j, t_n, theta * dt, v);
            factors->solve_in_place(j, v);
        }
        return v;
    };

    std::vector<double> v0(u_prev.begin(), u_prev.end());
    for (int j = 0; j <= s; ++j) axpy(dt, f_prev[static_cast<std::size_t>(j)], v0);
    std::vector<double> v_star = corrections(v0);
    if (method.kind == OneStepKind::douglas) return v_star;

    // Second predictor and correction sweep (CS / MCS).
    std::vector<double> f(m);
    sys.eval(0, t_n, v_star, f);
    axpy(0.5 * dt, f, v0);
    axpy(-0.5 * dt, f_prev[0], v0);
    const double w = (0.5 - theta) * dt;
    if (w != 0.0) {
        for (int j = 1; j <= s; ++j) {
            sys.eval(j, t_n, v_star, f);
            axpy(w, f, v0);
            axpy(-w, f_prev[static_cast<std::size_t>(j)], v0);
        }
    }
    return corrections(std::move(v0));
}

StepperState startup(const Scheme& scheme, const SplitAffineSystem& sys, std::span<const double> u0, double dt,
                     double t0) {
    if (scheme.k < 1 || scheme.k > 3) throw std::invalid_argument("startup: supported step counts are 1..3");
    StepperState state;
    state.dt = dt;
    state.history.push_front(make_record(sys, t0, std::vector<double>(u0.begin(), u0.end())));
    if (scheme.k == 1) return state;

    const OneStepMethod starter = scheme.k == 2 ? OneStepMethod::douglas(1.0) : OneStepMethod::mcs(1.0 / 3.0);
    const ImplicitFactors factors(sys, starter.theta * dt);
    for (int i = 1; i < scheme.k; ++i) {
        const HistoryRecord& last = state.history.front();
        auto u = step_onestep(starter, sys, last.t, last.u, dt, &factors);
        state.history.push_front(make_record(sys, t0 + i * dt, std::move(u)));
        ++state.n;
    }
    return state;
}

IdentityResidual identity_check(double b0, std::span<const Eigen::MatrixXd> z) {
    if (z.empty()) return {};
    const Eigen::Index n = z.front().rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd prefix = id;  // Q_1 .. Q_{j-1}
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n);
    for (const auto& zj : z) {
        if (zj.rows() != n || zj.cols() != n) throw std::invalid_argument("identity_check: matrices must be n x n");
        lhs += b0 * prefix * zj;
        prefix = prefix * (id - b0 * zj);
    }
    const Eigen::MatrixXd rhs = id - prefix;
    auto norm = [](const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
    return {norm(lhs - rhs), norm(rhs)};
}

NonFiniteState::NonFiniteState(std::int64_t step)
    : std::runtime_error("non-finite state at step " + std::to_string(step)), step_(step) {}

TimeIntegrator::TimeIntegrator(Scheme scheme, Correction correction)
    : multistep_(true), scheme_(std::move(scheme)), correction_(correction) {}

TimeIntegrator::TimeIntegrator(OneStepMethod method) : multistep_(false), method_(method) {}

std::vector<double> TimeIntegrator::integrate(const SplitAffineSystem& sys, std::span<const double> u0, double t0,
                                              double dt, std::int64_t nsteps) const {
    auto check = [](std::span<const double> u, std::int64_t n) {
        if (!all_finite(u)) throw NonFiniteState(n);
    };
    if (!multistep_) {
        const ImplicitFactors factors(sys, method_.theta * dt);
        std::vector<double> u(u0.begin(), u0.end());
        for (std::int64_t n = 1; n <= nsteps; ++n) {
            u = step_onestep(method_, sys, t0 + static_cast<double>(n - 1) * dt, u, dt, &factors);
            check(u, n);
        }
        return u;
    }
    if (nsteps < scheme_.k - 1) throw std::invalid_argument("integrate: fewer steps than the startup needs");
    StepperState state = startup(scheme_, sys, u0, dt, t0);
    check(state.current(), state.n);
    while (state.n < nsteps) {
        step_multistep(scheme_, sys, state, correction_);
        check(state.current(), state.n);
    }
    return state.current();
}

}  // namespace scsplit
