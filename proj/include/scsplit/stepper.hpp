#pragma once

// Multistep and one-step stabilizing correction time steps for split affine
// systems. Every step is an explicit prediction v_0 followed by s implicit
// corrections v_1..v_s, one per operator A_j, each solving with I - theta*dt*A_j.

#include "scsplit/schemes.hpp"
#include "scsplit/split_system.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace scsplit {

/// Which extrapolation the predictor applies to the implicit terms F_1..F_s:
/// standard uses b_hat for all terms, modified uses b_check for F_1..F_s.
enum class Correction { standard, modified };

/// One past step point with its per-operator evaluations F_j(t, u), j = 0..s.
struct HistoryRecord {
    double t = 0.0;
    std::vector<double> u;
    std::vector<std::vector<double>> f;
};

struct StepperState {
    double dt = 0.0;
    std::int64_t n = 0;  // index of the most recent record
    /// Most recent record first; holds exactly k records once started.
    std::deque<HistoryRecord> history;
    std::shared_ptr<const ImplicitFactors> factors;

    [[nodiscard]] double time() const { return history.front().t; }
    [[nodiscard]] const std::vector<double>& current() const { return history.front().u; }
};

[[nodiscard]] HistoryRecord make_record(const SplitAffineSystem& sys, double t, std::vector<double> u);

/// Generic multistep stabilizing correction step; appends the new record to
/// state.history (dropping the oldest beyond k) and returns u_n.
std::vector<double> step_multistep(const Scheme& scheme, const SplitAffineSystem& sys, StepperState& state,
                                   Correction correction);

inline std::vector<double> step_sclm(const Scheme& scheme, const SplitAffineSystem& sys, StepperState& state) {
    return step_multistep(scheme, sys, state, Correction::standard);
}

inline std::vector<double> step_sclmmod(const Scheme& scheme, const SplitAffineSystem& sys, StepperState& state) {
    return step_multistep(scheme, sys, state, Correction::modified);
}

enum class OneStepKind { douglas, craig_sneyd, mcs };

struct OneStepMethod {
    OneStepKind kind = OneStepKind::douglas;
    double theta = 0.5;

    [[nodiscard]] static OneStepMethod douglas(double theta) { return {OneStepKind::douglas, theta}; }
    [[nodiscard]] static OneStepMethod craig_sneyd() { return {OneStepKind::craig_sneyd, 0.5}; }
    [[nodiscard]] static OneStepMethod mcs(double theta) { return {OneStepKind::mcs, theta}; }
};

/// One step of the Douglas or (modified) Craig-Sneyd scheme from (t_prev,
/// u_prev). Factors for theta*dt are built on the fly unless supplied.
[[nodiscard]] std::vector<double> step_onestep(const OneStepMethod& method, const SplitAffineSystem& sys,
                                               double t_prev, std::span<const double> u_prev, double dt,
                                               const ImplicitFactors* factors = nullptr);

/// Builds the k-record history: k = 1 stores u0 only, k = 2 adds u1 from
/// Douglas(theta = 1), k = 3 adds u1, u2 from MCS(theta = 1/3).
[[nodiscard]] StepperState startup(const Scheme& scheme, const SplitAffineSystem& sys, std::span<const double> u0,
                                   double dt, double t0 = 0.0);

/// Residual of b0 * sum_j Q_1..Q_{j-1} Z_j = I - P with Q_j = I - b0 Z_j and
/// P = Q_1..Q_s, in the max-row-sum norm.
struct IdentityResidual {
    double residual = 0.0;
    double reference = 0.0;  // ||I - P||

    [[nodiscard]] double relative() const { return reference > 0.0 ? residual / reference : residual; }
};

[[nodiscard]] IdentityResidual identity_check(double b0, std::span<const Eigen::MatrixXd> z);

/// Raised when an integration produces a non-finite state.
class NonFiniteState : public std::runtime_error {
public:
    explicit NonFiniteState(std::int64_t step);
    [[nodiscard]] std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Drives a multistep scheme or a one-step method over a fixed number of steps.
class TimeIntegrator {
public:
    TimeIntegrator(Scheme scheme, Correction correction);
    explicit TimeIntegrator(OneStepMethod method);

    /// Integrates from t0 with nsteps of size dt. Throws NonFiniteState if the
    /// state stops being finite.
    [[nodiscard]] std::vector<double> integrate(const SplitAffineSystem& sys, std::span<const double> u0, double t0,
                                                double dt, std::int64_t nsteps) const;

private:
    bool multistep_;
    Scheme scheme_;
    Correction correction_ = Correction::modified;
    OneStepMethod method_;
};

}  // namespace scsplit
