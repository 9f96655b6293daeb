#pragma once

// Scalar von Neumann analysis of the two-operator (s = 2) stabilizing
// correction recursion eps_n = sum_i r_i eps_{n-i}.

#include "scsplit/schemes.hpp"
#include "scsplit/stepper.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace scsplit {

using complex = std::complex<double>;

/// Scaled eigenvalues of the explicit (z0) and implicit (z1, z2) operators.
struct StabilityTriplet {
    complex z0;
    complex z1;
    complex z2;
};

enum class StabilityModel { diffusion, advection_diffusion };

[[nodiscard]] StabilityModel parse_model(std::string_view name);
[[nodiscard]] std::string_view model_name(StabilityModel m);

/// Tolerance applied to boundary cases of the Schur tests.
inline constexpr double kSchurTolerance = 1e-10;

/// r_i = (a_i + b_hat_i z0 + p_i (z1 + z2) + (b_i - p_i)(1 - p)/theta) / p with
/// p = (1 - theta z1)(1 - theta z2) and p_i = b_check_i (modified) or b_hat_i.
/// Throws std::domain_error when p = 0.
[[nodiscard]] std::vector<complex> recursion_coeffs(const Scheme& scheme, const StabilityTriplet& z,
                                                   Correction correction = Correction::modified);

/// Root condition for zeta^k - sum_i r_i zeta^{k-i}, k in {1, 2, 3}: every
/// root has modulus <= 1 and those of modulus one are simple.
[[nodiscard]] bool root_condition(std::span<const complex> r);

/// Roots of zeta^k - sum_i r_i zeta^{k-i} via the companion matrix.
[[nodiscard]] std::vector<complex> characteristic_roots(std::span<const complex> r);

/// Root condition decided from explicitly computed roots. Used to settle
/// boundary hits of the Schur reductions.
[[nodiscard]] bool root_condition_by_roots(std::span<const complex> r, double tol = kSchurTolerance);

/// Schur-Cohn-Miller reduction for arbitrary degree (no k restriction).
[[nodiscard]] bool schur_cohn(std::span<const complex> r, double tol = kSchurTolerance);

struct ModelCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double d11 = 1.0;
    double d12 = 0.0;
    double d21 = 0.0;
    double d22 = 1.0;
};

/// Fourier symbols of the central-difference model problem on a periodic grid;
/// r = dt/h^2, q = dt/h. Advection terms are ignored for the diffusion model.
[[nodiscard]] StabilityTriplet eigenvalue_triplet(StabilityModel model, const ModelCoefficients& c, double r,
                                                  double q, double phi1, double phi2);

/// Analytical unconditional-stability bound on theta for the diffusion model.
[[nodiscard]] double theorem_theta_bound(SchemeFamily family, double gamma);

/// max{beta, (|beta0| gamma + beta) / (1 + sqrt(1 + alpha))}
[[nodiscard]] double lemma_theta_bound(double alpha, double beta0, double beta, double gamma);

/// p + alpha + beta0 z0 + beta (z1 + z2) >= 0 for a real triplet.
[[nodiscard]] bool lemma_inequality(double theta, double alpha, double beta0, double beta, const StabilityTriplet& z);

/// True when the triplet satisfies the model's constraint set for gamma.
[[nodiscard]] bool satisfies_constraints(StabilityModel model, double gamma, const StabilityTriplet& z);

/// Random triplets: z_j = -10^(1-5w) (+- i 10^(1-5w') for advection-diffusion),
/// z0 = (2w - 1) * 2 gamma sqrt(Re z1 Re z2). Draws alternate between
/// independent (z0, z1, z2) and degenerate (z0, z1, z1) triplets.
class TripletSampler {
public:
    TripletSampler(StabilityModel model, double gamma, std::uint64_t seed);

    [[nodiscard]] StabilityTriplet next();

private:
    [[nodiscard]] double uniform();

    StabilityModel model_;
    double gamma_;
    std::mt19937_64 rng_;
    std::uint64_t count_ = 0;
};

/// Searches up to `samples` draws for a triplet violating the root condition.
[[nodiscard]] std::optional<StabilityTriplet> find_violation(const Scheme& scheme, Correction correction,
                                                             StabilityModel model, double gamma,
                                                             std::uint64_t samples, std::uint64_t seed);

struct CurveOptions {
    SchemeFamily family = SchemeFamily::bdf2;
    Correction correction = Correction::modified;
    StabilityModel model = StabilityModel::advection_diffusion;
    std::vector<double> gammas;
    std::vector<double> thetas;  // scanned in increasing order
    std::uint64_t samples = 2'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CurvePoint {
    double gamma = 0.0;
    std::optional<double> theta_min;  // empty = none in range
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// For each gamma, the least theta on the grid whose sampled triplets all
/// satisfy the root condition. All (gamma, theta) cells draw from the same
/// seeded stream (the same uniforms, with z0 scaled by gamma), so the result
/// is deterministic for a given seed regardless of thread count.
[[nodiscard]] std::vector<CurvePoint> estimate_theta_curve(const CurveOptions& options);

/// Inclusive arithmetic grid lo, lo + step, ..., hi (within step/1000).
[[nodiscard]] std::vector<double> arithmetic_grid(double lo, double hi, double step);

}  // namespace scsplit
