#include "scsplit/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace scsplit {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_real(std::span<const complex> r) {
    return std::all_of(r.begin(), r.end(), [](const complex& c) { return c.imag() == 0.0; });
}

bool root_condition_k1(complex r1, double tol) { return std::abs(r1) <= 1.0 + tol; }

// |r2| <= 1, |r1| <= 1 - r2, excluding the double root at +-1.
bool root_condition_k2_real(double r1, double r2, double tol) {
    if (!(std::abs(r2) <= 1.0 + tol)) return false;
    if (!(std::abs(r1) <= 1.0 - r2 + tol)) return false;
    if (std::abs(r2 + 1.0) <= tol && std::abs(std::abs(r1) - 2.0) <= tol) return false;
    return true;
}

// |r2| <= 1, |r1 + conj(r1) r2| <= 1 - |r2|^2; |r2| = 1 is settled by roots.
bool root_condition_k2_complex(complex r1, complex r2, double tol) {
    const double m2 = std::abs(r2);
    if (m2 > 1.0 + tol) return false;
    if (std::abs(m2 - 1.0) <= tol) {
        const complex r[2] = {r1, r2};
        return root_condition_by_roots(r, tol);
    }
    return std::abs(r1 + std::conj(r1) * r2) <= 1.0 - m2 * m2 + tol;
}

}  // namespace

StabilityModel parse_model(std::string_view name) {
    if (name == "diffusion" || name == "diff") return StabilityModel::diffusion;
    if (name == "advdiff" || name == "advection_diffusion" || name == "advection-diffusion") {
        return StabilityModel::advection_diffusion;
    }
    throw std::invalid_argument("unknown stability model '" + std::string(name) + "'");
}

std::string_view model_name(StabilityModel m) {
    return m == StabilityModel::diffusion ? "diffusion" : "advdiff";
}

std::vector<complex> recursion_coeffs(const Scheme& scheme, const StabilityTriplet& z, Correction correction) {
    const double theta = scheme.theta;
    const complex p = (1.0 - theta * z.z1) * (1.0 - theta * z.z2);
    if (p == 0.0) throw std::domain_error("recursion_coeffs: singular implicit factor (p = 0)");
    const auto& pred = correction == Correction::modified ? scheme.b_check : scheme.b_hat;
    const complex zsum = z.z1 + z.z2;
    std::vector<complex> r(static_cast<std::size_t>(scheme.k));
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = (scheme.a[i] + scheme.b_hat[i] * z.z0 + pred[i] * zsum + (scheme.b[i] - pred[i]) * (1.0 - p) / theta) / p;
    }
    return r;
}

std::vector<complex> characteristic_roots(std::span<const complex> r) {
    const auto k = static_cast<Eigen::Index>(r.size());
    if (k == 0) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) companion(0, i) = r[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool root_condition_by_roots(std::span<const complex> r, double tol) {
    const auto roots = characteristic_roots(r);
    // Numerically computed double roots split by O(sqrt(eps)).
    constexpr double kCluster = 1e-6;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double m = std::abs(roots[i]);
        if (m > 1.0 + tol) return false;
        if (m < 1.0 - kCluster) continue;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (std::abs(roots[i] - roots[j]) <= kCluster) return false;
        }
    }
    return true;
}

bool schur_cohn(std::span<const complex> r, double tol) {
    // c[m] is the coefficient of zeta^m.
    const std::size_t k = r.size();
    std::vector<complex> c(k + 1);
    c[k] = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c[k - i] = -r[i - 1];

    while (c.size() > 1) {
        const std::size_t d = c.size() - 1;
        const double lead = std::abs(c[d]);
        const double delta = lead - std::abs(c[0]);
        if (delta < -tol * lead) return false;
        if (delta <= tol * lead) return root_condition_by_roots(r, tol);
        std::vector<complex> next(d);
        const complex cd = std::conj(c[d]);
        for (std::size_t m = 1; m <= d; ++m) next[m - 1] = cd * c[m] - c[0] * std::conj(c[d - m]);
        const double scale = std::abs(next[d - 1]);
        for (auto& x : next) x /= scale;
        c = std::move(next);
    }
    return true;
}

bool root_condition(std::span<const complex> r) {
    switch (r.size()) {
        case 1:
            return root_condition_k1(r[0], kSchurTolerance);
        case 2:
            if (is_real(r)) return root_condition_k2_real(r[0].real(), r[1].real(), kSchurTolerance);
            return root_condition_k2_complex(r[0], r[1], kSchurTolerance);
        case 3:
            return schur_cohn(r, kSchurTolerance);
        default:
            throw std::invalid_argument("root_condition: supported for k = 1, 2, 3 only");
    }
}

StabilityTriplet eigenvalue_triplet(StabilityModel model, const ModelCoefficients& c, double r, double q, double phi1,
                                    double phi2) {
    const double off = 0.5 * (c.d12 + c.d21);
    const double scale = std::max({std::abs(c.d11), std::abs(c.d22), std::abs(off), 1.0});
    if (c.d11 < 0.0 || c.d22 < 0.0 || c.d11 * c.d22 - off * off < -1e-14 * scale * scale) {
        throw std::invalid_argument("eigenvalue_triplet: diffusion matrix is not positive semi-definite");
    }
    if (phi1 < 0.0 || phi1 > 2.0 * kPi || phi2 < 0.0 || phi2 > 2.0 * kPi) {
        throw std::invalid_argument("eigenvalue_triplet: phase angles must lie in [0, 2pi]");
    }
    StabilityTriplet z;
    z.z1 = -2.0 * r * c.d11 * (1.0 - std::cos(phi1));
    z.z2 = -2.0 * r * c.d22 * (1.0 - std::cos(phi2));
    if (model == StabilityModel::advection_diffusion) {
        z.z1 += complex(0.0, q * c.c1 * std::sin(phi1));
        z.z2 += complex(0.0, q * c.c2 * std::sin(phi2));
    }
    z.z0 = -r * (c.d12 + c.d21) * std::sin(phi1) * std::sin(phi2);
    return z;
}

double theorem_theta_bound(SchemeFamily family, double gamma) {
    switch (family) {
        case SchemeFamily::cnlf:
            return 1.0;
        case SchemeFamily::bdf2:
            return std::max(0.5, (gamma + 1.0) / (2.0 + 2.0 / std::sqrt(3.0)));
        case SchemeFamily::adams2:
            return std::max(0.5, (gamma + 1.0) / 3.0);
        default:
            throw std::invalid_argument("theorem_theta_bound: defined for cnlf, bdf2 and adams2");
    }
}

double lemma_theta_bound(double alpha, double beta0, double beta, double gamma) {
    if (alpha < -1.0) throw std::invalid_argument("lemma_theta_bound: alpha must be >= -1");
    return std::max(beta, (std::abs(beta0) * gamma + beta) / (1.0 + std::sqrt(1.0 + alpha)));
}

bool lemma_inequality(double theta, double alpha, double beta0, double beta, const StabilityTriplet& z) {
    const double z0 = z.z0.real();
    const double z1 = z.z1.real();
    const double z2 = z.z2.real();
    const double p = (1.0 - theta * z1) * (1.0 - theta * z2);
    const double value = p + alpha + beta0 * z0 + beta * (z1 + z2);
    // Equality is attained at the bound; allow cancellation error of the summands.
    const double scale = std::abs(p) + std::abs(alpha) + std::abs(beta0 * z0) + std::abs(beta * (z1 + z2));
    return value >= -1e-12 * scale;
}

bool satisfies_constraints(StabilityModel model, double gamma, const StabilityTriplet& z) {
    const double re1 = z.z1.real();
    const double re2 = z.z2.real();
    if (re1 > 0.0 || re2 > 0.0) return false;
    if (z.z0.imag() != 0.0) return false;
    const double bound = 2.0 * gamma * std::sqrt(re1 * re2);
    if (std::abs(z.z0) > bound * (1.0 + 1e-12)) return false;
    if (model == StabilityModel::diffusion) {
        if (z.z1.imag() != 0.0 || z.z2.imag() != 0.0) return false;
        if (z.z0.real() + re1 + re2 > 0.0) return false;
    }
    return true;
}

TripletSampler::TripletSampler(StabilityModel model, double gamma, std::uint64_t seed)
    : model_(model), gamma_(gamma), rng_(seed) {}

double TripletSampler::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

StabilityTriplet TripletSampler::next() {
    auto draw_z = [this]() {
        const double re = -std::pow(10.0, 1.0 - 5.0 * uniform());
        if (model_ == StabilityModel::diffusion) return complex(re, 0.0);
        const double im = std::pow(10.0, 1.0 - 5.0 * uniform());
        const bool negative = (rng_() >> 63) != 0;
        return complex(re, negative ? -im : im);
    };
    const bool degenerate = (count_++ % 2) == 1;
    StabilityTriplet z;
    z.z1 = draw_z();
    z.z2 = degenerate ? z.z1 : draw_z();
    const double w = uniform();
    z.z0 = (2.0 * w - 1.0) * 2.0 * gamma_ * std::sqrt(z.z1.real() * z.z2.real());
    return z;
}

std::optional<StabilityTriplet> find_violation(const Scheme& scheme, Correction correction, StabilityModel model,
                                               double gamma, std::uint64_t samples, std::uint64_t seed) {
    TripletSampler sampler(model, gamma, seed);
    for (std::uint64_t n = 0; n < samples; ++n) {
        const StabilityTriplet z = sampler.next();
        if (!root_condition(recursion_coeffs(scheme, z, correction))) return z;
    }
    return std::nullopt;
}

std::vector<CurvePoint> estimate_theta_curve(const CurveOptions& options) {
    std::vector<CurvePoint> out(options.gammas.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t g = next++; g < options.gammas.size(); g = next++) {
            CurvePoint pt;
            pt.gamma = options.gammas[g];
            pt.samples = options.samples;
            pt.seed = options.seed;
            for (std::size_t t = 0; t < options.thetas.size(); ++t) {
                const double theta = options.thetas[t];
                const Scheme scheme = has_free_theta(options.family)
                                          ? named_scheme_real(options.family, theta)
                                          : named_scheme_real(options.family);
                // Every cell replays the same draws so that the scan in theta is not biased
                // toward an early lucky cell.
                if (!find_violation(scheme, options.correction, options.model, pt.gamma, options.samples,
                                    options.seed)) {
                    pt.theta_min = scheme.theta;
                    break;
                }
                // A fixed-theta family has a single cell.
                if (!has_free_theta(options.family)) break;
            }
            out[g] = pt;
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, options.gammas.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return out;
}

std::vector<double> arithmetic_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("arithmetic_grid: need lo <= hi and step > 0");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-3));
    for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

}  // namespace scsplit
