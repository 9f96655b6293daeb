#pragma once

// Linear multistep coefficient sets for stabilizing correction splitting.
//
// A scheme is an implicit k-step method
//     u_n = sum_i a_i u_{n-i} + dt * sum_{i=0..k} b_i F(t_{n-i}, u_{n-i}),   b_0 = theta,
// paired with two explicit predictors obtained by replacing F(t_n, u_n) with
// Lagrange extrapolation of the past k evaluations:
//     b_hat_i   = b_i + theta * c_hat_i     (order k extrapolation)
//     b_check_i = b_i + theta * c_check_i   (order k-1 extrapolation, c_check_k = 0)

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scsplit {

using Rational = boost::rational<std::int64_t>;

[[nodiscard]] inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

/// Parses "0.667", "-2", "3/4" or "1e-2" style strings into an exact rational.
/// Decimal notation is exact: "0.667" becomes 667/1000.
[[nodiscard]] Rational parse_rational(std::string_view text);

/// The implicit/explicit/low-order coefficient triple of one scheme.
template <typename T>
struct BasicScheme {
    std::string name;
    int k = 0;
    std::vector<T> a;
    std::vector<T> b;  // b_1..b_k
    T theta{};         // b_0
    std::vector<T> b_hat;
    std::vector<T> b_check;

    /// beta = theta + sum b_i
    [[nodiscard]] T beta() const {
        T s = theta;
        for (const auto& v : b) s += v;
        return s;
    }
};

using ExactScheme = BasicScheme<Rational>;
using Scheme = BasicScheme<double>;

[[nodiscard]] Scheme to_double(const ExactScheme& s);

/// c_hat_i = prod_{j != i} j / (j - i), i, j = 1..k.
[[nodiscard]] std::vector<Rational> high_order_extrap_coeffs(int k);

/// Lagrange weights through t_{n-1}..t_{n-k+1}, with c_check_k = 0. Requires k >= 2.
[[nodiscard]] std::vector<Rational> low_order_extrap_coeffs(int k);

enum class SchemeFamily { douglas, cnlf, bdf2, adams2, bdf3 };

[[nodiscard]] SchemeFamily parse_family(std::string_view name);
[[nodiscard]] std::string_view family_name(SchemeFamily f);

/// True for families whose theta is a free parameter.
[[nodiscard]] bool has_free_theta(SchemeFamily f);

/// Default theta used when a free-theta family is requested without one.
[[nodiscard]] Rational default_theta(SchemeFamily f);

/// Builds the named coefficient set. theta must be omitted for cnlf and bdf3.
[[nodiscard]] ExactScheme named_scheme(SchemeFamily family, std::optional<Rational> theta = std::nullopt);
[[nodiscard]] ExactScheme named_scheme(std::string_view name, std::optional<Rational> theta = std::nullopt);

/// Floating-point variant for irrational theta (stability bounds and sweeps).
[[nodiscard]] Scheme named_scheme_real(SchemeFamily family, std::optional<double> theta = std::nullopt);

/// Parses "bdf2:0.667", "cnlf", "adams2:3/4".
[[nodiscard]] ExactScheme parse_scheme(std::string_view spec);

/// Soft check of the theta ranges explored in practice; returns a message when
/// theta lies outside them, empty otherwise. Never throws.
[[nodiscard]] std::string theta_range_warning(SchemeFamily family, double theta);

}  // namespace scsplit
