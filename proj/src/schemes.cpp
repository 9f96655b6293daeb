#include "scsplit/schemes.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scsplit {

namespace {

template <typename T>
T frac(std::int64_t n, std::int64_t d) {
    if constexpr (std::is_same_v<T, Rational>) {
        return Rational(n, d);
    } else {
        return static_cast<T>(n) / static_cast<T>(d);
    }
}

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw std::invalid_argument("cannot parse number '" + std::string(whole) + "'");
    }
    return v;
}

std::int64_t pow10(int e) {
    if (e < 0 || e > 18) throw std::invalid_argument("exponent out of range for exact rational");
    std::int64_t p = 1;
    for (int i = 0; i < e; ++i) p *= 10;
    return p;
}

template <typename T>
BasicScheme<T> build(SchemeFamily family, T theta) {
    BasicScheme<T> s;
    s.name = std::string(family_name(family));
    s.theta = theta;
    const T one = frac<T>(1, 1);
    switch (family) {
        case SchemeFamily::douglas:
            s.k = 1;
            s.a = {one};
            s.b = {one - theta};
            s.b_hat = {one};
            // No lower-order formula exists for k = 1; SCLMmod degenerates to SCLM.
            s.b_check = s.b_hat;
            break;
        case SchemeFamily::cnlf:
            s.k = 2;
            s.a = {frac<T>(0, 1), one};
            s.b = {frac<T>(0, 1), one};
            s.b_hat = {frac<T>(2, 1), frac<T>(0, 1)};
            s.b_check = {one, one};
            break;
        case SchemeFamily::bdf2:
            s.k = 2;
            s.a = {frac<T>(4, 3), frac<T>(-1, 3)};
            s.b = {frac<T>(4, 3) - frac<T>(2, 1) * theta, frac<T>(-2, 3) + theta};
            s.b_hat = {frac<T>(4, 3), frac<T>(-2, 3)};
            s.b_check = {frac<T>(4, 3) - theta, frac<T>(-2, 3) + theta};
            break;
        case SchemeFamily::adams2:
            s.k = 2;
            s.a = {one, frac<T>(0, 1)};
            s.b = {frac<T>(3, 2) - frac<T>(2, 1) * theta, frac<T>(-1, 2) + theta};
            s.b_hat = {frac<T>(3, 2), frac<T>(-1, 2)};
            s.b_check = {frac<T>(3, 2) - theta, frac<T>(-1, 2) + theta};
            break;
        case SchemeFamily::bdf3:
            s.k = 3;
            s.a = {frac<T>(18, 11), frac<T>(-9, 11), frac<T>(2, 11)};
            s.b = {frac<T>(0, 1), frac<T>(0, 1), frac<T>(0, 1)};
            s.b_hat = {frac<T>(18, 11), frac<T>(-18, 11), frac<T>(6, 11)};
            s.b_check = {frac<T>(12, 11), frac<T>(-6, 11), frac<T>(0, 1)};
            break;
    }
    return s;
}

Rational fixed_theta(SchemeFamily f) {
    return f == SchemeFamily::cnlf ? Rational(1) : Rational(6, 11);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view whole = text;
    if (text.empty()) throw std::invalid_argument("empty number");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const Rational num = parse_rational(text.substr(0, slash));
        const Rational den = parse_rational(text.substr(slash + 1));
        if (den == Rational(0)) throw std::invalid_argument("zero denominator in '" + std::string(whole) + "'");
        return num / den;
    }

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = text.substr(e + 1);
        bool neg_exp = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            neg_exp = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        exponent = static_cast<int>(parse_int(exp_part, whole)) * (neg_exp ? -1 : 1);
        text = text.substr(0, e);
    }
    std::string digits;
    int frac_digits = 0;
    bool seen_point = false;
    for (char c : text) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++frac_digits;
        } else {
            throw std::invalid_argument("cannot parse number '" + std::string(whole) + "'");
        }
    }
    if (digits.empty() || digits.size() > 18) {
        throw std::invalid_argument("cannot parse number '" + std::string(whole) + "'");
    }
    Rational r(parse_int(digits, whole));
    exponent -= frac_digits;
    if (exponent >= 0) {
        r *= pow10(exponent);
    } else {
        r /= pow10(-exponent);
    }
    return negative ? -r : r;
}

Scheme to_double(const ExactScheme& s) {
    auto conv = [](const std::vector<Rational>& v) {
        std::vector<double> out;
        out.reserve(v.size());
        for (const auto& x : v) out.push_back(to_double(x));
        return out;
    };
    Scheme d;
    d.name = s.name;
    d.k = s.k;
    d.a = conv(s.a);
    d.b = conv(s.b);
    d.theta = to_double(s.theta);
    d.b_hat = conv(s.b_hat);
    d.b_check = conv(s.b_check);
    return d;
}

std::vector<Rational> high_order_extrap_coeffs(int k) {
    if (k < 1) throw std::invalid_argument("high_order_extrap_coeffs: k must be >= 1");
    std::vector<Rational> c(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        Rational prod(1);
        for (int j = 1; j <= k; ++j) {
            if (j != i) prod *= Rational(j, j - i);
        }
        c[static_cast<std::size_t>(i - 1)] = prod;
    }
    return c;
}

std::vector<Rational> low_order_extrap_coeffs(int k) {
    if (k < 2) throw std::invalid_argument("low_order_extrap_coeffs: k must be >= 2");
    std::vector<Rational> c = high_order_extrap_coeffs(k - 1);
    c.push_back(Rational(0));
    return c;
}

SchemeFamily parse_family(std::string_view name) {
    if (name == "douglas" || name == "do") return SchemeFamily::douglas;
    if (name == "cnlf") return SchemeFamily::cnlf;
    if (name == "bdf2") return SchemeFamily::bdf2;
    if (name == "adams2") return SchemeFamily::adams2;
    if (name == "bdf3") return SchemeFamily::bdf3;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view family_name(SchemeFamily f) {
    switch (f) {
        case SchemeFamily::douglas: return "douglas";
        case SchemeFamily::cnlf: return "cnlf";
        case SchemeFamily::bdf2: return "bdf2";
        case SchemeFamily::adams2: return "adams2";
        case SchemeFamily::bdf3: return "bdf3";
    }
    return "?";
}

bool has_free_theta(SchemeFamily f) {
    return f == SchemeFamily::douglas || f == SchemeFamily::bdf2 || f == SchemeFamily::adams2;
}

Rational default_theta(SchemeFamily f) {
    switch (f) {
        case SchemeFamily::douglas: return Rational(1, 2);
        case SchemeFamily::bdf2: return Rational(2, 3);
        case SchemeFamily::adams2: return Rational(3, 4);
        default: return fixed_theta(f);
    }
}

ExactScheme named_scheme(SchemeFamily family, std::optional<Rational> theta) {
    if (!has_free_theta(family)) {
        if (theta) {
            throw std::invalid_argument("scheme '" + std::string(family_name(family)) +
                                        "' has a fixed theta; none may be supplied");
        }
        return build<Rational>(family, fixed_theta(family));
    }
    const Rational th = theta.value_or(default_theta(family));
    if (th <= Rational(0)) throw std::invalid_argument("theta must be positive");
    return build<Rational>(family, th);
}

ExactScheme named_scheme(std::string_view name, std::optional<Rational> theta) {
    return named_scheme(parse_family(name), theta);
}

Scheme named_scheme_real(SchemeFamily family, std::optional<double> theta) {
    if (!has_free_theta(family)) {
        if (theta) {
            throw std::invalid_argument("scheme '" + std::string(family_name(family)) +
                                        "' has a fixed theta; none may be supplied");
        }
        return to_double(build<Rational>(family, fixed_theta(family)));
    }
    const double th = theta.value_or(to_double(default_theta(family)));
    if (!(th > 0)) throw std::invalid_argument("theta must be positive");
    return build<double>(family, th);
}

ExactScheme parse_scheme(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) return named_scheme(spec);
    return named_scheme(spec.substr(0, colon), parse_rational(spec.substr(colon + 1)));
}

std::string theta_range_warning(SchemeFamily family, double theta) {
    std::ostringstream os;
    switch (family) {
        case SchemeFamily::douglas:
            if (theta < 0.5 || theta > 1.0) os << "douglas theta " << theta << " outside [1/2, 1]";
            break;
        case SchemeFamily::bdf2:
        case SchemeFamily::adams2:
            if (theta < 0.5) os << family_name(family) << " theta " << theta << " below 1/2 (not A-stable)";
            break;
        default:
            break;
    }
    return os.str();
}

}  // namespace scsplit
