#include "scsplit/heston.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace scsplit {

void HestonCase::validate() const {
    if (!(kappa > 0 && eta > 0 && sigma > 0 && T > 0 && K > 0)) {
        throw std::invalid_argument("Heston case '" + name + "': kappa, eta, sigma, T and K must be positive");
    }
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("Heston case '" + name + "': |rho| must be <= 1");
}

const std::vector<HestonCase>& builtin_heston_cases() {
    static const std::vector<HestonCase> cases = {
        {"A", 3.0, 0.12, 0.04, 0.6, 0.01, 0.04, 1.0, 100.0},
        {"B", 0.6067, 0.0707, 0.2928, -0.7571, 0.03, 0.0, 3.0, 100.0},
        {"C", 2.5, 0.06, 0.5, -0.1, 0.0507, 0.0469, 0.25, 100.0},
        {"D", 0.5, 0.04, 1.0, -0.9, 0.0, 0.0, 10.0, 100.0},
        {"E", 0.3, 0.04, 0.9, -0.5, 0.0, 0.0, 15.0, 100.0},
        {"F", 1.0, 0.09, 1.0, -0.3, 0.0, 0.0, 5.0, 100.0},
    };
    return cases;
}

HestonCase heston_case(std::string_view name) {
    for (const auto& c : builtin_heston_cases()) {
        if (c.name == name) return c;
    }
    throw std::invalid_argument("unknown Heston case '" + std::string(name) + "'");
}

std::vector<HestonCase> load_heston_cases(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open case file " + path.string());
    const nlohmann::json doc = nlohmann::json::parse(in);
    std::vector<HestonCase> out;
    for (const auto& c : doc.at("cases")) {
        HestonCase hc;
        hc.name = c.at("name").get<std::string>();
        hc.kappa = c.at("kappa").get<double>();
        hc.eta = c.at("eta").get<double>();
        hc.sigma = c.at("sigma").get<double>();
        hc.rho = c.at("rho").get<double>();
        hc.r_d = c.at("r_d").get<double>();
        hc.r_f = c.at("r_f").get<double>();
        hc.T = c.at("T").get<double>();
        hc.K = c.at("K").get<double>();
        hc.validate();
        out.push_back(std::move(hc));
    }
    return out;
}

HestonGrid build_grid(const HestonCase& hc, const GridParams& params) {
    hc.validate();
    if (params.m1 < 10 || params.m2 < 10) throw std::invalid_argument("build_grid: m1 and m2 must be >= 10");
    HestonGrid g;
    g.s_max = params.s_max > 0.0 ? params.s_max : 8.0 * hc.K;
    g.v_max = params.v_max;
    if (!(g.s_max > hc.K)) throw std::invalid_argument("build_grid: S_max must exceed the strike");
    if (!(g.v_max > 0.0)) throw std::invalid_argument("build_grid: V_max must be positive");
    g.s_stretch = params.s_stretch > 0.0 ? params.s_stretch : hc.K / 5.0;
    g.v_stretch = params.v_stretch > 0.0 ? params.v_stretch : g.v_max / 500.0;

    const double c = g.s_stretch;
    const double xi_lo = std::asinh(-hc.K / c);
    const double xi_hi = std::asinh((g.s_max - hc.K) / c);
    g.s.resize(params.m1 + 1);
    for (std::size_t i = 0; i <= params.m1; ++i) {
        const double xi = xi_lo + (xi_hi - xi_lo) * static_cast<double>(i) / static_cast<double>(params.m1);
        g.s[i] = hc.K + c * std::sinh(xi);
    }
    g.s.front() = 0.0;
    g.s.back() = g.s_max;

    const double d = g.v_stretch;
    const double zeta_hi = std::asinh(g.v_max / d);
    g.v.resize(params.m2 + 1);
    for (std::size_t j = 0; j <= params.m2; ++j) {
        const double zeta = zeta_hi * static_cast<double>(j) / static_cast<double>(params.m2);
        g.v[j] = d * std::sinh(zeta);
    }
    g.v.front() = 0.0;
    g.v.back() = g.v_max;
    return g;
}

HestonGrid build_grid(const HestonCase& hc, std::size_t m1, std::size_t m2, double s_max, double v_max) {
    GridParams p;
    p.m1 = m1;
    p.m2 = m2;
    p.s_max = s_max;
    p.v_max = v_max;
    return build_grid(hc, p);
}

CentralWeights fd_weights_central(double x_left, double x_mid, double x_right) {
    const double hl = x_mid - x_left;
    const double hr = x_right - x_mid;
    CentralWeights w;
    w.first = {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
    w.second = {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
    return w;
}

StencilWeights fd_weights_forward(double x0, double x1, double x2) {
    const double h1 = x1 - x0;
    const double h2 = x2 - x1;
    return {-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
}

NeumannWeights fd_weights_neumann_second(double x0, double x1, double x2) {
    // Offsets from the boundary node; both negative.
    const double d0 = x0 - x2;
    const double d1 = x1 - x2;
    NeumannWeights w;
    w.values.mid = 2.0 * d0 / (d1 * d1 * (d0 - d1));
    w.values.left = -2.0 * d1 / (d0 * d0 * (d0 - d1));
    w.values.right = -(w.values.left + w.values.mid);
    w.slope = -(w.values.left * d0 + w.values.mid * d1);
    return w;
}

HestonSystem assemble(const HestonCase& hc, const HestonGrid& grid, double reaction_share_s) {
    hc.validate();
    if (grid.s.size() < 4 || grid.v.size() < 4) throw std::invalid_argument("assemble: grid too small");
    const std::size_t m1 = grid.m1();
    const std::size_t m2 = grid.m2();
    const std::size_t n = grid.size();
    const auto& s = grid.s;
    const auto& v = grid.v;
    const double react1 = -reaction_share_s * hc.r_d;
    const double react2 = -(1.0 - reaction_share_s) * hc.r_d;

    std::vector<Triplet> t0;
    std::vector<Triplet> t1;
    std::vector<Triplet> t2;
    std::vector<double> g1_coeff(n, 0.0);  // g_1(t) = g1_coeff * exp(-r_f t)
    std::vector<double> g2_coeff(n, 0.0);  // g_2(t) = g2_coeff * exp(-r_f t)

    for (std::size_t j = 0; j <= m2; ++j) {
        for (std::size_t i = 0; i <= m1; ++i) {
            const std::size_t row = grid.index(i, j);
            if (i == 0) continue;  // u = 0
            if (j == m2) {
                // u = s exp(-r_f t) is carried by its time derivative.
                g2_coeff[row] = -hc.r_f * s[i];
                continue;
            }

            // s-direction
            const double diff_s = 0.5 * s[i] * s[i] * v[j];
            const double conv_s = (hc.r_d - hc.r_f) * s[i];
            if (i < m1) {
                const auto w = fd_weights_central(s[i - 1], s[i], s[i + 1]);
                t1.push_back({row, row - 1, diff_s * w.second.left + conv_s * w.first.left});
                t1.push_back({row, row, diff_s * w.second.mid + conv_s * w.first.mid + react1});
                t1.push_back({row, row + 1, diff_s * w.second.right + conv_s * w.first.right});
            } else {
                const auto w = fd_weights_neumann_second(s[m1 - 2], s[m1 - 1], s[m1]);
                t1.push_back({row, row - 2, diff_s * w.values.left});
                t1.push_back({row, row - 1, diff_s * w.values.mid});
                t1.push_back({row, row, diff_s * w.values.right + react1});
                g1_coeff[row] = diff_s * w.slope + conv_s;
            }

            // v-direction
            const std::size_t stride = grid.s.size();
            const double conv_v = hc.kappa * (hc.eta - v[j]);
            if (j == 0) {
                const auto w = fd_weights_forward(v[0], v[1], v[2]);
                t2.push_back({row, row, conv_v * w.left + react2});
                t2.push_back({row, row + stride, conv_v * w.mid});
                t2.push_back({row, row + 2 * stride, conv_v * w.right});
            } else {
                const double diff_v = 0.5 * hc.sigma * hc.sigma * v[j];
                const auto w = fd_weights_central(v[j - 1], v[j], v[j + 1]);
                t2.push_back({row, row - stride, diff_v * w.second.left + conv_v * w.first.left});
                t2.push_back({row, row, diff_v * w.second.mid + conv_v * w.first.mid + react2});
                t2.push_back({row, row + stride, diff_v * w.second.right + conv_v * w.first.right});
            }

            // Mixed derivative: zero at v = 0 (coefficient) and at s = S_max (u_s is constant in v).
            if (j > 0 && i < m1) {
                const double mixed = hc.rho * hc.sigma * s[i] * v[j];
                if (mixed != 0.0) {
                    const auto ws = fd_weights_central(s[i - 1], s[i], s[i + 1]).first;
                    const auto wv = fd_weights_central(v[j - 1], v[j], v[j + 1]).first;
                    const double as[3] = {ws.left, ws.mid, ws.right};
                    const double av[3] = {wv.left, wv.mid, wv.right};
                    for (int dj = -1; dj <= 1; ++dj) {
                        for (int di = -1; di <= 1; ++di) {
                            const double w = mixed * as[di + 1] * av[dj + 1];
                            if (w == 0.0) continue;
                            t0.push_back({row, grid.index(i + di, j + dj), w});
                        }
                    }
                }
            }
        }
    }

    const double r_f = hc.r_f;
    auto exp_source = [r_f](std::vector<double> coeff) -> SourceFn {
        if (std::all_of(coeff.begin(), coeff.end(), [](double c) { return c == 0.0; })) return {};
        return [r_f, coeff = std::move(coeff)](double t, std::span<double> out) {
            const double e = std::exp(-r_f * t);
            for (std::size_t k = 0; k < coeff.size(); ++k) out[k] = coeff[k] * e;
        };
    };

    LineSet s_lines;
    LineSet v_lines;
    for (std::size_t j = 0; j <= m2; ++j) {
        auto& line = s_lines.lines.emplace_back();
        for (std::size_t i = 0; i <= m1; ++i) line.push_back(grid.index(i, j));
    }
    for (std::size_t i = 0; i <= m1; ++i) {
        auto& line = v_lines.lines.emplace_back();
        for (std::size_t j = 0; j <= m2; ++j) line.push_back(grid.index(i, j));
    }

    std::vector<SparseMatrix> ops;
    ops.emplace_back(n, std::move(t0));
    ops.emplace_back(n, std::move(t1));
    ops.emplace_back(n, std::move(t2));
    std::vector<SourceFn> sources = {SourceFn{}, exp_source(std::move(g1_coeff)), exp_source(std::move(g2_coeff))};

    return HestonSystem{SplitAffineSystem(std::move(ops), std::move(sources), {std::move(s_lines), std::move(v_lines)}),
                        grid, hc, roi_indices(grid, hc.K)};
}

std::vector<double> initial_vector(const HestonCase& hc, const HestonGrid& grid) {
    const auto& s = grid.s;
    const std::size_t m1 = grid.m1();
    std::vector<double> row(s.size());
    for (std::size_t i = 0; i <= m1; ++i) {
        const double lo = i == 0 ? s[0] : 0.5 * (s[i - 1] + s[i]);
        const double hi = i == m1 ? s[m1] : 0.5 * (s[i] + s[i + 1]);
        if (lo < hc.K && hc.K < hi) {
            row[i] = (hi - hc.K) * (hi - hc.K) / (2.0 * (hi - lo));
        } else {
            row[i] = std::max(0.0, s[i] - hc.K);
        }
    }
    std::vector<double> u(grid.size());
    for (std::size_t j = 0; j <= grid.m2(); ++j) {
        for (std::size_t i = 0; i <= m1; ++i) u[grid.index(i, j)] = j == grid.m2() ? s[i] : row[i];
    }
    return u;
}

std::vector<std::size_t> roi_indices(const HestonGrid& grid, double K) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j <= grid.m2(); ++j) {
        if (!(grid.v[j] > 0.0 && grid.v[j] < 1.0)) continue;
        for (std::size_t i = 0; i <= grid.m1(); ++i) {
            if (grid.s[i] > 0.5 * K && grid.s[i] < 1.5 * K) out.push_back(grid.index(i, j));
        }
    }
    return out;
}

double roi_error(std::span<const double> u_num, std::span<const double> u_ref, const HestonGrid& grid, double K) {
    if (u_num.size() != grid.size() || u_ref.size() != grid.size()) {
        throw std::invalid_argument("roi_error: vector sizes do not match the grid");
    }
    const auto roi = roi_indices(grid, K);
    if (roi.empty()) throw std::invalid_argument("roi_error: region of interest contains no nodes");
    double err = 0.0;
    for (std::size_t k : roi) {
        const double d = std::abs(u_num[k] - u_ref[k]);
        if (std::isnan(d)) return d;
        err = std::max(err, d);
    }
    return err;
}

}  // namespace scsplit
