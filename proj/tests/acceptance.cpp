// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "scsplit/experiments.hpp"
#include "scsplit/heston.hpp"
#include "scsplit/manufactured.hpp"
#include "scsplit/schemes.hpp"
#include "scsplit/stability.hpp"
#include "scsplit/stepper.hpp"

#include "heston_oracle.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace scsplit;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double rel_err(const std::vector<double>& x, const Eigen::VectorXd& y) {
    return (testsupport::to_eigen(x) - y).lpNorm<Eigen::Infinity>() / y.lpNorm<Eigen::Infinity>();
}

StepperState seeded_state(const Scheme& scheme, const SplitAffineSystem& sys, const std::vector<Eigen::VectorXd>& us,
                          double dt) {
    StepperState st;
    st.dt = dt;
    for (int i = 0; i < scheme.k; ++i) {
        st.history.push_back(make_record(sys, -static_cast<double>(i) * dt, testsupport::to_std(us[static_cast<std::size_t>(i)])));
    }
    st.n = scheme.k - 1;
    return st;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = u(rng);
    return v;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<SchemeFamily> kMultistep = {SchemeFamily::douglas, SchemeFamily::cnlf, SchemeFamily::bdf2,
                                              SchemeFamily::adams2, SchemeFamily::bdf3};

// 1. Exact coefficients.
Outcome coefficients() {
    using V = std::vector<Rational>;
    const auto R = [](std::int64_t n, std::int64_t d = 1) { return Rational(n, d); };
    Outcome o;
    auto check = [&](const std::string& label, bool ok) {
        if (!ok) {
            o.pass = false;
            o.detail += label + " ";
        }
    };
    const auto cnlf = named_scheme(SchemeFamily::cnlf);
    check("cnlf", cnlf.a == V{0, 1} && cnlf.b == V{0, 1} && cnlf.theta == R(1) && cnlf.b_hat == V{2, 0} &&
                      cnlf.b_check == V{1, 1});
    const auto bdf3 = named_scheme(SchemeFamily::bdf3);
    check("bdf3", bdf3.a == V{R(18, 11), R(-9, 11), R(2, 11)} && bdf3.b == V{0, 0, 0} && bdf3.theta == R(6, 11) &&
                      bdf3.b_hat == V{R(18, 11), R(-18, 11), R(6, 11)} && bdf3.b_check == V{R(12, 11), R(-6, 11), 0});
    for (const auto& th : {R(1, 2), R(2, 3), R(3, 4), R(1), R(7, 5)}) {
        const auto d = named_scheme(SchemeFamily::douglas, th);
        check("douglas", d.a == V{1} && d.b == V{1 - th} && d.theta == th && d.b_hat == V{1});
        const auto b = named_scheme(SchemeFamily::bdf2, th);
        check("bdf2", b.a == V{R(4, 3), R(-1, 3)} && b.b == V{R(4, 3) - 2 * th, R(-2, 3) + th} && b.theta == th &&
                          b.b_hat == V{R(4, 3), R(-2, 3)} && b.b_check == V{R(4, 3) - th, R(-2, 3) + th});
        const auto a = named_scheme(SchemeFamily::adams2, th);
        check("adams2", a.a == V{1, 0} && a.b == V{R(3, 2) - 2 * th, R(-1, 2) + th} && a.theta == th &&
                            a.b_hat == V{R(3, 2), R(-1, 2)} && a.b_check == V{R(3, 2) - th, R(-1, 2) + th});
    }
    if (o.pass) o.detail = "douglas, cnlf, bdf2, adams2, bdf3 exact (rational)";
    return o;
}

// 2. IMEX reduction for s = 1.
Outcome imex_reduction() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    int systems = 0;
    for (auto family : kMultistep) {
        const auto exact = named_scheme(family);
        const Scheme scheme = to_double(exact);
        for (int trial = 0; trial < 10; ++trial) {
            const int m = 1 + static_cast<int>(rng() % 8);
            const auto d = testsupport::random_system(rng, m, 1);
            const double dt = 0.05;
            std::vector<Eigen::VectorXd> us;
            for (int i = 0; i < scheme.k; ++i) us.push_back(random_vector(rng, m));
            StepperState plain = seeded_state(scheme, *d.sys, us, dt);
            StepperState mod = seeded_state(scheme, *d.sys, us, dt);
            std::deque<testsupport::OracleRecord> oracle;
            for (int i = 0; i < scheme.k; ++i) oracle.push_back({-i * dt, us[static_cast<std::size_t>(i)]});
            for (int n = 0; n < 50; ++n) {
                const auto a = step_sclm(scheme, *d.sys, plain);
                const auto b = step_sclmmod(scheme, *d.sys, mod);
                oracle.push_front(testsupport::imex_step(exact, d, oracle, dt));
                oracle.pop_back();
                worst = std::max({worst, rel_err(a, oracle.front().u), rel_err(b, oracle.front().u)});
            }
            ++systems;
        }
    }
    return {worst <= 1e-14, fmt("%d systems x 50 steps, max relative deviation %.2e (tol 1e-14)", systems, worst)};
}

// 3. Steady states are preserved.
Outcome steady_state() {
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (int s : {1, 2, 3}) {
        const int m = 6;
        const auto base = testsupport::random_system(rng, m, s);
        const Eigen::VectorXd ustar = random_vector(rng, m);
        // F_j(u*) = w_j, nonzero with sum zero.
        std::vector<Eigen::VectorXd> w;
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < s; ++j) {
            w.push_back(random_vector(rng, m));
            sum += w.back();
        }
        w.push_back(-sum);
        std::vector<Eigen::VectorXd> p;
        std::vector<Eigen::VectorXd> q;
        for (int j = 0; j <= s; ++j) {
            p.push_back(w[static_cast<std::size_t>(j)] - base.A[static_cast<std::size_t>(j)] * ustar);
            q.push_back(Eigen::VectorXd::Zero(m));
        }
        const auto d = testsupport::make_dense_system(base.A, p, q);
        const auto u0 = testsupport::to_std(ustar);
        for (auto family : kMultistep) {
            const Scheme scheme = to_double(named_scheme(family));
            for (auto corr : {Correction::standard, Correction::modified}) {
                const auto u = TimeIntegrator(scheme, corr).integrate(*d.sys, u0, 0.0, 0.1, 100);
                worst = std::max(worst, rel_err(u, ustar));
            }
        }
        for (const auto& method : {OneStepMethod::douglas(0.5), OneStepMethod::craig_sneyd(), OneStepMethod::mcs(1.0 / 3.0)}) {
            worst = std::max(worst, rel_err(TimeIntegrator(method).integrate(*d.sys, u0, 0.0, 0.1, 100), ustar));
        }
    }
    return {worst <= 1e-13, fmt("s = 1..3, 5 schemes x 2 corrections + do/cs/mcs, 100 steps, max deviation %.2e (tol 1e-13)", worst)};
}

// 4. Operator identity.
Outcome operator_identity() {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> b0d(0.25, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        for (int s : {1, 2, 3}) {
            const int n = 1 + static_cast<int>(rng() % 10);
            std::vector<Eigen::MatrixXd> z;
            for (int j = 0; j < s; ++j) {
                Eigen::MatrixXd m(n, n);
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) m(a, b) = u(rng);
                }
                z.push_back(m);
            }
            worst = std::max(worst, identity_check(b0d(rng), z).residual);
        }
    }
    return {worst < 1e-12, fmt("300 random cases (s = 1..3, dim 1..10), max residual %.2e (tol 1e-12)", worst)};
}

// 5. Orders on manufactured problems.
Outcome orders() {
    const std::map<std::string, std::pair<double, double>> expected = {
        {"sc2a", {2.0, 0.15}}, {"sc2b", {2.0, 0.15}}, {"sc2c", {2.0, 0.15}}, {"sc3b", {3.0, 0.2}},
        {"do", {1.0, 0.15}},   {"cs", {2.0, 0.15}},   {"mcs", {2.0, 0.15}}};
    const std::vector<int> Ns = {32, 64, 128, 256, 512};
    Outcome o;
    for (const auto* id : {"linear4", "mixed2d"}) {
        const auto prob = manufactured_convergence_problem(manufactured_problem(id));
        o.detail += std::string(id) + ":";
        for (const auto& [method, target] : expected) {
            const double p = fit_order(run_convergence(prob, parse_method(method), Ns));
            const bool ok = std::abs(p - target.first) <= target.second;
            o.pass = o.pass && ok;
            o.detail += fmt(" %s %.3f%s", method.c_str(), p, ok ? "" : "(!)");
        }
        o.detail += "; ";
    }
    o.detail += "N = 32..512";
    return o;
}

// 6. Theorem bound validation and sharpness.
Outcome theorem_bounds() {
    Outcome o;
    int cells = 0;
    for (double gamma : {0.0, 0.5, 0.9, 1.0}) {
        for (auto f : {SchemeFamily::cnlf, SchemeFamily::bdf2, SchemeFamily::adams2}) {
            const double th = theorem_theta_bound(f, gamma);
            const auto s = f == SchemeFamily::cnlf ? named_scheme_real(f) : named_scheme_real(f, th);
            if (find_violation(s, Correction::modified, StabilityModel::diffusion, gamma, 1'000'000, 2006)) {
                o.pass = false;
                o.detail += fmt("violation %s gamma=%.1f; ", std::string(family_name(f)).c_str(), gamma);
            }
            ++cells;
        }
    }
    for (auto f : {SchemeFamily::bdf2, SchemeFamily::adams2}) {
        const auto s = named_scheme_real(f, 0.9 * theorem_theta_bound(f, 1.0));
        if (!find_violation(s, Correction::modified, StabilityModel::diffusion, 1.0, 1'000'000, 2007)) {
            o.pass = false;
            o.detail += fmt("no violation at 0.9 bound for %s; ", std::string(family_name(f)).c_str());
        }
    }
    o.detail += fmt("%d cells x 1e6 diffusion triplets at the bound, sharpness probes at 0.9 bound", cells);
    return o;
}

// 7. CNLF advection counterexample.
Outcome cnlf_counterexample() {
    const auto s = named_scheme_real(SchemeFamily::cnlf);
    const auto r = recursion_coeffs(s, {0.0, complex(0.0, 1.0), complex(0.0, 1.0)});
    const auto roots = characteristic_roots(r);
    const double m = std::max(std::abs(roots[0]), std::abs(roots[1]));
    return {!root_condition(r), fmt("z0 = 0, z1 = z2 = i: root condition %s, max |root| = %.6f",
                                    root_condition(r) ? "holds" : "fails", m)};
}

// 8. Reduced theta-gamma curves.
Outcome theta_curves() {
    CurveOptions o;
    o.model = StabilityModel::advection_diffusion;
    o.gammas = arithmetic_grid(0.0, 1.0, 0.02);
    o.thetas = arithmetic_grid(0.5, 2.0, 0.005);
    o.samples = 200'000;
    o.seed = 1;
    o.family = SchemeFamily::bdf2;
    const auto bdf2 = estimate_theta_curve(o);
    o.family = SchemeFamily::adams2;
    const auto adams2 = estimate_theta_curve(o);
    double worst = 0.0;
    bool ok = true;
    for (const auto& p : bdf2) {
        if (p.gamma > 0.85 + 1e-9) continue;
        if (!p.theta_min) {
            ok = false;
            continue;
        }
        worst = std::max(worst, std::abs(*p.theta_min - theorem_theta_bound(SchemeFamily::bdf2, p.gamma)));
    }
    const auto& last = adams2.back();
    const double a1 = last.theta_min.value_or(std::nan(""));
    ok = ok && worst <= 0.05 && std::abs(last.gamma - 1.0) < 1e-9 && a1 >= 1.8;
    return {ok, fmt("bdf2 max |theta_min - bound| for gamma <= 0.85: %.4f (tol 0.05); adams2 theta_min(1) = %.3f "
                    "(need >= 1.8); bdf2 theta_min(1) = %.3f",
                    worst, a1, bdf2.back().theta_min.value_or(std::nan("")))};
}

// 9. BDF3 probes.
Outcome bdf3_probes() {
    const auto s = named_scheme_real(SchemeFamily::bdf3);
    const bool std_fails = !root_condition(recursion_coeffs(s, {0.0, -5.0, -5.0}, Correction::standard));
    const bool mod_passes =
        !find_violation(s, Correction::modified, StabilityModel::diffusion, 0.6, 100'000, 2009).has_value();
    const bool adv_fails =
        !root_condition(recursion_coeffs(s, {0.0, complex(0.0, 3.0), complex(0.0, 3.0)}, Correction::modified));
    return {std_fails && mod_passes && adv_fails,
            fmt("SCLM at z1 = z2 = -5 %s; SCLMmod on 1e5 gamma = 0.6 triplets %s; SCLMmod at z1 = z2 = 3i %s",
                std_fails ? "unstable" : "stable", mod_passes ? "stable" : "unstable",
                adv_fails ? "unstable" : "stable")};
}

// 10. Heston desk-scale study.
Outcome heston_study() {
    const std::vector<int> Ns = {8, 16, 32, 64, 128};
    Outcome o;
    std::string notes;
    bool sc2c_flagged = false;
    for (const auto& hc : builtin_heston_cases()) {
        const auto grid = build_grid(hc, GridParams{});
        const auto hs = assemble(hc, grid);
        const auto ref = reference_solution(hs.system, initial_vector(hc, grid), hc.T, reference_steps(Ns));
        const auto prob = heston_problem(hs, ref);
        std::map<std::string, std::vector<ConvergenceRecord>> recs;
        for (const auto* m : {"sc2a", "sc2b", "sc2c", "mcs"}) recs[m] = run_convergence(prob, parse_method(m), Ns);
        const bool c_mono = errors_monotone(recs["sc2c"]);
        sc2c_flagged = sc2c_flagged || !c_mono;
        o.detail += "\n    case " + hc.name + ":";
        for (const auto* m : {"sc2a", "sc2b"}) {
            const auto& r = recs[m];
            if (hc.name == "A") {
                bool finite = true;
                for (const auto& x : r) finite = finite && !x.failed && std::isfinite(x.error);
                const std::span<const ConvergenceRecord> tail(r.end() - 3, r.end());
                const bool ok = finite && errors_monotone(tail);
                o.pass = o.pass && ok;
                o.detail += fmt(" %s finite=%s tail-monotone=%s final=%.2e%s", m, finite ? "yes" : "no",
                                errors_monotone(tail) ? "yes" : "no", r.back().error, ok ? "" : "(!)");
                continue;
            }
            const bool mono = errors_monotone(r);
            double p = std::nan("");
            try {
                p = fit_order(r);
            } catch (const std::exception&) {
            }
            const double ratio = r.back().error / recs["mcs"].back().error;
            const bool ok = mono && p >= 1.7 && ratio <= 3.0 && ratio >= 1.0 / 3.0;
            o.pass = o.pass && ok;
            o.detail += fmt(" %s order=%.3f monotone=%s err/mcs=%.2f%s", m, p, mono ? "yes" : "no", ratio, ok ? "" : "(!)");
        }
        double pc = std::nan("");
        try {
            pc = fit_order(recs["sc2c"]);
        } catch (const std::exception&) {
        }
        o.detail += fmt(" | sc2c monotone=%s order=%.2f | mcs order=%.3f", c_mono ? "yes" : "no", pc,
                        fit_order(recs["mcs"]));
    }
    o.pass = o.pass && sc2c_flagged;
    o.detail += fmt("\n    sc2c failed or non-monotone on at least one case: %s", sc2c_flagged ? "yes" : "no");
    return o;
}

// 11. Discretization consistency.
Outcome consistency() {
    Outcome o;
    for (const auto& hc : builtin_heston_cases()) {
        double prev = 0.0;
        o.detail += hc.name + ":";
        for (std::size_t m2 : {80u, 160u, 320u, 640u}) {
            const double e = testsupport::heston_consistency_error(hc, 2 * m2, m2);
            if (prev > 0.0) {
                const double r = prev / e;
                const bool ok = r >= 3.2 && r <= 4.8;
                o.pass = o.pass && ok;
                o.detail += fmt(" %.2f%s", r, ok ? "" : "(!)");
            }
            prev = e;
        }
        o.detail += "; ";
    }
    o.detail += "ratios over grids 160x80 -> 1280x640 (need [3.2, 4.8])";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, coefficients},    {2, imex_reduction},      {3, steady_state}, {4, operator_identity},
        {5, orders},          {6, theorem_bounds},      {7, cnlf_counterexample}, {8, theta_curves},
        {9, bdf3_probes},     {10, heston_study},       {11, consistency}};
    int failed = 0;
    for (const auto& [id, run] : criteria) {
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("criterion %2d: %s (%.1f s) %s\n", id, out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
