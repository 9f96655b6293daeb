#include "scsplit/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace scsplit {

namespace {

std::string fmt(double x) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
    double x = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    }
    return x;
}

template <class Int>
Int parse_int(std::string_view s) {
    Int x = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
    }
    return x;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

void check_field(const std::string& s) {
    if (s.find_first_of(",\n\r\"") != std::string::npos) {
        throw std::invalid_argument("CSV field '" + s + "' contains a reserved character");
    }
}

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

constexpr std::array<char, 8> kMagic = {'S', 'C', 'S', 'R', 'E', 'F', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t x) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((x >> (8 * i)) & 0xffu);
    out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(b.data(), 8);
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t x = 0;
    for (int i = 0; i < bytes; ++i) x |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return x;
}

}  // namespace

std::int64_t MethodSpec::steps(int N) const {
    if (N <= 0) throw std::invalid_argument("N must be positive");
    const bool full = !multistep && onestep.kind != OneStepKind::douglas;
    return full ? N : 2 * static_cast<std::int64_t>(N);
}

TimeIntegrator MethodSpec::integrator() const {
    if (multistep) return TimeIntegrator(scheme, Correction::modified);
    return TimeIntegrator(onestep);
}

const std::vector<std::string>& method_ids() {
    static const std::vector<std::string> ids = {"sc2a", "sc2b", "sc2c", "sc3b", "do", "cs", "mcs"};
    return ids;
}

MethodSpec parse_method(std::string_view text) {
    const auto colon = text.find(':');
    const std::string id(text.substr(0, colon));
    std::optional<double> theta;
    if (colon != std::string_view::npos) {
        const Rational r = parse_rational(text.substr(colon + 1));
        theta = boost::rational_cast<double>(r);
        if (!(*theta > 0.0)) throw std::invalid_argument("method theta must be positive");
    }
    MethodSpec m;
    m.id = id;
    auto multistep = [&](SchemeFamily f) {
        if (theta && !has_free_theta(f)) throw std::invalid_argument("method " + id + " has a fixed theta");
        m.multistep = true;
        m.scheme = named_scheme_real(f, theta);
        m.theta = m.scheme.theta;
    };
    if (id == "sc2a") {
        multistep(SchemeFamily::adams2);
    } else if (id == "sc2b") {
        multistep(SchemeFamily::bdf2);
    } else if (id == "sc2c") {
        multistep(SchemeFamily::cnlf);
    } else if (id == "sc3b") {
        multistep(SchemeFamily::bdf3);
    } else if (id == "do") {
        m.onestep = OneStepMethod::douglas(theta.value_or(0.5));
    } else if (id == "cs") {
        if (theta) throw std::invalid_argument("method cs has a fixed theta");
        m.onestep = OneStepMethod::craig_sneyd();
    } else if (id == "mcs") {
        m.onestep = OneStepMethod::mcs(theta.value_or(1.0 / 3.0));
    } else {
        throw std::invalid_argument("unknown method '" + id + "' (expected sc2a|sc2b|sc2c|sc3b|do|cs|mcs)");
    }
    if (!m.multistep) m.theta = m.onestep.theta;
    return m;
}

std::vector<ConvergenceRecord> run_convergence(const ConvergenceProblem& problem, const MethodSpec& method,
                                               const std::vector<int>& N_list, const StudyOptions& options) {
    if (!problem.system || !problem.error) throw std::invalid_argument("run_convergence: incomplete problem");
    if (problem.u0.size() != problem.system->dim()) throw std::invalid_argument("run_convergence: u0 has wrong size");
    std::vector<ConvergenceRecord> out(N_list.size());
    const TimeIntegrator integrator = method.integrator();

    auto run_one = [&](std::size_t k) {
        ConvergenceRecord& rec = out[k];
        rec.problem = problem.name;
        rec.method = method.id;
        rec.theta = method.theta;
        rec.m1 = problem.m1;
        rec.m2 = problem.m2;
        rec.N = N_list[k];
        const std::int64_t steps = method.steps(rec.N);
        rec.dt = problem.T / static_cast<double>(steps);
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto u = integrator.integrate(*problem.system, problem.u0, 0.0, rec.dt, steps);
            rec.error = problem.error(u);
            if (!std::isfinite(rec.error)) {
                rec.failed = true;
                rec.failed_step = steps;
                rec.message = "non-finite error";
            }
        } catch (const NonFiniteState& e) {
            rec.failed = true;
            rec.failed_step = e.step();
            rec.message = e.what();
        } catch (const LinearSolveError& e) {
            rec.failed = true;
            rec.message = e.what();
        }
        if (rec.failed) rec.error = std::numeric_limits<double>::quiet_NaN();
        if (options.wall_time) {
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const unsigned nthreads = resolve_threads(options.threads, N_list.size());
    if (nthreads <= 1) {
        for (std::size_t k = 0; k < N_list.size(); ++k) run_one(k);
        return out;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < N_list.size(); k = next++) run_one(k);
            });
        }
    }
    return out;
}

std::int64_t reference_steps(const std::vector<int>& N_list, std::optional<std::int64_t> explicit_steps) {
    if (explicit_steps) {
        if (*explicit_steps <= 0) throw std::invalid_argument("reference step count must be positive");
        return *explicit_steps;
    }
    std::int64_t max_n = 0;
    for (int n : N_list) max_n = std::max<std::int64_t>(max_n, n);
    return std::max<std::int64_t>(4 * max_n, 4096);
}

std::vector<double> reference_solution(const SplitAffineSystem& sys, std::span<const double> u0, double T,
                                       std::int64_t steps) {
    const TimeIntegrator mcs(OneStepMethod::mcs(1.0 / 3.0));
    return mcs.integrate(sys, u0, 0.0, T / static_cast<double>(steps), steps);
}

ConvergenceProblem heston_problem(const HestonSystem& hs, std::vector<double> reference) {
    if (reference.size() != hs.grid.size()) throw std::invalid_argument("heston_problem: reference has wrong size");
    ConvergenceProblem p;
    p.name = hs.hcase.name;
    p.system = std::make_shared<const SplitAffineSystem>(hs.system);
    p.u0 = initial_vector(hs.hcase, hs.grid);
    p.T = hs.hcase.T;
    p.m1 = hs.grid.m1();
    p.m2 = hs.grid.m2();
    p.error = [grid = hs.grid, K = hs.hcase.K, ref = std::move(reference)](std::span<const double> u) {
        return roi_error(u, ref, grid, K);
    };
    return p;
}

ConvergenceProblem manufactured_convergence_problem(const ManufacturedProblem& mp) {
    ConvergenceProblem p;
    p.name = mp.name;
    p.system = mp.system;
    p.u0 = mp.exact(0.0);
    p.T = mp.T;
    p.error = [exact = mp.exact(mp.T)](std::span<const double> u) {
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = std::abs(u[i] - exact[i]);
            if (std::isnan(d)) return d;
            e = std::max(e, d);
        }
        return e;
    };
    return p;
}

std::vector<ConvergenceRecord> run_convergence(const RunConfig& config) {
    if (config.N_list.empty()) throw std::invalid_argument("run_convergence: empty N list");
    const auto& ids = manufactured_ids();
    if (!config.hcase && std::find(ids.begin(), ids.end(), config.problem) != ids.end()) {
        return run_convergence(manufactured_convergence_problem(manufactured_problem(config.problem)), config.method,
                               config.N_list, config.options);
    }
    HestonCase hc;
    if (config.hcase) {
        hc = *config.hcase;
    } else if (config.case_file) {
        const auto cases = load_heston_cases(*config.case_file);
        auto it = std::find_if(cases.begin(), cases.end(), [&](const HestonCase& c) { return c.name == config.problem; });
        if (it == cases.end()) throw std::invalid_argument("case '" + config.problem + "' not in case file");
        hc = *it;
    } else {
        hc = heston_case(config.problem);
    }
    const HestonGrid grid = build_grid(hc, config.grid);
    const HestonSystem hs = assemble(hc, grid);

    std::vector<double> ref;
    if (config.reference_file && std::filesystem::exists(*config.reference_file)) {
        auto cached = read_reference(*config.reference_file);
        if (cached.m1 != grid.m1() || cached.m2 != grid.m2()) {
            throw std::invalid_argument("cached reference grid does not match the run grid");
        }
        ref = std::move(cached.values);
    } else {
        ref = reference_solution(hs.system, initial_vector(hc, grid), hc.T,
                                 reference_steps(config.N_list, config.reference_steps));
        if (config.reference_file) {
            write_reference(*config.reference_file,
                            {static_cast<std::uint32_t>(grid.m1()), static_cast<std::uint32_t>(grid.m2()), ref});
        }
    }
    return run_convergence(heston_problem(hs, std::move(ref)), config.method, config.N_list, config.options);
}

OrderFit fit_order_detailed(std::span<const ConvergenceRecord> records) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records) {
        if (r.failed || !std::isfinite(r.error) || !(r.error > 0.0) || !(r.dt > 0.0)) continue;
        pts.emplace_back(std::log(r.dt), std::log(r.error));
    }
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.first);
    std::sort(xs.begin(), xs.end());
    const auto distinct = static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
    if (distinct < 3) throw std::invalid_argument("fit_order: need at least three points with distinct dt");

    const double n = static_cast<double>(pts.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    OrderFit fit;
    fit.order = sxy / sxx;
    fit.intercept = my - fit.order * mx;
    double ss = 0.0;
    for (const auto& [x, y] : pts) {
        const double e = y - (fit.intercept + fit.order * x);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = pts.size();
    return fit;
}

double fit_order(std::span<const ConvergenceRecord> records) { return fit_order_detailed(records).order; }

bool errors_monotone(std::span<const ConvergenceRecord> records) {
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].failed || !std::isfinite(records[k].error)) return false;
        if (k > 0 && !(records[k].error < records[k - 1].error)) return false;
    }
    return true;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRecord> records) {
    out << "case,method,theta,m1,m2,N,dt,roi_error,wall_ms\n";
    for (const auto& r : records) {
        check_field(r.problem);
        check_field(r.method);
        out << r.problem << ',' << r.method << ',' << fmt(r.theta) << ',' << r.m1 << ',' << r.m2 << ',' << r.N << ','
            << fmt(r.dt) << ',' << fmt(r.error) << ',' << fmt(r.wall_ms) << '\n';
    }
}

std::string convergence_csv(std::span<const ConvergenceRecord> records) {
    std::ostringstream os;
    write_convergence_csv(os, records);
    return os.str();
}

std::vector<ConvergenceRecord> parse_convergence_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "case,method,theta,m1,m2,N,dt,roi_error,wall_ms") {
        throw std::invalid_argument("convergence CSV: unexpected header");
    }
    std::vector<ConvergenceRecord> out;
    while (std::getline(in, line)) {
        const auto row = strip_cr(line);
        if (row.empty()) continue;
        const auto f = split_fields(row);
        if (f.size() != 9) throw std::invalid_argument("convergence CSV: expected 9 fields, got " + std::to_string(f.size()));
        ConvergenceRecord r;
        r.problem = std::string(f[0]);
        r.method = std::string(f[1]);
        r.theta = parse_double(f[2]);
        r.m1 = parse_int<std::size_t>(f[3]);
        r.m2 = parse_int<std::size_t>(f[4]);
        r.N = parse_int<int>(f[5]);
        r.dt = parse_double(f[6]);
        r.error = parse_double(f[7]);
        r.wall_ms = parse_double(f[8]);
        r.failed = !std::isfinite(r.error);
        out.push_back(std::move(r));
    }
    return out;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "gamma,theta_min,samples,seed\n";
    for (const auto& p : curve) {
        out << fmt(p.gamma) << ',' << (p.theta_min ? fmt(*p.theta_min) : std::string("nan")) << ',' << p.samples << ','
            << p.seed << '\n';
    }
}

std::string curve_csv(std::span<const CurvePoint> curve) {
    std::ostringstream os;
    write_curve_csv(os, curve);
    return os.str();
}

std::vector<CurvePoint> parse_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "gamma,theta_min,samples,seed") {
        throw std::invalid_argument("curve CSV: unexpected header");
    }
    std::vector<CurvePoint> out;
    while (std::getline(in, line)) {
        const auto row = strip_cr(line);
        if (row.empty()) continue;
        const auto f = split_fields(row);
        if (f.size() != 4) throw std::invalid_argument("curve CSV: expected 4 fields");
        CurvePoint p;
        p.gamma = parse_double(f[0]);
        const double th = parse_double(f[1]);
        if (std::isfinite(th)) p.theta_min = th;
        p.samples = parse_int<std::uint64_t>(f[2]);
        p.seed = parse_int<std::uint64_t>(f[3]);
        out.push_back(p);
    }
    return out;
}

std::string convergence_plot_script(const std::vector<std::string>& csv_files, const std::string& image_file) {
    std::ostringstream os;
    os << "import csv\nimport math\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
    os << "files = [";
    for (std::size_t i = 0; i < csv_files.size(); ++i) os << (i ? ", " : "") << '\'' << csv_files[i] << '\'';
    os << "]\n";
    os << R"(series = {}
for name in files:
    with open(name, newline='') as fh:
        for row in csv.DictReader(fh):
            err = float(row['roi_error'])
            if not math.isfinite(err) or err <= 0.0:
                continue
            key = (row['case'], row['method'])
            series.setdefault(key, []).append((int(row['N']), err))

cases = sorted({c for c, _ in series})
cols = min(3, max(1, len(cases)))
rows = (len(cases) + cols - 1) // cols
fig, axes = plt.subplots(rows, cols, figsize=(4.5 * cols, 3.8 * rows), squeeze=False)
for ax in axes.flat[len(cases):]:
    ax.set_visible(False)
for ax, case in zip(axes.flat, cases):
    for (c, method), pts in sorted(series.items()):
        if c != case:
            continue
        pts.sort()
        ax.loglog([1.0 / n for n, _ in pts], [e for _, e in pts], marker='o', label=method.upper())
    ax.set_title('Case ' + case)
    ax.set_xlabel('1/N')
    ax.set_ylabel('error')
    ax.grid(True, which='both', alpha=0.3)
    ax.legend(fontsize='small')
fig.tight_layout()
)";
    os << "fig.savefig('" << image_file << "', dpi=150)\n";
    return os.str();
}

std::string curve_plot_script(const std::string& csv_file, const std::string& image_file, SchemeFamily family) {
    std::ostringstream os;
    os << "import csv\nimport math\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
    os << "gam, th = [], []\nwith open('" << csv_file << R"(', newline='') as fh:
    for row in csv.DictReader(fh):
        t = float(row['theta_min'])
        if math.isfinite(t):
            gam.append(float(row['gamma']))
            th.append(t)

fig, ax = plt.subplots(figsize=(5, 4))
ax.plot(gam, th, marker='.', label='sampled')
)";
    switch (family) {
        case SchemeFamily::bdf2:
            os << "bound = [max(0.5, (g + 1) / (2 + 2 / math.sqrt(3))) for g in gam]\n";
            break;
        case SchemeFamily::adams2:
            os << "bound = [max(0.5, (g + 1) / 3) for g in gam]\n";
            break;
        case SchemeFamily::cnlf:
            os << "bound = [1.0 for g in gam]\n";
            break;
        default:
            os << "bound = None\n";
            break;
    }
    os << "if bound is not None:\n    ax.plot(gam, bound, '--', label='diffusion bound')\n";
    os << "ax.set_xlabel('gamma')\nax.set_ylabel('theta')\nax.set_title('" << family_name(family) << "')\n";
    os << "ax.grid(True, alpha=0.3)\nax.legend()\nfig.tight_layout()\nfig.savefig('" << image_file
       << "', dpi=150)\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

void write_reference(const std::filesystem::path& path, const ReferenceVector& ref) {
    const std::size_t expect = (static_cast<std::size_t>(ref.m1) + 1) * (static_cast<std::size_t>(ref.m2) + 1);
    if (ref.values.size() != expect) throw std::invalid_argument("write_reference: size does not match m1, m2");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, ref.m1);
    put_u32(out, ref.m2);
    for (double x : ref.values) put_f64(out, x);
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

ReferenceVector read_reference(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                                         [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
        throw std::runtime_error(path.string() + ": not a reference file");
    }
    ReferenceVector ref;
    ref.m1 = static_cast<std::uint32_t>(get_le(bytes.data() + 8, 4));
    ref.m2 = static_cast<std::uint32_t>(get_le(bytes.data() + 12, 4));
    const std::size_t n = (static_cast<std::size_t>(ref.m1) + 1) * (static_cast<std::size_t>(ref.m2) + 1);
    if (bytes.size() != 16 + 8 * n) throw std::runtime_error(path.string() + ": truncated or oversized payload");
    ref.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) ref.values[i] = std::bit_cast<double>(get_le(bytes.data() + 16 + 8 * i, 8));
    return ref;
}

}  // namespace scsplit
