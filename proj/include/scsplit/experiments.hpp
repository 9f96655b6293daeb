#pragma once

// Experiment driver: convergence studies against a reference or exact
// solution, order fitting, CSV and plot-script output, reference caching.

#include "scsplit/heston.hpp"
#include "scsplit/manufactured.hpp"
#include "scsplit/stability.hpp"
#include "scsplit/stepper.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scsplit {

/// A method identifier with its theta: sc2a, sc2b, sc2c, sc3b (multistep,
/// modified correction), do, cs, mcs (one-step).
struct MethodSpec {
    std::string id;
    double theta = 0.0;
    bool multistep = false;
    Scheme scheme;
    OneStepMethod onestep;

    /// Number of time steps for a study at N: N for cs and mcs, 2N otherwise.
    [[nodiscard]] std::int64_t steps(int N) const;
    [[nodiscard]] double dt(double T, int N) const { return T / static_cast<double>(steps(N)); }
    [[nodiscard]] TimeIntegrator integrator() const;
};

/// "sc2b", "sc2b:0.7", "mcs:0.3". theta may not be given for sc2c, sc3b and cs.
[[nodiscard]] MethodSpec parse_method(std::string_view text);
[[nodiscard]] const std::vector<std::string>& method_ids();

/// One semi-discrete problem together with a functional measuring the error
/// of a state at t = T.
struct ConvergenceProblem {
    std::string name;
    std::shared_ptr<const SplitAffineSystem> system;
    std::vector<double> u0;
    double T = 1.0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    std::function<double(std::span<const double>)> error;
};

struct ConvergenceRecord {
    std::string problem;
    std::string method;
    double theta = 0.0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
    int N = 0;
    double dt = 0.0;
    double error = 0.0;  // NaN for failed runs
    double wall_ms = 0.0;
    bool failed = false;
    std::int64_t failed_step = -1;
    std::string message;

    friend bool operator==(const ConvergenceRecord&, const ConvergenceRecord&) = default;
};

struct StudyOptions {
    unsigned threads = 0;     // 0 = hardware concurrency
    bool wall_time = true;    // false writes wall_ms = 0 for byte-stable output
};

/// Runs every N in parallel; records come back in N_list order.
[[nodiscard]] std::vector<ConvergenceRecord> run_convergence(const ConvergenceProblem& problem,
                                                             const MethodSpec& method, const std::vector<int>& N_list,
                                                             const StudyOptions& options = {});

/// Reference step count: explicit value, or T/dt_ref with dt_ref = T/max(4 max N, 4096).
[[nodiscard]] std::int64_t reference_steps(const std::vector<int>& N_list,
                                           std::optional<std::int64_t> explicit_steps = std::nullopt);

/// Same semi-discrete system integrated by MCS with theta = 1/3.
[[nodiscard]] std::vector<double> reference_solution(const SplitAffineSystem& sys, std::span<const double> u0,
                                                     double T, std::int64_t steps);

/// Heston problem with ROI error against the given reference vector.
[[nodiscard]] ConvergenceProblem heston_problem(const HestonSystem& hs, std::vector<double> reference);
/// Max-norm error against the exact solution at T.
[[nodiscard]] ConvergenceProblem manufactured_convergence_problem(const ManufacturedProblem& mp);

struct RunConfig {
    std::string problem = "B";  // Heston case name or manufactured id
    std::optional<HestonCase> hcase;
    std::optional<std::filesystem::path> case_file;
    MethodSpec method = parse_method("sc2b");
    std::vector<int> N_list = {8, 16, 32, 64, 128};
    GridParams grid;
    std::optional<std::int64_t> reference_steps;
    std::optional<std::filesystem::path> reference_file;  // cached reference vector
    StudyOptions options;
};

/// Resolves the problem named in the config, builds (or loads) the reference
/// and runs the study.
[[nodiscard]] std::vector<ConvergenceRecord> run_convergence(const RunConfig& config);

/// Least-squares fit of log(error) against log(dt).
struct OrderFit {
    double order = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square residual in log space
    std::size_t points = 0;
};

/// Uses the finite, non-failed records. Throws std::invalid_argument with
/// fewer than three points of distinct dt.
[[nodiscard]] OrderFit fit_order_detailed(std::span<const ConvergenceRecord> records);
[[nodiscard]] double fit_order(std::span<const ConvergenceRecord> records);

/// True when the errors strictly decrease along the records and none failed.
[[nodiscard]] bool errors_monotone(std::span<const ConvergenceRecord> records);

// Output.

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRecord> records);
[[nodiscard]] std::string convergence_csv(std::span<const ConvergenceRecord> records);
/// Parses the CSV written above. Failure details other than the NaN error are not stored.
[[nodiscard]] std::vector<ConvergenceRecord> parse_convergence_csv(std::istream& in);

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);
[[nodiscard]] std::string curve_csv(std::span<const CurvePoint> curve);
[[nodiscard]] std::vector<CurvePoint> parse_curve_csv(std::istream& in);

/// Python/matplotlib script: log-log error against 1/N, one line per
/// (problem, method), one panel per problem.
[[nodiscard]] std::string convergence_plot_script(const std::vector<std::string>& csv_files,
                                                  const std::string& image_file);
/// Python/matplotlib script: theta_min against gamma, with the analytical
/// diffusion bound of the family drawn for comparison when it has one.
[[nodiscard]] std::string curve_plot_script(const std::string& csv_file, const std::string& image_file,
                                            SchemeFamily family);

/// Writes text to path; throws std::runtime_error when the path is unwritable.
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Reference vectors: 8-byte magic "SCSREF01", uint32 m1, uint32 m2, then
// (m1 + 1)(m2 + 1) doubles, all little-endian.

struct ReferenceVector {
    std::uint32_t m1 = 0;
    std::uint32_t m2 = 0;
    std::vector<double> values;
};

void write_reference(const std::filesystem::path& path, const ReferenceVector& ref);
[[nodiscard]] ReferenceVector read_reference(const std::filesystem::path& path);

}  // namespace scsplit
