// runner.hpp — Run configuration, parameter sweeps, validation and file comparison

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pcqed/exact_oracle.hpp"
#include "pcqed/master_equation.hpp"
#include "pcqed/spectra.hpp"

namespace pcqed {

// Parameters addressable by sweep axes: system.{omega_eg, omega_c, g, kappa}, bath.{alpha, nu_c, mu, temperature}.
// Bare names ("g", "temperature") are accepted as well.
struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

// parameter = scale * from + offset, applied after the sweep axes at every point.
struct DerivedAxis {
    std::string parameter;
    std::string from;
    double scale{1.0};
    double offset{0.0};
};

struct OracleSettings {
    OracleRefinement refinement;
    OracleOptions options;
    bool check_convergence{true};
    double tolerance{0.01};
};

struct OutputSettings {
    std::filesystem::path directory{"out"};
    bool spectra{true};
    bool populations{true};
    bool diagnostics{true};
};

struct RunConfig {
    SystemParams system;
    BathParams bath;
    std::vector<std::string> methods{"weak", "polaron", "variational", "polariton-polaron"};
    std::vector<Route> routes{Route::cavity};
    std::vector<SweepAxis> sweep;
    std::vector<DerivedAxis> derived;
    BuildOptions build;
    SpectrumOptions spectrum;
    TimeGrid population{20.0, 1001};
    OracleSettings oracle;
    OutputSettings outputs;
    unsigned workers{1};   // 0: hardware concurrency

    void validate() const;   // ConfigError on structural problems
};

// Structured text (JSON) with the key tree of RunConfig; unknown keys are rejected.
// Overrides are "dotted.key=value" with value parsed as JSON when possible, else as a string.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
std::string default_config_text();

struct SweepPoint {
    std::size_t index{0};
    SystemParams system;
    BathParams bath;
    std::vector<std::pair<std::string, double>> coordinates;   // axis name, value
};
std::vector<SweepPoint> expand_sweep(const RunConfig& config);

struct SummaryRow {
    std::size_t point{0};
    std::vector<std::pair<std::string, double>> coordinates;
    std::string method;
    std::string route;
    bool ok{false};
    std::string error;
    double relative_error{0.0};          // NaN unless the oracle ran
    double perturbation_strength{0.0};
    double bogoliubov_bound{0.0};
    double bound_minus_pp{0.0};          // NaN when polariton-polaron is unavailable
    double shift{0.0};
    double delta_eta{0.0};
    std::size_t warnings{0};
};

struct RunSummary {
    std::vector<SummaryRow> rows;
    std::size_t failed{0};
    int exit_code() const { return failed == 0 ? 0 : 1; }
};

// Executes every sweep point x method x route, fail-soft, and writes the artifacts.
RunSummary run(const RunConfig& config);

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> notes;
    bool ok() const { return errors.empty(); }
};

// Dry run: grid invariants, bath-kernel truncation, quadrature probes, oracle dimensions. Writes nothing.
ValidationReport validate(const RunConfig& config);

// Relative L2 error between two spectrum CSV files on the reference grid.
double compare_files(const std::filesystem::path& reference, const std::filesystem::path& test,
                     double window = 62.8);

} // namespace pcqed
