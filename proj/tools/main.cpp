// main.cpp — pcqed command-line runner: run, validate, compare

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pcqed/errors.hpp"
#include "pcqed/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

int do_run(const std::string& path, const std::vector<std::string>& overrides, const std::string& out)
{
    std::vector<std::string> all = overrides;
    if (!out.empty()) all.push_back("outputs.directory=\"" + out + "\"");
    pcqed::RunConfig config;
    try {
        config = pcqed::load_config(path, all);
    } catch (const std::exception& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    }
    const pcqed::RunSummary summary = pcqed::run(config);
    for (const auto& r : summary.rows) {
        if (!r.ok) fmt::print(stderr, "point {} {} {}: {}\n", r.point, r.method, r.route, r.error);
    }
    fmt::print("{} row(s), {} failed; summary in {}\n", summary.rows.size(), summary.failed,
               (config.outputs.directory / "summary.csv").string());
    return summary.exit_code();
}

int do_validate(const std::string& path, const std::vector<std::string>& overrides)
{
    pcqed::RunConfig config;
    try {
        config = pcqed::load_config(path, overrides);
    } catch (const std::exception& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    }
    const pcqed::ValidationReport report = pcqed::validate(config);
    for (const auto& n : report.notes) fmt::print("note: {}\n", n);
    for (const auto& e : report.errors) fmt::print(stderr, "error: {}\n", e);
    fmt::print("{}\n", report.ok() ? "configuration valid" : "configuration invalid");
    return report.ok() ? kExitOk : kExitConfig;
}

int do_compare(const std::string& ref, const std::string& test, double window)
{
    try {
        fmt::print("{:.6e}\n", pcqed::compare_files(ref, test, window));
    } catch (const pcqed::ConfigError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitFailed;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phonon-dressed cavity-QED emission spectra"};
    app.require_subcommand(1);

    std::string config_path, out_dir, ref_path, test_path;
    std::vector<std::string> overrides;
    double window = 62.8;

    auto* run = app.add_subcommand("run", "Execute a configuration (single point or sweep)");
    run->add_option("config", config_path, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Override a key: dotted.key=value")->take_all();
    run->add_option("--out", out_dir, "Output directory");

    auto* val = app.add_subcommand("validate", "Dry-run checks of a configuration");
    val->add_option("config", config_path, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
    val->add_option("--set", overrides, "Override a key: dotted.key=value")->take_all();

    auto* cmp = app.add_subcommand("compare", "Relative L2 error of a spectrum CSV against a reference CSV");
    cmp->add_option("ref", ref_path, "Reference spectrum CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("test", test_path, "Test spectrum CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("--window", window, "Integration half-width in rad/ps");

    auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return do_run(config_path, overrides, out_dir);
        if (*val) return do_validate(config_path, overrides);
        if (*cmp) return do_compare(ref_path, test_path, window);
        if (*defaults) {
            fmt::print("{}", pcqed::default_config_text());
            return kExitOk;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitFailed;
    }
    return kExitOk;
}
