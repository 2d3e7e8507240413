// io.cpp — CSV and JSON artifacts: spectra, populations, diagnostics records

#include "pcqed/io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pcqed/errors.hpp"

namespace pcqed::io {

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    return out;
}

// JSON has no representation for non-finite numbers; they are written as null.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

} // namespace

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& S)
{
    std::ofstream out = open_output(path);
    out << "omega_rad_per_ps,intensity\n";
    for (std::size_t k = 0; k < S.omega.size(); ++k) out << fmt::format("{:.12e},{:.12e}\n", S.omega[k], S.S[k]);
}

Spectrum read_spectrum_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    Spectrum S;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            const double w = std::stod(line.substr(0, comma));
            const double v = std::stod(line.substr(comma + 1));
            S.omega.push_back(w);
            S.S.push_back(v);
        } catch (const std::logic_error&) {
            if (lineno == 1) continue;   // header
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number");
        }
    }
    for (std::size_t k = 1; k < S.omega.size(); ++k) {
        if (!(S.omega[k] > S.omega[k - 1])) throw ConfigError(path.string() + ": omega column is not increasing");
    }
    return S;
}

void write_spectrum_metadata(const std::filesystem::path& path, const Spectrum& S)
{
    nlohmann::json j;
    j["method"] = S.method;
    j["frame"] = S.frame;
    j["route"] = S.route;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : S.params) params[k] = number(v);
    j["params"] = params;
    j["grid"] = {{"points", S.omega.size()},
                 {"omega_step", number(S.step())},
                 {"t_max", number(S.t_max)},
                 {"tau_max", number(S.tau_max)},
                 {"dtau", number(S.dtau)},
                 {"windowed", S.windowed}};
    j["band_integral"] = number(S.band_integral);
    j["zero_lag"] = number(S.zero_lag);
    j["warnings"] = S.warnings;
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_population_csv(const std::filesystem::path& path, const TimeGrid& grid, const std::vector<double>& population)
{
    std::ofstream out = open_output(path);
    out << "t_ps,exciton_population\n";
    for (std::size_t i = 0; i < population.size(); ++i) out << fmt::format("{:.12e},{:.12e}\n", grid.at(i), population[i]);
}

void write_record_json(const std::filesystem::path& path, const Record& record)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : record.text) j[k] = v;
    for (const auto& [k, v] : record.values) j[k] = number(v);
    j["warnings"] = record.warnings;
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

} // namespace pcqed::io
