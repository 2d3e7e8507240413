// io.hpp — CSV and JSON artifacts: spectra, populations, diagnostics records

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pcqed/spectra.hpp"

namespace pcqed::io {

// Two columns "omega_rad_per_ps,intensity", 13 significant digits.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& S);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

// Sidecar with method, frame, route, parameters, grids and warnings.
void write_spectrum_metadata(const std::filesystem::path& path, const Spectrum& S);

void write_population_csv(const std::filesystem::path& path, const TimeGrid& grid, const std::vector<double>& population);

// Flat record of named values and messages, written as one JSON object.
struct Record {
    std::map<std::string, std::string> text;
    std::map<std::string, double> values;
    std::vector<std::string> warnings;
};
void write_record_json(const std::filesystem::path& path, const Record& record);

} // namespace pcqed::io
