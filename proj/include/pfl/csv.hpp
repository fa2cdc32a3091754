#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pfl/dispersion.hpp"
#include "pfl/gem.hpp"
#include "pfl/hydro.hpp"
#include "pfl/statistics.hpp"

namespace pfl {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

using CsvCell = std::variant<double, long long, std::string>;

/// Comma-separated table with a header row and '\n' line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows);

// Typed tables. Each returns the written path.
std::filesystem::path write_structure_factor_csv(const std::filesystem::path& path, const StructureFactor& sf);
std::filesystem::path write_dispersion_csv(const std::filesystem::path& path, const DispersionCurve& curve);
std::filesystem::path write_coherence_csv(const std::filesystem::path& path, const CoherenceProfile& profile);
std::filesystem::path write_intensity_csv(const std::filesystem::path& path, const IntensityStatistics& stats);
std::filesystem::path write_vortices_csv(const std::filesystem::path& path, const VortexSet& set);
/// (t, re, im, intensity) for one pulse trace.
std::filesystem::path write_trace_csv(const std::filesystem::path& path, std::span<const double> t,
                                      std::span<const Complex> e);

}  // namespace pfl
