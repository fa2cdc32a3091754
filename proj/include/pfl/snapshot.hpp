#pragma once

#include <filesystem>
#include <span>

#include "pfl/field.hpp"

namespace pfl {

/// Binary field snapshot ("PFL1"): magic, then nx, ny as uint64, dx, dy as
/// float64, unit tag as uint64 (0 physical, 1 dimensionless) and z as float64,
/// followed by nx*ny interleaved (re, im) float64 samples in row-major order.
/// Every number is little-endian.
struct Snapshot {
    Field2D field;
    double z = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const Field2D& field, double z);
Snapshot read_snapshot(const std::filesystem::path& path);

/// 16-bit binary PGM (P5) of a density map, scaled so the frame maximum maps to
/// 65535. The scale is written to `<path>.scale`. Returns both paths.
std::pair<std::filesystem::path, std::filesystem::path> write_density_pgm(const std::filesystem::path& path,
                                                                          std::span<const double> density,
                                                                          std::size_t width, std::size_t height);

}  // namespace pfl
