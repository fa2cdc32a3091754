#pragma once

#include <span>
#include <vector>

#include "pfl/field.hpp"

namespace pfl {

/// Normalized histogram of per-sample intensity over [0, max I].
struct IntensityStatistics {
    std::vector<double> bin_centers;
    std::vector<double> pdf;  // integrates to 1 over the bins
    double bin_width = 0.0;
    double mean = 0.0;
    double g2 = 0.0;  // <I^2> / <I>^2
    std::size_t mode_bin = 0;
    double mode = 0.0;  // centre of the most populated bin
};

/// Intensity is I = n0 c eps0 |E|^2 / 2 for physical fields and |psi|^2 for
/// dimensionless ones. All fields share one histogram range.
IntensityStatistics intensity_statistics(std::span<const Field2D> fields, std::size_t n_bins = 100, double n0 = 1.0);
IntensityStatistics intensity_statistics(const Field2D& field, std::size_t n_bins = 100, double n0 = 1.0);

enum class CoherenceMethod { rotate_pair, ensemble };

/// Radially binned first-order coherence g1(dr).
struct CoherenceProfile {
    std::vector<double> dr;
    std::vector<double> g1;
    std::vector<std::size_t> counts;
};

/// rotate_pair: |sum psi(r) psi*(-r)| / sum |psi|^2 for pairs separated by
/// dr = 2|r| about the grid origin (one field). ensemble: |C(dr)| / C(0)
/// with C the ensemble-averaged periodic autocorrelation (two or more fields).
CoherenceProfile coherence_g1(std::span<const Field2D> fields, CoherenceMethod method);

/// Ring-averaged static structure factor S(k) = <|drho(k)|^2>_sig / <|drho(k)|^2>_ref,
/// where drho is the density minus its per-pixel ensemble mean. DC is excluded.
struct StructureFactor {
    std::vector<double> k;
    std::vector<double> s;
    std::vector<double> sigma;
    std::vector<std::size_t> modes;
};

inline constexpr std::size_t kMinStructureRealizations = 100;

StructureFactor structure_factor(std::span<const Field2D> signal, std::span<const Field2D> reference);

}  // namespace pfl
