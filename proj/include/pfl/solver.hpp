#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pfl/field.hpp"
#include "pfl/medium.hpp"
#include "pfl/snapshot.hpp"

namespace pfl {

enum class SplitScheme { symmetric_strang };

/// Axial stepping for one propagation.
struct StepPlan {
    std::size_t n_steps = 0;
    double dz = 0.0;
    SplitScheme scheme = SplitScheme::symmetric_strang;
    // Record a snapshot every this many steps; 0 disables snapshots.
    std::size_t snapshot_every = 0;

    double length() const { return static_cast<double>(n_steps) * dz; }

    /// dz = length / n_steps.
    static StepPlan for_length(double length, std::size_t n_steps, std::size_t snapshot_every = 0);
};

// Phase-per-step guard thresholds (radians).
inline constexpr double kPhaseWarn = 0.5;
inline constexpr double kPhaseAbort = 3.14159265358979323846;

struct PowerSample {
    double z = 0.0;
    double power = 0.0;
};

struct PropagationRecord {
    Field2D final_field;
    std::vector<Snapshot> snapshots;
    std::vector<PowerSample> power_trace;  // one entry per step plus z = 0
    std::size_t n_steps = 0;
    double dz = 0.0;
    double max_phase_per_step = 0.0;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

/// Applies the kinetic operator over dz/2: multiplier exp(-i |k|^2 dz / (4 n0 k0)).
Field2D kinetic_half_step(const Field2D& field, double dz, double k0, double n0);

/// Applies the local operator over dz with |E|^2 taken at step entry:
/// exp(i dz [k0 Re dn + (k0 / 2 n0) chi_eff |E|^2]) exp(-dz [alpha / 2 + k0 Im dn]),
/// with chi_eff = chi3 / (1 + I / I_sat) when saturation is enabled. The
/// potential is evaluated at `z_eval`.
Field2D nonlinear_step(const Field2D& field, double dz, const MediumParams& medium, double z_eval = 0.0);

/// Symmetric Strang propagation (kinetic half, local full, kinetic half).
/// Throws NumericalError on non-finite samples or when the phase per step
/// exceeds pi; warns above 0.5 rad.
PropagationRecord propagate(const Field2D& field, const MediumParams& medium, const StepPlan& plan);

/// Largest phase any mode or sample can pick up in one step of `plan`.
double max_phase_per_step(const Field2D& field, const MediumParams& medium, double dz);

enum class DensityReference { peak, mean };

struct DimensionlessField {
    Field2D psi;       // E / sqrt(rho(L)) on a grid measured in healing lengths
    double tau = 0.0;  // L / z_NL
    double xi = 0.0;   // m
    double z_nl = 0.0; // m
    double rho = 0.0;  // reference density |E|^2 used
};

/// z_NL = 1 / (|g| rho), xi = sqrt(z_NL / (n0 k0)), tau = L / z_NL.
DimensionlessField rescale_dimensionless(const Field2D& field, const MediumParams& medium,
                                         DensityReference reference = DensityReference::peak);

/// Medium whose propagation equation is the dimensionless GPE
/// i d(psi)/d(tau) = (-1/2 lap + |psi|^2) psi (k0 = n0 = 1, chi3 = -2).
MediumParams dimensionless_medium(double tau_length);

/// Writes `<stem>.txt` (step count, dz, max phase, wall time) and
/// `<stem>_power.csv` (z, power). Returns the written paths.
std::vector<std::filesystem::path> write_metrics(const std::filesystem::path& dir, const std::string& stem,
                                                 const PropagationRecord& record);

}  // namespace pfl
