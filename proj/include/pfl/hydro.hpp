#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pfl/builders.hpp"
#include "pfl/field.hpp"
#include "pfl/medium.hpp"
#include "pfl/solver.hpp"

namespace pfl {

inline constexpr double kDefaultDensityFloor = 1e-3;

/// Madelung decomposition psi = sqrt(rho) exp(i phi).
///
/// Velocity follows the probability-current convention v = Im(psi* grad psi) / rho,
/// so a phase ramp exp(i k x) gives v = (k, 0) in rad/m (or 1/xi when
/// dimensionless). Where rho < floor * max(rho) the velocity is set to zero
/// and `valid` is 0.
struct FluidDiagnostics {
    Grid grid;
    std::vector<double> density;
    std::vector<double> phase;
    std::vector<double> vx;
    std::vector<double> vy;
    std::vector<std::uint8_t> valid;
    std::optional<double> xi;
    std::optional<double> z_nl;
    std::optional<double> c_s;
};

FluidDiagnostics madelung(const Field2D& field, double density_floor = kDefaultDensityFloor);

/// Fills xi, z_NL and the Bogoliubov sound speed sqrt(|g| rho / (n0 k0)) from
/// the peak density of `field`.
void attach_fluid_scales(FluidDiagnostics& diag, const Field2D& field, const MediumParams& medium);

struct Vortex {
    double x = 0.0;
    double y = 0.0;
    int charge = 0;  // -1 or +1
};

struct VortexSet {
    std::vector<Vortex> vortices;
    int total_winding() const;
};

/// Plaquette detector: sums wrapped phase differences counter-clockwise around
/// each 2x2 cell of the (non-wrapping) interior. Cells whose mean corner density is
/// below floor * max(rho), or with an exactly zero corner, are skipped. Positions are cell centres.
VortexSet detect_vortices(const Field2D& field, double density_floor = kDefaultDensityFloor);

using GridLoop = std::vector<std::pair<std::size_t, std::size_t>>;

/// Closed counter-clockwise loop along the boundary of [i0, i1] x [j0, j1].
GridLoop rectangle_loop(std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1);

/// Discrete line integral of the velocity around a closed loop of samples,
/// i.e. the sum of wrapped phase increments between consecutive samples.
double circulation(const Field2D& field, const GridLoop& loop);

/// Probe-based group-velocity measurement on a background fluid.
struct GroupVelocityConfig {
    double k_perp = 0.0;           // transverse wavevector of the probe along +x
    double probe_waist = 0.0;      // along x
    double probe_waist_y = -1.0;   // < 0: uniform along y (line probe)
    double probe_ratio = 1e-2;     // probe peak intensity / background peak intensity
    Point center{0.0, 0.0};
    // Only snapshots with z >= fit_start * L enter the slope fit.
    double fit_start = 0.5;
    // Maximum RMS fit residual relative to the fitted displacement range.
    double max_residual = 0.05;
};

struct GroupVelocitySample {
    double k_perp = 0.0;
    double v_g = 0.0;
    double v_g_stderr = 0.0;
    std::vector<double> z;             // snapshot positions used for the trace
    std::vector<double> displacement;  // centroid displacement at each z
};

/// Propagates the background with and without the probe, subtracts the
/// densities and tracks the x-centroid of |delta rho| versus z. For k != 0
/// only the half-period window ahead of the probe (in the direction of k) is
/// tracked, which isolates the co-propagating wavepacket; for k = 0 the
/// whole period is used. The slope of a least-squares line gives v_g in
/// transverse length per unit z.
GroupVelocitySample measure_group_velocity(const Field2D& background, const GroupVelocityConfig& config,
                                           const MediumParams& medium, const StepPlan& plan);

/// Same measurement with the background-only propagation supplied by the caller.
GroupVelocitySample measure_group_velocity(const Field2D& background, const PropagationRecord& background_run,
                                           const GroupVelocityConfig& config, const MediumParams& medium,
                                           const StepPlan& plan);

}  // namespace pfl
