#pragma once

#include <span>
#include <vector>

#include "pfl/hydro.hpp"

namespace pfl {

struct DispersionPoint {
    double k = 0.0;
    double v_g = 0.0;
    double omega = 0.0;
    bool extrapolated = false;  // the k = 0 anchor added when the samples start above zero
};

/// Bogoliubov fit Omega(k) = sqrt((k^2/2m)(k^2/2m + 2 mu)) with m = n0 k0 fixed.
struct BogoliubovFit {
    double mu = 0.0;
    double mu_stderr = 0.0;
    double c_s = 0.0;           // sqrt(mu / m)
    double c_s_ci = 0.0;        // 95 % half-width
    double xi = 0.0;            // 1 / sqrt(m mu); infinite when mu = 0
    double xi_ci = 0.0;
    double rms_residual = 0.0;
    std::size_t iterations = 0;
};

struct DispersionCurve {
    std::vector<DispersionPoint> points;
    BogoliubovFit fit;
};

/// Omega(k) = integral of v_g dk by the trapezoid rule, anchored at Omega(0) = 0.
/// When the first sample has k > 0 the anchor is added with v_g extrapolated
/// linearly from the first two samples. Requires at least 5 samples with
/// strictly increasing k >= 0. `mass` is n0 k0 (1 for dimensionless runs).
DispersionCurve dispersion_from_group_velocity(std::span<const GroupVelocitySample> samples, double mass);

/// Least-squares Bogoliubov fit of (k, Omega) pairs.
BogoliubovFit fit_bogoliubov(std::span<const double> k, std::span<const double> omega, double mass);

struct SoundScalingOptions {
    // Probe wavevectors in units of 1/xi at each density.
    std::vector<double> k_xi{0.1, 0.15, 0.2, 0.25, 0.3};
    GroupVelocityConfig probe;  // k_perp is overwritten
    // Probe waist in units of xi at the highest density; overrides probe.probe_waist when > 0.
    double waist_xi = 0.0;
    UnitTag tag = UnitTag::physical;
};

struct SoundScalingMember {
    double density = 0.0;  // background |E|^2
    double xi = 0.0;
    DispersionCurve curve;
};

struct SoundScalingResult {
    std::vector<SoundScalingMember> members;
    double exponent = 0.0;     // slope of log c_s against log rho
    double exponent_ci = 0.0;  // 95 % half-width
};

/// Measures c_s on uniform backgrounds of each density (field |E|^2, or
/// |psi|^2 for dimensionless media) and fits c_s proportional to rho^p.
/// Members run on up to `jobs` threads; the result does not depend on `jobs`.
SoundScalingResult sound_speed_scaling(const Grid& grid, std::span<const double> densities,
                                       const MediumParams& medium, const StepPlan& plan,
                                       const SoundScalingOptions& options, unsigned jobs = 1);

/// Student-t 97.5 % quantile for `dof` degrees of freedom.
double student_t975(std::size_t dof);

}  // namespace pfl
