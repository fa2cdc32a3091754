#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfl/gem.hpp"
#include "pfl/grid.hpp"
#include "pfl/medium.hpp"

namespace pfl {

struct RunSection {
    std::string scenario;
    std::uint64_t seed = 1;
    std::string output;  // empty: chosen by the runner
    bool emit_snapshots = false;
    bool emit_csv = true;
    bool emit_pgm = false;
    bool operator==(const RunSection&) const = default;
};

struct GridSection {
    std::size_t nx = 128;
    std::size_t ny = 128;
    double dx = 1.0;  // m, or healing lengths when dimensionless
    double dy = 1.0;
    bool operator==(const GridSection&) const = default;
};

/// `units = dimensionless` runs the rescaled equation (length is tau, grid in
/// healing lengths, densities in units of the reference density) and ignores
/// lambda, n0 and n2.
struct MediumSection {
    std::string units = "dimensionless";
    double lambda = 780e-9;  // m
    double n0 = 1.0;
    double n2 = 0.0;      // m^2/W, negative is defocusing
    double alpha = 0.0;   // 1/m
    double length = 1.0;  // m, or tau
    double i_sat = 0.0;   // W/m^2, 0 disables saturation
    bool operator==(const MediumSection&) const = default;
};

struct PotentialSection {
    std::string kind = "none";  // none, gaussian, lattice, pt_dimer
    double re = 0.0;
    double im = 0.0;
    double waist = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double separation = 0.0;
    double gain_loss = 0.0;
    double period = 0.0;
    bool honeycomb = true;
    bool operator==(const PotentialSection&) const = default;
};

struct PlanSection {
    std::size_t steps = 100;
    std::size_t snapshot_every = 0;
    bool operator==(const PlanSection&) const = default;
};

/// Initial field. `intensity` is W/m^2 (physical) or |psi|^2 (dimensionless):
/// the level of a uniform or plane profile, the peak of a dimensionless
/// Gaussian and the mean of a speckle.
struct BeamSection {
    std::string profile = "uniform";  // uniform, gaussian, speckle
    double intensity = 1.0;
    double power = 1.0;  // W, physical Gaussian only
    double waist = 10.0;
    double correlation = 2.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double noise = 0.0;  // rms white-noise amplitude relative to the peak amplitude
    bool operator==(const BeamSection&) const = default;
};

struct ProbeSection {
    std::vector<double> k_values{0.1, 0.15, 0.2, 0.25, 0.3};  // 1/m or 1/xi
    double waist = 10.0;
    double ratio = 1e-4;
    double fit_start = 0.5;
    double max_residual = 0.05;
    std::vector<double> densities{1.0, 2.15, 4.64, 10.0};  // sound-scaling backgrounds
    double waist_xi = 6.0;                                // sound-scaling waist in healing lengths
    bool operator==(const ProbeSection&) const = default;
};

struct StatisticsSection {
    std::size_t bins = 100;
    std::vector<double> taus{0.0, 1.0, 3.0, 6.0};  // record distances, tau or m
    bool operator==(const StatisticsSection&) const = default;
};

struct StructureSection {
    std::size_t realizations = 200;
    double noise = 0.02;  // rms noise amplitude relative to the background amplitude
    bool operator==(const StructureSection&) const = default;
};

struct VorticesSection {
    std::string mode = "imprint";  // imprint, stripe
    std::vector<int> charges{1};
    std::vector<double> x{0.0};
    std::vector<double> y{0.0};
    double core = 0.0;  // 0: default core width
    double stripe_position = 0.0;
    double stripe_angle = 0.0;
    double stripe_contrast = 1.0;
    double stripe_width = 0.0;
    double density_floor = 1e-3;
    bool operator==(const VorticesSection&) const = default;
};

struct GemSection {
    double g = 1.0;
    double density = 1.0;
    double eta = 100.0;
    std::vector<double> flips{4.0};
    std::vector<std::pair<double, double>> coupling_off;
    double z_extent = 1.0;
    std::size_t nz = 2000;
    double t_extent = 10.0;
    std::size_t nt = 1001;
    double decay = 0.0;
    std::size_t record_nz = 256;
    std::size_t record_nt = 256;
    std::vector<double> pulse_centers{2.0};
    std::vector<double> pulse_widths{0.2};
    std::vector<double> pulse_amplitudes{1.0};
    std::vector<std::string> pulse_labels{"A"};
    std::vector<double> ratios{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    std::string mode = "filo";
    double tau = 3.0;
    double tau2 = 6.0;
    double window_widths = 6.0;
    bool operator==(const GemSection&) const = default;
};

struct RunConfig {
    RunSection run;
    GridSection grid;
    MediumSection medium;
    PotentialSection potential;
    PlanSection plan;
    BeamSection beam;
    ProbeSection probe;
    StatisticsSection statistics;
    StructureSection structure;
    VorticesSection vortices;
    GemSection gem;
    bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& scenario_names();

/// Parses INI-style text: `[section]`, `key = value`, `#` to end of line is a
/// comment. Lists are comma separated, intervals are `a:b`. Unknown sections
/// or keys, duplicates and malformed values raise ConfigError with the line
/// number; the result is then checked by validate_config unless `check` is
/// false.
RunConfig parse_config(std::string_view text, bool check = true);
RunConfig load_config(const std::string& path, bool check = true);

/// Every key of every section, in canonical order.
std::string serialize_config(const RunConfig& config);

/// Semantic checks. Errors name the offending key as `section.key`.
void validate_config(const RunConfig& config);

Grid grid_from(const RunConfig& config);
/// Physical or dimensionless medium with the configured potential attached.
MediumParams medium_from(const RunConfig& config);
GemConfig gem_from(const RunConfig& config);
PulseTrain pulses_from(const RunConfig& config);

}  // namespace pfl
