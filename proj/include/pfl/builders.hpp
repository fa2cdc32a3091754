#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "pfl/field.hpp"
#include "pfl/medium.hpp"

namespace pfl {

using Point = std::pair<double, double>;

/// E(r) = E_peak exp(-r^2/w0^2) centred at `center`. E_peak is fixed so the
/// discrete power sum of I = n0 c eps0 |E|^2 / 2 equals `power`.
Field2D gaussian_beam(const Grid& grid, double waist, double power, double n0, Point center = {0.0, 0.0});

/// Constant amplitude with |E|^2 = 2 I / (n0 c eps0), zero phase.
Field2D plane_wave(const Grid& grid, double intensity, double n0);

/// Fully developed speckle: circular complex Gaussian field whose angular
/// spectrum has amplitude exp(-k^2 l^2 / 4), i.e. a 1/e^2 power width of 2/l.
/// The ensemble-mean intensity is `mean_intensity`; a single realization is
/// not renormalized.
Field2D speckle(const Grid& grid, double correlation_length, double mean_intensity, std::uint64_t seed,
                double n0 = 1.0);

struct VortexImprint {
    int charge = 1;
    Point center{0.0, 0.0};
    // Core width of the tanh amplitude factor; 4 dx when absent.
    std::optional<double> core_width;
    bool allow_zero_charge = false;
};

/// Multiplies by exp(i q theta) tanh(|r - c| / core).
Field2D imprint_vortex(const Field2D& field, const VortexImprint& vortex);

struct DarkStripe {
    // Signed distance of the stripe line from the origin along its normal.
    double position = 0.0;
    // Direction of the normal, measured from +x.
    double angle = 0.0;
    double contrast = 1.0;
    // Width of the tanh profile; 4 max(dx, dy) when absent.
    std::optional<double> width;
};

/// Amplitude factor 1 - c + c |tanh(s/w)| and phase (pi c / 2) tanh(s/w),
/// where s is the signed distance from the stripe line.
Field2D imprint_dark_stripe(const Field2D& field, const DarkStripe& stripe);

struct ProbeBeam {
    double waist = 0.0;
    // Waist across the tilt direction. Zero means isotropic; a negative value
    // makes the probe uniform along y (a line probe).
    double waist_y = 0.0;
    double power = 0.0;
    // Tilt in the x-z plane; the transverse wavevector is k0 sin(angle).
    double angle = 0.0;
    Point center{0.0, 0.0};
    double wavelength = 780e-9;
    double n0 = 1.0;

    double k_perp() const;
};

/// Adds a Gaussian probe with phase ramp exp(i k_perp (x - x_c)). The probe
/// amplitude is normalized so its own discrete power equals `power`.
Field2D add_probe(const Field2D& field, const ProbeBeam& probe);

/// Inverse of k_perp = k0 sin(angle) for building probes from a wavevector.
double probe_angle_for(double k_perp, double wavelength);

enum class PotentialKind { uniform, gaussian_defect, lattice, pt_dimer, custom_samples };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::uniform;
    Complex amplitude{0.0, 0.0};
    // gaussian_defect and pt_dimer
    double waist = 0.0;
    Point center{0.0, 0.0};
    // pt_dimer: the two wells sit at x = +/- separation/2; the imaginary
    // amplitude is taken from `gain_loss` and is odd in x.
    double separation = 0.0;
    double gain_loss = 0.0;
    // lattice: transverse period 2 pi / |q| of each of the three beams.
    double period = 0.0;
    bool honeycomb = true;
    std::vector<Complex> samples;
};

/// Samples a complex index perturbation. The lattice kind interferes three
/// plane waves with wavevectors at 0, 120 and 240 degrees; the honeycomb
/// variant puts the index maxima on the dark sites of the pattern.
Potential build_potential(const Grid& grid, const PotentialSpec& spec);

/// Adds independent circular complex Gaussian noise with <|dE|^2> = sigma^2
/// to every sample.
Field2D add_white_noise(const Field2D& field, double sigma, std::uint64_t seed);

/// Sum of intensity over the grid, I dx dy, in W for physical fields.
double beam_power(const Field2D& field, double n0);

}  // namespace pfl
