#pragma once

#include <functional>
#include <optional>

#include "pfl/field.hpp"

namespace pfl {

namespace constants {
inline constexpr double c = 299792458.0;              // m/s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

/// Complex index perturbation on a grid. Real part shifts the index, a
/// positive imaginary part is loss and a negative one gain.
struct Potential {
    Grid grid;
    std::vector<Complex> values;

    bool empty() const { return values.empty(); }
    bool has_imaginary_part() const;
};

/// Kerr medium parameters.
///
/// Intensity and field are linked by I = n0 c eps0 |E|^2 / 2, which makes
/// n2 = chi3 / (n0^2 c eps0).
struct MediumParams {
    double wavelength = 780e-9;  // m
    double n0 = 1.0;
    double chi3 = 0.0;           // m^2/V^2, negative is defocusing
    double alpha = 0.0;          // 1/m, intensity absorption
    double length = 0.0;         // m
    std::optional<double> i_sat; // W/m^2, absent means pure Kerr
    Potential potential;
    // Optional axial modulation: delta_n(r, z) = potential(r) * z_profile(z).
    std::function<double(double)> z_profile;

    double k0() const;
    /// Signed interaction coefficient k0 chi3 / (2 n0), in m/V^2.
    double g() const;
    /// n2 in m^2/W under the intensity convention above.
    double n2() const;

    static MediumParams from_n2(double wavelength, double n0, double n2, double alpha, double length);

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

double intensity_from_field_sq(double field_sq, double n0);
double field_sq_from_intensity(double intensity, double n0);

}  // namespace pfl
