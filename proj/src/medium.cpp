#include "pfl/medium.hpp"

#include <algorithm>
#include <cmath>

#include "pfl/error.hpp"

namespace pfl {

bool Potential::has_imaginary_part() const {
    return std::any_of(values.begin(), values.end(), [](const Complex& v) { return v.imag() != 0.0; });
}

double MediumParams::k0() const { return 2.0 * constants::pi / wavelength; }

double MediumParams::g() const { return k0() * chi3 / (2.0 * n0); }

double MediumParams::n2() const { return chi3 / (n0 * n0 * constants::c * constants::epsilon0); }

MediumParams MediumParams::from_n2(double wavelength, double n0, double n2, double alpha, double length) {
    MediumParams m;
    m.wavelength = wavelength;
    m.n0 = n0;
    m.chi3 = n2 * n0 * n0 * constants::c * constants::epsilon0;
    m.alpha = alpha;
    m.length = length;
    return m;
}

void MediumParams::validate() const {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw InvalidArgument("medium.lambda must be positive");
    if (!(n0 > 0.0) || !std::isfinite(n0)) throw InvalidArgument("medium.n0 must be positive");
    if (!std::isfinite(chi3)) throw InvalidArgument("medium.chi3 must be finite");
    if (!std::isfinite(alpha)) throw InvalidArgument("medium.alpha must be finite");
    if (!(length >= 0.0) || !std::isfinite(length)) throw InvalidArgument("medium.length must be non-negative");
    if (i_sat && !(*i_sat > 0.0)) throw InvalidArgument("medium.i_sat must be positive when set");
}

double intensity_from_field_sq(double field_sq, double n0) {
    return 0.5 * n0 * constants::c * constants::epsilon0 * field_sq;
}

double field_sq_from_intensity(double intensity, double n0) {
    return 2.0 * intensity / (n0 * constants::c * constants::epsilon0);
}

}  // namespace pfl
