#include "pfl/builders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pfl/error.hpp"
#include "pfl/fft.hpp"
#include "pfl/log.hpp"
#include "pfl/rng.hpp"

namespace pfl {
namespace {

constexpr double kPi = std::numbers::pi;

double half_extent(const Grid& g) { return 0.5 * std::min(g.extent_x(), g.extent_y()); }

// Minimum-image displacement on a periodic axis of length `extent`.
double wrap_displacement(double d, double extent) { return d - extent * std::round(d / extent); }

void check_inside(const Grid& g, Point p, const char* what) {
    if (std::abs(p.first) > 0.5 * g.extent_x() || std::abs(p.second) > 0.5 * g.extent_y())
        throw InvalidArgument(std::string(what) + ": center lies outside the grid extent");
}

void warn_near_boundary(const Grid& g, Point center, double size, const char* what) {
    const double room = std::min(0.5 * g.extent_x() - std::abs(center.first),
                                 0.5 * g.extent_y() - std::abs(center.second));
    if (room < 4.0 * size)
        warn(std::string(what) + ": structure of size " + std::to_string(size) + " m lies within 4 widths of the " +
             "periodic boundary");
}

}  // namespace

Field2D gaussian_beam(const Grid& grid, double waist, double power, double n0, Point center) {
    const double min_waist = 4.0 * std::max(grid.dx(), grid.dy());
    if (!(waist >= min_waist))
        throw InvalidArgument("gaussian_beam: waist " + std::to_string(waist) + " m is unresolved (needs >= " +
                              std::to_string(min_waist) + " m)");
    if (waist > half_extent(grid))
        throw InvalidArgument("gaussian_beam: waist exceeds half the grid extent (periodic wraparound)");
    if (!(power >= 0.0)) throw InvalidArgument("gaussian_beam: power must be non-negative");
    if (!(n0 > 0.0)) throw InvalidArgument("gaussian_beam: n0 must be positive");
    check_inside(grid, center, "gaussian_beam");
    warn_near_boundary(grid, center, waist, "gaussian_beam");

    std::vector<Complex> values(grid.size());
    double shape_integral = 0.0;
    for (std::size_t j = 0; j < grid.ny(); ++j)
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double dx = wrap_displacement(grid.x(i) - center.first, grid.extent_x());
            const double dy = wrap_displacement(grid.y(j) - center.second, grid.extent_y());
            const double a = std::exp(-(dx * dx + dy * dy) / (waist * waist));
            values[grid.index(i, j)] = a;
            shape_integral += a * a;
        }
    shape_integral *= grid.cell_area();
    const double peak = std::sqrt(field_sq_from_intensity(power, n0) / shape_integral);
    for (auto& v : values) v *= peak;
    return Field2D(grid, std::move(values));
}

Field2D plane_wave(const Grid& grid, double intensity, double n0) {
    if (!(intensity >= 0.0)) throw InvalidArgument("plane_wave: intensity must be non-negative");
    if (!(n0 > 0.0)) throw InvalidArgument("plane_wave: n0 must be positive");
    const double amplitude = std::sqrt(field_sq_from_intensity(intensity, n0));
    return Field2D(grid, std::vector<Complex>(grid.size(), Complex(amplitude, 0.0)));
}

Field2D speckle(const Grid& grid, double correlation_length, double mean_intensity, std::uint64_t seed, double n0) {
    if (!(correlation_length >= 2.0 * std::max(grid.dx(), grid.dy())))
        throw InvalidArgument("speckle: correlation length must be at least two grid cells");
    if (!(mean_intensity >= 0.0)) throw InvalidArgument("speckle: mean intensity must be non-negative");

    auto engine = make_engine(derive_seed(seed, Stream::speckle));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    std::vector<Complex> spectrum(grid.size());
    double filter_power = 0.0;
    for (std::size_t j = 0; j < grid.ny(); ++j)
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double k2 = grid.kx(i) * grid.kx(i) + grid.ky(j) * grid.ky(j);
            const double a = std::exp(-k2 * correlation_length * correlation_length / 4.0);
            const double re = normal(engine);
            const double im = normal(engine);
            spectrum[grid.index(i, j)] = Complex(re, im) * a;
            filter_power += a * a;
        }
    Fft2d(grid).inverse(spectrum);

    // Unitary inverse transform: <|E(r)|^2> = sum |A_k|^2 / N.
    const double expected = filter_power / static_cast<double>(grid.size());
    const double scale = std::sqrt(field_sq_from_intensity(mean_intensity, n0) / expected);
    for (auto& v : spectrum) v *= scale;
    return Field2D(grid, std::move(spectrum));
}

Field2D add_white_noise(const Field2D& field, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("add_white_noise: sigma must be non-negative");
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, sigma * std::sqrt(0.5));
    Field2D out = field;
    for (auto& v : out.values()) {
        const double re = normal(engine);
        const double im = normal(engine);
        v += Complex(re, im);
    }
    return out;
}

Field2D imprint_vortex(const Field2D& field, const VortexImprint& vortex) {
    const Grid& g = field.grid();
    if (vortex.charge == 0 && !vortex.allow_zero_charge)
        throw InvalidArgument("imprint_vortex: |charge| must be >= 1");
    check_inside(g, vortex.center, "imprint_vortex");
    const double core = vortex.core_width.value_or(4.0 * std::max(g.dx(), g.dy()));
    if (!(core > 0.0)) throw InvalidArgument("imprint_vortex: core width must be positive");
    if (vortex.charge == 0) return field;

    Field2D out = field;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double dx = g.x(i) - vortex.center.first;
            const double dy = g.y(j) - vortex.center.second;
            const double r = std::hypot(dx, dy);
            const double theta = std::atan2(dy, dx);
            out(i, j) *= std::tanh(r / core) * std::polar(1.0, vortex.charge * theta);
        }
    return out;
}

Field2D imprint_dark_stripe(const Field2D& field, const DarkStripe& stripe) {
    if (!(stripe.contrast >= 0.0 && stripe.contrast <= 1.0))
        throw InvalidArgument("imprint_dark_stripe: contrast must lie in [0, 1]");
    if (field.max_density() == 0.0) throw InvalidArgument("imprint_dark_stripe: field is identically zero");
    const Grid& g = field.grid();
    const double width = stripe.width.value_or(4.0 * std::max(g.dx(), g.dy()));
    if (!(width > 0.0)) throw InvalidArgument("imprint_dark_stripe: width must be positive");

    const double nx = std::cos(stripe.angle);
    const double ny = std::sin(stripe.angle);
    const double c = stripe.contrast;
    Field2D out = field;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double s = g.x(i) * nx + g.y(j) * ny - stripe.position;
            const double t = std::tanh(s / width);
            const double amplitude = 1.0 - c + c * std::abs(t);
            out(i, j) *= std::polar(amplitude, 0.5 * kPi * c * t);
        }
    return out;
}

double ProbeBeam::k_perp() const { return 2.0 * kPi / wavelength * std::sin(angle); }

double probe_angle_for(double k_perp, double wavelength) {
    const double k0 = 2.0 * kPi / wavelength;
    if (std::abs(k_perp) > k0) throw InvalidArgument("probe_angle_for: |k_perp| exceeds k0");
    return std::asin(k_perp / k0);
}

Field2D add_probe(const Field2D& field, const ProbeBeam& probe) {
    const Grid& g = field.grid();
    if (!(probe.power >= 0.0)) throw InvalidArgument("add_probe: power must be non-negative");
    if (!(probe.waist > 0.0)) throw InvalidArgument("add_probe: waist must be positive");
    if (!(probe.wavelength > 0.0) || !(probe.n0 > 0.0))
        throw InvalidArgument("add_probe: wavelength and n0 must be positive");
    const double k = probe.k_perp();
    if (std::abs(k) >= g.nyquist_x())
        throw InvalidArgument("add_probe: k_perp = " + std::to_string(k) + " rad/m aliases (Nyquist " +
                              std::to_string(g.nyquist_x()) + " rad/m)");
    check_inside(g, probe.center, "add_probe");
    if (probe.power == 0.0) return field;

    const bool line = probe.waist_y < 0.0;
    const double wy = probe.waist_y > 0.0 ? probe.waist_y : probe.waist;
    std::vector<Complex> shape(g.size());
    double shape_integral = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double dx = wrap_displacement(g.x(i) - probe.center.first, g.extent_x());
            const double dy = wrap_displacement(g.y(j) - probe.center.second, g.extent_y());
            const double ex = dx * dx / (probe.waist * probe.waist);
            const double ey = line ? 0.0 : dy * dy / (wy * wy);
            const double a = std::exp(-(ex + ey));
            shape[g.index(i, j)] = std::polar(a, k * dx);
            shape_integral += a * a;
        }
    shape_integral *= g.cell_area();
    const double peak = std::sqrt(field_sq_from_intensity(probe.power, probe.n0) / shape_integral);

    Field2D out = field;
    auto values = out.values();
    for (std::size_t n = 0; n < values.size(); ++n) values[n] += peak * shape[n];
    return out;
}

Potential build_potential(const Grid& grid, const PotentialSpec& spec) {
    Potential pot{grid, std::vector<Complex>(grid.size())};
    switch (spec.kind) {
        case PotentialKind::uniform:
            std::fill(pot.values.begin(), pot.values.end(), spec.amplitude);
            break;

        case PotentialKind::gaussian_defect: {
            if (!(spec.waist > 0.0)) throw InvalidArgument("build_potential: gaussian_defect needs a positive waist");
            check_inside(grid, spec.center, "build_potential");
            warn_near_boundary(grid, spec.center, spec.waist, "build_potential");
            for (std::size_t j = 0; j < grid.ny(); ++j)
                for (std::size_t i = 0; i < grid.nx(); ++i) {
                    const double dx = wrap_displacement(grid.x(i) - spec.center.first, grid.extent_x());
                    const double dy = wrap_displacement(grid.y(j) - spec.center.second, grid.extent_y());
                    pot.values[grid.index(i, j)] =
                        spec.amplitude * std::exp(-(dx * dx + dy * dy) / (spec.waist * spec.waist));
                }
            break;
        }

        case PotentialKind::lattice: {
            // Finest fringe of the three-beam pattern is period / sqrt(3).
            const double finest = spec.period / std::sqrt(3.0);
            if (!(finest >= 4.0 * std::max(grid.dx(), grid.dy())))
                throw InvalidArgument("build_potential: lattice period is unresolved by the grid");
            const double q = 2.0 * kPi / spec.period;
            const double qx[3] = {q, q * std::cos(2.0 * kPi / 3.0), q * std::cos(4.0 * kPi / 3.0)};
            const double qy[3] = {0.0, q * std::sin(2.0 * kPi / 3.0), q * std::sin(4.0 * kPi / 3.0)};
            for (std::size_t j = 0; j < grid.ny(); ++j)
                for (std::size_t i = 0; i < grid.nx(); ++i) {
                    const double x = grid.x(i) - spec.center.first;
                    const double y = grid.y(j) - spec.center.second;
                    Complex sum = 0.0;
                    for (int b = 0; b < 3; ++b) sum += std::polar(1.0, qx[b] * x + qy[b] * y);
                    const double intensity = std::norm(sum) / 9.0;
                    pot.values[grid.index(i, j)] = spec.amplitude * (spec.honeycomb ? 1.0 - intensity : intensity);
                }
            break;
        }

        case PotentialKind::pt_dimer: {
            if (!(spec.waist > 0.0)) throw InvalidArgument("build_potential: pt_dimer needs a positive waist");
            const double s = 0.5 * spec.separation;
            auto well = [&](double x, double y) { return std::exp(-(x * x + y * y) / (spec.waist * spec.waist)); };
            // Even/odd parts are formed from the mirrored column so that
            // delta_n(-x, y) = conj(delta_n(x, y)) holds bit for bit on the torus.
            std::vector<double> left(grid.size()), right(grid.size());
            for (std::size_t j = 0; j < grid.ny(); ++j)
                for (std::size_t i = 0; i < grid.nx(); ++i) {
                    const double y = grid.y(j) - spec.center.second;
                    left[grid.index(i, j)] = well(grid.x(i) + s, y);
                    right[grid.index(i, j)] = well(grid.x(i) - s, y);
                }
            for (std::size_t j = 0; j < grid.ny(); ++j)
                for (std::size_t i = 0; i < grid.nx(); ++i) {
                    const std::size_t m = (grid.nx() - i) % grid.nx();
                    const std::size_t a = grid.index(i, j);
                    const std::size_t b = grid.index(m, j);
                    const double even = 0.5 * ((left[a] + right[a]) + (left[b] + right[b]));
                    const double odd = 0.5 * ((right[a] - left[a]) - (right[b] - left[b]));
                    pot.values[a] = Complex(spec.amplitude.real() * even, spec.gain_loss * odd);
                }
            break;
        }

        case PotentialKind::custom_samples:
            if (spec.samples.size() != grid.size())
                throw InvalidArgument("build_potential: custom_samples has " + std::to_string(spec.samples.size()) +
                                      " samples, grid needs " + std::to_string(grid.size()));
            pot.values = spec.samples;
            break;
    }
    for (const auto& v : pot.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidArgument("build_potential: non-finite potential sample");
    return pot;
}

double beam_power(const Field2D& field, double n0) {
    return intensity_from_field_sq(field.norm_integral(), n0);
}

}  // namespace pfl
