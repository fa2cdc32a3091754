#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pfl/builders.hpp"
#include "pfl/error.hpp"
#include "pfl/fft.hpp"
#include "pfl/log.hpp"
#include "pfl/solver.hpp"

using namespace pfl;

namespace {

constexpr double kPi = std::numbers::pi;

double l2_distance(const Field2D& a, const Field2D& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += std::norm(a.values()[n] - b.values()[n]);
    return std::sqrt(s * a.grid().cell_area());
}

// Smooth defocusing flow in healing-length units: uniform fluid with a bump
// and a gentle phase modulation.
Field2D smooth_fluid(const Grid& g) {
    Field2D f(g, UnitTag::dimensionless);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.x(i), y = g.y(j);
            const double bump = 0.4 * std::exp(-(x * x + y * y) / 16.0);
            f(i, j) = std::polar(1.0 + bump, 0.3 * std::sin(2.0 * kPi * x / g.extent_x()));
        }
    return f;
}

}  // namespace

TEST_CASE("kinetic_half_step") {
    const double lambda = 780e-9, n0 = 1.0;
    const double k0 = 2.0 * kPi / lambda;

    SUBCASE("plane wave is unchanged") {
        const Grid g = make_grid(64, 64, 5e-6, 5e-6);
        const Field2D f = plane_wave(g, 1e4, n0);
        const Field2D out = kinetic_half_step(f, 1e-3, k0, n0);
        for (std::size_t n = 0; n < f.size(); ++n) CHECK(std::abs(out.values()[n] - f.values()[n]) < 1e-14 * std::abs(f.values()[n]));
    }

    SUBCASE("single spectral mode: pure phase with the expected sign") {
        const Grid g = make_grid(64, 64, 5e-6, 5e-6);
        Field2D f(g);
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) f(i, j) = std::polar(1.0, 3.0 * g.dkx() * g.x(i));
        const double dz = 2e-3;
        const Field2D out = kinetic_half_step(f, dz, k0, n0);
        const double k2 = 9.0 * g.dkx() * g.dkx();
        const Complex expected_factor = std::polar(1.0, -k2 * dz / (4.0 * n0 * k0));
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(std::abs(out.values()[n]) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(out.values()[n] - f.values()[n] * expected_factor) < 1e-12);
        }
    }

    SUBCASE("Gaussian beam broadens to w0 sqrt(2) after one Rayleigh length") {
        const Grid g = make_grid(256, 256, 6e-6, 6e-6);
        const double w0 = 100e-6;
        const double zr = kPi * w0 * w0 / lambda;
        CHECK(zr == doctest::Approx(40.27e-3).epsilon(1e-3));
        Field2D f = gaussian_beam(g, w0, 1.0, n0);
        const int halves = 400;
        for (int s = 0; s < halves; ++s) f = kinetic_half_step(f, 2.0 * zr / halves, k0, n0);
        const BeamWidth w = second_moment_width(f);
        CHECK(w.wx == doctest::Approx(w0 * std::sqrt(2.0)).epsilon(0.005));
        CHECK(w.wy == doctest::Approx(w0 * std::sqrt(2.0)).epsilon(0.005));
    }
}

TEST_CASE("nonlinear_step") {
    const Grid g = make_grid(32, 32, 5e-6, 5e-6);

    SUBCASE("linear lossless medium is the identity") {
        MediumParams m;
        const Field2D f = gaussian_beam(g, 30e-6, 1.0, 1.0);
        const Field2D out = nonlinear_step(f, 1e-3, m);
        CHECK(std::equal(f.values().begin(), f.values().end(), out.values().begin()));
    }

    SUBCASE("plane wave self-phase modulation is a global phase") {
        MediumParams m;
        m.chi3 = -1e-9;
        const Field2D f = plane_wave(g, 1e4, 1.0);
        const Field2D out = nonlinear_step(f, 1e-2, m);
        const double rho = f.max_density();
        const double expected_phase = 1e-2 * m.k0() / 2.0 * m.chi3 * rho;
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(std::norm(out.values()[n]) == doctest::Approx(rho).epsilon(1e-14));
            CHECK(std::abs(out.values()[n] - f.values()[n] * std::polar(1.0, expected_phase)) < 1e-9 * std::sqrt(rho));
        }
    }

    SUBCASE("absorption over one step") {
        MediumParams m;
        m.alpha = 10.0;
        const Field2D f = gaussian_beam(g, 30e-6, 1.0, 1.0);
        const Field2D out = nonlinear_step(f, 0.01, m);
        CHECK(beam_power(out, 1.0) / beam_power(f, 1.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
        CHECK(std::exp(-0.1) == doctest::Approx(0.904837).epsilon(1e-6));
    }

    SUBCASE("saturable nonlinearity reduces the phase by 1 + I/I_sat") {
        MediumParams m;
        m.chi3 = -1e-9;
        const double intensity = 3e4;
        m.i_sat = 1e4;
        const Field2D f = plane_wave(g, intensity, 1.0);
        const Field2D out = nonlinear_step(f, 1e-2, m);
        const double expected = 1e-2 * m.k0() / 2.0 * m.chi3 / (1.0 + intensity / 1e4) * f.max_density();
        CHECK(std::abs(out.values()[7] - f.values()[7] * std::polar(1.0, expected)) < 1e-9 * std::abs(f.values()[7]));
    }

    SUBCASE("gain above 10x per step is flagged") {
        MediumParams m;
        m.potential = build_potential(g, {.kind = PotentialKind::uniform, .amplitude = {0.0, -1e-4}});
        const Field2D f = plane_wave(g, 1.0, 1.0);
        ScopedWarningCapture capture;
        nonlinear_step(f, 1e-2, m);
        CHECK(capture.contains("gain"));
    }
}

TEST_CASE("propagate") {
    SUBCASE("zero steps returns the input") {
        const Grid g = make_grid(16, 16, 1.0, 1.0);
        const Field2D f = smooth_fluid(g);
        const auto rec = propagate(f, dimensionless_medium(1.0), StepPlan::for_length(1.0, 0));
        CHECK(std::equal(f.values().begin(), f.values().end(), rec.final_field.values().begin()));
        CHECK(rec.power_trace.size() == 1);
    }

    SUBCASE("conservative defocusing run keeps power to 1e-10 over 1000 steps") {
        const Grid g = make_grid(64, 64, 0.5, 0.5);
        MediumParams m = dimensionless_medium(5.0);
        m.potential = build_potential(g, {.kind = PotentialKind::gaussian_defect, .amplitude = {0.5, 0.0}, .waist = 3.0});
        const Field2D f = smooth_fluid(g);
        const auto rec = propagate(f, m, StepPlan::for_length(5.0, 1000));
        const double p0 = rec.power_trace.front().power;
        for (const auto& p : rec.power_trace) CHECK(std::abs(p.power - p0) <= 1e-10 * p0);
        CHECK(rec.final_field.norm_integral() == doctest::Approx(f.norm_integral()).epsilon(1e-10));
    }

    SUBCASE("loss law P(z) = P(0) exp(-alpha z)") {
        const Grid g = make_grid(64, 64, 10e-6, 10e-6);
        MediumParams m;
        m.alpha = 35.0;
        m.length = 0.05;
        const Field2D f = gaussian_beam(g, 80e-6, 0.5, 1.0);
        const auto rec = propagate(f, m, StepPlan::for_length(m.length, 200));
        for (const auto& p : rec.power_trace)
            CHECK(p.power == doctest::Approx(0.5 * std::exp(-m.alpha * p.z)).epsilon(1e-6));
    }

    SUBCASE("free-space Gaussian follows w(z) = w0 sqrt(1 + (z/zR)^2) up to 2 zR") {
        const Grid g = make_grid(256, 256, 6e-6, 6e-6);
        const double w0 = 100e-6;
        MediumParams m;
        const double zr = kPi * w0 * w0 / m.wavelength;
        m.length = 2.0 * zr;
        ScopedWarningCapture quiet;
        const auto rec = propagate(gaussian_beam(g, w0, 1.0, 1.0), m, StepPlan::for_length(m.length, 2000, 250));
        for (const auto& s : rec.snapshots) {
            const double expected = w0 * std::sqrt(1.0 + (s.z / zr) * (s.z / zr));
            CHECK(second_moment_width(s.field).wx == doctest::Approx(expected).epsilon(0.005));
        }
        CHECK(rec.snapshots.size() == 8);
        for (std::size_t n = 1; n < rec.snapshots.size(); ++n) CHECK(rec.snapshots[n].z > rec.snapshots[n - 1].z);
    }

    SUBCASE("Strang splitting converges at second order") {
        const Grid g = make_grid(64, 64, 0.5, 0.5);
        const Field2D f = smooth_fluid(g);
        const MediumParams m = dimensionless_medium(2.0);
        ScopedWarningCapture quiet;
        const auto a = propagate(f, m, StepPlan::for_length(2.0, 100)).final_field;
        const auto b = propagate(f, m, StepPlan::for_length(2.0, 200)).final_field;
        const auto c = propagate(f, m, StepPlan::for_length(2.0, 400)).final_field;
        const double ratio = l2_distance(a, b) / l2_distance(b, c);
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }

    SUBCASE("z-dependent potential is sampled at step midpoints") {
        const Grid g = make_grid(16, 16, 1.0, 1.0);
        MediumParams m = dimensionless_medium(3.0);
        m.chi3 = 0.0;
        m.potential = build_potential(g, {.kind = PotentialKind::uniform, .amplitude = {0.2, 0.0}});
        m.z_profile = [](double z) { return z; };
        Field2D f(g, std::vector<Complex>(g.size(), Complex(1.0, 0.0)), UnitTag::dimensionless);
        ScopedWarningCapture quiet;
        const auto rec = propagate(f, m, StepPlan::for_length(3.0, 21));
        // Midpoint rule integrates the linear profile exactly: phase = k0 * 0.2 * L^2 / 2.
        CHECK(std::arg(rec.final_field.values()[0]) == doctest::Approx(std::remainder(0.2 * 4.5, 2.0 * kPi)).epsilon(1e-12));
    }

    SUBCASE("Galilean tilt translates the density by k_x L / (k0 n0)") {
        const Grid g = make_grid(128, 64, 0.5, 0.5);
        const MediumParams m = dimensionless_medium(6.0);
        Field2D f(g, UnitTag::dimensionless);
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const double x = g.x(i) + 10.0, y = g.y(j);
                f(i, j) = 1.2 * std::exp(-(x * x + y * y) / 9.0);
            }
        const double kx = 4.0 * g.dkx();
        Field2D tilted = f;
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) tilted(i, j) *= std::polar(1.0, kx * g.x(i));
        ScopedWarningCapture quiet;
        const auto plain = propagate(f, m, StepPlan::for_length(6.0, 300)).final_field;
        const auto moved = propagate(tilted, m, StepPlan::for_length(6.0, 300)).final_field;
        const double shift = kx * 6.0;
        CHECK(second_moment_width(moved).cx - second_moment_width(plain).cx == doctest::Approx(shift).epsilon(g.dx() / shift));
        // Shape: the tilted density equals the plain density shifted by `shift`.
        std::vector<Complex> rho(plain.size());
        for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = std::norm(plain.values()[n]);
        Fft2d fft(g);
        fft.forward(rho);
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) rho[g.index(i, j)] *= std::polar(1.0, -g.kx(i) * shift);
        fft.inverse(rho);
        double diff = 0.0, norm = 0.0;
        for (std::size_t n = 0; n < rho.size(); ++n) {
            diff += std::pow(std::norm(moved.values()[n]) - rho[n].real(), 2);
            norm += std::pow(rho[n].real(), 2);
        }
        CHECK(std::sqrt(diff / norm) < 1e-3);
    }

    SUBCASE("phase guard warns above 0.5 rad and aborts above pi") {
        const Grid g = make_grid(16, 16, 1.0, 1.0);
        const Field2D f = smooth_fluid(g);
        {
            ScopedWarningCapture capture;
            const auto rec = propagate(f, dimensionless_medium(1.0), StepPlan::for_length(1.0, 5));
            CHECK(rec.max_phase_per_step > 0.5);
            CHECK(capture.contains("phase per step"));
            CHECK_FALSE(rec.warnings.empty());
        }
        CHECK_THROWS_AS(propagate(f, dimensionless_medium(4.0), StepPlan::for_length(4.0, 4)), NumericalError);
    }

    SUBCASE("non-finite input aborts") {
        const Grid g = make_grid(16, 16, 1.0, 1.0);
        Field2D f = smooth_fluid(g);
        f(3, 3) = Complex(std::nan(""), 0.0);
        CHECK_THROWS_AS(propagate(f, dimensionless_medium(1.0), StepPlan::for_length(1.0, 100)), NumericalError);
    }

    SUBCASE("metrics files") {
        const Grid g = make_grid(16, 16, 1.0, 1.0);
        const auto rec = propagate(smooth_fluid(g), dimensionless_medium(0.5), StepPlan::for_length(0.5, 10));
        const auto dir = std::filesystem::temp_directory_path() / "pfl_test_metrics";
        std::filesystem::create_directories(dir);
        const auto files = write_metrics(dir, "run", rec);
        REQUIRE(files.size() == 2);
        std::ifstream csv(files[1]);
        std::string header;
        std::getline(csv, header);
        CHECK(header == "z,power");
        int rows = 0;
        for (std::string line; std::getline(csv, line);) ++rows;
        CHECK(rows == 11);
    }
}

TEST_CASE("rescale_dimensionless") {
    const Grid g = make_grid(32, 32, 1e-5, 1e-5);
    MediumParams m;
    m.chi3 = -2e-9;
    m.length = 0.07;

    const auto a = rescale_dimensionless(plane_wave(g, 1e4, 1.0), m);
    const auto b = rescale_dimensionless(plane_wave(g, 2e4, 1.0), m);
    CHECK(b.z_nl == doctest::Approx(a.z_nl / 2.0).epsilon(1e-12));
    CHECK(b.xi == doctest::Approx(a.xi / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(a.psi.unit_tag() == UnitTag::dimensionless);
    CHECK(a.psi.max_density() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.psi.grid().dx() == doctest::Approx(1e-5 / a.xi).epsilon(1e-12));

    // |g| rho(L) = 100 / m with L = 7 cm gives tau = 7.
    const double rho = 100.0 / std::abs(m.g());
    Field2D f(g, std::vector<Complex>(g.size(), Complex(std::sqrt(rho), 0.0)));
    CHECK(rescale_dimensionless(f, m).tau == doctest::Approx(7.0).epsilon(1e-12));

    MediumParams linear = m;
    linear.chi3 = 0.0;
    CHECK_THROWS_AS(rescale_dimensionless(f, linear), InvalidArgument);
    CHECK_THROWS_AS(rescale_dimensionless(Field2D(g), m), InvalidArgument);
}

TEST_CASE("n2 and chi3 parameterizations agree") {
    const MediumParams a = MediumParams::from_n2(780e-9, 1.0, -1e-9, 0.0, 0.01);
    CHECK(a.n2() == doctest::Approx(-1e-9).epsilon(1e-14));
    // Index shift n2 I equals chi3 |E|^2 / (2 n0).
    const double intensity = 1e5;
    const double field_sq = field_sq_from_intensity(intensity, a.n0);
    CHECK(a.n2() * intensity == doctest::Approx(a.chi3 * field_sq / (2.0 * a.n0)).epsilon(1e-14));
}
