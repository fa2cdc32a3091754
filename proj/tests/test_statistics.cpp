#include <cmath>
#include <map>

#include "doctest.h"
#include "pfl/builders.hpp"
#include "pfl/error.hpp"
#include "pfl/rng.hpp"
#include "pfl/solver.hpp"
#include "pfl/statistics.hpp"

using namespace pfl;

namespace {

Field2D uniform(const Grid& g, double amp = 1.0) {
    return Field2D(g, std::vector<Complex>(g.size(), Complex(amp, 0.0)), UnitTag::dimensionless);
}

std::vector<Field2D> speckle_ensemble(const Grid& g, double ell, std::size_t n) {
    std::vector<Field2D> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(speckle(g, ell, 1.0, 1000 + i));
    return out;
}

// Linearized fluctuations about a uniform unit-density fluid, white initial
// noise, ring-averaged over the same modes as the estimator.
std::map<long, double> linear_structure_oracle(const Grid& g, double tau) {
    const double dk = std::min(g.dkx(), g.dky());
    std::map<long, std::pair<double, int>> acc;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double k = std::hypot(g.kx(i), g.ky(j));
            const long r = std::lround(k / dk);
            if (r == 0 || r * dk > std::min(g.nyquist_x(), g.nyquist_y()) + 1e-12) continue;
            const double e = 0.5 * k * k;
            const double w = std::sqrt(e * (e + 2.0));
            const double s = std::pow(std::cos(w * tau), 2) + std::pow(e / w * std::sin(w * tau), 2);
            acc[r].first += s;
            acc[r].second += 1;
        }
    std::map<long, double> out;
    for (const auto& [r, a] : acc) out[r] = a.first / a.second;
    return out;
}

}  // namespace

TEST_CASE("plane wave intensity statistics") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const auto st = intensity_statistics(uniform(g, 2.0), 50);
    CHECK(st.g2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.mean == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(st.mode_bin == 49);
    double integral = 0.0;
    for (double p : st.pdf) integral += p * st.bin_width;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("speckle intensity follows the exponential law") {
    const Grid g = make_grid(128, 128, 1.0, 1.0);
    const auto ens = speckle_ensemble(g, 3.0, 20);
    const auto st = intensity_statistics(ens, 100);
    CHECK(st.g2 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(st.mode_bin == 0);
    // Bin-averaged exponential density.
    const double m = st.mean;
    for (std::size_t b = 0; b < 10; ++b) {
        const double lo = b * st.bin_width, hi = lo + st.bin_width;
        const double expected = (std::exp(-lo / m) - std::exp(-hi / m)) / st.bin_width;
        CHECK(st.pdf[b] == doctest::Approx(expected).epsilon(0.06));
    }
    CHECK_THROWS_AS(intensity_statistics(Field2D(g), 10), InvalidArgument);
    CHECK_THROWS_AS(intensity_statistics(ens[0], 1), InvalidArgument);
}

TEST_CASE("rotate-pair coherence of a plane wave is one and of white noise is small") {
    const Grid g = make_grid(64, 64, 1.0, 1.0);
    const Field2D pw = uniform(g);
    const auto a = coherence_g1(std::span(&pw, 1), CoherenceMethod::rotate_pair);
    for (double v : a.g1) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    const Field2D noise = add_white_noise(Field2D(g, UnitTag::dimensionless), 1.0, 7);
    const auto b = coherence_g1(std::span(&noise, 1), CoherenceMethod::rotate_pair);
    CHECK(b.dr[0] == 0.0);
    CHECK(b.g1[0] == doctest::Approx(1.0));
    for (std::size_t n = 3; n < b.g1.size(); ++n) {
        CHECK(b.g1[n] >= 0.0);
        CHECK(b.g1[n] < 6.0 / std::sqrt(static_cast<double>(b.counts[n])));
    }
}

TEST_CASE("rotate-pair coherence is bounded on arbitrary fields") {
    const Grid g = make_grid(48, 40, 0.5, 0.7);
    for (std::uint64_t s = 0; s < 20; ++s) {
        Field2D f = add_white_noise(uniform(g, 0.3 * s), 1.0 + s, s);
        const auto p = coherence_g1(std::span(&f, 1), CoherenceMethod::rotate_pair);
        for (double v : p.g1) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("ensemble coherence of speckle matches the Gaussian correlation") {
    const Grid g = make_grid(128, 128, 1.0, 1.0);
    const double ell = 4.0;
    const auto ens = speckle_ensemble(g, ell, 50);
    const auto p = coherence_g1(ens, CoherenceMethod::ensemble);
    CHECK(p.g1[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t n = 0; n < p.dr.size() && p.dr[n] <= 3.0 * ell; ++n)
        CHECK(std::abs(p.g1[n] - std::exp(-p.dr[n] * p.dr[n] / (2.0 * ell * ell))) < 0.03);
    CHECK_THROWS_AS(coherence_g1(std::span(ens.data(), 1), CoherenceMethod::ensemble), InvalidArgument);
    CHECK_THROWS_AS(coherence_g1(ens, CoherenceMethod::rotate_pair), InvalidArgument);
}

TEST_CASE("structure factor of a noisy fluid follows the linearized oracle") {
    const Grid g = make_grid(64, 64, 1.0, 1.0);
    const double tau = 1.0, sigma = 0.02;
    const MediumParams m = dimensionless_medium(tau);
    const auto plan = StepPlan::for_length(tau, 100);
    std::vector<Field2D> sig, ref;
    for (std::uint64_t i = 0; i < 200; ++i) {
        sig.push_back(propagate(add_white_noise(uniform(g), sigma, derive_seed(3, Stream::signal_noise, i)), m, plan)
                          .final_field);
        ref.push_back(add_white_noise(uniform(g), sigma, derive_seed(3, Stream::reference_noise, i)));
    }
    const auto sf = structure_factor(sig, ref);
    const auto oracle = linear_structure_oracle(g, tau);
    REQUIRE(sf.k.size() == oracle.size());
    double worst = 0.0;
    std::size_t n = 0;
    for (const auto& [r, s] : oracle) {
        CHECK(sf.s[n] <= 1.0 + 4.0 * sf.sigma[n]);
        CHECK(std::abs(sf.s[n] - s) < 4.0 * sf.sigma[n] + 0.01);
        worst = std::max(worst, std::abs(sf.s[n] - s) / s);
        ++n;
    }
    MESSAGE("worst relative deviation " << worst);
    CHECK(worst < 0.10);
}

TEST_CASE("structure factor guards") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    std::vector<Field2D> few(50, uniform(g));
    CHECK_THROWS_AS(structure_factor(few, few), InvalidArgument);
    std::vector<Field2D> flat(100, uniform(g));
    CHECK_THROWS_AS(structure_factor(flat, flat), NumericalError);
    std::vector<Field2D> noisy;
    for (std::uint64_t i = 0; i < 100; ++i) noisy.push_back(add_white_noise(uniform(g), 0.1, i));
    const auto sf = structure_factor(noisy, noisy);
    for (double s : sf.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent ensembles with equal statistics give S = 1 within 3 sigma") {
    const Grid g = make_grid(64, 64, 1.0, 1.0);
    std::vector<Field2D> a, b;
    for (std::uint64_t i = 0; i < 200; ++i) {
        a.push_back(add_white_noise(uniform(g), 0.05, derive_seed(9, Stream::signal_noise, i)));
        b.push_back(add_white_noise(uniform(g), 0.05, derive_seed(9, Stream::reference_noise, i)));
    }
    const auto sf = structure_factor(a, b);
    REQUIRE(!sf.k.empty());
    for (std::size_t n = 0; n < sf.k.size(); ++n) {
        CHECK(sf.sigma[n] > 0.0);
        CHECK(std::abs(sf.s[n] - 1.0) < 3.0 * sf.sigma[n]);
    }
}
