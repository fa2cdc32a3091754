#include "pfl/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pfl/error.hpp"
#include "pfl/parallel.hpp"

namespace pfl {
namespace {

double bogoliubov(double k, double mu, double mass) {
    const double e = k * k / (2.0 * mass);
    return std::sqrt(e * (e + 2.0 * mu));
}

double rss_for(std::span<const double> k, std::span<const double> omega, double mu, double mass) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double r = omega[i] - bogoliubov(k[i], mu, mass);
        s += r * r;
    }
    return s;
}

}  // namespace

double student_t975(std::size_t dof) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                       2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                       2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof == 0) return std::numeric_limits<double>::infinity();
    if (dof <= 30) return table[dof - 1];
    return 1.959964 + 2.37 / static_cast<double>(dof);
}

BogoliubovFit fit_bogoliubov(std::span<const double> k, std::span<const double> omega, double mass) {
    if (k.size() != omega.size()) throw InvalidArgument("fit_bogoliubov: size mismatch");
    if (k.size() < 2) throw InvalidArgument("fit_bogoliubov: need at least 2 points");
    if (!(mass > 0.0)) throw InvalidArgument("fit_bogoliubov: mass must be positive");
    for (double v : k)
        if (!(v > 0.0)) throw InvalidArgument("fit_bogoliubov: k must be positive");

    // Start from the sound speed implied by the lowest point.
    double mu = std::max(mass * std::pow(omega[0] / k[0], 2.0) - k[0] * k[0] / 4.0, 0.0);
    if (!std::isfinite(mu)) throw NumericalError("fit_bogoliubov: non-finite start value");
    double rss = rss_for(k, omega, mu, mass);
    BogoliubovFit fit;
    bool converged = false;
    for (std::size_t it = 0; it < 200; ++it) {
        fit.iterations = it + 1;
        double jr = 0.0, jj = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            const double f = bogoliubov(k[i], mu, mass);
            const double e = k[i] * k[i] / (2.0 * mass);
            const double j = e / f;
            jr += j * (omega[i] - f);
            jj += j * j;
        }
        double step = jr / jj;
        double next = std::max(mu + step, 0.0);
        double next_rss = rss_for(k, omega, next, mass);
        for (int h = 0; h < 60 && next_rss > rss; ++h) {
            step *= 0.5;
            next = std::max(mu + step, 0.0);
            next_rss = rss_for(k, omega, next, mass);
        }
        const double change = std::abs(next - mu);
        if (next_rss <= rss) {
            mu = next;
            rss = next_rss;
        }
        if (change <= 1e-13 * std::max(mu, 1e-300) || change == 0.0) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericalError("fit_bogoliubov: fit did not converge");

    double jj = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double f = bogoliubov(k[i], mu, mass);
        const double e = k[i] * k[i] / (2.0 * mass);
        jj += (e / f) * (e / f);
    }
    const std::size_t dof = k.size() - 1;
    const double s2 = rss / static_cast<double>(dof);
    fit.mu = mu;
    fit.mu_stderr = std::sqrt(s2 / jj);
    fit.rms_residual = std::sqrt(rss / static_cast<double>(k.size()));
    fit.c_s = std::sqrt(mu / mass);
    const double t = student_t975(dof);
    if (mu > 0.0) {
        fit.c_s_ci = t * fit.mu_stderr / (2.0 * std::sqrt(mu * mass));
        fit.xi = 1.0 / std::sqrt(mass * mu);
        fit.xi_ci = t * fit.mu_stderr * 0.5 * mass * std::pow(mass * mu, -1.5);
    } else {
        fit.c_s_ci = std::sqrt(t * fit.mu_stderr / mass);
        fit.xi = std::numeric_limits<double>::infinity();
        fit.xi_ci = std::numeric_limits<double>::infinity();
    }
    return fit;
}

DispersionCurve dispersion_from_group_velocity(std::span<const GroupVelocitySample> samples, double mass) {
    if (samples.size() < 5) throw InvalidArgument("dispersion_from_group_velocity: need at least 5 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].k_perp) || !std::isfinite(samples[i].v_g))
            throw InvalidArgument("dispersion_from_group_velocity: non-finite sample");
        if (samples[i].k_perp < 0.0) throw InvalidArgument("dispersion_from_group_velocity: k must be non-negative");
        if (i > 0 && !(samples[i].k_perp > samples[i - 1].k_perp))
            throw InvalidArgument("dispersion_from_group_velocity: k must be strictly increasing");
    }

    DispersionCurve curve;
    if (samples[0].k_perp > 0.0) {
        const double k1 = samples[0].k_perp, k2 = samples[1].k_perp;
        const double v1 = samples[0].v_g, v2 = samples[1].v_g;
        curve.points.push_back({0.0, v1 - (v2 - v1) / (k2 - k1) * k1, 0.0, true});
    }
    for (const auto& s : samples) {
        double omega = 0.0;
        if (!curve.points.empty()) {
            const auto& prev = curve.points.back();
            omega = prev.omega + 0.5 * (prev.v_g + s.v_g) * (s.k_perp - prev.k);
        }
        curve.points.push_back({s.k_perp, s.v_g, omega, false});
    }

    std::vector<double> k, w;
    for (const auto& p : curve.points)
        if (p.k > 0.0) {
            k.push_back(p.k);
            w.push_back(p.omega);
        }
    curve.fit = fit_bogoliubov(k, w, mass);
    return curve;
}

SoundScalingResult sound_speed_scaling(const Grid& grid, std::span<const double> densities,
                                       const MediumParams& medium, const StepPlan& plan,
                                       const SoundScalingOptions& options, unsigned jobs) {
    medium.validate();
    if (densities.size() < 2) throw InvalidArgument("sound_speed_scaling: need at least 2 densities");
    if (medium.chi3 >= 0.0) throw InvalidArgument("sound_speed_scaling: needs a defocusing (chi3 < 0) medium");
    if (options.k_xi.size() < 5) throw InvalidArgument("sound_speed_scaling: need at least 5 probe wavevectors");
    for (double d : densities)
        if (!(d > 0.0)) throw InvalidArgument("sound_speed_scaling: densities must be positive");

    const double mass = medium.n0 * medium.k0();
    auto xi_of = [&](double rho) { return 1.0 / std::sqrt(mass * std::abs(medium.g()) * rho); };
    const double rho_max = *std::max_element(densities.begin(), densities.end());
    GroupVelocityConfig probe = options.probe;
    if (options.waist_xi > 0.0) probe.probe_waist = options.waist_xi * xi_of(rho_max);

    SoundScalingResult result;
    result.members.resize(densities.size());
    const std::size_t nk = options.k_xi.size();
    StepPlan p = plan;
    if (p.snapshot_every == 0) p.snapshot_every = std::max<std::size_t>(1, p.n_steps / 40);

    std::vector<PropagationRecord> backgrounds(densities.size());
    std::vector<Field2D> fields(densities.size());
    parallel_for(densities.size(), jobs, [&](std::size_t d) {
        std::vector<Complex> v(grid.size(), Complex(std::sqrt(densities[d]), 0.0));
        fields[d] = Field2D(grid, std::move(v), options.tag);
        backgrounds[d] = propagate(fields[d], medium, p);
    });

    std::vector<GroupVelocitySample> samples(densities.size() * nk);
    parallel_for(samples.size(), jobs, [&](std::size_t n) {
        const std::size_t d = n / nk;
        GroupVelocityConfig c = probe;
        c.k_perp = options.k_xi[n % nk] / xi_of(densities[d]);
        samples[n] = measure_group_velocity(fields[d], backgrounds[d], c, medium, p);
    });

    std::vector<double> lx, ly;
    for (std::size_t d = 0; d < densities.size(); ++d) {
        auto& m = result.members[d];
        m.density = densities[d];
        m.xi = xi_of(densities[d]);
        m.curve = dispersion_from_group_velocity(std::span(samples).subspan(d * nk, nk), mass);
        if (!(m.curve.fit.c_s > 0.0)) throw NumericalError("sound_speed_scaling: no sonic branch found");
        lx.push_back(std::log(densities[d]));
        ly.push_back(std::log(m.curve.fit.c_s));
    }

    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("sound_speed_scaling: densities must differ");
    result.exponent = sxy / sxx;
    if (lx.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - (my + result.exponent * (lx[i] - mx));
            rss += r * r;
        }
        result.exponent_ci = student_t975(lx.size() - 2) * std::sqrt(rss / (n - 2.0) / sxx);
    }
    return result;
}

}  // namespace pfl
