#include "pfl/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pfl/error.hpp"
#include "pfl/fft.hpp"

namespace pfl {
namespace {

constexpr double kPi = constants::pi;

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a;
}

double wrap_displacement(double d, double period) {
    return d - period * std::floor(d / period + 0.5);
}

void check_floor(double floor, const char* ctx) {
    if (!(floor >= 0.0 && floor < 1.0)) throw InvalidArgument(std::string(ctx) + ": density floor must be in [0, 1)");
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double rms_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        rss += r * r;
    }
    f.rms_residual = std::sqrt(rss / n);
    f.slope_stderr = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return f;
}

// x-centroid of |delta rho| relative to x_c. With direction s != 0 only the
// half period [0, L/2) along s is included.
double window_centroid(const Field2D& probed, const Field2D& reference, double x_c, int direction) {
    const Grid& g = probed.grid();
    const double period = g.extent_x();
    std::vector<double> column(g.nx(), 0.0);
    const auto a = probed.values();
    const auto b = reference.values();
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t n = g.index(i, j);
            column[i] += std::abs(std::norm(a[n]) - std::norm(b[n]));
        }
    double w = 0.0, wd = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) {
        double d = wrap_displacement(g.x(i) - x_c, period);
        if (direction != 0) {
            d *= direction;
            if (d < 0.0) continue;
        }
        w += column[i];
        wd += column[i] * d;
    }
    if (!(w > 0.0)) throw NumericalError("measure_group_velocity: probe signal vanished");
    return direction == 0 ? wd / w : direction * wd / w;
}

}  // namespace

FluidDiagnostics madelung(const Field2D& field, double density_floor) {
    check_floor(density_floor, "madelung");
    require_finite(field, "madelung");
    const Grid& g = field.grid();
    const double rho_max = field.max_density();
    if (!(rho_max > 0.0)) throw InvalidArgument("madelung: field is identically zero");

    FluidDiagnostics d;
    d.grid = g;
    d.density = field.density();
    d.phase.resize(g.size());
    d.vx.assign(g.size(), 0.0);
    d.vy.assign(g.size(), 0.0);
    d.valid.assign(g.size(), 0);
    const auto psi = field.values();
    for (std::size_t n = 0; n < g.size(); ++n) d.phase[n] = std::arg(psi[n]);

    Fft2d fft(g);
    std::vector<Complex> spec(psi.begin(), psi.end());
    fft.forward(spec);
    std::vector<Complex> gx(spec), gy(spec);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t n = g.index(i, j);
            // The Nyquist mode has no well-defined derivative and is dropped.
            const double kx = i == g.nx() / 2 ? 0.0 : g.kx(i);
            const double ky = j == g.ny() / 2 ? 0.0 : g.ky(j);
            gx[n] *= Complex(0.0, kx);
            gy[n] *= Complex(0.0, ky);
        }
    fft.inverse(gx);
    fft.inverse(gy);

    const double cut = density_floor * rho_max;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double rho = d.density[n];
        if (rho < cut || rho <= 0.0) continue;
        d.valid[n] = 1;
        d.vx[n] = std::imag(std::conj(psi[n]) * gx[n]) / rho;
        d.vy[n] = std::imag(std::conj(psi[n]) * gy[n]) / rho;
    }
    return d;
}

void attach_fluid_scales(FluidDiagnostics& diag, const Field2D& field, const MediumParams& medium) {
    medium.validate();
    if (medium.chi3 == 0.0) throw InvalidArgument("attach_fluid_scales: zero nonlinearity has no healing length");
    const double rho = field.max_density();
    if (!(rho > 0.0)) throw InvalidArgument("attach_fluid_scales: field is identically zero");
    const double m = medium.n0 * medium.k0();
    const double mu = std::abs(medium.g()) * rho;
    diag.z_nl = 1.0 / mu;
    diag.xi = std::sqrt(1.0 / (mu * m));
    diag.c_s = std::sqrt(mu / m);
}

int VortexSet::total_winding() const {
    int s = 0;
    for (const auto& v : vortices) s += v.charge;
    return s;
}

VortexSet detect_vortices(const Field2D& field, double density_floor) {
    check_floor(density_floor, "detect_vortices");
    require_finite(field, "detect_vortices");
    const Grid& g = field.grid();
    const double cut = density_floor * field.max_density();
    const auto psi = field.values();
    std::vector<double> phase(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) phase[n] = std::arg(psi[n]);

    VortexSet out;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j)
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const std::size_t c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
            double mean = 0.0;
            bool zero = false;
            for (auto n : c) {
                mean += 0.25 * std::norm(psi[n]);
                zero |= psi[n] == Complex(0.0, 0.0);
            }
            if (zero || mean < cut) continue;
            double sum = 0.0;
            for (int e = 0; e < 4; ++e) sum += wrap_phase(phase[c[(e + 1) % 4]] - phase[c[e]]);
            const int q = static_cast<int>(std::lround(sum / (2.0 * kPi)));
            if (q != 0) out.vortices.push_back({g.x(i) + 0.5 * g.dx(), g.y(j) + 0.5 * g.dy(), q});
        }
    return out;
}

GridLoop rectangle_loop(std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    if (i1 <= i0 || j1 <= j0) throw InvalidArgument("rectangle_loop: empty rectangle");
    GridLoop loop;
    for (std::size_t i = i0; i < i1; ++i) loop.emplace_back(i, j0);
    for (std::size_t j = j0; j < j1; ++j) loop.emplace_back(i1, j);
    for (std::size_t i = i1; i > i0; --i) loop.emplace_back(i, j1);
    for (std::size_t j = j1; j > j0; --j) loop.emplace_back(i0, j);
    return loop;
}

double circulation(const Field2D& field, const GridLoop& loop) {
    if (loop.size() < 3) throw InvalidArgument("circulation: loop needs at least 3 samples");
    const Grid& g = field.grid();
    for (const auto& [i, j] : loop)
        if (i >= g.nx() || j >= g.ny()) throw InvalidArgument("circulation: loop leaves the grid");
    double sum = 0.0;
    for (std::size_t n = 0; n < loop.size(); ++n) {
        const auto& a = loop[n];
        const auto& b = loop[(n + 1) % loop.size()];
        sum += wrap_phase(std::arg(field(b.first, b.second)) - std::arg(field(a.first, a.second)));
    }
    return sum;
}

GroupVelocitySample measure_group_velocity(const Field2D& background, const GroupVelocityConfig& config,
                                           const MediumParams& medium, const StepPlan& plan) {
    StepPlan p = plan;
    if (p.snapshot_every == 0) p.snapshot_every = std::max<std::size_t>(1, p.n_steps / 40);
    const auto ref = propagate(background, medium, p);
    return measure_group_velocity(background, ref, config, medium, p);
}

GroupVelocitySample measure_group_velocity(const Field2D& background, const PropagationRecord& background_run,
                                           const GroupVelocityConfig& config, const MediumParams& medium,
                                           const StepPlan& plan) {
    const Grid& g = background.grid();
    if (!(config.probe_waist > 0.0)) throw InvalidArgument("measure_group_velocity: probe waist must be positive");
    if (!(config.probe_ratio > 0.0)) throw InvalidArgument("measure_group_velocity: probe ratio must be positive");
    if (!(config.fit_start >= 0.0 && config.fit_start < 1.0))
        throw InvalidArgument("measure_group_velocity: fit_start must be in [0, 1)");
    if (std::abs(config.k_perp) >= g.nyquist_x())
        throw InvalidArgument("measure_group_velocity: k_perp aliases on this grid");
    if (plan.snapshot_every == 0 || background_run.snapshots.size() != plan.n_steps / plan.snapshot_every)
        throw InvalidArgument("measure_group_velocity: background run does not match the step plan");
    const double rho_peak = background.max_density();
    if (!(rho_peak > 0.0)) throw InvalidArgument("measure_group_velocity: background is identically zero");

    const double amp = std::sqrt(config.probe_ratio * rho_peak);
    const bool line = config.probe_waist_y < 0.0;
    const double wy = config.probe_waist_y > 0.0 ? config.probe_waist_y : config.probe_waist;
    Field2D probed = background;
    {
        auto v = probed.values();
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const double dx = wrap_displacement(g.x(i) - config.center.first, g.extent_x());
                const double dy = wrap_displacement(g.y(j) - config.center.second, g.extent_y());
                const double e = dx * dx / (config.probe_waist * config.probe_waist) + (line ? 0.0 : dy * dy / (wy * wy));
                v[g.index(i, j)] += std::polar(amp * std::exp(-e), config.k_perp * dx);
            }
    }
    const auto run = propagate(probed, medium, plan);

    const int dir = config.k_perp > 0.0 ? 1 : (config.k_perp < 0.0 ? -1 : 0);
    GroupVelocitySample out;
    out.k_perp = config.k_perp;
    out.z.push_back(0.0);
    out.displacement.push_back(window_centroid(probed, background, config.center.first, dir));
    for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
        out.z.push_back(run.snapshots[s].z);
        out.displacement.push_back(
            window_centroid(run.snapshots[s].field, background_run.snapshots[s].field, config.center.first, dir));
    }

    const double z_from = config.fit_start * plan.length();
    std::vector<double> fz, fd;
    for (std::size_t n = 0; n < out.z.size(); ++n)
        if (out.z[n] >= z_from) {
            fz.push_back(out.z[n]);
            fd.push_back(out.displacement[n]);
        }
    if (fz.size() < 3) throw InvalidArgument("measure_group_velocity: fewer than 3 snapshots in the fit window");

    const double half = 0.5 * g.extent_x();
    const double reach = 2.0 * config.probe_waist;
    for (double d : fd)
        if (std::abs(d) + reach > half)
            throw NumericalError("measure_group_velocity: wavepacket reaches the periodic boundary; shorten L or "
                                 "enlarge the grid");

    const LineFit f = fit_line(fz, fd);
    const auto [lo, hi] = std::minmax_element(fd.begin(), fd.end());
    const double range = std::max(*hi - *lo, reach * 1e-3);
    if (f.rms_residual > config.max_residual * range) {
        std::ostringstream msg;
        msg << "measure_group_velocity: centroid trace is not linear (rms residual " << f.rms_residual
            << " vs range " << range << ")";
        throw NumericalError(msg.str());
    }
    out.v_g = f.slope;
    out.v_g_stderr = f.slope_stderr;
    return out;
}

}  // namespace pfl
