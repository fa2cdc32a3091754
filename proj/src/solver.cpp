#include "pfl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pfl/builders.hpp"
#include "pfl/error.hpp"
#include "pfl/fft.hpp"
#include "pfl/log.hpp"

namespace pfl {
namespace {

// Field power in W for physical fields, norm integral otherwise.
double field_power(const Field2D& f, double n0) {
    return f.unit_tag() == UnitTag::physical ? beam_power(f, n0) : f.norm_integral();
}

double local_intensity(double field_sq, const Field2D& f, double n0) {
    return f.unit_tag() == UnitTag::physical ? intensity_from_field_sq(field_sq, n0) : field_sq;
}

std::vector<Complex> kinetic_multiplier(const Grid& grid, double dz, double k0, double n0) {
    const auto k2 = grid.k_squared();
    std::vector<Complex> m(k2.size());
    const double rate = dz / (2.0 * n0 * k0);
    for (std::size_t n = 0; n < k2.size(); ++n) m[n] = std::polar(1.0, -k2[n] * rate);
    return m;
}

double potential_scale(const MediumParams& medium, double z) {
    return medium.z_profile ? medium.z_profile(z) : 1.0;
}

// Applies the local operator to `values` in place, returns the largest power
// growth factor of any sample.
double apply_local(std::span<Complex> values, const Field2D& shape, double dz, const MediumParams& medium,
                   double z_eval) {
    const double k0 = medium.k0();
    const double nl = k0 / (2.0 * medium.n0) * medium.chi3;
    const bool has_potential = !medium.potential.empty();
    if (has_potential && medium.potential.values.size() != values.size())
        throw InvalidArgument("nonlinear_step: potential grid does not match field grid");
    const double pscale = has_potential ? potential_scale(medium, z_eval) : 0.0;
    const double loss0 = 0.5 * medium.alpha;

    double max_growth = 0.0;
    for (std::size_t n = 0; n < values.size(); ++n) {
        const double rho = std::norm(values[n]);
        double chi_eff = nl;
        if (medium.i_sat) chi_eff = nl / (1.0 + local_intensity(rho, shape, medium.n0) / *medium.i_sat);
        double phase = chi_eff * rho;
        double loss = loss0;
        if (has_potential) {
            const Complex dn = medium.potential.values[n] * pscale;
            phase += k0 * dn.real();
            loss += k0 * dn.imag();
        }
        const double gain = std::exp(-dz * loss);
        max_growth = std::max(max_growth, gain * gain);
        values[n] *= std::polar(gain, dz * phase);
    }
    return max_growth;
}

}  // namespace

StepPlan StepPlan::for_length(double length, std::size_t n_steps, std::size_t snapshot_every) {
    if (!(length >= 0.0)) throw InvalidArgument("plan: length must be non-negative");
    StepPlan p;
    p.n_steps = n_steps;
    p.dz = n_steps > 0 ? length / static_cast<double>(n_steps) : 0.0;
    p.snapshot_every = snapshot_every;
    if (n_steps > 0 && !(p.dz > 0.0)) throw InvalidArgument("plan: dz must be positive");
    return p;
}

Field2D kinetic_half_step(const Field2D& field, double dz, double k0, double n0) {
    Fft2d fft(field.grid());
    Field2D out = field;
    fft.forward(out.values());
    const auto m = kinetic_multiplier(field.grid(), 0.5 * dz, k0, n0);
    auto v = out.values();
    for (std::size_t n = 0; n < v.size(); ++n) v[n] *= m[n];
    fft.inverse(out.values());
    require_finite(out, "kinetic_half_step");
    return out;
}

Field2D nonlinear_step(const Field2D& field, double dz, const MediumParams& medium, double z_eval) {
    Field2D out = field;
    const double growth = apply_local(out.values(), field, dz, medium, z_eval);
    if (growth > 10.0)
        warn("nonlinear_step: gain profile grows local power by " + std::to_string(growth) + "x in one step");
    require_finite(out, "nonlinear_step");
    return out;
}

double max_phase_per_step(const Field2D& field, const MediumParams& medium, double dz) {
    const Grid& g = field.grid();
    const double kmax2 = g.nyquist_x() * g.nyquist_x() + g.nyquist_y() * g.nyquist_y();
    const double kinetic = kmax2 / (2.0 * medium.n0 * medium.k0());
    double pot = 0.0;
    if (!medium.potential.empty())
        for (const auto& v : medium.potential.values) pot = std::max(pot, std::abs(v.real()));
    const double local = medium.k0() * pot + medium.k0() / (2.0 * medium.n0) * std::abs(medium.chi3) *
                                                 field.max_density();
    return dz * std::max(kinetic, local);
}

PropagationRecord propagate(const Field2D& field, const MediumParams& medium, const StepPlan& plan) {
    medium.validate();
    require_finite(field, "propagate");
    const auto start = std::chrono::steady_clock::now();

    PropagationRecord rec;
    rec.n_steps = plan.n_steps;
    rec.dz = plan.dz;
    rec.power_trace.push_back({0.0, field_power(field, medium.n0)});
    if (plan.n_steps == 0) {
        rec.final_field = field;
        return rec;
    }
    if (!(plan.dz > 0.0)) throw InvalidArgument("propagate: dz must be positive");

    auto note = [&rec](std::string msg) {
        warn(msg);
        rec.warnings.push_back(std::move(msg));
    };

    const Grid& grid = field.grid();
    Fft2d fft(grid);
    const auto half = kinetic_multiplier(grid, 0.5 * plan.dz, medium.k0(), medium.n0);
    const auto full = kinetic_multiplier(grid, plan.dz, medium.k0(), medium.n0);
    auto multiply = [](std::span<Complex> v, const std::vector<Complex>& m) {
        for (std::size_t n = 0; n < v.size(); ++n) v[n] *= m[n];
    };

    Field2D work = field;
    auto buf = work.values();
    bool warned_phase = false;
    bool warned_gain = false;

    // The trailing half kinetic step of one step and the leading half of the
    // next are fused into one full step unless the field is observed between.
    fft.forward(buf);
    multiply(buf, half);
    for (std::size_t s = 0; s < plan.n_steps; ++s) {
        const double z = static_cast<double>(s) * plan.dz;
        fft.inverse(buf);

        const double phase = max_phase_per_step(work, medium, plan.dz);
        rec.max_phase_per_step = std::max(rec.max_phase_per_step, phase);
        if (phase > kPhaseAbort) {
            std::ostringstream msg;
            msg << "propagate: phase per step " << phase << " rad exceeds pi at z = " << z << " m; reduce dz";
            throw NumericalError(msg.str());
        }
        if (phase > kPhaseWarn && !warned_phase) {
            warned_phase = true;
            std::ostringstream msg;
            msg << "propagate: phase per step " << phase << " rad exceeds " << kPhaseWarn << " rad";
            note(msg.str());
        }

        const double growth = apply_local(buf, work, plan.dz, medium, z + 0.5 * plan.dz);
        if (growth > 10.0 && !warned_gain) {
            warned_gain = true;
            note("propagate: gain profile grows local power by more than 10x in one step");
        }
        if (!work.all_finite()) {
            std::ostringstream msg;
            msg << "propagate: non-finite field at step " << s + 1 << " (z = " << z + plan.dz << " m)";
            throw NumericalError(msg.str());
        }
        // The kinetic operator is unitary, so the power here is the power at z + dz.
        rec.power_trace.push_back({static_cast<double>(s + 1) * plan.dz, field_power(work, medium.n0)});

        fft.forward(buf);
        const bool last = s + 1 == plan.n_steps;
        const bool snap = plan.snapshot_every > 0 && (s + 1) % plan.snapshot_every == 0;
        if (last || snap) {
            multiply(buf, half);
            fft.inverse(buf);
            if (snap) rec.snapshots.push_back({work, static_cast<double>(s + 1) * plan.dz});
            if (!last) {
                fft.forward(buf);
                multiply(buf, half);
            }
        } else {
            multiply(buf, full);
        }
    }
    require_finite(work, "propagate");
    rec.final_field = std::move(work);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

DimensionlessField rescale_dimensionless(const Field2D& field, const MediumParams& medium,
                                         DensityReference reference) {
    if (medium.chi3 == 0.0) throw InvalidArgument("rescale_dimensionless: zero nonlinearity");
    double rho = 0.0;
    if (reference == DensityReference::peak) {
        rho = field.max_density();
    } else {
        for (const auto& v : field.values()) rho += std::norm(v);
        rho /= static_cast<double>(field.size());
    }
    if (!(rho > 0.0)) throw InvalidArgument("rescale_dimensionless: zero output density");

    DimensionlessField out;
    out.rho = rho;
    out.z_nl = 1.0 / (std::abs(medium.g()) * rho);
    out.xi = std::sqrt(out.z_nl / (medium.n0 * medium.k0()));
    out.tau = medium.length / out.z_nl;

    const Grid& g = field.grid();
    Grid scaled = make_grid(g.nx(), g.ny(), g.dx() / out.xi, g.dy() / out.xi);
    std::vector<Complex> psi(field.values().begin(), field.values().end());
    const double inv = 1.0 / std::sqrt(rho);
    for (auto& v : psi) v *= inv;
    out.psi = Field2D(scaled, std::move(psi), UnitTag::dimensionless);
    return out;
}

MediumParams dimensionless_medium(double tau_length) {
    MediumParams m;
    m.wavelength = 2.0 * constants::pi;
    m.n0 = 1.0;
    m.chi3 = -2.0;
    m.length = tau_length;
    return m;
}

std::vector<std::filesystem::path> write_metrics(const std::filesystem::path& dir, const std::string& stem,
                                                 const PropagationRecord& record) {
    const auto txt = dir / (stem + ".txt");
    const auto csv = dir / (stem + "_power.csv");
    {
        std::ofstream os(txt, std::ios::trunc);
        if (!os) throw IoError("cannot write " + txt.string());
        os << std::setprecision(17);
        os << "steps " << record.n_steps << "\n";
        os << "dz " << record.dz << "\n";
        os << "max_phase_per_step " << record.max_phase_per_step << "\n";
        os << "wall_seconds " << record.wall_seconds << "\n";
        os << "warnings " << record.warnings.size() << "\n";
    }
    {
        std::ofstream os(csv, std::ios::trunc);
        if (!os) throw IoError("cannot write " + csv.string());
        os << std::setprecision(17) << "z,power\n";
        for (const auto& p : record.power_trace) os << p.z << ',' << p.power << '\n';
    }
    return {txt, csv};
}

}  // namespace pfl
