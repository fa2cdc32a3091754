#include "pfl/scenarios.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>

#include "pfl/builders.hpp"
#include "pfl/csv.hpp"
#include "pfl/dispersion.hpp"
#include "pfl/error.hpp"
#include "pfl/gem.hpp"
#include "pfl/hydro.hpp"
#include "pfl/parallel.hpp"
#include "pfl/rng.hpp"
#include "pfl/snapshot.hpp"
#include "pfl/solver.hpp"
#include "pfl/statistics.hpp"

namespace fs = std::filesystem;

namespace pfl {
namespace {

constexpr const char* kManifest = "manifest.sha256";

bool dimensionless(const RunConfig& c) { return c.medium.units == "dimensionless"; }

StepPlan plan_from(const RunConfig& c) {
    return StepPlan::for_length(c.medium.length, c.plan.steps, c.plan.snapshot_every);
}

class Context {
public:
    Context(const RunConfig& config, const RunOptions& options) : config(config), jobs(std::max(1u, options.jobs)) {
        result.out_dir = options.out_dir;
    }

    const RunConfig& config;
    unsigned jobs;
    ScenarioResult result;

    fs::path path(const std::string& name) const { return result.out_dir / name; }
    void add(const fs::path& p) { result.files.push_back(p.lexically_relative(result.out_dir)); }

    void csv(const std::string& name, const std::function<void(const fs::path&)>& write) {
        if (!config.run.emit_csv) return;
        write(path(name));
        add(path(name));
    }
    void snapshot(const std::string& name, const Field2D& f, double z) {
        write_snapshot(path(name), f, z);
        add(path(name));
    }
    void pgm(const std::string& name, std::span<const double> values, std::size_t w, std::size_t h) {
        if (!config.run.emit_pgm) return;
        const auto [img, scale] = write_density_pgm(path(name), values, w, h);
        add(img);
        add(scale);
    }
    void density_pgm(const std::string& name, const Field2D& f) {
        const auto d = f.density();
        pgm(name, d, f.grid().nx(), f.grid().ny());
    }
    template <class T>
    void note(const std::string& key, const T& value) {
        if constexpr (std::is_floating_point_v<T>)
            result.summary[key] = format_double(value);
        else if constexpr (std::is_arithmetic_v<T>)
            result.summary[key] = std::to_string(value);
        else
            result.summary[key] = value;
    }
};

std::string tau_tag(double t) {
    std::string s = format_double(t);
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

std::string numbered(const char* stem, std::size_t n, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, n, ext);
    return buf;
}

Field2D uniform_background(const RunConfig& c, const char* scenario) {
    if (c.beam.profile != "uniform")
        throw InvalidArgument(std::string(scenario) + " needs beam.profile = uniform");
    return initial_field(c);
}

void run_propagate(Context& ctx) {
    const auto& c = ctx.config;
    const auto medium = medium_from(c);
    const Field2D f0 = initial_field(c);
    StepPlan plan = plan_from(c);
    if (!c.run.emit_snapshots) plan.snapshot_every = 0;
    const auto rec = propagate(f0, medium, plan);

    ctx.snapshot("input.pfl", f0, 0.0);
    ctx.snapshot("output.pfl", rec.final_field, plan.length());
    for (std::size_t s = 0; s < rec.snapshots.size(); ++s)
        ctx.snapshot(numbered("snapshot", s + 1, ".pfl"), rec.snapshots[s].field, rec.snapshots[s].z);
    for (const auto& p : write_metrics(ctx.result.out_dir, "metrics", rec)) ctx.add(p);
    ctx.density_pgm("input_density.pgm", f0);
    ctx.density_pgm("output_density.pgm", rec.final_field);

    ctx.note("steps", rec.n_steps);
    ctx.note("dz", rec.dz);
    ctx.note("max_phase_per_step", rec.max_phase_per_step);
    ctx.note("power_in", rec.power_trace.front().power);
    ctx.note("power_out", rec.power_trace.back().power);
}

GroupVelocityConfig probe_config(const RunConfig& c) {
    GroupVelocityConfig gv;
    gv.probe_waist = c.probe.waist;
    gv.probe_ratio = c.probe.ratio;
    gv.fit_start = c.probe.fit_start;
    gv.max_residual = c.probe.max_residual;
    return gv;
}

void note_fit(Context& ctx, const BogoliubovFit& fit, const std::string& prefix = "") {
    ctx.note(prefix + "mu", fit.mu);
    ctx.note(prefix + "c_s", fit.c_s);
    ctx.note(prefix + "c_s_ci", fit.c_s_ci);
    ctx.note(prefix + "xi", fit.xi);
    ctx.note(prefix + "fit_rms_residual", fit.rms_residual);
}

void run_dispersion(Context& ctx) {
    const auto& c = ctx.config;
    const auto medium = medium_from(c);
    const Field2D bg = uniform_background(c, "dispersion");
    StepPlan plan = plan_from(c);
    if (plan.snapshot_every == 0) plan.snapshot_every = std::max<std::size_t>(1, plan.n_steps / 40);
    const auto bg_run = propagate(bg, medium, plan);

    const auto& ks = c.probe.k_values;
    std::vector<GroupVelocitySample> samples(ks.size());
    parallel_for(ks.size(), ctx.jobs, [&](std::size_t i) {
        auto gv = probe_config(c);
        gv.k_perp = ks[i];
        samples[i] = measure_group_velocity(bg, bg_run, gv, medium, plan);
    });
    const double mass = medium.n0 * medium.k0();
    const auto curve = dispersion_from_group_velocity(samples, mass);

    ctx.csv("dispersion.csv", [&](const fs::path& p) { write_dispersion_csv(p, curve); });
    note_fit(ctx, curve.fit);
    ctx.note("c_s_analytic", std::sqrt(std::abs(medium.g()) * bg.max_density() / mass));
}

void run_sound_scaling(Context& ctx) {
    const auto& c = ctx.config;
    const auto medium = medium_from(c);
    std::vector<double> rho;
    for (double d : c.probe.densities)
        rho.push_back(dimensionless(c) ? d : field_sq_from_intensity(d, medium.n0));

    SoundScalingOptions opt;
    opt.k_xi = c.probe.k_values;
    opt.probe = probe_config(c);
    opt.waist_xi = c.probe.waist_xi;
    opt.tag = dimensionless(c) ? UnitTag::dimensionless : UnitTag::physical;
    const auto res = sound_speed_scaling(grid_from(c), rho, medium, plan_from(c), opt, ctx.jobs);

    std::vector<std::vector<CsvCell>> rows;
    for (std::size_t i = 0; i < res.members.size(); ++i) {
        const auto& m = res.members[i];
        rows.push_back({c.probe.densities[i], m.xi, m.curve.fit.c_s, m.curve.fit.c_s_ci, m.curve.fit.mu});
        ctx.csv(numbered("dispersion", i, ".csv"), [&](const fs::path& p) { write_dispersion_csv(p, m.curve); });
    }
    ctx.csv("sound_scaling.csv",
            [&](const fs::path& p) { write_csv(p, {"density", "xi", "c_s", "c_s_ci", "mu"}, rows); });
    ctx.note("exponent", res.exponent);
    ctx.note("exponent_ci", res.exponent_ci);
}

void run_precondensation(Context& ctx) {
    const auto& c = ctx.config;
    const auto medium = medium_from(c);
    const double dz = c.plan.steps > 0 ? c.medium.length / static_cast<double>(c.plan.steps) : 0.0;
    Field2D f = initial_field(c);
    double z = 0.0;
    std::vector<std::vector<CsvCell>> rows;
    for (double tau : c.statistics.taus) {
        if (tau > z) {
            if (!(dz > 0.0)) throw InvalidArgument("precondensation needs plan.steps > 0 to reach tau " + format_double(tau));
            const auto n = static_cast<std::size_t>(std::max(1L, std::lround((tau - z) / dz)));
            MediumParams m = medium;
            m.length = tau - z;
            f = propagate(f, m, StepPlan::for_length(tau - z, n)).final_field;
            z = tau;
        }
        const auto st = intensity_statistics(f, c.statistics.bins, medium.n0);
        const auto g1 = coherence_g1(std::span(&f, 1), CoherenceMethod::rotate_pair);
        const std::string tag = tau_tag(tau);
        ctx.csv("intensity_pdf_tau_" + tag + ".csv", [&](const fs::path& p) { write_intensity_csv(p, st); });
        ctx.csv("g1_tau_" + tag + ".csv", [&](const fs::path& p) { write_coherence_csv(p, g1); });
        ctx.density_pgm("density_tau_" + tag + ".pgm", f);
        rows.push_back({tau, st.mode, static_cast<long long>(st.mode_bin), st.g2, st.mean});
        ctx.note("g2_tau_" + tag, st.g2);
        ctx.note("mode_tau_" + tag, st.mode);
    }
    ctx.csv("precondensation.csv",
            [&](const fs::path& p) { write_csv(p, {"tau", "mode", "mode_bin", "g2", "mean"}, rows); });
}

void run_structure_factor(Context& ctx) {
    const auto& c = ctx.config;
    const auto medium = medium_from(c);
    const Field2D bg = uniform_background(c, "structure-factor");
    const double sigma = c.structure.noise * std::sqrt(bg.max_density());
    const StepPlan plan = plan_from(c);
    const std::size_t n = c.structure.realizations;
    std::vector<Field2D> sig(n), ref(n);
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
        const auto s = add_white_noise(bg, sigma, derive_seed(c.run.seed, Stream::signal_noise, i));
        sig[i] = propagate(s, medium, plan).final_field;
        ref[i] = add_white_noise(bg, sigma, derive_seed(c.run.seed, Stream::reference_noise, i));
    });
    const auto sf = structure_factor(sig, ref);
    ctx.csv("structure_factor.csv", [&](const fs::path& p) { write_structure_factor_csv(p, sf); });
    ctx.note("rings", sf.k.size());
    ctx.note("realizations", n);
    if (!sf.s.empty()) ctx.note("s_min", *std::min_element(sf.s.begin(), sf.s.end()));
}

void run_vortices(Context& ctx) {
    const auto& c = ctx.config;
    const auto& v = c.vortices;
    const auto medium = medium_from(c);
    Field2D f = initial_field(c);
    if (v.mode == "imprint") {
        for (std::size_t i = 0; i < v.charges.size(); ++i) {
            VortexImprint vi;
            vi.charge = v.charges[i];
            vi.center = {v.x[i], v.y[i]};
            if (v.core > 0.0) vi.core_width = v.core;
            f = imprint_vortex(f, vi);
        }
    } else {
        DarkStripe ds;
        ds.position = v.stripe_position;
        ds.angle = v.stripe_angle;
        ds.contrast = v.stripe_contrast;
        if (v.stripe_width > 0.0) ds.width = v.stripe_width;
        f = imprint_dark_stripe(f, ds);
    }
    const auto initial = detect_vortices(f, v.density_floor);
    const auto rec = propagate(f, medium, plan_from(c));
    const auto final = detect_vortices(rec.final_field, v.density_floor);

    ctx.csv("vortices_initial.csv", [&](const fs::path& p) { write_vortices_csv(p, initial); });
    ctx.csv("vortices_final.csv", [&](const fs::path& p) { write_vortices_csv(p, final); });
    ctx.density_pgm("density_initial.pgm", f);
    ctx.density_pgm("density_final.pgm", rec.final_field);
    ctx.note("vortices_initial", initial.vortices.size());
    ctx.note("vortices_final", final.vortices.size());
    ctx.note("winding_initial", initial.total_winding());
    ctx.note("winding_final", final.total_winding());
}

void write_gem_state(Context& ctx, const GemState& st, const std::string& stem) {
    ctx.csv(stem + "_input.csv", [&](const fs::path& p) { write_trace_csv(p, st.t, st.e_in); });
    ctx.csv(stem + "_output.csv", [&](const fs::path& p) { write_trace_csv(p, st.t, st.e_out); });
    ctx.pgm(stem + "_alpha.pgm", st.alpha_history, st.history_nz, st.history_nt);
}

void run_gem(Context& ctx) {
    const auto& c = ctx.config;
    const auto gc = gem_from(c);
    const auto train = pulses_from(c);
    const auto st = gem_evolve(gc, train);
    write_gem_state(ctx, st, "gem");
    double e_in = 0.0, e_out = 0.0;
    for (std::size_t n = 0; n < st.t.size(); ++n) {
        e_in += std::norm(st.e_in[n]) * gc.dt();
        e_out += std::norm(st.e_out[n]) * gc.dt();
    }
    ctx.note("input_energy", e_in);
    ctx.note("output_energy", e_out);
    ctx.note("final_alpha_norm", st.alpha_norm.back());
    if (train.pulses.size() == 1 && !gc.flip_times.empty()) {
        const auto eff = gem_efficiency_measured(gc, train.pulses[0], c.gem.window_widths);
        ctx.note("sigma_sim", eff.sigma);
        ctx.note("sigma_theory", gem_efficiency_theory(gc.g, gc.density, gc.eta));
        ctx.note("echo_peak_time", eff.echo_peak_time);
        ctx.note("predicted_echo_time", eff.predicted_echo_time);
    }
}

void run_gem_sweep(Context& ctx) {
    const auto& c = ctx.config;
    const auto rows = gem_efficiency_sweep(gem_from(c), pulses_from(c).pulses.at(0), c.gem.ratios, ctx.jobs);
    std::vector<std::vector<CsvCell>> cells;
    double worst = 0.0;
    for (const auto& r : rows) {
        cells.push_back({r.ratio, r.sigma_theory, r.sigma_sim});
        if (r.sigma_theory > 0.0) worst = std::max(worst, std::abs(r.sigma_sim - r.sigma_theory) / r.sigma_theory);
    }
    ctx.csv("gem_efficiency_sweep.csv",
            [&](const fs::path& p) { write_csv(p, {"ratio", "sigma_theory", "sigma_sim"}, cells); });
    ctx.note("points", rows.size());
    ctx.note("worst_relative_deviation", worst);
}

void run_fifo_filo(Context& ctx) {
    const auto& c = ctx.config;
    const auto mode = c.gem.mode == "fifo" ? RecallMode::fifo : RecallMode::filo;
    const auto res = fifo_filo_experiment(gem_from(c), pulses_from(c), mode, c.gem.tau, c.gem.tau2);
    write_gem_state(ctx, res.state, std::string(to_string(mode)));
    std::vector<std::vector<CsvCell>> rows;
    std::string order;
    for (const auto& d : res.output) {
        rows.push_back({d.label, d.peak_time, d.peak_intensity});
        order += d.label;
    }
    ctx.csv("recalled_pulses.csv",
            [&](const fs::path& p) { write_csv(p, {"label", "peak_time", "peak_intensity"}, rows); });
    ctx.note("mode", std::string(to_string(mode)));
    ctx.note("output_order", order);
    ctx.note("order_reversed", std::string(res.order_reversed ? "true" : "false"));
}

void remove_previous_artifacts(const fs::path& dir) {
    std::ifstream is(dir / kManifest);
    if (!is) return;
    std::string line;
    while (std::getline(is, line)) {
        const auto sep = line.find("  ");
        if (sep == std::string::npos) continue;
        const fs::path rel = line.substr(sep + 2);
        if (rel.is_absolute() || rel.lexically_normal().string().starts_with("..")) continue;
        std::error_code ec;
        if (fs::is_regular_file(dir / rel, ec)) fs::remove(dir / rel, ec);
    }
    is.close();
    fs::remove(dir / kManifest);
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& scenario, const E& e) {
    throw E(scenario + ": " + e.what());
}

}  // namespace

namespace {

Field2D profile_field(const RunConfig& c, std::uint64_t seed) {
    const Grid g = grid_from(c);
    const auto& b = c.beam;
    if (!dimensionless(c)) {
        if (b.profile == "uniform") return plane_wave(g, b.intensity, c.medium.n0);
        if (b.profile == "gaussian") return gaussian_beam(g, b.waist, b.power, c.medium.n0, {b.center_x, b.center_y});
        return speckle(g, b.correlation, b.intensity, seed, c.medium.n0);
    }
    Field2D f(g, UnitTag::dimensionless);
    if (b.profile == "speckle") {
        f = speckle(g, b.correlation, b.intensity, seed, 1.0);
        const double to_density = 1.0 / std::sqrt(field_sq_from_intensity(1.0, 1.0));
        for (auto& v : f.values()) v *= to_density;
        f.set_unit_tag(UnitTag::dimensionless);
        return f;
    }
    const double amp = std::sqrt(b.intensity);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (b.profile == "uniform") {
                f(i, j) = amp;
            } else {
                const double dx = g.x(i) - b.center_x, dy = g.y(j) - b.center_y;
                f(i, j) = amp * std::exp(-(dx * dx + dy * dy) / (b.waist * b.waist));
            }
        }
    return f;
}

}  // namespace

Field2D initial_field(const RunConfig& c, std::uint64_t seed_index) {
    Field2D f = profile_field(c, derive_seed(c.run.seed, Stream::ensemble, seed_index));
    if (c.beam.noise > 0.0)
        f = add_white_noise(f, c.beam.noise * std::sqrt(f.max_density()),
                            derive_seed(c.run.seed, Stream::initial_noise, seed_index));
    return f;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!md || EVP_DigestInit_ex(md.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256: digest init failed");
    std::vector<char> buf(1 << 16);
    while (is) {
        is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (is.gcount() > 0 && EVP_DigestUpdate(md.get(), buf.data(), static_cast<std::size_t>(is.gcount())) != 1)
            throw IoError("sha256: digest update failed");
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(md.get(), digest, &len) != 1) throw IoError("sha256: digest final failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

ScenarioResult run_scenario(const RunConfig& config, const RunOptions& options) {
    validate_config(config);
    if (options.out_dir.empty()) throw InvalidArgument("run_scenario: output directory is empty");
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());
    remove_previous_artifacts(options.out_dir);

    static const std::map<std::string, void (*)(Context&)> table{
        {"propagate", run_propagate},
        {"dispersion", run_dispersion},
        {"sound-scaling", run_sound_scaling},
        {"precondensation", run_precondensation},
        {"structure-factor", run_structure_factor},
        {"vortices", run_vortices},
        {"gem", run_gem},
        {"gem-efficiency-sweep", run_gem_sweep},
        {"fifo-filo", run_fifo_filo},
    };
    const std::string& name = config.run.scenario;
    Context ctx(config, options);
    try {
        table.at(name)(ctx);

        const fs::path ini = ctx.path("run.ini");
        std::ofstream(ini, std::ios::binary | std::ios::trunc) << serialize_config(config);
        ctx.add(ini);
        const fs::path summary = ctx.path("summary.txt");
        {
            std::ofstream os(summary, std::ios::binary | std::ios::trunc);
            os << "scenario " << name << "\n";
            for (const auto& [k, v] : ctx.result.summary) os << k << ' ' << v << '\n';
            if (!os) throw IoError("failed writing " + summary.string());
        }
        ctx.add(summary);

        ctx.result.manifest = ctx.path(kManifest);
        std::ofstream os(ctx.result.manifest, std::ios::binary | std::ios::trunc);
        for (const auto& f : ctx.result.files) os << sha256_file(ctx.path(f.string())) << "  " << f.generic_string() << '\n';
        if (!os) throw IoError("failed writing " + ctx.result.manifest.string());
    } catch (const InvalidArgument& e) {
        rethrow_with(name, e);
    } catch (const NumericalError& e) {
        rethrow_with(name, e);
    } catch (const IoError& e) {
        rethrow_with(name, e);
    }
    return ctx.result;
}

}  // namespace pfl
