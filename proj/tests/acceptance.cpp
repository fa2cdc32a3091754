#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "pfl/builders.hpp"
#include "pfl/config.hpp"
#include "pfl/dispersion.hpp"
#include "pfl/gem.hpp"
#include "pfl/hydro.hpp"
#include "pfl/log.hpp"
#include "pfl/rng.hpp"
#include "pfl/scenarios.hpp"
#include "pfl/solver.hpp"
#include "pfl/statistics.hpp"

using namespace pfl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

class Report {
public:
    template <class T>
    Report& operator<<(const T& v) {
        os_ << v;
        return *this;
    }
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok_ = false;
            failed_ += (failed_.empty() ? "" : "; ") + what;
        }
    }
    bool ok() const { return ok_; }
    std::string text() const { return failed_.empty() ? os_.str() : os_.str() + " [failed: " + failed_ + "]"; }

private:
    std::ostringstream os_;
    bool ok_ = true;
    std::string failed_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Field2D uniform(const Grid& g, double amp = 1.0) {
    return Field2D(g, std::vector<Complex>(g.size(), Complex(amp, 0.0)), UnitTag::dimensionless);
}

double l2_distance(const Field2D& a, const Field2D& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += std::norm(a.values()[n] - b.values()[n]);
    return std::sqrt(s * a.grid().cell_area());
}

// Unit fluid with a density bump and a gentle phase modulation.
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

void free_diffraction(Report& r) {
    const Grid g = make_grid(256, 256, 6e-6, 6e-6);
    const double w0 = 100e-6;
    MediumParams m;
    m.wavelength = 780e-9;
    m.chi3 = 0.0;
    m.alpha = 0.0;
    const double zr = kPi * w0 * w0 / m.wavelength;
    m.length = 2.0 * zr;
    const auto t0 = std::chrono::steady_clock::now();
    ScopedWarningCapture quiet;
    const auto rec = propagate(gaussian_beam(g, w0, 1.0, 1.0), m, StepPlan::for_length(m.length, 1000, 125));
    const double t = seconds_since(t0);
    double worst = 0.0;
    for (const auto& s : rec.snapshots) {
        const double expected = w0 * std::sqrt(1.0 + (s.z / zr) * (s.z / zr));
        worst = std::max(worst, std::abs(second_moment_width(s.field).wx / expected - 1.0));
    }
    r << "worst w(z) error " << worst << " over " << rec.snapshots.size() << " planes, " << t << " s at 256x256";
    r.require(!rec.snapshots.empty() && std::abs(rec.snapshots.back().z - m.length) < 1e-9 * m.length,
              "last plane at 2 zR");
    r.require(worst <= 0.005, "width within 0.5%");
    r.require(t < 10.0, "runtime < 10 s");
}

void unitarity(Report& r) {
    const Grid g = make_grid(64, 64, 0.5, 0.5);
    MediumParams m = dimensionless_medium(5.0);
    m.potential = build_potential(g, {.kind = PotentialKind::gaussian_defect, .amplitude = {0.5, 0.0}, .waist = 3.0});
    const auto rec = propagate(smooth_fluid(g), m, StepPlan::for_length(5.0, 1000));
    const double p0 = rec.power_trace.front().power;
    double worst = 0.0;
    for (const auto& p : rec.power_trace) worst = std::max(worst, std::abs(p.power - p0) / p0);
    r << "max relative power drift " << worst << " over " << rec.power_trace.size() - 1 << " steps";
    r.require(m.chi3 < 0.0 && m.alpha == 0.0, "defocusing and lossless");
    r.require(rec.power_trace.size() == 1001, "1000 steps");
    r.require(worst <= 1e-10, "drift <= 1e-10");
}

void loss_law(Report& r) {
    const Grid g = make_grid(64, 64, 10e-6, 10e-6);
    MediumParams m;
    m.chi3 = 0.0;
    m.alpha = 35.0;
    m.length = 0.05;
    const auto rec = propagate(gaussian_beam(g, 80e-6, 0.5, 1.0), m, StepPlan::for_length(m.length, 200));
    const double p0 = rec.power_trace.front().power;
    double worst = 0.0;
    for (const auto& p : rec.power_trace) worst = std::max(worst, std::abs(p.power / (p0 * std::exp(-m.alpha * p.z)) - 1.0));
    r << "max relative deviation from P0 exp(-alpha z) " << worst << ", P(L)/P0 " << rec.power_trace.back().power / p0;
    r.require(worst <= 1e-6, "within 1e-6");
}

void strang_order(Report& r) {
    const Grid g = make_grid(64, 64, 0.5, 0.5);
    const Field2D f = smooth_fluid(g);
    const MediumParams m = dimensionless_medium(2.0);
    ScopedWarningCapture quiet;
    const auto a = propagate(f, m, StepPlan::for_length(2.0, 100)).final_field;
    const auto b = propagate(f, m, StepPlan::for_length(2.0, 200)).final_field;
    const auto c = propagate(f, m, StepPlan::for_length(2.0, 400)).final_field;
    const double ratio = l2_distance(a, b) / l2_distance(b, c);
    r << "error ratio " << ratio;
    r.require(ratio >= 3.5 && ratio <= 4.5, "ratio in [3.5, 4.5]");
}

// Rubidium-line beam on a uniform background with Delta n = 1e-4.
void sonic_branch(Report& r) {
    const double dn = 1e-4, n0 = 1.0, n2 = -1e-10;
    MediumParams m = MediumParams::from_n2(780e-9, n0, n2, 0.0, 0.0);
    const double k0 = m.k0();
    const double znl = 1.0 / (k0 * dn);
    const double xi = std::sqrt(znl / (n0 * k0));
    const double tau = 40.0;
    m.length = tau * znl;
    const Grid g = make_grid(256, 256, 0.75 * xi, 0.75 * xi);
    const Field2D bg = plane_wave(g, dn / std::abs(n2), n0);
    const auto plan = StepPlan::for_length(m.length, 1600, 40);

    const auto t0 = std::chrono::steady_clock::now();
    const auto bgr = propagate(bg, m, plan);
    std::vector<GroupVelocitySample> samples;
    for (double kxi : {0.1, 0.15, 0.2, 0.25, 0.3}) {
        GroupVelocityConfig c;
        c.k_perp = kxi / xi;
        c.probe_waist = 10.0 * xi;
        c.probe_ratio = 1e-4;
        samples.push_back(measure_group_velocity(bg, bgr, c, m, plan));
    }
    const auto curve = dispersion_from_group_velocity(samples, n0 * k0);
    const double t = seconds_since(t0);

    const double c_analytic = std::sqrt(dn / n0);
    double lo = samples.front().v_g, hi = lo;
    for (const auto& s : samples) {
        lo = std::min(lo, s.v_g);
        hi = std::max(hi, s.v_g);
    }
    const double spread = (hi - lo) / lo;
    const double err = std::abs(curve.fit.c_s / c_analytic - 1.0);
    r << "v_g spread " << spread << " for k xi in [0.1, 0.3], c_s " << curve.fit.c_s << " vs " << c_analytic
      << " (" << err << "), " << t << " s at 256x256";
    r.require(spread <= 0.10, "v_g k-independent within 10%");
    r.require(err <= 0.05, "c_s within 5%");
    r.require(t < 300.0, "runtime < 5 min");
}

void sound_scaling(Report& r) {
    const Grid g = make_grid(1024, 8, 0.5, 4.0);
    const MediumParams m = dimensionless_medium(30.0);
    const auto plan = StepPlan::for_length(30.0, 1500, 25);
    SoundScalingOptions opt;
    opt.tag = UnitTag::dimensionless;
    opt.probe.probe_ratio = 1e-4;
    opt.probe.fit_start = 0.5;
    opt.waist_xi = 20.0;
    const std::vector<double> rho{1.0, std::pow(10.0, 1.0 / 3.0), std::pow(10.0, 2.0 / 3.0), 10.0};
    const auto res = sound_speed_scaling(g, rho, m, plan, opt);
    r << "exponent " << res.exponent << " +- " << res.exponent_ci << " over rho in [1, 10]";
    r.require(std::abs(res.exponent - 0.5) <= 0.05, "exponent 0.50 +- 0.05");
}

void precondensation(Report& r) {
    const Grid g = make_grid(128, 128, 0.5, 0.5);
    Field2D f = speckle(g, 2.0, 1.0, derive_seed(1, Stream::ensemble, 0));
    double mean = 0.0;
    for (const auto& v : f.values()) mean += std::norm(v) / static_cast<double>(f.size());
    std::vector<Complex> psi(f.values().begin(), f.values().end());
    for (auto& v : psi) v /= std::sqrt(mean);
    f = Field2D(g, std::move(psi), UnitTag::dimensionless);
    const double dz = 0.01;
    double z = 0.0;
    std::vector<IntensityStatistics> st;
    for (double tau : {1.0, 3.0, 6.0}) {
        MediumParams m = dimensionless_medium(tau - z);
        f = propagate(f, m, StepPlan::for_length(tau - z, static_cast<std::size_t>(std::lround((tau - z) / dz))))
                .final_field;
        z = tau;
        st.push_back(intensity_statistics(f, 50));
    }
    r << "mode/<I> " << st[0].mode / st[0].mean << ", " << st[1].mode / st[1].mean << ", " << st[2].mode / st[2].mean
      << "; g2 " << st[0].g2 << ", " << st[1].g2 << ", " << st[2].g2 << " at tau 1, 3, 6";
    for (const auto& s : st) r.require(s.mode > 0.0, "mode > 0");
    r.require(st[0].g2 > st[1].g2 && st[1].g2 > st[2].g2, "g2 decreasing");
}

GemConfig gem_base(double ratio) {
    GemConfig c;
    c.g = 1.0;
    c.eta = 100.0;
    c.z_extent = 1.0;
    c.nz = 2000;
    c.t_extent = 10.0;
    c.nt = 1001;
    c.density = ratio * c.eta / (2.0 * kPi * c.g);
    return c;
}

void gem_efficiency(Report& r) {
    GemConfig c = gem_base(1.0);
    c.flip_times = {4.0};
    const Pulse p{2.0, 0.2, 1.0, "A"};
    const auto rows = gem_efficiency_sweep(c, p, {0.5, 1.0, 1.5, 2.0, 3.0});
    double worst = 0.0, worst_t = 0.0;
    for (const auto& row : rows) worst = std::max(worst, std::abs(row.sigma_sim / row.sigma_theory - 1.0));
    for (double ratio : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        GemConfig e = gem_base(ratio);
        e.flip_times = {4.0};
        worst_t = std::max(worst_t, std::abs(gem_efficiency_measured(e, p).echo_peak_time - 6.0));
    }
    r << "worst sigma deviation " << worst << " over 5 ratios, worst echo offset " << worst_t << " (dt " << c.dt() << ")";
    r.require(rows.size() == 5, "five ratios");
    r.require(worst <= 0.05, "sigma within 5%");
    r.require(worst_t <= c.dt() + 1e-12, "echo at 2 tau within one cell");
}

void fifo_filo(Report& r) {
    const GemConfig c = gem_base(3.0);
    const PulseTrain train{{Pulse{1.0, 0.2, 1.0, "A"}, Pulse{2.0, 0.2, 1.0, "B"}}};
    const auto filo = fifo_filo_experiment(c, train, RecallMode::filo, 3.0);
    const auto fifo = fifo_filo_experiment(c, train, RecallMode::fifo, 3.0, 6.0);
    auto order = [](const FifoFiloResult& res) {
        std::string s;
        for (const auto& p : res.output) s += p.label;
        return s;
    };
    auto times = [](const FifoFiloResult& res) {
        std::ostringstream os;
        for (const auto& p : res.output) os << ' ' << p.label << '@' << p.peak_time;
        return os.str();
    };
    r << "single flip:" << times(filo) << "; off/flip/on:" << times(fifo);
    r.require(order(filo) == "BA" && filo.output[0].peak_time < filo.output[1].peak_time, "single flip gives B then A");
    r.require(order(fifo) == "AB" && fifo.output[0].peak_time < fifo.output[1].peak_time, "gated schedule gives A then B");
}

void vortex_invariants(Report& r) {
    const Grid g = make_grid(128, 128, 1.0, 1.0);
    bool exact = true;
    for (int q : {1, -1, 2, -2, 3, -3}) {
        const auto set = detect_vortices(imprint_vortex(uniform(g), {.charge = q, .center = {0.3, 0.4}}));
        exact = exact && set.total_winding() == q;
    }

    struct Core {
        double x, y;
        int q;
    };
    const std::vector<Core> cores{{-30.3, 20.4, 1}, {25.7, -18.2, -1}, {5.1, 35.6, 2},
                                  {-35.2, -30.9, -2}, {35.4, 30.1, 3}, {-4.6, -5.3, -3}};
    Field2D f = uniform(g);
    int total = 0;
    for (const auto& c : cores) {
        f = imprint_vortex(f, {.charge = c.q, .center = {c.x, c.y}, .core_width = 2.0});
        total += c.q;
    }
    exact = exact && detect_vortices(f).total_winding() == total;

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> idx(0, g.nx() - 1);
    const double clearance = 3.0;
    int loops = 0, bad = 0;
    double worst = 0.0;
    while (loops < 10000) {
        std::size_t i0 = idx(rng), i1 = idx(rng), j0 = idx(rng), j1 = idx(rng);
        if (i0 > i1) std::swap(i0, i1);
        if (j0 > j1) std::swap(j0, j1);
        if (i0 == i1 || j0 == j1) continue;
        const double x0 = g.x(i0), x1 = g.x(i1), y0 = g.y(j0), y1 = g.y(j1);
        bool near = false;
        int enclosed = 0;
        for (const auto& c : cores) {
            const double dx = std::max({x0 - c.x, 0.0, c.x - x1}), dy = std::max({y0 - c.y, 0.0, c.y - y1});
            const double inside = std::min({c.x - x0, x1 - c.x, c.y - y0, y1 - c.y});
            near |= (inside > 0.0 ? inside : std::hypot(dx, dy)) < clearance;
            if (c.x > x0 && c.x < x1 && c.y > y0 && c.y < y1) enclosed += c.q;
        }
        if (near) continue;
        ++loops;
        const double err = std::abs(circulation(f, rectangle_loop(i0, j0, i1, j1)) - 2.0 * kPi * enclosed);
        worst = std::max(worst, err);
        if (err > 1e-9) ++bad;
    }
    r << "charges +-1, +-2, +-3 " << (exact ? "recovered" : "NOT recovered") << "; " << loops
      << " loops, worst circulation error " << worst;
    r.require(exact, "total winding exact");
    r.require(bad == 0, "circulation quantized");
}

std::map<long, double> linear_structure_oracle(const Grid& g, double tau) {
    const double dk = std::min(g.dkx(), g.dky());
    std::map<long, std::pair<double, int>> acc;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double k = std::hypot(g.kx(i), g.ky(j));
            const long n = std::lround(k / dk);
            if (n == 0 || n * dk > std::min(g.nyquist_x(), g.nyquist_y()) + 1e-12) continue;
            const double e = 0.5 * k * k;
            const double w = std::sqrt(e * (e + 2.0));
            acc[n].first += std::pow(std::cos(w * tau), 2) + std::pow(e / w * std::sin(w * tau), 2);
            acc[n].second += 1;
        }
    std::map<long, double> out;
    for (const auto& [n, a] : acc) out[n] = a.first / a.second;
    return out;
}

void structure_normalization(Report& r) {
    const Grid g = make_grid(64, 64, 1.0, 1.0);
    std::vector<Field2D> a, b;
    for (std::uint64_t i = 0; i < 200; ++i) {
        a.push_back(add_white_noise(uniform(g), 0.05, derive_seed(9, Stream::signal_noise, i)));
        b.push_back(add_white_noise(uniform(g), 0.05, derive_seed(9, Stream::reference_noise, i)));
    }
    const auto self = structure_factor(a, b);
    double worst_z = 0.0;
    for (std::size_t n = 0; n < self.k.size(); ++n) worst_z = std::max(worst_z, std::abs(self.s[n] - 1.0) / self.sigma[n]);

    const Grid h = make_grid(64, 64, 0.5, 0.5);
    const double tau = 2.5;
    const MediumParams m = dimensionless_medium(tau);
    const auto plan = StepPlan::for_length(tau, 400);
    std::vector<Field2D> sig, ref;
    for (std::uint64_t i = 0; i < 200; ++i) {
        sig.push_back(propagate(add_white_noise(uniform(h), 0.02, derive_seed(3, Stream::signal_noise, i)), m, plan)
                          .final_field);
        ref.push_back(add_white_noise(uniform(h), 0.02, derive_seed(3, Stream::reference_noise, i)));
    }
    const auto sf = structure_factor(sig, ref);
    const auto oracle = linear_structure_oracle(h, tau);
    double worst_rel = 0.0, max_low = 0.0;
    std::size_t n = 0, low = 0;
    for (const auto& [ring, s] : oracle) {
        if (n >= sf.k.size()) break;
        worst_rel = std::max(worst_rel, std::abs(sf.s[n] - s) / s);
        if (sf.k[n] < 1.0) {
            max_low = std::max(max_low, sf.s[n]);
            ++low;
        }
        ++n;
    }
    r << "self-referenced worst |S-1|/sigma " << worst_z << " over " << self.k.size() << " rings; defocusing max S "
      << max_low << " over " << low << " rings with k xi < 1, worst oracle deviation " << worst_rel;
    r.require(!self.k.empty() && worst_z <= 3.0, "S = 1 within 3 sigma");
    r.require(sf.k.size() == oracle.size(), "ring count matches oracle");
    r.require(low > 0 && max_low < 1.0, "S < 1 below k xi = 1");
    r.require(worst_rel <= 0.10, "oracle within 10%");
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void reproducibility(Report& r) {
    const fs::path configs = fs::path(PFL_SOURCE_DIR) / "configs";
    const fs::path scratch = fs::temp_directory_path() / "pfl_acceptance";
    std::size_t runs = 0, csvs = 0;
    std::string differing;
    std::map<std::string, fs::path> by_scenario;
    for (const auto& e : fs::directory_iterator(configs))
        if (e.path().extension() == ".ini") by_scenario.emplace(load_config(e.path().string()).run.scenario, e.path());
    for (const auto& [name, path] : by_scenario) {
        const RunConfig c = load_config(path.string());
        std::array<ScenarioResult, 2> res;
        for (int k = 0; k < 2; ++k) {
            const fs::path out = scratch / (name + (k ? "_b" : "_a"));
            fs::remove_all(out);
            res[k] = run_scenario(c, {out, k ? 2u : 1u});
        }
        ++runs;
        for (const auto& f : res[0].files) {
            if (f.extension() != ".csv") continue;
            ++csvs;
            if (slurp(res[0].out_dir / f) != slurp(res[1].out_dir / f)) differing += " " + name + "/" + f.string();
        }
    }
    fs::remove_all(scratch);
    r << runs << " scenarios run twice, " << csvs << " CSV files compared";
    r.require(runs == scenario_names().size(), "every scenario covered");
    r.require(differing.empty(), "byte-identical:" + differing);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, void (*)(Report&)>> criteria{
        {"free diffraction", free_diffraction},
        {"unitarity", unitarity},
        {"loss law", loss_law},
        {"Strang order", strang_order},
        {"sonic branch", sonic_branch},
        {"sound-speed scaling", sound_scaling},
        {"pre-condensation", precondensation},
        {"GEM efficiency", gem_efficiency},
        {"FIFO/FILO", fifo_filo},
        {"vortex invariants", vortex_invariants},
        {"structure factor", structure_normalization},
        {"reproducibility", reproducibility},
    };
    ScopedWarningCapture quiet;
    int failures = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[n].second(r);
        } catch (const std::exception& e) {
            r << "exception: " << e.what();
            r.require(false, "completed");
        }
        if (!r.ok()) ++failures;
        std::printf("%s %2zu %-20s %s (%.1f s)\n", r.ok() ? "PASS" : "FAIL", n + 1, criteria[n].first,
                    r.text().c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
