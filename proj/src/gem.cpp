#include "pfl/gem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfl/error.hpp"
#include "pfl/medium.hpp"
#include "pfl/parallel.hpp"

namespace pfl {
namespace {

constexpr double kPi = constants::pi;
constexpr Complex kI{0.0, 1.0};

bool increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

// Cumulative trapezoid of alpha along z: out[j] = integral from z_0 to z_j.
void cumulative_trapezoid(const std::vector<Complex>& a, double dz, std::vector<Complex>& out) {
    out[0] = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) out[j] = out[j - 1] + 0.5 * dz * (a[j - 1] + a[j]);
}

Complex trapezoid(const std::vector<Complex>& a, double dz) {
    Complex s = 0.5 * (a.front() + a.back());
    for (std::size_t j = 1; j + 1 < a.size(); ++j) s += a[j];
    return s * dz;
}

double norm_integral(const std::vector<Complex>& a, double dz) {
    double s = 0.5 * (std::norm(a.front()) + std::norm(a.back()));
    for (std::size_t j = 1; j + 1 < a.size(); ++j) s += std::norm(a[j]);
    return s * dz;
}

// Breakpoints of both schedules, sorted and unique.
std::vector<double> breakpoints(const GemConfig& c) {
    std::vector<double> b = c.flip_times;
    for (const auto& [s, e] : c.coupling_off) {
        b.push_back(s);
        b.push_back(e);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double energy(const std::vector<double>& t, const std::vector<Complex>& e, double lo, double hi) {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n) {
        if (t[n] < lo || t[n + 1] > hi) continue;
        s += 0.5 * (std::norm(e[n]) + std::norm(e[n + 1])) * (t[n + 1] - t[n]);
    }
    return s;
}

std::size_t argmax_after(const GemState& s, double t0) {
    std::size_t best = s.t.size();
    double v = -1.0;
    for (std::size_t n = 0; n < s.t.size(); ++n)
        if (s.t[n] > t0 && std::norm(s.e_out[n]) > v) {
            v = std::norm(s.e_out[n]);
            best = n;
        }
    return best;
}

}  // namespace

double GemConfig::eta_at(double t) const {
    double e = eta;
    for (double f : flip_times)
        if (t >= f) e = -e;
    return e;
}

bool GemConfig::coupled_at(double t) const {
    for (const auto& [s, e] : coupling_off)
        if (t >= s && t < e) return false;
    return true;
}

void GemConfig::validate() const {
    if (nz < 32 || nt < 32) throw InvalidArgument("gem: nz and nt must be at least 32");
    if (!(z_extent > 0.0) || !(t_extent > 0.0)) throw InvalidArgument("gem: z_extent and t_extent must be positive");
    if (!std::isfinite(g) || !std::isfinite(density) || !(density >= 0.0))
        throw InvalidArgument("gem: g must be finite and density non-negative");
    if (!(eta != 0.0) || !std::isfinite(eta)) throw InvalidArgument("gem: eta must be finite and non-zero");
    if (!(decay >= 0.0)) throw InvalidArgument("gem: decay must be non-negative");
    if (record_nz < 2 || record_nt < 2) throw InvalidArgument("gem: record sizes must be at least 2");
    if (!increasing(flip_times)) throw InvalidArgument("gem: flip times must be strictly increasing");
    for (double f : flip_times)
        if (!(f >= 0.0 && f <= t_extent)) throw InvalidArgument("gem: flip times must lie in [0, t_extent]");
    for (std::size_t i = 0; i < coupling_off.size(); ++i) {
        const auto& [s, e] = coupling_off[i];
        if (!(s >= 0.0 && e > s && e <= t_extent))
            throw InvalidArgument("gem: coupling-off windows must satisfy 0 <= start < end <= t_extent");
        if (i > 0 && !(s > coupling_off[i - 1].second))
            throw InvalidArgument("gem: coupling-off windows must be strictly increasing and disjoint");
    }
    const double phase = std::abs(eta) * 0.5 * z_extent * dt();
    if (phase > 0.5) {
        std::ostringstream msg;
        msg << "gem: gradient phase per step eta z_max dt = " << phase << " rad exceeds 0.5; increase nt";
        throw InvalidArgument(msg.str());
    }
}

Complex PulseTrain::at(double t) const {
    Complex s = 0.0;
    for (const auto& p : pulses) {
        const double u = (t - p.center) / p.width;
        s += p.amplitude * std::exp(-0.5 * u * u);
    }
    return s;
}

void PulseTrain::validate(const GemConfig& config) const {
    for (const auto& p : pulses) {
        if (!(p.width > 0.0)) throw InvalidArgument("gem: pulse width must be positive");
        if (p.center - 4.0 * p.width < 0.0 || p.center + 4.0 * p.width > config.t_extent)
            throw InvalidArgument("gem: pulse '" + p.label + "' does not fit inside [0, t_extent] with 4-width margins");
        if (p.width < 4.0 * config.dt()) throw InvalidArgument("gem: pulse '" + p.label + "' is unresolved by nt");
        if (!std::isfinite(p.amplitude.real()) || !std::isfinite(p.amplitude.imag()))
            throw InvalidArgument("gem: pulse amplitude must be finite");
    }
}

GemState gem_evolve(const GemConfig& config, const PulseTrain& input) {
    config.validate();
    input.validate(config);
    const std::size_t nz = config.nz, nt = config.nt;
    const double dt = config.dt(), dz = config.dz();
    const auto cuts = breakpoints(config);

    std::vector<double> z(nz);
    for (std::size_t j = 0; j < nz; ++j) z[j] = config.z(j);

    GemState st;
    st.t.resize(nt);
    st.e_in.resize(nt);
    st.e_out.resize(nt);
    st.alpha_norm.resize(nt);
    st.history_nt = std::min(config.record_nt, nt);
    st.history_nz = std::min(config.record_nz, nz);
    st.alpha_history.assign(st.history_nt * st.history_nz, 0.0);
    auto record_row = [&](std::size_t n) -> std::ptrdiff_t {
        // Row r holds sample n = round(r (nt - 1) / (history_nt - 1)).
        const double r = static_cast<double>(n) * static_cast<double>(st.history_nt - 1) / static_cast<double>(nt - 1);
        const auto ri = static_cast<std::size_t>(std::lround(r));
        const auto back = static_cast<std::size_t>(
            std::lround(static_cast<double>(ri) * static_cast<double>(nt - 1) / static_cast<double>(st.history_nt - 1)));
        return back == n ? static_cast<std::ptrdiff_t>(ri) : -1;
    };

    std::vector<Complex> alpha(nz, 0.0), cum(nz), k1(nz), mid(nz), rot(nz);
    auto derivative = [&](const std::vector<Complex>& a, double t, std::vector<Complex>& out) {
        cumulative_trapezoid(a, dz, cum);
        const Complex ein = input.at(t);
        for (std::size_t j = 0; j < nz; ++j) out[j] = kI * config.g * (ein + kI * config.density * cum[j]);
    };
    auto observe = [&](std::size_t n, double t) {
        st.t[n] = t;
        st.e_in[n] = input.at(t);
        const Complex src = config.coupled_at(t) ? kI * config.density * trapezoid(alpha, dz) : Complex(0.0);
        st.e_out[n] = st.e_in[n] + src;
        st.alpha_norm[n] = norm_integral(alpha, dz);
        const auto row = record_row(n);
        if (row >= 0)
            for (std::size_t c = 0; c < st.history_nz; ++c) {
                const auto j = static_cast<std::size_t>(std::lround(static_cast<double>(c) * static_cast<double>(nz - 1) /
                                                                    static_cast<double>(st.history_nz - 1)));
                st.alpha_history[static_cast<std::size_t>(row) * st.history_nz + c] = std::abs(alpha[j]);
            }
    };

    auto substep = [&](double a, double b) {
        const double h = b - a;
        const double tm = 0.5 * (a + b);
        const double eta = config.eta_at(tm);
        for (std::size_t j = 0; j < nz; ++j)
            rot[j] = std::exp(Complex(-config.decay, -eta * z[j]) * (0.5 * h));
        for (std::size_t j = 0; j < nz; ++j) alpha[j] *= rot[j];
        if (config.coupled_at(tm)) {
            derivative(alpha, a, k1);
            for (std::size_t j = 0; j < nz; ++j) mid[j] = alpha[j] + 0.5 * h * k1[j];
            derivative(mid, tm, k1);
            for (std::size_t j = 0; j < nz; ++j) alpha[j] += h * k1[j];
        }
        for (std::size_t j = 0; j < nz; ++j) alpha[j] *= rot[j];
    };

    observe(0, 0.0);
    for (std::size_t n = 0; n + 1 < nt; ++n) {
        const double t0 = static_cast<double>(n) * dt;
        const double t1 = n + 2 == nt ? config.t_extent : static_cast<double>(n + 1) * dt;
        double a = t0;
        for (double c : cuts)
            if (c > t0 && c < t1) {
                substep(a, c);
                a = c;
            }
        substep(a, t1);
        for (const auto& v : alpha)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream msg;
                msg << "gem_evolve: non-finite polarization at t = " << t1;
                throw NumericalError(msg.str());
            }
        observe(n + 1, t1);
    }
    st.alpha_final = alpha;
    return st;
}

double gem_efficiency_theory(double g, double density, double eta) {
    if (eta == 0.0 || !std::isfinite(eta)) throw InvalidArgument("gem_efficiency_theory: eta must be non-zero");
    const double root = 1.0 - std::exp(-2.0 * kPi * g * density / std::abs(eta));
    return root * root;
}

GemEfficiency gem_efficiency_measured(const GemConfig& config, const Pulse& pulse, double window_widths) {
    if (config.flip_times.empty()) throw InvalidArgument("gem_efficiency_measured: needs a gradient flip");
    if (!(window_widths > 0.0)) throw InvalidArgument("gem_efficiency_measured: window width must be positive");
    const double tau = config.flip_times.front();
    if (!(pulse.center < tau)) throw InvalidArgument("gem_efficiency_measured: pulse must precede the flip");

    GemEfficiency out;
    out.predicted_echo_time = 2.0 * tau - pulse.center;
    const double half = window_widths * pulse.width;
    out.leakage_window = {pulse.center - half, pulse.center + half};
    out.echo_window = {out.predicted_echo_time - half, out.predicted_echo_time + half};
    if (out.leakage_window.second > out.echo_window.first)
        throw InvalidArgument("gem_efficiency_measured: echo and leakage windows overlap; flip later");
    if (out.echo_window.second > config.t_extent)
        throw InvalidArgument("gem_efficiency_measured: echo window extends past t_extent");

    PulseTrain train{{pulse}};
    const GemState st = gem_evolve(config, train);
    out.input_energy = energy(st.t, st.e_in, -1.0, config.t_extent + 1.0);
    if (!(out.input_energy > 0.0)) throw InvalidArgument("gem_efficiency_measured: input pulse has no energy");
    out.echo_energy = energy(st.t, st.e_out, out.echo_window.first, out.echo_window.second);
    out.leakage_energy = energy(st.t, st.e_out, out.leakage_window.first, out.leakage_window.second);
    out.sigma = out.echo_energy / out.input_energy;
    std::size_t best = 0;
    double v = -1.0;
    for (std::size_t n = 0; n < st.t.size(); ++n)
        if (st.t[n] >= out.echo_window.first && st.t[n] <= out.echo_window.second && std::norm(st.e_out[n]) > v) {
            v = std::norm(st.e_out[n]);
            best = n;
        }
    out.echo_peak_time = st.t[best];
    return out;
}

std::vector<GemSweepRow> gem_efficiency_sweep(const GemConfig& config, const Pulse& pulse,
                                              const std::vector<double>& ratios, unsigned jobs) {
    if (config.g == 0.0) throw InvalidArgument("gem_efficiency_sweep: g must be non-zero");
    std::vector<GemSweepRow> rows(ratios.size());
    parallel_for(ratios.size(), jobs, [&](std::size_t i) {
        if (!(ratios[i] >= 0.0)) throw InvalidArgument("gem_efficiency_sweep: ratios must be non-negative");
        GemConfig c = config;
        c.density = ratios[i] * std::abs(c.eta) / (2.0 * kPi * c.g);
        rows[i].ratio = ratios[i];
        rows[i].sigma_theory = gem_efficiency_theory(c.g, c.density, c.eta);
        rows[i].sigma_sim = gem_efficiency_measured(c, pulse).sigma;
    });
    return rows;
}

const char* to_string(RecallMode mode) { return mode == RecallMode::filo ? "filo" : "fifo"; }

FifoFiloResult fifo_filo_experiment(const GemConfig& config, const PulseTrain& train, RecallMode mode, double tau,
                                    double tau2) {
    if (train.pulses.size() != 2) throw InvalidArgument("fifo_filo_experiment: needs exactly two pulses");
    auto pulses = train.pulses;
    std::sort(pulses.begin(), pulses.end(), [](const Pulse& a, const Pulse& b) { return a.center < b.center; });
    const double sep = pulses[1].center - pulses[0].center;
    if (sep < 4.0 * std::max(pulses[0].width, pulses[1].width))
        throw InvalidArgument("fifo_filo_experiment: pulses must be separated by at least 4 widths");
    if (!(tau > pulses[1].center)) throw InvalidArgument("fifo_filo_experiment: flip must follow both pulses");

    GemConfig c = config;
    c.coupling_off.clear();
    if (mode == RecallMode::filo) {
        c.flip_times = {tau};
    } else {
        if (!(tau2 > tau)) throw InvalidArgument("fifo_filo_experiment: FIFO needs a second flip after the first");
        c.flip_times = {tau, tau2};
        c.coupling_off = {{tau, tau2}};
    }
    const double last_flip = c.flip_times.back();

    FifoFiloResult res;
    res.mode = mode;
    res.state = gem_evolve(c, PulseTrain{pulses});

    // Reference echo time of each pulse on its own.
    std::vector<double> ref_time(2);
    for (std::size_t p = 0; p < 2; ++p) {
        const GemState single = gem_evolve(c, PulseTrain{{pulses[p]}});
        const std::size_t n = argmax_after(single, last_flip);
        if (n >= single.t.size()) throw NumericalError("fifo_filo_experiment: no output after the last flip");
        ref_time[p] = single.t[n];
    }

    // Local maxima of the combined output after the last flip.
    const auto& s = res.state;
    std::vector<std::size_t> peaks;
    double global = 0.0;
    for (std::size_t n = 0; n < s.t.size(); ++n)
        if (s.t[n] > last_flip) global = std::max(global, std::norm(s.e_out[n]));
    for (std::size_t n = 1; n + 1 < s.t.size(); ++n) {
        if (!(s.t[n] > last_flip)) continue;
        const double v = std::norm(s.e_out[n]);
        if (v >= std::norm(s.e_out[n - 1]) && v > std::norm(s.e_out[n + 1]) && v > 0.05 * global) peaks.push_back(n);
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return std::norm(s.e_out[a]) > std::norm(s.e_out[b]); });
    const double min_gap = 2.0 * std::max(pulses[0].width, pulses[1].width);
    std::vector<std::size_t> chosen;
    for (std::size_t n : peaks) {
        bool far = true;
        for (std::size_t m : chosen) far &= std::abs(s.t[n] - s.t[m]) >= min_gap;
        if (far) chosen.push_back(n);
        if (chosen.size() == 2) break;
    }
    if (chosen.size() < 2) throw NumericalError("fifo_filo_experiment: output peaks are not separable");
    std::sort(chosen.begin(), chosen.end());

    for (std::size_t n : chosen) {
        const std::size_t p = std::abs(s.t[n] - ref_time[0]) <= std::abs(s.t[n] - ref_time[1]) ? 0 : 1;
        res.output.push_back({pulses[p].label, s.t[n], std::norm(s.e_out[n])});
    }
    if (res.output[0].label == res.output[1].label && pulses[0].label != pulses[1].label)
        throw NumericalError("fifo_filo_experiment: both output peaks match the same input pulse");
    const bool first_is_later_input =
        std::abs(res.output[0].peak_time - ref_time[1]) < std::abs(res.output[0].peak_time - ref_time[0]);
    res.order_reversed = first_is_later_input;
    return res;
}

}  // namespace pfl
