#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pfl/field.hpp"

namespace pfl {

/// One-dimensional gradient echo memory in normalized units:
///   d(alpha)/dt = -i eta(t) z alpha + i g c(t) E - gamma alpha
///   dE/dz       = i N c(t) alpha
/// on z in [-z_extent/2, z_extent/2]. eta(t) starts at `eta` and changes sign
/// at each flip time; c(t) is 0 inside the coupling-off windows and 1 elsewhere.
struct GemConfig {
    double g = 1.0;
    double density = 1.0;  // N
    double eta = 100.0;
    std::vector<double> flip_times;
    std::vector<std::pair<double, double>> coupling_off;  // [start, end) windows
    double z_extent = 1.0;
    std::size_t nz = 2000;
    double t_extent = 10.0;
    std::size_t nt = 1001;  // time samples including t = 0 and t = t_extent
    double decay = 0.0;     // gamma
    // Size of the recorded |alpha(z, t)| history (decimated lattice).
    std::size_t record_nz = 256;
    std::size_t record_nt = 256;

    double dt() const { return t_extent / static_cast<double>(nt - 1); }
    double dz() const { return z_extent / static_cast<double>(nz - 1); }
    double z(std::size_t j) const { return -0.5 * z_extent + static_cast<double>(j) * dz(); }
    double eta_at(double t) const;
    bool coupled_at(double t) const;
    void validate() const;
};

struct Pulse {
    double center = 0.0;
    double width = 0.1;  // sigma of the amplitude envelope exp(-(t - t0)^2 / (2 width^2))
    Complex amplitude{1.0, 0.0};
    std::string label;
};

struct PulseTrain {
    std::vector<Pulse> pulses;
    Complex at(double t) const;
    /// Pulses must sit inside [0, t_extent] with 4-width margins and be
    /// sampled by at least 4 steps per width.
    void validate(const GemConfig& config) const;
};

struct GemState {
    std::vector<double> t;
    std::vector<Complex> e_in;
    std::vector<Complex> e_out;          // E(z = z_max, t)
    std::vector<double> alpha_norm;      // integral |alpha|^2 dz at each t
    std::vector<Complex> alpha_final;    // alpha(z, t_extent)
    std::vector<double> alpha_history;   // |alpha| on record_nt x record_nz, row-major in t
    std::size_t history_nt = 0;
    std::size_t history_nz = 0;
};

/// Integrates the memory from an empty state. Throws InvalidArgument when
/// eta z_max dt > 0.5 rad and NumericalError on non-finite values.
GemState gem_evolve(const GemConfig& config, const PulseTrain& input);

/// sigma = (1 - exp(-2 pi g N / |eta|))^2.
double gem_efficiency_theory(double g, double density, double eta);

struct GemEfficiency {
    double sigma = 0.0;
    double input_energy = 0.0;
    double echo_energy = 0.0;
    double leakage_energy = 0.0;
    std::pair<double, double> echo_window;
    std::pair<double, double> leakage_window;
    double echo_peak_time = 0.0;
    double predicted_echo_time = 0.0;
};

/// Stores one pulse and recalls it after the first flip. The echo window is
/// centred on 2 tau - t_p and the leakage window on t_p, each spanning
/// +/- window_widths pulse widths.
GemEfficiency gem_efficiency_measured(const GemConfig& config, const Pulse& pulse, double window_widths = 6.0);

struct GemSweepRow {
    double ratio = 0.0;  // 2 pi g N / |eta|
    double sigma_theory = 0.0;
    double sigma_sim = 0.0;
};

/// Sets N = ratio |eta| / (2 pi g) for each ratio and measures sigma.
std::vector<GemSweepRow> gem_efficiency_sweep(const GemConfig& config, const Pulse& pulse,
                                              const std::vector<double>& ratios, unsigned jobs = 1);

enum class RecallMode { filo, fifo };

const char* to_string(RecallMode mode);

struct DetectedPulse {
    std::string label;
    double peak_time = 0.0;
    double peak_intensity = 0.0;
};

struct FifoFiloResult {
    RecallMode mode = RecallMode::filo;
    GemState state;
    std::vector<DetectedPulse> output;  // in order of emission
    bool order_reversed = false;        // true when the output order is the reverse of the input order
};

/// Two-pulse recall. FILO: one flip at `tau`, coupling always on. FIFO: flip
/// at `tau`, coupling off on [tau, tau2), second flip at `tau2`. The schedule
/// fields of `config` are replaced. Output peaks are searched after the last
/// flip and labelled by matching them to single-pulse reference runs.
FifoFiloResult fifo_filo_experiment(const GemConfig& config, const PulseTrain& train, RecallMode mode, double tau,
                                    double tau2 = 0.0);

}  // namespace pfl
