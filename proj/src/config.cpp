#include "pfl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "pfl/builders.hpp"
#include "pfl/csv.hpp"
#include "pfl/error.hpp"
#include "pfl/solver.hpp"
#include "pfl/statistics.hpp"

namespace pfl {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

struct BadValue {
    std::string what;
};

template <class T>
T decode(std::string_view s);

template <>
double decode<double>(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw BadValue{"expected a finite number, got '" + std::string(s) + "'"};
    return v;
}

template <class T>
T decode_integer(std::string_view s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
    return v;
}

template <>
std::size_t decode<std::size_t>(std::string_view s) {
    return decode_integer<std::size_t>(s);
}

template <>
int decode<int>(std::string_view s) {
    return decode_integer<int>(s);
}

template <>
bool decode<bool>(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

template <>
std::string decode<std::string>(std::string_view s) {
    return std::string(s);
}

template <>
std::vector<double> decode<std::vector<double>>(std::string_view s) {
    std::vector<double> v;
    for (auto p : split(s, ',')) v.push_back(decode<double>(p));
    return v;
}

template <>
std::vector<int> decode<std::vector<int>>(std::string_view s) {
    std::vector<int> v;
    for (auto p : split(s, ',')) v.push_back(decode<int>(p));
    return v;
}

template <>
std::vector<std::string> decode<std::vector<std::string>>(std::string_view s) {
    std::vector<std::string> v;
    for (auto p : split(s, ',')) {
        if (p.empty()) throw BadValue{"empty list item"};
        v.emplace_back(p);
    }
    return v;
}

template <>
std::vector<std::pair<double, double>> decode<std::vector<std::pair<double, double>>>(std::string_view s) {
    std::vector<std::pair<double, double>> v;
    for (auto p : split(s, ',')) {
        const auto ab = split(p, ':');
        if (ab.size() != 2) throw BadValue{"expected an interval a:b, got '" + std::string(p) + "'"};
        v.emplace_back(decode<double>(ab[0]), decode<double>(ab[1]));
    }
    return v;
}

std::string encode(double v) { return format_double(v); }
std::string encode(std::size_t v) { return std::to_string(v); }
std::string encode(int v) { return std::to_string(v); }
std::string encode(bool v) { return v ? "true" : "false"; }
std::string encode(const std::string& v) { return v; }

template <class T>
std::string encode(const std::vector<T>& v) {
    std::string out;
    for (std::size_t n = 0; n < v.size(); ++n) out += (n ? ", " : "") + encode(v[n]);
    return out;
}

std::string encode(const std::vector<std::pair<double, double>>& v) {
    std::string out;
    for (std::size_t n = 0; n < v.size(); ++n)
        out += (n ? ", " : "") + format_double(v[n].first) + ":" + format_double(v[n].second);
    return out;
}

struct Key {
    std::string section;
    std::string name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <class S, class T>
Key key(const char* section, const char* name, S RunConfig::*sec, T S::*member) {
    return Key{section, name, [=](const RunConfig& c) { return encode(c.*sec.*member); },
               [=](RunConfig& c, std::string_view v) { c.*sec.*member = decode<T>(v); }};
}

const std::vector<Key>& schema() {
    static const std::vector<Key> keys = [] {
        using R = RunConfig;
        std::vector<Key> k{
            key("run", "scenario", &R::run, &RunSection::scenario),
            key("run", "seed", &R::run, &RunSection::seed),
            key("run", "output", &R::run, &RunSection::output),
            key("run", "emit_snapshots", &R::run, &RunSection::emit_snapshots),
            key("run", "emit_csv", &R::run, &RunSection::emit_csv),
            key("run", "emit_pgm", &R::run, &RunSection::emit_pgm),

            key("grid", "nx", &R::grid, &GridSection::nx),
            key("grid", "ny", &R::grid, &GridSection::ny),
            key("grid", "dx", &R::grid, &GridSection::dx),
            key("grid", "dy", &R::grid, &GridSection::dy),

            key("medium", "units", &R::medium, &MediumSection::units),
            key("medium", "lambda", &R::medium, &MediumSection::lambda),
            key("medium", "n0", &R::medium, &MediumSection::n0),
            key("medium", "n2", &R::medium, &MediumSection::n2),
            key("medium", "alpha", &R::medium, &MediumSection::alpha),
            key("medium", "length", &R::medium, &MediumSection::length),
            key("medium", "i_sat", &R::medium, &MediumSection::i_sat),

            key("potential", "kind", &R::potential, &PotentialSection::kind),
            key("potential", "re", &R::potential, &PotentialSection::re),
            key("potential", "im", &R::potential, &PotentialSection::im),
            key("potential", "waist", &R::potential, &PotentialSection::waist),
            key("potential", "center_x", &R::potential, &PotentialSection::center_x),
            key("potential", "center_y", &R::potential, &PotentialSection::center_y),
            key("potential", "separation", &R::potential, &PotentialSection::separation),
            key("potential", "gain_loss", &R::potential, &PotentialSection::gain_loss),
            key("potential", "period", &R::potential, &PotentialSection::period),
            key("potential", "honeycomb", &R::potential, &PotentialSection::honeycomb),

            key("plan", "steps", &R::plan, &PlanSection::steps),
            key("plan", "snapshot_every", &R::plan, &PlanSection::snapshot_every),

            key("beam", "profile", &R::beam, &BeamSection::profile),
            key("beam", "intensity", &R::beam, &BeamSection::intensity),
            key("beam", "power", &R::beam, &BeamSection::power),
            key("beam", "waist", &R::beam, &BeamSection::waist),
            key("beam", "correlation", &R::beam, &BeamSection::correlation),
            key("beam", "center_x", &R::beam, &BeamSection::center_x),
            key("beam", "center_y", &R::beam, &BeamSection::center_y),
            key("beam", "noise", &R::beam, &BeamSection::noise),

            key("probe", "k_values", &R::probe, &ProbeSection::k_values),
            key("probe", "waist", &R::probe, &ProbeSection::waist),
            key("probe", "ratio", &R::probe, &ProbeSection::ratio),
            key("probe", "fit_start", &R::probe, &ProbeSection::fit_start),
            key("probe", "max_residual", &R::probe, &ProbeSection::max_residual),
            key("probe", "densities", &R::probe, &ProbeSection::densities),
            key("probe", "waist_xi", &R::probe, &ProbeSection::waist_xi),

            key("statistics", "bins", &R::statistics, &StatisticsSection::bins),
            key("statistics", "taus", &R::statistics, &StatisticsSection::taus),

            key("structure", "realizations", &R::structure, &StructureSection::realizations),
            key("structure", "noise", &R::structure, &StructureSection::noise),

            key("vortices", "mode", &R::vortices, &VorticesSection::mode),
            key("vortices", "charges", &R::vortices, &VorticesSection::charges),
            key("vortices", "x", &R::vortices, &VorticesSection::x),
            key("vortices", "y", &R::vortices, &VorticesSection::y),
            key("vortices", "core", &R::vortices, &VorticesSection::core),
            key("vortices", "stripe_position", &R::vortices, &VorticesSection::stripe_position),
            key("vortices", "stripe_angle", &R::vortices, &VorticesSection::stripe_angle),
            key("vortices", "stripe_contrast", &R::vortices, &VorticesSection::stripe_contrast),
            key("vortices", "stripe_width", &R::vortices, &VorticesSection::stripe_width),
            key("vortices", "density_floor", &R::vortices, &VorticesSection::density_floor),

            key("gem", "g", &R::gem, &GemSection::g),
            key("gem", "density", &R::gem, &GemSection::density),
            key("gem", "eta", &R::gem, &GemSection::eta),
            key("gem", "flips", &R::gem, &GemSection::flips),
            key("gem", "coupling_off", &R::gem, &GemSection::coupling_off),
            key("gem", "z_extent", &R::gem, &GemSection::z_extent),
            key("gem", "nz", &R::gem, &GemSection::nz),
            key("gem", "t_extent", &R::gem, &GemSection::t_extent),
            key("gem", "nt", &R::gem, &GemSection::nt),
            key("gem", "decay", &R::gem, &GemSection::decay),
            key("gem", "record_nz", &R::gem, &GemSection::record_nz),
            key("gem", "record_nt", &R::gem, &GemSection::record_nt),
            key("gem", "pulse_centers", &R::gem, &GemSection::pulse_centers),
            key("gem", "pulse_widths", &R::gem, &GemSection::pulse_widths),
            key("gem", "pulse_amplitudes", &R::gem, &GemSection::pulse_amplitudes),
            key("gem", "pulse_labels", &R::gem, &GemSection::pulse_labels),
            key("gem", "ratios", &R::gem, &GemSection::ratios),
            key("gem", "mode", &R::gem, &GemSection::mode),
            key("gem", "tau", &R::gem, &GemSection::tau),
            key("gem", "tau2", &R::gem, &GemSection::tau2),
            key("gem", "window_widths", &R::gem, &GemSection::window_widths),
        };
        return k;
    }();
    return keys;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + " " + what); }

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) fail(key, what);
}

void require_one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& key) {
    std::string list;
    for (const char* o : options) {
        if (value == o) return;
        list += (list.empty() ? "" : ", ") + std::string(o);
    }
    fail(key, "must be one of " + list + ", got '" + value + "'");
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

// Text keys must survive a serialize/parse round trip.
void require_plain(const std::string& v, const std::string& key, bool allow_comma = true) {
    require(v.find_first_of("#\n\r") == std::string::npos && trim(v) == v && (allow_comma || v.find(',') == std::string::npos),
            key, "must not contain '#', line breaks" + std::string(allow_comma ? "" : ", commas") +
                     " or surrounding blanks");
}

template <class F>
void wrap_module_errors(F&& f) {
    try {
        f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"propagate",        "dispersion", "sound-scaling",
                                                "precondensation",  "structure-factor", "vortices",
                                                "gem",              "gem-efficiency-sweep", "fifo-filo"};
    return names;
}

RunConfig parse_config(std::string_view text, bool check) {
    RunConfig c;
    std::map<std::string, std::map<std::string, const Key*>> index;
    for (const auto& k : schema()) index[k.section][k.name] = &k;

    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("section header is missing ']'", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!index.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string name(trim(line.substr(0, eq)));
        const auto it = index[section].find(name);
        if (it == index[section].end()) throw ConfigError("unknown key " + section + "." + name, line_no);
        if (!seen.insert(section + "." + name).second)
            throw ConfigError("duplicate key " + section + "." + name, line_no);
        try {
            it->second->set(c, trim(line.substr(eq + 1)));
        } catch (const BadValue& e) {
            throw ConfigError(section + "." + name + ": " + e.what, line_no);
        }
    }
    if (check) validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path, bool check) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), check);
}

std::string serialize_config(const RunConfig& config) {
    std::string out, section;
    for (const auto& k : schema()) {
        if (k.section != section) {
            out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.name + " = " + k.get(config) + "\n";
    }
    return out;
}

void validate_config(const RunConfig& c) {
    if (c.run.scenario.empty()) throw ConfigError("scenario required");
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), c.run.scenario) == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown scenario '" + c.run.scenario + "'; valid scenarios: " + list);
    }
    require_plain(c.run.output, "run.output");

    wrap_module_errors([&] { grid_from(c); });

    const auto& m = c.medium;
    require_one_of(m.units, {"physical", "dimensionless"}, "medium.units");
    require(m.lambda > 0.0, "medium.lambda", "must be positive");
    require(m.n0 > 0.0, "medium.n0", "must be positive");
    require(m.length >= 0.0, "medium.length", "must be non-negative");
    require(m.alpha >= 0.0, "medium.alpha", "must be non-negative");
    require(m.i_sat >= 0.0, "medium.i_sat", "must be non-negative (0 disables saturation)");

    const auto& p = c.potential;
    require_one_of(p.kind, {"none", "gaussian", "lattice", "pt_dimer"}, "potential.kind");
    if (p.kind == "gaussian" || p.kind == "pt_dimer") require(p.waist > 0.0, "potential.waist", "must be positive");
    if (p.kind == "pt_dimer") require(p.separation > 0.0, "potential.separation", "must be positive");
    if (p.kind == "lattice") require(p.period > 0.0, "potential.period", "must be positive");
    wrap_module_errors([&] { medium_from(c); });

    require(c.plan.snapshot_every <= c.plan.steps, "plan.snapshot_every", "must not exceed plan.steps");
    if (c.plan.steps > 0) require(c.medium.length > 0.0, "medium.length", "must be positive when plan.steps > 0");

    const auto& b = c.beam;
    require_one_of(b.profile, {"uniform", "gaussian", "speckle"}, "beam.profile");
    require(b.intensity > 0.0, "beam.intensity", "must be positive");
    require(b.power > 0.0, "beam.power", "must be positive");
    require(b.waist > 0.0, "beam.waist", "must be positive");
    require(b.correlation > 0.0, "beam.correlation", "must be positive");
    require(b.noise >= 0.0, "beam.noise", "must be non-negative");

    const auto& pr = c.probe;
    for (double k : pr.k_values) require(k >= 0.0, "probe.k_values", "must be non-negative");
    require(strictly_increasing(pr.k_values), "probe.k_values", "must be strictly increasing");
    require(pr.waist > 0.0, "probe.waist", "must be positive");
    require(pr.ratio > 0.0, "probe.ratio", "must be positive");
    require(pr.fit_start >= 0.0 && pr.fit_start < 1.0, "probe.fit_start", "must lie in [0, 1)");
    require(pr.max_residual > 0.0, "probe.max_residual", "must be positive");
    for (double d : pr.densities) require(d > 0.0, "probe.densities", "must be positive");
    require(pr.waist_xi > 0.0, "probe.waist_xi", "must be positive");

    require(c.statistics.bins >= 2, "statistics.bins", "must be at least 2");
    for (double t : c.statistics.taus) require(t >= 0.0, "statistics.taus", "must be non-negative");
    require(strictly_increasing(c.statistics.taus), "statistics.taus", "must be strictly increasing");

    require(c.structure.realizations >= kMinStructureRealizations, "structure.realizations",
            "must be at least " + std::to_string(kMinStructureRealizations));
    require(c.structure.noise > 0.0, "structure.noise", "must be positive");

    const auto& v = c.vortices;
    require_one_of(v.mode, {"imprint", "stripe"}, "vortices.mode");
    require(v.x.size() == v.charges.size() && v.y.size() == v.charges.size(), "vortices.charges",
            "needs one x and one y per charge");
    for (int q : v.charges) require(q != 0, "vortices.charges", "must be non-zero");
    require(v.core >= 0.0, "vortices.core", "must be non-negative (0 selects the default)");
    require(v.stripe_contrast >= 0.0 && v.stripe_contrast <= 1.0, "vortices.stripe_contrast", "must lie in [0, 1]");
    require(v.stripe_width >= 0.0, "vortices.stripe_width", "must be non-negative (0 selects the default)");
    require(v.density_floor >= 0.0 && v.density_floor < 1.0, "vortices.density_floor", "must lie in [0, 1)");

    const auto& g = c.gem;
    const std::size_t np = g.pulse_centers.size();
    require(np > 0, "gem.pulse_centers", "must list at least one pulse");
    require(g.pulse_widths.size() == np && g.pulse_amplitudes.size() == np && g.pulse_labels.size() == np,
            "gem.pulse_centers", "needs matching pulse_widths, pulse_amplitudes and pulse_labels");
    for (const auto& l : g.pulse_labels) require_plain(l, "gem.pulse_labels", false);
    for (double r : g.ratios) require(r >= 0.0, "gem.ratios", "must be non-negative");
    require_one_of(g.mode, {"filo", "fifo"}, "gem.mode");
    require(g.tau > 0.0, "gem.tau", "must be positive");
    if (g.mode == "fifo") require(g.tau2 > g.tau, "gem.tau2", "must exceed gem.tau");
    require(g.window_widths > 0.0, "gem.window_widths", "must be positive");
    wrap_module_errors([&] {
        const auto gc = gem_from(c);
        gc.validate();
        pulses_from(c).validate(gc);
    });
}

Grid grid_from(const RunConfig& c) { return make_grid(c.grid.nx, c.grid.ny, c.grid.dx, c.grid.dy); }

MediumParams medium_from(const RunConfig& c) {
    const auto& m = c.medium;
    MediumParams out;
    if (m.units == "dimensionless") {
        out = dimensionless_medium(m.length);
        out.alpha = m.alpha;
    } else {
        out = MediumParams::from_n2(m.lambda, m.n0, m.n2, m.alpha, m.length);
        if (m.i_sat > 0.0) out.i_sat = m.i_sat;
    }
    const auto& p = c.potential;
    if (p.kind != "none") {
        PotentialSpec spec;
        spec.kind = p.kind == "gaussian" ? PotentialKind::gaussian_defect
                    : p.kind == "lattice" ? PotentialKind::lattice
                                          : PotentialKind::pt_dimer;
        spec.amplitude = {p.re, p.im};
        spec.waist = p.waist;
        spec.center = {p.center_x, p.center_y};
        spec.separation = p.separation;
        spec.gain_loss = p.gain_loss;
        spec.period = p.period;
        spec.honeycomb = p.honeycomb;
        out.potential = build_potential(grid_from(c), spec);
    }
    out.validate();
    return out;
}

GemConfig gem_from(const RunConfig& c) {
    const auto& g = c.gem;
    GemConfig out;
    out.g = g.g;
    out.density = g.density;
    out.eta = g.eta;
    out.flip_times = g.flips;
    out.coupling_off = g.coupling_off;
    out.z_extent = g.z_extent;
    out.nz = g.nz;
    out.t_extent = g.t_extent;
    out.nt = g.nt;
    out.decay = g.decay;
    out.record_nz = g.record_nz;
    out.record_nt = g.record_nt;
    return out;
}

PulseTrain pulses_from(const RunConfig& c) {
    const auto& g = c.gem;
    PulseTrain train;
    for (std::size_t n = 0; n < g.pulse_centers.size(); ++n)
        train.pulses.push_back(Pulse{g.pulse_centers[n], g.pulse_widths.at(n), g.pulse_amplitudes.at(n),
                                     g.pulse_labels.at(n)});
    return train;
}

}  // namespace pfl
