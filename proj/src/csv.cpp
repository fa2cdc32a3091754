#include "pfl/csv.hpp"

#include <charconv>
#include <fstream>

#include "pfl/error.hpp"

namespace pfl {

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string cell_text(const CsvCell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw InvalidArgument("write_csv: row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
        os << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
}

std::filesystem::path write_structure_factor_csv(const std::filesystem::path& path, const StructureFactor& sf) {
    std::vector<std::vector<CsvCell>> rows;
    for (std::size_t n = 0; n < sf.k.size(); ++n)
        rows.push_back({sf.k[n], sf.s[n], sf.sigma[n], static_cast<long long>(sf.modes[n])});
    write_csv(path, {"k", "S", "sigma", "modes"}, rows);
    return path;
}

std::filesystem::path write_dispersion_csv(const std::filesystem::path& path, const DispersionCurve& curve) {
    std::vector<std::vector<CsvCell>> rows;
    for (const auto& p : curve.points)
        rows.push_back({p.k, p.v_g, p.omega, static_cast<long long>(p.extrapolated)});
    write_csv(path, {"k", "v_g", "omega", "extrapolated"}, rows);
    return path;
}

std::filesystem::path write_coherence_csv(const std::filesystem::path& path, const CoherenceProfile& profile) {
    std::vector<std::vector<CsvCell>> rows;
    for (std::size_t n = 0; n < profile.dr.size(); ++n)
        rows.push_back({profile.dr[n], profile.g1[n], static_cast<long long>(profile.counts[n])});
    write_csv(path, {"dr", "g1", "pairs"}, rows);
    return path;
}

std::filesystem::path write_intensity_csv(const std::filesystem::path& path, const IntensityStatistics& stats) {
    std::vector<std::vector<CsvCell>> rows;
    for (std::size_t n = 0; n < stats.pdf.size(); ++n) rows.push_back({stats.bin_centers[n], stats.pdf[n]});
    write_csv(path, {"I", "P"}, rows);
    return path;
}

std::filesystem::path write_vortices_csv(const std::filesystem::path& path, const VortexSet& set) {
    std::vector<std::vector<CsvCell>> rows;
    for (const auto& v : set.vortices) rows.push_back({v.x, v.y, static_cast<long long>(v.charge)});
    write_csv(path, {"x", "y", "charge"}, rows);
    return path;
}

std::filesystem::path write_trace_csv(const std::filesystem::path& path, std::span<const double> t,
                                      std::span<const Complex> e) {
    if (t.size() != e.size()) throw InvalidArgument("write_trace_csv: size mismatch");
    std::vector<std::vector<CsvCell>> rows;
    for (std::size_t n = 0; n < t.size(); ++n) rows.push_back({t[n], e[n].real(), e[n].imag(), std::norm(e[n])});
    write_csv(path, {"t", "re", "im", "intensity"}, rows);
    return path;
}

}  // namespace pfl
