#include "pfl/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "pfl/error.hpp"
#include "pfl/fft.hpp"
#include "pfl/medium.hpp"

namespace pfl {
namespace {

void require_same_grid(std::span<const Field2D> fields, const char* ctx) {
    for (const auto& f : fields)
        if (!(f.grid() == fields[0].grid())) throw InvalidArgument(std::string(ctx) + ": fields live on different grids");
}

double sample_intensity(const Field2D& f, Complex v, double n0) {
    return f.unit_tag() == UnitTag::physical ? intensity_from_field_sq(std::norm(v), n0) : std::norm(v);
}

double min_image(double d, double period) { return d - period * std::round(d / period); }

// Ensemble of density fluctuations around the per-pixel mean, in k space.
std::vector<std::vector<double>> fluctuation_power(std::span<const Field2D> fields) {
    const Grid& g = fields[0].grid();
    std::vector<double> mean(g.size(), 0.0);
    for (const auto& f : fields) {
        const auto v = f.values();
        for (std::size_t n = 0; n < g.size(); ++n) mean[n] += std::norm(v[n]);
    }
    for (auto& m : mean) m /= static_cast<double>(fields.size());
    Fft2d fft(g);
    std::vector<std::vector<double>> out;
    out.reserve(fields.size());
    std::vector<Complex> buf(g.size());
    for (const auto& f : fields) {
        const auto v = f.values();
        for (std::size_t n = 0; n < g.size(); ++n) buf[n] = std::norm(v[n]) - mean[n];
        fft.forward(buf);
        std::vector<double> p(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) p[n] = std::norm(buf[n]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

IntensityStatistics intensity_statistics(std::span<const Field2D> fields, std::size_t n_bins, double n0) {
    if (fields.empty()) throw InvalidArgument("intensity_statistics: no fields");
    if (n_bins < 2) throw InvalidArgument("intensity_statistics: need at least 2 bins");
    require_same_grid(fields, "intensity_statistics");
    double imax = 0.0, s1 = 0.0, s2 = 0.0;
    std::size_t count = 0;
    for (const auto& f : fields) {
        require_finite(f, "intensity_statistics");
        for (const auto& v : f.values()) {
            const double i = sample_intensity(f, v, n0);
            imax = std::max(imax, i);
            s1 += i;
            s2 += i * i;
            ++count;
        }
    }
    if (!(imax > 0.0)) throw InvalidArgument("intensity_statistics: field is identically zero");

    IntensityStatistics st;
    st.bin_width = imax / static_cast<double>(n_bins);
    std::vector<std::size_t> hist(n_bins, 0);
    for (const auto& f : fields)
        for (const auto& v : f.values()) {
            const double i = sample_intensity(f, v, n0);
            const auto b = std::min(static_cast<std::size_t>(i / st.bin_width), n_bins - 1);
            ++hist[b];
        }
    st.bin_centers.resize(n_bins);
    st.pdf.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        st.bin_centers[b] = (static_cast<double>(b) + 0.5) * st.bin_width;
        st.pdf[b] = static_cast<double>(hist[b]) / (static_cast<double>(count) * st.bin_width);
    }
    st.mode_bin = static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    st.mode = st.bin_centers[st.mode_bin];
    st.mean = s1 / static_cast<double>(count);
    st.g2 = (s2 / static_cast<double>(count)) / (st.mean * st.mean);
    return st;
}

IntensityStatistics intensity_statistics(const Field2D& field, std::size_t n_bins, double n0) {
    return intensity_statistics(std::span<const Field2D>(&field, 1), n_bins, n0);
}

CoherenceProfile coherence_g1(std::span<const Field2D> fields, CoherenceMethod method) {
    if (fields.empty()) throw InvalidArgument("coherence_g1: no fields");
    require_same_grid(fields, "coherence_g1");
    const Grid& g = fields[0].grid();
    const double rmax = 0.5 * std::min(g.extent_x(), g.extent_y());
    const double h = std::min(g.dx(), g.dy());
    CoherenceProfile prof;

    if (method == CoherenceMethod::rotate_pair) {
        if (fields.size() != 1) throw InvalidArgument("coherence_g1: rotate_pair takes a single field");
        const Field2D& f = fields[0];
        require_finite(f, "coherence_g1");
        const std::size_t nb = static_cast<std::size_t>(std::floor(2.0 * rmax / (2.0 * h))) + 1;
        std::vector<Complex> num(nb, 0.0);
        std::vector<double> den(nb, 0.0);
        prof.counts.assign(nb, 0);
        for (std::size_t j = 0; j < g.ny(); ++j)
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const double r = std::hypot(g.x(i), g.y(j));
                if (r >= rmax) continue;
                const std::size_t b = static_cast<std::size_t>(std::lround(2.0 * r / (2.0 * h)));
                if (b >= nb) continue;
                const std::size_t im = (g.nx() - i) % g.nx();
                const std::size_t jm = (g.ny() - j) % g.ny();
                const Complex a = f(i, j), c = f(im, jm);
                num[b] += a * std::conj(c);
                den[b] += 0.5 * (std::norm(a) + std::norm(c));
                ++prof.counts[b];
            }
        for (std::size_t b = 0; b < nb; ++b) {
            if (prof.counts[b] == 0) continue;
            prof.dr.push_back(2.0 * h * static_cast<double>(b));
            prof.g1.push_back(den[b] > 0.0 ? std::min(1.0, std::abs(num[b]) / den[b]) : 0.0);
        }
        std::erase(prof.counts, std::size_t{0});
        return prof;
    }

    if (fields.size() < 2) throw InvalidArgument("coherence_g1: ensemble method needs at least 2 fields");
    Fft2d fft(g);
    std::vector<double> corr_re(g.size(), 0.0), corr_im(g.size(), 0.0);
    std::vector<Complex> buf(g.size());
    for (const auto& f : fields) {
        require_finite(f, "coherence_g1");
        std::copy(f.values().begin(), f.values().end(), buf.begin());
        fft.forward(buf);
        for (auto& v : buf) v = std::norm(v);
        fft.inverse(buf);
        for (std::size_t n = 0; n < g.size(); ++n) {
            corr_re[n] += buf[n].real();
            corr_im[n] += buf[n].imag();
        }
    }
    const double c0 = corr_re[0];
    if (!(c0 > 0.0)) throw InvalidArgument("coherence_g1: fields are identically zero");
    const std::size_t nb = static_cast<std::size_t>(std::floor(rmax / h)) + 1;
    std::vector<double> acc(nb, 0.0);
    prof.counts.assign(nb, 0);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double dx = min_image(static_cast<double>(i) * g.dx(), g.extent_x());
            const double dy = min_image(static_cast<double>(j) * g.dy(), g.extent_y());
            const double r = std::hypot(dx, dy);
            if (r >= rmax) continue;
            const std::size_t b = static_cast<std::size_t>(std::lround(r / h));
            if (b >= nb) continue;
            const std::size_t n = g.index(i, j);
            acc[b] += std::hypot(corr_re[n], corr_im[n]) / c0;
            ++prof.counts[b];
        }
    std::vector<std::size_t> counts;
    for (std::size_t b = 0; b < nb; ++b) {
        if (prof.counts[b] == 0) continue;
        prof.dr.push_back(h * static_cast<double>(b));
        prof.g1.push_back(std::min(1.0, acc[b] / static_cast<double>(prof.counts[b])));
        counts.push_back(prof.counts[b]);
    }
    prof.counts = std::move(counts);
    return prof;
}

StructureFactor structure_factor(std::span<const Field2D> signal, std::span<const Field2D> reference) {
    if (signal.size() < kMinStructureRealizations || reference.size() < kMinStructureRealizations)
        throw InvalidArgument("structure_factor: need at least " + std::to_string(kMinStructureRealizations) +
                              " realizations in each ensemble");
    require_same_grid(signal, "structure_factor");
    require_same_grid(reference, "structure_factor");
    if (!(signal[0].grid() == reference[0].grid()))
        throw InvalidArgument("structure_factor: signal and reference grids differ");
    for (const auto& f : signal) require_finite(f, "structure_factor");
    for (const auto& f : reference) require_finite(f, "structure_factor");

    const Grid& g = signal[0].grid();
    const double dk = std::min(g.dkx(), g.dky());
    const double kmax = std::min(g.nyquist_x(), g.nyquist_y());
    const std::size_t nr = static_cast<std::size_t>(std::floor(kmax / dk));
    // Density fluctuations are real, so mode -k duplicates mode k; only one
    // of each conjugate pair is counted.
    std::vector<std::size_t> ring(g.size(), 0);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t n = g.index(i, j);
            if (g.index((g.nx() - i) % g.nx(), (g.ny() - j) % g.ny()) < n) continue;
            const double k = std::hypot(g.kx(i), g.ky(j));
            const auto r = static_cast<std::size_t>(std::lround(k / dk));
            ring[n] = r <= nr ? r : 0;
        }

    struct Acc {
        double sum = 0.0, sum2 = 0.0;
        std::size_t n = 0;
    };
    auto accumulate = [&](std::span<const Field2D> ens) {
        std::vector<Acc> a(nr + 1);
        for (const auto& p : fluctuation_power(ens))
            for (std::size_t m = 0; m < g.size(); ++m) {
                if (ring[m] == 0) continue;
                auto& r = a[ring[m]];
                r.sum += p[m];
                r.sum2 += p[m] * p[m];
                ++r.n;
            }
        return a;
    };
    const auto sig = accumulate(signal);
    const auto ref = accumulate(reference);

    std::vector<double> ksum(nr + 1, 0.0);
    std::vector<std::size_t> kcount(nr + 1, 0);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t r = ring[g.index(i, j)];
            if (r == 0) continue;
            ksum[r] += std::hypot(g.kx(i), g.ky(j));
            ++kcount[r];
        }

    StructureFactor out;
    for (std::size_t r = 1; r <= nr; ++r) {
        if (kcount[r] == 0) continue;
        const double ms = sig[r].sum / static_cast<double>(sig[r].n);
        const double mr = ref[r].sum / static_cast<double>(ref[r].n);
        if (!(mr > 0.0)) throw NumericalError("structure_factor: reference spectrum vanishes at ring " + std::to_string(r));
        const double vs = std::max(0.0, sig[r].sum2 / static_cast<double>(sig[r].n) - ms * ms) / static_cast<double>(sig[r].n);
        const double vr = std::max(0.0, ref[r].sum2 / static_cast<double>(ref[r].n) - mr * mr) / static_cast<double>(ref[r].n);
        const double s = ms / mr;
        out.k.push_back(ksum[r] / static_cast<double>(kcount[r]));
        out.s.push_back(s);
        out.sigma.push_back(s * std::sqrt((ms > 0.0 ? vs / (ms * ms) : 0.0) + vr / (mr * mr)));
        out.modes.push_back(kcount[r]);
    }
    return out;
}

}  // namespace pfl
