#include "pfl/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "pfl/error.hpp"

namespace pfl {

struct Fft2d::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double scale = 1.0;

    Plans() = default;
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
    ~Plans() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::shared_ptr<const Fft2d::Plans> plans_for(std::size_t nx, std::size_t ny) {
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Fft2d::Plans>> cache;
    std::lock_guard lock(planner_mutex());
    auto key = std::make_pair(nx, ny);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    auto plans = std::make_shared<Fft2d::Plans>();
    // Scratch buffer only used for planning; FFTW_ESTIMATE leaves it untouched.
    std::vector<Complex> scratch(nx * ny);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf, FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf, FFTW_BACKWARD, flags);
    if (!plans->forward || !plans->backward) throw Error("FFTW planning failed");
    plans->scale = 1.0 / std::sqrt(static_cast<double>(nx * ny));
    cache.emplace(key, plans);
    return plans;
}

}  // namespace

Fft2d::Fft2d(const Grid& grid) : grid_(grid), plans_(plans_for(grid.nx(), grid.ny())) {}

void Fft2d::forward(std::span<Complex> data) const {
    if (data.size() != grid_.size()) throw InvalidArgument("Fft2d: buffer size does not match grid");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->forward, p, p);
    for (auto& v : data) v *= plans_->scale;
}

void Fft2d::inverse(std::span<Complex> data) const {
    if (data.size() != grid_.size()) throw InvalidArgument("Fft2d: buffer size does not match grid");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_->backward, p, p);
    for (auto& v : data) v *= plans_->scale;
}

Field2D Fft2d::forward(const Field2D& field) const {
    Field2D out = field;
    forward(out.values());
    return out;
}

Field2D Fft2d::inverse(const Field2D& spectrum) const {
    Field2D out = spectrum;
    inverse(out.values());
    return out;
}

}  // namespace pfl
