#include "pfl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pfl/error.hpp"

namespace pfl {

double Grid::x(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(nx_ / 2)) * dx_;
}

double Grid::y(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(ny_ / 2)) * dy_;
}

double Grid::kx(std::size_t i) const {
    const auto n = static_cast<double>(i < nx_ / 2 ? static_cast<long long>(i)
                                                   : static_cast<long long>(i) - static_cast<long long>(nx_));
    return n * dkx_;
}

double Grid::ky(std::size_t j) const {
    const auto n = static_cast<double>(j < ny_ / 2 ? static_cast<long long>(j)
                                                   : static_cast<long long>(j) - static_cast<long long>(ny_));
    return n * dky_;
}

double Grid::nyquist_x() const { return std::numbers::pi / dx_; }
double Grid::nyquist_y() const { return std::numbers::pi / dy_; }

std::vector<double> Grid::k_squared() const {
    std::vector<double> out(size());
    for (std::size_t j = 0; j < ny_; ++j) {
        const double ky2 = ky(j) * ky(j);
        for (std::size_t i = 0; i < nx_; ++i) out[index(i, j)] = kx(i) * kx(i) + ky2;
    }
    return out;
}

Grid make_grid(std::size_t nx, std::size_t ny, double dx, double dy) {
    auto check_count = [](std::size_t n, const char* name) {
        if (n < 8 || n % 2 != 0)
            throw InvalidArgument(std::string("grid.") + name + " must be even and >= 8, got " + std::to_string(n));
    };
    check_count(nx, "nx");
    check_count(ny, "ny");
    if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidArgument("grid.dx must be positive");
    if (!(dy > 0.0) || !std::isfinite(dy)) throw InvalidArgument("grid.dy must be positive");

    Grid g;
    g.nx_ = nx;
    g.ny_ = ny;
    g.dx_ = dx;
    g.dy_ = dy;
    g.dkx_ = 2.0 * std::numbers::pi / (static_cast<double>(nx) * dx);
    g.dky_ = 2.0 * std::numbers::pi / (static_cast<double>(ny) * dy);
    return g;
}

}  // namespace pfl
