#pragma once

#include <cstddef>
#include <vector>

namespace pfl {

/// Uniform periodic transverse grid.
///
/// Sample (i, j) sits at x = (i - nx/2) dx, y = (j - ny/2) dy, so the origin is
/// the sample at index (nx/2, ny/2). Storage is row-major with x fastest.
/// Reciprocal coordinates follow the FFT ordering: mode i has
/// kx = dkx * (i < nx/2 ? i : i - nx), with the Nyquist mode at i = nx/2.
class Grid {
public:
    Grid() = default;

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return nx_ * ny_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double dkx() const { return dkx_; }
    double dky() const { return dky_; }
    double extent_x() const { return static_cast<double>(nx_) * dx_; }
    double extent_y() const { return static_cast<double>(ny_) * dy_; }
    double cell_area() const { return dx_ * dy_; }

    double x(std::size_t i) const;
    double y(std::size_t j) const;
    double kx(std::size_t i) const;
    double ky(std::size_t j) const;
    /// Nyquist wavevector along each axis, pi/dx and pi/dy.
    double nyquist_x() const;
    double nyquist_y() const;

    std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

    /// |k|^2 for every mode, in storage order.
    std::vector<double> k_squared() const;

    bool operator==(const Grid& other) const = default;

private:
    friend Grid make_grid(std::size_t, std::size_t, double, double);

    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    double dx_ = 0.0;
    double dy_ = 0.0;
    double dkx_ = 0.0;
    double dky_ = 0.0;
};

/// Validated grid: nx, ny even and >= 8, positive spacings.
Grid make_grid(std::size_t nx, std::size_t ny, double dx, double dy);

}  // namespace pfl
