#pragma once

#include <memory>
#include <span>

#include "pfl/field.hpp"

namespace pfl {

/// Unitary 2D discrete Fourier transform (1/sqrt(N) each way) on a Grid.
///
/// Plans are shared between instances with the same shape and are created
/// under a lock; executing transforms is safe from concurrent threads as long
/// as each thread works on its own data.
class Fft2d {
public:
    explicit Fft2d(const Grid& grid);

    const Grid& grid() const { return grid_; }

    /// In place, X(k) = N^-1/2 sum_r x(r) exp(-i k.r).
    void forward(std::span<Complex> data) const;
    /// In place, x(r) = N^-1/2 sum_k X(k) exp(+i k.r).
    void inverse(std::span<Complex> data) const;

    Field2D forward(const Field2D& field) const;
    Field2D inverse(const Field2D& spectrum) const;

    struct Plans;

private:
    Grid grid_;
    std::shared_ptr<const Plans> plans_;
};

}  // namespace pfl
