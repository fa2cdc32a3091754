#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pfl/grid.hpp"

namespace pfl {

using Complex = std::complex<double>;

enum class UnitTag { physical, dimensionless };

const char* to_string(UnitTag tag);

/// Complex transverse envelope sampled on a Grid.
///
/// Values are V/m when tagged physical and dimensionless after rescaling.
class Field2D {
public:
    Field2D() = default;
    Field2D(Grid grid, UnitTag tag = UnitTag::physical);
    Field2D(Grid grid, std::vector<Complex> values, UnitTag tag = UnitTag::physical);

    const Grid& grid() const { return grid_; }
    UnitTag unit_tag() const { return tag_; }
    void set_unit_tag(UnitTag tag) { tag_ = tag; }

    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
    Complex& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }

    std::size_t size() const { return values_.size(); }

    /// Sum |E|^2 dx dy.
    double norm_integral() const;
    /// |E|^2 per sample.
    std::vector<double> density() const;
    double max_density() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<Complex> values_;
    UnitTag tag_ = UnitTag::physical;
};

/// Throws NumericalError naming `context` when any sample is NaN or Inf.
void require_finite(const Field2D& field, const char* context);

/// 1/e^2 intensity radius along x and y from second moments (w = 2 sigma).
struct BeamWidth {
    double wx = 0.0;
    double wy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};
BeamWidth second_moment_width(const Field2D& field);

}  // namespace pfl
