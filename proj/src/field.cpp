#include "pfl/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pfl/error.hpp"

namespace pfl {

const char* to_string(UnitTag tag) { return tag == UnitTag::physical ? "physical" : "dimensionless"; }

Field2D::Field2D(Grid grid, UnitTag tag) : grid_(grid), values_(grid.size()), tag_(tag) {}

Field2D::Field2D(Grid grid, std::vector<Complex> values, UnitTag tag)
    : grid_(grid), values_(std::move(values)), tag_(tag) {
    if (values_.size() != grid_.size())
        throw InvalidArgument("field has " + std::to_string(values_.size()) + " samples, grid needs " +
                              std::to_string(grid_.size()));
}

double Field2D::norm_integral() const {
    double sum = 0.0;
    for (const auto& v : values_) sum += std::norm(v);
    return sum * grid_.cell_area();
}

std::vector<double> Field2D::density() const {
    std::vector<double> rho(values_.size());
    std::transform(values_.begin(), values_.end(), rho.begin(), [](const Complex& v) { return std::norm(v); });
    return rho;
}

double Field2D::max_density() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::norm(v));
    return m;
}

bool Field2D::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

void require_finite(const Field2D& field, const char* context) {
    if (!field.all_finite()) throw NumericalError(std::string(context) + ": non-finite field samples");
}

BeamWidth second_moment_width(const Field2D& field) {
    const Grid& g = field.grid();
    double total = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double w = std::norm(field(i, j));
            total += w;
            sx += w * g.x(i);
            sy += w * g.y(j);
        }
    if (total <= 0.0) throw InvalidArgument("second_moment_width: zero field");
    BeamWidth out;
    out.cx = sx / total;
    out.cy = sy / total;
    double vx = 0.0, vy = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double w = std::norm(field(i, j));
            vx += w * (g.x(i) - out.cx) * (g.x(i) - out.cx);
            vy += w * (g.y(j) - out.cy) * (g.y(j) - out.cy);
        }
    out.wx = 2.0 * std::sqrt(vx / total);
    out.wy = 2.0 * std::sqrt(vy / total);
    return out;
}

}  // namespace pfl
