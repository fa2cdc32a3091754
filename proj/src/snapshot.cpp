#include "pfl/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>

#include "pfl/error.hpp"

namespace pfl {
namespace {

constexpr char kMagic[4] = {'P', 'F', 'L', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(sizeof(T) == 8);
    auto bits = std::bit_cast<std::uint64_t>(value);
    std::array<char, 8> bytes{};
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffU);
    os.write(bytes.data(), 8);
}

template <typename T>
T get_le(std::istream& is) {
    static_assert(sizeof(T) == 8);
    std::array<unsigned char, 8> bytes{};
    is.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (!is) throw IoError("snapshot: truncated file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field2D& field, double z) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    const Grid& g = field.grid();
    os.write(kMagic, 4);
    put_le<std::uint64_t>(os, g.nx());
    put_le<std::uint64_t>(os, g.ny());
    put_le<double>(os, g.dx());
    put_le<double>(os, g.dy());
    put_le<std::uint64_t>(os, field.unit_tag() == UnitTag::physical ? 0U : 1U);
    put_le<double>(os, z);
    for (const auto& v : field.values()) {
        put_le<double>(os, v.real());
        put_le<double>(os, v.imag());
    }
    if (!os) throw IoError("failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": not a PFL1 snapshot");
    const auto nx = get_le<std::uint64_t>(is);
    const auto ny = get_le<std::uint64_t>(is);
    const auto dx = get_le<double>(is);
    const auto dy = get_le<double>(is);
    const auto tag = get_le<std::uint64_t>(is);
    const auto z = get_le<double>(is);
    if (tag > 1) throw IoError(path.string() + ": unknown unit tag");
    Grid grid = make_grid(nx, ny, dx, dy);
    std::vector<Complex> values(grid.size());
    for (auto& v : values) {
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        v = Complex(re, im);
    }
    return {Field2D(grid, std::move(values), tag == 0 ? UnitTag::physical : UnitTag::dimensionless), z};
}

std::pair<std::filesystem::path, std::filesystem::path> write_density_pgm(const std::filesystem::path& path,
                                                                          std::span<const double> density,
                                                                          std::size_t width, std::size_t height) {
    if (density.size() != width * height) throw InvalidArgument("write_density_pgm: size mismatch");
    const double peak = density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
    const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "P5\n" << width << ' ' << height << "\n65535\n";
    for (double v : density) {
        const auto level = static_cast<std::uint16_t>(std::clamp(std::lround(v * scale), 0L, 65535L));
        const char bytes[2] = {static_cast<char>(level >> 8), static_cast<char>(level & 0xffU)};
        os.write(bytes, 2);
    }
    if (!os) throw IoError("failed writing " + path.string());

    auto sidecar = path;
    sidecar += ".scale";
    std::ofstream ss(sidecar, std::ios::trunc);
    if (!ss) throw IoError("cannot open " + sidecar.string() + " for writing");
    ss << std::setprecision(17) << "max_density " << peak << "\nlevels 65535\n";
    return {path, sidecar};
}

}  // namespace pfl
