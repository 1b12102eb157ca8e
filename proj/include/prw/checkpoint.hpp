#pragma once

// Binary checkpoint, little-endian:
//   "R2D1" | u32 version | i64 Nx | i64 Ny | f64 L_x | f64 time | rho[] | mx[] | my[]
// with each array Nx*Ny f64 values, y fastest.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "prw/grid.hpp"

namespace prw {

inline constexpr std::array<char, 4> kCheckpointMagic{'R', '2', 'D', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value)
{
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits = std::bit_cast<U>(value);
    unsigned char bytes[sizeof(T)];
    for (std::size_t k = 0; k < sizeof(T); ++k) {
        bytes[k] = static_cast<unsigned char>(bits & 0xffu);
        bits >>= 8;
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is)
{
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw CheckpointError("checkpoint truncated");
    }
    U bits = 0;
    for (std::size_t k = sizeof(T); k-- > 0;) bits = (bits << 8) | bytes[k];
    return std::bit_cast<T>(bits);
}

inline void put_array(std::ostream& os, const std::vector<double>& v)
{
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    } else {
        for (double x : v) put_le(os, x);
    }
}

inline void get_array(std::istream& is, std::vector<double>& v)
{
    if constexpr (std::endian::native == std::endian::little) {
        const auto bytes = static_cast<std::streamsize>(v.size() * sizeof(double));
        if (!is.read(reinterpret_cast<char*>(v.data()), bytes)) {
            throw CheckpointError("checkpoint truncated");
        }
    } else {
        for (double& x : v) x = get_le<double>(is);
    }
}

} // namespace detail

inline void write_checkpoint(std::ostream& os, const FlowState& s)
{
    os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    detail::put_le(os, kCheckpointVersion);
    detail::put_le(os, static_cast<std::int64_t>(s.grid.nx));
    detail::put_le(os, static_cast<std::int64_t>(s.grid.ny));
    detail::put_le(os, s.grid.L_x);
    detail::put_le(os, s.time);
    detail::put_array(os, s.rho);
    detail::put_array(os, s.mx);
    detail::put_array(os, s.my);
    if (!os) {
        throw CheckpointError("failed writing checkpoint");
    }
}

inline FlowState read_checkpoint(std::istream& is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kCheckpointMagic) {
        throw CheckpointError("not a checkpoint file (bad magic)");
    }
    const auto version = detail::get_le<std::uint32_t>(is);
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto nx = detail::get_le<std::int64_t>(is);
    const auto ny = detail::get_le<std::int64_t>(is);
    if (nx < 1 || ny < 1 || nx > (1 << 24) || ny > (1 << 24)) {
        throw CheckpointError("checkpoint has an invalid grid size");
    }
    Grid g{static_cast<int>(nx), static_cast<int>(ny), 0.0};
    g.L_x = detail::get_le<double>(is);
    const double t = detail::get_le<double>(is);
    FlowState s(g, t);
    detail::get_array(is, s.rho);
    detail::get_array(is, s.mx);
    detail::get_array(is, s.my);
    if (is.peek() != std::char_traits<char>::eof()) {
        throw CheckpointError("trailing bytes after checkpoint payload");
    }
    return s;
}

inline void write_checkpoint(const std::filesystem::path& path, const FlowState& s)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw CheckpointError("cannot open '" + path.string() + "' for writing");
    }
    write_checkpoint(os, s);
}

inline FlowState read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw CheckpointError("cannot open '" + path.string() + "'");
    }
    return read_checkpoint(is);
}

} // namespace prw
