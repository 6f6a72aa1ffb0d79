#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace stopmax::rng {

/// Philox4x32-10 (Salmon et al.). Stateless: the output is a pure function of
/// (key, counter), so any path or sample can be regenerated in isolation.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block ctr) const {
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += kW0;
            k[1] += kW1;
        }
        return ctr;
    }

    /// Block for (stream, index, step): stream separates unrelated uses of one seed.
    Block at(std::uint32_t stream, std::uint64_t index, std::uint32_t step) const {
        return (*this)({step, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream});
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::array<std::uint32_t, 2> key_;
};

/// Uniform on the open interval (0, 1).
inline double to_unit(std::uint32_t v) { return (static_cast<double>(v) + 0.5) * 0x1.0p-32; }

/// Two independent standard normals from two uniforms (Box-Muller).
inline std::array<double, 2> box_muller(std::uint32_t a, std::uint32_t b) {
    const double r = std::sqrt(-2.0 * std::log(to_unit(a)));
    const double th = 6.283185307179586477 * to_unit(b);
    return {r * std::cos(th), r * std::sin(th)};
}

}  // namespace stopmax::rng
