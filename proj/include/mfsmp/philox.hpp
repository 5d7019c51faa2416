#pragma once

#include <array>
#include <cstdint>

namespace mfsmp {

/// Philox4x32-10 counter-based generator. Stateless: the output depends
/// only on (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            ctr = round(ctr, key);
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static Counter round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Four 32-bit words for (seed, stream, index).
inline Philox4x32::Counter philox_words(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

/// Uniform double in (0, 1) with 53 random bits.
inline double philox_uniform(std::uint64_t hi, std::uint64_t lo) {
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw for (seed, stream, index) via Box-Muller.
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Uniform integer in [0, bound) for (seed, stream, index).
std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, std::uint64_t bound);

/// Mixes several integers into a child seed (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mfsmp
