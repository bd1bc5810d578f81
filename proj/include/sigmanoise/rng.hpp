#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace sigmanoise {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Pure function of (counter, key); no state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Maps the top 53 bits of `bits` to the open interval (0, 1).
double uniform_open01(std::uint64_t bits);

/// Inverse standard normal CDF via Acklam's rational approximation
/// (relative error below 1.2e-9 on (0,1)). Uses only +,*,/, sqrt and log.
double normal_quantile(double u);

/// Independent sub-streams carved out of one seed.
enum class StreamDomain : std::uint64_t {
    gaussian = 0x6761757373ULL,
    auxiliary = 0x617578696cULL,
    coins = 0x636f696e73ULL,
    digits = 0x6469676974ULL,
    scratch = 0x7363726174ULL,
};

/// Coordinate-addressable randomness for one (seed, sample) pair.
///
/// Coordinate j of sample n under seed s is a pure function of (s, n, j): the
/// Philox counter is (j/2, n) and the key is derived from (s, domain). Replaying a
/// coordinate is O(1) and two workers never share state.
class CoordinateStream {
public:
    CoordinateStream(std::uint64_t seed, std::uint64_t sample = 0,
                     StreamDomain domain = StreamDomain::gaussian);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t sample() const noexcept { return sample_; }

    /// 64 uniform bits at position `index`.
    std::uint64_t bits(std::uint64_t index) const;
    double uniform(std::uint64_t index) const { return uniform_open01(bits(index)); }
    double normal(std::uint64_t index) const { return normal_quantile(uniform(index)); }

    /// Writes coordinates first, first+1, ... into `out`; identical to calling
    /// normal() per index but draws two coordinates per cipher block.
    void fill_normals(std::uint64_t first, std::span<double> out) const;

    /// Fair sign ε_k ∈ {−1, +1} at position k (one bit each).
    int sign(std::uint64_t k) const;

private:
    std::array<std::uint32_t, 4> block(std::uint64_t block_index) const;

    std::uint64_t seed_;
    std::uint64_t sample_;
    std::array<std::uint32_t, 2> key_;
};

}  // namespace sigmanoise
