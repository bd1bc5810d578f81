#include "sigmanoise/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sigmanoise {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform_open01(std::uint64_t bits) {
    // The top value rounds to 1.0; keep it inside the open interval.
    return std::min((static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53, 0x1.fffffffffffffp-1);
}

double normal_quantile(double u) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    constexpr double p_high = 1.0 - p_low;

    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > p_high) {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

CoordinateStream::CoordinateStream(std::uint64_t seed, std::uint64_t sample, StreamDomain domain)
    : seed_(seed), sample_(sample) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint32_t, 4> CoordinateStream::block(std::uint64_t block_index) const {
    return philox4x32({static_cast<std::uint32_t>(block_index),
                       static_cast<std::uint32_t>(block_index >> 32),
                       static_cast<std::uint32_t>(sample_),
                       static_cast<std::uint32_t>(sample_ >> 32)},
                      key_);
}

std::uint64_t CoordinateStream::bits(std::uint64_t index) const {
    const auto words = block(index >> 1);
    const unsigned half = static_cast<unsigned>(index & 1u) * 2u;
    return (static_cast<std::uint64_t>(words[half + 1]) << 32) | words[half];
}

void CoordinateStream::fill_normals(std::uint64_t first, std::span<double> out) const {
    std::size_t pos = 0;
    std::uint64_t index = first;
    if ((index & 1u) && pos < out.size()) {
        out[pos++] = normal(index++);
    }
    while (pos + 1 < out.size()) {
        const auto w = block(index >> 1);
        out[pos++] = normal_quantile(uniform_open01((static_cast<std::uint64_t>(w[1]) << 32) | w[0]));
        out[pos++] = normal_quantile(uniform_open01((static_cast<std::uint64_t>(w[3]) << 32) | w[2]));
        index += 2;
    }
    if (pos < out.size()) {
        out[pos] = normal(index);
    }
}

int CoordinateStream::sign(std::uint64_t k) const {
    const auto words = block(k >> 7);
    const std::uint32_t word = words[(k >> 5) & 3u];
    return ((word >> (k & 31u)) & 1u) ? 1 : -1;
}

}  // namespace sigmanoise
