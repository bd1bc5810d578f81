#include "sigmanoise/monte_carlo.hpp"
#include "sigmanoise/rng.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

using namespace sigmanoise;

TEST_SUITE("rng") {

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST_CASE("philox known answers") {
    const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("coordinates are pure functions of (seed, sample, index)") {
    const CoordinateStream a(42, 3), b(42, 3), other(42, 4), aux(42, 3, StreamDomain::auxiliary);
    for (std::uint64_t j = 0; j < 64; ++j) {
        CHECK(a.normal(j) == b.normal(j));
        CHECK(a.normal(j) != other.normal(j));
        CHECK(a.normal(j) != aux.normal(j));
    }
}

TEST_CASE("fill_normals matches per-index draws from any offset") {
    const CoordinateStream s(7, 11);
    for (std::uint64_t first : {0u, 1u, 5u}) {
        std::vector<double> out(37);
        s.fill_normals(first, out);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == s.normal(first + i));
    }
}

TEST_CASE("sign k is bit k of the bit stream") {
    const CoordinateStream s(3, 0, StreamDomain::coins);
    for (std::uint64_t k = 0; k < 256; ++k) {
        const int bit = static_cast<int>((s.bits(k >> 6) >> (k & 63)) & 1u);
        CHECK(s.sign(k) == (bit ? 1 : -1));
    }
}

TEST_CASE("uniforms lie strictly inside (0,1)") {
    CHECK(uniform_open01(0) > 0.0);
    CHECK(uniform_open01(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("normal quantile against erfc inversion") {
    // Phi(x) = erfc(-x/sqrt 2)/2 is an independent oracle.
    for (double x : {-6.0, -3.0, -1.5, -0.2, 0.0, 0.7, 2.0, 4.5}) {
        const double u = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(normal_quantile(u) == doctest::Approx(x).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("normal moments over many coordinates") {
    const CoordinateStream s(1, 0);
    RunningMoments m;
    double fourth = 0.0;
    const int n = 200000;
    for (int j = 0; j < n; ++j) {
        const double z = s.normal(static_cast<std::uint64_t>(j));
        m.add(z);
        fourth += z * z * z * z;
    }
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(n));
    CHECK(m.m2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fourth / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("monte carlo is independent of the worker count") {
    auto body = [](std::size_t n, std::span<double> out) {
        const CoordinateStream s(9, n);
        out[0] = s.normal(0);
        out[1] = s.normal(0) * s.normal(1);
    };
    const auto one = run_monte_carlo(20000, 2, 1, body);
    const auto four = run_monte_carlo(20000, 2, 4, body);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(one[k].mean == four[k].mean);
        CHECK(one[k].standard_error == four[k].standard_error);
    }
}

TEST_CASE("running moments merge equals sequential accumulation") {
    RunningMoments all, left, right;
    for (int i = 0; i < 100; ++i) {
        const double x = std::sin(i * 0.37) * 3 + i * 0.01;
        all.add(x);
        (i < 37 ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-14));
    CHECK(left.m2 == doctest::Approx(all.m2).epsilon(1e-12));
}

TEST_CASE("monte carlo rethrows body failures") {
    CHECK_THROWS_AS(run_monte_carlo(5000, 1, 2,
                                    [](std::size_t n, std::span<double>) {
                                        if (n == 4100) throw std::runtime_error("boom");
                                    }),
                    std::runtime_error);
}

}
