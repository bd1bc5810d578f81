#include "sigmanoise/gauss.hpp"
#include "sigmanoise/quadrature.hpp"
#include "sigmanoise/rng.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <numbers>

using namespace sigmanoise;

TEST_SUITE("gauss") {

TEST_CASE("universal sample points extend deterministically") {
    const UniversalSamplePoint xi = sample_xi(3, 16, 2);
    const CoordinateStream s(3, 2);
    CHECK(xi.size() == 16);
    for (std::size_t j = 0; j < 40; ++j) CHECK(xi[j] == s.normal(j));
    CHECK(xi.coordinates(20)[19] == s.normal(19));
    CHECK_THROWS_AS(sample_xi(3, 0), std::invalid_argument);
}

TEST_CASE("lebesgue covariance equals the overlap") {
    const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0));
    const auto e = covariance_mc(field, BorelSet::interval(0.0, 0.5), BorelSet::interval(0.25, 1.0), {50000, 2, 1});
    CHECK(e.brackets(0.25));
    const auto disjoint = covariance_mc(field, BorelSet::interval(0.0, 0.3), BorelSet::interval(0.5, 0.9), {50000, 2, 1});
    CHECK(disjoint.brackets(0.0));
    CHECK_THROWS_AS(covariance_mc(field, BorelSet::interval(0, 1), BorelSet::interval(0, 1), {10, 1, 1}),
                    std::invalid_argument);
}

TEST_CASE("truncated coefficient sums converge to the mass") {
    const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0), 256);
    const auto c = field.set_coefficients(BorelSet::interval(0.2, 0.9));
    double s = 0.0;
    for (double v : c) s += v * v;
    CHECK(s == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(s <= 0.7 + 1e-12);  // Bessel
}

TEST_CASE("atomic noise is exact per coordinate") {
    const SigmaFiniteMeasure mu = SigmaFiniteMeasure::atomic({{0.0, 4.0}, {1.0, 0.25}});
    const GaussianNoiseField field(mu);
    const UniversalSamplePoint xi = sample_xi(8, 2);
    CHECK(noise_on_set(field, BorelSet::interval(-1.0, 0.5), xi) == doctest::Approx(2.0 * xi[0]));
    CHECK(noise_on_set(field, BorelSet::interval(-1.0, 2.0), xi) == doctest::Approx(2.0 * xi[0] + 0.5 * xi[1]));
}

TEST_CASE("noise is additive on disjoint sets") {
    const GaussianNoiseField field(SigmaFiniteMeasure::cantor());
    const UniversalSamplePoint xi = sample_xi(4, field.truncation());
    const BorelSet a = BorelSet::interval(0.0, 0.25), b = BorelSet::interval(0.25, 0.8);
    CHECK(noise_on_set(field, a.unite(b), xi) ==
          doctest::Approx(noise_on_set(field, a, xi) + noise_on_set(field, b, xi)).epsilon(1e-12));
}

TEST_CASE("sets of zero and infinite mass") {
    const GaussianNoiseField field(SigmaFiniteMeasure::cantor());
    for (double v : field.set_coefficients(BorelSet::interval(0.4, 0.6))) CHECK(v == 0.0);
    const GaussianNoiseField line(make_basis(SigmaFiniteMeasure::lebesgue(0.0, 1.0)), 8);
    CHECK(line.truncation() == 8);
}

TEST_CASE("ito isometry for a smooth integrand") {
    const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0), 64);
    const auto f = [](double x) { return std::sin(std::numbers::pi * x); };
    const auto e = ito_covariance_mc(field, f, f, {40000, 5, 1});
    CHECK(e.brackets(0.5));
}

TEST_CASE("psi on another basis and the markov pullback") {
    const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0), 64);
    const UniversalSamplePoint xi = sample_xi(6, 64);
    const auto own = psi_map(field, xi.prefix());
    for (std::size_t j = 0; j < 64; ++j) CHECK(own[j] == xi[j]);
    const LegendreBasis target(SigmaFiniteMeasure::lebesgue(0.0, 1.0), 64);
    const auto z = psi_map(field, target, 4, xi.prefix());
    for (std::size_t j = 0; j < 4; ++j) CHECK(z[j] == doctest::Approx(xi[j]).epsilon(1e-10));
    const double pulled = markov_pullback(
        field, target, 2, [](std::span<const double> c) { return c[0] * c[1]; }, xi.prefix());
    CHECK(pulled == doctest::Approx(xi[0] * xi[1]).epsilon(1e-10));
    CHECK_THROWS_AS(gamma_map(field, std::vector<double>(3), BorelSet::interval(0, 1)), std::invalid_argument);
}

TEST_CASE("characteristic functional against gauss-hermite") {
    const std::vector<double> c = {0.4, -0.8};
    const std::complex<double> exact = characteristic_functional_exact(c);
    // Product of one-dimensional Gauss–Hermite integrals of cos and sin.
    const QuadratureRule gh = gauss_hermite_probabilists(40);
    std::complex<double> product = 1.0;
    for (double cj : c) {
        std::complex<double> e = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) e += gh.weights[i] * std::exp(std::complex<double>(0, cj * gh.nodes[i]));
        product *= e;
    }
    CHECK(std::abs(exact - product) < 1e-12);
    const ComplexEstimate mc = characteristic_functional_mc(c, {50000, 3, 1});
    CHECK(mc.real.brackets(exact.real()));
    CHECK(mc.imag.brackets(exact.imag()));
}

TEST_CASE("moment identity against gaussian integration by parts") {
    // E[ξ_j ξ_k e^{i<ξ,c>}] by tensor Gauss–Hermite in two dimensions.
    const std::vector<double> c = {0.6, -0.3};
    const QuadratureRule gh = gauss_hermite_probabilists(40);
    for (auto [j, k] : {std::pair<std::size_t, std::size_t>{0, 0}, {0, 1}, {1, 1}}) {
        std::complex<double> sum = 0.0;
        for (std::size_t a = 0; a < gh.nodes.size(); ++a) {
            for (std::size_t b = 0; b < gh.nodes.size(); ++b) {
                const double x[2] = {gh.nodes[a], gh.nodes[b]};
                sum += gh.weights[a] * gh.weights[b] * x[j] * x[k] *
                       std::exp(std::complex<double>(0, c[0] * x[0] + c[1] * x[1]));
            }
        }
        CHECK(std::abs(moment_functional_exact(j, k, c) - sum) < 1e-12);
    }
}

TEST_CASE("fbm variance is a power law") {
    for (double H : {0.2, 0.5, 0.8}) {
        for (double t : {0.25, 3.0, 10.0}) {
            CHECK(fbm_increment_variance(H, t) == doctest::Approx(std::pow(t, 2 * H)).epsilon(1e-4));
        }
    }
    CHECK_THROWS_AS(fbm_increment_variance(1.2, 1.0), std::invalid_argument);
}

TEST_CASE("l2 escape ratio concentrates") {
    CHECK(l2_escape_ratio(1, 100000) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(max_abs_coordinate(1, 100000) > 3.0);
    CHECK(max_abs_coordinate(1, 100000) < 7.0);
}

}
