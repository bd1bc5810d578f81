#include "sigmanoise/bernoulli.hpp"
#include "sigmanoise/quadrature.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>

using namespace sigmanoise;

TEST_SUITE("bernoulli") {

TEST_CASE("samples lie inside the bound and are replayable") {
    const BernoulliConvolution bc(0.6, 3);
    CHECK(bc.bound() == doctest::Approx(1.5));
    const auto xs = bc.sample_paths(1000);
    for (double x : xs) CHECK(std::abs(x) < bc.bound());
    CHECK(bc.sample(17) == xs[17]);
    CHECK(std::pow(0.6, static_cast<double>(bc.terms())) < 1e-14);
    CHECK_THROWS_AS(BernoulliConvolution(1.0), std::invalid_argument);
}

TEST_CASE("variance is lambda^2/(1-lambda^2)") {
    for (double lambda : {0.3, 0.5, 0.8}) {
        const auto e = variance_mc(lambda, {50000, 2, 1});
        CHECK(e.brackets(lambda * lambda / (1 - lambda * lambda)));
    }
    CHECK(bernoulli_covariance(0.5, 0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("fourier transform of lambda = 1/2 is sin t / t") {
    for (double t : {0.1, 1.0, 5.0, 37.0}) {
        CHECK(fourier_transform(0.5, t).value == doctest::Approx(std::sin(t) / t).epsilon(1e-12));
    }
    CHECK(fourier_transform(0.9, 3.0, 200).log_tail_bound < 1e-15);
}

TEST_CASE("fourier transform equals the empirical characteristic function") {
    const BernoulliConvolution bc(0.7, 5);
    const auto xs = bc.sample_paths(100000);
    for (double t : {0.5, 2.0}) {
        double mean = 0.0;
        for (double x : xs) mean += std::cos(t * x);
        mean /= static_cast<double>(xs.size());
        CHECK(std::abs(mean - fourier_transform(0.7, t).value) < 4.0 / std::sqrt(1e5));
    }
}

TEST_CASE("histograms are normalized") {
    const Histogram h = histogram(BernoulliConvolution(0.4, 2), 100000, 0.02);
    CHECK(h.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h(10.0) == 0.0);
    const std::vector<double> xs = {0.1, 0.2, 0.25, 0.9};
    const Histogram small = histogram(xs, 0.0, 1.0, 0.5);
    CHECK(small.density.size() == 2);
    CHECK(small(0.3) == doctest::Approx(1.5));
}

TEST_CASE("fourier inversion recovers the uniform density for lambda = 1/2") {
    const std::vector<double> grid = {-0.5, 0.0, 0.3, 0.8};
    const auto d = fourier_inversion(0.5, grid, 400.0);
    for (double v : d) CHECK(v == doctest::Approx(0.5).epsilon(0.02));
    const auto outside = fourier_inversion(0.5, std::vector<double>{1.5}, 400.0);
    CHECK(std::abs(outside[0]) < 0.01);
}

TEST_CASE("density estimate combines histogram and inversion") {
    const BernoulliConvolution bc(0.5, 7);
    const std::vector<double> grid = {-0.25, 0.25};
    const DensityEstimate e = density_estimate(bc, grid, 200000, 0.05);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(e.histogram[i] == doctest::Approx(0.5).epsilon(0.05));
        CHECK(e.inversion[i] == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("scaling identity separates the true constant") {
    const BernoulliConvolution bc(0.5, 9);
    const double good = scaling_identity_residual(bc, 400000, 0.02);
    const double bad = scaling_identity_residual(bc, 400000, 0.02, 0.5);
    CHECK(good < 0.05);
    CHECK(bad > good + 0.1);
}

TEST_CASE("l2 proxy converges to the density norm for lambda = 1/2") {
    // ∫ (sin t / t)² dt over ℝ = π, the Plancherel image of ∫ D² = 1/2 times 2π.
    CHECK(ac2_l2_proxy(0.5, 400.0) == doctest::Approx(std::numbers::pi).epsilon(2e-3));
    CHECK(ac2_l2_proxy(0.5, 50.0) < ac2_l2_proxy(0.5, 100.0));
}

TEST_CASE("hardy coefficients") {
    const auto a = hardy_coefficients(0.5, 60), b = hardy_coefficients(0.3, 60);
    // Σ (λρ)^k = λρ/(1 − λρ), the bernoulli covariance.
    CHECK(hardy_inner_product(a, b) == doctest::Approx(bernoulli_covariance(0.5, 0.3)).epsilon(1e-14));
}

TEST_CASE("coupled covariance matches the closed form") {
    const auto e = coupled_covariance_mc(0.4, 0.7, {50000, 4, 1});
    CHECK(e.brackets(bernoulli_covariance(0.4, 0.7)));
}

TEST_CASE("cross term stays below its bound") {
    const CrossTermResult c = cross_term_mc(0.6, 0.2, {40000, 8, 1});
    CHECK(c.indicator.mean > 0.0);
    CHECK(c.bound == doctest::Approx(std::sqrt(2 * 0.36 / 0.64) * std::sqrt(c.indicator.mean)));
    CHECK(std::abs(c.cross.mean) <= c.bound);
}

}
