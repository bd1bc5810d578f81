#include "sigmanoise/polynomial.hpp"
#include "sigmanoise/quadrature.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <numbers>

using namespace sigmanoise;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre integrates monomials up to degree 2n-1") {
    for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
        const QuadratureRule& rule = gauss_legendre(n);
        for (std::size_t k = 0; k < 2 * n; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(k));
            const double exact = k % 2 ? 0.0 : 2.0 / static_cast<double>(k + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("two-point rule is +-1/sqrt3") {
    const QuadratureRule& rule = gauss_legendre(2);
    CHECK(rule.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(rule.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rules are cached and stable") {
    const QuadratureRule& a = gauss_legendre(33);
    gauss_legendre(200);
    CHECK(&a == &gauss_legendre(33));
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("gauss-hermite gives normal moments") {
    const QuadratureRule rule = gauss_hermite_probabilists(12);
    const double moments[] = {1, 0, 1, 0, 3, 0, 15, 0, 105};
    for (int k = 0; k <= 8; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
        CHECK(sum == doctest::Approx(moments[k]).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("paneled integration of a smooth oscillation") {
    const double v = integrate_interval([](double x) { return std::cos(x); }, 0.0, 40.0, 16, 20);
    CHECK(v == doctest::Approx(std::sin(40.0)).epsilon(1e-12));
}

TEST_CASE("polynomial arithmetic") {
    const Polynomial p{1.0, 2.0, 3.0};
    const Polynomial q{0.0, 1.0};
    CHECK((p * q)(2.0) == doctest::Approx(p(2.0) * 2.0));
    CHECK((p + q)(1.5) == doctest::Approx(p(1.5) + 1.5));
    CHECK(p.compose_affine(2.0, 1.0)(0.5) == doctest::Approx(p(2.0)));
    CHECK(Polynomial::monomial(3, 2.0)(2.0) == doctest::Approx(16.0));
    CHECK(p.degree() == 2);
}

}
