#include "sigmanoise/descriptors.hpp"
#include "sigmanoise/measure.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <limits>

using namespace sigmanoise;

TEST_SUITE("measure") {

TEST_CASE("borel sets are half-open and merge") {
    const BorelSet a = BorelSet::interval(0.0, 1.0);
    CHECK_FALSE(a.contains(0.0));
    CHECK(a.contains(1.0));
    const BorelSet u = BorelSet::from_intervals({{0.5, 2.0}, {0.0, 1.0}, {3.0, 4.0}});
    CHECK(u.intervals().size() == 2);
    CHECK(u.lebesgue_length() == doctest::Approx(3.0));
    CHECK(a.intersect(BorelSet::interval(0.5, 3.0)).lebesgue_length() == doctest::Approx(0.5));
    CHECK(u.subtract(a).lebesgue_length() == doctest::Approx(2.0));
    CHECK(a.disjoint(BorelSet::interval(1.0, 2.0)));
    CHECK(BorelSet::real_line().contains(-1e300));
}

TEST_CASE("affine image of a set") {
    const BorelSet a = BorelSet::from_intervals({{0.0, 1.0}, {2.0, 3.0}});
    const BorelSet img = a.affine_image(-2.0, 1.0);
    CHECK(img.lebesgue_length() == doctest::Approx(4.0));
    CHECK(img.contains(-4.0));
    CHECK(img.contains(0.5));
}

TEST_CASE("lebesgue masses") {
    const SigmaFiniteMeasure mu = SigmaFiniteMeasure::lebesgue(0.0, 1.0);
    CHECK(measure_of(mu, BorelSet::interval(0.25, 0.75)) == doctest::Approx(0.5));
    CHECK(measure_of(mu, BorelSet::interval(-3.0, 0.5)) == doctest::Approx(0.5));
    CHECK(mu.total_mass() == doctest::Approx(1.0));
    const SigmaFiniteMeasure line = SigmaFiniteMeasure::lebesgue(-INFINITY, INFINITY);
    CHECK_FALSE(line.finite());
    CHECK(std::isinf(measure_of(line, BorelSet::interval(0.0, INFINITY))));
    CHECK(measure_of(line, BorelSet::interval(2.0, 5.0)) == doctest::Approx(3.0));
}

TEST_CASE("polynomial density integrates exactly") {
    const SigmaFiniteMeasure mu = SigmaFiniteMeasure::polynomial_density(0.0, 1.0, Polynomial{0.0, 2.0});
    CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(measure_of(mu, BorelSet::interval(0.0, 0.5)) == doctest::Approx(0.25).epsilon(1e-13));
    // ∫ x^3 · 2x dx = 2/5
    CHECK(integrate(mu, Polynomial::monomial(3)).value == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("atomic measures") {
    const SigmaFiniteMeasure mu = SigmaFiniteMeasure::atomic({{0.0, 0.25}, {1.0, 0.5}, {1.0, 0.25}, {2.0, 0.0}});
    CHECK(mu.total_mass() == doctest::Approx(1.0));
    CHECK(measure_of(mu, BorelSet::interval(0.5, 1.0)) == doctest::Approx(0.75));
    CHECK(measure_of(mu, BorelSet::interval(0.0, 1.0)) == doctest::Approx(0.75));  // 0 excluded
    CHECK(integrate(mu, [](double x) { return x * x; }).value == doctest::Approx(0.75));
}

TEST_CASE("cantor measure integrals use the exact moment recursion") {
    const SigmaFiniteMeasure mu = SigmaFiniteMeasure::cantor();
    CHECK(integrate(mu, Polynomial{0.0, 1.0}).value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate(mu, Polynomial::monomial(2)).value == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(measure_of(mu, BorelSet::interval(0.0, 1.0 / 3.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(measure_of(mu, BorelSet::interval(0.5, 0.6)) == doctest::Approx(0.0).epsilon(1e-12));
    // X = 1/2 + Σ ε_k 3^{-k}, so E[cos 2X] = cos(1)·Π cos(2·3^{-k}).
    double product = 1.0;
    for (int k = 1; k < 40; ++k) product *= std::cos(2.0 * std::pow(3.0, -k));
    const double expected = std::cos(1.0) * product;
    CHECK(integrate(mu, [](double x) { return std::cos(2.0 * x); }).value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("sums and scaling") {
    const SigmaFiniteMeasure mu = sum_measure(SigmaFiniteMeasure::lebesgue(0.0, 1.0, 2.0),
                                              SigmaFiniteMeasure::atomic({{0.5, 1.0}}));
    CHECK(mu.total_mass() == doctest::Approx(3.0));
    CHECK(measure_of(mu, BorelSet::interval(0.4, 0.6)) == doctest::Approx(1.4));
    CHECK(mu.scaled(0.5).total_mass() == doctest::Approx(1.5));
}

TEST_CASE("radon-nikodym derivatives") {
    const SigmaFiniteMeasure leb = SigmaFiniteMeasure::lebesgue(0.0, 1.0);
    const SigmaFiniteMeasure weighted = SigmaFiniteMeasure::polynomial_density(0.0, 1.0, Polynomial{0.0, 2.0});
    const Decomposition a = decompose(weighted), b = decompose(sum_measure(weighted, leb));
    CHECK(radon_nikodym_at(a, b, 0.25) == doctest::Approx(0.5 / 1.5));
    const SigmaFiniteMeasure mixed = sum_measure(leb, SigmaFiniteMeasure::atomic({{0.5, 2.0}}));
    const Decomposition m = decompose(mixed), atom = decompose(SigmaFiniteMeasure::atomic({{0.5, 1.0}}));
    CHECK(radon_nikodym_at(atom, m, 0.5) == doctest::Approx(0.5));
    CHECK(radon_nikodym_at(atom, m, 0.3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(require_absolutely_continuous(m, decompose(leb)), std::invalid_argument);
}

TEST_CASE("pushforward of cantor along a branch") {
    const SigmaFiniteMeasure mu = pushforward(SigmaFiniteMeasure::cantor(), 1);
    CHECK(mu.hull().lo == doctest::Approx(2.0 / 3.0));
    CHECK(integrate(mu, Polynomial{0.0, 1.0}).value == doctest::Approx(2.0 / 3.0 + 1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("descriptor parsing") {
    CHECK(parse_measure("lebesgue:0,1*2").total_mass() == doctest::Approx(2.0));
    CHECK(parse_measure("poly:0,1;0,2").total_mass() == doctest::Approx(1.0));
    CHECK(parse_measure("atomic:0@0.25;1@0.75").total_mass() == doctest::Approx(1.0));
    CHECK(parse_measure("cantor + lebesgue:0,1").total_mass() == doctest::Approx(2.0));
    CHECK(parse_measure(R"({"kind":"atomic","atoms":[[0,1],[2,3]],"scale":2})").total_mass() == doctest::Approx(8.0));
    CHECK(parse_measure(R"({"kind":"sum","parts":[{"kind":"cantor"},{"kind":"binary"}]})").total_mass() ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_measure("lebesgue:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_measure("{\"kind\":"), std::invalid_argument);
    CHECK_THROWS_AS(parse_measure("gamma:1"), std::invalid_argument);
    const SigmaFiniteMeasure c = parse_measure("cantor");
    CHECK(measure_of(c, parse_set("cyl:01", c)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(parse_set("cyl:2", c), std::invalid_argument);
    CHECK_THROWS_AS(parse_set("1,0", c), std::invalid_argument);
    CHECK(parse_set("0,1;2,3", c).intervals().size() == 2);
}

}
