#include "sigmanoise/ifs.hpp"
#include "sigmanoise/monte_carlo.hpp"

#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <numeric>

using namespace sigmanoise;

namespace {

// Brute-force moment: average of x^k over the left endpoints of all cylinders
// at depth d, weighted by the invariant weights. Error is O(r^d).
double cylinder_moment(const IteratedFunctionSystem& ifs, int k, std::size_t depth) {
    double total = 0.0;
    for (const CylinderPiece& c : cylinders_at_depth(ifs, depth)) {
        total += c.weight * std::pow(0.5 * (c.image.lo + c.image.hi), k);
    }
    return total;
}

// Coefficient index of a word: first digit least significant.
std::size_t word_index(const Word& w, std::size_t n) {
    std::size_t index = 0, place = 1;
    for (int d : w) {
        index += static_cast<std::size_t>(d) * place;
        place *= n;
    }
    return index;
}

// f = Σ c_w χ_{C_w}/√μ(C_w) evaluated at an attractor point.
double cylinder_function(const IteratedFunctionSystem& ifs, std::span<const double> c, std::size_t depth, double x) {
    const auto code = ifs.coding(x, depth);
    REQUIRE(code.has_value());
    return c[word_index(*code, ifs.size())] / std::sqrt(ifs.invariant_weight(*code));
}

}  // namespace

TEST_SUITE("ifs") {

TEST_CASE("standard systems") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    CHECK(cantor.size() == 2);
    CHECK(cantor.closed());
    CHECK_FALSE(cantor.overlapping());
    CHECK(cantor.hull().lo == 0.0);
    CHECK(cantor.hull().hi == 1.0);
    CHECK(similarity_dimension(cantor) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
    CHECK(similarity_dimension(IteratedFunctionSystem::binary()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(IteratedFunctionSystem::bernoulli(0.7).overlapping());
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(IteratedFunctionSystem::make({{0.5, 0.0}, {0.5, 0.5}}, {0.3, 0.3}), std::invalid_argument);
    CHECK_THROWS_AS(IteratedFunctionSystem::make({{1.5, 0.0}}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(IteratedFunctionSystem::make({{0.6, 0.0}, {0.6, 0.4}}, {0.5, 0.5}), std::invalid_argument);
    const auto loose = IteratedFunctionSystem::make({{0.5, 0.0}, {0.5, 0.5}}, {0.3, 0.3}, {false, false});
    CHECK_FALSE(loose.closed());
    CHECK(closedness_residual(loose) > 0.1);
    CHECK(closedness_residual(IteratedFunctionSystem::middle_third_cantor()) == doctest::Approx(0.0).scale(1e-15));
}

TEST_CASE("coding and the inverse map") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const double x = 2.0 / 3.0 + 2.0 / 27.0;  // digits 1,0,1,0,0,…
    const auto code = cantor.coding(x, 3);
    REQUIRE(code);
    CHECK(*code == Word{1, 0, 1});
    CHECK(cantor.inverse_map(x) == doctest::Approx(2.0 / 9.0));
    CHECK_FALSE(cantor.coding(0.5, 2).has_value());
    CHECK_THROWS_AS(cantor.inverse_map(0.5), std::invalid_argument);
}

TEST_CASE("cylinders and their weights") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const BorelSet c = cylinder_set(cantor, {0, 1});
    CHECK(c.cylinder_tag().has_value());
    CHECK(c.hull().lo == doctest::Approx(2.0 / 9.0));
    CHECK(c.hull().hi == doctest::Approx(1.0 / 3.0));
    const auto level = cylinders_at_depth(cantor, 5);
    CHECK(level.size() == 32);
    double total = 0.0;
    for (const CylinderPiece& p : level) total += p.weight;
    CHECK(total == doctest::Approx(1.0));
    const CylinderCover cover = cylinder_cover(cantor, BorelSet::interval(0.0, 0.5), 20);
    CHECK(cover.inside_weight == doctest::Approx(0.5));
    CHECK(cover.undecided_weight == doctest::Approx(0.0));
}

TEST_CASE("exact cantor moments against cylinder sums") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const auto exact = invariant_moments_exact(cantor, 6);
    CHECK(exact[1] == Rational(1, 2));
    CHECK(exact[2] == Rational(3, 8));
    CHECK(exact[3] == Rational(5, 16));
    for (int k = 1; k <= 6; ++k) {
        CHECK(exact[static_cast<std::size_t>(k)].convert_to<double>() ==
              doctest::Approx(cylinder_moment(cantor, k, 16)).epsilon(1e-7));
    }
}

TEST_CASE("binary system reproduces lebesgue moments") {
    const auto m = invariant_moments_exact(IteratedFunctionSystem::binary(), 8);
    for (int k = 0; k <= 8; ++k) CHECK(m[static_cast<std::size_t>(k)] == Rational(1, k + 1));
}

TEST_CASE("unequal weights match cylinder sums") {
    const auto ifs = IteratedFunctionSystem::make({{0.25, 0.0}, {0.5, 0.5}}, {0.3, 0.7});
    const auto m = invariant_moments(ifs, 4);
    for (int k = 1; k <= 4; ++k) {
        CHECK(m[static_cast<std::size_t>(k)] == doctest::Approx(cylinder_moment(ifs, k, 20)).epsilon(1e-5));
    }
}

TEST_CASE("invariant gauss rule integrates polynomials exactly") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const QuadratureRule rule = invariant_gauss_rule(cantor, 6);
    const auto m = invariant_moments(cantor, 11);
    for (int k = 0; k <= 11; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
        CHECK(sum == doctest::Approx(m[static_cast<std::size_t>(k)]).epsilon(1e-11));
    }
}

TEST_CASE("chaos game samples the invariant law") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const auto xs = chaos_game_sample(cantor, 100000, 4);
    RunningMoments m;
    for (double x : xs) {
        m.add(x);
        CHECK(cantor.coding(x, 8).has_value());
    }
    CHECK(m.estimate().brackets(0.5));
    // Variance 3/8 − 1/4 = 1/8; relative error of the sample variance ~ √(2/N).
    CHECK(m.m2 / 99999.0 == doctest::Approx(0.125).epsilon(0.02));
    CHECK(chaos_game_sample(cantor, 10, 4) == std::vector<double>(xs.begin(), xs.begin() + 10));
}

TEST_CASE("cuntz isometries act as the pointwise formula") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    const std::size_t depth = 4;
    std::vector<double> f(coefficient_dimension(cantor, depth));
    for (std::size_t w = 0; w < f.size(); ++w) f[w] = std::cos(1.0 + 0.7 * static_cast<double>(w));
    const auto points = chaos_game_sample(cantor, 200, 8);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto g = cuntz_apply(cantor, i, f, depth);
        const Interval image = cantor.image({static_cast<int>(i)});
        for (double x : points) {
            const bool in = image.lo <= x && x <= image.hi;
            const double expected =
                in ? std::sqrt(cantor.probability(i)) / 0.5 * cylinder_function(cantor, f, depth, cantor.inverse_map(x)) : 0.0;
            CHECK(cylinder_function(cantor, g, depth + 1, x) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("cuntz relations hold exactly for closed systems in both bases") {
    for (const auto& ifs : {IteratedFunctionSystem::middle_third_cantor(), IteratedFunctionSystem::binary()}) {
        for (auto basis : {CoefficientBasis::cylinder, CoefficientBasis::walsh}) {
            const CuntzResiduals r = cuntz_relation_residual(ifs, 6, basis);
            CHECK(r.isometry < 1e-12);
            CHECK(r.completeness < 1e-12);
        }
    }
    const auto three = IteratedFunctionSystem::make({{0.2, 0.0}, {0.2, 0.4}, {0.2, 0.8}}, {0.2, 0.3, 0.5});
    const CuntzResiduals r = cuntz_relation_residual(three, 4);
    CHECK(r.isometry < 1e-12);
    CHECK(r.completeness < 1e-12);
    CHECK_THROWS_AS(cuntz_relation_residual(three, 3, CoefficientBasis::walsh), std::invalid_argument);
}

TEST_CASE("adjoint inverts the isometry") {
    const IteratedFunctionSystem cantor = IteratedFunctionSystem::middle_third_cantor();
    std::vector<double> f(16);
    std::iota(f.begin(), f.end(), 1.0);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto back = cuntz_adjoint_apply(cantor, i, cuntz_apply(cantor, i, f, 4), 5);
        for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == doctest::Approx(f[k]));
        const auto other = cuntz_adjoint_apply(cantor, 1 - i, cuntz_apply(cantor, i, f, 4), 5);
        for (double v : other) CHECK(v == doctest::Approx(0.0));
    }
}

}
