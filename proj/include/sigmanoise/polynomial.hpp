#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sigmanoise {

/// Real polynomial Σ c_k x^k, coefficients in increasing degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    Polynomial(std::initializer_list<double> coefficients);

    static Polynomial monomial(std::size_t degree, double coefficient = 1.0);

    std::size_t degree() const noexcept;
    const std::vector<double>& coefficients() const noexcept { return c_; }

    double operator()(double x) const noexcept;

    /// x ↦ p(r·x + s).
    Polynomial compose_affine(double r, double s) const;

    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    Polynomial operator*(double scalar) const;

private:
    std::vector<double> c_;
};

}  // namespace sigmanoise
