#include "sigmanoise/polynomial.hpp"

#include <algorithm>

namespace sigmanoise {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    while (c_.size() > 1 && c_.back() == 0.0) {
        c_.pop_back();
    }
}

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : Polynomial(std::vector<double>(coefficients)) {}

Polynomial Polynomial::monomial(std::size_t degree, double coefficient) {
    std::vector<double> c(degree + 1, 0.0);
    c[degree] = coefficient;
    return Polynomial(std::move(c));
}

std::size_t Polynomial::degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

Polynomial Polynomial::compose_affine(double r, double s) const {
    // Horner in the polynomial ring: acc ← acc·(r x + s) + c_k.
    Polynomial acc;
    const Polynomial inner{s, r};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * inner + Polynomial{*it};
    }
    return acc;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    std::vector<double> out(std::max(c_.size(), other.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] += c_[i];
    for (std::size_t i = 0; i < other.c_.size(); ++i) out[i] += other.c_[i];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (c_.empty() || other.c_.empty()) {
        return Polynomial{};
    }
    std::vector<double> out(c_.size() + other.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        for (std::size_t j = 0; j < other.c_.size(); ++j) {
            out[i + j] += c_[i] * other.c_[j];
        }
    }
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(double scalar) const {
    std::vector<double> out = c_;
    for (double& v : out) v *= scalar;
    return Polynomial(std::move(out));
}

}  // namespace sigmanoise
