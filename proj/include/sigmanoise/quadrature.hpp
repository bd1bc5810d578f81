#pragma once

#include <cstddef>
#include <vector>

namespace sigmanoise {

/// Nodes and weights of an n-point rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Legendre rule with n points (exact for polynomials of degree 2n−1).
/// Rules are computed once per n by Newton iteration on P_n and cached.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Gauss–Hermite rule for the weight e^{−x²/2}/√(2π) (probabilists' form),
/// i.e. Σ w_i g(x_i) ≈ E[g(Z)] for Z ~ N(0,1). Golub–Welsch on the Jacobi matrix.
QuadratureRule gauss_hermite_probabilists(std::size_t n);

/// ∫_a^b f(x) dx by an n-point Gauss–Legendre rule split into `panels` equal panels.
template <class F>
double integrate_interval(F&& f, double a, double b, std::size_t n, std::size_t panels = 1) {
    const QuadratureRule& rule = gauss_legendre(n);
    const double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double half = 0.5 * width;
        const double mid = lo + half;
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
        }
        total += panel * half;
    }
    return total;
}

}  // namespace sigmanoise
