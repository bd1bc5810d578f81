#pragma once

#include "sigmanoise/monte_carlo.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sigmanoise {

/// X_λ = Σ_{k≥1} ε_k λ^k with fair signs from the coin stream of a seed.
class BernoulliConvolution {
public:
    /// K = 0 picks the smallest K with λ^K < 1e−14.
    explicit BernoulliConvolution(double lambda, std::uint64_t seed = 1, std::size_t K = 0);

    double lambda() const noexcept { return lambda_; }
    std::size_t terms() const noexcept { return K_; }
    std::uint64_t seed() const noexcept { return seed_; }
    /// λ/(1−λ): samples lie in (−bound, bound).
    double bound() const noexcept { return lambda_ / (1.0 - lambda_); }

    /// Draw n; X_λ and X_ρ built with the same (seed, n) share their coins.
    double sample(std::uint64_t n) const;
    std::vector<double> sample_paths(std::size_t N, std::uint64_t first = 0) const;

private:
    double lambda_;
    std::uint64_t seed_;
    std::size_t K_;
};

std::size_t default_series_terms(double lambda);

/// λρ/(1−λρ).
double bernoulli_covariance(double lambda, double rho);
/// E[X_λ X_ρ] over one shared coin stream.
MonteCarloEstimate coupled_covariance_mc(double lambda, double rho, const McOptions& options);
MonteCarloEstimate variance_mc(double lambda, const McOptions& options);

struct FourierValue {
    double value = 0.0;
    /// Σ_{k>n} (λ^k t)²/2, a bound on |log| of the omitted tail.
    double log_tail_bound = 0.0;
};

/// Π_{k=1..n} cos(λ^k t).
FourierValue fourier_transform(double lambda, double t, std::size_t n = 60);

/// Bin densities on [−bound, bound] with bins of width ≈ h starting at −bound.
struct Histogram {
    double lo = 0.0;
    double width = 0.0;
    std::vector<double> density;

    /// Density of the bin holding x; zero outside the range.
    double operator()(double x) const;
    double total_mass() const;
};

Histogram histogram(std::span<const double> samples, double lo, double hi, double h);
Histogram histogram(const BernoulliConvolution& bc, std::size_t N, double h = 0.01);

/// (1/π)∫_0^T cos(tx) Π cos(λ^k t) dt.
std::vector<double> fourier_inversion(double lambda, std::span<const double> grid, double T = 200.0);

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> histogram;
    std::vector<double> inversion;
};

DensityEstimate density_estimate(const BernoulliConvolution& bc, std::span<const double> grid, std::size_t N,
                                 double h = 0.01, double T = 200.0);

/// Grid mean of |D(λx) − c·(D(x+1) + D(x−1))| with c = constant_factor/(2λ),
/// D the histogram extended by zero. The grid spans the common support
/// |x| < 1/(1−λ) of both sides.
double scaling_identity_residual(const BernoulliConvolution& bc, std::size_t N, double h = 0.01,
                                 double constant_factor = 1.0, std::size_t grid_points = 2001);

/// ∫_{−T}^{T} Π_{n≤n₀} cos²(λⁿ t) dt, with n₀ chosen so that λ^{n₀}·T < 1e−8.
double ac2_l2_proxy(double lambda, double T, std::size_t nodes_per_unit = 32);

/// (λ, λ², …, λⁿ).
std::vector<double> hardy_coefficients(double lambda, std::size_t n);
double hardy_inner_product(std::span<const double> a, std::span<const double> b);

struct CrossTermResult {
    MonteCarloEstimate cross;      // E[(X(ω′) − X(ω))·F_r]
    MonteCarloEstimate indicator;  // E[F_r]
    double bound = 0.0;            // √(2λ²/(1−λ²))·√(E F_r)
};

/// F_r(ω, ω′) = 1{|X(ω) − X(ω′)| ≤ r} over independent pairs (draws 2n, 2n+1).
CrossTermResult cross_term_mc(double lambda, double r, const McOptions& options);

}  // namespace sigmanoise
