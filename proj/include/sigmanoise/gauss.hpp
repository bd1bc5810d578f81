#pragma once

#include "sigmanoise/monte_carlo.hpp"
#include "sigmanoise/onb.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sigmanoise {

/// A point ξ of the coordinate space: a stored prefix plus the rule that
/// extends it. Coordinate j is a pure function of (seed, sample, j).
class UniversalSamplePoint {
public:
    UniversalSamplePoint(std::uint64_t seed, std::uint64_t sample, std::size_t J);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t sample() const noexcept { return sample_; }
    std::size_t size() const noexcept { return prefix_.size(); }
    std::span<const double> prefix() const noexcept { return prefix_; }
    /// Coordinate j (0-based); indices beyond the prefix are generated on demand.
    double operator[](std::size_t j) const;
    std::vector<double> coordinates(std::size_t n) const;

private:
    std::uint64_t seed_;
    std::uint64_t sample_;
    std::vector<double> prefix_;
};

UniversalSamplePoint sample_xi(std::uint64_t seed, std::size_t J, std::uint64_t sample = 0);

/// W^(μ) truncated to the first J basis functions. Copies share the
/// coefficient cache, which is safe to use from several threads.
class GaussianNoiseField {
public:
    explicit GaussianNoiseField(const SigmaFiniteMeasure& mu, std::size_t J = 0);
    explicit GaussianNoiseField(Basis basis, std::size_t J = 0);

    const SigmaFiniteMeasure& measure() const noexcept { return basis_->measure(); }
    const Basis& basis() const noexcept { return basis_; }
    std::size_t truncation() const noexcept { return J_; }

    double mass(const BorelSet& A) const;
    /// c_j(A) = ∫_A φ_j dμ, j < J. Throws for sets of infinite mass.
    std::vector<double> set_coefficients(const BorelSet& A) const;
    std::vector<double> function_coefficients(const std::function<double(double)>& f) const;

private:
    struct Cache;
    Basis basis_;
    std::size_t J_;
    std::shared_ptr<Cache> cache_;
};

/// Σ_j c_j ξ_j over the common prefix; ξ must cover every nonzero c_j.
double pair_sum(std::span<const double> coefficients, std::span<const double> xi);

double noise_on_set(const GaussianNoiseField& field, const BorelSet& A, std::span<const double> xi);
double noise_on_set(const GaussianNoiseField& field, const BorelSet& A, const UniversalSamplePoint& xi);
double ito_integral(const GaussianNoiseField& field, const std::function<double(double)>& f,
                    std::span<const double> xi);

/// E[Σ a_j ξ_j · Σ b_j ξ_j] by Monte Carlo; only coordinates with a nonzero
/// coefficient are drawn.
MonteCarloEstimate coefficient_covariance_mc(std::span<const double> a, std::span<const double> b,
                                             const McOptions& options);
/// E[W_A W_B]. Requires options.samples ≥ 100 and finite masses.
MonteCarloEstimate covariance_mc(const GaussianNoiseField& field, const BorelSet& A, const BorelSet& B,
                                 const McOptions& options);
/// E[W(f) W(g)].
MonteCarloEstimate ito_covariance_mc(const GaussianNoiseField& field, const std::function<double(double)>& f,
                                     const std::function<double(double)>& g, const McOptions& options);

/// Ψ(ξ)_j = W(φ_j)(ξ), j < J. For the field's own basis this is the prefix itself.
std::vector<double> psi_map(const GaussianNoiseField& field, std::span<const double> xi);
/// Coordinates Z_j = W(ψ_j) of the same noise against another basis ψ of L²(μ).
std::vector<double> psi_map(const GaussianNoiseField& field, const OrthonormalBasis& target, std::size_t n,
                            std::span<const double> xi);
/// Γ(ξ)(A) = Σ_j ξ_j c_j(A). The coordinate count must equal the truncation.
double gamma_map(const GaussianNoiseField& field, std::span<const double> coordinates, const BorelSet& A);

/// (f∘Ψ)(ξ) for a cylinder function f of the first n target coordinates.
double markov_pullback(const GaussianNoiseField& field, const OrthonormalBasis& target, std::size_t n,
                       const std::function<double(std::span<const double>)>& f, std::span<const double> xi);

struct ComplexEstimate {
    MonteCarloEstimate real;
    MonteCarloEstimate imag;
};

/// E[exp(i⟨ξ, c⟩)].
ComplexEstimate characteristic_functional_mc(std::span<const double> c, const McOptions& options);
std::complex<double> characteristic_functional_exact(std::span<const double> c);

/// E[ξ_j ξ_k exp(i⟨ξ, c⟩)] and its closed form (δ_jk − c_j c_k)·exp(−‖c‖²/2).
ComplexEstimate moment_functional_mc(std::size_t j, std::size_t k, std::span<const double> c,
                                     const McOptions& options);
std::complex<double> moment_functional_exact(std::size_t j, std::size_t k, std::span<const double> c);

struct FbmOptions {
    /// Gauss–Legendre nodes per half-period of cos(tx).
    std::size_t nodes = 16;
    /// Full periods of cos(tx) covered by the panels past the series head.
    std::size_t periods = 1000;
};

/// V(t) = c_H ∫ 2(1 − cos tx)|x|^{−(2H+1)} dx with c_H fixed by V(1) = 1.
double fbm_increment_variance(double H, double t, const FbmOptions& options = {});

/// S_n / n with S_n = Σ_{j<n} ξ_j² for sample 0 of the seed.
double l2_escape_ratio(std::uint64_t seed, std::size_t n);
double max_abs_coordinate(std::uint64_t seed, std::size_t n);

}  // namespace sigmanoise
