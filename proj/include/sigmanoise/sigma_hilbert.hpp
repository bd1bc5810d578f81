#pragma once

#include "sigmanoise/gauss.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sigmanoise {

/// A representative (f, μ) of the class f·√dμ.
class SigmaFunction {
public:
    using Fn = std::function<double(double)>;
    /// Value on one part of μ's decomposition. Sums need it where an atom or a
    /// singular support meets a density.
    using PartFn = std::function<double(double, WeightedNodes::Part, const std::string&)>;

    /// Checks ∫ f² dμ < ∞ by quadrature.
    SigmaFunction(Fn f, SigmaFiniteMeasure mu, std::string label = {});
    SigmaFunction(Fn f, PartFn on_part, SigmaFiniteMeasure mu, std::string label = {});

    double operator()(double x) const { return f_(x); }
    double on_part(double x, WeightedNodes::Part part, const std::string& key) const {
        return on_part_ ? on_part_(x, part, key) : f_(x);
    }
    const Fn& function() const noexcept { return f_; }
    const SigmaFiniteMeasure& measure() const noexcept { return mu_; }
    const std::string& label() const noexcept { return label_; }

private:
    Fn f_;
    PartFn on_part_;
    SigmaFiniteMeasure mu_;
    std::string label_;
};

/// √(dμ/dλ)(x), choosing the part of λ that carries x.
double root_density(const Decomposition& mu, const Decomposition& lambda, double x);

/// ∫ f₁f₂ √((dμ₁/dλ)(dμ₂/dλ)) dλ with λ = μ₁ + μ₂.
double inner_product(const SigmaFunction& a, const SigmaFunction& b);
double squared_norm(const SigmaFunction& a);

/// Representative (f₁√(dμ₁/dλ) + f₂√(dμ₂/dλ), λ).
SigmaFunction add(const SigmaFunction& a, const SigmaFunction& b);
SigmaFunction scale(const SigmaFunction& a, double c);

/// Points on which λ-a.e. identities are decided: an equispaced grid over the
/// hull of λ (clipped to [−100, 100]) plus every atom.
std::vector<double> canonical_grid(const SigmaFiniteMeasure& lambda, std::size_t points = 2048);

/// f₁√(dμ₁/dλ) = f₂√(dμ₂/dλ) on the canonical grid within `tolerance`.
bool equivalent(const SigmaFunction& a, const SigmaFunction& b, double tolerance = 1e-9);

/// W̃(F): the Ito integral of f under μ with μ's own basis.
double lift(const SigmaFunction& F, std::span<const double> xi, std::size_t J = 0);

/// Coefficients of two classes in one frame: the basis of λ = μ₁ + μ₂ applied
/// to f_i√(dμ_i/dλ). Equivalent representatives give identical coefficients.
struct LiftFrame {
    GaussianNoiseField field;
    std::vector<double> first;
    std::vector<double> second;
};

LiftFrame lift_frame(const SigmaFunction& a, const SigmaFunction& b, std::size_t J = 0);
std::pair<double, double> lift_pair(const SigmaFunction& a, const SigmaFunction& b, std::span<const double> xi,
                                    std::size_t J = 0);

/// Step function with values[i] on (cuts[i−1], cuts[i]] inside the support.
struct StepFunction {
    std::vector<double> cuts;
    std::vector<double> values;

    double operator()(double x) const;
};

/// Two copies W₁, W₂ of the noise of μ with E[(W₁)_A (W₂)_B] = ∫_{A∩B} f dμ.
///
/// The basis is a direct sum of Legendre bases on the level intervals of f,
/// which diagonalizes multiplication by f; W₂ uses ξ'_j = ρ_j ξ_j + √(1−ρ_j²) η_j
/// with η drawn from the auxiliary stream of the same sample.
class CorrelatedPair {
public:
    CorrelatedPair(const SigmaFiniteMeasure& mu, StepFunction f, std::size_t per_piece = 64);

    const GaussianNoiseField& field() const noexcept { return field_; }
    std::span<const double> correlations() const noexcept { return rho_; }

    std::pair<double, double> evaluate(const BorelSet& A, std::uint64_t seed, std::uint64_t sample) const;
    /// E[(W₁)_A (W₂)_B].
    MonteCarloEstimate cross_covariance_mc(const BorelSet& A, const BorelSet& B, const McOptions& options) const;
    /// E[(W₂)_A (W₂)_B].
    MonteCarloEstimate second_covariance_mc(const BorelSet& A, const BorelSet& B, const McOptions& options) const;

private:
    void coordinates(std::uint64_t seed, std::uint64_t sample, std::span<double> xi, std::span<double> xi2) const;

    GaussianNoiseField field_;
    std::vector<double> rho_;
};

CorrelatedPair correlated_pair(const SigmaFiniteMeasure& mu, StepFunction f, std::size_t per_piece = 64);

}  // namespace sigmanoise
