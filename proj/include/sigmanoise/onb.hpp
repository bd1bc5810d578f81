#pragma once

#include "sigmanoise/measure.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sigmanoise {

enum class BasisFamily { legendre, walsh_cantor, sine_brownian, atomic_indicators, composite, reweighted, rotated };

const char* to_string(BasisFamily family) noexcept;

/// Orthonormal family φ_0, …, φ_{J−1} in L²(μ). Immutable.
class OrthonormalBasis {
public:
    OrthonormalBasis(SigmaFiniteMeasure mu, std::size_t size) : mu_(std::move(mu)), size_(size) {}
    virtual ~OrthonormalBasis() = default;

    virtual BasisFamily family() const noexcept = 0;
    const SigmaFiniteMeasure& measure() const noexcept { return mu_; }
    std::size_t size() const noexcept { return size_; }

    virtual double evaluate(std::size_t j, double x) const = 0;
    /// φ_0(x), …, φ_{n−1}(x) with n = out.size() ≤ size().
    virtual void evaluate_all(double x, std::span<double> out) const;
    /// ∫_A φ_j dμ for j < count.
    virtual std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const;
    std::vector<double> indicator_coefficients(const BorelSet& A) const { return indicator_coefficients(A, size_); }
    /// ⟨φ_j, f⟩_{L²(μ)} for j < count.
    virtual std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const;
    std::vector<double> coefficients(const std::function<double(double)>& f) const { return coefficients(f, size_); }
    /// Gram matrix ⟨φ_j, φ_k⟩ for j, k < n by the basis' own quadrature.
    virtual Eigen::MatrixXd gram(std::size_t n) const;
    /// Rule used for quadrature-based coefficients.
    virtual QuadratureOptions quadrature() const { return {}; }
    /// Whether the point carries the part of μ this basis lives on (used by composites).
    virtual bool owns(double x) const;
    virtual std::string describe() const;

protected:
    void check_index(std::size_t j) const;
    void check_count(std::size_t count) const;

private:
    SigmaFiniteMeasure mu_;
    std::size_t size_;
};

using Basis = std::shared_ptr<const OrthonormalBasis>;

/// Orthonormal polynomials for Lebesgue or a weighted density on [lo, hi],
/// built from the three-term recurrence in y = 2(x−lo)/(hi−lo) − 1. Lebesgue
/// uses the closed-form Legendre coefficients; weighted densities use a Lanczos
/// run with full reorthogonalization on a Gauss–Legendre discretization.
/// Evaluates to zero outside [lo, hi].
class LegendreBasis final : public OrthonormalBasis {
public:
    LegendreBasis(SigmaFiniteMeasure mu, std::size_t size);
    BasisFamily family() const noexcept override { return BasisFamily::legendre; }
    double evaluate(std::size_t j, double x) const override;
    void evaluate_all(double x, std::span<double> out) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    Eigen::MatrixXd gram(std::size_t n) const override;
    QuadratureOptions quadrature() const override;
    bool owns(double x) const override { return lo_ <= x && x <= hi_; }
    bool closed_form() const noexcept { return closed_form_; }
    std::span<const double> alpha() const noexcept { return alpha_; }
    std::span<const double> beta() const noexcept { return beta_; }

private:
    double lo_, hi_;
    bool closed_form_;
    double norm0_;
    std::vector<double> alpha_;
    std::vector<double> beta_;  // beta_[k] couples p_k and p_{k+1}
};

/// Walsh products w_S = Π_{k∈S} r_k on a two-branch IFS of equal weights,
/// r_k = 1 − 2·(k-th digit). Bit k−1 of the index j marks k ∈ S, so indices
/// with highest bit m−1 are the sets with largest element m.
class WalshBasis final : public OrthonormalBasis {
public:
    WalshBasis(SigmaFiniteMeasure mu, std::size_t depth);
    BasisFamily family() const noexcept override { return BasisFamily::walsh_cantor; }
    std::size_t depth() const noexcept { return depth_; }
    /// Throws std::invalid_argument for points off the attractor.
    double evaluate(std::size_t j, double x) const override;
    void evaluate_all(double x, std::span<double> out) const override;
    /// Exact on cylinder sets and on sets whose boundary misses the attractor.
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    /// Cylinder integrals at the coding depth, then a fast Walsh–Hadamard transform.
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    /// Exact: Walsh products are constant on cylinders of the coding depth.
    Eigen::MatrixXd gram(std::size_t n) const override;
    bool owns(double x) const override;

private:
    std::size_t depth_;
    double norm_;
};

/// φ_0(t) = t, φ_k(t) = √2·sin(kπt)/(kπ): an orthonormal basis of the
/// Cameron–Martin space of Brownian motion on [0,1]. Point evaluation only;
/// indicator and L² coefficients are not defined for this family.
class SineBrownianBasis final : public OrthonormalBasis {
public:
    explicit SineBrownianBasis(std::size_t size);
    BasisFamily family() const noexcept override { return BasisFamily::sine_brownian; }
    double evaluate(std::size_t j, double x) const override;
    void evaluate_all(double x, std::span<double> out) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
};

/// χ_{x_i} / √μ({x_i}).
class AtomicBasis final : public OrthonormalBasis {
public:
    explicit AtomicBasis(SigmaFiniteMeasure mu);
    BasisFamily family() const noexcept override { return BasisFamily::atomic_indicators; }
    double evaluate(std::size_t j, double x) const override;
    Eigen::MatrixXd gram(std::size_t n) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    bool owns(double x) const override;

private:
    std::vector<Atom> atoms_;
};

/// Direct sum of bases for mutually singular pieces of μ, interleaved round-robin.
class CompositeBasis final : public OrthonormalBasis {
public:
    CompositeBasis(SigmaFiniteMeasure mu, std::vector<Basis> parts, std::size_t size);
    BasisFamily family() const noexcept override { return BasisFamily::composite; }
    double evaluate(std::size_t j, double x) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    /// Block diagonal: the parts live on mutually singular pieces of μ.
    Eigen::MatrixXd gram(std::size_t n) const override;
    bool owns(double x) const override;
    std::span<const Basis> parts() const noexcept { return parts_; }
    std::string describe() const override;

private:
    std::vector<Basis> parts_;
    std::vector<std::pair<std::size_t, std::size_t>> index_;  // (part, local index)
};

/// ψ_j = φ_j·√(dμ/dλ), an orthonormal family in L²(λ) built from a basis of L²(μ).
class ReweightedBasis final : public OrthonormalBasis {
public:
    ReweightedBasis(Basis base, SigmaFiniteMeasure lambda);
    BasisFamily family() const noexcept override { return BasisFamily::reweighted; }
    double evaluate(std::size_t j, double x) const override;
    void evaluate_all(double x, std::span<double> out) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    QuadratureOptions quadrature() const override { return base_->quadrature(); }
    std::string describe() const override;

private:
    double root_derivative(double x, WeightedNodes::Part part, const std::string& key) const;

    Basis base_;
    Decomposition mu_parts_;
    Decomposition lambda_parts_;
};

/// ψ_i = Σ_k U_ik φ_k for i < n (U orthogonal n×n), ψ_j = φ_j beyond.
class RotatedBasis final : public OrthonormalBasis {
public:
    RotatedBasis(Basis base, Eigen::MatrixXd rotation);
    BasisFamily family() const noexcept override { return BasisFamily::rotated; }
    double evaluate(std::size_t j, double x) const override;
    void evaluate_all(double x, std::span<double> out) const override;
    using OrthonormalBasis::indicator_coefficients;
    std::vector<double> indicator_coefficients(const BorelSet& A, std::size_t count) const override;
    std::vector<double> coefficients(const std::function<double(double)>& f, std::size_t count) const override;
    Eigen::MatrixXd gram(std::size_t n) const override;
    QuadratureOptions quadrature() const override { return base_->quadrature(); }
    std::string describe() const override;

private:
    std::vector<double> rotate(std::vector<double> c) const;

    Basis base_;
    Eigen::MatrixXd rotation_;
};

/// Default truncation per family: Legendre 1024, Walsh 2^10, sine 10^4,
/// atomic = number of atoms.
std::size_t default_truncation(const SigmaFiniteMeasure& mu);

/// Basis of L²(μ) with J functions (J = 0 selects the default).
Basis make_basis(const SigmaFiniteMeasure& mu, std::size_t J = 0);
Basis sine_brownian(std::size_t J = 10000);
Basis rotated(Basis base, Eigen::MatrixXd rotation);
Basis reweighted(Basis base, SigmaFiniteMeasure lambda);

/// max_{j,k<n} |⟨φ_j, φ_k⟩ − δ_jk| from gram(n).
double gram_deviation(const OrthonormalBasis& basis, std::size_t n);

}  // namespace sigmanoise
