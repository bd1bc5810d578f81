#pragma once

#include "sigmanoise/gauss.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sigmanoise {

using Complex = std::complex<double>;

/// C(s, t) = Σ_j φ_j(s)·conj φ_j(t) with explicit features φ_j. Real index
/// sets use the real axis of ℂ.
class PositiveDefiniteKernel {
public:
    virtual ~PositiveDefiniteKernel() = default;
    virtual std::string name() const = 0;
    virtual Complex evaluate(Complex s, Complex t) const = 0;
    /// φ_0(t), …, φ_{n−1}(t) with n = out.size().
    virtual void features(Complex t, std::span<Complex> out) const = 0;
    virtual std::size_t default_truncation() const = 0;
    /// Whether t belongs to the index set.
    virtual bool contains(Complex t) const = 0;
};

/// t ∧ s on [0,1]; φ_0 = t, φ_k = √2·sin(kπt)/(kπ).
class BrownianKernel final : public PositiveDefiniteKernel {
public:
    std::string name() const override { return "brownian"; }
    Complex evaluate(Complex s, Complex t) const override;
    void features(Complex t, std::span<Complex> out) const override;
    std::size_t default_truncation() const override { return 10000; }
    bool contains(Complex t) const override;
};

/// 1/(1 − z·conj w) on the open unit disk with φ_k = z^k, k ≥ 0. With
/// `drop_constant` the k = 0 feature is removed, giving the H₀² kernel
/// z·conj w/(1 − z·conj w).
class SzegoKernel final : public PositiveDefiniteKernel {
public:
    explicit SzegoKernel(bool drop_constant = false) : drop_constant_(drop_constant) {}
    std::string name() const override { return drop_constant_ ? "hardy0" : "szego"; }
    Complex evaluate(Complex s, Complex t) const override;
    void features(Complex t, std::span<Complex> out) const override;
    std::size_t default_truncation() const override { return 200; }
    bool contains(Complex t) const override { return std::abs(t) < 1.0; }

private:
    bool drop_constant_;
};

enum class JuliaStatus { inside, escaped, budget_exceeded };

const char* to_string(JuliaStatus status) noexcept;

struct JuliaOptions {
    std::size_t max_iterations = 200;
    double escape_radius = 2.1;
    /// Geometric-tail acceptance: |R_{n+1}|/|R_n| ≤ ratio over the last `window` steps.
    double ratio = 0.9;
    std::size_t window = 10;
};

struct JuliaOrbit {
    JuliaStatus status = JuliaStatus::budget_exceeded;
    /// R_0(z) = z, R_1(z), … up to the last computed iterate.
    std::vector<Complex> orbit;
    double l1_partial = 0.0;
    /// Bound on Σ_{n ≥ orbit.size()} |R_n| when inside.
    double l1_tail = 0.0;
};

/// R(z) = z⁴ − 2z².
Complex julia_map(Complex z);
JuliaOrbit julia_membership(Complex z, const JuliaOptions& options = {});

struct KernelValue {
    Complex value;
    double tail_bound = 0.0;
};

/// Π_{n<n_terms} (1 + R_n(z)·conj R_n(w)); both points must be inside Ω.
KernelValue julia_kernel(Complex z, Complex w, std::size_t n_terms = 64, const JuliaOptions& options = {});

/// The Julia kernel with features φ_S(z) = Π_{n∈S} R_n(z) over subsets S of the
/// first `orbit_terms` iterates (bit n of the feature index marks n ∈ S).
class JuliaKernel final : public PositiveDefiniteKernel {
public:
    explicit JuliaKernel(std::size_t orbit_terms = 12, JuliaOptions options = {})
        : orbit_terms_(orbit_terms), options_(options) {}
    std::string name() const override { return "julia"; }
    Complex evaluate(Complex s, Complex t) const override;
    void features(Complex t, std::span<Complex> out) const override;
    std::size_t default_truncation() const override { return std::size_t{1} << orbit_terms_; }
    bool contains(Complex t) const override;

private:
    std::size_t orbit_terms_;
    JuliaOptions options_;
};

using Kernel = std::shared_ptr<const PositiveDefiniteKernel>;

/// Σ_{j<J} φ_j(t)·conj φ_j(s), an approximation of C(t, s); the tail bound is
/// √((C(t,t) − ‖τ_J(t)‖²)(C(s,s) − ‖τ_J(s)‖²)).
KernelValue kernel_reconstruct(const PositiveDefiniteKernel& kernel, Complex s, Complex t, std::size_t J);

/// τ(t) = (φ_j(t))_{j<J}.
std::vector<Complex> embed_point(const PositiveDefiniteKernel& kernel, Complex t, std::size_t J);

/// max over pairs |‖τ(t) − τ(s)‖² − (C(t,t) − 2 Re C(t,s) + C(s,s))|.
double metric_identity_residual(const PositiveDefiniteKernel& kernel, std::span<const Complex> points, std::size_t J);

Eigen::MatrixXcd kernel_gram(const PositiveDefiniteKernel& kernel, std::span<const Complex> points);
Eigen::MatrixXcd truncated_gram(const PositiveDefiniteKernel& kernel, std::span<const Complex> points, std::size_t J);

struct PsdReport {
    double min_eigenvalue = 0.0;
    double trace = 0.0;
    /// min_eigenvalue ≥ −1e−9·trace.
    bool psd = false;
};

PsdReport psd_report(const Eigen::MatrixXcd& gram);
PsdReport psd_report(const Eigen::MatrixXd& gram);

/// X_t(ξ) = Σ_{j<J} ξ_j·conj φ_j(t) for a real or complex coordinate prefix.
Complex boundary_process(const PositiveDefiniteKernel& kernel, Complex t, std::span<const Complex> xi);
Complex boundary_process(const PositiveDefiniteKernel& kernel, Complex t, std::span<const double> xi);

/// E[conj X_s · X_t] over Gaussian ξ; the truncated target is Σ_{j<J} φ_j(s)·conj φ_j(t).
ComplexEstimate boundary_process_cov(const PositiveDefiniteKernel& kernel, Complex s, Complex t, std::size_t J,
                                     const McOptions& options);

/// (1/2π)∫ dθ / ((1 − z e^{−iθ})(1 − conj(w) e^{iθ})) by the trapezoid rule.
Complex szego_boundary_integral(Complex z, Complex w, std::size_t nodes = 2048);

/// exp(μ(A∩B) − (μ(A) + μ(B))/2).
double exp_set_kernel(const SigmaFiniteMeasure& mu, const BorelSet& A, const BorelSet& B);
Eigen::MatrixXd exp_set_gram(const SigmaFiniteMeasure& mu, std::span<const BorelSet> family);

struct IsometryCheck {
    double rkhs_norm = 0.0;
    MonteCarloEstimate mc_norm;
};

/// ‖Σ a_j K_{A_j}‖² = Σ a_j a_k K(A_j, A_k) against the MC estimate of E|Σ a_j e^{i W_{A_j}}|².
IsometryCheck fourier_map_isometry_check(const GaussianNoiseField& field, std::span<const BorelSet> family,
                                         std::span<const double> a, const McOptions& options);

}  // namespace sigmanoise
