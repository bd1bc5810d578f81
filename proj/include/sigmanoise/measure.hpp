#pragma once

#include "sigmanoise/borel_set.hpp"
#include "sigmanoise/ifs.hpp"
#include "sigmanoise/polynomial.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sigmanoise {

struct Atom {
    double point = 0.0;
    double mass = 0.0;
};

enum class MeasureKind { lebesgue, density, atomic, ifs_invariant, bernoulli, sum };

const char* to_string(MeasureKind kind) noexcept;

/// Sigma-finite measure on an interval of ℝ. Immutable; copies share state.
///
/// Every kind carries a positive scale factor, so 2·Lebesgue[0,1] is a
/// lebesgue measure with scale 2.
class SigmaFiniteMeasure {
public:
    using DensityFn = std::function<double(double)>;

    struct LebesgueData {
        double lo, hi;
    };
    struct DensityData {
        double lo, hi;
        DensityFn fn;
        std::optional<Polynomial> polynomial;
        std::string label;
    };
    struct AtomicData {
        std::vector<Atom> atoms;
    };
    struct IfsData {
        std::shared_ptr<const IteratedFunctionSystem> system;
    };
    struct BernoulliData {
        double lambda;
        std::shared_ptr<const IteratedFunctionSystem> system;
    };
    struct SumData {
        std::shared_ptr<const SigmaFiniteMeasure> first, second;
    };
    using Data = std::variant<LebesgueData, DensityData, AtomicData, IfsData, BernoulliData, SumData>;

    /// Lebesgue measure restricted to [lo, hi]; endpoints may be infinite.
    static SigmaFiniteMeasure lebesgue(double lo, double hi, double scale = 1.0);
    /// w(x)·dx on [lo, hi]; w must be nonnegative and bounded there.
    static SigmaFiniteMeasure density(double lo, double hi, DensityFn w, std::string label);
    static SigmaFiniteMeasure polynomial_density(double lo, double hi, Polynomial w);
    /// Atoms with identical points are merged; zero-mass atoms are dropped.
    static SigmaFiniteMeasure atomic(std::vector<Atom> atoms);
    static SigmaFiniteMeasure ifs_invariant(IteratedFunctionSystem system, double scale = 1.0);
    static SigmaFiniteMeasure cantor();
    /// Law of Σ ε_k λ^k with fair signs.
    static SigmaFiniteMeasure bernoulli(double lambda);
    static SigmaFiniteMeasure sum(const SigmaFiniteMeasure& a, const SigmaFiniteMeasure& b);

    SigmaFiniteMeasure scaled(double factor) const;

    MeasureKind kind() const noexcept;
    const Data& data() const noexcept { return impl_->data; }
    double scale() const noexcept { return impl_->scale; }
    /// Closed support hull; infinite endpoints allowed for Lebesgue.
    Interval hull() const noexcept { return impl_->hull; }
    bool finite() const noexcept;
    double total_mass() const;
    /// The IFS behind ifs_invariant and bernoulli kinds, else null.
    const IteratedFunctionSystem* system() const noexcept;
    std::string describe() const;

private:
    struct Impl {
        Data data;
        double scale = 1.0;
        Interval hull;
    };
    explicit SigmaFiniteMeasure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static SigmaFiniteMeasure build(Data data, double scale, Interval hull);

    std::shared_ptr<const Impl> impl_;
};

/// μ(A). Exact for Lebesgue, atomic, and IFS measures on sets whose boundary
/// misses the attractor (in particular cylinder sets); quadrature otherwise.
/// Returns +∞ for sets of infinite mass.
double measure_of(const SigmaFiniteMeasure& mu, const BorelSet& A);

struct IntegralResult {
    double value = 0.0;
    double error = 0.0;
};

struct QuadratureOptions {
    /// Gauss–Legendre nodes per panel on density kinds.
    std::size_t nodes = 64;
    std::size_t panels = 1;
    /// Cylinder depth and per-cylinder Gauss rule on IFS measures.
    std::size_t cylinder_depth = 6;
    std::size_t cylinder_nodes = 6;
};

/// Weighted point set representing μ restricted to A. Each node records which
/// part of the Lebesgue decomposition it samples, so Radon–Nikodym derivatives
/// can be evaluated part by part.
struct WeightedNodes {
    enum class Part { continuous, atom, singular };
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<Part> parts;
    /// For singular nodes: the key of the singular component, else empty.
    std::vector<std::string> keys;
};

WeightedNodes discretize(const SigmaFiniteMeasure& mu, const BorelSet& A, const QuadratureOptions& options = {});
WeightedNodes discretize(const SigmaFiniteMeasure& mu, const QuadratureOptions& options = {});

/// ∫_A f dμ with an error estimate from a refined rule (node doubling on
/// densities, deeper cylinders on IFS measures). f must be finite on A.
IntegralResult integrate(const SigmaFiniteMeasure& mu, const std::function<double(double)>& f,
                         const BorelSet& A, const QuadratureOptions& options = {});
IntegralResult integrate(const SigmaFiniteMeasure& mu, const std::function<double(double)>& f,
                         const QuadratureOptions& options = {});
/// Polynomial integrands: exact moment recursion on IFS measures over the
/// full hull or a cylinder; Gauss–Legendre otherwise.
IntegralResult integrate(const SigmaFiniteMeasure& mu, const Polynomial& p, const BorelSet& A);
IntegralResult integrate(const SigmaFiniteMeasure& mu, const Polynomial& p);

/// Lebesgue decomposition: absolutely continuous density, atoms, and singular
/// components identified by a canonical key with a coefficient.
struct Decomposition {
    struct Piece {
        double lo, hi, scale;
        SigmaFiniteMeasure::DensityFn fn;  // empty for constant density
    };
    std::vector<Piece> continuous;
    std::map<double, double> atoms;
    std::map<std::string, double> singular;
    std::map<std::string, std::shared_ptr<const IteratedFunctionSystem>> systems;

    double continuous_density(double x) const;
};

Decomposition decompose(const SigmaFiniteMeasure& mu);

/// dμ/dλ at x, evaluated on the given part of λ's decomposition.
/// 0/0 is read as 0. Throws std::invalid_argument when μ is visibly not absolutely continuous.
double radon_nikodym(const SigmaFiniteMeasure& mu, const SigmaFiniteMeasure& lambda, double x,
                     WeightedNodes::Part part, const std::string& key = {});
double radon_nikodym(const Decomposition& mu, const Decomposition& lambda, double x,
                     WeightedNodes::Part part, const std::string& key = {});

/// dμ/dλ at x on the part of λ that carries x: an atom of λ, else the
/// absolutely continuous parts, else the singular component whose hull holds x.
double radon_nikodym_at(const Decomposition& mu, const Decomposition& lambda, double x);

/// Pointwise dμ/dλ on a grid. A grid point that is an atom of λ uses the atom
/// ratio; other points use the absolutely continuous parts, or the singular
/// coefficient ratio where both are singular.
std::vector<double> radon_nikodym_on_grid(const SigmaFiniteMeasure& mu, const SigmaFiniteMeasure& lambda,
                                          std::span<const double> grid);

/// Throws std::invalid_argument when some atom or singular component of μ is absent from λ.
void require_absolutely_continuous(const Decomposition& mu, const Decomposition& lambda);

SigmaFiniteMeasure sum_measure(const SigmaFiniteMeasure& a, const SigmaFiniteMeasure& b);

/// μ∘τ_i⁻¹ for an IFS invariant measure: the invariant measure of the
/// conjugated system τ_i τ_j τ_i⁻¹, supported on τ_i(hull).
SigmaFiniteMeasure pushforward(const SigmaFiniteMeasure& mu, std::size_t branch);

}  // namespace sigmanoise
