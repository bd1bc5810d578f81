#pragma once

#include "sigmanoise/borel_set.hpp"
#include "sigmanoise/polynomial.hpp"
#include "sigmanoise/quadrature.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigmanoise {

using Rational = boost::multiprecision::cpp_rational;
/// Digit word (i_1, …, i_n); the cylinder it names is τ_{i_1}∘…∘τ_{i_n}(hull).
using Word = std::vector<int>;

/// x ↦ ratio·x + shift.
struct AffineBranch {
    double ratio = 0.0;
    double shift = 0.0;

    double operator()(double x) const noexcept { return ratio * x + shift; }
    double inverse(double y) const noexcept { return (y - shift) / ratio; }
};

struct ExactBranch {
    Rational ratio;
    Rational shift;
};

struct IfsOptions {
    /// Reject probability vectors that do not sum to 1 (the closedness condition).
    bool require_normalized = true;
    /// Accept overlapping images; used internally for Bernoulli convolutions.
    bool allow_overlap = false;
};

/// Finite system of affine contractions on ℝ with branch weights.
class IteratedFunctionSystem {
public:
    static IteratedFunctionSystem make(std::vector<AffineBranch> branches,
                                       std::vector<double> probabilities, IfsOptions options = {});
    /// Same, but also keeps the rational coefficients for exact moment recursions.
    static IteratedFunctionSystem make_exact(std::vector<ExactBranch> branches,
                                             std::vector<Rational> probabilities,
                                             IfsOptions options = {});

    /// τ₀ = x/3, τ₁ = (x+2)/3 with weights (½, ½).
    static IteratedFunctionSystem middle_third_cantor();
    /// τ₀ = x/2, τ₁ = (x+1)/2 with weights (½, ½); invariant measure is Lebesgue on [0,1].
    static IteratedFunctionSystem binary();
    /// τ± = λ(x ± 1) with weights (½, ½); overlapping for λ > ½.
    static IteratedFunctionSystem bernoulli(double lambda);

    std::size_t size() const noexcept { return branches_.size(); }
    const AffineBranch& branch(std::size_t i) const { return branches_.at(i); }
    std::span<const AffineBranch> branches() const noexcept { return branches_; }
    double probability(std::size_t i) const { return probabilities_.at(i); }
    std::span<const double> probabilities() const noexcept { return probabilities_; }
    /// Probabilities rescaled to sum to one; these drive the invariant measure.
    std::span<const double> normalized_probabilities() const noexcept { return normalized_; }
    const std::optional<std::vector<ExactBranch>>& exact_branches() const noexcept { return exact_branches_; }
    const std::optional<std::vector<Rational>>& exact_probabilities() const noexcept { return exact_probabilities_; }

    /// Closed convex hull [lo, hi] of the attractor, stored as an Interval.
    Interval hull() const noexcept { return hull_; }
    /// Σ p_i = 1 to 1e−12.
    bool closed() const noexcept { return closed_; }
    bool overlapping() const noexcept { return overlapping_; }
    /// ⋃ τ_i(hull) = hull.
    bool covers_hull() const noexcept { return covers_; }

    /// (r_w, s_w) with τ_w(x) = r_w·x + s_w.
    AffineBranch word_map(const Word& word) const;
    /// Closed image τ_w(hull).
    Interval image(const Word& word) const;
    /// Π p_{w_k} using the declared (possibly unnormalized) weights.
    double weight(const Word& word) const;
    /// Π q_{w_k} with normalized weights: the invariant measure of the cylinder.
    double invariant_weight(const Word& word) const;

    /// Branch whose image contains x (lowest index on ties), if any.
    std::optional<std::size_t> branch_containing(double x) const;
    /// The inverse map R: R(x) = τ_i^{-1}(x) on τ_i(hull). Throws on gaps.
    double inverse_map(double x) const;
    /// First `depth` digits of x; empty optional when x falls into a gap.
    std::optional<Word> coding(double x, std::size_t depth) const;

    /// Canonical text identity (coefficients printed round-trip exact).
    const std::string& key() const noexcept { return key_; }

private:
    IteratedFunctionSystem() = default;
    void validate_and_finish(const IfsOptions& options);

    std::vector<AffineBranch> branches_;
    std::vector<double> probabilities_;
    std::vector<double> normalized_;
    std::optional<std::vector<ExactBranch>> exact_branches_;
    std::optional<std::vector<Rational>> exact_probabilities_;
    Interval hull_{};
    bool closed_ = false;
    bool overlapping_ = false;
    bool covers_ = false;
    std::string key_;
};

/// Cylinder set τ_w(hull) tagged with the system identity.
BorelSet cylinder_set(const IteratedFunctionSystem& ifs, const Word& word);

struct CylinderPiece {
    Word word;
    AffineBranch map;
    double weight = 0.0;  // invariant (normalized) weight
    Interval image{};
};

/// Decomposition of a set into cylinders: those whose image lies (up to endpoints)
/// inside the set, and the undecided leaves at the depth/budget limit.
struct CylinderCover {
    std::vector<CylinderPiece> inside;
    std::vector<CylinderPiece> undecided;
    double inside_weight = 0.0;
    double undecided_weight = 0.0;
};

/// Breadth-first refinement; stops at `max_depth` or when more than `leaf_budget`
/// undecided cylinders are pending. Endpoint contact is ignored (atomless measures).
CylinderCover cylinder_cover(const IteratedFunctionSystem& ifs, const BorelSet& set,
                             std::size_t max_depth, std::size_t leaf_budget = 1u << 16);

/// All cylinders of length `depth`, in lexicographic order of the word.
std::vector<CylinderPiece> cylinders_at_depth(const IteratedFunctionSystem& ifs, std::size_t depth);

/// Moments m_0..m_degree of the invariant measure via
/// m_k (1 − Σ q_i r_i^k) = Σ_i q_i Σ_{l<k} C(k,l) r_i^l s_i^{k−l} m_l.
std::vector<double> invariant_moments(const IteratedFunctionSystem& ifs, std::size_t degree);
/// Same recursion in rational arithmetic; requires a system built with make_exact.
std::vector<Rational> invariant_moments_exact(const IteratedFunctionSystem& ifs, std::size_t degree);

/// ∫ p dμ for the invariant probability measure (degree ≤ 32).
double invariant_integrate(const IteratedFunctionSystem& ifs, const Polynomial& p);
Rational invariant_integrate_exact(const IteratedFunctionSystem& ifs,
                                   const std::vector<Rational>& coefficients);

/// n-point Gaussian rule for the invariant measure (Golub–Welsch from exact
/// moments in hull-centred coordinates); nodes are in x, weights sum to one.
QuadratureRule invariant_gauss_rule(const IteratedFunctionSystem& ifs, std::size_t n);

/// N independent draws from the invariant measure. Sample n applies a random
/// composition τ_{i_1}∘…∘τ_{i_K} to a fixed point, digits drawn from the
/// counter stream (seed, n); K is chosen so the residual contraction is < 1e−17.
std::vector<double> chaos_game_sample(const IteratedFunctionSystem& ifs, std::size_t count,
                                      std::uint64_t seed);

/// max over the full set and all cylinders up to `depth` of
/// |Σ_i p_i·ν(τ_i^{-1}(A)) − ν(A)|, where ν is the cylinder function built from
/// the declared weights. Zero exactly for closed systems.
double closedness_residual(const IteratedFunctionSystem& ifs, std::size_t depth = 4);

/// Solution s of Σ |r_i|^s = 1; equals ln|I| / −ln r for equal ratios.
double similarity_dimension(const IteratedFunctionSystem& ifs);

/// Coefficient spaces V_d of functions depending on the first d digits.
///
/// cylinder: orthonormal indicators e_w = χ_{τ_w(hull)} / √μ(w), index
///           Σ_k w_k |I|^{k−1} (first digit least significant);
/// walsh:    Walsh products w_S = Π_{k∈S} r_k, r_k = 1 − 2·(k-th digit), bit k−1 of
///           the index marks k ∈ S. Only for two branches of equal invariant weight.
enum class CoefficientBasis { cylinder, walsh };

/// Largest depth accepted by the Cuntz operators.
inline constexpr std::size_t kMaxCuntzDimension = 1u << 12;

/// S_i f = χ_{τ_i(hull)} · (√p_i / μ(τ_i hull)) · f∘R, mapping V_d → V_{d+1}.
/// For closed systems μ(τ_i hull) = p_i and S_i is an isometry.
std::vector<double> cuntz_apply(const IteratedFunctionSystem& ifs, std::size_t i,
                                std::span<const double> coefficients, std::size_t depth,
                                CoefficientBasis basis = CoefficientBasis::cylinder);
/// S_i* φ = √p_i · φ∘τ_i, mapping V_d → V_{d−1} (d ≥ 1).
std::vector<double> cuntz_adjoint_apply(const IteratedFunctionSystem& ifs, std::size_t i,
                                        std::span<const double> coefficients, std::size_t depth,
                                        CoefficientBasis basis = CoefficientBasis::cylinder);

struct CuntzResiduals {
    double isometry = 0.0;      // max_{i,j} ‖S_i*S_j − δ_ij I‖ on V_{d−1}
    double completeness = 0.0;  // ‖Σ_i S_i S_i* − I‖ on V_d
};

/// Operator 2-norm residuals of both Cuntz relations on V_d.
CuntzResiduals cuntz_relation_residual(const IteratedFunctionSystem& ifs, std::size_t depth,
                                       CoefficientBasis basis = CoefficientBasis::cylinder);

std::size_t coefficient_dimension(const IteratedFunctionSystem& ifs, std::size_t depth);

}  // namespace sigmanoise
