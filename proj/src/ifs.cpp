#include "sigmanoise/ifs.hpp"

#include "sigmanoise/format.hpp"
#include "sigmanoise/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sigmanoise {

namespace {

double to_double(const Rational& r) { return static_cast<double>(r); }

template <class T>
std::vector<T> moment_recursion(const std::vector<T>& ratios, const std::vector<T>& shifts,
                                const std::vector<T>& weights, std::size_t degree) {
    const std::size_t branches = ratios.size();
    std::vector<T> moments(degree + 1);
    moments[0] = T(1);
    // Pascal row and per-branch powers, built incrementally.
    std::vector<std::vector<T>> ratio_pow(branches, std::vector<T>(degree + 1));
    std::vector<std::vector<T>> shift_pow(branches, std::vector<T>(degree + 1));
    for (std::size_t i = 0; i < branches; ++i) {
        ratio_pow[i][0] = T(1);
        shift_pow[i][0] = T(1);
        for (std::size_t k = 1; k <= degree; ++k) {
            ratio_pow[i][k] = ratio_pow[i][k - 1] * ratios[i];
            shift_pow[i][k] = shift_pow[i][k - 1] * shifts[i];
        }
    }
    std::vector<T> binom(degree + 1);
    binom[0] = T(1);
    for (std::size_t k = 1; k <= degree; ++k) {
        // Advance Pascal row to n = k (right to left).
        binom[k] = T(1);
        for (std::size_t l = k - 1; l >= 1; --l) {
            binom[l] = binom[l] + binom[l - 1];
        }
        T rhs = T(0);
        T diag = T(1);
        for (std::size_t i = 0; i < branches; ++i) {
            T acc = T(0);
            for (std::size_t l = 0; l < k; ++l) {
                acc += binom[l] * ratio_pow[i][l] * shift_pow[i][k - l] * moments[l];
            }
            rhs += weights[i] * acc;
            diag -= weights[i] * ratio_pow[i][k];
        }
        moments[k] = rhs / diag;
    }
    return moments;
}

std::size_t int_pow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t k = 0; k < exp; ++k) {
        out *= base;
    }
    return out;
}

}  // namespace

IteratedFunctionSystem IteratedFunctionSystem::make(std::vector<AffineBranch> branches,
                                                    std::vector<double> probabilities,
                                                    IfsOptions options) {
    IteratedFunctionSystem ifs;
    ifs.branches_ = std::move(branches);
    ifs.probabilities_ = std::move(probabilities);
    ifs.validate_and_finish(options);
    return ifs;
}

IteratedFunctionSystem IteratedFunctionSystem::make_exact(std::vector<ExactBranch> branches,
                                                          std::vector<Rational> probabilities,
                                                          IfsOptions options) {
    IteratedFunctionSystem ifs;
    for (const ExactBranch& b : branches) {
        ifs.branches_.push_back({to_double(b.ratio), to_double(b.shift)});
    }
    for (const Rational& p : probabilities) {
        ifs.probabilities_.push_back(to_double(p));
    }
    ifs.exact_branches_ = std::move(branches);
    ifs.exact_probabilities_ = std::move(probabilities);
    ifs.validate_and_finish(options);
    return ifs;
}

IteratedFunctionSystem IteratedFunctionSystem::middle_third_cantor() {
    return make_exact({{Rational(1, 3), Rational(0)}, {Rational(1, 3), Rational(2, 3)}},
                      {Rational(1, 2), Rational(1, 2)});
}

IteratedFunctionSystem IteratedFunctionSystem::binary() {
    return make_exact({{Rational(1, 2), Rational(0)}, {Rational(1, 2), Rational(1, 2)}},
                      {Rational(1, 2), Rational(1, 2)});
}

IteratedFunctionSystem IteratedFunctionSystem::bernoulli(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("bernoulli: lambda must lie in (0, 1)");
    }
    IfsOptions options;
    options.allow_overlap = true;
    return make({{lambda, -lambda}, {lambda, lambda}}, {0.5, 0.5}, options);
}

void IteratedFunctionSystem::validate_and_finish(const IfsOptions& options) {
    if (branches_.empty()) {
        throw std::invalid_argument("ifs: at least one branch is required");
    }
    if (branches_.size() != probabilities_.size()) {
        throw std::invalid_argument("ifs: one probability per branch is required");
    }
    for (const AffineBranch& b : branches_) {
        if (!std::isfinite(b.ratio) || !std::isfinite(b.shift) || b.ratio == 0.0 ||
            std::abs(b.ratio) >= 1.0) {
            throw std::invalid_argument("ifs: contraction violated (need 0 < |ratio| < 1)");
        }
    }
    double total = 0.0;
    for (double p : probabilities_) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("ifs: probabilities must be positive");
        }
        total += p;
    }
    closed_ = std::abs(total - 1.0) <= 1e-12;
    if (options.require_normalized && !closed_) {
        throw std::invalid_argument("ifs: probabilities must sum to 1");
    }
    normalized_.clear();
    for (double p : probabilities_) {
        normalized_.push_back(p / total);
    }

    // Attractor hull: grow the fixed-point hull until it is invariant.
    const auto fixed_point = [&](std::size_t i) {
        if (exact_branches_) {
            const ExactBranch& e = (*exact_branches_)[i];
            return to_double(e.shift / (Rational(1) - e.ratio));
        }
        return branches_[i].shift / (1.0 - branches_[i].ratio);
    };
    double lo = fixed_point(0);
    double hi = lo;
    for (std::size_t i = 1; i < branches_.size(); ++i) {
        lo = std::min(lo, fixed_point(i));
        hi = std::max(hi, fixed_point(i));
    }
    for (int iter = 0; iter < 10000; ++iter) {
        double new_lo = lo;
        double new_hi = hi;
        for (const AffineBranch& b : branches_) {
            const double u = b(lo);
            const double v = b(hi);
            new_lo = std::min({new_lo, u, v});
            new_hi = std::max({new_hi, u, v});
        }
        if (new_lo == lo && new_hi == hi) break;
        lo = new_lo;
        hi = new_hi;
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("ifs: degenerate attractor (all branches share a fixed point)");
    }
    hull_ = Interval{lo, hi};

    std::vector<Interval> images;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        images.push_back(image(Word{static_cast<int>(i)}));
    }
    std::vector<Interval> sorted = images;
    std::sort(sorted.begin(), sorted.end());
    const double slack = 1e-14 * (hi - lo);
    overlapping_ = false;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        if (sorted[k].hi > sorted[k + 1].lo + slack) overlapping_ = true;
    }
    if (overlapping_ && !options.allow_overlap) {
        throw std::invalid_argument("ifs: non-overlap violated (branch images intersect)");
    }
    double reach = lo;
    bool gap = false;
    for (const Interval& img : sorted) {
        if (img.lo > reach + slack) gap = true;
        reach = std::max(reach, img.hi);
    }
    covers_ = !gap && reach >= hi - slack;

    key_ = "ifs[";
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        if (i) key_ += ';';
        key_ += shortest(branches_[i].ratio) + "," + shortest(branches_[i].shift) + "," +
                shortest(probabilities_[i]);
    }
    key_ += "]";
}

AffineBranch IteratedFunctionSystem::word_map(const Word& word) const {
    AffineBranch acc{1.0, 0.0};
    // τ_w = τ_{w1}∘…∘τ_{wn}: accumulate from the outermost map inward.
    for (int digit : word) {
        const AffineBranch& b = branches_.at(static_cast<std::size_t>(digit));
        acc = AffineBranch{acc.ratio * b.ratio, acc.ratio * b.shift + acc.shift};
    }
    return acc;
}

Interval IteratedFunctionSystem::image(const Word& word) const {
    const AffineBranch m = word_map(word);
    const double a = m(hull_.lo);
    const double b = m(hull_.hi);
    return a < b ? Interval{a, b} : Interval{b, a};
}

double IteratedFunctionSystem::weight(const Word& word) const {
    double w = 1.0;
    for (int digit : word) w *= probabilities_.at(static_cast<std::size_t>(digit));
    return w;
}

double IteratedFunctionSystem::invariant_weight(const Word& word) const {
    double w = 1.0;
    for (int digit : word) w *= normalized_.at(static_cast<std::size_t>(digit));
    return w;
}

std::optional<std::size_t> IteratedFunctionSystem::branch_containing(double x) const {
    const double tol = 1e-9 * (hull_.hi - hull_.lo);
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Interval img = image(Word{static_cast<int>(i)});
        if (x >= img.lo - tol && x <= img.hi + tol) return i;
    }
    return std::nullopt;
}

double IteratedFunctionSystem::inverse_map(double x) const {
    const auto i = branch_containing(x);
    if (!i) {
        throw std::invalid_argument("ifs: inverse map undefined off the branch images");
    }
    return branches_[*i].inverse(x);
}

std::optional<Word> IteratedFunctionSystem::coding(double x, std::size_t depth) const {
    Word word;
    word.reserve(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        const auto i = branch_containing(x);
        if (!i) return std::nullopt;
        word.push_back(static_cast<int>(*i));
        x = std::clamp(branches_[*i].inverse(x), hull_.lo, hull_.hi);
    }
    return word;
}

BorelSet cylinder_set(const IteratedFunctionSystem& ifs, const Word& word) {
    return BorelSet::cylinder(ifs.image(word), CylinderTag{ifs.key(), word});
}

CylinderCover cylinder_cover(const IteratedFunctionSystem& ifs, const BorelSet& set,
                             std::size_t max_depth, std::size_t leaf_budget) {
    CylinderCover cover;
    std::vector<CylinderPiece> frontier{CylinderPiece{{}, {1.0, 0.0}, 1.0, ifs.hull()}};
    const auto pieces = set.intervals();
    for (std::size_t depth = 0;; ++depth) {
        std::vector<CylinderPiece> pending;
        for (CylinderPiece& piece : frontier) {
            bool inside = false;
            bool touches = false;
            for (const Interval& p : pieces) {
                if (p.lo <= piece.image.lo && piece.image.hi <= p.hi) inside = true;
                if (piece.image.lo < p.hi && p.lo < piece.image.hi) touches = true;
            }
            if (inside) {
                cover.inside_weight += piece.weight;
                cover.inside.push_back(std::move(piece));
            } else if (touches) {
                pending.push_back(std::move(piece));
            }
        }
        if (pending.empty()) break;
        if (depth == max_depth || pending.size() > leaf_budget) {
            for (const CylinderPiece& piece : pending) cover.undecided_weight += piece.weight;
            cover.undecided = std::move(pending);
            break;
        }
        frontier.clear();
        for (const CylinderPiece& piece : pending) {
            for (std::size_t i = 0; i < ifs.size(); ++i) {
                CylinderPiece child;
                child.word = piece.word;
                child.word.push_back(static_cast<int>(i));
                const AffineBranch& b = ifs.branch(i);
                child.map = AffineBranch{piece.map.ratio * b.ratio, piece.map.ratio * b.shift + piece.map.shift};
                child.weight = piece.weight * ifs.normalized_probabilities()[i];
                const double a = child.map(ifs.hull().lo);
                const double c = child.map(ifs.hull().hi);
                child.image = a < c ? Interval{a, c} : Interval{c, a};
                frontier.push_back(std::move(child));
            }
        }
    }
    return cover;
}

std::vector<CylinderPiece> cylinders_at_depth(const IteratedFunctionSystem& ifs, std::size_t depth) {
    std::vector<CylinderPiece> level{CylinderPiece{{}, {1.0, 0.0}, 1.0, ifs.hull()}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<CylinderPiece> next;
        next.reserve(level.size() * ifs.size());
        for (const CylinderPiece& piece : level) {
            for (std::size_t i = 0; i < ifs.size(); ++i) {
                CylinderPiece child;
                child.word = piece.word;
                child.word.push_back(static_cast<int>(i));
                const AffineBranch& b = ifs.branch(i);
                child.map = AffineBranch{piece.map.ratio * b.ratio, piece.map.ratio * b.shift + piece.map.shift};
                child.weight = piece.weight * ifs.normalized_probabilities()[i];
                const double a = child.map(ifs.hull().lo);
                const double c = child.map(ifs.hull().hi);
                child.image = a < c ? Interval{a, c} : Interval{c, a};
                next.push_back(std::move(child));
            }
        }
        level = std::move(next);
    }
    return level;
}

std::vector<double> invariant_moments(const IteratedFunctionSystem& ifs, std::size_t degree) {
    std::vector<double> r, s, q;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        r.push_back(ifs.branch(i).ratio);
        s.push_back(ifs.branch(i).shift);
        q.push_back(ifs.normalized_probabilities()[i]);
    }
    return moment_recursion(r, s, q, degree);
}

std::vector<Rational> invariant_moments_exact(const IteratedFunctionSystem& ifs, std::size_t degree) {
    if (!ifs.exact_branches() || !ifs.exact_probabilities()) {
        throw std::invalid_argument("invariant_moments_exact: system has no rational coefficients");
    }
    std::vector<Rational> r, s, q;
    Rational total = 0;
    for (const Rational& p : *ifs.exact_probabilities()) total += p;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        r.push_back((*ifs.exact_branches())[i].ratio);
        s.push_back((*ifs.exact_branches())[i].shift);
        q.push_back((*ifs.exact_probabilities())[i] / total);
    }
    return moment_recursion(r, s, q, degree);
}

double invariant_integrate(const IteratedFunctionSystem& ifs, const Polynomial& p) {
    if (p.degree() > 32) {
        throw std::invalid_argument("invariant_integrate: degree above 32");
    }
    const auto m = invariant_moments(ifs, p.degree());
    double total = 0.0;
    for (std::size_t k = 0; k < p.coefficients().size(); ++k) total += p.coefficients()[k] * m[k];
    return total;
}

Rational invariant_integrate_exact(const IteratedFunctionSystem& ifs,
                                   const std::vector<Rational>& coefficients) {
    if (coefficients.empty()) return Rational(0);
    if (coefficients.size() > 33) {
        throw std::invalid_argument("invariant_integrate_exact: degree above 32");
    }
    const auto m = invariant_moments_exact(ifs, coefficients.size() - 1);
    Rational total = 0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) total += coefficients[k] * m[k];
    return total;
}

QuadratureRule invariant_gauss_rule(const IteratedFunctionSystem& ifs, std::size_t n) {
    if (n == 0 || n > 8) {
        throw std::invalid_argument("invariant_gauss_rule: 1 <= n <= 8");
    }
    const double centre = 0.5 * (ifs.hull().lo + ifs.hull().hi);
    const double half = 0.5 * (ifs.hull().hi - ifs.hull().lo);
    std::vector<double> r, s, q;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const AffineBranch& b = ifs.branch(i);
        r.push_back(b.ratio);
        s.push_back((b.ratio * centre + b.shift - centre) / half);
        q.push_back(ifs.normalized_probabilities()[i]);
    }
    const auto m = moment_recursion(r, s, q, 2 * n);
    const auto size = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd hankel(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = 0; j < size; ++j) hankel(i, j) = m[static_cast<std::size_t>(i + j)];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(hankel);
    Eigen::MatrixXd upper = llt.matrixU();
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nn, nn);
    for (Eigen::Index j = 0; j < nn; ++j) {
        double alpha = upper(j, j + 1) / upper(j, j);
        if (j > 0) alpha -= upper(j - 1, j) / upper(j - 1, j - 1);
        jacobi(j, j) = alpha;
        if (j + 1 < nn) {
            const double beta = upper(j + 1, j + 1) / upper(j, j);
            jacobi(j, j + 1) = beta;
            jacobi(j + 1, j) = beta;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    for (Eigen::Index i = 0; i < nn; ++i) {
        rule.nodes.push_back(centre + half * solver.eigenvalues()(i));
        const double v = solver.eigenvectors()(0, i);
        rule.weights.push_back(v * v);
    }
    return rule;
}

std::vector<double> chaos_game_sample(const IteratedFunctionSystem& ifs, std::size_t count,
                                      std::uint64_t seed) {
    double max_ratio = 0.0;
    for (const AffineBranch& b : ifs.branches()) max_ratio = std::max(max_ratio, std::abs(b.ratio));
    const auto depth = static_cast<std::size_t>(std::ceil(std::log(1e-17) / std::log(max_ratio)));
    std::vector<double> cumulative;
    double acc = 0.0;
    for (double q : ifs.normalized_probabilities()) cumulative.push_back(acc += q);
    cumulative.back() = 1.0;
    const double start = ifs.branch(0).shift / (1.0 - ifs.branch(0).ratio);

    std::vector<double> points(count);
    std::vector<std::size_t> digits(depth);
    for (std::size_t n = 0; n < count; ++n) {
        const CoordinateStream stream(seed, n, StreamDomain::digits);
        for (std::size_t k = 0; k < depth; ++k) {
            const double u = stream.uniform(k);
            digits[k] = static_cast<std::size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            digits[k] = std::min(digits[k], ifs.size() - 1);
        }
        double x = start;
        for (std::size_t k = depth; k-- > 0;) x = ifs.branch(digits[k])(x);
        points[n] = x;
    }
    return points;
}

namespace {

// ν(A) for the cylinder function with declared weights, via the cylinder cover.
// Preimages carry rounding from the inverse map; widen by far less than
// any cylinder so the intended cylinders count as inside.
double declared_mass(const IteratedFunctionSystem& ifs, const BorelSet& set, std::size_t depth) {
    const double slack = 1e-12 * (ifs.hull().hi - ifs.hull().lo);
    std::vector<Interval> widened;
    for (const Interval& p : set.intervals()) widened.push_back({p.lo - slack, p.hi + slack});
    const CylinderCover cover = cylinder_cover(ifs, BorelSet::from_intervals(std::move(widened)), depth + 2);
    double total = 0.0;
    for (const CylinderPiece& piece : cover.inside) total += ifs.weight(piece.word);
    return total;
}

}  // namespace

double closedness_residual(const IteratedFunctionSystem& ifs, std::size_t depth) {
    std::vector<Word> tests{Word{}};
    for (std::size_t d = 1; d <= depth; ++d) {
        for (const CylinderPiece& piece : cylinders_at_depth(ifs, d)) tests.push_back(piece.word);
    }
    const BorelSet hull = BorelSet::interval(ifs.hull().lo, ifs.hull().hi);
    double worst = 0.0;
    for (const Word& word : tests) {
        const Interval img = ifs.image(word);
        const BorelSet set = BorelSet::interval(img.lo, img.hi);
        const double direct = ifs.weight(word);
        double pushed = 0.0;
        for (std::size_t i = 0; i < ifs.size(); ++i) {
            const AffineBranch& b = ifs.branch(i);
            const BorelSet preimage = set.affine_image(1.0 / b.ratio, -b.shift / b.ratio).intersect(hull);
            if (preimage.empty()) continue;
            pushed += ifs.probability(i) * declared_mass(ifs, preimage, depth);
        }
        worst = std::max(worst, std::abs(pushed - direct));
    }
    return worst;
}

double similarity_dimension(const IteratedFunctionSystem& ifs) {
    auto moran = [&](double s) {
        double total = 0.0;
        for (const AffineBranch& b : ifs.branches()) total += std::pow(std::abs(b.ratio), s);
        return total - 1.0;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (moran(hi) > 0.0) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (moran(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::size_t coefficient_dimension(const IteratedFunctionSystem& ifs, std::size_t depth) {
    return int_pow(ifs.size(), depth);
}

namespace {

void check_walsh(const IteratedFunctionSystem& ifs) {
    if (ifs.size() != 2 || ifs.normalized_probabilities()[0] != 0.5) {
        throw std::invalid_argument("walsh coefficients need two branches of equal invariant weight");
    }
}

void check_input(const IteratedFunctionSystem& ifs, std::span<const double> f, std::size_t depth) {
    if (f.size() != coefficient_dimension(ifs, depth)) {
        throw std::invalid_argument("cuntz: coefficient vector does not match depth");
    }
}

}  // namespace

std::vector<double> cuntz_apply(const IteratedFunctionSystem& ifs, std::size_t i,
                                std::span<const double> f, std::size_t depth, CoefficientBasis basis) {
    if (i >= ifs.size()) throw std::invalid_argument("cuntz_apply: branch index out of range");
    check_input(ifs, f, depth);
    const std::size_t out_dim = coefficient_dimension(ifs, depth + 1);
    if (out_dim > kMaxCuntzDimension) {
        throw std::invalid_argument("cuntz_apply: depth overflow");
    }
    std::vector<double> out(out_dim, 0.0);
    const double p = ifs.probability(i);
    const double q = ifs.normalized_probabilities()[i];
    if (basis == CoefficientBasis::cylinder) {
        const double factor = std::sqrt(p / q);
        for (std::size_t w = 0; w < f.size(); ++w) out[i + ifs.size() * w] = factor * f[w];
    } else {
        check_walsh(ifs);
        const double factor = std::sqrt(p) * 0.5 / q;
        const double sigma = i == 0 ? 1.0 : -1.0;
        for (std::size_t s = 0; s < f.size(); ++s) {
            out[s << 1] += factor * f[s];
            out[(s << 1) | 1u] += factor * sigma * f[s];
        }
    }
    return out;
}

std::vector<double> cuntz_adjoint_apply(const IteratedFunctionSystem& ifs, std::size_t i,
                                        std::span<const double> f, std::size_t depth,
                                        CoefficientBasis basis) {
    if (i >= ifs.size()) throw std::invalid_argument("cuntz_adjoint_apply: branch index out of range");
    if (depth == 0) throw std::invalid_argument("cuntz_adjoint_apply: depth must be positive");
    check_input(ifs, f, depth);
    std::vector<double> out(coefficient_dimension(ifs, depth - 1), 0.0);
    const double p = ifs.probability(i);
    const double q = ifs.normalized_probabilities()[i];
    if (basis == CoefficientBasis::cylinder) {
        const double factor = std::sqrt(p / q);
        for (std::size_t v = 0; v < f.size(); ++v) {
            if (v % ifs.size() == i) out[v / ifs.size()] += factor * f[v];
        }
    } else {
        check_walsh(ifs);
        const double root = std::sqrt(p);
        const double sigma = i == 0 ? 1.0 : -1.0;
        for (std::size_t t = 0; t < f.size(); ++t) {
            out[t >> 1] += root * ((t & 1u) ? sigma : 1.0) * f[t];
        }
    }
    return out;
}

CuntzResiduals cuntz_relation_residual(const IteratedFunctionSystem& ifs, std::size_t depth,
                                       CoefficientBasis basis) {
    if (depth == 0) throw std::invalid_argument("cuntz_relation_residual: depth must be positive");
    const std::size_t big = coefficient_dimension(ifs, depth);
    const std::size_t small = coefficient_dimension(ifs, depth - 1);
    if (big > kMaxCuntzDimension) throw std::invalid_argument("cuntz_relation_residual: depth overflow");

    std::vector<Eigen::MatrixXd> forward;
    std::vector<Eigen::MatrixXd> adjoint;
    const auto B = static_cast<Eigen::Index>(big);
    const auto S = static_cast<Eigen::Index>(small);
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        Eigen::MatrixXd fwd = Eigen::MatrixXd::Zero(B, S);
        std::vector<double> unit(small, 0.0);
        for (std::size_t k = 0; k < small; ++k) {
            unit[k] = 1.0;
            const auto column = cuntz_apply(ifs, i, unit, depth - 1, basis);
            for (std::size_t r = 0; r < big; ++r) fwd(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = column[r];
            unit[k] = 0.0;
        }
        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(S, B);
        std::vector<double> unit_big(big, 0.0);
        for (std::size_t k = 0; k < big; ++k) {
            unit_big[k] = 1.0;
            const auto column = cuntz_adjoint_apply(ifs, i, unit_big, depth, basis);
            for (std::size_t r = 0; r < small; ++r) adj(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = column[r];
            unit_big[k] = 0.0;
        }
        forward.push_back(std::move(fwd));
        adjoint.push_back(std::move(adj));
    }
    auto norm2 = [](const Eigen::MatrixXd& m) {
        if (m.size() == 0) return 0.0;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(0);
    };
    CuntzResiduals out;
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        for (std::size_t j = 0; j < ifs.size(); ++j) {
            Eigen::MatrixXd m = adjoint[i] * forward[j];
            if (i == j) m -= Eigen::MatrixXd::Identity(S, S);
            out.isometry = std::max(out.isometry, norm2(m));
        }
    }
    Eigen::MatrixXd total = -Eigen::MatrixXd::Identity(B, B);
    for (std::size_t i = 0; i < ifs.size(); ++i) total += forward[i] * adjoint[i];
    out.completeness = norm2(total);
    return out;
}

}  // namespace sigmanoise
