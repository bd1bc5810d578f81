#include "sigmanoise/onb.hpp"

#include "sigmanoise/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace sigmanoise {

namespace {

constexpr std::size_t kLegendreDefault = 1024;
constexpr std::size_t kWalshDefaultDepth = 10;
constexpr std::size_t kSineDefault = 10000;

// P_0(y), …, P_{n}(y) by the Bonnet recurrence; exact at y = ±1.
void legendre_values(double y, std::size_t n, std::vector<double>& out) {
    out.assign(n + 1, 0.0);
    out[0] = 1.0;
    if (n >= 1) out[1] = y;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        out[k + 1] = ((2.0 * kk + 1.0) * y * out[k] - kk * out[k - 1]) / (kk + 1.0);
    }
}

struct Panels {
    std::vector<double> points;
    std::vector<double> weights;
};

}  // namespace

const char* to_string(BasisFamily family) noexcept {
    switch (family) {
        case BasisFamily::legendre: return "legendre";
        case BasisFamily::walsh_cantor: return "walsh-cantor";
        case BasisFamily::sine_brownian: return "sine-brownian";
        case BasisFamily::atomic_indicators: return "atomic-indicators";
        case BasisFamily::composite: return "composite";
        case BasisFamily::reweighted: return "reweighted";
        case BasisFamily::rotated: return "rotated";
    }
    return "unknown";
}

void OrthonormalBasis::check_index(std::size_t j) const {
    if (j >= size_) throw std::invalid_argument("basis: index out of range");
}

void OrthonormalBasis::check_count(std::size_t count) const {
    if (count > size_) throw std::invalid_argument("basis: requested more coefficients than the truncation");
}

void OrthonormalBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = evaluate(j, x);
}

std::vector<double> OrthonormalBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    const WeightedNodes nodes = discretize(mu_, A, quadrature());
    std::vector<double> out(count, 0.0);
    std::vector<double> values(count);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        evaluate_all(nodes.points[k], values);
        for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * values[j];
    }
    return out;
}

std::vector<double> OrthonormalBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    const WeightedNodes nodes = discretize(mu_, quadrature());
    std::vector<double> out(count, 0.0);
    std::vector<double> values(count);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        const double fx = f(nodes.points[k]);
        if (!std::isfinite(fx)) throw std::invalid_argument("coefficients: function is not finite on the support");
        evaluate_all(nodes.points[k], values);
        for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * fx * values[j];
    }
    return out;
}

Eigen::MatrixXd OrthonormalBasis::gram(std::size_t n) const {
    check_count(n);
    const WeightedNodes nodes = discretize(mu_, quadrature());
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd values(N);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        evaluate_all(nodes.points[k], std::span<double>(values.data(), n));
        G.noalias() += nodes.weights[k] * values * values.transpose();
    }
    return G;
}

bool OrthonormalBasis::owns(double x) const {
    const Interval h = mu_.hull();
    return h.lo <= x && x <= h.hi;
}

std::string OrthonormalBasis::describe() const {
    return std::string(to_string(family())) + "(" + mu_.describe() + ", J=" + std::to_string(size_) + ")";
}

// ---------------------------------------------------------------------------
// Legendre

namespace {

// Gauss–Legendre panels on A ∩ [lo, hi], split at density breakpoints, with the
// continuous density folded into the weights.
Panels continuous_nodes(const Decomposition& parts, const std::vector<double>& breaks, const BorelSet& A,
                        double lo, double hi, std::size_t n) {
    Panels out;
    const QuadratureRule& rule = gauss_legendre(n);
    const BorelSet clipped = A.intersect(BorelSet::interval(std::nextafter(lo, -INFINITY), hi));
    for (const Interval& piece : clipped.intervals()) {
        std::vector<double> cuts{std::max(piece.lo, lo)};
        for (double b : breaks) {
            if (b > cuts.front() && b < piece.hi) cuts.push_back(b);
        }
        cuts.push_back(piece.hi);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double half = 0.5 * (cuts[c + 1] - cuts[c]);
            const double mid = cuts[c] + half;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double x = mid + half * rule.nodes[i];
                out.points.push_back(x);
                out.weights.push_back(rule.weights[i] * half * parts.continuous_density(x));
            }
        }
    }
    return out;
}

std::vector<double> breakpoints(const Decomposition& parts) {
    std::set<double> cuts;
    for (const auto& piece : parts.continuous) {
        cuts.insert(piece.lo);
        cuts.insert(piece.hi);
    }
    return {cuts.begin(), cuts.end()};
}

}  // namespace

LegendreBasis::LegendreBasis(SigmaFiniteMeasure mu, std::size_t size) : OrthonormalBasis(mu, size) {
    if (size == 0) throw std::invalid_argument("legendre: J must be at least 1");
    const Decomposition parts = decompose(mu);
    if (!parts.atoms.empty() || !parts.singular.empty() || parts.continuous.empty()) {
        throw std::invalid_argument("legendre: measure must be absolutely continuous on an interval");
    }
    lo_ = mu.hull().lo;
    hi_ = mu.hull().hi;
    if (!std::isfinite(lo_) || !std::isfinite(hi_)) {
        throw std::invalid_argument("legendre: unbounded support is not supported");
    }
    closed_form_ = std::all_of(parts.continuous.begin(), parts.continuous.end(), [&](const auto& piece) {
        return !piece.fn && piece.lo == lo_ && piece.hi == hi_;
    });
    alpha_.assign(size, 0.0);
    beta_.assign(size, 0.0);
    if (closed_form_) {
        double scale = 0.0;
        for (const auto& piece : parts.continuous) scale += piece.scale;
        norm0_ = 1.0 / std::sqrt(scale * (hi_ - lo_));
        for (std::size_t k = 0; k < size; ++k) {
            const double n = static_cast<double>(k + 1);
            beta_[k] = n / std::sqrt(4.0 * n * n - 1.0);
        }
        return;
    }

    // Lanczos on the discrete measure Σ w_i δ_{y_i}: columns v_k = p_k(y)·√w.
    const std::size_t m = size + 64;
    const Panels nodes = continuous_nodes(parts, breakpoints(parts), BorelSet::interval(lo_, hi_), lo_, hi_, m);
    const auto M = static_cast<Eigen::Index>(nodes.points.size());
    Eigen::VectorXd y(M);
    Eigen::VectorXd root(M);
    double mass = 0.0;
    for (Eigen::Index i = 0; i < M; ++i) {
        y(i) = 2.0 * (nodes.points[static_cast<std::size_t>(i)] - lo_) / (hi_ - lo_) - 1.0;
        root(i) = std::sqrt(nodes.weights[static_cast<std::size_t>(i)]);
        mass += nodes.weights[static_cast<std::size_t>(i)];
    }
    if (!(mass > 0.0)) throw std::invalid_argument("legendre: density integrates to zero");
    norm0_ = 1.0 / std::sqrt(mass);
    Eigen::MatrixXd V(M, static_cast<Eigen::Index>(size + 1));
    V.col(0) = root / root.norm();
    for (std::size_t k = 0; k < size; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        Eigen::VectorXd u = y.cwiseProduct(V.col(kk));
        if (k > 0) u -= beta_[k - 1] * V.col(kk - 1);
        alpha_[k] = V.col(kk).dot(u);
        u -= alpha_[k] * V.col(kk);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd h = V.leftCols(kk + 1).transpose() * u;
            u -= V.leftCols(kk + 1) * h;
        }
        beta_[k] = u.norm();
        if (!(beta_[k] > 1e-300)) throw std::invalid_argument("legendre: measure supports fewer than J polynomials");
        V.col(kk + 1) = u / beta_[k];
    }
}

double LegendreBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    if (x < lo_ || x > hi_) return 0.0;
    const double y = 2.0 * (x - lo_) / (hi_ - lo_) - 1.0;
    double prev = 0.0;
    double cur = norm0_;
    for (std::size_t k = 0; k < j; ++k) {
        const double next = ((y - alpha_[k]) * cur - (k ? beta_[k - 1] : 0.0) * prev) / beta_[k];
        prev = cur;
        cur = next;
    }
    return cur;
}

void LegendreBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    if (out.empty()) return;
    if (x < lo_ || x > hi_) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double y = 2.0 * (x - lo_) / (hi_ - lo_) - 1.0;
    out[0] = norm0_;
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        out[k + 1] = ((y - alpha_[k]) * out[k] - (k ? beta_[k - 1] * out[k - 1] : 0.0)) / beta_[k];
    }
}

Eigen::MatrixXd LegendreBasis::gram(std::size_t n) const {
    check_count(n);
    const Decomposition parts = decompose(measure());
    const Panels nodes = continuous_nodes(parts, breakpoints(parts), BorelSet::interval(lo_, hi_), lo_, hi_, size() + 64);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd values(N);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        evaluate_all(nodes.points[k], std::span<double>(values.data(), n));
        G.noalias() += nodes.weights[k] * values * values.transpose();
    }
    return G;
}

QuadratureOptions LegendreBasis::quadrature() const {
    QuadratureOptions options;
    options.nodes = size() + 64;
    return options;
}

std::vector<double> LegendreBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    std::vector<double> out(count, 0.0);
    if (count == 0) return out;
    if (!closed_form_) {
        const Decomposition parts = decompose(measure());
        const Panels nodes = continuous_nodes(parts, breakpoints(parts), A, lo_, hi_, size() + 64);
        std::vector<double> values(count);
        for (std::size_t k = 0; k < nodes.points.size(); ++k) {
            evaluate_all(nodes.points[k], values);
            for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * values[j];
        }
        return out;
    }
    // ∫ P_n = (P_{n+1} − P_{n−1})/(2n+1), endpoint values exact at ±1.
    const double factor = 0.5 / (norm0_ * 1.0);  // √(scale·L)/2
    std::vector<double> pa, pb;
    const BorelSet clipped = A.intersect(BorelSet::interval(lo_, hi_));
    for (const Interval& piece : clipped.intervals()) {
        const double ya = 2.0 * (std::max(piece.lo, lo_) - lo_) / (hi_ - lo_) - 1.0;
        const double yb = 2.0 * (std::min(piece.hi, hi_) - lo_) / (hi_ - lo_) - 1.0;
        legendre_values(ya, count, pa);
        legendre_values(yb, count, pb);
        out[0] += factor * (yb - ya);
        for (std::size_t n = 1; n < count; ++n) {
            const double nn = static_cast<double>(n);
            const double antideriv = ((pb[n + 1] - pb[n - 1]) - (pa[n + 1] - pa[n - 1])) / (2.0 * nn + 1.0);
            out[n] += factor * std::sqrt(2.0 * nn + 1.0) * antideriv;
        }
    }
    return out;
}

std::vector<double> LegendreBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    const Decomposition parts = decompose(measure());
    const Panels nodes = continuous_nodes(parts, breakpoints(parts), BorelSet::interval(lo_, hi_), lo_, hi_,
                                          size() + 64);
    std::vector<double> out(count, 0.0);
    std::vector<double> values(count);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        const double fx = f(nodes.points[k]);
        if (!std::isfinite(fx)) throw std::invalid_argument("coefficients: function is not finite on the support");
        evaluate_all(nodes.points[k], values);
        for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * fx * values[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Walsh

WalshBasis::WalshBasis(SigmaFiniteMeasure mu, std::size_t depth)
    : OrthonormalBasis(mu, std::size_t{1} << depth), depth_(depth) {
    const IteratedFunctionSystem* ifs = mu.system();
    if (mu.kind() != MeasureKind::ifs_invariant || !ifs) {
        throw std::invalid_argument("walsh-cantor: needs an ifs-invariant measure");
    }
    if (ifs->size() != 2 || ifs->normalized_probabilities()[0] != 0.5) {
        throw std::invalid_argument("walsh-cantor: needs two branches of equal weight");
    }
    if (depth > 20) throw std::invalid_argument("walsh-cantor: depth above 20");
    norm_ = 1.0 / std::sqrt(mu.scale());
}

double WalshBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    if (j == 0) return norm_;
    const std::size_t m = static_cast<std::size_t>(std::bit_width(j));
    const auto code = measure().system()->coding(x, m);
    if (!code) throw std::invalid_argument("walsh-cantor: point is off the attractor");
    double value = norm_;
    for (std::size_t k = 0; k < m; ++k) {
        if ((j >> k) & 1u) value *= ((*code)[k] == 0) ? 1.0 : -1.0;
    }
    return value;
}

void WalshBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    if (out.empty()) return;
    out[0] = norm_;
    if (out.size() == 1) return;
    const std::size_t m = static_cast<std::size_t>(std::bit_width(out.size() - 1));
    const auto code = measure().system()->coding(x, m);
    if (!code) throw std::invalid_argument("walsh-cantor: point is off the attractor");
    for (std::size_t k = 0; k < m; ++k) {
        const double r = ((*code)[k] == 0) ? 1.0 : -1.0;
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t j = 0; j < bit && (j | bit) < out.size(); ++j) out[j | bit] = out[j] * r;
    }
}

bool WalshBasis::owns(double x) const { return measure().system()->coding(x, depth_).has_value(); }

std::vector<double> WalshBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    const IteratedFunctionSystem& ifs = *measure().system();
    const double root_scale = std::sqrt(measure().scale());
    std::vector<double> out(count, 0.0);
    auto add_piece = [&](const Word& word, double weight) {
        // ∫_{C_u} w_S dμ = μ(C_u)·Π_{k∈S} r_k(u) when S ⊂ {1..|u|}, else 0.
        const std::size_t limit = std::min<std::size_t>(count, std::size_t{1} << std::min<std::size_t>(word.size(), 20));
        std::vector<double> scratch(limit, 0.0);
        scratch[0] = root_scale * weight;
        for (std::size_t k = 0; (std::size_t{1} << k) < limit; ++k) {
            const double r = word[k] == 0 ? 1.0 : -1.0;
            const std::size_t bit = std::size_t{1} << k;
            for (std::size_t j = 0; j < bit && (j | bit) < limit; ++j) scratch[j | bit] = scratch[j] * r;
        }
        for (std::size_t j = 0; j < limit; ++j) out[j] += scratch[j];
    };
    if (A.cylinder_tag() && A.cylinder_tag()->system_key == ifs.key()) {
        const Word& word = A.cylinder_tag()->word;
        add_piece(word, ifs.invariant_weight(word));
        return out;
    }
    const CylinderCover cover = cylinder_cover(ifs, A, 60, 1u << 14);
    for (const CylinderPiece& piece : cover.inside) add_piece(piece.word, piece.weight);
    for (const CylinderPiece& piece : cover.undecided) add_piece(piece.word, 0.5 * piece.weight);
    return out;
}

std::vector<double> WalshBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    const IteratedFunctionSystem& ifs = *measure().system();
    const QuadratureRule rule = invariant_gauss_rule(ifs, 6);
    std::vector<double> leaf(size(), 0.0);
    for (const CylinderPiece& piece : cylinders_at_depth(ifs, depth_)) {
        std::size_t index = 0;
        for (std::size_t k = 0; k < piece.word.size(); ++k) index |= static_cast<std::size_t>(piece.word[k]) << k;
        double total = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double fx = f(piece.map(rule.nodes[i]));
            if (!std::isfinite(fx)) throw std::invalid_argument("coefficients: function is not finite on the support");
            total += rule.weights[i] * fx;
        }
        leaf[index] = piece.weight * total;
    }
    for (std::size_t bit = 1; bit < leaf.size(); bit <<= 1) {
        for (std::size_t j = 0; j < leaf.size(); ++j) {
            if (j & bit) continue;
            const double a = leaf[j];
            const double b = leaf[j | bit];
            leaf[j] = a + b;
            leaf[j | bit] = a - b;
        }
    }
    const double root_scale = std::sqrt(measure().scale());
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = root_scale * leaf[j];
    return out;
}

Eigen::MatrixXd WalshBasis::gram(std::size_t n) const {
    check_count(n);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    if (n == 0) return G;
    const std::size_t m = static_cast<std::size_t>(std::bit_width(n - 1));
    Eigen::VectorXd values(N);
    for (const CylinderPiece& piece : cylinders_at_depth(*measure().system(), m)) {
        values(0) = norm_;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = piece.word[k] == 0 ? 1.0 : -1.0;
            const std::size_t bit = std::size_t{1} << k;
            for (std::size_t j = 0; j < bit && (j | bit) < n; ++j) {
                values(static_cast<Eigen::Index>(j | bit)) = values(static_cast<Eigen::Index>(j)) * r;
            }
        }
        G.noalias() += measure().scale() * piece.weight * values * values.transpose();
    }
    return G;
}

// ---------------------------------------------------------------------------
// Sine (Brownian Cameron–Martin space)

SineBrownianBasis::SineBrownianBasis(std::size_t size) : OrthonormalBasis(SigmaFiniteMeasure::lebesgue(0.0, 1.0), size) {
    if (size == 0) throw std::invalid_argument("sine-brownian: J must be at least 1");
}

double SineBrownianBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    if (j == 0) return x;
    const double k = static_cast<double>(j) * std::numbers::pi;
    return std::numbers::sqrt2 * std::sin(k * x) / k;
}

void SineBrownianBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = evaluate(j, x);
}

std::vector<double> SineBrownianBasis::indicator_coefficients(const BorelSet&, std::size_t) const {
    throw std::invalid_argument("sine-brownian: basis of the Cameron-Martin space, indicator coefficients undefined");
}

std::vector<double> SineBrownianBasis::coefficients(const std::function<double(double)>&, std::size_t) const {
    throw std::invalid_argument("sine-brownian: basis of the Cameron-Martin space, L2 coefficients undefined");
}

// ---------------------------------------------------------------------------
// Atomic

namespace {

std::vector<Atom> scaled_atoms(const SigmaFiniteMeasure& mu) {
    const Decomposition parts = decompose(mu);
    if (!parts.continuous.empty() || !parts.singular.empty()) {
        throw std::invalid_argument("atomic-indicators: measure must be purely atomic");
    }
    if (parts.atoms.empty()) throw std::invalid_argument("atomic-indicators: measure has no atoms");
    std::vector<Atom> atoms;
    for (const auto& [point, mass] : parts.atoms) atoms.push_back({point, mass});
    return atoms;
}

}  // namespace

AtomicBasis::AtomicBasis(SigmaFiniteMeasure mu) : OrthonormalBasis(mu, scaled_atoms(mu).size()), atoms_(scaled_atoms(mu)) {}

double AtomicBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    return x == atoms_[j].point ? 1.0 / std::sqrt(atoms_[j].mass) : 0.0;
}

std::vector<double> AtomicBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    std::vector<double> out(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        if (A.contains(atoms_[j].point)) out[j] = std::sqrt(atoms_[j].mass);
    }
    return out;
}

std::vector<double> AtomicBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double fx = f(atoms_[j].point);
        if (!std::isfinite(fx)) throw std::invalid_argument("coefficients: function is not finite on the support");
        out[j] = std::sqrt(atoms_[j].mass) * fx;
    }
    return out;
}

Eigen::MatrixXd AtomicBasis::gram(std::size_t n) const {
    check_count(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double v = 1.0 / std::sqrt(atoms_[j].mass);
        G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = atoms_[j].mass * v * v;
    }
    return G;
}

bool AtomicBasis::owns(double x) const {
    return std::any_of(atoms_.begin(), atoms_.end(), [x](const Atom& a) { return a.point == x; });
}

// ---------------------------------------------------------------------------
// Composite

CompositeBasis::CompositeBasis(SigmaFiniteMeasure mu, std::vector<Basis> parts, std::size_t size)
    : OrthonormalBasis(mu, size), parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("composite: no parts");
    std::size_t available = 0;
    for (const Basis& p : parts_) available += p->size();
    if (size == 0 || size > available) throw std::invalid_argument("composite: J exceeds the parts' total size");
    for (std::size_t round = 0; index_.size() < size; ++round) {
        for (std::size_t p = 0; p < parts_.size() && index_.size() < size; ++p) {
            if (round < parts_[p]->size()) index_.emplace_back(p, round);
        }
    }
}

double CompositeBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    const auto [part, local] = index_[j];
    // Atoms take precedence over singular parts, which take precedence over densities.
    auto rank = [](BasisFamily f) { return f == BasisFamily::atomic_indicators ? 0 : f == BasisFamily::walsh_cantor ? 1 : 2; };
    const int mine = rank(parts_[part]->family());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (p == part) continue;
        const int other = rank(parts_[p]->family());
        if ((other < mine || (other == mine && p < part)) && parts_[p]->owns(x)) return 0.0;
    }
    if (!parts_[part]->owns(x)) return 0.0;
    return parts_[part]->evaluate(local, x);
}

bool CompositeBasis::owns(double x) const {
    return std::any_of(parts_.begin(), parts_.end(), [x](const Basis& p) { return p->owns(x); });
}

std::vector<double> CompositeBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    std::vector<std::size_t> need(parts_.size(), 0);
    for (std::size_t j = 0; j < count; ++j) need[index_[j].first] = index_[j].second + 1;
    std::vector<std::vector<double>> local(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (need[p]) local[p] = parts_[p]->indicator_coefficients(A, need[p]);
    }
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = local[index_[j].first][index_[j].second];
    return out;
}

std::vector<double> CompositeBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    std::vector<std::size_t> need(parts_.size(), 0);
    for (std::size_t j = 0; j < count; ++j) need[index_[j].first] = index_[j].second + 1;
    std::vector<std::vector<double>> local(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (need[p]) local[p] = parts_[p]->coefficients(f, need[p]);
    }
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = local[index_[j].first][index_[j].second];
    return out;
}

Eigen::MatrixXd CompositeBasis::gram(std::size_t n) const {
    check_count(n);
    std::vector<std::size_t> need(parts_.size(), 0);
    for (std::size_t j = 0; j < n; ++j) need[index_[j].first] = index_[j].second + 1;
    std::vector<Eigen::MatrixXd> blocks(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (need[p]) blocks[p] = parts_[p]->gram(need[p]);
    }
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (index_[j].first != index_[k].first) continue;
            G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                blocks[index_[j].first](static_cast<Eigen::Index>(index_[j].second),
                                        static_cast<Eigen::Index>(index_[k].second));
        }
    }
    return G;
}

std::string CompositeBasis::describe() const {
    std::string s = "composite[";
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (p) s += ";";
        s += parts_[p]->describe();
    }
    return s + "](J=" + std::to_string(size()) + ")";
}

// ---------------------------------------------------------------------------
// Reweighted

ReweightedBasis::ReweightedBasis(Basis base, SigmaFiniteMeasure lambda)
    : OrthonormalBasis(lambda, base->size()),
      base_(std::move(base)),
      mu_parts_(decompose(base_->measure())),
      lambda_parts_(decompose(lambda)) {
    require_absolutely_continuous(mu_parts_, lambda_parts_);
}

double ReweightedBasis::root_derivative(double x, WeightedNodes::Part part, const std::string& key) const {
    return std::sqrt(radon_nikodym(mu_parts_, lambda_parts_, x, part, key));
}

namespace {

WeightedNodes::Part point_part(const Decomposition& lambda, double x, std::string& key) {
    if (lambda.atoms.contains(x)) return WeightedNodes::Part::atom;
    if (lambda.continuous_density(x) > 0.0 || lambda.singular.empty()) return WeightedNodes::Part::continuous;
    key = lambda.singular.begin()->first;
    return WeightedNodes::Part::singular;
}

}  // namespace

double ReweightedBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    std::string key;
    const auto part = point_part(lambda_parts_, x, key);
    const double g = root_derivative(x, part, key);
    return g == 0.0 ? 0.0 : g * base_->evaluate(j, x);
}

void ReweightedBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    std::string key;
    const auto part = point_part(lambda_parts_, x, key);
    const double g = root_derivative(x, part, key);
    if (g == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    base_->evaluate_all(x, out);
    for (double& v : out) v *= g;
}

std::vector<double> ReweightedBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    const WeightedNodes nodes = discretize(measure(), A, quadrature());
    std::vector<double> out(count, 0.0);
    std::vector<double> values(count);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        const double g = root_derivative(nodes.points[k], nodes.parts[k], nodes.keys[k]);
        if (g == 0.0) continue;
        base_->evaluate_all(nodes.points[k], values);
        for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * g * values[j];
    }
    return out;
}

std::vector<double> ReweightedBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    const WeightedNodes nodes = discretize(measure(), quadrature());
    std::vector<double> out(count, 0.0);
    std::vector<double> values(count);
    for (std::size_t k = 0; k < nodes.points.size(); ++k) {
        const double g = root_derivative(nodes.points[k], nodes.parts[k], nodes.keys[k]);
        if (g == 0.0) continue;
        const double fx = f(nodes.points[k]);
        if (!std::isfinite(fx)) throw std::invalid_argument("coefficients: function is not finite on the support");
        base_->evaluate_all(nodes.points[k], values);
        for (std::size_t j = 0; j < count; ++j) out[j] += nodes.weights[k] * g * fx * values[j];
    }
    return out;
}

std::string ReweightedBasis::describe() const {
    return "reweighted(" + base_->describe() + " -> " + measure().describe() + ")";
}

// ---------------------------------------------------------------------------
// Rotated

RotatedBasis::RotatedBasis(Basis base, Eigen::MatrixXd rotation)
    : OrthonormalBasis(base->measure(), base->size()), base_(std::move(base)), rotation_(std::move(rotation)) {
    if (rotation_.rows() != rotation_.cols() || static_cast<std::size_t>(rotation_.rows()) > base_->size()) {
        throw std::invalid_argument("rotated: rotation must be square and no larger than the basis");
    }
    const Eigen::MatrixXd defect = rotation_.transpose() * rotation_ - Eigen::MatrixXd::Identity(rotation_.rows(), rotation_.cols());
    if (defect.cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("rotated: matrix is not orthogonal");
}

std::vector<double> RotatedBasis::rotate(std::vector<double> c) const {
    const Eigen::Map<const Eigen::VectorXd> head(c.data(), rotation_.rows());
    const Eigen::VectorXd mixed = rotation_ * head;
    for (Eigen::Index i = 0; i < rotation_.rows(); ++i) c[static_cast<std::size_t>(i)] = mixed(i);
    return c;
}

double RotatedBasis::evaluate(std::size_t j, double x) const {
    check_index(j);
    const auto n = static_cast<std::size_t>(rotation_.rows());
    if (j >= n) return base_->evaluate(j, x);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += rotation_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * base_->evaluate(k, x);
    return total;
}

void RotatedBasis::evaluate_all(double x, std::span<double> out) const {
    check_count(out.size());
    const auto n = static_cast<std::size_t>(rotation_.rows());
    std::vector<double> raw(std::max(out.size(), n));
    base_->evaluate_all(x, raw);
    raw = rotate(std::move(raw));
    std::copy_n(raw.begin(), out.size(), out.begin());
}

std::vector<double> RotatedBasis::indicator_coefficients(const BorelSet& A, std::size_t count) const {
    check_count(count);
    const auto n = static_cast<std::size_t>(rotation_.rows());
    std::vector<double> c = rotate(base_->indicator_coefficients(A, std::max(count, n)));
    c.resize(count);
    return c;
}

std::vector<double> RotatedBasis::coefficients(const std::function<double(double)>& f, std::size_t count) const {
    check_count(count);
    const auto n = static_cast<std::size_t>(rotation_.rows());
    std::vector<double> c = rotate(base_->coefficients(f, std::max(count, n)));
    c.resize(count);
    return c;
}

Eigen::MatrixXd RotatedBasis::gram(std::size_t n) const {
    check_count(n);
    const Eigen::Index r = rotation_.rows();
    const Eigen::Index m = std::max<Eigen::Index>(r, static_cast<Eigen::Index>(n));
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(m, m);
    T.topLeftCorner(r, r) = rotation_;
    const Eigen::MatrixXd G = T * base_->gram(static_cast<std::size_t>(m)) * T.transpose();
    return G.topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

std::string RotatedBasis::describe() const {
    return "rotated(" + base_->describe() + ", n=" + std::to_string(rotation_.rows()) + ")";
}

// ---------------------------------------------------------------------------

std::size_t default_truncation(const SigmaFiniteMeasure& mu) {
    switch (mu.kind()) {
        case MeasureKind::lebesgue:
        case MeasureKind::density: return kLegendreDefault;
        case MeasureKind::ifs_invariant: return std::size_t{1} << kWalshDefaultDepth;
        case MeasureKind::atomic: return decompose(mu).atoms.size();
        case MeasureKind::bernoulli:
            throw std::invalid_argument("bernoulli-convolution: densities are sampled, not expanded in a basis");
        case MeasureKind::sum: {
            const Decomposition parts = decompose(mu);
            std::size_t total = parts.atoms.size() + (std::size_t{1} << kWalshDefaultDepth) * parts.singular.size();
            if (!parts.continuous.empty()) total += kLegendreDefault;
            return total;
        }
    }
    return kLegendreDefault;
}

namespace {

std::size_t walsh_depth(std::size_t J) {
    std::size_t depth = 0;
    while ((std::size_t{1} << depth) < J) ++depth;
    return depth;
}

Basis walsh_for(const SigmaFiniteMeasure& mu, std::size_t J) {
    const std::size_t depth = walsh_depth(J);
    auto full = std::make_shared<const WalshBasis>(mu, depth);
    if (full->size() == J) return full;
    throw std::invalid_argument("walsh-cantor: J must be a power of two");
}

}  // namespace

Basis make_basis(const SigmaFiniteMeasure& mu, std::size_t J) {
    if (J == 0) J = default_truncation(mu);
    switch (mu.kind()) {
        case MeasureKind::lebesgue:
        case MeasureKind::density: return std::make_shared<const LegendreBasis>(mu, J);
        case MeasureKind::atomic: {
            auto basis = std::make_shared<const AtomicBasis>(mu);
            if (J < basis->size()) {
                throw std::invalid_argument("atomic-indicators: J must be at least the number of atoms");
            }
            return basis;
        }
        case MeasureKind::ifs_invariant: return walsh_for(mu, J);
        case MeasureKind::bernoulli:
            throw std::invalid_argument("bernoulli-convolution: densities are sampled, not expanded in a basis");
        case MeasureKind::sum: break;
    }
    const Decomposition parts = decompose(mu);
    if (parts.atoms.empty() && parts.singular.empty()) return std::make_shared<const LegendreBasis>(mu, J);

    std::vector<Basis> bases;
    std::vector<SigmaFiniteMeasure> singular;
    for (const auto& [key, coefficient] : parts.singular) {
        singular.push_back(SigmaFiniteMeasure::ifs_invariant(*parts.systems.at(key), coefficient));
    }
    if (!parts.continuous.empty()) {
        Interval hull{parts.continuous.front().lo, parts.continuous.front().hi};
        for (const auto& piece : parts.continuous) {
            hull.lo = std::min(hull.lo, piece.lo);
            hull.hi = std::max(hull.hi, piece.hi);
        }
        const Decomposition continuous{parts.continuous, {}, {}, {}};
        SigmaFiniteMeasure part = SigmaFiniteMeasure::density(
            hull.lo, hull.hi, [continuous](double x) { return continuous.continuous_density(x); }, "continuous part");
        bases.push_back(std::make_shared<const LegendreBasis>(part, kLegendreDefault));
    }
    if (!parts.atoms.empty()) {
        std::vector<Atom> atoms;
        for (const auto& [point, mass] : parts.atoms) atoms.push_back({point, mass});
        bases.push_back(std::make_shared<const AtomicBasis>(SigmaFiniteMeasure::atomic(atoms)));
    }
    for (const SigmaFiniteMeasure& s : singular) {
        bases.push_back(std::make_shared<const WalshBasis>(s, kWalshDefaultDepth));
    }
    std::size_t available = 0;
    for (const Basis& b : bases) available += b->size();
    return std::make_shared<const CompositeBasis>(mu, std::move(bases), std::min(J, available));
}

Basis sine_brownian(std::size_t J) { return std::make_shared<const SineBrownianBasis>(J == 0 ? kSineDefault : J); }

Basis rotated(Basis base, Eigen::MatrixXd rotation) {
    return std::make_shared<const RotatedBasis>(std::move(base), std::move(rotation));
}

Basis reweighted(Basis base, SigmaFiniteMeasure lambda) {
    return std::make_shared<const ReweightedBasis>(std::move(base), std::move(lambda));
}

double gram_deviation(const OrthonormalBasis& basis, std::size_t n) {
    if (n > basis.size()) throw std::invalid_argument("gram_deviation: n exceeds the basis size");
    const auto N = static_cast<Eigen::Index>(n);
    return (basis.gram(n) - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
}

}  // namespace sigmanoise
