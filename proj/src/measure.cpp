#include "sigmanoise/measure.hpp"

#include "sigmanoise/errors.hpp"
#include "sigmanoise/format.hpp"
#include "sigmanoise/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigmanoise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

bool uniform_bernoulli(double lambda) { return lambda == 0.5; }

BorelSet clip(const BorelSet& A, double lo, double hi) {
    // Closed support [lo, hi]; the half-open convention is widened by one ulp on
    // the left so that a set (lo', hi] with lo' < lo still sees the left endpoint.
    const double left = std::isfinite(lo) ? std::nextafter(lo, -kInf) : lo;
    return A.intersect(BorelSet::interval(left, hi));
}

void append_gauss_legendre(WeightedNodes& out, double a, double b, double scale,
                           const SigmaFiniteMeasure::DensityFn& fn, std::size_t n, std::size_t panels) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("integrate: set has unbounded intersection with the support");
    }
    const QuadratureRule& rule = gauss_legendre(n);
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double half = 0.5 * width;
        const double mid = a + width * static_cast<double>(p) + half;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = mid + half * rule.nodes[i];
            const double w = fn ? fn(x) : 1.0;
            out.points.push_back(x);
            out.weights.push_back(rule.weights[i] * half * scale * w);
            out.parts.push_back(WeightedNodes::Part::continuous);
            out.keys.emplace_back();
        }
    }
}

void subdivide(const IteratedFunctionSystem& ifs, const CylinderPiece& piece, std::size_t depth,
               std::vector<CylinderPiece>& out) {
    if (piece.word.size() >= depth) {
        out.push_back(piece);
        return;
    }
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        CylinderPiece child;
        child.word = piece.word;
        child.word.push_back(static_cast<int>(i));
        const AffineBranch& b = ifs.branch(i);
        child.map = AffineBranch{piece.map.ratio * b.ratio, piece.map.ratio * b.shift + piece.map.shift};
        child.weight = piece.weight * ifs.normalized_probabilities()[i];
        const double u = child.map(ifs.hull().lo);
        const double v = child.map(ifs.hull().hi);
        child.image = u < v ? Interval{u, v} : Interval{v, u};
        subdivide(ifs, child, depth, out);
    }
}

void append_ifs(WeightedNodes& out, const IteratedFunctionSystem& ifs, double scale, const BorelSet& A,
                bool full, const QuadratureOptions& options) {
    const QuadratureRule rule = invariant_gauss_rule(ifs, options.cylinder_nodes);
    std::vector<CylinderPiece> inside;
    std::vector<CylinderPiece> undecided;
    if (full) {
        inside = cylinders_at_depth(ifs, options.cylinder_depth);
    } else if (A.cylinder_tag() && A.cylinder_tag()->system_key == ifs.key()) {
        const Word& word = A.cylinder_tag()->word;
        CylinderPiece root{word, ifs.word_map(word), ifs.invariant_weight(word), ifs.image(word)};
        subdivide(ifs, root, std::max(options.cylinder_depth, word.size()), inside);
    } else {
        const CylinderCover cover = cylinder_cover(ifs, A, 40, 1u << 14);
        for (const CylinderPiece& piece : cover.inside) subdivide(ifs, piece, options.cylinder_depth, inside);
        undecided = cover.undecided;
    }
    auto emit = [&](const CylinderPiece& piece, bool filter) {
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            // The rule lives on the hull; map it into the cylinder.
            const double x = piece.map(rule.nodes[k]);
            if (filter && !A.contains(x)) continue;
            out.points.push_back(x);
            out.weights.push_back(scale * piece.weight * rule.weights[k]);
            out.parts.push_back(WeightedNodes::Part::singular);
            out.keys.push_back(ifs.key());
        }
    };
    for (const CylinderPiece& piece : inside) emit(piece, false);
    for (const CylinderPiece& piece : undecided) emit(piece, true);
}

bool covers_hull(const BorelSet& A, Interval hull) {
    for (const Interval& p : A.intervals()) {
        if (p.lo <= hull.lo && hull.hi <= p.hi) return true;
    }
    return false;
}

void discretize_into(WeightedNodes& out, const SigmaFiniteMeasure& mu, const BorelSet& A, double factor,
                     const QuadratureOptions& options) {
    const double scale = factor * mu.scale();
    std::visit(
        overloaded{
            [&](const SigmaFiniteMeasure::LebesgueData& d) {
                for (const BorelSet inside = clip(A, d.lo, d.hi); const Interval& p : inside.intervals()) {
                    append_gauss_legendre(out, std::max(p.lo, d.lo), p.hi, scale, {}, options.nodes, options.panels);
                }
            },
            [&](const SigmaFiniteMeasure::DensityData& d) {
                for (const BorelSet inside = clip(A, d.lo, d.hi); const Interval& p : inside.intervals()) {
                    append_gauss_legendre(out, std::max(p.lo, d.lo), p.hi, scale, d.fn, options.nodes, options.panels);
                }
            },
            [&](const SigmaFiniteMeasure::AtomicData& d) {
                for (const Atom& atom : d.atoms) {
                    if (!A.contains(atom.point)) continue;
                    out.points.push_back(atom.point);
                    out.weights.push_back(scale * atom.mass);
                    out.parts.push_back(WeightedNodes::Part::atom);
                    out.keys.emplace_back();
                }
            },
            [&](const SigmaFiniteMeasure::IfsData& d) {
                append_ifs(out, *d.system, scale, A, covers_hull(A, d.system->hull()), options);
            },
            [&](const SigmaFiniteMeasure::BernoulliData& d) {
                if (uniform_bernoulli(d.lambda)) {
                    for (const BorelSet inside = clip(A, -1.0, 1.0); const Interval& p : inside.intervals()) {
                        append_gauss_legendre(out, std::max(p.lo, -1.0), p.hi, 0.5 * scale, {}, options.nodes,
                                              options.panels);
                    }
                } else {
                    append_ifs(out, *d.system, scale, A, covers_hull(A, d.system->hull()), options);
                }
            },
            [&](const SigmaFiniteMeasure::SumData& d) {
                discretize_into(out, *d.first, A, scale, options);
                discretize_into(out, *d.second, A, scale, options);
            },
        },
        mu.data());
}

double ifs_mass(const IteratedFunctionSystem& ifs, const BorelSet& A) {
    if (A.cylinder_tag() && A.cylinder_tag()->system_key == ifs.key()) {
        return ifs.invariant_weight(A.cylinder_tag()->word);
    }
    if (covers_hull(A, ifs.hull())) return 1.0;
    const CylinderCover cover = cylinder_cover(ifs, A, 60, 1u << 14);
    return cover.inside_weight + 0.5 * cover.undecided_weight;
}

void check_density(double lo, double hi, const SigmaFiniteMeasure::DensityFn& w) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("density: support must be a bounded interval lo < hi");
    }
    if (!w) throw std::invalid_argument("density: missing density function");
    for (int k = 0; k <= 256; ++k) {
        const double x = lo + (hi - lo) * k / 256.0;
        const double v = w(x);
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("density: w must be finite and nonnegative on its interval");
        }
    }
}

}  // namespace

const char* to_string(MeasureKind kind) noexcept {
    switch (kind) {
        case MeasureKind::lebesgue: return "lebesgue";
        case MeasureKind::density: return "density";
        case MeasureKind::atomic: return "atomic";
        case MeasureKind::ifs_invariant: return "ifs-invariant";
        case MeasureKind::bernoulli: return "bernoulli-convolution";
        case MeasureKind::sum: return "sum";
    }
    return "unknown";
}

SigmaFiniteMeasure SigmaFiniteMeasure::build(Data data, double scale, Interval hull) {
    auto impl = std::make_shared<Impl>();
    impl->data = std::move(data);
    impl->scale = scale;
    impl->hull = hull;
    return SigmaFiniteMeasure(std::move(impl));
}

SigmaFiniteMeasure SigmaFiniteMeasure::lebesgue(double lo, double hi, double scale) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        throw std::invalid_argument("lebesgue: need lo < hi");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("lebesgue: scale must be positive and finite");
    }
    return build(LebesgueData{lo, hi}, scale, Interval{lo, hi});
}

SigmaFiniteMeasure SigmaFiniteMeasure::density(double lo, double hi, DensityFn w, std::string label) {
    check_density(lo, hi, w);
    return build(DensityData{lo, hi, std::move(w), std::nullopt, std::move(label)}, 1.0, Interval{lo, hi});
}

SigmaFiniteMeasure SigmaFiniteMeasure::polynomial_density(double lo, double hi, Polynomial w) {
    DensityFn fn = [w](double x) { return w(x); };
    check_density(lo, hi, fn);
    std::string label = "poly[";
    for (std::size_t k = 0; k < w.coefficients().size(); ++k) {
        if (k) label += ',';
        label += shortest(w.coefficients()[k]);
    }
    label += ']';
    return build(DensityData{lo, hi, std::move(fn), std::move(w), std::move(label)}, 1.0, Interval{lo, hi});
}

SigmaFiniteMeasure SigmaFiniteMeasure::atomic(std::vector<Atom> atoms) {
    std::map<double, double> merged;
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.point) || !std::isfinite(a.mass) || a.mass < 0.0) {
            throw std::invalid_argument("atomic: atoms need finite points and nonnegative masses");
        }
        if (a.mass > 0.0) merged[a.point] += a.mass;
    }
    std::vector<Atom> out;
    for (const auto& [point, mass] : merged) out.push_back({point, mass});
    const Interval hull = out.empty() ? Interval{0.0, 0.0} : Interval{out.front().point, out.back().point};
    return build(AtomicData{std::move(out)}, 1.0, hull);
}

SigmaFiniteMeasure SigmaFiniteMeasure::ifs_invariant(IteratedFunctionSystem system, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("ifs-invariant: scale must be positive and finite");
    }
    const Interval hull = system.hull();
    return build(IfsData{std::make_shared<const IteratedFunctionSystem>(std::move(system))}, scale, hull);
}

SigmaFiniteMeasure SigmaFiniteMeasure::cantor() {
    return ifs_invariant(IteratedFunctionSystem::middle_third_cantor());
}

SigmaFiniteMeasure SigmaFiniteMeasure::bernoulli(double lambda) {
    auto system = std::make_shared<const IteratedFunctionSystem>(IteratedFunctionSystem::bernoulli(lambda));
    const Interval hull = system->hull();
    return build(BernoulliData{lambda, std::move(system)}, 1.0, hull);
}

SigmaFiniteMeasure SigmaFiniteMeasure::sum(const SigmaFiniteMeasure& a, const SigmaFiniteMeasure& b) {
    Interval hull{std::min(a.hull().lo, b.hull().lo), std::max(a.hull().hi, b.hull().hi)};
    // An empty atomic summand has a placeholder hull; ignore it.
    auto empty_atomic = [](const SigmaFiniteMeasure& m) {
        const auto* d = std::get_if<AtomicData>(&m.data());
        return d && d->atoms.empty();
    };
    if (empty_atomic(a)) hull = b.hull();
    if (empty_atomic(b)) hull = a.hull();
    return build(SumData{std::make_shared<const SigmaFiniteMeasure>(a), std::make_shared<const SigmaFiniteMeasure>(b)},
                 1.0, hull);
}

SigmaFiniteMeasure SigmaFiniteMeasure::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw std::invalid_argument("scaled: factor must be positive and finite");
    }
    return build(impl_->data, impl_->scale * factor, impl_->hull);
}

MeasureKind SigmaFiniteMeasure::kind() const noexcept { return static_cast<MeasureKind>(impl_->data.index()); }

bool SigmaFiniteMeasure::finite() const noexcept {
    if (const auto* d = std::get_if<LebesgueData>(&impl_->data)) {
        return std::isfinite(d->lo) && std::isfinite(d->hi);
    }
    if (const auto* d = std::get_if<SumData>(&impl_->data)) {
        return d->first->finite() && d->second->finite();
    }
    return true;
}

double SigmaFiniteMeasure::total_mass() const { return measure_of(*this, BorelSet::real_line()); }

const IteratedFunctionSystem* SigmaFiniteMeasure::system() const noexcept {
    if (const auto* d = std::get_if<IfsData>(&impl_->data)) return d->system.get();
    if (const auto* d = std::get_if<BernoulliData>(&impl_->data)) return d->system.get();
    return nullptr;
}

std::string SigmaFiniteMeasure::describe() const {
    std::string body = std::visit(
        overloaded{
            [](const LebesgueData& d) { return "lebesgue[" + shortest(d.lo) + "," + shortest(d.hi) + "]"; },
            [](const DensityData& d) {
                return "density[" + shortest(d.lo) + "," + shortest(d.hi) + "](" + d.label + ")";
            },
            [](const AtomicData& d) {
                std::string s = "atomic{";
                for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                    if (i) s += ';';
                    s += shortest(d.atoms[i].point) + "@" + shortest(d.atoms[i].mass);
                }
                return s + "}";
            },
            [](const IfsData& d) { return d.system->key(); },
            [](const BernoulliData& d) { return "bernoulli[" + shortest(d.lambda) + "]"; },
            [](const SumData& d) { return "(" + d.first->describe() + "+" + d.second->describe() + ")"; },
        },
        impl_->data);
    return impl_->scale == 1.0 ? body : shortest(impl_->scale) + "*" + body;
}

double measure_of(const SigmaFiniteMeasure& mu, const BorelSet& A) {
    const double scale = mu.scale();
    return std::visit(
        overloaded{
            [&](const SigmaFiniteMeasure::LebesgueData& d) {
                return scale * A.intersect(BorelSet::interval(d.lo, d.hi)).lebesgue_length();
            },
            [&](const SigmaFiniteMeasure::DensityData&) { return integrate(mu, [](double) { return 1.0; }, A).value; },
            [&](const SigmaFiniteMeasure::AtomicData& d) {
                double total = 0.0;
                for (const Atom& atom : d.atoms) {
                    if (A.contains(atom.point)) total += atom.mass;
                }
                return scale * total;
            },
            [&](const SigmaFiniteMeasure::IfsData& d) { return scale * ifs_mass(*d.system, A); },
            [&](const SigmaFiniteMeasure::BernoulliData& d) {
                if (uniform_bernoulli(d.lambda)) {
                    return 0.5 * scale * A.intersect(BorelSet::interval(-1.0, 1.0)).lebesgue_length();
                }
                return scale * ifs_mass(*d.system, A);
            },
            [&](const SigmaFiniteMeasure::SumData& d) {
                return scale * (measure_of(*d.first, A) + measure_of(*d.second, A));
            },
        },
        mu.data());
}

WeightedNodes discretize(const SigmaFiniteMeasure& mu, const BorelSet& A, const QuadratureOptions& options) {
    WeightedNodes out;
    discretize_into(out, mu, A, 1.0, options);
    return out;
}

WeightedNodes discretize(const SigmaFiniteMeasure& mu, const QuadratureOptions& options) {
    return discretize(mu, BorelSet::real_line(), options);
}

IntegralResult integrate(const SigmaFiniteMeasure& mu, const std::function<double(double)>& f, const BorelSet& A,
                         const QuadratureOptions& options) {
    auto apply = [&](const WeightedNodes& nodes) {
        double total = 0.0;
        for (std::size_t k = 0; k < nodes.points.size(); ++k) {
            const double v = f(nodes.points[k]);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("integrate: integrand is not finite on the set");
            }
            total += nodes.weights[k] * v;
        }
        return total;
    };
    QuadratureOptions refined = options;
    refined.nodes *= 2;
    refined.cylinder_depth += 2;
    const double coarse = apply(discretize(mu, A, options));
    const double fine = apply(discretize(mu, A, refined));
    return {fine, std::abs(fine - coarse)};
}

IntegralResult integrate(const SigmaFiniteMeasure& mu, const std::function<double(double)>& f,
                         const QuadratureOptions& options) {
    return integrate(mu, f, BorelSet::real_line(), options);
}

IntegralResult integrate(const SigmaFiniteMeasure& mu, const Polynomial& p, const BorelSet& A) {
    if (const auto* d = std::get_if<SigmaFiniteMeasure::IfsData>(&mu.data())) {
        const IteratedFunctionSystem& ifs = *d->system;
        if (p.degree() <= 32) {
            if (covers_hull(A, ifs.hull())) return {mu.scale() * invariant_integrate(ifs, p), 0.0};
            if (A.cylinder_tag() && A.cylinder_tag()->system_key == ifs.key()) {
                const Word& word = A.cylinder_tag()->word;
                const AffineBranch m = ifs.word_map(word);
                const double inner = invariant_integrate(ifs, p.compose_affine(m.ratio, m.shift));
                return {mu.scale() * ifs.invariant_weight(word) * inner, 0.0};
            }
        }
    }
    QuadratureOptions options;
    std::size_t extra = 0;
    if (const auto* d = std::get_if<SigmaFiniteMeasure::DensityData>(&mu.data()); d && d->polynomial) {
        extra = d->polynomial->degree();
    }
    options.nodes = std::max<std::size_t>(64, (p.degree() + extra) / 2 + 2);
    return integrate(mu, [&p](double x) { return p(x); }, A, options);
}

IntegralResult integrate(const SigmaFiniteMeasure& mu, const Polynomial& p) {
    return integrate(mu, p, BorelSet::real_line());
}

double Decomposition::continuous_density(double x) const {
    double total = 0.0;
    for (const Piece& piece : continuous) {
        if (piece.lo <= x && x <= piece.hi) total += piece.scale * (piece.fn ? piece.fn(x) : 1.0);
    }
    return total;
}

namespace {

void decompose_into(Decomposition& out, const SigmaFiniteMeasure& mu, double factor) {
    const double scale = factor * mu.scale();
    std::visit(overloaded{
                   [&](const SigmaFiniteMeasure::LebesgueData& d) {
                       out.continuous.push_back({d.lo, d.hi, scale, {}});
                   },
                   [&](const SigmaFiniteMeasure::DensityData& d) {
                       out.continuous.push_back({d.lo, d.hi, scale, d.fn});
                   },
                   [&](const SigmaFiniteMeasure::AtomicData& d) {
                       for (const Atom& atom : d.atoms) out.atoms[atom.point] += scale * atom.mass;
                   },
                   [&](const SigmaFiniteMeasure::IfsData& d) {
                       out.singular[d.system->key()] += scale;
                       out.systems[d.system->key()] = d.system;
                   },
                   [&](const SigmaFiniteMeasure::BernoulliData& d) {
                       if (uniform_bernoulli(d.lambda)) {
                           out.continuous.push_back({-1.0, 1.0, 0.5 * scale, {}});
                       } else {
                           out.singular[d.system->key()] += scale;
                           out.systems[d.system->key()] = d.system;
                       }
                   },
                   [&](const SigmaFiniteMeasure::SumData& d) {
                       decompose_into(out, *d.first, scale);
                       decompose_into(out, *d.second, scale);
                   },
               },
               mu.data());
}

}  // namespace

Decomposition decompose(const SigmaFiniteMeasure& mu) {
    Decomposition out;
    decompose_into(out, mu, 1.0);
    return out;
}

void require_absolutely_continuous(const Decomposition& mu, const Decomposition& lambda) {
    for (const auto& [point, mass] : mu.atoms) {
        if (!lambda.atoms.contains(point)) {
            throw std::invalid_argument("radon_nikodym: atom of mu at " + shortest(point) +
                                        " is not an atom of lambda (not absolutely continuous)");
        }
    }
    for (const auto& [key, coefficient] : mu.singular) {
        if (!lambda.singular.contains(key)) {
            throw std::invalid_argument("radon_nikodym: singular component " + key +
                                        " of mu is absent from lambda (not absolutely continuous)");
        }
    }
}

double radon_nikodym(const Decomposition& mu, const Decomposition& lambda, double x, WeightedNodes::Part part,
                     const std::string& key) {
    switch (part) {
        case WeightedNodes::Part::atom: {
            const auto den = lambda.atoms.find(x);
            if (den == lambda.atoms.end()) {
                throw std::invalid_argument("radon_nikodym: " + shortest(x) + " is not an atom of lambda");
            }
            const auto num = mu.atoms.find(x);
            return num == mu.atoms.end() ? 0.0 : num->second / den->second;
        }
        case WeightedNodes::Part::continuous: {
            const double num = mu.continuous_density(x);
            const double den = lambda.continuous_density(x);
            if (den > 0.0) return num / den;
            if (num == 0.0) return 0.0;
            throw std::invalid_argument("radon_nikodym: mu has density at " + shortest(x) +
                                        " where lambda has none (not absolutely continuous)");
        }
        case WeightedNodes::Part::singular: {
            const auto den = lambda.singular.find(key);
            if (den == lambda.singular.end()) {
                throw std::invalid_argument("radon_nikodym: lambda has no singular component " + key);
            }
            const auto num = mu.singular.find(key);
            return num == mu.singular.end() ? 0.0 : num->second / den->second;
        }
    }
    return 0.0;
}

double radon_nikodym(const SigmaFiniteMeasure& mu, const SigmaFiniteMeasure& lambda, double x,
                     WeightedNodes::Part part, const std::string& key) {
    const Decomposition a = decompose(mu);
    const Decomposition b = decompose(lambda);
    require_absolutely_continuous(a, b);
    return radon_nikodym(a, b, x, part, key);
}

double radon_nikodym_at(const Decomposition& mu, const Decomposition& lambda, double x) {
    if (lambda.atoms.contains(x)) return radon_nikodym(mu, lambda, x, WeightedNodes::Part::atom);
    if (lambda.continuous_density(x) > 0.0 || mu.continuous_density(x) > 0.0) {
        return radon_nikodym(mu, lambda, x, WeightedNodes::Part::continuous);
    }
    for (const auto& [key, system] : lambda.systems) {
        const Interval h = system->hull();
        if (lambda.singular.size() == 1 || (h.lo <= x && x <= h.hi)) {
            return radon_nikodym(mu, lambda, x, WeightedNodes::Part::singular, key);
        }
    }
    return 0.0;
}

std::vector<double> radon_nikodym_on_grid(const SigmaFiniteMeasure& mu, const SigmaFiniteMeasure& lambda,
                                          std::span<const double> grid) {
    const Decomposition a = decompose(mu);
    const Decomposition b = decompose(lambda);
    require_absolutely_continuous(a, b);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) out.push_back(radon_nikodym_at(a, b, x));
    return out;
}

SigmaFiniteMeasure sum_measure(const SigmaFiniteMeasure& a, const SigmaFiniteMeasure& b) {
    return SigmaFiniteMeasure::sum(a, b);
}

SigmaFiniteMeasure pushforward(const SigmaFiniteMeasure& mu, std::size_t branch) {
    const auto* d = std::get_if<SigmaFiniteMeasure::IfsData>(&mu.data());
    if (!d) throw std::invalid_argument("pushforward: needs an ifs-invariant measure");
    const IteratedFunctionSystem& ifs = *d->system;
    if (branch >= ifs.size()) throw std::invalid_argument("pushforward: branch index out of range");
    const std::vector<double> q(ifs.probabilities().begin(), ifs.probabilities().end());
    IfsOptions options;
    options.require_normalized = false;
    if (ifs.exact_branches() && ifs.exact_probabilities()) {
        const auto& exact = *ifs.exact_branches();
        const ExactBranch& t = exact[branch];
        std::vector<ExactBranch> conjugated;
        for (const ExactBranch& b : exact) {
            conjugated.push_back({b.ratio, t.ratio * b.shift + t.shift - b.ratio * t.shift});
        }
        return SigmaFiniteMeasure::ifs_invariant(
            IteratedFunctionSystem::make_exact(std::move(conjugated), *ifs.exact_probabilities(), options), mu.scale());
    }
    const AffineBranch& t = ifs.branch(branch);
    std::vector<AffineBranch> conjugated;
    for (const AffineBranch& b : ifs.branches()) {
        conjugated.push_back({b.ratio, t.ratio * b.shift + t.shift - b.ratio * t.shift});
    }
    return SigmaFiniteMeasure::ifs_invariant(IteratedFunctionSystem::make(std::move(conjugated), q, options),
                                             mu.scale());
}

}  // namespace sigmanoise
