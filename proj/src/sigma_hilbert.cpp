#include "sigmanoise/sigma_hilbert.hpp"

#include "sigmanoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace sigmanoise {

namespace {

// Finer than the integrate() default: inner products feed 1e-9 identities.
QuadratureOptions sigma_quadrature() {
    QuadratureOptions options;
    options.nodes = 128;
    options.cylinder_depth = 8;
    return options;
}

}  // namespace

SigmaFunction::SigmaFunction(Fn f, SigmaFiniteMeasure mu, std::string label)
    : SigmaFunction(std::move(f), nullptr, std::move(mu), std::move(label)) {}

SigmaFunction::SigmaFunction(Fn f, PartFn on_part, SigmaFiniteMeasure mu, std::string label)
    : f_(std::move(f)), on_part_(std::move(on_part)), mu_(std::move(mu)), label_(std::move(label)) {
    if (!f_) throw std::invalid_argument("SigmaFunction: empty function");
    // A power-law singularity shows as fast growth under a 4x finer rule.
    // Logarithmic divergence is not detected.
    const auto norm = [this](std::size_t nodes) {
        QuadratureOptions options;
        options.nodes = nodes;
        const WeightedNodes w = discretize(mu_, options);
        double sum = 0.0;
        for (std::size_t i = 0; i < w.points.size(); ++i) {
            const double v = this->on_part(w.points[i], w.parts[i], w.keys[i]);
            sum += w.weights[i] * v * v;
        }
        return sum;
    };
    const double coarse = norm(64);
    const double fine = norm(256);
    if (!std::isfinite(coarse) || !std::isfinite(fine) || fine > 2.0 * coarse + 1e-12) {
        throw std::invalid_argument("SigmaFunction: f is not square integrable");
    }
}

double root_density(const Decomposition& mu, const Decomposition& lambda, double x) {
    return std::sqrt(radon_nikodym_at(mu, lambda, x));
}

double inner_product(const SigmaFunction& a, const SigmaFunction& b) {
    const SigmaFiniteMeasure lambda = sum_measure(a.measure(), b.measure());
    const Decomposition da = decompose(a.measure());
    const Decomposition db = decompose(b.measure());
    const Decomposition dl = decompose(lambda);
    require_absolutely_continuous(da, dl);
    require_absolutely_continuous(db, dl);
    const WeightedNodes nodes = discretize(lambda, sigma_quadrature());
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.points.size(); ++i) {
        const double x = nodes.points[i];
        const double ra = radon_nikodym(da, dl, x, nodes.parts[i], nodes.keys[i]);
        const double rb = radon_nikodym(db, dl, x, nodes.parts[i], nodes.keys[i]);
        if (ra == 0.0 || rb == 0.0) continue;
        sum += nodes.weights[i] * a.on_part(x, nodes.parts[i], nodes.keys[i]) *
               b.on_part(x, nodes.parts[i], nodes.keys[i]) * std::sqrt(ra * rb);
    }
    return sum;
}

double squared_norm(const SigmaFunction& a) { return inner_product(a, a); }

SigmaFunction add(const SigmaFunction& a, const SigmaFunction& b) {
    const SigmaFiniteMeasure lambda = sum_measure(a.measure(), b.measure());
    auto da = std::make_shared<const Decomposition>(decompose(a.measure()));
    auto db = std::make_shared<const Decomposition>(decompose(b.measure()));
    auto dl = std::make_shared<const Decomposition>(decompose(lambda));
    require_absolutely_continuous(*da, *dl);
    require_absolutely_continuous(*db, *dl);
    auto fa = a.function();
    auto fb = b.function();
    SigmaFunction::Fn g = [=](double x) {
        const double ra = radon_nikodym_at(*da, *dl, x);
        const double rb = radon_nikodym_at(*db, *dl, x);
        return (ra > 0.0 ? fa(x) * std::sqrt(ra) : 0.0) + (rb > 0.0 ? fb(x) * std::sqrt(rb) : 0.0);
    };
    SigmaFunction::PartFn parts = [=](double x, WeightedNodes::Part part, const std::string& key) {
        const double ra = radon_nikodym(*da, *dl, x, part, key);
        const double rb = radon_nikodym(*db, *dl, x, part, key);
        return (ra > 0.0 ? a.on_part(x, part, key) * std::sqrt(ra) : 0.0) +
               (rb > 0.0 ? b.on_part(x, part, key) * std::sqrt(rb) : 0.0);
    };
    return SigmaFunction(std::move(g), std::move(parts), lambda, "(" + a.label() + ")+(" + b.label() + ")");
}

SigmaFunction scale(const SigmaFunction& a, double c) {
    auto f = a.function();
    return SigmaFunction([f, c](double x) { return c * f(x); },
                         [a, c](double x, WeightedNodes::Part part, const std::string& key) {
                             return c * a.on_part(x, part, key);
                         },
                         a.measure(), a.label());
}

std::vector<double> canonical_grid(const SigmaFiniteMeasure& lambda, std::size_t points) {
    if (points < 2) throw std::invalid_argument("canonical_grid: need at least 2 points");
    const Interval h = lambda.hull();
    const double lo = std::max(h.lo, -100.0);
    const double hi = std::min(h.hi, 100.0);
    std::vector<double> grid;
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    for (const auto& [x, m] : decompose(lambda).atoms) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

bool equivalent(const SigmaFunction& a, const SigmaFunction& b, double tolerance) {
    const SigmaFiniteMeasure lambda = sum_measure(a.measure(), b.measure());
    const Decomposition da = decompose(a.measure());
    const Decomposition db = decompose(b.measure());
    const Decomposition dl = decompose(lambda);
    for (double x : canonical_grid(lambda)) {
        const double ra = radon_nikodym_at(da, dl, x);
        const double rb = radon_nikodym_at(db, dl, x);
        const double va = ra > 0.0 ? a(x) * std::sqrt(ra) : 0.0;
        const double vb = rb > 0.0 ? b(x) * std::sqrt(rb) : 0.0;
        if (!(std::abs(va - vb) <= tolerance)) return false;
    }
    return true;
}

double lift(const SigmaFunction& F, std::span<const double> xi, std::size_t J) {
    const GaussianNoiseField field(F.measure(), J);
    return ito_integral(field, F.function(), xi);
}

LiftFrame lift_frame(const SigmaFunction& a, const SigmaFunction& b, std::size_t J) {
    const SigmaFiniteMeasure lambda = sum_measure(a.measure(), b.measure());
    const Decomposition da = decompose(a.measure());
    const Decomposition db = decompose(b.measure());
    const Decomposition dl = decompose(lambda);
    require_absolutely_continuous(da, dl);
    require_absolutely_continuous(db, dl);
    GaussianNoiseField field(lambda, J);
    auto transported = [&](const SigmaFunction& F, const Decomposition& d) {
        return field.function_coefficients([&](double x) {
            const double r = radon_nikodym_at(d, dl, x);
            return r > 0.0 ? F(x) * std::sqrt(r) : 0.0;
        });
    };
    std::vector<double> first = transported(a, da);
    std::vector<double> second = transported(b, db);
    return {std::move(field), std::move(first), std::move(second)};
}

std::pair<double, double> lift_pair(const SigmaFunction& a, const SigmaFunction& b, std::span<const double> xi,
                                    std::size_t J) {
    const LiftFrame frame = lift_frame(a, b, J);
    return {pair_sum(frame.first, xi), pair_sum(frame.second, xi)};
}

// ---------------------------------------------------------------------------

double StepFunction::operator()(double x) const {
    const auto it = std::lower_bound(cuts.begin(), cuts.end(), x);
    return values[static_cast<std::size_t>(it - cuts.begin())];
}

namespace {

GaussianNoiseField piecewise_field(const SigmaFiniteMeasure& mu, const StepFunction& f, std::size_t per_piece) {
    if (f.values.size() != f.cuts.size() + 1) throw std::invalid_argument("correlated_pair: need one value per piece");
    if (!std::is_sorted(f.cuts.begin(), f.cuts.end())) throw std::invalid_argument("correlated_pair: cuts must be sorted");
    for (double v : f.values) {
        if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("correlated_pair: |f| > 1, f is not in H1(mu)");
    }
    const Decomposition parts = decompose(mu);
    if (!parts.atoms.empty() || !parts.singular.empty() || parts.continuous.empty()) {
        throw std::invalid_argument("correlated_pair: needs an absolutely continuous measure");
    }
    const Interval h = mu.hull();
    if (!std::isfinite(h.lo) || !std::isfinite(h.hi)) throw std::invalid_argument("correlated_pair: needs a bounded support");
    std::vector<double> edges{h.lo};
    for (double c : f.cuts) {
        if (!(h.lo < c && c < h.hi)) throw std::invalid_argument("correlated_pair: cut outside the support");
        edges.push_back(c);
    }
    edges.push_back(h.hi);

    auto dec = std::make_shared<const Decomposition>(parts);
    std::vector<Basis> bases;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        SigmaFiniteMeasure piece = mu.kind() == MeasureKind::lebesgue
                                       ? SigmaFiniteMeasure::lebesgue(a, b, mu.scale())
                                       : SigmaFiniteMeasure::density(
                                             a, b, [dec](double x) { return dec->continuous_density(x); }, "restricted");
        bases.push_back(std::make_shared<LegendreBasis>(piece, per_piece));
    }
    const std::size_t total = bases.size() * per_piece;
    return GaussianNoiseField(std::make_shared<CompositeBasis>(mu, std::move(bases), total), total);
}

}  // namespace

CorrelatedPair::CorrelatedPair(const SigmaFiniteMeasure& mu, StepFunction f, std::size_t per_piece)
    : field_(piecewise_field(mu, f, per_piece)) {
    const std::size_t pieces = f.values.size();
    rho_.resize(field_.truncation());
    for (std::size_t j = 0; j < rho_.size(); ++j) rho_[j] = f.values[j % pieces];
}

void CorrelatedPair::coordinates(std::uint64_t seed, std::uint64_t sample, std::span<double> xi,
                                 std::span<double> xi2) const {
    CoordinateStream(seed, sample, StreamDomain::gaussian).fill_normals(0, xi);
    CoordinateStream(seed, sample, StreamDomain::auxiliary).fill_normals(0, xi2);
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double r = rho_[j];
        xi2[j] = r * xi[j] + std::sqrt(1.0 - r * r) * xi2[j];
    }
}

std::pair<double, double> CorrelatedPair::evaluate(const BorelSet& A, std::uint64_t seed, std::uint64_t sample) const {
    std::vector<double> xi(rho_.size()), xi2(rho_.size());
    coordinates(seed, sample, xi, xi2);
    const std::vector<double> c = field_.set_coefficients(A);
    return {pair_sum(c, xi), pair_sum(c, xi2)};
}

MonteCarloEstimate CorrelatedPair::cross_covariance_mc(const BorelSet& A, const BorelSet& B,
                                                       const McOptions& options) const {
    if (options.samples < 100) throw std::invalid_argument("cross_covariance_mc: N < 100");
    const std::vector<double> a = field_.set_coefficients(A);
    const std::vector<double> b = field_.set_coefficients(B);
    return run_monte_carlo(options.samples, 1, options.workers, [&](std::size_t n, std::span<double> out) {
        thread_local std::vector<double> xi, xi2;
        xi.resize(rho_.size());
        xi2.resize(rho_.size());
        coordinates(options.seed, n, xi, xi2);
        out[0] = pair_sum(a, xi) * pair_sum(b, xi2);
    })[0];
}

MonteCarloEstimate CorrelatedPair::second_covariance_mc(const BorelSet& A, const BorelSet& B,
                                                        const McOptions& options) const {
    if (options.samples < 100) throw std::invalid_argument("second_covariance_mc: N < 100");
    const std::vector<double> a = field_.set_coefficients(A);
    const std::vector<double> b = field_.set_coefficients(B);
    return run_monte_carlo(options.samples, 1, options.workers, [&](std::size_t n, std::span<double> out) {
        thread_local std::vector<double> xi, xi2;
        xi.resize(rho_.size());
        xi2.resize(rho_.size());
        coordinates(options.seed, n, xi, xi2);
        out[0] = pair_sum(a, xi2) * pair_sum(b, xi2);
    })[0];
}

CorrelatedPair correlated_pair(const SigmaFiniteMeasure& mu, StepFunction f, std::size_t per_piece) {
    return CorrelatedPair(mu, std::move(f), per_piece);
}

}  // namespace sigmanoise
