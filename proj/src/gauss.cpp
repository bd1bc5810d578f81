#include "sigmanoise/gauss.hpp"

#include "sigmanoise/errors.hpp"
#include "sigmanoise/quadrature.hpp"
#include "sigmanoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sigmanoise {

UniversalSamplePoint::UniversalSamplePoint(std::uint64_t seed, std::uint64_t sample, std::size_t J)
    : seed_(seed), sample_(sample), prefix_(J) {
    if (J == 0) throw std::invalid_argument("sample_xi: J must be at least 1");
    CoordinateStream(seed, sample, StreamDomain::gaussian).fill_normals(0, prefix_);
}

double UniversalSamplePoint::operator[](std::size_t j) const {
    if (j < prefix_.size()) return prefix_[j];
    return CoordinateStream(seed_, sample_, StreamDomain::gaussian).normal(j);
}

std::vector<double> UniversalSamplePoint::coordinates(std::size_t n) const {
    std::vector<double> out(n);
    const std::size_t head = std::min(n, prefix_.size());
    std::copy_n(prefix_.begin(), head, out.begin());
    if (head < n) {
        CoordinateStream(seed_, sample_, StreamDomain::gaussian)
            .fill_normals(head, std::span<double>(out).subspan(head));
    }
    return out;
}

UniversalSamplePoint sample_xi(std::uint64_t seed, std::size_t J, std::uint64_t sample) {
    return UniversalSamplePoint(seed, sample, J);
}

// ---------------------------------------------------------------------------

struct GaussianNoiseField::Cache {
    struct Entry {
        double mass;
        std::vector<double> coefficients;
    };
    std::mutex mutex;
    std::map<std::string, Entry> entries;
};

namespace {

std::string cache_key(const BorelSet& A) {
    std::string key = A.to_string();
    if (const auto& tag = A.cylinder_tag()) {
        key += '#';
        key += tag->system_key;
        key += ':';
        for (int digit : tag->word) key += std::to_string(digit) + ',';
    }
    return key;
}

}  // namespace

GaussianNoiseField::GaussianNoiseField(const SigmaFiniteMeasure& mu, std::size_t J)
    : GaussianNoiseField(make_basis(mu, J), J) {}

GaussianNoiseField::GaussianNoiseField(Basis basis, std::size_t J)
    : basis_(std::move(basis)), J_(J), cache_(std::make_shared<Cache>()) {
    if (!basis_) throw std::invalid_argument("GaussianNoiseField: null basis");
    if (J_ == 0) J_ = basis_->size();
    if (J_ > basis_->size()) throw std::invalid_argument("GaussianNoiseField: truncation exceeds the basis size");
}

double GaussianNoiseField::mass(const BorelSet& A) const { return measure_of(measure(), A); }

std::vector<double> GaussianNoiseField::set_coefficients(const BorelSet& A) const {
    const std::string key = cache_key(A);
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->entries.find(key); it != cache_->entries.end()) {
            if (std::isinf(it->second.mass)) {
                throw std::invalid_argument("W_A undefined for mu(A) = infinity: renormalization out of scope");
            }
            return it->second.coefficients;
        }
    }
    Cache::Entry entry{mass(A), {}};
    if (!std::isinf(entry.mass)) {
        entry.coefficients = entry.mass == 0.0 ? std::vector<double>(J_, 0.0) : basis_->indicator_coefficients(A, J_);
    }
    std::lock_guard lock(cache_->mutex);
    const auto& stored = cache_->entries.emplace(key, std::move(entry)).first->second;
    if (std::isinf(stored.mass)) {
        throw std::invalid_argument("W_A undefined for mu(A) = infinity: renormalization out of scope");
    }
    return stored.coefficients;
}

std::vector<double> GaussianNoiseField::function_coefficients(const std::function<double(double)>& f) const {
    std::vector<double> c = basis_->coefficients(f, J_);
    for (double v : c) {
        if (!std::isfinite(v)) throw NumericError("ito_integral: quadrature of <phi_j, f> is not finite");
    }
    return c;
}

double pair_sum(std::span<const double> coefficients, std::span<const double> xi) {
    double sum = 0.0;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        if (coefficients[j] == 0.0) continue;
        if (j >= xi.size()) throw std::invalid_argument("coordinate prefix shorter than the truncation");
        sum += coefficients[j] * xi[j];
    }
    return sum;
}

double noise_on_set(const GaussianNoiseField& field, const BorelSet& A, std::span<const double> xi) {
    return pair_sum(field.set_coefficients(A), xi);
}

double noise_on_set(const GaussianNoiseField& field, const BorelSet& A, const UniversalSamplePoint& xi) {
    const std::vector<double> c = field.set_coefficients(A);
    double sum = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] != 0.0) sum += c[j] * xi[j];
    }
    return sum;
}

double ito_integral(const GaussianNoiseField& field, const std::function<double(double)>& f,
                    std::span<const double> xi) {
    return pair_sum(field.function_coefficients(f), xi);
}

// ---------------------------------------------------------------------------

MonteCarloEstimate coefficient_covariance_mc(std::span<const double> a, std::span<const double> b,
                                             const McOptions& options) {
    if (options.samples < 100) throw std::invalid_argument("monte carlo needs at least 100 samples");
    struct Term {
        std::size_t j;
        double a, b;
    };
    std::vector<Term> terms;
    for (std::size_t j = 0; j < std::max(a.size(), b.size()); ++j) {
        const double aj = j < a.size() ? a[j] : 0.0;
        const double bj = j < b.size() ? b[j] : 0.0;
        if (aj != 0.0 || bj != 0.0) terms.push_back({j, aj, bj});
    }
    const std::size_t width = terms.empty() ? 0 : terms.back().j + 1;
    const bool dense = 2 * terms.size() >= width;
    return run_monte_carlo(options.samples, 1, options.workers, [&](std::size_t n, std::span<double> out) {
        const CoordinateStream stream(options.seed, n, StreamDomain::gaussian);
        double wa = 0.0, wb = 0.0;
        if (dense) {
            thread_local std::vector<double> xi;
            xi.resize(width);
            stream.fill_normals(0, xi);
            for (const Term& t : terms) {
                wa += t.a * xi[t.j];
                wb += t.b * xi[t.j];
            }
        } else {
            for (const Term& t : terms) {
                const double x = stream.normal(t.j);
                wa += t.a * x;
                wb += t.b * x;
            }
        }
        out[0] = wa * wb;
    })[0];
}

MonteCarloEstimate covariance_mc(const GaussianNoiseField& field, const BorelSet& A, const BorelSet& B,
                                 const McOptions& options) {
    if (options.samples < 100) throw std::invalid_argument("covariance_mc: N < 100");
    const std::vector<double> a = field.set_coefficients(A);
    const std::vector<double> b = field.set_coefficients(B);
    return coefficient_covariance_mc(a, b, options);
}

MonteCarloEstimate ito_covariance_mc(const GaussianNoiseField& field, const std::function<double(double)>& f,
                                     const std::function<double(double)>& g, const McOptions& options) {
    const std::vector<double> a = field.function_coefficients(f);
    const std::vector<double> b = field.function_coefficients(g);
    return coefficient_covariance_mc(a, b, options);
}

// ---------------------------------------------------------------------------

std::vector<double> psi_map(const GaussianNoiseField& field, std::span<const double> xi) {
    if (xi.size() < field.truncation()) throw std::invalid_argument("psi_map: coordinate prefix shorter than J");
    // Z_j = W(φ_j) = Σ_k ⟨φ_k, φ_j⟩ ξ_k = ξ_j by orthonormality.
    return {xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(field.truncation())};
}

std::vector<double> psi_map(const GaussianNoiseField& field, const OrthonormalBasis& target, std::size_t n,
                            std::span<const double> xi) {
    if (n > target.size()) throw std::invalid_argument("psi_map: n exceeds the target basis size");
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = ito_integral(field, [&](double x) { return target.evaluate(j, x); }, xi);
    }
    return z;
}

double gamma_map(const GaussianNoiseField& field, std::span<const double> coordinates, const BorelSet& A) {
    if (coordinates.size() != field.truncation()) {
        throw std::invalid_argument("gamma_map: coordinate count does not match the truncation");
    }
    return pair_sum(field.set_coefficients(A), coordinates);
}

double markov_pullback(const GaussianNoiseField& field, const OrthonormalBasis& target, std::size_t n,
                       const std::function<double(std::span<const double>)>& f, std::span<const double> xi) {
    const std::vector<double> z = psi_map(field, target, n, xi);
    return f(z);
}

// ---------------------------------------------------------------------------

namespace {

double squared_norm(std::span<const double> c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return s;
}

}  // namespace

ComplexEstimate characteristic_functional_mc(std::span<const double> c, const McOptions& options) {
    const std::vector<double> coef(c.begin(), c.end());
    const auto est = run_monte_carlo(options.samples, 2, options.workers, [&](std::size_t n, std::span<double> out) {
        const CoordinateStream stream(options.seed, n, StreamDomain::gaussian);
        double phase = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) {
            if (coef[j] != 0.0) phase += coef[j] * stream.normal(j);
        }
        out[0] = std::cos(phase);
        out[1] = std::sin(phase);
    });
    return {est[0], est[1]};
}

std::complex<double> characteristic_functional_exact(std::span<const double> c) {
    return {std::exp(-0.5 * squared_norm(c)), 0.0};
}

ComplexEstimate moment_functional_mc(std::size_t j, std::size_t k, std::span<const double> c,
                                     const McOptions& options) {
    const std::vector<double> coef(c.begin(), c.end());
    const auto est = run_monte_carlo(options.samples, 2, options.workers, [&](std::size_t n, std::span<double> out) {
        const CoordinateStream stream(options.seed, n, StreamDomain::gaussian);
        double phase = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            if (coef[i] != 0.0) phase += coef[i] * stream.normal(i);
        }
        const double weight = stream.normal(j) * stream.normal(k);
        out[0] = weight * std::cos(phase);
        out[1] = weight * std::sin(phase);
    });
    return {est[0], est[1]};
}

std::complex<double> moment_functional_exact(std::size_t j, std::size_t k, std::span<const double> c) {
    const double cj = j < c.size() ? c[j] : 0.0;
    const double ck = k < c.size() ? c[k] : 0.0;
    return {((j == k ? 1.0 : 0.0) - cj * ck) * std::exp(-0.5 * squared_norm(c)), 0.0};
}

// ---------------------------------------------------------------------------

namespace {

// ∫_0^∞ (1 − cos tx) x^{−2H−1} dx, split at a = min(1, 1/t):
// a power series on [0, a], Gauss–Legendre over half-periods up to X with
// tX ∈ 2πℕ, and an asymptotic tail past X.
double fbm_half_integral(double H, double t, const FbmOptions& options) {
    const double p = 2.0 * H + 1.0;
    const double a = std::min(1.0, 1.0 / t);

    double head = 0.0;
    double power = 1.0;  // (ta)^{2k} / (2k)!
    for (int k = 1; k <= 60; ++k) {
        power *= (t * a) * (t * a) / ((2.0 * k - 1.0) * (2.0 * k));
        const double term = power * std::pow(a, -2.0 * H) / (2.0 * k - 2.0 * H);
        head += (k % 2 == 1 ? term : -term);
        if (term < 1e-18 * std::abs(head)) break;
    }

    const double period = 2.0 * std::numbers::pi / t;
    const double X = period * (static_cast<double>(options.periods) + std::ceil(a / period));
    const QuadratureRule& rule = gauss_legendre(options.nodes);
    const auto integrand = [&](double x) { return (1.0 - std::cos(t * x)) * std::pow(x, -p); };
    double body = 0.0;
    for (double lo = a; lo < X;) {
        const double hi = std::min(X, lo + 0.5 * period);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
        body += half * panel;
        lo = hi;
    }

    // ∫_X^∞ x^{−p} dx − ∫_X^∞ cos(tx) x^{−p} dx; with sin(tX) = 0 and cos(tX) = 1
    // integration by parts leaves −g'(X)/t² + g'''(X)/t⁴ for g = x^{−p}.
    const double g1 = -p * std::pow(X, -p - 1.0);
    const double g3 = -p * (p + 1.0) * (p + 2.0) * std::pow(X, -p - 3.0);
    const double tail = std::pow(X, -2.0 * H) / (2.0 * H) - (-g1 / (t * t) + g3 / (t * t * t * t));

    const double total = head + body + tail;
    if (!std::isfinite(total) || total <= 0.0) {
        throw NumericError("fbm_increment_variance: quadrature did not converge (H=" + std::to_string(H) +
                           ", t=" + std::to_string(t) + ", head=" + std::to_string(head) +
                           ", body=" + std::to_string(body) + ", tail=" + std::to_string(tail) + ")");
    }
    return total;
}

}  // namespace

double fbm_increment_variance(double H, double t, const FbmOptions& options) {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("fbm_increment_variance: H must lie in (0,1)");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("fbm_increment_variance: t must be positive");
    if (options.nodes < 2 || options.periods < 1) throw std::invalid_argument("fbm_increment_variance: bad quadrature");
    return fbm_half_integral(H, t, options) / fbm_half_integral(H, 1.0, options);
}

double l2_escape_ratio(std::uint64_t seed, std::size_t n) {
    if (n == 0) throw std::invalid_argument("l2_escape_ratio: n must be positive");
    std::vector<double> xi(n);
    CoordinateStream(seed, 0, StreamDomain::gaussian).fill_normals(0, xi);
    double s = 0.0;
    for (double x : xi) s += x * x;
    return s / static_cast<double>(n);
}

double max_abs_coordinate(std::uint64_t seed, std::size_t n) {
    std::vector<double> xi(n);
    CoordinateStream(seed, 0, StreamDomain::gaussian).fill_normals(0, xi);
    double m = 0.0;
    for (double x : xi) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace sigmanoise
