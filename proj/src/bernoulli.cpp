#include "sigmanoise/bernoulli.hpp"

#include "sigmanoise/quadrature.hpp"
#include "sigmanoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigmanoise {

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("bernoulli: lambda must lie in (0,1)");
}

// X_λ for one coin stream; ε_k is bit k of the stream, matching CoordinateStream::sign.
double power_series(const CoordinateStream& coins, double lambda, std::size_t K) {
    double sum = 0.0, power = lambda;
    std::uint64_t word = 0;
    for (std::size_t k = 0; k < K; ++k) {
        if ((k & 63u) == 0) word = coins.bits(k >> 6);
        sum += ((word >> (k & 63u)) & 1u) ? power : -power;
        power *= lambda;
    }
    return sum;
}

}  // namespace

std::size_t default_series_terms(double lambda) {
    check_lambda(lambda);
    std::size_t K = 1;
    for (double p = lambda; p >= 1e-14; p *= lambda) ++K;
    return K;
}

BernoulliConvolution::BernoulliConvolution(double lambda, std::uint64_t seed, std::size_t K)
    : lambda_(lambda), seed_(seed), K_(K) {
    check_lambda(lambda);
    if (K_ == 0) K_ = default_series_terms(lambda);
}

double BernoulliConvolution::sample(std::uint64_t n) const {
    return power_series(CoordinateStream(seed_, n, StreamDomain::coins), lambda_, K_);
}

std::vector<double> BernoulliConvolution::sample_paths(std::size_t N, std::uint64_t first) const {
    if (N == 0) throw std::invalid_argument("sample_paths: N must be at least 1");
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = sample(first + i);
    return out;
}

double bernoulli_covariance(double lambda, double rho) {
    check_lambda(lambda);
    check_lambda(rho);
    return lambda * rho / (1.0 - lambda * rho);
}

MonteCarloEstimate coupled_covariance_mc(double lambda, double rho, const McOptions& options) {
    const BernoulliConvolution a(lambda, options.seed), b(rho, options.seed);
    return run_monte_carlo(options.samples, 1, options.workers, [&](std::size_t n, std::span<double> out) {
        out[0] = a.sample(n) * b.sample(n);
    })[0];
}

MonteCarloEstimate variance_mc(double lambda, const McOptions& options) {
    return coupled_covariance_mc(lambda, lambda, options);
}

FourierValue fourier_transform(double lambda, double t, std::size_t n) {
    check_lambda(lambda);
    if (n == 0) throw std::invalid_argument("fourier_transform: n must be at least 1");
    FourierValue out{1.0, 0.0};
    double power = lambda;
    for (std::size_t k = 1; k <= n; ++k) {
        out.value *= std::cos(power * t);
        power *= lambda;
    }
    // Σ_{k>n} (λ^k t)²/2 = (λ^{n+1} t)² / (2(1 − λ²)).
    out.log_tail_bound = power * t * power * t / (2.0 * (1.0 - lambda * lambda));
    return out;
}

double Histogram::operator()(double x) const {
    if (density.empty() || !(x >= lo)) return 0.0;
    const double pos = (x - lo) / width;
    if (pos >= static_cast<double>(density.size())) return 0.0;
    return density[static_cast<std::size_t>(pos)];
}

double Histogram::total_mass() const {
    double s = 0.0;
    for (double d : density) s += d * width;
    return s;
}

Histogram histogram(std::span<const double> samples, double lo, double hi, double h) {
    if (!(hi > lo) || !(h > 0.0)) throw std::invalid_argument("histogram: bad range or bin width");
    if (samples.empty()) throw std::invalid_argument("histogram: no samples");
    const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
    Histogram out{lo, (hi - lo) / static_cast<double>(bins), std::vector<double>(bins, 0.0)};
    for (double x : samples) {
        const double pos = (x - lo) / out.width;
        if (pos < 0.0 || pos >= static_cast<double>(bins)) continue;
        out.density[static_cast<std::size_t>(pos)] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(samples.size()) * out.width);
    for (double& d : out.density) d *= norm;
    return out;
}

Histogram histogram(const BernoulliConvolution& bc, std::size_t N, double h) {
    const std::vector<double> samples = bc.sample_paths(N);
    return histogram(samples, -bc.bound(), bc.bound(), h);
}

std::vector<double> fourier_inversion(double lambda, std::span<const double> grid, double T) {
    check_lambda(lambda);
    if (!(T > 0.0)) throw std::invalid_argument("fourier_inversion: T must be positive");
    const QuadratureRule& rule = gauss_legendre(16);
    const auto panels = static_cast<std::size_t>(std::ceil(T / 0.5));
    const double width = T / static_cast<double>(panels);
    const std::size_t n = default_series_terms(lambda);
    std::vector<double> nodes, weights;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = mid + 0.5 * width * rule.nodes[i];
            nodes.push_back(t);
            weights.push_back(0.5 * width * rule.weights[i] * fourier_transform(lambda, t, n).value);
        }
    }
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * std::cos(nodes[i] * x);
        out.push_back(s / std::numbers::pi);
    }
    return out;
}

DensityEstimate density_estimate(const BernoulliConvolution& bc, std::span<const double> grid, std::size_t N,
                                 double h, double T) {
    const Histogram hist = histogram(bc, N, h);
    DensityEstimate out;
    out.grid.assign(grid.begin(), grid.end());
    for (double x : grid) out.histogram.push_back(hist(x));
    out.inversion = fourier_inversion(bc.lambda(), grid, T);
    return out;
}

double scaling_identity_residual(const BernoulliConvolution& bc, std::size_t N, double h, double constant_factor,
                                 std::size_t grid_points) {
    if (grid_points < 2) throw std::invalid_argument("scaling_identity_residual: need at least 2 grid points");
    const Histogram D = histogram(bc, N, h);
    const double lambda = bc.lambda();
    const double c = constant_factor / (2.0 * lambda);
    const double reach = 1.0 / (1.0 - lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        // Interior points of (−reach, reach).
        const double x = -reach + 2.0 * reach * (static_cast<double>(i) + 0.5) / static_cast<double>(grid_points);
        sum += std::abs(D(lambda * x) - c * (D(x + 1.0) + D(x - 1.0)));
    }
    return sum / static_cast<double>(grid_points);
}

double ac2_l2_proxy(double lambda, double T, std::size_t nodes_per_unit) {
    check_lambda(lambda);
    if (!(T > 0.0) || nodes_per_unit == 0) throw std::invalid_argument("ac2_l2_proxy: bad window or resolution");
    std::size_t n0 = 1;
    for (double p = lambda; p * T >= 1e-8; p *= lambda) ++n0;
    const QuadratureRule& rule = gauss_legendre(8);
    const auto panels = static_cast<std::size_t>(std::ceil(T * static_cast<double>(nodes_per_unit) / 8.0));
    const double width = T / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * width;
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double v = fourier_transform(lambda, mid + 0.5 * width * rule.nodes[i], n0).value;
            panel += rule.weights[i] * v * v;
        }
        sum += 0.5 * width * panel;
    }
    return 2.0 * sum;  // even integrand
}

std::vector<double> hardy_coefficients(double lambda, std::size_t n) {
    check_lambda(lambda);
    if (n == 0) throw std::invalid_argument("hardy_coefficients: n must be at least 1");
    std::vector<double> out(n);
    double p = lambda;
    for (double& v : out) {
        v = p;
        p *= lambda;
    }
    return out;
}

double hardy_inner_product(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
    return s;
}

CrossTermResult cross_term_mc(double lambda, double r, const McOptions& options) {
    if (!(r > 0.0)) throw std::invalid_argument("cross_term_mc: r must be positive");
    const BernoulliConvolution bc(lambda, options.seed);
    const auto est = run_monte_carlo(options.samples, 2, options.workers, [&](std::size_t n, std::span<double> out) {
        const double x = bc.sample(2 * n), y = bc.sample(2 * n + 1);
        const double f = std::abs(x - y) <= r ? 1.0 : 0.0;
        out[0] = (y - x) * f;
        out[1] = f;
    });
    CrossTermResult result{est[0], est[1], 0.0};
    result.bound = std::sqrt(2.0 * lambda * lambda / (1.0 - lambda * lambda)) * std::sqrt(result.indicator.mean);
    return result;
}

}  // namespace sigmanoise
