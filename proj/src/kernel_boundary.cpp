#include "sigmanoise/kernel_boundary.hpp"

#include "sigmanoise/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigmanoise {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Brownian

Complex BrownianKernel::evaluate(Complex s, Complex t) const { return std::min(s.real(), t.real()); }

void BrownianKernel::features(Complex t, std::span<Complex> out) const {
    if (out.empty()) return;
    const double x = t.real();
    out[0] = x;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double kpi = static_cast<double>(k) * pi;
        out[k] = std::sqrt(2.0) * std::sin(kpi * x) / kpi;
    }
}

bool BrownianKernel::contains(Complex t) const { return t.imag() == 0.0 && t.real() >= 0.0 && t.real() <= 1.0; }

// ---------------------------------------------------------------------------
// Szegő

Complex SzegoKernel::evaluate(Complex s, Complex t) const {
    if (!contains(s) || !contains(t)) throw std::invalid_argument("szego: points must lie in the open unit disk");
    const Complex p = s * std::conj(t);
    return drop_constant_ ? p / (1.0 - p) : 1.0 / (1.0 - p);
}

void SzegoKernel::features(Complex t, std::span<Complex> out) const {
    Complex power = drop_constant_ ? t : Complex(1.0);
    for (Complex& v : out) {
        v = power;
        power *= t;
    }
}

// ---------------------------------------------------------------------------
// Julia

const char* to_string(JuliaStatus status) noexcept {
    switch (status) {
        case JuliaStatus::inside: return "inside";
        case JuliaStatus::escaped: return "escaped";
        case JuliaStatus::budget_exceeded: return "budget-exceeded";
    }
    return "?";
}

Complex julia_map(Complex z) {
    const Complex z2 = z * z;
    return z2 * z2 - 2.0 * z2;
}

JuliaOrbit julia_membership(Complex z, const JuliaOptions& options) {
    JuliaOrbit out;
    out.orbit.push_back(z);
    out.l1_partial = std::abs(z);
    std::size_t contracting = 0;
    for (std::size_t n = 0;; ++n) {
        const double m = std::abs(out.orbit.back());
        if (m > options.escape_radius) {
            out.status = JuliaStatus::escaped;
            return out;
        }
        if (m == 0.0) {
            out.status = JuliaStatus::inside;
            return out;
        }
        if (contracting >= options.window) {
            out.status = JuliaStatus::inside;
            out.l1_tail = m * options.ratio / (1.0 - options.ratio);
            return out;
        }
        if (n >= options.max_iterations) return out;
        const Complex next = julia_map(out.orbit.back());
        contracting = std::abs(next) <= options.ratio * m ? contracting + 1 : 0;
        out.orbit.push_back(next);
        out.l1_partial += std::abs(next);
    }
}

namespace {

// Iterates R_0..R_{n−1} of a member plus a bound on Σ_{k≥n} |R_k|.
std::vector<Complex> member_orbit(Complex z, std::size_t n, const JuliaOptions& options, double& tail) {
    const JuliaOrbit orbit = julia_membership(z, options);
    if (orbit.status != JuliaStatus::inside) {
        throw std::invalid_argument("julia_kernel: point is not in Omega (" + std::string(to_string(orbit.status)) + ")");
    }
    std::vector<Complex> values = orbit.orbit;
    while (values.size() < n) values.push_back(julia_map(values.back()));
    tail = 0.0;
    for (std::size_t k = n; k < values.size(); ++k) tail += std::abs(values[k]);
    const double last = std::abs(values.back());
    if (values.size() > orbit.orbit.size()) {
        tail += last * options.ratio / (1.0 - options.ratio);
    } else {
        tail += orbit.l1_tail;
    }
    values.resize(n);
    return values;
}

}  // namespace

KernelValue julia_kernel(Complex z, Complex w, std::size_t n_terms, const JuliaOptions& options) {
    if (n_terms == 0) throw std::invalid_argument("julia_kernel: need at least one factor");
    double tz = 0.0, tw = 0.0;
    const std::vector<Complex> a = member_orbit(z, n_terms, options, tz);
    const std::vector<Complex> b = member_orbit(w, n_terms, options, tw);
    KernelValue out{1.0, 0.0};
    for (std::size_t n = 0; n < n_terms; ++n) out.value *= 1.0 + a[n] * std::conj(b[n]);
    // |log Π_{n≥N}(1 + x_n)| ≤ 2Σ|x_n| once Σ|x_n| ≤ 1/2, and Σ|a_n b_n| ≤ Σ|a_n|·Σ|b_n|.
    const double s = tz * tw;
    out.tail_bound = s <= 0.5 ? std::abs(out.value) * std::expm1(2.0 * s) : INFINITY;
    return out;
}

Complex JuliaKernel::evaluate(Complex s, Complex t) const { return julia_kernel(s, t, 64, options_).value; }

void JuliaKernel::features(Complex t, std::span<Complex> out) const {
    if (out.size() > default_truncation()) throw std::invalid_argument("julia: truncation exceeds 2^orbit_terms");
    double tail = 0.0;
    const std::vector<Complex> orbit = member_orbit(t, orbit_terms_, options_, tail);
    if (out.empty()) return;
    out[0] = 1.0;
    for (std::size_t n = 0; n < orbit_terms_; ++n) {
        const std::size_t bit = std::size_t{1} << n;
        for (std::size_t j = 0; j < bit && (j | bit) < out.size(); ++j) out[j | bit] = out[j] * orbit[n];
    }
}

bool JuliaKernel::contains(Complex t) const { return julia_membership(t, options_).status == JuliaStatus::inside; }

// ---------------------------------------------------------------------------
// Generic operations

std::vector<Complex> embed_point(const PositiveDefiniteKernel& kernel, Complex t, std::size_t J) {
    if (!kernel.contains(t)) throw std::invalid_argument(kernel.name() + ": point outside the index set");
    std::vector<Complex> out(J);
    kernel.features(t, out);
    return out;
}

namespace {

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& c : v) s += std::norm(c);
    return s;
}

}  // namespace

KernelValue kernel_reconstruct(const PositiveDefiniteKernel& kernel, Complex s, Complex t, std::size_t J) {
    const std::vector<Complex> fs = embed_point(kernel, s, J);
    const std::vector<Complex> ft = embed_point(kernel, t, J);
    KernelValue out{0.0, 0.0};
    for (std::size_t j = 0; j < J; ++j) out.value += ft[j] * std::conj(fs[j]);
    const double rt = std::max(0.0, kernel.evaluate(t, t).real() - norm2(ft));
    const double rs = std::max(0.0, kernel.evaluate(s, s).real() - norm2(fs));
    out.tail_bound = std::sqrt(rt * rs);
    return out;
}

double metric_identity_residual(const PositiveDefiniteKernel& kernel, std::span<const Complex> points, std::size_t J) {
    std::vector<std::vector<Complex>> tau;
    for (const Complex& p : points) tau.push_back(embed_point(kernel, p, J));
    double worst = 0.0;
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            double d = 0.0;
            for (std::size_t j = 0; j < J; ++j) d += std::norm(tau[a][j] - tau[b][j]);
            const Complex t = points[a], s = points[b];
            const double target =
                kernel.evaluate(t, t).real() - 2.0 * kernel.evaluate(t, s).real() + kernel.evaluate(s, s).real();
            worst = std::max(worst, std::abs(d - target));
        }
    }
    return worst;
}

Eigen::MatrixXcd kernel_gram(const PositiveDefiniteKernel& kernel, std::span<const Complex> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            G(i, j) = kernel.evaluate(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
        }
    }
    return G;
}

Eigen::MatrixXcd truncated_gram(const PositiveDefiniteKernel& kernel, std::span<const Complex> points, std::size_t J) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd F(n, static_cast<Eigen::Index>(J));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<Complex> tau = embed_point(kernel, points[static_cast<std::size_t>(i)], J);
        for (std::size_t j = 0; j < J; ++j) F(i, static_cast<Eigen::Index>(j)) = tau[j];
    }
    return F * F.adjoint();
}

PsdReport psd_report(const Eigen::MatrixXcd& gram) {
    if (gram.rows() != gram.cols() || gram.rows() == 0) throw std::invalid_argument("psd_report: need a square matrix");
    const Eigen::MatrixXcd H = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
    PsdReport out;
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
    out.trace = H.trace().real();
    out.psd = out.min_eigenvalue >= -1e-9 * out.trace;
    return out;
}

PsdReport psd_report(const Eigen::MatrixXd& gram) { return psd_report(Eigen::MatrixXcd(gram.cast<Complex>())); }

Complex boundary_process(const PositiveDefiniteKernel& kernel, Complex t, std::span<const Complex> xi) {
    const std::vector<Complex> f = embed_point(kernel, t, xi.size());
    Complex s = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) s += xi[j] * std::conj(f[j]);
    return s;
}

Complex boundary_process(const PositiveDefiniteKernel& kernel, Complex t, std::span<const double> xi) {
    const std::vector<Complex> f = embed_point(kernel, t, xi.size());
    Complex s = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) s += xi[j] * std::conj(f[j]);
    return s;
}

ComplexEstimate boundary_process_cov(const PositiveDefiniteKernel& kernel, Complex s, Complex t, std::size_t J,
                                     const McOptions& options) {
    if (options.samples < 1000) throw std::invalid_argument("boundary_process_cov: N < 1000");
    const std::vector<Complex> fs = embed_point(kernel, s, J);
    const std::vector<Complex> ft = embed_point(kernel, t, J);
    struct Term {
        std::size_t j;
        Complex s, t;  // conj φ_j(s), conj φ_j(t)
    };
    std::vector<Term> terms;
    for (std::size_t j = 0; j < J; ++j) {
        if (fs[j] != 0.0 || ft[j] != 0.0) terms.push_back({j, std::conj(fs[j]), std::conj(ft[j])});
    }
    const auto est = run_monte_carlo(options.samples, 2, options.workers, [&](std::size_t n, std::span<double> out) {
        const CoordinateStream stream(options.seed, n, StreamDomain::gaussian);
        thread_local std::vector<double> xi;
        xi.resize(J);
        stream.fill_normals(0, xi);
        Complex xs = 0.0, xt = 0.0;
        for (const Term& term : terms) {
            xs += xi[term.j] * term.s;
            xt += xi[term.j] * term.t;
        }
        const Complex v = std::conj(xs) * xt;
        out[0] = v.real();
        out[1] = v.imag();
    });
    return {est[0], est[1]};
}

Complex szego_boundary_integral(Complex z, Complex w, std::size_t nodes) {
    if (!(std::abs(z) < 1.0) || !(std::abs(w) < 1.0)) {
        throw std::invalid_argument("szego_boundary_integral: |z| and |w| must be below 1");
    }
    if (nodes == 0) throw std::invalid_argument("szego_boundary_integral: need nodes");
    Complex sum = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double theta = -pi + 2.0 * pi * static_cast<double>(k) / static_cast<double>(nodes);
        const Complex e = std::polar(1.0, theta);
        sum += 1.0 / ((1.0 - z * std::conj(e)) * (1.0 - std::conj(w) * e));
    }
    return sum / static_cast<double>(nodes);
}

// ---------------------------------------------------------------------------
// Exponential set kernel

double exp_set_kernel(const SigmaFiniteMeasure& mu, const BorelSet& A, const BorelSet& B) {
    const double a = measure_of(mu, A), b = measure_of(mu, B);
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("exp_set_kernel: sets must have finite mass");
    return std::exp(measure_of(mu, A.intersect(B)) - 0.5 * (a + b));
}

Eigen::MatrixXd exp_set_gram(const SigmaFiniteMeasure& mu, std::span<const BorelSet> family) {
    const auto n = static_cast<Eigen::Index>(family.size());
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            G(i, j) = G(j, i) = exp_set_kernel(mu, family[static_cast<std::size_t>(i)], family[static_cast<std::size_t>(j)]);
        }
    }
    return G;
}

IsometryCheck fourier_map_isometry_check(const GaussianNoiseField& field, std::span<const BorelSet> family,
                                         std::span<const double> a, const McOptions& options) {
    if (family.size() != a.size()) throw std::invalid_argument("fourier_map_isometry_check: one coefficient per set");
    IsometryCheck out;
    const Eigen::MatrixXd K = exp_set_gram(field.measure(), family);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            out.rkhs_norm += a[i] * a[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    std::vector<std::vector<double>> coef;
    for (const BorelSet& A : family) coef.push_back(field.set_coefficients(A));
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < field.truncation(); ++j) {
        if (std::any_of(coef.begin(), coef.end(), [j](const std::vector<double>& c) { return c[j] != 0.0; })) {
            active.push_back(j);
        }
    }
    out.mc_norm = run_monte_carlo(options.samples, 1, options.workers, [&](std::size_t n, std::span<double> value) {
        const CoordinateStream stream(options.seed, n, StreamDomain::gaussian);
        thread_local std::vector<double> xi;
        xi.resize(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) xi[k] = stream.normal(active[k]);
        Complex sum = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            double w = 0.0;
            for (std::size_t k = 0; k < active.size(); ++k) w += coef[i][active[k]] * xi[k];
            sum += a[i] * std::polar(1.0, w);
        }
        value[0] = std::norm(sum);
    })[0];
    return out;
}

}  // namespace sigmanoise
