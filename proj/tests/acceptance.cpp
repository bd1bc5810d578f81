// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest fails whenever any criterion does.

#include "sigmanoise/bernoulli.hpp"
#include "sigmanoise/cli.hpp"
#include "sigmanoise/gauss.hpp"
#include "sigmanoise/ifs.hpp"
#include "sigmanoise/kernel_boundary.hpp"
#include "sigmanoise/rng.hpp"
#include "sigmanoise/sigma_hilbert.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace sigmanoise;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body, double time_limit = 0.0) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0.0) {
        o.detail += " time=" + num(seconds) + "s/" + num(time_limit) + "s";
        if (seconds >= time_limit) o.pass = false;
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

std::string bracket_detail(const MonteCarloEstimate& e, double target) {
    return "est=" + num(e.mean) + " se=" + num(e.standard_error) + " target=" + num(target);
}

McOptions mc(std::size_t samples, std::uint64_t seed) { return {samples, seed, 1}; }

}  // namespace

int main() {
    criterion(1, "covariance-law", [] {
        const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0));
        const auto e = covariance_mc(field, BorelSet::interval(0.0, 0.6), BorelSet::interval(0.4, 1.0), mc(100000, 7));
        return Outcome{e.brackets(0.2), bracket_detail(e, 0.2)};
    }, 10.0);

    criterion(2, "cantor-variance", [] {
        const GaussianNoiseField field(SigmaFiniteMeasure::cantor(), 1u << 10);
        const BorelSet A = BorelSet::interval(0.0, 1.0 / 3.0);
        const auto e = covariance_mc(field, A, A, mc(100000, 11));
        return Outcome{e.brackets(0.5), bracket_detail(e, 0.5)};
    });

    criterion(3, "ito-isometry", [] {
        const GaussianNoiseField field(SigmaFiniteMeasure::lebesgue(0.0, 1.0));
        const auto id = [](double x) { return x; };
        const auto e = ito_covariance_mc(field, id, id, mc(100000, 3));
        return Outcome{e.brackets(1.0 / 3.0), bracket_detail(e, 1.0 / 3.0)};
    });

    criterion(4, "change-of-measure", [] {
        const SigmaFiniteMeasure lebesgue = SigmaFiniteMeasure::lebesgue(0.0, 1.0);
        const SigmaFiniteMeasure weighted = SigmaFiniteMeasure::polynomial_density(0.0, 1.0, Polynomial{0.0, 2.0});
        const auto f = [](double x) { return std::cos(3.0 * x) + x * x; };
        const SigmaFunction a(f, weighted, "f on 2x dx");
        const SigmaFunction b([f](double x) { return f(x) * std::sqrt(2.0 * x); }, lebesgue, "f sqrt(2x) on dx");
        const LiftFrame frame = lift_frame(a, b);
        double worst = 0.0;
        for (std::uint64_t n = 0; n < 100; ++n) {
            const UniversalSamplePoint xi = sample_xi(5, frame.field.truncation(), n);
            worst = std::max(worst, std::abs(pair_sum(frame.first, xi.prefix()) - pair_sum(frame.second, xi.prefix())));
        }
        return Outcome{worst < 1e-8, "max|diff|=" + num(worst) + " J=" + std::to_string(frame.field.truncation())};
    });

    criterion(5, "gamma-psi-identity", [] {
        const SigmaFiniteMeasure mu = SigmaFiniteMeasure::lebesgue(0.0, 1.0);
        const GaussianNoiseField field(mu, 128);
        const std::vector<BorelSet> family = {BorelSet::interval(0.0, 0.5), BorelSet::interval(0.25, 0.75),
                                              BorelSet::from_intervals({{0.0, 0.1}, {0.6, 0.9}}),
                                              BorelSet::interval(0.0, 1.0)};
        double worst = 0.0;
        for (std::uint64_t n = 0; n < 10; ++n) {
            const UniversalSamplePoint xi = sample_xi(9, field.truncation(), n);
            const std::vector<double> coords = psi_map(field, xi.prefix());
            for (const BorelSet& A : family) {
                worst = std::max(worst, std::abs(gamma_map(field, coords, A) - noise_on_set(field, A, xi)));
            }
        }
        return Outcome{worst <= 1e-12, "max|diff|=" + num(worst)};
    });

    criterion(6, "characteristic-functional", [] {
        const std::vector<double> c = {1.0};
        const ComplexEstimate e = characteristic_functional_mc(c, mc(100000, 6));
        const double target = std::exp(-0.5);
        return Outcome{e.real.brackets(target) && e.imag.brackets(0.0),
                       "re " + bracket_detail(e.real, target) + " im=" + num(e.imag.mean)};
    });

    criterion(7, "moment-identity-k2", [] {
        struct Case {
            std::size_t j, k;
            std::vector<double> c;
        };
        const std::vector<Case> cases = {{0, 0, {0.5}}, {0, 1, {0.3, -0.7}}, {1, 1, {0.2, 0.9, -0.4}}};
        bool ok = true;
        std::string detail;
        for (const Case& cs : cases) {
            const ComplexEstimate e = moment_functional_mc(cs.j, cs.k, cs.c, mc(100000, 17));
            const std::complex<double> target = moment_functional_exact(cs.j, cs.k, cs.c);
            ok = ok && e.real.brackets(target.real()) && e.imag.brackets(target.imag());
            detail += "[" + num(e.real.mean) + " vs " + num(target.real()) + "] ";
        }
        return Outcome{ok, detail};
    });

    criterion(8, "l2-escape-proxy", [] {
        int inside = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const double r = l2_escape_ratio(seed, 100000);
            if (r >= 0.9 && r <= 1.1) ++inside;
        }
        return Outcome{inside >= 99, std::to_string(inside) + "/100 seeds in [0.9,1.1]"};
    }, 30.0);

    // Masses are powers of 4 so that 1/sqrt(m) and its square are exact.
    criterion(9, "atom-identity", [] {
        const std::vector<std::vector<Atom>> cases = {
            {{0.0, 0.25}, {1.0, 1.0}},
            {{-1.0, 1.0}, {0.5, 0.0625}, {2.0, 4.0}},
            {{0.1, 16.0}, {0.2, 0.25}, {0.3, 0.0625}, {0.4, 1.0 / 256.0}},
        };
        bool ok = true;
        for (const auto& atoms : cases) {
            const AtomicBasis basis(SigmaFiniteMeasure::atomic(atoms));
            for (const Atom& a : atoms) {
                double total = 0.0;
                for (std::size_t j = 0; j < basis.size(); ++j) total += basis.evaluate(j, a.point) * basis.evaluate(j, a.point);
                ok = ok && total == 1.0 / a.mass;
            }
        }
        return Outcome{ok, "exact equality on 3 measures"};
    });

    criterion(10, "cuntz-relations", [] {
        double worst = 0.0;
        for (const IteratedFunctionSystem& ifs : {IteratedFunctionSystem::middle_third_cantor(), IteratedFunctionSystem::binary()}) {
            const CuntzResiduals r = cuntz_relation_residual(ifs, 8);
            worst = std::max({worst, r.isometry, r.completeness});
        }
        return Outcome{worst < 1e-10, "max residual=" + num(worst)};
    }, 5.0);

    criterion(11, "cantor-moments", [] {
        const std::vector<Rational> m = invariant_moments_exact(IteratedFunctionSystem::middle_third_cantor(), 2);
        const bool ok = m[1] == Rational(1, 2) && m[2] == Rational(3, 8);
        return Outcome{ok, "m1=" + m[1].str() + " m2=" + m[2].str()};
    });

    criterion(12, "bernoulli-covariance", [] {
        const std::vector<double> grid = {0.3, 0.45, 0.5, 0.6, 0.75};
        int bracketed = 0;
        double worst_z = 0.0;
        for (double lambda : grid) {
            for (double rho : grid) {
                const auto e = coupled_covariance_mc(lambda, rho, mc(100000, 12));
                const double target = bernoulli_covariance(lambda, rho);
                if (e.brackets(target)) ++bracketed;
                worst_z = std::max(worst_z, std::abs(e.mean - target) / e.standard_error);
            }
        }
        return Outcome{bracketed == 25, std::to_string(bracketed) + "/25 max z=" + num(worst_z)};
    });

    criterion(13, "viete-consistency", [] {
        double worst = 0.0;
        for (int i = -1000; i <= 1000; ++i) {
            const double t = i / 100.0;
            const double exact = t == 0.0 ? 1.0 : std::sin(t) / t;
            worst = std::max(worst, std::abs(fourier_transform(0.5, t).value - exact));
        }
        return Outcome{worst < 1e-10, "max error=" + num(worst)};
    });

    criterion(14, "half-density", [] {
        const Histogram hist = histogram(BernoulliConvolution(0.5, 14), 1000000, 0.01);
        double l1 = 0.0;
        for (double d : hist.density) l1 += std::abs(d - 0.5) * hist.width;
        return Outcome{l1 < 0.02, "L1=" + num(l1)};
    });

    criterion(15, "scaling-identity", [] {
        const BernoulliConvolution bc(0.5, 15);
        const double residual = scaling_identity_residual(bc, 1000000, 0.01);
        const double probe = scaling_identity_residual(bc, 1000000, 0.01, 2.0 / 3.0);
        return Outcome{residual < 0.05 && probe - residual >= 0.15,
                       "residual=" + num(residual) + " probe=" + num(probe)};
    });

    criterion(16, "cross-term-bound", [] {
        bool ok = true;
        std::string detail;
        for (double lambda : {0.6, 0.75}) {
            for (double r : {0.1, 0.5}) {
                const CrossTermResult c = cross_term_mc(lambda, r, mc(100000, 16));
                ok = ok && std::abs(c.cross.mean) + 4.0 * c.cross.standard_error <= c.bound;
                detail += "[" + num(c.cross.mean) + "<=" + num(c.bound) + "] ";
            }
        }
        return Outcome{ok, detail};
    });

    criterion(17, "szego-boundary", [] {
        const std::vector<std::pair<Complex, Complex>> grid = {
            {{0.0, 0.0}, {0.0, 0.0}}, {{0.5, 0.0}, {0.5, 0.0}}, {{0.5, 0.0}, {0.0, -0.5}},
            {{0.9, 0.0}, {0.9, 0.0}}, {{-0.3, 0.4}, {0.6, -0.2}}};
        double worst = 0.0;
        for (const auto& [z, w] : grid) {
            worst = std::max(worst, std::abs(szego_boundary_integral(z, w) - 1.0 / (1.0 - z * std::conj(w))));
        }
        return Outcome{worst < 1e-8, "max error=" + num(worst)};
    });

    criterion(18, "brownian-embedding", [] {
        std::vector<Complex> points;
        for (int i = 0; i < 16; ++i) points.emplace_back(i / 15.0, 0.0);
        const double r = metric_identity_residual(BrownianKernel(), points, 10000);
        return Outcome{r < 5e-3, "max residual=" + num(r)};
    }, 20.0);

    criterion(19, "exp-set-kernel", [] {
        const SigmaFiniteMeasure mu = SigmaFiniteMeasure::lebesgue(0.0, 1.0);
        bool ok = true;
        double worst = 0.0;
        for (std::uint64_t f = 0; f < 5; ++f) {
            const CoordinateStream rng(19, f, StreamDomain::scratch);
            std::vector<BorelSet> family;
            for (std::uint64_t k = 0; k < 8; ++k) {
                const double a = rng.uniform(2 * k), b = rng.uniform(2 * k + 1);
                family.push_back(BorelSet::interval(std::min(a, b), std::max(a, b)));
            }
            const PsdReport r = psd_report(exp_set_gram(mu, family));
            ok = ok && r.min_eigenvalue >= -1e-9 * r.trace;
            worst = std::min(worst, r.min_eigenvalue);
        }
        const SigmaFiniteMeasure atoms = SigmaFiniteMeasure::atomic({{0.0, 1.0}, {1.0, 1.0}});
        const GaussianNoiseField field(atoms);
        const std::vector<BorelSet> sets = {BorelSet::interval(-0.5, 0.5), BorelSet::interval(0.5, 1.5),
                                            BorelSet::interval(-0.5, 1.5)};
        const std::vector<double> a = {1.0, -1.0, 0.5};
        const IsometryCheck check = fourier_map_isometry_check(field, sets, a, mc(100000, 19));
        ok = ok && check.mc_norm.brackets(check.rkhs_norm);
        return Outcome{ok, "min eig=" + num(worst) + " isometry " + bracket_detail(check.mc_norm, check.rkhs_norm)};
    });

    criterion(20, "julia-example", [] {
        const bool states = julia_membership(0.0).status == JuliaStatus::inside &&
                            julia_membership(2.0).status == JuliaStatus::escaped &&
                            julia_membership(1.0).status == JuliaStatus::budget_exceeded;
        const std::vector<Complex> candidates = {{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.1}, {-0.15, 0.05}, {0.05, -0.2}, {0.3, -0.1}};
        std::vector<Complex> members;
        for (const Complex& z : candidates) {
            if (julia_membership(z).status == JuliaStatus::inside) members.push_back(z);
        }
        double worst = 0.0;
        for (const Complex& w : members) worst = std::max(worst, std::abs(julia_kernel(0.0, w).value - 1.0));
        const JuliaKernel kernel;
        const PsdReport r = psd_report(kernel_gram(kernel, members));
        return Outcome{states && worst < 1e-12 && r.psd && members.size() >= 4,
                       "members=" + std::to_string(members.size()) + " |C(0,w)-1|=" + num(worst) +
                           " min eig=" + num(r.min_eigenvalue)};
    });

    criterion(21, "fbm-scaling", [] {
        double worst = 0.0;
        for (double H : {0.25, 0.5, 0.75}) {
            const double ratio = fbm_increment_variance(H, 4.0) / fbm_increment_variance(H, 1.0);
            worst = std::max(worst, std::abs(ratio - std::pow(4.0, 2.0 * H)));
        }
        return Outcome{worst < 1e-3, "max error=" + num(worst)};
    });

    criterion(22, "replay-determinism", [] {
        unsetenv("SIGMANOISE_OUTPUT_DIR");
        const std::vector<std::vector<std::string>> runs = {
            {"covariance", "--measure", "lebesgue:0,1", "--A", "0,0.6", "--B", "0.4,1", "--N", "100000", "--seed", "7"},
            {"covariance", "--measure", "cantor", "--A", "0,0.3333333333333333", "--B", "0,0.3333333333333333"},
            {"ito-isometry", "--f", "0,1", "--workers", "2"},
            {"equivalence", "--f1", "1", "--mu1", "poly:0,1;0,2", "--f2", "0,1.4142135623730951"},
            {"ifs-moments", "--ifs", "cantor", "--degree", "2", "--format", "json"},
            {"cuntz-check", "--ifs", "cantor", "--depth", "8"},
            {"cuntz-check", "--ifs", "binary", "--depth", "8"},
            {"bernoulli-density", "--lambda", "0.5", "--N", "1000000"},
            {"bernoulli-scaling", "--lambda", "0.5", "--N", "1000000"},
            {"ac2-proxy"},
            {"boundary-embed", "--kernel", "brownian", "--points", "16", "--J", "10000"},
            {"szego-check"},
            {"julia-kernel"},
            {"set-kernel"},
            {"fourier-isometry"},
            {"fbm-variance", "--H", "0.75", "--t", "1,4"},
            {"sample-path", "--measure", "cantor"},
            {"sigma-inner"},
        };
        int identical = 0;
        std::string failed;
        for (const auto& args : runs) {
            std::ostringstream out1, err1, out2, err2;
            const int s1 = cli::run(args, out1, err1);
            const int s2 = cli::run(args, out2, err2);
            if (s1 == 0 && s2 == 0 && !out1.str().empty() && out1.str() == out2.str()) {
                ++identical;
            } else {
                failed += " " + args.front() + "(" + std::to_string(s1) + ":" + err1.str() + ")";
            }
        }
        return Outcome{identical == static_cast<int>(runs.size()),
                       std::to_string(identical) + "/" + std::to_string(runs.size()) + " byte-identical" + failed};
    });

    std::printf("%d failure(s)\n", failures);
    return failures;
}
