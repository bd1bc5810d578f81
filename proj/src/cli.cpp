#include "sigmanoise/cli.hpp"

#include "sigmanoise/bernoulli.hpp"
#include "sigmanoise/descriptors.hpp"
#include "sigmanoise/errors.hpp"
#include "sigmanoise/format.hpp"
#include "sigmanoise/gauss.hpp"
#include "sigmanoise/kernel_boundary.hpp"
#include "sigmanoise/sigma_hilbert.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

namespace sigmanoise::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Output tables

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

using Tables = std::vector<Table>;

std::string cell_text(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return shortest(*d);
    if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + '"';
}

json cell_json(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return shortest(*d);
    }
    if (const long long* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const std::string& descriptor, const Tables& tables) {
    os << "# " << descriptor << '\n';
    for (std::size_t t = 0; t < tables.size(); ++t) {
        if (tables.size() > 1) os << "# table: " << tables[t].name << '\n';
        for (std::size_t i = 0; i < tables[t].columns.size(); ++i) os << (i ? "," : "") << tables[t].columns[i];
        os << '\n';
        for (const auto& row : tables[t].rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
            os << '\n';
        }
    }
}

void write_json(std::ostream& os, const std::string& descriptor, const Tables& tables) {
    json doc;
    doc["descriptor"] = json::parse(descriptor);
    doc["tables"] = json::array();
    for (const Table& t : tables) {
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r = json::array();
            for (const Cell& c : row) r.push_back(cell_json(c));
            rows.push_back(std::move(r));
        }
        doc["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
    }
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Flag access

class Args {
public:
    explicit Args(const ExperimentDescriptor& d) : d_(d) {}

    const ExperimentDescriptor& descriptor() const { return d_; }

    const std::string& text(const std::string& flag) const {
        const auto it = d_.options.find(flag);
        if (it == d_.options.end()) throw UsageError("--" + flag + ": flag not available for " + d_.subcommand);
        return it->second;
    }

    double number(const std::string& flag) const { return parse_number(text(flag), flag); }

    std::size_t count(const std::string& flag) const { return parse_count(text(flag), flag); }

    std::vector<double> list(const std::string& flag, char sep = ',') const {
        std::vector<double> out;
        std::string_view s = text(flag);
        for (;;) {
            const auto pos = s.find(sep);
            out.push_back(parse_number(s.substr(0, pos), flag));
            if (pos == std::string_view::npos) return out;
            s.remove_prefix(pos + 1);
        }
    }

    std::vector<std::string> items(const std::string& flag, char sep) const {
        std::vector<std::string> out;
        std::string_view s = text(flag);
        for (;;) {
            const auto pos = s.find(sep);
            out.emplace_back(s.substr(0, pos));
            if (pos == std::string_view::npos) return out;
            s.remove_prefix(pos + 1);
        }
    }

    Polynomial polynomial(const std::string& flag) const { return Polynomial(list(flag)); }

    SigmaFiniteMeasure measure(const std::string& flag = "measure") const {
        try {
            return parse_measure(text(flag));
        } catch (const std::invalid_argument& e) {
            throw UsageError("--" + flag + ": " + e.what());
        }
    }

    McOptions mc() const { return {count("N"), d_.seed, d_.workers}; }

    static double parse_number(std::string_view s, const std::string& flag) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw UsageError("--" + flag + ": malformed number '" + std::string(s) + "'");
        }
        return v;
    }

    static std::size_t parse_count(std::string_view s, const std::string& flag) {
        unsigned long long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw UsageError("--" + flag + ": expected a non-negative integer, got '" + std::string(s) + "'");
        }
        return static_cast<std::size_t>(v);
    }

private:
    const ExperimentDescriptor& d_;
};

Complex parse_complex(std::string_view s, const std::string& flag) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) return {Args::parse_number(s, flag), 0.0};
    return {Args::parse_number(s.substr(0, comma), flag), Args::parse_number(s.substr(comma + 1), flag)};
}

std::vector<BorelSet> parse_family(const Args& args, const SigmaFiniteMeasure& mu) {
    std::vector<BorelSet> family;
    for (const std::string& s : args.items("sets", '|')) family.push_back(parse_set(s, mu));
    return family;
}

Cell flag(bool b) { return static_cast<long long>(b ? 1 : 0); }

// ---------------------------------------------------------------------------
// Subcommands

Tables sample_path(const Args& args) {
    const SigmaFiniteMeasure mu = args.measure();
    const GaussianNoiseField field(mu, args.count("J"));
    const std::size_t points = args.count("points");
    if (points < 1) throw UsageError("--points: need at least 1");
    const Interval h = mu.hull();
    if (!std::isfinite(h.lo) || !std::isfinite(h.hi)) throw UsageError("--measure: sample paths need a bounded hull");
    const UniversalSamplePoint xi = sample_xi(args.descriptor().seed, field.truncation(), args.count("sample"));
    Table t{"path", {"t", "W"}, {}};
    t.add({h.lo, 0.0});
    for (std::size_t k = 1; k <= points; ++k) {
        const double x = h.lo + (h.hi - h.lo) * static_cast<double>(k) / static_cast<double>(points);
        t.add({x, noise_on_set(field, BorelSet::interval(h.lo, x), xi)});
    }
    return {t};
}

Tables covariance(const Args& args) {
    const SigmaFiniteMeasure mu = args.measure();
    const GaussianNoiseField field(mu, args.count("J"));
    const BorelSet A = parse_set(args.text("A"), mu), B = parse_set(args.text("B"), mu);
    const MonteCarloEstimate est = covariance_mc(field, A, B, args.mc());
    const double target = measure_of(mu, A.intersect(B));
    Table t{"covariance", {"estimate", "stderr", "target", "samples", "J", "brackets"}, {}};
    t.add({est.mean, est.standard_error, target, static_cast<long long>(est.samples),
           static_cast<long long>(field.truncation()), flag(est.brackets(target))});
    return {t};
}

Tables ito_isometry(const Args& args) {
    const SigmaFiniteMeasure mu = args.measure();
    const GaussianNoiseField field(mu, args.count("J"));
    const Polynomial f = args.polynomial("f");
    const Polynomial g = args.text("g").empty() ? f : args.polynomial("g");
    const MonteCarloEstimate est = ito_covariance_mc(
        field, [&](double x) { return f(x); }, [&](double x) { return g(x); }, args.mc());
    const double target = integrate(mu, [&](double x) { return f(x) * g(x); }).value;
    Table t{"ito", {"estimate", "stderr", "target", "samples", "J", "brackets"}, {}};
    t.add({est.mean, est.standard_error, target, static_cast<long long>(est.samples),
           static_cast<long long>(field.truncation()), flag(est.brackets(target))});
    return {t};
}

std::pair<SigmaFunction, SigmaFunction> sigma_pair(const Args& args) {
    const Polynomial f1 = args.polynomial("f1"), f2 = args.polynomial("f2");
    return {SigmaFunction([f1](double x) { return f1(x); }, args.measure("mu1"), args.text("f1")),
            SigmaFunction([f2](double x) { return f2(x); }, args.measure("mu2"), args.text("f2"))};
}

Tables sigma_inner(const Args& args) {
    const auto [a, b] = sigma_pair(args);
    Table t{"inner", {"inner", "norm1", "norm2"}, {}};
    t.add({inner_product(a, b), squared_norm(a), squared_norm(b)});
    return {t};
}

Tables equivalence(const Args& args) {
    const auto [a, b] = sigma_pair(args);
    const LiftFrame frame = lift_frame(a, b, args.count("J"));
    double worst = 0.0;
    for (std::size_t n = 0; n < args.count("samples"); ++n) {
        const UniversalSamplePoint xi = sample_xi(args.descriptor().seed, frame.field.truncation(), n);
        worst = std::max(worst, std::abs(pair_sum(frame.first, xi.prefix()) - pair_sum(frame.second, xi.prefix())));
    }
    Table t{"equivalence", {"equivalent", "max_lift_difference", "samples"}, {}};
    t.add({flag(equivalent(a, b)), worst, static_cast<long long>(args.count("samples"))});
    return {t};
}

Tables ifs_moments(const Args& args) {
    const IteratedFunctionSystem ifs = parse_ifs(args.text("ifs"));
    const std::size_t degree = args.count("degree");
    Table t{"moments", {"k", "exact", "value"}, {}};
    if (ifs.exact_branches() && ifs.exact_probabilities()) {
        const std::vector<Rational> m = invariant_moments_exact(ifs, degree);
        for (std::size_t k = 0; k <= degree; ++k) {
            t.add({static_cast<long long>(k), m[k].str(), m[k].convert_to<double>()});
        }
    } else {
        const std::vector<double> m = invariant_moments(ifs, degree);
        for (std::size_t k = 0; k <= degree; ++k) t.add({static_cast<long long>(k), std::string(), m[k]});
    }
    return {t};
}

Tables cuntz_check(const Args& args) {
    const IteratedFunctionSystem ifs = parse_ifs(args.text("ifs"));
    const std::string& name = args.text("basis");
    if (name != "cylinder" && name != "walsh") throw UsageError("--basis: expected cylinder or walsh");
    const CoefficientBasis basis = name == "walsh" ? CoefficientBasis::walsh : CoefficientBasis::cylinder;
    const std::size_t depth = args.count("depth");
    const CuntzResiduals r = cuntz_relation_residual(ifs, depth, basis);
    Table t{"cuntz", {"depth", "dimension", "isometry", "completeness"}, {}};
    t.add({static_cast<long long>(depth), static_cast<long long>(coefficient_dimension(ifs, depth)), r.isometry,
           r.completeness});
    return {t};
}

Tables bernoulli_density(const Args& args) {
    const BernoulliConvolution bc(args.number("lambda"), args.descriptor().seed);
    const std::size_t points = args.count("points");
    if (points < 2) throw UsageError("--points: need at least 2");
    const Histogram hist = histogram(bc, args.count("N"), args.number("h"));
    std::vector<double> grid;
    for (std::size_t i = 0; i < points; ++i) {
        grid.push_back(-bc.bound() + 2.0 * bc.bound() * (static_cast<double>(i) + 0.5) / static_cast<double>(points));
    }
    const std::vector<double> inversion = fourier_inversion(bc.lambda(), grid, args.number("T"));
    Table density{"density", {"x", "histogram", "inversion"}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) density.add({grid[i], hist(grid[i]), inversion[i]});
    double l1 = 0.0;
    for (double d : hist.density) l1 += std::abs(d - 0.5) * hist.width;
    Table summary{"summary", {"total_mass", "bins", "l1_to_half"}, {}};
    summary.add({hist.total_mass(), static_cast<long long>(hist.density.size()),
                 bc.lambda() == 0.5 ? Cell(l1) : Cell(std::string())});
    return {density, summary};
}

Tables bernoulli_scaling(const Args& args) {
    const BernoulliConvolution bc(args.number("lambda"), args.descriptor().seed);
    const double h = args.number("h");
    const std::size_t N = args.count("N");
    const double residual = scaling_identity_residual(bc, N, h);
    const double probe = scaling_identity_residual(bc, N, h, args.number("probe"));
    Table t{"scaling", {"residual", "probe_residual", "inflation"}, {}};
    t.add({residual, probe, probe - residual});
    return {t};
}

Tables ac2_proxy(const Args& args) {
    const double lambda = args.number("lambda");
    Table t{"proxy", {"T", "proxy"}, {}};
    for (double T : args.list("T")) t.add({T, ac2_l2_proxy(lambda, T)});
    return {t};
}

Tables boundary_embed(const Args& args) {
    const std::size_t points = args.count("points");
    if (points < 1) throw UsageError("--points: need at least 1");
    const std::string& name = args.text("kernel");
    std::unique_ptr<PositiveDefiniteKernel> kernel;
    std::vector<Complex> sample;
    if (name == "brownian") {
        kernel = std::make_unique<BrownianKernel>();
        for (std::size_t i = 0; i < points; ++i) {
            sample.emplace_back(points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1), 0.0);
        }
    } else if (name == "szego") {
        kernel = std::make_unique<SzegoKernel>();
        for (std::size_t i = 0; i < points; ++i) {
            sample.push_back(std::polar(0.9, 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points)));
        }
    } else {
        throw UsageError("--kernel: expected brownian or szego");
    }
    const std::size_t J = args.count("J") ? args.count("J") : kernel->default_truncation();
    std::vector<std::vector<Complex>> tau;
    for (const Complex& p : sample) tau.push_back(embed_point(*kernel, p, J));
    Table t{"distances", {"s_re", "s_im", "t_re", "t_im", "distance2", "target", "abs_error"}, {}};
    double worst = 0.0;
    for (std::size_t a = 0; a < sample.size(); ++a) {
        for (std::size_t b = a + 1; b < sample.size(); ++b) {
            double d = 0.0;
            for (std::size_t j = 0; j < J; ++j) d += std::norm(tau[a][j] - tau[b][j]);
            const Complex s = sample[a], u = sample[b];
            const double target = kernel->evaluate(s, s).real() - 2.0 * kernel->evaluate(s, u).real() +
                                  kernel->evaluate(u, u).real();
            worst = std::max(worst, std::abs(d - target));
            t.add({s.real(), s.imag(), u.real(), u.imag(), d, target, std::abs(d - target)});
        }
    }
    Table summary{"summary", {"J", "max_residual"}, {}};
    summary.add({static_cast<long long>(J), worst});
    return {t, summary};
}

Tables szego_check(const Args& args) {
    const std::size_t nodes = args.count("nodes");
    Table t{"szego", {"z_re", "z_im", "w_re", "w_im", "quadrature_re", "quadrature_im", "closed_re", "closed_im", "abs_error"}, {}};
    for (const std::string& pair : args.items("pairs", ';')) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) throw UsageError("--pairs: expected z_re,z_im:w_re,w_im");
        const Complex z = parse_complex(std::string_view(pair).substr(0, colon), "pairs");
        const Complex w = parse_complex(std::string_view(pair).substr(colon + 1), "pairs");
        const Complex q = szego_boundary_integral(z, w, nodes);
        const Complex c = 1.0 / (1.0 - z * std::conj(w));
        t.add({z.real(), z.imag(), w.real(), w.imag(), q.real(), q.imag(), c.real(), c.imag(), std::abs(q - c)});
    }
    return {t};
}

Tables julia(const Args& args) {
    const std::size_t terms = args.count("terms");
    Table status{"membership", {"z_re", "z_im", "status", "iterations", "C_zz", "C_0z"}, {}};
    std::vector<Complex> members;
    for (const std::string& item : args.items("points", ';')) {
        const Complex z = parse_complex(item, "points");
        const JuliaOrbit orbit = julia_membership(z);
        const bool inside = orbit.status == JuliaStatus::inside;
        if (inside) members.push_back(z);
        status.add({z.real(), z.imag(), std::string(to_string(orbit.status)), static_cast<long long>(orbit.orbit.size() - 1),
                    inside ? Cell(julia_kernel(z, z, terms).value.real()) : Cell(std::string()),
                    inside ? Cell(julia_kernel(0.0, z, terms).value.real()) : Cell(std::string())});
    }
    Table summary{"gram", {"members", "min_eigenvalue", "trace", "psd"}, {}};
    if (!members.empty()) {
        Eigen::MatrixXcd G(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(members.size()));
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = 0; j < members.size(); ++j) {
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = julia_kernel(members[i], members[j], terms).value;
            }
        }
        const PsdReport r = psd_report(G);
        summary.add({static_cast<long long>(members.size()), r.min_eigenvalue, r.trace, flag(r.psd)});
    }
    return {status, summary};
}

Tables set_kernel(const Args& args) {
    const SigmaFiniteMeasure mu = args.measure();
    const std::vector<BorelSet> family = parse_family(args, mu);
    const Eigen::MatrixXd G = exp_set_gram(mu, family);
    Table gram{"gram", {"i", "j", "K"}, {}};
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
        for (Eigen::Index j = 0; j < G.cols(); ++j) gram.add({static_cast<long long>(i), static_cast<long long>(j), G(i, j)});
    }
    const PsdReport r = psd_report(G);
    Table summary{"summary", {"min_eigenvalue", "trace", "psd"}, {}};
    summary.add({r.min_eigenvalue, r.trace, flag(r.psd)});
    return {gram, summary};
}

Tables fourier_isometry(const Args& args) {
    const SigmaFiniteMeasure mu = args.measure();
    const GaussianNoiseField field(mu, args.count("J"));
    const std::vector<BorelSet> family = parse_family(args, mu);
    const std::vector<double> a = args.list("a");
    const IsometryCheck check = fourier_map_isometry_check(field, family, a, args.mc());
    Table t{"isometry", {"rkhs_norm", "mc_norm", "stderr", "brackets"}, {}};
    t.add({check.rkhs_norm, check.mc_norm.mean, check.mc_norm.standard_error, flag(check.mc_norm.brackets(check.rkhs_norm))});
    return {t};
}

Tables fbm_variance(const Args& args) {
    const double H = args.number("H");
    Table t{"fbm", {"t", "V", "t_pow_2H", "abs_error"}, {}};
    for (double x : args.list("t")) {
        const double v = fbm_increment_variance(H, x);
        const double target = std::pow(x, 2.0 * H);
        t.add({x, v, target, std::abs(v - target)});
    }
    return {t};
}

// ---------------------------------------------------------------------------
// Registry

struct Flag {
    std::string name;
    std::string fallback;
    std::string help;
};

struct Subcommand {
    std::string name;
    std::string help;
    std::vector<Flag> flags;
    std::function<Tables(const Args&)> run;
};

const std::vector<Subcommand>& registry() {
    static const std::vector<Subcommand> commands = {
        {"sample-path", "W_(lo,t] along one sample of the noise",
         {{"measure", "lebesgue:0,1", "measure descriptor"}, {"J", "0", "truncation (0 = basis default)"},
          {"points", "100", "path points"}, {"sample", "0", "sample index within the seed"}},
         sample_path},
        {"covariance", "Monte Carlo E[W_A W_B] against mu(A∩B)",
         {{"measure", "lebesgue:0,1", "measure descriptor"}, {"A", "0,0.6", "set A"}, {"B", "0.4,1", "set B"},
          {"N", "100000", "samples"}, {"J", "0", "truncation"}},
         covariance},
        {"ito-isometry", "Monte Carlo E[W(f)W(g)] against <f,g>",
         {{"measure", "lebesgue:0,1", "measure descriptor"}, {"f", "0,1", "polynomial coefficients of f"},
          {"g", "", "polynomial coefficients of g (defaults to f)"}, {"N", "100000", "samples"}, {"J", "0", "truncation"}},
         ito_isometry},
        {"sigma-inner", "inner product of two sigma-functions",
         {{"f1", "1", "polynomial f1"}, {"mu1", "lebesgue:0,1", "measure of f1"},
          {"f2", "1", "polynomial f2"}, {"mu2", "lebesgue:0,1", "measure of f2"}},
         sigma_inner},
        {"equivalence", "equivalence test and per-sample lift difference",
         {{"f1", "1", "polynomial f1"}, {"mu1", "lebesgue:0,1", "measure of f1"},
          {"f2", "0.7071067811865476", "polynomial f2"}, {"mu2", "lebesgue:0,1*2", "measure of f2"},
          {"samples", "100", "samples of xi"}, {"J", "0", "truncation"}},
         equivalence},
        {"ifs-moments", "moments of the invariant measure",
         {{"ifs", "cantor", "ifs descriptor"}, {"degree", "4", "highest moment"}}, ifs_moments},
        {"cuntz-check", "residuals of the Cuntz relations",
         {{"ifs", "cantor", "ifs descriptor"}, {"depth", "8", "coefficient depth"}, {"basis", "cylinder", "cylinder or walsh"}},
         cuntz_check},
        {"bernoulli-density", "histogram and Fourier-inversion density",
         {{"lambda", "0.5", "contraction"}, {"N", "1000000", "samples"}, {"h", "0.01", "bin width"},
          {"T", "200", "inversion window"}, {"points", "201", "grid points"}},
         bernoulli_density},
        {"bernoulli-scaling", "residual of the scaling identity",
         {{"lambda", "0.5", "contraction"}, {"N", "1000000", "samples"}, {"h", "0.01", "bin width"},
          {"probe", "0.6666666666666666", "factor applied to the constant in the probe"}},
         bernoulli_scaling},
        {"ac2-proxy", "truncated L2 proxy of the Fourier transform",
         {{"lambda", "0.5", "contraction"}, {"T", "25,50,100,200", "windows"}}, ac2_proxy},
        {"boundary-embed", "embedding distances against the kernel metric",
         {{"kernel", "brownian", "brownian or szego"}, {"points", "16", "sample points"}, {"J", "0", "features"}},
         boundary_embed},
        {"szego-check", "boundary integral against the closed form",
         {{"nodes", "2048", "trapezoid nodes"},
          {"pairs", "0,0:0,0;0.5,0:0.5,0;0.5,0:0,-0.5;0.9,0:0.9,0;-0.3,0.4:0.6,-0.2", "z:w pairs"}},
         szego_check},
        {"julia-kernel", "membership and kernel Gram for R(z)=z^4-2z^2",
         {{"points", "0,0;2,0;1,0;0.1,0;0.2,0.1;-0.15,0.05;0.05,-0.2", "points re,im separated by ;"},
          {"terms", "64", "product factors"}},
         julia},
        {"set-kernel", "exponential set-kernel Gram",
         {{"measure", "lebesgue:0,1", "measure descriptor"}, {"sets", "0,0.5|0.5,1|0,0.25|0,1", "sets separated by |"}},
         set_kernel},
        {"fourier-isometry", "RKHS norm against Monte Carlo norm of the Fourier map",
         {{"measure", "atomic:0@1;1@1", "measure descriptor"}, {"sets", "-0.5,0.5|0.5,1.5", "sets separated by |"},
          {"a", "1,-1", "coefficients"}, {"N", "100000", "samples"}, {"J", "0", "truncation"}},
         fourier_isometry},
        {"fbm-variance", "fractional Brownian increment variance",
         {{"H", "0.5", "Hurst index"}, {"t", "0.5,1,2,4", "times"}}, fbm_variance},
    };
    return commands;
}

const Subcommand& find(const std::string& name) {
    for (const Subcommand& s : registry()) {
        if (s.name == name) return s;
    }
    throw UsageError("unknown subcommand '" + name + "'");
}

void validate(const ExperimentDescriptor& d) {
    const Args args(d);
    if (d.options.contains("N")) {
        const std::size_t N = args.count("N");
        if (N < 100 || N > 100000000) throw UsageError("--N: must lie in [100, 1e8], got " + d.options.at("N"));
    }
    if (d.options.contains("J")) {
        if (args.count("J") > 1000000) throw UsageError("--J: must lie in [0, 1e6]");
    }
    if (d.workers < 1 || d.workers > 256) throw UsageError("--workers: must lie in [1, 256]");
    if (d.format != "csv" && d.format != "json") throw UsageError("--format: expected csv or json");
}

std::string error_record(const std::string& kind, const std::string& subcommand, const std::string& message) {
    return json{{"error", kind}, {"subcommand", subcommand}, {"message", message}}.dump();
}

}  // namespace

std::string ExperimentDescriptor::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["options"] = options;
    j["seed"] = seed;
    j["format"] = format;
    return j.dump();
}

std::vector<std::string> subcommands() {
    std::vector<std::string> out;
    for (const Subcommand& s : registry()) out.push_back(s.name);
    return out;
}

ExperimentDescriptor parse(const std::vector<std::string>& arguments) {
    CLI::App app{"Gaussian noise on sigma-finite measures"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");
    ExperimentDescriptor d;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::string seed = "1", workers = "1";
    for (const Subcommand& s : registry()) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->set_help_flag("--help", "print this help");
        auto& v = values[s.name];
        for (const Flag& f : s.flags) {
            v[f.name] = f.fallback;
            sub->add_option("--" + f.name, v[f.name], f.help)->capture_default_str();
        }
        sub->add_option("--seed", seed, "stream seed")->capture_default_str();
        sub->add_option("--workers", workers, "Monte Carlo worker threads")->capture_default_str();
        sub->add_option("--output", d.output, "output file");
        sub->add_option("--format", d.format, "csv or json")->capture_default_str();
    }
    std::vector<std::string> reversed(arguments.rbegin(), arguments.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (const CLI::App* sub : app.get_subcommands()) d.subcommand = sub->get_name();
    d.options = values.at(d.subcommand);
    d.seed = Args::parse_count(seed, "seed");
    d.workers = Args::parse_count(workers, "workers");
    validate(d);
    return d;
}

int execute(const ExperimentDescriptor& descriptor, std::ostream& out, std::ostream& err) {
    Tables tables;
    try {
        tables = find(descriptor.subcommand).run(Args(descriptor));
    } catch (const NumericError& e) {
        err << error_record("numeric", descriptor.subcommand, e.what()) << '\n';
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        err << error_record("usage", descriptor.subcommand, e.what()) << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << error_record("numeric", descriptor.subcommand, e.what()) << '\n';
        return kNumeric;
    }

    std::ostringstream body;
    const std::string text = descriptor.to_json();
    if (descriptor.format == "json") {
        write_json(body, text, tables);
    } else {
        write_csv(body, text, tables);
    }

    std::filesystem::path path = descriptor.output;
    const char* dir = std::getenv("SIGMANOISE_OUTPUT_DIR");
    if (path.empty() && dir && *dir) path = descriptor.subcommand + "." + descriptor.format;
    if (path.empty()) {
        out << body.str();
        return kOk;
    }
    if (path.is_relative() && dir && *dir) path = std::filesystem::path(dir) / path;
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        err << error_record("io", descriptor.subcommand, "cannot open " + path.string()) << '\n';
        return kUsage;
    }
    file << body.str();
    out << path.string() << '\n';
    return kOk;
}

int run(const std::vector<std::string>& arguments, std::ostream& out, std::ostream& err) {
    ExperimentDescriptor d;
    try {
        d = parse(arguments);
    } catch (const UsageError& e) {
        const std::string message = e.what();
        // Help text is a usage "error" with nothing failing.
        const bool help = std::find(arguments.begin(), arguments.end(), "--help") != arguments.end();
        if (help) {
            out << message;
            return kOk;
        }
        err << error_record("usage", arguments.empty() ? "" : arguments.front(), message) << '\n';
        return kUsage;
    }
    return execute(d, out, err);
}

}  // namespace sigmanoise::cli
