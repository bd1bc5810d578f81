#include "sigmanoise/descriptors.hpp"

#include <json.hpp>

#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmanoise {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) return out;
        s.remove_prefix(pos + 1);
    }
}

double number(std::string_view s, std::string_view what) {
    s = trim(s);
    if (s == "inf" || s == "+inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("malformed number '" + std::string(s) + "' in " + std::string(what));
    }
    return v;
}

std::pair<double, double> pair_of(std::string_view s, std::string_view what) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw std::invalid_argument("expected 'a,b' in " + std::string(what));
    return {number(parts[0], what), number(parts[1], what)};
}

IteratedFunctionSystem ifs_from_json(const json& j) {
    if (!j.contains("branches") || !j.contains("weights")) {
        throw std::invalid_argument("ifs descriptor needs 'branches' and 'weights'");
    }
    std::vector<AffineBranch> branches;
    for (const json& b : j.at("branches")) {
        if (!b.is_array() || b.size() != 2) throw std::invalid_argument("ifs branch must be [ratio, shift]");
        branches.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    return IteratedFunctionSystem::make(std::move(branches), j.at("weights").get<std::vector<double>>());
}

SigmaFiniteMeasure measure_from_json(const json& j) {
    const std::string kind = j.value("kind", "");
    const double scale = j.value("scale", 1.0);
    SigmaFiniteMeasure mu = [&]() -> SigmaFiniteMeasure {
        if (kind == "lebesgue") return SigmaFiniteMeasure::lebesgue(j.at("lo").get<double>(), j.at("hi").get<double>());
        if (kind == "polynomial") {
            return SigmaFiniteMeasure::polynomial_density(j.at("lo").get<double>(), j.at("hi").get<double>(),
                                                          Polynomial(j.at("coefficients").get<std::vector<double>>()));
        }
        if (kind == "atomic") {
            std::vector<Atom> atoms;
            for (const json& a : j.at("atoms")) {
                if (!a.is_array() || a.size() != 2) throw std::invalid_argument("atom must be [point, mass]");
                atoms.push_back({a[0].get<double>(), a[1].get<double>()});
            }
            return SigmaFiniteMeasure::atomic(std::move(atoms));
        }
        if (kind == "ifs") return SigmaFiniteMeasure::ifs_invariant(ifs_from_json(j));
        if (kind == "cantor") return SigmaFiniteMeasure::cantor();
        if (kind == "binary") return SigmaFiniteMeasure::ifs_invariant(IteratedFunctionSystem::binary());
        if (kind == "bernoulli") return SigmaFiniteMeasure::bernoulli(j.at("lambda").get<double>());
        if (kind == "sum") {
            const json& parts = j.at("parts");
            if (!parts.is_array() || parts.empty()) throw std::invalid_argument("sum needs a non-empty 'parts' array");
            SigmaFiniteMeasure total = measure_from_json(parts[0]);
            for (std::size_t i = 1; i < parts.size(); ++i) total = sum_measure(total, measure_from_json(parts[i]));
            return total;
        }
        throw std::invalid_argument("unknown measure kind '" + kind + "'");
    }();
    return scale == 1.0 ? mu : mu.scaled(scale);
}

SigmaFiniteMeasure measure_from_shorthand(std::string_view text) {
    if (const auto plus = text.find('+'); plus != std::string_view::npos) {
        return sum_measure(measure_from_shorthand(trim(text.substr(0, plus))),
                           measure_from_shorthand(trim(text.substr(plus + 1))));
    }
    double scale = 1.0;
    if (const auto star = text.rfind('*'); star != std::string_view::npos) {
        scale = number(text.substr(star + 1), "measure scale");
        text = trim(text.substr(0, star));
    }
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    SigmaFiniteMeasure mu = [&]() -> SigmaFiniteMeasure {
        if (head == "lebesgue") {
            const auto [lo, hi] = pair_of(body, "lebesgue:lo,hi");
            return SigmaFiniteMeasure::lebesgue(lo, hi);
        }
        if (head == "poly") {
            const auto parts = split(body, ';');
            if (parts.size() != 2) throw std::invalid_argument("expected poly:lo,hi;c0,c1,...");
            const auto [lo, hi] = pair_of(parts[0], "poly:lo,hi");
            std::vector<double> coefficients;
            for (std::string_view c : split(parts[1], ',')) coefficients.push_back(number(c, "poly coefficients"));
            return SigmaFiniteMeasure::polynomial_density(lo, hi, Polynomial(std::move(coefficients)));
        }
        if (head == "atomic") {
            std::vector<Atom> atoms;
            for (std::string_view a : split(body, ';')) {
                const auto at = a.find('@');
                if (at == std::string_view::npos) throw std::invalid_argument("expected point@mass in atomic descriptor");
                atoms.push_back({number(a.substr(0, at), "atom point"), number(a.substr(at + 1), "atom mass")});
            }
            return SigmaFiniteMeasure::atomic(std::move(atoms));
        }
        if (head == "cantor") return SigmaFiniteMeasure::cantor();
        if (head == "binary") return SigmaFiniteMeasure::ifs_invariant(IteratedFunctionSystem::binary());
        if (head == "bernoulli") return SigmaFiniteMeasure::bernoulli(number(body, "bernoulli:lambda"));
        throw std::invalid_argument("unknown measure descriptor '" + std::string(text) + "'");
    }();
    return scale == 1.0 ? mu : mu.scaled(scale);
}

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + std::string(what) + ": " + e.what());
    }
}

}  // namespace

SigmaFiniteMeasure parse_measure(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw std::invalid_argument("empty measure descriptor");
    if (text.front() == '{') {
        try {
            return measure_from_json(parse_json(text, "measure"));
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("bad measure JSON: ") + e.what());
        }
    }
    return measure_from_shorthand(text);
}

IteratedFunctionSystem parse_ifs(std::string_view text) {
    text = trim(text);
    if (text == "cantor") return IteratedFunctionSystem::middle_third_cantor();
    if (text == "binary") return IteratedFunctionSystem::binary();
    if (!text.empty() && text.front() == '{') {
        try {
            return ifs_from_json(parse_json(text, "ifs"));
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("bad ifs JSON: ") + e.what());
        }
    }
    throw std::invalid_argument("unknown ifs descriptor '" + std::string(text) + "'");
}

BorelSet parse_set(std::string_view text, const SigmaFiniteMeasure& mu) {
    text = trim(text);
    if (text == "all") return BorelSet::real_line();
    if (text.starts_with("cyl:")) {
        const IteratedFunctionSystem* ifs = mu.system();
        if (!ifs) throw std::invalid_argument("cylinder sets need an IFS measure");
        Word word;
        for (char c : text.substr(4)) {
            if (c < '0' || c > '9' || static_cast<std::size_t>(c - '0') >= ifs->size()) {
                throw std::invalid_argument("bad cylinder digit '" + std::string(1, c) + "'");
            }
            word.push_back(c - '0');
        }
        return cylinder_set(*ifs, word);
    }
    std::vector<Interval> pieces;
    for (std::string_view piece : split(text, ';')) {
        const auto [lo, hi] = pair_of(piece, "set");
        if (!(lo < hi)) throw std::invalid_argument("set interval needs lo < hi");
        pieces.push_back({lo, hi});
    }
    return BorelSet::from_intervals(std::move(pieces));
}

}  // namespace sigmanoise
