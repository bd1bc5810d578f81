#include "sigmanoise/borel_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sigmanoise {

BorelSet BorelSet::interval(double lo, double hi) { return from_intervals({Interval{lo, hi}}); }

BorelSet BorelSet::from_intervals(std::vector<Interval> pieces) {
    for (const Interval& piece : pieces) {
        if (std::isnan(piece.lo) || std::isnan(piece.hi) || !(piece.lo < piece.hi)) {
            throw std::invalid_argument("BorelSet: interval endpoints must satisfy lo < hi");
        }
    }
    std::sort(pieces.begin(), pieces.end());
    BorelSet out;
    for (const Interval& piece : pieces) {
        if (!out.pieces_.empty() && piece.lo <= out.pieces_.back().hi) {
            out.pieces_.back().hi = std::max(out.pieces_.back().hi, piece.hi);
        } else {
            out.pieces_.push_back(piece);
        }
    }
    return out;
}

BorelSet BorelSet::cylinder(Interval image, CylinderTag tag) {
    BorelSet out = from_intervals({image});
    out.cylinder_ = std::move(tag);
    return out;
}

BorelSet BorelSet::real_line() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return interval(-inf, inf);
}

bool BorelSet::bounded() const noexcept {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Interval& p) {
        return std::isfinite(p.lo) && std::isfinite(p.hi);
    });
}

bool BorelSet::contains(double x) const noexcept {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Interval& p) { return v <= p.hi; });
    // `it` is the first interval with hi >= x.
    return it != pieces_.end() && it->contains(x);
}

double BorelSet::lebesgue_length() const noexcept {
    double total = 0.0;
    for (const Interval& p : pieces_) total += p.length();
    return total;
}

Interval BorelSet::hull() const {
    if (pieces_.empty()) {
        throw std::invalid_argument("BorelSet::hull: empty set");
    }
    return Interval{pieces_.front().lo, pieces_.back().hi};
}

BorelSet BorelSet::intersect(const BorelSet& other) const {
    std::vector<Interval> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < pieces_.size() && j < other.pieces_.size()) {
        const double lo = std::max(pieces_[i].lo, other.pieces_[j].lo);
        const double hi = std::min(pieces_[i].hi, other.pieces_[j].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (pieces_[i].hi < other.pieces_[j].hi) {
            ++i;
        } else {
            ++j;
        }
    }
    BorelSet result;
    result.pieces_ = std::move(out);
    return result;
}

BorelSet BorelSet::unite(const BorelSet& other) const {
    std::vector<Interval> all(pieces_.begin(), pieces_.end());
    all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
    if (all.empty()) return {};
    return from_intervals(std::move(all));
}

BorelSet BorelSet::subtract(const BorelSet& other) const {
    std::vector<Interval> out;
    for (Interval piece : pieces_) {
        double cursor = piece.lo;
        for (const Interval& cut : other.pieces_) {
            if (cut.hi <= cursor || cut.lo >= piece.hi) continue;
            if (cut.lo > cursor) out.push_back({cursor, cut.lo});
            cursor = std::max(cursor, cut.hi);
            if (cursor >= piece.hi) break;
        }
        if (cursor < piece.hi) out.push_back({cursor, piece.hi});
    }
    BorelSet result;
    result.pieces_ = std::move(out);
    return result;
}

BorelSet BorelSet::affine_image(double r, double s) const {
    if (r == 0.0 || !std::isfinite(r)) {
        throw std::invalid_argument("BorelSet::affine_image: ratio must be finite and non-zero");
    }
    std::vector<Interval> out;
    for (const Interval& p : pieces_) {
        const double a = r * p.lo + s;
        const double b = r * p.hi + s;
        out.push_back(r > 0 ? Interval{a, b} : Interval{b, a});
    }
    if (out.empty()) return {};
    return from_intervals(std::move(out));
}

std::string BorelSet::to_string() const {
    if (cylinder_) {
        std::string word;
        for (int d : cylinder_->word) word += std::to_string(d);
        return "cyl:" + word;
    }
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (i) os << ';';
        os << pieces_[i].lo << ',' << pieces_[i].hi;
    }
    return os.str();
}

}  // namespace sigmanoise
