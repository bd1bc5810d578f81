#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigmanoise {

/// Half-open interval (lo, hi] with lo < hi. Endpoints may be ±∞.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo < x && x <= hi; }
    auto operator<=>(const Interval&) const = default;
};

/// Symbolic cylinder: the image τ_{w1}∘…∘τ_{wn}(hull) of one specific IFS.
struct CylinderTag {
    std::string system_key;
    std::vector<int> word;
    auto operator<=>(const CylinderTag&) const = default;
};

/// Finite union of disjoint half-open intervals, kept sorted and merged.
class BorelSet {
public:
    BorelSet() = default;

    static BorelSet interval(double lo, double hi);
    static BorelSet from_intervals(std::vector<Interval> pieces);
    /// A cylinder set; `image` must be the exact image of the hull under the word.
    static BorelSet cylinder(Interval image, CylinderTag tag);
    static BorelSet real_line();

    std::span<const Interval> intervals() const noexcept { return pieces_; }
    const std::optional<CylinderTag>& cylinder_tag() const noexcept { return cylinder_; }

    bool empty() const noexcept { return pieces_.empty(); }
    bool bounded() const noexcept;
    bool contains(double x) const noexcept;
    double lebesgue_length() const noexcept;
    /// Smallest interval containing the set; requires non-empty.
    Interval hull() const;

    BorelSet intersect(const BorelSet& other) const;
    BorelSet unite(const BorelSet& other) const;
    BorelSet subtract(const BorelSet& other) const;
    bool disjoint(const BorelSet& other) const { return intersect(other).empty(); }

    /// Image under x ↦ r·x + s (r ≠ 0). For r < 0 each (a, b] maps to (r·b+s, r·a+s];
    /// the flipped endpoint convention only matters for measures with atoms.
    BorelSet affine_image(double r, double s) const;

    std::string to_string() const;

    bool operator==(const BorelSet& other) const { return pieces_ == other.pieces_; }
    bool operator<(const BorelSet& other) const { return pieces_ < other.pieces_; }

private:
    std::vector<Interval> pieces_;
    std::optional<CylinderTag> cylinder_;
};

}  // namespace sigmanoise
