#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svf/error.hpp"

namespace svf {

/// Closed real interval [lo, hi]. A singleton has lo == hi.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Gap tolerance used when canonicalizing interval unions: two intervals
/// separated by a gap <= tau are merged into one.
inline constexpr double default_tau_merge = 1e-12;

/// Cap on the number of intervals a single set may hold.
inline constexpr std::size_t default_part_budget = 4096;

/// Nonempty compact subset of the reals, stored as a finite union of
/// disjoint closed intervals sorted by left endpoint. Instances are
/// immutable once built; every operation returns a new canonical set.
class CompactSet {
public:
    /// Default-constructs the singleton {0}.
    CompactSet() : parts_{Interval{0.0, 0.0}} {}

    static CompactSet point(double x) { return CompactSet({Interval{x, x}}); }

    static CompactSet interval(double lo, double hi) {
        if (!(lo <= hi)) throw error("CompactSet::interval: lo > hi");
        return CompactSet({Interval{lo, hi}});
    }

    const std::vector<Interval>& parts() const { return parts_; }
    std::size_t part_count() const { return parts_.size(); }

    bool is_convex() const { return parts_.size() == 1; }
    bool is_singleton() const { return parts_.size() == 1 && parts_[0].lo == parts_[0].hi; }

    double min() const { return parts_.front().lo; }
    double max() const { return parts_.back().hi; }

    Interval hull() const { return Interval{min(), max()}; }

    bool contains(double x) const;

    friend bool operator==(const CompactSet&, const CompactSet&) = default;

    /// Assumes `canonical` already satisfies the class invariants.
    static CompactSet from_canonical(std::vector<Interval> canonical) {
        return CompactSet(std::move(canonical));
    }

private:
    explicit CompactSet(std::vector<Interval> canonical) : parts_(std::move(canonical)) {}

    std::vector<Interval> parts_;
};

/// Sorts, merges overlapping intervals, and closes gaps <= tau. Throws
/// empty_set_error on empty input and capacity_error past the part budget.
inline CompactSet canonicalize(std::vector<Interval> raw,
                               double tau = default_tau_merge,
                               std::size_t budget = default_part_budget) {
    if (raw.empty()) throw empty_set_error("canonicalize: empty interval list");
    if (tau < 0.0) throw error("canonicalize: negative merge tolerance");
    for (const auto& iv : raw) {
        if (!(iv.lo <= iv.hi)) throw error("canonicalize: interval with lo > hi");
    }
    std::sort(raw.begin(), raw.end(), [](const Interval& x, const Interval& y) {
        return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
    });
    std::vector<Interval> out;
    out.reserve(raw.size());
    out.push_back(raw.front());
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i].lo <= out.back().hi + tau) {
            out.back().hi = std::max(out.back().hi, raw[i].hi);
        } else {
            out.push_back(raw[i]);
        }
    }
    if (out.size() > budget) {
        throw capacity_error("canonicalize: set has " + std::to_string(out.size()) +
                             " parts, budget is " + std::to_string(budget));
    }
    return CompactSet::from_canonical(std::move(out));
}

inline bool CompactSet::contains(double x) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == parts_.begin()) return false;
    return x <= (it - 1)->hi;
}

/// Minkowski sum {a + b : a in A, b in B}.
inline CompactSet minkowski_add(const CompactSet& a, const CompactSet& b,
                                double tau = default_tau_merge) {
    std::vector<Interval> raw;
    raw.reserve(a.part_count() * b.part_count());
    for (const auto& p : a.parts())
        for (const auto& q : b.parts())
            raw.push_back(Interval{p.lo + q.lo, p.hi + q.hi});
    return canonicalize(std::move(raw), tau);
}

/// Pointwise scaling {lambda * a : a in A}. lambda = 0 collapses to {0}.
inline CompactSet scale(double lambda, const CompactSet& a) {
    if (lambda == 0.0) return CompactSet::point(0.0);
    std::vector<Interval> raw;
    raw.reserve(a.part_count());
    if (lambda > 0.0) {
        for (const auto& p : a.parts()) raw.push_back(Interval{lambda * p.lo, lambda * p.hi});
    } else {
        for (auto it = a.parts().rbegin(); it != a.parts().rend(); ++it)
            raw.push_back(Interval{lambda * it->hi, lambda * it->lo});
    }
    // Scaling preserves disjointness and order; gaps scale by |lambda|.
    return CompactSet::from_canonical(std::move(raw));
}

/// Minkowski difference A + (-1)B. Note A - A is not {0} unless A is a
/// singleton; it is the symmetric set {a - a' : a, a' in A}.
inline CompactSet minkowski_sub(const CompactSet& a, const CompactSet& b,
                                double tau = default_tau_merge) {
    return minkowski_add(a, scale(-1.0, b), tau);
}

/// Pointwise product {a * b : a in A, b in B}, computed per interval pair
/// from the four endpoint products.
inline CompactSet product(const CompactSet& a, const CompactSet& b,
                          double tau = default_tau_merge) {
    const std::size_t n = a.part_count() * b.part_count();
    if (n > 4'000'000) throw capacity_error("product: too many interval pairs");
    std::vector<Interval> raw;
    raw.reserve(n);
    for (const auto& p : a.parts()) {
        for (const auto& q : b.parts()) {
            const double v1 = p.lo * q.lo, v2 = p.lo * q.hi, v3 = p.hi * q.lo, v4 = p.hi * q.hi;
            raw.push_back(Interval{std::min({v1, v2, v3, v4}), std::max({v1, v2, v3, v4})});
        }
    }
    return canonicalize(std::move(raw), tau);
}

/// Distance from the point x to the set B.
inline double distance_to_set(double x, const CompactSet& b) {
    const auto& ps = b.parts();
    auto it = std::upper_bound(ps.begin(), ps.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    double best = std::numeric_limits<double>::infinity();
    if (it != ps.end()) best = it->lo - x;
    if (it != ps.begin()) {
        const Interval& left = *(it - 1);
        if (x <= left.hi) return 0.0;
        best = std::min(best, x - left.hi);
    }
    return best;
}

/// sup_{a in A} dist(a, B). dist(., B) is piecewise linear with slope +-1,
/// so the sup over A is attained at an endpoint of A or at a gap midpoint
/// of B lying inside A; only those candidates are evaluated.
inline double directed_hausdorff(const CompactSet& a, const CompactSet& b) {
    double best = 0.0;
    for (const auto& p : a.parts()) {
        best = std::max(best, distance_to_set(p.lo, b));
        best = std::max(best, distance_to_set(p.hi, b));
    }
    const auto& qs = b.parts();
    for (std::size_t i = 1; i < qs.size(); ++i) {
        const double g = 0.5 * (qs[i - 1].hi + qs[i].lo);
        if (a.contains(g)) best = std::max(best, distance_to_set(g, b));
    }
    return best;
}

/// Hausdorff distance between two compact interval unions (exact).
inline double hausdorff(const CompactSet& a, const CompactSet& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

/// hausdorff(A, {0}) = max(|min A|, |max A|).
inline double norm(const CompactSet& a) {
    return std::max(std::abs(a.min()), std::abs(a.max()));
}

/// Depth-k middle-thirds pre-Cantor set: 2^k intervals of length 3^-k in [0,1].
inline CompactSet cantor(int depth, std::size_t budget = default_part_budget) {
    if (depth < 0) throw error("cantor: negative depth");
    if (depth >= 63 || (std::size_t{1} << depth) > budget)
        throw capacity_error("cantor: depth " + std::to_string(depth) + " exceeds part budget");
    std::vector<Interval> cur{Interval{0.0, 1.0}};
    for (int k = 0; k < depth; ++k) {
        std::vector<Interval> next;
        next.reserve(cur.size() * 2);
        for (const auto& iv : cur) {
            const double w = iv.length() / 3.0;
            next.push_back(Interval{iv.lo, iv.lo + w});
            next.push_back(Interval{iv.hi - w, iv.hi});
        }
        cur = std::move(next);
    }
    return CompactSet::from_canonical(std::move(cur));
}

/// True iff every point of A lies within distance `slack` of B.
/// slack = 0 is exact containment.
inline bool is_subset(const CompactSet& a, const CompactSet& b, double slack = 0.0) {
    if (slack < 0.0) throw error("is_subset: negative slack");
    // Dilate B by slack and merge touching parts.
    std::vector<Interval> dil;
    dil.reserve(b.part_count());
    for (const auto& q : b.parts()) {
        Interval d{q.lo - slack, q.hi + slack};
        if (!dil.empty() && d.lo <= dil.back().hi) {
            dil.back().hi = std::max(dil.back().hi, d.hi);
        } else {
            dil.push_back(d);
        }
    }
    for (const auto& p : a.parts()) {
        auto it = std::upper_bound(dil.begin(), dil.end(), p.lo,
                                   [](double v, const Interval& iv) { return v < iv.lo; });
        if (it == dil.begin()) return false;
        const Interval& host = *(it - 1);
        if (!(p.lo >= host.lo && p.hi <= host.hi)) return false;
    }
    return true;
}

/// Smallest single interval containing A.
inline CompactSet convex_hull(const CompactSet& a) {
    return CompactSet::interval(a.min(), a.max());
}

namespace detail {
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
} // namespace detail

/// Text form "[lo1,hi1]∪[lo2,hi2]...".
inline std::string to_string(const CompactSet& a) {
    std::string s;
    bool first = true;
    for (const auto& p : a.parts()) {
        if (!first) s += "∪";
        first = false;
        s += "[" + detail::fmt_double(p.lo) + "," + detail::fmt_double(p.hi) + "]";
    }
    return s;
}

/// Parses the text form produced by to_string. Accepts "∪", "U", or "u"
/// between intervals.
inline CompactSet parse_set(std::string_view text) {
    std::vector<Interval> raw;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t open = text.find('[', pos);
        if (open == std::string_view::npos) break;
        const std::size_t comma = text.find(',', open);
        const std::size_t close = text.find(']', open);
        if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
            throw error("parse_set: malformed interval in '" + std::string(text) + "'");
        const std::string lo(text.substr(open + 1, comma - open - 1));
        const std::string hi(text.substr(comma + 1, close - comma - 1));
        raw.push_back(Interval{std::stod(lo), std::stod(hi)});
        pos = close + 1;
    }
    if (raw.empty()) throw error("parse_set: no intervals in '" + std::string(text) + "'");
    return canonicalize(std::move(raw));
}

} // namespace svf
