#pragma once

// Brute-force reference implementations used only by tests. These stay
// deliberately independent of the candidate-point / recursion shortcuts in
// the library: sets are handled as dense sample clouds and distances as
// nearest-sample scans.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "svf/compact_set.hpp"

namespace oracle {

// Dense sample cloud of a set: every part sampled at roughly `spacing`,
// endpoints always included.
inline std::vector<double> sample_set(const svf::CompactSet& a, double spacing) {
    std::vector<double> xs;
    for (const auto& p : a.parts()) {
        xs.push_back(p.lo);
        const int n = static_cast<int>(std::ceil(p.length() / spacing));
        for (int k = 1; k < n; ++k) xs.push_back(p.lo + p.length() * k / n);
        xs.push_back(p.hi);
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

inline double dist_to_samples(double x, const std::vector<double>& ys) {
    auto it = std::lower_bound(ys.begin(), ys.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != ys.end()) best = std::min(best, *it - x);
    if (it != ys.begin()) best = std::min(best, x - *(it - 1));
    return best;
}

// Hausdorff distance via dense sampling of both sets. Accurate to about
// one sample spacing in each direction.
inline double hausdorff_sampled(const svf::CompactSet& a, const svf::CompactSet& b,
                                double spacing) {
    const auto xs = sample_set(a, spacing);
    const auto ys = sample_set(b, spacing);
    double d1 = 0.0, d2 = 0.0;
    for (double x : xs) d1 = std::max(d1, dist_to_samples(x, ys));
    for (double y : ys) d2 = std::max(d2, dist_to_samples(y, xs));
    return std::max(d1, d2);
}

// Checks that `result` agrees with {f(a,b)} computed pointwise over dense
// samples: every sampled value lies in `result` (within tol) and every part
// endpoint of `result` is near a sampled value.
template <typename F>
bool matches_pointwise_op(const svf::CompactSet& a, const svf::CompactSet& b,
                          const svf::CompactSet& result, F&& f,
                          double spacing, double tol) {
    std::vector<double> vals;
    for (double x : sample_set(a, spacing))
        for (double y : sample_set(b, spacing)) vals.push_back(f(x, y));
    std::sort(vals.begin(), vals.end());
    for (double v : vals) {
        if (svf::distance_to_set(v, result) > tol) return false;
    }
    for (const auto& p : result.parts()) {
        if (dist_to_samples(p.lo, vals) > tol) return false;
        if (dist_to_samples(p.hi, vals) > tol) return false;
    }
    return true;
}

// Pre-Cantor set endpoints through integer ternary arithmetic: the depth-k
// intervals are [m/3^k, (m+1)/3^k] for m whose base-3 digits avoid 1.
inline std::vector<svf::Interval> cantor_exact(int depth) {
    std::vector<long> starts{0};
    long scale = 1;
    for (int k = 0; k < depth; ++k) {
        std::vector<long> next;
        for (long s : starts) {
            next.push_back(3 * s);
            next.push_back(3 * s + 2);
        }
        starts = std::move(next);
        scale *= 3;
    }
    std::vector<svf::Interval> out;
    const double denom = static_cast<double>(scale);
    for (long s : starts)
        out.push_back(svf::Interval{static_cast<double>(s) / denom,
                                    static_cast<double>(s + 1) / denom});
    return out;
}

// Random canonical set with 1..max_parts parts inside [-range, range].
inline svf::CompactSet random_set(std::mt19937_64& rng, int max_parts = 4,
                                  double range = 5.0) {
    std::uniform_int_distribution<int> nparts(1, max_parts);
    std::uniform_real_distribution<double> coord(-range, range);
    std::uniform_real_distribution<double> len(0.0, range / 2);
    std::vector<svf::Interval> raw;
    const int n = nparts(rng);
    for (int i = 0; i < n; ++i) {
        const double lo = coord(rng);
        raw.push_back(svf::Interval{lo, lo + len(rng)});
    }
    return svf::canonicalize(std::move(raw));
}

} // namespace oracle
