#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "svf/compact_set.hpp"
#include "svf/dimension.hpp"
#include "svf/error.hpp"
#include "svf/fractal.hpp"
#include "svf/set_valued_map.hpp"

namespace svf {

inline constexpr std::size_t default_cloud_budget = 8'000'000;

/// Finite sample of the classical plane graph {(u, y) : y in F(u)}.
struct PlaneCloud {
    std::vector<std::array<double, 2>> pts;
    int grid_n = 0;
    double set_spacing = 0.0;
};

enum class CloudMetric { graph_sum, pair_sum };

/// Finite sample of the pair graph {(u, F(u))}. graph_sum uses
/// |u - w| + H_d(A, B); pair_sum uses |u - w| + H_d(A + R(w), B + R(u))
/// with reference values R from an attached grid function.
struct GraphCloud {
    std::vector<std::pair<double, CompactSet>> pts;
    CloudMetric metric = CloudMetric::graph_sum;
    std::shared_ptr<const GridFunction> reference;
};

/// Samples every value set of F at `set_spacing`, interval endpoints and
/// midpoints always included.
inline PlaneCloud standard_graph_cloud(const SetValuedMap& f, int grid_n, double set_spacing,
                                       std::size_t budget = default_cloud_budget) {
    if (grid_n < 2) throw error("standard_graph_cloud: grid_n must be >= 2");
    if (!(set_spacing > 0.0)) throw error("standard_graph_cloud: spacing must be positive");
    PlaneCloud cloud;
    cloud.grid_n = grid_n;
    cloud.set_spacing = set_spacing;
    for (double u : uniform_grid(f.domain, grid_n)) {
        const CompactSet value = f(u);
        for (const auto& part : value.parts()) {
            const int n = static_cast<int>(std::ceil(part.length() / set_spacing));
            if (cloud.pts.size() + static_cast<std::size_t>(n) + 3 > budget)
                throw capacity_error("standard_graph_cloud: point budget exceeded");
            cloud.pts.push_back({u, part.lo});
            for (int k = 1; k < n; ++k)
                cloud.pts.push_back({u, part.lo + part.length() * k / n});
            if (part.length() > 0.0) {
                cloud.pts.push_back({u, part.mid()});
                cloud.pts.push_back({u, part.hi});
            }
        }
    }
    return cloud;
}

inline GraphCloud new_graph_cloud(const SetValuedMap& f, int grid_n) {
    GraphCloud cloud;
    cloud.metric = CloudMetric::graph_sum;
    for (double u : uniform_grid(f.domain, grid_n)) cloud.pts.push_back({u, f(u)});
    return cloud;
}

/// |u - w| + H_d(F(u), F(w)).
inline double dg_distance(const std::pair<double, CompactSet>& p,
                          const std::pair<double, CompactSet>& q) {
    return std::abs(p.first - q.first) + hausdorff(p.second, q.second);
}

/// |u - w| + H_d(A + R(w), B + R(u)) with R the attached fractal values;
/// u and w must be grid points of `ref`. Convex sets only: the metric
/// identities rely on Minkowski cancellation.
inline double frak_distance(const std::pair<double, CompactSet>& p,
                            const std::pair<double, CompactSet>& q, const GridFunction& ref) {
    if (!p.second.is_convex() || !q.second.is_convex())
        throw convexity_error("frak_distance requires convex sets");
    const CompactSet& ru = ref.at(p.first);
    const CompactSet& rw = ref.at(q.first);
    return std::abs(p.first - q.first) +
           hausdorff(minkowski_add(p.second, rw), minkowski_add(q.second, ru));
}

namespace detail {
/// pair_sum distance with reference values resolved to the nearest grid
/// point (cloud positions drift off-grid after branch maps and pruning).
inline double frak_distance_nearest(const std::pair<double, CompactSet>& p,
                                    const std::pair<double, CompactSet>& q,
                                    const GridFunction& ref) {
    const CompactSet& ru = ref.entries[ref.nearest(p.first)].value;
    const CompactSet& rw = ref.entries[ref.nearest(q.first)].value;
    return std::abs(p.first - q.first) +
           hausdorff(minkowski_add(p.second, rw), minkowski_add(q.second, ru));
}

inline double cloud_point_distance(const GraphCloud& cloud,
                                   const std::pair<double, CompactSet>& p,
                                   const std::pair<double, CompactSet>& q) {
    if (cloud.metric == CloudMetric::graph_sum) return dg_distance(p, q);
    if (!cloud.reference) throw error("pair_sum cloud without reference grid");
    return frak_distance_nearest(p, q, *cloud.reference);
}
} // namespace detail

/// Size of a greedy eta-net of the cloud under its metric: scan points in
/// stored order, keep a point as a new center unless it lies within eta/2
/// of an existing center. Centers are pairwise > eta/2 apart and cover the
/// cloud with radius-eta/2 balls, so the result brackets the true covering
/// number between N_eta and N_{eta/2}.
inline int net_cover_count(const GraphCloud& cloud, double eta) {
    if (!(eta > 0.0)) throw error("net_cover_count: eta must be positive");
    std::vector<std::size_t> centers;
    for (std::size_t i = 0; i < cloud.pts.size(); ++i) {
        bool covered = false;
        for (std::size_t c : centers) {
            // Cheap reject: both metrics dominate the |u - w| term.
            if (std::abs(cloud.pts[i].first - cloud.pts[c].first) > eta / 2) continue;
            if (detail::cloud_point_distance(cloud, cloud.pts[i], cloud.pts[c]) <= eta / 2) {
                covered = true;
                break;
            }
        }
        if (!covered) centers.push_back(i);
    }
    return static_cast<int>(centers.size());
}

namespace detail {
inline long ceil_with_tolerance(double x) {
    return static_cast<long>(std::ceil(x - 1e-9));
}
} // namespace detail

/// Number of cells of the axis-aligned eta-mesh (anchored at the cloud's
/// bounding box corner) containing at least one point. Points on the top
/// edges fold into the last cell.
inline long grid_box_count(const PlaneCloud& cloud, double eta) {
    if (!(eta > 0.0)) throw error("grid_box_count: eta must be positive");
    if (cloud.pts.empty()) return 0;
    double umin = cloud.pts.front()[0], umax = umin;
    double ymin = cloud.pts.front()[1], ymax = ymin;
    for (const auto& p : cloud.pts) {
        umin = std::min(umin, p[0]);
        umax = std::max(umax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    const long mu = std::max(1L, detail::ceil_with_tolerance((umax - umin) / eta));
    const long my = std::max(1L, detail::ceil_with_tolerance((ymax - ymin) / eta));
    std::unordered_set<std::int64_t> cells;
    cells.reserve(cloud.pts.size() / 4 + 16);
    for (const auto& p : cloud.pts) {
        const long i = std::clamp(static_cast<long>(std::floor((p[0] - umin) / eta)), 0L, mu - 1);
        const long j = std::clamp(static_cast<long>(std::floor((p[1] - ymin) / eta)), 0L, my - 1);
        cells.insert(static_cast<std::int64_t>(i) * my + j);
    }
    return static_cast<long>(cells.size());
}

/// Column bracket for the plane-graph box count at mesh width eta:
///   (1/eta) sum_i R[W_i]  <=  N_eta  <=  2m + (1/eta) sum_i R[W_i]
/// where R[W] is the maximum spread of F over the column W, estimated from
/// 16 interior samples plus the column endpoints.
struct RangeSumBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> column_ranges;
    long columns = 0;
};

inline RangeSumBounds range_sum_bounds(const SetValuedMap& f, double eta,
                                       int samples_per_column = 16) {
    const double len = f.domain.length();
    if (!(eta > 0.0 && eta < len)) throw error("range_sum_bounds: need 0 < eta < |I|");
    RangeSumBounds out;
    out.columns = detail::ceil_with_tolerance(len / eta);
    double acc = 0.0;
    for (long i = 0; i < out.columns; ++i) {
        const double x0 = f.domain.lo + static_cast<double>(i) * eta;
        const double x1 = std::min(x0 + eta, f.domain.hi);
        double top = -std::numeric_limits<double>::infinity();
        double bot = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= samples_per_column + 1; ++k) {
            const double x =
                std::min(x0 + (x1 - x0) * k / (samples_per_column + 1), f.domain.hi);
            const CompactSet v = f(x);
            top = std::max(top, v.max());
            bot = std::min(bot, v.min());
        }
        const double range = top - bot;
        out.column_ranges.push_back(range);
        acc += range;
    }
    out.lower = acc / eta;
    out.upper = 2.0 * static_cast<double>(out.columns) + out.lower;
    return out;
}

/// Largest adjacent-pair slope H_d(F(u), F(w)) / |u - w| over a uniform grid.
inline double lipschitz_estimate(const SetValuedMap& f, int grid_n) {
    const auto us = uniform_grid(f.domain, grid_n);
    double best = 0.0;
    CompactSet prev = f(us.front());
    for (std::size_t i = 1; i < us.size(); ++i) {
        CompactSet cur = f(us[i]);
        best = std::max(best, hausdorff(cur, prev) / (us[i] - us[i - 1]));
        prev = std::move(cur);
    }
    return best;
}

/// Branch system on pair space: the j-th branch sends (u, A) to
/// (L_j(u), alpha A + F(L_j(u)) - alpha S(u)). The sampled fractal grid
/// provides the reference values that make each branch contractive.
struct IFSSystem {
    FractalSystem system;
    std::shared_ptr<const GridFunction> attractor;
};

inline IFSSystem make_ifs(FractalSystem sys, int depth, double tol = 1e-9) {
    auto grid = std::make_shared<GridFunction>(evaluate_fractal(sys, depth, tol));
    return IFSSystem{std::move(sys), std::move(grid)};
}

inline MoranBounds dim_bounds(const IFSSystem& ifs) { return dim_bounds(ifs.system); }

inline std::pair<double, CompactSet> w_apply(const IFSSystem& ifs, int j,
                                             const std::pair<double, CompactSet>& p) {
    const auto& sys = ifs.system;
    if (j < 0 || j >= sys.maps.count()) throw error("w_apply: branch index out of range");
    const double image_u = sys.maps.apply(j, p.first);
    CompactSet value = minkowski_add(
        minkowski_add(scale(sys.alpha, p.second), sys.f(image_u)),
        scale(-sys.alpha, sys.s(p.first)));
    return {image_u, std::move(value)};
}

/// The attractor sample (u, value) over the stored grid.
inline GraphCloud sampled_attractor_cloud(const IFSSystem& ifs) {
    GraphCloud cloud;
    cloud.metric = CloudMetric::pair_sum;
    cloud.reference = ifs.attractor;
    for (const auto& e : ifs.attractor->entries) cloud.pts.push_back({e.u, e.value});
    return cloud;
}

/// One deterministic step of the branch iteration: apply every branch to
/// every pair, then keep one pair per u-cell of width delta_prune (first in
/// (u, set) order) to cap growth.
inline GraphCloud hutchinson_step(const IFSSystem& ifs, const GraphCloud& cloud,
                                  double delta_prune,
                                  std::size_t budget = default_cloud_budget) {
    if (!(delta_prune > 0.0)) throw error("hutchinson_step: delta_prune must be positive");
    const auto& sys = ifs.system;
    std::vector<std::pair<double, CompactSet>> next;
    if (cloud.pts.size() * static_cast<std::size_t>(sys.maps.count()) > budget)
        throw capacity_error("hutchinson_step: cloud budget exceeded");
    next.reserve(cloud.pts.size() * static_cast<std::size_t>(sys.maps.count()));
    for (const auto& p : cloud.pts)
        for (int j = 0; j < sys.maps.count(); ++j) next.push_back(w_apply(ifs, j, p));

    std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second.min() < y.second.min();
    });
    GraphCloud out;
    out.metric = CloudMetric::pair_sum;
    out.reference = cloud.reference ? cloud.reference : ifs.attractor;
    const double u1 = sys.partition.lo();
    long last_cell = std::numeric_limits<long>::min();
    for (auto& q : next) {
        const long cell = static_cast<long>(std::floor((q.first - u1) / delta_prune));
        if (cell != last_cell) {
            out.pts.push_back(std::move(q));
            last_cell = cell;
        }
    }
    return out;
}

inline GraphCloud ifs_iterate(const IFSSystem& ifs, GraphCloud cloud, int steps,
                              double delta_prune, std::size_t budget = default_cloud_budget) {
    if (steps < 1) throw error("ifs_iterate: steps must be >= 1");
    for (int k = 0; k < steps; ++k) cloud = hutchinson_step(ifs, cloud, delta_prune, budget);
    return cloud;
}

/// Symmetric Hausdorff distance between two clouds under the pair-sum
/// metric, references resolved to nearest grid points. The |u - w| term
/// bounds the metric from below, which drives the scan window.
inline double cloud_distance(const GraphCloud& x, const GraphCloud& y, const GridFunction& ref) {
    auto directed = [&](const GraphCloud& from, const GraphCloud& to) {
        // `to` sorted by u for windowed nearest scans.
        std::vector<std::size_t> order(to.pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return to.pts[a].first < to.pts[b].first; });
        std::vector<double> us;
        us.reserve(order.size());
        for (std::size_t i : order) us.push_back(to.pts[i].first);

        double worst = 0.0;
        for (const auto& p : from.pts) {
            auto it = std::lower_bound(us.begin(), us.end(), p.first);
            const long pos = it - us.begin();
            double best = std::numeric_limits<double>::infinity();
            for (long step = 0;; ++step) {
                bool advanced = false;
                const long right = pos + step;
                const long left = pos - 1 - step;
                if (right < static_cast<long>(us.size()) &&
                    std::abs(us[static_cast<std::size_t>(right)] - p.first) < best) {
                    best = std::min(best, detail::frak_distance_nearest(
                                              p, to.pts[order[static_cast<std::size_t>(right)]], ref));
                    advanced = true;
                }
                if (left >= 0 && std::abs(us[static_cast<std::size_t>(left)] - p.first) < best) {
                    best = std::min(best, detail::frak_distance_nearest(
                                              p, to.pts[order[static_cast<std::size_t>(left)]], ref));
                    advanced = true;
                }
                if (!advanced) break;
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(x, y), directed(y, x));
}

} // namespace svf
