#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "svf/compact_set.hpp"
#include "svf/error.hpp"
#include "svf/set_valued_map.hpp"

namespace svf {

/// Grid estimate of a function-space metric. The sups and partition sums in
/// these metrics run over uncountable families, so a finite grid always
/// underestimates; is_lower_bound records that.
struct MetricReport {
    double value = 0.0;
    int grid_resolution = 0;
    bool is_lower_bound = true;
};

inline std::vector<double> uniform_grid(Interval dom, int n) {
    if (n < 2) throw error("uniform_grid: need at least 2 points");
    std::vector<double> us(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        us[static_cast<std::size_t>(k)] = dom.lo + (dom.hi - dom.lo) * k / (n - 1);
    us.back() = dom.hi;
    return us;
}

namespace detail {
inline void require_same_domain(const SetValuedMap& f, const SetValuedMap& g) {
    const double eps = 1e-12 * std::max(1.0, std::abs(f.domain.hi - f.domain.lo));
    if (std::abs(f.domain.lo - g.domain.lo) > eps || std::abs(f.domain.hi - g.domain.hi) > eps)
        throw error("maps have different domains");
}

inline std::vector<CompactSet> eval_on(const SetValuedMap& f, const std::vector<double>& us) {
    std::vector<CompactSet> vs;
    vs.reserve(us.size());
    for (double u : us) vs.push_back(f(u));
    return vs;
}
} // namespace detail

/// Grid estimate of sup_u H_d(F(u), G(u)).
inline MetricReport sup_distance(const SetValuedMap& f, const SetValuedMap& g, int grid_n) {
    detail::require_same_domain(f, g);
    const auto us = uniform_grid(f.domain, grid_n);
    double best = 0.0;
    for (double u : us) best = std::max(best, hausdorff(f(u), g(u)));
    return {best, grid_n, true};
}

/// Sum-form Holder seminorm term between two maps over all grid pairs:
/// sup H_d(G(u)+H(w), H(u)+G(w)) / |u-w|^sigma.
inline double pair_difference_seminorm(const std::vector<double>& us,
                                       const std::vector<CompactSet>& gs,
                                       const std::vector<CompactSet>& hs, double sigma) {
    double best = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = i + 1; j < us.size(); ++j) {
            const double d = hausdorff(minkowski_add(gs[i], hs[j]), minkowski_add(hs[i], gs[j]));
            best = std::max(best, d / std::pow(us[j] - us[i], sigma));
        }
    }
    return best;
}

/// Grid estimate of the Holder-space metric
/// sup H_d(G,H) + sup_{u != w} H_d(G(u)+H(w), H(u)+G(w)) / |u-w|^sigma.
/// Requires convex-valued maps.
inline MetricReport holder_metric(const SetValuedMap& g, const SetValuedMap& h, double sigma,
                                  int grid_n) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw error("holder_metric: sigma must be in (0,1]");
    if (!g.convex_valued || !h.convex_valued)
        throw convexity_error("holder_metric requires convex-valued maps");
    detail::require_same_domain(g, h);
    const auto us = uniform_grid(g.domain, grid_n);
    const auto gs = detail::eval_on(g, us);
    const auto hs = detail::eval_on(h, us);
    double sup = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) sup = std::max(sup, hausdorff(gs[i], hs[i]));
    return {sup + pair_difference_seminorm(us, gs, hs, sigma), grid_n, true};
}

/// Total variation sum over given points (assumed sorted).
inline double variation_of(std::span<const double>, std::span<const CompactSet> vals) {
    double acc = 0.0;
    for (std::size_t i = 1; i < vals.size(); ++i) acc += hausdorff(vals[i], vals[i - 1]);
    return acc;
}

/// Grid estimate of the total variation sup_P sum_i H_d(F(t_i), F(t_{i-1})).
inline MetricReport variation(const SetValuedMap& f, int grid_n) {
    const auto us = uniform_grid(f.domain, grid_n);
    const auto vs = detail::eval_on(f, us);
    return {variation_of(us, vs), grid_n, true};
}

/// Grid estimate of the bounded-variation metric
/// ||G-H||_inf + sup_P sum_i H_d(G(y_i)+H(y_{i-1}), H(y_i)+G(y_{i-1})).
/// Requires convex-valued maps.
inline MetricReport bv_metric(const SetValuedMap& g, const SetValuedMap& h, int grid_n) {
    if (!g.convex_valued || !h.convex_valued)
        throw convexity_error("bv_metric requires convex-valued maps");
    detail::require_same_domain(g, h);
    const auto us = uniform_grid(g.domain, grid_n);
    const auto gs = detail::eval_on(g, us);
    const auto hs = detail::eval_on(h, us);
    double sup = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) sup = std::max(sup, hausdorff(gs[i], hs[i]));
    double sum = 0.0;
    for (std::size_t i = 1; i < us.size(); ++i)
        sum += hausdorff(minkowski_add(gs[i], hs[i - 1]), minkowski_add(hs[i], gs[i - 1]));
    return {sup + sum, grid_n, true};
}

/// Holder seminorm of one map over sorted points.
inline double holder_seminorm_of(std::span<const double> us, std::span<const CompactSet> vals,
                                 double sigma) {
    double best = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = i + 1; j < us.size(); ++j)
            best = std::max(best, hausdorff(vals[i], vals[j]) / std::pow(us[j] - us[i], sigma));
    return best;
}

/// Grid estimate of sup_{u != w} H_d(F(u), F(w)) / |u-w|^sigma.
inline MetricReport holder_seminorm(const SetValuedMap& f, double sigma, int grid_n) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw error("holder_seminorm: sigma must be in (0,1]");
    const auto us = uniform_grid(f.domain, grid_n);
    const auto vs = detail::eval_on(f, us);
    return {holder_seminorm_of(us, vs, sigma), grid_n, true};
}

/// Pointwise inclusion order F <= G checked on the grid.
inline bool is_below(const SetValuedMap& f, const SetValuedMap& g, int grid_n,
                     double slack = 0.0) {
    detail::require_same_domain(f, g);
    for (double u : uniform_grid(f.domain, grid_n))
        if (!is_subset(f(u), g(u), slack)) return false;
    return true;
}

} // namespace svf
