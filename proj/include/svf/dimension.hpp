#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "svf/error.hpp"
#include "svf/fractal.hpp"

namespace svf {

struct BoxCountRow {
    double eta = 0.0;
    long count = 0;
};

/// (eta, N_eta) pairs for one counting method.
struct BoxCountTable {
    std::vector<BoxCountRow> rows;
    std::string method_tag;
};

struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double eta_min = 0.0;
    double eta_max = 0.0;
};

/// Least-squares fit of log N against -log eta.
inline DimensionEstimate fit_dimension(const BoxCountTable& table) {
    if (table.rows.size() < 4)
        throw degenerate_fit_error("fit_dimension: need at least 4 rows");
    const std::size_t n = table.rows.size();
    bool all_equal = true;
    for (const auto& r : table.rows) {
        if (r.count <= 0) throw degenerate_fit_error("fit_dimension: nonpositive count");
        all_equal = all_equal && r.count == table.rows.front().count;
    }
    if (all_equal) throw degenerate_fit_error("fit_dimension: all counts equal");

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double emin = table.rows.front().eta, emax = emin;
    for (const auto& r : table.rows) {
        const double x = -std::log(r.eta);
        const double y = std::log(static_cast<double>(r.count));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        emin = std::min(emin, r.eta);
        emax = std::max(emax, r.eta);
    }
    const double dn = static_cast<double>(n);
    const double var_x = sxx - sx * sx / dn;
    if (var_x <= 0.0) throw degenerate_fit_error("fit_dimension: all eta equal");
    const double cov = sxy - sx * sy / dn;
    const double var_y = syy - sy * sy / dn;

    DimensionEstimate est;
    est.slope = cov / var_x;
    est.intercept = (sy - est.slope * sx) / dn;
    est.r_squared = var_y <= 0.0 ? 1.0 : (cov * cov) / (var_x * var_y);
    est.eta_min = emin;
    est.eta_max = emax;
    return est;
}

/// Unique t >= 0 with sum_i ratios_i^t = 1, by bisection (the sum is
/// strictly decreasing in t for ratios in (0,1)).
inline double moran_solve(const std::vector<double>& ratios) {
    if (ratios.empty()) throw error("moran_solve: empty ratio list");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw error("moran_solve: ratios must lie in (0,1)");
    auto value = [&](double t) {
        double s = 0.0;
        for (double r : ratios) s += std::pow(r, t);
        return s;
    };
    double lo = 0.0;
    double hi = 2.0 * static_cast<double>(ratios.size());
    while (value(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) break;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Per-branch contraction ratio bracket and the two Moran exponents it
/// produces. The graph-space branch maps move points by exactly
/// a_j |u - w| + |alpha| H_d(...), so min/max{a_j, |alpha|} bracket the
/// contraction per branch.
struct MoranBounds {
    std::vector<double> lower_ratios;
    std::vector<double> upper_ratios;
    double t_lower = 0.0;
    double t_upper = 0.0;
};

inline MoranBounds dim_bounds(const FractalSystem& sys) {
    const double aa = std::abs(sys.alpha);
    if (aa == 0.0) throw error("dim_bounds: alpha must be nonzero");
    MoranBounds mb;
    for (int j = 0; j < sys.maps.count(); ++j) {
        const double aj = sys.maps.a[static_cast<std::size_t>(j)];
        mb.lower_ratios.push_back(std::min(aj, aa));
        mb.upper_ratios.push_back(std::max(aj, aa));
    }
    mb.t_lower = moran_solve(mb.lower_ratios);
    mb.t_upper = moran_solve(mb.upper_ratios);
    return mb;
}

} // namespace svf
