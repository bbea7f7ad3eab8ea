#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "svf/compact_set.hpp"
#include "svf/error.hpp"
#include "svf/fractal.hpp"
#include "svf/metrics.hpp"
#include "svf/set_valued_map.hpp"

namespace svf {

/// Basis weights B_{n,k}(s) = C(n,k) s^k (1-s)^{n-k}, computed in log space.
/// `log_binom` may be empty (computed on the fly) or hold lgamma-based
/// log C(n,k) for k = 0..n.
inline std::vector<double> bernstein_weights(int n, double s,
                                             const std::vector<double>& log_binom = {}) {
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    if (s <= 0.0) {
        w.front() = 1.0;
        return w;
    }
    if (s >= 1.0) {
        w.back() = 1.0;
        return w;
    }
    const double ls = std::log(s), l1s = std::log1p(-s);
    const double lg_n1 = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
        const double lb = log_binom.empty()
                              ? lg_n1 - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)
                              : log_binom[static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(k)] = std::exp(lb + k * ls + (n - k) * l1s);
    }
    return w;
}

/// Set-valued polynomial with convex (single-interval) coefficient sets
/// F(k/n): evaluation is the Minkowski-convex combination of the
/// coefficients under the Bernstein weights, which for intervals acts on
/// the endpoints separately.
struct SetPolynomial {
    int degree = 0;
    Interval domain{0.0, 1.0};
    std::vector<Interval> coeffs; // size degree + 1
    std::vector<double> log_binom;

    CompactSet operator()(double u) const {
        const double s = (u - domain.lo) / (domain.hi - domain.lo);
        const auto w = bernstein_weights(degree, s, log_binom);
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            lo += w[k] * coeffs[k].lo;
            hi += w[k] * coeffs[k].hi;
        }
        return CompactSet::interval(lo, std::max(lo, hi));
    }

    SetValuedMap as_map() const {
        SetValuedMap m;
        m.domain = domain;
        m.convex_valued = true;
        m.family_tag = "bernstein(" + std::to_string(degree) + ")";
        m.evaluator = [p = *this](double u) { return p(u); };
        return m;
    }
};

/// Degree-n Bernstein approximation of a convex-valued map: coefficient
/// sets are F at the n+1 equispaced nodes.
inline SetPolynomial bernstein(const SetValuedMap& f, int n) {
    if (n < 1) throw error("bernstein: degree must be >= 1");
    if (!f.convex_valued) throw convexity_error("bernstein requires a convex-valued map");
    SetPolynomial p;
    p.degree = n;
    p.domain = f.domain;
    p.coeffs.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double u = f.domain.lo + (f.domain.hi - f.domain.lo) * k / n;
        p.coeffs.push_back(f(u).hull());
    }
    p.log_binom.resize(static_cast<std::size_t>(n) + 1);
    const double lg_n1 = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k)
        p.log_binom[static_cast<std::size_t>(k)] =
            lg_n1 - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return p;
}

/// Fractal function of a set polynomial under the given partition/base/scale.
inline GridFunction fractal_polynomial(const SetPolynomial& p, const Partition& dl,
                                       const BaseFunctionSpec& base, double alpha, int depth,
                                       double tol = 1e-9) {
    auto pm = p.as_map();
    auto s = build_base(pm, base);
    return evaluate_fractal(make_system(std::move(pm), std::move(s), dl, alpha), depth, tol);
}

struct ApproxReport {
    double epsilon = 0.0;
    double achieved = 0.0;
    int degree = 0;
    double alpha = 0.0;
    std::vector<double> partition;
    bool success = false;
};

/// Approximates a convex-valued map by a fractal set polynomial within eps:
/// raises the Bernstein degree until the polynomial is eps/3-close on the
/// grid, then picks the scale factor at 90% of the budget
///   |alpha| < min{ (eps/3)/(eps/3 + ||P - S||), (eps/3)/(eps/3 + 2||P||) },
/// which caps the perturbation of the fractal step at 2 eps/3. The base is
/// the plain multiplier recipe (t = 1), compatible on any partition of a
/// unit-span domain and nonzero by construction.
inline ApproxReport approximate_within(const SetValuedMap& f, double eps, int depth = 5,
                                       int degree_cap = 4096, int grid_n = 513,
                                       int partition_knots = 5, double tol = 1e-9) {
    if (!(eps > 0.0)) throw error("approximate_within: eps must be positive");
    if (!f.convex_valued)
        throw convexity_error("approximate_within requires a convex-valued map");

    // Work in normalized coordinates: Bernstein nodes and the multiplier
    // base both want the unit interval.
    const Interval dom = f.domain;
    const double span = dom.hi - dom.lo;
    SetValuedMap fn;
    fn.domain = Interval{0.0, 1.0};
    fn.convex_valued = true;
    fn.family_tag = f.family_tag + "|normalized";
    fn.evaluator = [f, dom, span](double s) { return f.evaluator(dom.lo + s * span); };

    SetPolynomial poly;
    bool found = false;
    for (int n = 1; n <= degree_cap; n *= 2) {
        poly = bernstein(fn, n);
        if (sup_distance(fn, poly.as_map(), grid_n).value < eps / 3.0) {
            found = true;
            break;
        }
    }
    if (!found)
        throw degree_cap_error("approximate_within: degree cap " + std::to_string(degree_cap) +
                               " reached without meeting eps/3");

    const auto part = Partition::uniform(Interval{0.0, 1.0}, partition_knots);
    auto pm = poly.as_map();
    auto s = build_base(pm, BaseFunctionSpec::multiplier(ScalarExpr::constant(1)));

    const double dist_ps = sup_distance(pm, s, grid_n).value;
    double norm_p = 0.0;
    for (double u : uniform_grid(pm.domain, grid_n)) norm_p = std::max(norm_p, norm(pm(u)));
    const double t = eps / 3.0;
    const double budget = std::min(t / (t + dist_ps), t / (t + 2.0 * norm_p));
    const double alpha = 0.9 * budget;

    const auto grid = evaluate_fractal(make_system(pm, s, part, alpha), depth, tol);

    ApproxReport rep;
    rep.epsilon = eps;
    rep.degree = poly.degree;
    rep.alpha = alpha;
    for (double k : part.knots) rep.partition.push_back(dom.lo + k * span);
    for (const auto& e : grid.entries)
        rep.achieved = std::max(rep.achieved, hausdorff(fn(e.u), e.value));
    rep.success = rep.achieved < eps;
    return rep;
}

} // namespace svf
