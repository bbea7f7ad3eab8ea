#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "svf/compact_set.hpp"
#include "svf/error.hpp"
#include "svf/scalar_expr.hpp"

namespace svf {

/// Continuous set-valued map on a closed interval: u |-> compact subset of
/// the reals. Evaluators are pure and the struct is immutable in practice,
/// so instances can be shared freely across threads.
struct SetValuedMap {
    Interval domain{0.0, 1.0};
    std::function<CompactSet(double)> evaluator;
    bool convex_valued = false;
    std::string family_tag;

    /// Domain-checked evaluation. Arguments a hair outside the domain
    /// (address arithmetic rounding) are clamped; anything further throws.
    CompactSet operator()(double u) const {
        const double eps =
            1e-9 * std::max({1.0, std::abs(domain.lo), std::abs(domain.hi)});
        if (u < domain.lo - eps || u > domain.hi + eps)
            throw domain_error("map evaluated at " + detail::fmt_double(u) +
                               " outside [" + detail::fmt_double(domain.lo) + "," +
                               detail::fmt_double(domain.hi) + "]");
        return evaluator(std::clamp(u, domain.lo, domain.hi));
    }
};

inline SetValuedMap constant_map(Interval dom, CompactSet value) {
    SetValuedMap m;
    m.domain = dom;
    m.convex_valued = value.is_convex();
    m.family_tag = "constant(" + to_string(value) + ")";
    m.evaluator = [v = std::move(value)](double) { return v; };
    return m;
}

inline SetValuedMap singleton_map(Interval dom, ScalarExpr f) {
    SetValuedMap m;
    m.domain = dom;
    m.convex_valued = true;
    m.family_tag = "singleton(" + f.describe() + ")";
    m.evaluator = [f = std::move(f)](double u) { return CompactSet::point(f(u)); };
    return m;
}

/// [f_lo(u), f_hi(u)]; requires f_lo <= f_hi on the domain.
inline SetValuedMap envelope_map(Interval dom, ScalarExpr f_lo, ScalarExpr f_hi) {
    SetValuedMap m;
    m.domain = dom;
    m.convex_valued = true;
    m.family_tag = "envelope(" + f_lo.describe() + "," + f_hi.describe() + ")";
    m.evaluator = [f_lo = std::move(f_lo), f_hi = std::move(f_hi)](double u) {
        const double lo = f_lo(u), hi = f_hi(u);
        if (lo > hi + 1e-12)
            throw error("envelope_map: lower endpoint above upper at u = " +
                        detail::fmt_double(u));
        return CompactSet::interval(lo, std::max(lo, hi));
    };
    return m;
}

/// s(u) * (depth-k pre-Cantor set); s defaults to 1.
inline SetValuedMap cantor_map(Interval dom, int depth) {
    SetValuedMap m;
    m.domain = dom;
    m.convex_valued = (depth == 0);
    m.family_tag = "cantor(" + std::to_string(depth) + ")";
    m.evaluator = [c = cantor(depth)](double) { return c; };
    return m;
}

inline SetValuedMap cantor_map(Interval dom, int depth, ScalarExpr scale_fn) {
    SetValuedMap m;
    m.domain = dom;
    m.convex_valued = (depth == 0);
    m.family_tag = "cantor(" + std::to_string(depth) + "," + scale_fn.describe() + ")";
    m.evaluator = [c = cantor(depth), s = std::move(scale_fn)](double u) {
        return scale(s(u), c);
    };
    return m;
}

/// Pointwise Minkowski sum (F + G)(u) = F(u) + G(u).
inline SetValuedMap sum_map(SetValuedMap f, SetValuedMap g) {
    SetValuedMap m;
    m.domain = f.domain;
    m.convex_valued = f.convex_valued && g.convex_valued;
    m.family_tag = "sum(" + f.family_tag + "," + g.family_tag + ")";
    m.evaluator = [f = std::move(f), g = std::move(g)](double u) {
        return minkowski_add(f.evaluator(u), g.evaluator(u));
    };
    return m;
}

inline SetValuedMap scaled_map(double lambda, SetValuedMap f) {
    SetValuedMap m;
    m.domain = f.domain;
    m.convex_valued = f.convex_valued;
    m.family_tag = "scaled(" + detail::fmt_double(lambda) + "," + f.family_tag + ")";
    m.evaluator = [lambda, f = std::move(f)](double u) { return scale(lambda, f.evaluator(u)); };
    return m;
}

inline SetValuedMap scaled_map(ScalarExpr t, SetValuedMap f) {
    SetValuedMap m;
    m.domain = f.domain;
    m.convex_valued = f.convex_valued;
    m.family_tag = "scaled(" + t.describe() + "," + f.family_tag + ")";
    m.evaluator = [t = std::move(t), f = std::move(f)](double u) {
        return scale(t(u), f.evaluator(u));
    };
    return m;
}

/// Pointwise product (F G)(u) = F(u) G(u).
inline SetValuedMap product_map(SetValuedMap f, SetValuedMap g) {
    SetValuedMap m;
    m.domain = f.domain;
    m.convex_valued = f.convex_valued && g.convex_valued;
    m.family_tag = "product(" + f.family_tag + "," + g.family_tag + ")";
    m.evaluator = [f = std::move(f), g = std::move(g)](double u) {
        return product(f.evaluator(u), g.evaluator(u));
    };
    return m;
}

/// F(u) + {g(u)}: rigid translation by a scalar function.
inline SetValuedMap translate_map(SetValuedMap f, ScalarExpr g) {
    SetValuedMap m;
    m.domain = f.domain;
    m.convex_valued = f.convex_valued;
    m.family_tag = "translate(" + f.family_tag + "," + g.describe() + ")";
    m.evaluator = [f = std::move(f), g = std::move(g)](double u) {
        return minkowski_add(f.evaluator(u), CompactSet::point(g(u)));
    };
    return m;
}

} // namespace svf
