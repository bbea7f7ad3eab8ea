#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "svf/compact_set.hpp"
#include "svf/error.hpp"
#include "svf/metrics.hpp"
#include "svf/set_valued_map.hpp"

namespace svf {

/// Cap on the number of grid points a fractal evaluation may produce.
inline constexpr std::size_t default_grid_budget = 2'000'000;

/// Knot set u_1 < ... < u_N with N >= 3, spanning the working interval.
struct Partition {
    std::vector<double> knots;

    static Partition of(std::vector<double> points) {
        if (points.size() < 3) throw error("Partition: need at least 3 knots");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i - 1] < points[i]))
                throw error("Partition: knots must be strictly increasing");
        return Partition{std::move(points)};
    }

    static Partition uniform(Interval dom, int n) {
        return of(uniform_grid(dom, n));
    }

    double lo() const { return knots.front(); }
    double hi() const { return knots.back(); }
    double span() const { return hi() - lo(); }
    int map_count() const { return static_cast<int>(knots.size()) - 1; }
    double min_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < knots.size(); ++i) g = std::min(g, knots[i] - knots[i - 1]);
        return g;
    }
    double max_gap() const {
        double g = 0.0;
        for (std::size_t i = 1; i < knots.size(); ++i) g = std::max(g, knots[i] - knots[i - 1]);
        return g;
    }
    Interval domain() const { return Interval{lo(), hi()}; }
};

/// Increasing affine contractions L_j(u) = a_j u + b_j mapping the whole
/// interval onto the j-th subinterval: L_j(u_1) = u_j, L_j(u_N) = u_{j+1}.
struct AffineMaps {
    std::vector<double> a, b;

    int count() const { return static_cast<int>(a.size()); }
    double apply(int j, double u) const { return a[static_cast<std::size_t>(j)] * u + b[static_cast<std::size_t>(j)]; }
    double invert(int j, double x) const { return (x - b[static_cast<std::size_t>(j)]) / a[static_cast<std::size_t>(j)]; }
    double a_min() const { return *std::min_element(a.begin(), a.end()); }
    double a_max() const { return *std::max_element(a.begin(), a.end()); }
};

inline AffineMaps make_affine_maps(const Partition& dl) {
    const auto& u = dl.knots;
    const double span = dl.span();
    AffineMaps m;
    const std::size_t n = u.size() - 1;
    m.a.resize(n);
    m.b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        m.a[j] = (u[j + 1] - u[j]) / span;
        m.b[j] = (u[j] * u.back() - u.front() * u[j + 1]) / span;
    }
    return m;
}

/// Recipe for the base map S paired with F. `reparam` composes F with a
/// domain self-map fixing both endpoints; `multiplier` scales F by a scalar
/// function equal to 1 at both endpoints; `custom` supplies S directly.
struct BaseFunctionSpec {
    enum class Variant { reparam, multiplier, custom };

    Variant variant = Variant::multiplier;
    ScalarExpr t = ScalarExpr::constant(1.0);
    std::optional<SetValuedMap> custom;

    static BaseFunctionSpec reparam(ScalarExpr t) {
        return {Variant::reparam, std::move(t), std::nullopt};
    }
    static BaseFunctionSpec multiplier(ScalarExpr t) {
        return {Variant::multiplier, std::move(t), std::nullopt};
    }
    static BaseFunctionSpec custom_map(SetValuedMap s) {
        return {Variant::custom, ScalarExpr::constant(1.0), std::move(s)};
    }
};

/// Builds the base map S from F. For the reparam/multiplier variants
///   S(u) = F(t(u))   + (u - u_1)(F(u_1) - F(u_1)) + (u_N - u)(F(u_N) - F(u_N))
///   S(u) = t(u) F(u) + (u - u_1)(F(u_1) - F(u_1)) + (u_N - u)(F(u_N) - F(u_N))
/// with all sums and differences Minkowski. Endpoint conditions on t are
/// validated against tol_compat.
inline SetValuedMap build_base(const SetValuedMap& f, const BaseFunctionSpec& recipe,
                               double tol_compat = 1e-9) {
    if (recipe.variant == BaseFunctionSpec::Variant::custom) {
        if (!recipe.custom) throw error("build_base: custom variant without a map");
        return *recipe.custom;
    }
    const double u1 = f.domain.lo, uN = f.domain.hi;
    if (recipe.variant == BaseFunctionSpec::Variant::reparam) {
        if (std::abs(recipe.t(u1) - u1) > tol_compat || std::abs(recipe.t(uN) - uN) > tol_compat)
            throw incompatible_base_error("reparam base: t must fix both endpoints");
    } else {
        if (std::abs(recipe.t(u1) - 1.0) > tol_compat || std::abs(recipe.t(uN) - 1.0) > tol_compat)
            throw incompatible_base_error("multiplier base: t must be 1 at both endpoints");
    }
    const CompactSet d1 = minkowski_sub(f(u1), f(u1));
    const CompactSet dN = minkowski_sub(f(uN), f(uN));

    SetValuedMap s;
    s.domain = f.domain;
    s.convex_valued = f.convex_valued;
    const bool reparam = recipe.variant == BaseFunctionSpec::Variant::reparam;
    s.family_tag = std::string(reparam ? "base_reparam(" : "base_multiplier(") +
                   f.family_tag + "," + recipe.t.describe() + ")";
    s.evaluator = [f, t = recipe.t, d1, dN, u1, uN, reparam](double u) {
        CompactSet head = reparam ? f(std::clamp(t(u), u1, uN)) : scale(t(u), f.evaluator(u));
        CompactSet tail = minkowski_add(scale(u - u1, d1), scale(uN - u, dN));
        return minkowski_add(head, tail);
    };
    return s;
}

/// Everything the self-referential construction needs: the target map F,
/// base map S, knots, affine maps, and the scale factor.
struct FractalSystem {
    SetValuedMap f;
    SetValuedMap s;
    Partition partition;
    AffineMaps maps;
    double alpha = 0.0;
    double tol_compat = 1e-9;
};

inline FractalSystem make_system(SetValuedMap f, SetValuedMap s, Partition dl, double alpha,
                                 double tol_compat = 1e-9) {
    if (!(std::abs(alpha) < 1.0)) throw error("make_system: |alpha| must be < 1");
    const double eps = 1e-9 * std::max(1.0, dl.span());
    if (std::abs(dl.lo() - f.domain.lo) > eps || std::abs(dl.hi() - f.domain.hi) > eps)
        throw error("make_system: partition must span the map domain");
    AffineMaps maps = make_affine_maps(dl);
    return FractalSystem{std::move(f), std::move(s), std::move(dl), std::move(maps), alpha,
                         tol_compat};
}

/// H_d(S(u_1) - F(u_1), S(u_N) - F(u_N)): zero for a compatible base.
inline double check_compatibility(const FractalSystem& sys) {
    const double u1 = sys.partition.lo(), uN = sys.partition.hi();
    return hausdorff(minkowski_sub(sys.s(u1), sys.f(u1)), minkowski_sub(sys.s(uN), sys.f(uN)));
}

/// One stored sample of the fractal function. Knots have an empty address;
/// an entry with address (j1,...,jk) sits at L_{j1}(...L_{jk}(knot)...).
/// `link` points at the entry whose image under map `link_map` this is;
/// knots other than the last link back to the first knot, the two extreme
/// knots link to themselves.
struct GridEntry {
    double u = 0.0;
    std::vector<int> address;
    int level = 0;
    int link = -1;
    int link_map = -1;
    CompactSet value;
};

/// Tabulation of the fractal function on the address set
/// C_depth = union of L_w(knots) over words |w| <= depth, sorted by u.
struct GridFunction {
    std::vector<GridEntry> entries;
    int depth = 0;
    double point_tol = 0.0;

    /// Index of the grid point nearest to u, or -1 if none within point_tol.
    long find(double u) const {
        auto cmp = [](const GridEntry& e, double v) { return e.u < v; };
        auto it = std::lower_bound(entries.begin(), entries.end(), u, cmp);
        long best = -1;
        double best_d = point_tol;
        if (it != entries.end() && std::abs(it->u - u) <= best_d) {
            best = it - entries.begin();
            best_d = std::abs(it->u - u);
        }
        if (it != entries.begin() && std::abs((it - 1)->u - u) <= best_d)
            best = (it - 1) - entries.begin();
        return best;
    }

    /// Index of the entry nearest to u with no tolerance limit.
    std::size_t nearest(double u) const {
        if (entries.empty()) throw error("GridFunction::nearest: empty grid");
        auto cmp = [](const GridEntry& e, double v) { return e.u < v; };
        auto it = std::lower_bound(entries.begin(), entries.end(), u, cmp);
        if (it == entries.end()) return entries.size() - 1;
        if (it == entries.begin()) return 0;
        const auto prev = it - 1;
        return (u - prev->u <= it->u - u) ? static_cast<std::size_t>(prev - entries.begin())
                                          : static_cast<std::size_t>(it - entries.begin());
    }

    const CompactSet& at(double u) const {
        const long i = find(u);
        if (i < 0)
            throw point_not_on_grid_error("no grid point at u = " + detail::fmt_double(u));
        return entries[static_cast<std::size_t>(i)].value;
    }

    std::vector<double> points() const {
        std::vector<double> us;
        us.reserve(entries.size());
        for (const auto& e : entries) us.push_back(e.u);
        return us;
    }

    std::vector<CompactSet> values() const {
        std::vector<CompactSet> vs;
        vs.reserve(entries.size());
        for (const auto& e : entries) vs.push_back(e.value);
        return vs;
    }
};

namespace detail {

/// Address skeleton shared by the forward recursion and the Picard solver:
/// entries in breadth-first order (knots first), each linked to the entry
/// it is the L_{link_map}-image of.
inline GridFunction build_skeleton(const FractalSystem& sys, int depth,
                                   std::size_t budget = default_grid_budget) {
    if (depth < 0) throw error("fractal grid: negative depth");
    const auto& knots = sys.partition.knots;
    const int nmaps = sys.partition.map_count();
    const double span = sys.partition.span();

    GridFunction g;
    g.depth = depth;
    g.point_tol = std::max(4e-15 * std::max(1.0, span), 1e-12 * span);
    const double resolution =
        std::pow(sys.maps.a_min(), depth) * sys.partition.min_gap();
    if (depth > 0 && resolution < 4.0 * g.point_tol)
        throw capacity_error("fractal grid: depth too deep to keep grid points distinct");

    // Ordered (u, index) view for tolerance-based dedup during construction.
    std::set<std::pair<double, int>> seen;
    auto lookup = [&](double u) -> int {
        auto it = seen.lower_bound({u - g.point_tol, -1});
        if (it != seen.end() && it->first <= u + g.point_tol) return it->second;
        return -1;
    };
    auto insert = [&](GridEntry e) -> int {
        const int idx = static_cast<int>(g.entries.size());
        seen.insert({e.u, idx});
        g.entries.push_back(std::move(e));
        return idx;
    };

    const int n_knots = static_cast<int>(knots.size());
    for (int i = 0; i < n_knots; ++i) {
        GridEntry e;
        e.u = knots[static_cast<std::size_t>(i)];
        e.level = 0;
        if (i == 0) {
            e.link = 0;
            e.link_map = 0;
        } else if (i == n_knots - 1) {
            e.link = n_knots - 1;
            e.link_map = nmaps - 1;
        } else {
            e.link = 0;
            e.link_map = i; // L_{i+1 in 1-based}(u_1) = u_{i+1}; 0-based map index i
        }
        insert(std::move(e));
    }

    std::size_t frontier_begin = 0;
    for (int level = 1; level <= depth; ++level) {
        const std::size_t frontier_end = g.entries.size();
        for (std::size_t q = frontier_begin; q < frontier_end; ++q) {
            for (int j = 0; j < nmaps; ++j) {
                const double p = sys.maps.apply(j, g.entries[q].u);
                if (lookup(p) >= 0) continue;
                if (g.entries.size() >= budget)
                    throw capacity_error("fractal grid: budget of " + std::to_string(budget) +
                                         " points exceeded");
                GridEntry e;
                e.u = p;
                e.address.reserve(g.entries[q].address.size() + 1);
                e.address.push_back(j);
                e.address.insert(e.address.end(), g.entries[q].address.begin(),
                                 g.entries[q].address.end());
                e.level = level;
                e.link = static_cast<int>(q);
                e.link_map = j;
                insert(std::move(e));
            }
        }
        frontier_begin = frontier_end;
    }
    return g;
}

/// Stable sort by u with link-index remapping.
inline void sort_by_position(GridFunction& g) {
    std::vector<int> order(g.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return g.entries[static_cast<std::size_t>(x)].u < g.entries[static_cast<std::size_t>(y)].u; });
    std::vector<int> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    std::vector<GridEntry> sorted;
    sorted.reserve(g.entries.size());
    for (int idx : order) {
        GridEntry e = std::move(g.entries[static_cast<std::size_t>(idx)]);
        e.link = rank[static_cast<std::size_t>(e.link)];
        sorted.push_back(std::move(e));
    }
    g.entries = std::move(sorted);
}

inline void require_compatible(const FractalSystem& sys) {
    const double defect = check_compatibility(sys);
    if (defect > sys.tol_compat)
        throw incompatible_base_error("base map incompatible: endpoint defect " +
                                      fmt_double(defect) + " exceeds tol " +
                                      fmt_double(sys.tol_compat));
}

} // namespace detail

/// The endpoint value of the fractal function solves A = F(u) + alpha A - alpha S(u)
/// at u = u_1 (or u_N). Picard iteration from A_0 = F(u); the geometric-tail
/// stopping rule change <= tol (1-|alpha|)/|alpha| leaves the result within
/// tol of the exact fixed point.
inline CompactSet endpoint_fixed_point(const FractalSystem& sys, bool last, double tol = 1e-9,
                                       int max_iter = 100000) {
    const double u = last ? sys.partition.hi() : sys.partition.lo();
    const CompactSet fu = sys.f(u);
    const CompactSet su_neg = scale(-sys.alpha, sys.s(u));
    const double aa = std::abs(sys.alpha);
    const double threshold =
        aa == 0.0 ? std::numeric_limits<double>::infinity() : tol * (1.0 - aa) / aa;
    CompactSet a = fu;
    for (int k = 0; k < max_iter; ++k) {
        CompactSet next = minkowski_add(minkowski_add(fu, scale(sys.alpha, a)), su_neg);
        const double change = hausdorff(next, a);
        a = std::move(next);
        if (change <= threshold) return a;
    }
    throw no_convergence_error("endpoint_fixed_point: no convergence in " +
                               std::to_string(max_iter) + " iterations");
}

/// Sorted, deduplicated address set C_depth = union of L_w(knots), |w| <= depth.
inline std::vector<double> dense_set(const Partition& dl, int depth,
                                     std::size_t budget = default_grid_budget) {
    FractalSystem sys;
    sys.partition = dl;
    sys.maps = make_affine_maps(dl);
    auto skel = detail::build_skeleton(sys, depth, budget);
    auto pts = skel.points();
    std::sort(pts.begin(), pts.end());
    return pts;
}

/// Evaluates the fractal function by forward address recursion:
/// endpoint fixed points, knot values from the knot identity
/// value(u_i) = F(u_i) + alpha value(u_1) - alpha S(u_1), then
/// value(L_j(u)) = F(L_j(u)) + alpha value(u) - alpha S(u) over all
/// addresses of length <= depth. Every stored set is within tol of the
/// exact fractal function value.
inline GridFunction evaluate_fractal(const FractalSystem& sys, int depth, double tol = 1e-9,
                                     int max_iter = 100000,
                                     std::size_t budget = default_grid_budget) {
    detail::require_compatible(sys);
    GridFunction g = detail::build_skeleton(sys, depth, budget);

    const CompactSet a1 = endpoint_fixed_point(sys, false, tol, max_iter);
    const CompactSet aN = endpoint_fixed_point(sys, true, tol, max_iter);
    const CompactSet alpha_a1 = scale(sys.alpha, a1);
    const CompactSet alpha_s1_neg = scale(-sys.alpha, sys.s(sys.partition.lo()));

    const int n_knots = static_cast<int>(sys.partition.knots.size());
    for (int i = 0; i < n_knots; ++i) {
        auto& e = g.entries[static_cast<std::size_t>(i)];
        if (i == 0) {
            e.value = a1;
        } else if (i == n_knots - 1) {
            e.value = aN;
        } else {
            e.value = minkowski_add(minkowski_add(sys.f(e.u), alpha_a1), alpha_s1_neg);
        }
    }
    for (std::size_t i = static_cast<std::size_t>(n_knots); i < g.entries.size(); ++i) {
        auto& e = g.entries[i];
        const auto& parent = g.entries[static_cast<std::size_t>(e.link)];
        e.value = minkowski_add(minkowski_add(sys.f(e.u), scale(sys.alpha, parent.value)),
                                scale(-sys.alpha, sys.s(parent.u)));
    }
    detail::sort_by_position(g);
    return g;
}

struct PicardResult {
    GridFunction grid;
    std::vector<double> step_changes;
    int iterations = 0;
};

/// Independent construction of the same grid function: iterate the
/// self-referential operator (Phi G)(u) = F(u) + alpha [G - S](L_j^{-1}(u))
/// on grid functions starting from G_0 = F, until the sup-H_d step change
/// passes the geometric-tail stopping rule.
inline PicardResult picard_solve(const FractalSystem& sys, int depth, double tol = 1e-9,
                                 int max_iter = 100000,
                                 std::size_t budget = default_grid_budget) {
    detail::require_compatible(sys);
    GridFunction g = detail::build_skeleton(sys, depth, budget);
    const std::size_t n = g.entries.size();

    std::vector<CompactSet> f_here(n), s_link_scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        f_here[i] = sys.f(g.entries[i].u);
        s_link_scaled[i] =
            scale(-sys.alpha, sys.s(g.entries[static_cast<std::size_t>(g.entries[i].link)].u));
    }

    std::vector<CompactSet> cur = f_here, next(n);
    const double aa = std::abs(sys.alpha);
    const double threshold =
        aa == 0.0 ? std::numeric_limits<double>::infinity() : tol * (1.0 - aa) / aa;

    PicardResult result;
    for (int iter = 0; iter < max_iter; ++iter) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = minkowski_add(
                minkowski_add(f_here[i],
                              scale(sys.alpha, cur[static_cast<std::size_t>(g.entries[i].link)])),
                s_link_scaled[i]);
            change = std::max(change, hausdorff(next[i], cur[i]));
        }
        std::swap(cur, next);
        result.step_changes.push_back(change);
        result.iterations = iter + 1;
        if (change <= threshold) {
            for (std::size_t i = 0; i < n; ++i) g.entries[i].value = std::move(cur[i]);
            detail::sort_by_position(g);
            result.grid = std::move(g);
            return result;
        }
    }
    throw no_convergence_error("picard_solve: no convergence in " + std::to_string(max_iter) +
                               " iterations");
}

/// Maximum self-referential defect over all grid edges:
/// max H_d(value(L_j(u)), F(L_j(u)) + alpha value(u) - alpha S(u)).
inline double residual(const FractalSystem& sys, const GridFunction& grid) {
    double worst = 0.0;
    for (const auto& q : grid.entries) {
        const CompactSet alpha_v = scale(sys.alpha, q.value);
        const CompactSet alpha_s_neg = scale(-sys.alpha, sys.s(q.u));
        for (int j = 0; j < sys.maps.count(); ++j) {
            const double p = sys.maps.apply(j, q.u);
            const long idx = grid.find(p);
            if (idx < 0) continue;
            const CompactSet rhs = minkowski_add(minkowski_add(sys.f(p), alpha_v), alpha_s_neg);
            worst = std::max(worst,
                             hausdorff(grid.entries[static_cast<std::size_t>(idx)].value, rhs));
        }
    }
    return worst;
}

/// Left side: grid max of H_d(fractal(u), F(u)). Right side: the
/// contraction-derived bound
/// |alpha|/(1-|alpha|) ||F - S||_inf + 2|alpha|/(1-|alpha|) ||F||_inf
/// with both sups taken over the same grid.
inline std::pair<double, double> perturbation_gap(const FractalSystem& sys,
                                                  const GridFunction& grid) {
    double lhs = 0.0, dist_fs = 0.0, norm_f = 0.0;
    for (const auto& e : grid.entries) {
        const CompactSet fu = sys.f(e.u);
        lhs = std::max(lhs, hausdorff(e.value, fu));
        dist_fs = std::max(dist_fs, hausdorff(fu, sys.s(e.u)));
        norm_f = std::max(norm_f, norm(fu));
    }
    const double aa = std::abs(sys.alpha);
    const double rhs = aa / (1.0 - aa) * dist_fs + 2.0 * aa / (1.0 - aa) * norm_f;
    return {lhs, rhs};
}

struct OperatorGap {
    double input_dist = 0.0;
    double output_dist = 0.0;
};

/// Builds the fractal functions of F and G with a shared base map and
/// partition and reports the grid distances before and after; the
/// construction is 1/(1-|alpha|)-Lipschitz, so
/// output_dist <= input_dist / (1-|alpha|) up to construction tolerance.
/// Continuity of F |-> fractal(F) (and hence lower semicontinuity of the
/// family map F |-> {fractal(F) : |alpha| < 1}) is the qualitative face of
/// this bound; only the quantitative form is exposed.
inline OperatorGap fractal_operator_gap(const SetValuedMap& f, const SetValuedMap& g,
                                        const Partition& dl, const SetValuedMap& s, double alpha,
                                        int depth, double tol = 1e-9) {
    auto sys_f = make_system(f, s, dl, alpha);
    auto sys_g = make_system(g, s, dl, alpha);
    const auto grid_f = evaluate_fractal(sys_f, depth, tol);
    const auto grid_g = evaluate_fractal(sys_g, depth, tol);
    OperatorGap gap;
    for (std::size_t i = 0; i < grid_f.entries.size(); ++i) {
        const double u = grid_f.entries[i].u;
        gap.input_dist = std::max(gap.input_dist, hausdorff(f(u), g(u)));
        gap.output_dist =
            std::max(gap.output_dist, hausdorff(grid_f.entries[i].value, grid_g.entries[i].value));
    }
    return gap;
}

/// Order preservation: with interpolatory bases S_F = F and S_G = G and
/// singleton endpoint values, F <= G implies the fractal functions stay
/// ordered. Returns true iff containment holds at every grid point.
inline bool constrained_check(const SetValuedMap& f, const SetValuedMap& g, const Partition& dl,
                              double alpha, int depth, double slack, double tol = 1e-9) {
    for (double u : {dl.lo(), dl.hi()}) {
        if (!f(u).is_singleton() || !g(u).is_singleton())
            throw endpoint_not_singleton_error(
                "constrained_check: endpoint values must be singletons");
    }
    auto sys_f = make_system(f, f, dl, alpha);
    auto sys_g = make_system(g, g, dl, alpha);
    const auto grid_f = evaluate_fractal(sys_f, depth, tol);
    const auto grid_g = evaluate_fractal(sys_g, depth, tol);
    for (const auto& e : grid_f.entries) {
        if (!is_subset(f(e.u), g(e.u), slack))
            throw order_violated_error("constrained_check: F <= G fails at u = " +
                                       detail::fmt_double(e.u));
    }
    for (std::size_t i = 0; i < grid_f.entries.size(); ++i) {
        if (!is_subset(grid_f.entries[i].value, grid_g.entries[i].value, slack)) return false;
    }
    return true;
}

} // namespace svf
