#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "svf/bernstein.hpp"
#include "svf/config.hpp"
#include "svf/csv.hpp"
#include "svf/dimension.hpp"
#include "svf/fractal.hpp"
#include "svf/graph.hpp"
#include "svf/metrics.hpp"

namespace svf {

/// Exit codes shared by every command.
enum exit_code : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_numerical = 3,
    exit_capacity = 4,
};

struct RunReport {
    std::string command;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> warnings;
    std::vector<std::string> files;
    std::vector<std::string> lines;
    int code = exit_ok;
};

namespace detail {

inline std::filesystem::path out_path(const std::string& out_dir, const std::string& prefix,
                                      const std::string& suffix) {
    return std::filesystem::path(out_dir) / (prefix + "_" + suffix);
}

struct SystemBundle {
    SetValuedMap f;
    SetValuedMap s;
    FractalSystem sys;
};

inline SystemBundle build_configured_system(const ExperimentConfig& cfg) {
    SetValuedMap f = cfg.map->build(cfg.domain);
    SetValuedMap s = cfg.base.build(f, *cfg.map, cfg.tol_compat);
    auto part = Partition::of(cfg.partition);
    FractalSystem sys = make_system(f, s, part, cfg.alpha, cfg.tol_compat);
    return {std::move(f), std::move(s), std::move(sys)};
}

// Random generators for the check suites (self-contained so the library
// stays header-only and the CLI deterministic under a fixed seed).
inline CompactSet random_set(std::mt19937_64& rng, int max_parts = 4, double range = 5.0) {
    std::uniform_int_distribution<int> nparts(1, max_parts);
    std::uniform_real_distribution<double> coord(-range, range);
    std::uniform_real_distribution<double> len(0.0, range / 2);
    std::vector<Interval> raw;
    const int n = nparts(rng);
    for (int i = 0; i < n; ++i) {
        const double lo = coord(rng);
        raw.push_back(Interval{lo, lo + len(rng)});
    }
    return canonicalize(std::move(raw));
}

inline SetValuedMap random_convex_map(std::mt19937_64& rng) {
    const Interval unit{0.0, 1.0};
    std::uniform_real_distribution<double> c(-1.5, 1.5);
    std::uniform_real_distribution<double> pos(0.2, 1.5);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0:
        return singleton_map(unit, ScalarExpr::poly({c(rng), c(rng), c(rng)}));
    case 1: {
        const double a0 = c(rng), a1 = c(rng), a2 = c(rng);
        const double w0 = pos(rng), w2 = pos(rng);
        return envelope_map(unit, ScalarExpr::poly({a0, a1, a2}),
                            ScalarExpr::poly({a0 + w0, a1, a2 + w2}));
    }
    default: {
        const double lo = c(rng);
        return constant_map(unit, CompactSet::interval(lo, lo + pos(rng)));
    }
    }
}

inline FractalSystem random_check_system(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> al(-0.8, 0.8);
    std::uniform_real_distribution<double> cc(-0.8, 0.8);
    auto f = random_convex_map(rng);
    const double c = cc(rng);
    auto s = build_base(f, BaseFunctionSpec::multiplier(ScalarExpr::poly({1.0, c, -c})));
    double alpha = al(rng);
    if (std::abs(alpha) < 0.05) alpha = 0.3;
    std::vector<double> knots{0.0, 1.0};
    knots.insert(knots.begin() + 1, 0.3 + 0.4 * std::uniform_real_distribution<double>()(rng));
    return make_system(std::move(f), std::move(s), Partition::of(std::move(knots)), alpha);
}

} // namespace detail

inline RunReport run_build(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunReport rep;
    rep.command = "build";
    auto bundle = detail::build_configured_system(cfg);
    const GridFunction grid = evaluate_fractal(bundle.sys, cfg.depth, cfg.tol);
    const double res = residual(bundle.sys, grid);

    const auto grid_file = detail::out_path(out_dir, cfg.out_prefix, "grid.csv");
    write_file_atomic(grid_file, csv::grid_csv(grid));
    rep.files.push_back(grid_file.string());

    rep.metrics.emplace_back("residual", res);
    rep.metrics.emplace_back("grid_points", static_cast<double>(grid.entries.size()));
    rep.metrics.emplace_back("compatibility_defect", check_compatibility(bundle.sys));
    if (res > 4.0 * cfg.tol) {
        rep.lines.push_back("residual exceeds 4*tol");
        rep.code = exit_numerical;
    }
    return rep;
}

inline RunReport run_dimension(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunReport rep;
    rep.command = "dimension";
    const SetValuedMap f = cfg.map->build(cfg.domain);

    BoxCountTable table;
    table.method_tag = cfg.method;
    std::vector<std::tuple<double, double, long, double>> bracket;

    if (cfg.method == "net_cover") {
        const GraphCloud cloud = new_graph_cloud(f, cfg.grid_n);
        for (double eta : cfg.eta_schedule)
            table.rows.push_back({eta, net_cover_count(cloud, eta)});
        rep.warnings.push_back("net counts are greedy-net surrogates within the N_eta/N_eta_2 bracket");
    } else {
        const PlaneCloud cloud = standard_graph_cloud(f, cfg.grid_n, cfg.set_spacing);
        rep.metrics.emplace_back("cloud_points", static_cast<double>(cloud.pts.size()));
        for (double eta : cfg.eta_schedule) {
            const long count = grid_box_count(cloud, eta);
            table.rows.push_back({eta, count});
            if (cfg.method == "range_sum") {
                const auto rb = range_sum_bounds(f, eta);
                bracket.emplace_back(eta, rb.lower, count, rb.upper);
            }
        }
        rep.warnings.push_back("box counts from a sampled cloud are lower estimates");
    }

    const auto table_file = detail::out_path(out_dir, cfg.out_prefix, "boxcounts.csv");
    write_file_atomic(table_file, csv::table_csv(table));
    rep.files.push_back(table_file.string());

    if (cfg.method == "range_sum") {
        const auto bracket_file = detail::out_path(out_dir, cfg.out_prefix, "bracket.csv");
        write_file_atomic(bracket_file, csv::bracket_csv(bracket));
        rep.files.push_back(bracket_file.string());
        for (const auto& [eta, lower, count, upper] : bracket) {
            if (!(lower <= static_cast<double>(count) && static_cast<double>(count) <= upper)) {
                rep.lines.push_back("range-sum bracket violated at eta = " +
                                    detail::fmt_double(eta));
                rep.code = exit_numerical;
            }
        }
    }

    if (cfg.method == "range_sum" && table.rows.size() < 4) {
        rep.warnings.push_back("fewer than 4 eta values: bracket only, no dimension fit");
        return rep;
    }
    const DimensionEstimate est = fit_dimension(table);
    const auto est_file = detail::out_path(out_dir, cfg.out_prefix, "dimension.csv");
    write_file_atomic(est_file, csv::estimate_csv(est));
    rep.files.push_back(est_file.string());
    rep.metrics.emplace_back("slope", est.slope);
    rep.metrics.emplace_back("r_squared", est.r_squared);
    return rep;
}

inline RunReport run_approx(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunReport rep;
    rep.command = "approx";
    const SetValuedMap f = cfg.map->build(cfg.domain);
    const ApproxReport result = approximate_within(f, cfg.epsilon, cfg.depth);

    const auto file = detail::out_path(out_dir, cfg.out_prefix, "approx.csv");
    write_file_atomic(file, csv::approx_csv(result));
    rep.files.push_back(file.string());

    rep.metrics.emplace_back("epsilon", result.epsilon);
    rep.metrics.emplace_back("achieved", result.achieved);
    rep.metrics.emplace_back("degree", static_cast<double>(result.degree));
    rep.metrics.emplace_back("alpha", result.alpha);
    rep.warnings.push_back("achieved error is a grid estimate (lower bound of the sup)");
    if (!result.success) {
        rep.lines.push_back("achieved error does not meet epsilon");
        rep.code = exit_numerical;
    }
    return rep;
}

inline RunReport run_ifs(const ExperimentConfig& cfg, const std::string& out_dir) {
    RunReport rep;
    rep.command = "ifs";
    auto bundle = detail::build_configured_system(cfg);
    const IFSSystem ifs = make_ifs(bundle.sys, cfg.depth, cfg.tol);
    const GraphCloud target = sampled_attractor_cloud(ifs);

    double gap = 0.0;
    for (std::size_t i = 1; i < ifs.attractor->entries.size(); ++i)
        gap = std::max(gap, ifs.attractor->entries[i].u - ifs.attractor->entries[i - 1].u);
    const double delta = cfg.delta_prune.value_or(gap / 2);

    GraphCloud cloud;
    cloud.metric = CloudMetric::pair_sum;
    cloud.reference = ifs.attractor;
    if (cfg.init == "target") {
        cloud = target;
    } else {
        for (const auto& e : ifs.attractor->entries)
            cloud.pts.push_back({e.u, CompactSet::point(0)});
    }

    std::vector<double> distances;
    for (int step = 0; step < cfg.steps; ++step) {
        cloud = hutchinson_step(ifs, cloud, delta);
        distances.push_back(cloud_distance(cloud, target, *ifs.attractor));
    }

    const auto dist_file = detail::out_path(out_dir, cfg.out_prefix, "distances.csv");
    write_file_atomic(dist_file, csv::distances_csv(distances));
    rep.files.push_back(dist_file.string());
    const auto cloud_file = detail::out_path(out_dir, cfg.out_prefix, "cloud.csv");
    write_file_atomic(cloud_file, csv::cloud_csv(cloud));
    rep.files.push_back(cloud_file.string());

    rep.metrics.emplace_back("final_distance", distances.back());
    rep.metrics.emplace_back("grid_gap", gap);
    rep.metrics.emplace_back("delta_prune", delta);
    rep.warnings.push_back("pair-sum distances use nearest-grid reference values");
    return rep;
}

inline RunReport run_check(const ExperimentConfig& cfg, const std::string& out_dir) {
    (void)out_dir;
    RunReport rep;
    rep.command = "check";
    std::mt19937_64 rng(cfg.seed);
    int failures = 0;
    auto verdict = [&](const std::string& name, bool ok, const std::string& detail = "") {
        rep.lines.push_back(std::string(ok ? "pass" : "FAIL") + "  " + name +
                            (detail.empty() ? "" : "  (" + detail + ")"));
        if (!ok) ++failures;
    };

    if (cfg.suite == "hausdorff_axioms") {
        bool sym = true, ident = true, tri = true;
        std::string ce;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = detail::random_set(rng);
            const auto b = detail::random_set(rng);
            const auto c = detail::random_set(rng);
            if (hausdorff(a, b) != hausdorff(b, a)) sym = false;
            if (hausdorff(a, a) != 0.0) ident = false;
            if (hausdorff(a, b) > hausdorff(a, c) + hausdorff(c, b) + 1e-10) {
                tri = false;
                if (ce.empty()) ce = to_string(a) + " | " + to_string(b) + " | " + to_string(c);
            }
        }
        verdict("symmetry", sym);
        verdict("identity", ident);
        verdict("triangle", tri, ce);
    } else if (cfg.suite == "sum_algebra") {
        bool subadd = true, homog = true, cancel = true;
        std::string ce;
        std::uniform_real_distribution<double> lam(-3.0, 3.0);
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = detail::random_set(rng);
            const auto b = detail::random_set(rng);
            const auto c = detail::random_set(rng);
            const auto d = detail::random_set(rng);
            if (hausdorff(minkowski_add(a, c), minkowski_add(b, d)) >
                hausdorff(a, b) + hausdorff(c, d) + 1e-10) {
                subadd = false;
                if (ce.empty()) ce = to_string(a) + " | " + to_string(b);
            }
            const double l = lam(rng);
            if (std::abs(hausdorff(scale(l, a), scale(l, b)) - std::abs(l) * hausdorff(a, b)) >
                1e-10)
                homog = false;
            const auto ha = convex_hull(a), hb = convex_hull(b), hd = convex_hull(d);
            if (std::abs(hausdorff(minkowski_add(ha, hd), minkowski_add(hb, hd)) -
                         hausdorff(ha, hb)) > 1e-10)
                cancel = false;
        }
        verdict("subadditivity", subadd, ce);
        verdict("homogeneity", homog);
        verdict("translation_cancellation", cancel);
    } else if (cfg.suite == "product_bound") {
        bool ok = true;
        std::string ce;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = detail::random_set(rng);
            const auto b = detail::random_set(rng);
            const auto c = detail::random_set(rng);
            if (hausdorff(product(a, b), product(c, b)) > norm(b) * hausdorff(a, c) + 1e-10) {
                ok = false;
                if (ce.empty()) ce = to_string(a) + " | " + to_string(b) + " | " + to_string(c);
            }
        }
        verdict("product_contraction", ok, ce);
    } else if (cfg.suite == "perturbation") {
        bool ok = true;
        const int systems = std::max(1, cfg.trials / 400);
        for (int t = 0; t < systems; ++t) {
            const auto sys = detail::random_check_system(rng);
            const auto grid = evaluate_fractal(sys, 4, cfg.tol);
            const auto [lhs, rhs] = perturbation_gap(sys, grid);
            rep.metrics.emplace_back("lhs_" + std::to_string(t), lhs);
            rep.metrics.emplace_back("rhs_" + std::to_string(t), rhs);
            if (lhs > rhs + 4 * cfg.tol) ok = false;
        }
        verdict("perturbation_bound", ok);
    } else if (cfg.suite == "constrained") {
        const Interval unit{0.0, 1.0};
        auto zero = singleton_map(unit, ScalarExpr::constant(0));
        auto band = envelope_map(unit, ScalarExpr::poly({0.0, -1.0, 1.0}),
                                 ScalarExpr::poly({0.0, 1.0, -1.0}));
        const bool ok =
            constrained_check(zero, band, Partition::of({0.0, 0.5, 1.0}), 0.4, 6, 1e-8, cfg.tol);
        verdict("order_preservation", ok);
    } else if (cfg.suite == "metric_axioms") {
        const Interval unit{0.0, 1.0};
        auto f = constant_map(unit, CompactSet::interval(0, 1));
        auto sys = make_system(f, f, Partition::of({0.0, 0.5, 1.0}), 0.5);
        const auto grid = evaluate_fractal(sys, 4, cfg.tol);
        std::uniform_int_distribution<std::size_t> pick(0, grid.entries.size() - 1);
        std::uniform_real_distribution<double> lo(-2.0, 2.0), len(0.0, 2.0);
        auto random_pair = [&] {
            const double l = lo(rng);
            return std::pair<double, CompactSet>{grid.entries[pick(rng)].u,
                                                 CompactSet::interval(l, l + len(rng))};
        };
        bool dg_ok = true, frak_ok = true;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto a = random_pair(), b = random_pair(), c = random_pair();
            if (dg_distance(a, b) > dg_distance(a, c) + dg_distance(c, b) + 1e-10) dg_ok = false;
            if (frak_distance(a, b, grid) >
                frak_distance(a, c, grid) + frak_distance(c, b, grid) + 1e-10)
                frak_ok = false;
        }
        verdict("graph_sum_triangle", dg_ok);
        verdict("pair_sum_triangle", frak_ok);
    } else {
        throw config_error("unknown check suite '" + cfg.suite + "'");
    }

    if (failures > 0) {
        rep.code = exit_numerical;
        rep.lines.push_back(std::to_string(failures) + " properties failed");
    }
    return rep;
}

inline RunReport run(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    try {
        if (cfg.command == "build") rep = run_build(cfg, out_dir);
        else if (cfg.command == "dimension") rep = run_dimension(cfg, out_dir);
        else if (cfg.command == "approx") rep = run_approx(cfg, out_dir);
        else if (cfg.command == "ifs") rep = run_ifs(cfg, out_dir);
        else if (cfg.command == "check") rep = run_check(cfg, out_dir);
        else throw config_error("unknown command '" + cfg.command + "'");
    } catch (const capacity_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("capacity: ") + ex.what());
        rep.code = exit_capacity;
    } catch (const config_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("config: ") + ex.what());
        rep.code = exit_validation;
    } catch (const incompatible_base_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("incompatible base: ") + ex.what());
        rep.code = exit_validation;
    } catch (const endpoint_not_singleton_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("precondition: ") + ex.what());
        rep.code = exit_validation;
    } catch (const order_violated_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("precondition: ") + ex.what());
        rep.code = exit_validation;
    } catch (const degenerate_fit_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("numerical: ") + ex.what());
        rep.code = exit_numerical;
    } catch (const degree_cap_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("numerical: ") + ex.what());
        rep.code = exit_numerical;
    } catch (const no_convergence_error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("numerical: ") + ex.what());
        rep.code = exit_numerical;
    } catch (const error& ex) {
        rep.command = cfg.command;
        rep.lines.push_back(std::string("error: ") + ex.what());
        rep.code = exit_validation;
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline void print_report(std::ostream& os, const RunReport& rep) {
    os << "command: " << rep.command << "\n";
    os << "status: " << (rep.code == exit_ok ? "ok" : "failed (exit " + std::to_string(rep.code) + ")")
       << "\n";
    os << "wall_seconds: " << rep.wall_seconds << "\n";
    for (const auto& [k, v] : rep.metrics) os << "  " << k << " = " << detail::fmt_double(v) << "\n";
    for (const auto& w : rep.warnings) os << "note: " << w << "\n";
    for (const auto& l : rep.lines) os << l << "\n";
    if (!rep.files.empty()) {
        os << "files:\n";
        for (const auto& f : rep.files) os << "  " << f << "\n";
    }
}

} // namespace svf
