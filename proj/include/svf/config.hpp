#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "svf/compact_set.hpp"
#include "svf/error.hpp"
#include "svf/fractal.hpp"
#include "svf/scalar_expr.hpp"
#include "svf/set_valued_map.hpp"

namespace svf {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scalar expression descriptors

inline json expr_to_json(const ScalarExpr& e) {
    json j;
    switch (e.kind()) {
    case ScalarExpr::Kind::poly:
        j["kind"] = "poly";
        j["coeffs"] = e.params();
        break;
    case ScalarExpr::Kind::sine:
        j["kind"] = "sine";
        j["amplitude"] = e.params()[0];
        j["frequency"] = e.params()[1];
        j["phase"] = e.params()[2];
        break;
    case ScalarExpr::Kind::sin_reciprocal:
        j["kind"] = "sinrecip";
        j["amplitude"] = e.params()[0];
        break;
    case ScalarExpr::Kind::sqrt_affine:
        j["kind"] = "sqrt";
        j["scale"] = e.params()[0];
        j["shift"] = e.params()[1];
        break;
    case ScalarExpr::Kind::abs_affine:
        j["kind"] = "abs";
        j["scale"] = e.params()[0];
        j["center"] = e.params()[1];
        break;
    case ScalarExpr::Kind::piecewise:
        j["kind"] = "piecewise";
        j["knots"] = e.params();
        j["values"] = e.params2();
        break;
    }
    return j;
}

inline ScalarExpr expr_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw config_error("scalar expression needs a 'kind' field");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "poly") return ScalarExpr::poly(j.at("coeffs").get<std::vector<double>>());
        if (kind == "sine")
            return ScalarExpr::sine(j.at("amplitude").get<double>(),
                                    j.at("frequency").get<double>(),
                                    j.value("phase", 0.0));
        if (kind == "sinrecip") return ScalarExpr::sin_reciprocal(j.value("amplitude", 1.0));
        if (kind == "sqrt")
            return ScalarExpr::sqrt_affine(j.value("scale", 1.0), j.value("shift", 0.0));
        if (kind == "abs")
            return ScalarExpr::abs_affine(j.value("scale", 1.0), j.value("center", 0.0));
        if (kind == "piecewise")
            return ScalarExpr::piecewise(j.at("knots").get<std::vector<double>>(),
                                         j.at("values").get<std::vector<double>>());
    } catch (const json::exception& ex) {
        throw config_error(std::string("bad scalar expression: ") + ex.what());
    }
    throw config_error("unknown scalar expression kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Map family descriptors

/// Serializable description of a set-valued map; the buildable counterpart
/// of the JSON "map" blocks in experiment configs.
struct MapDesc {
    std::string family;
    CompactSet set;                          // constant
    std::optional<ScalarExpr> e1, e2;        // family-specific scalar functions
    int depth = 0;                           // cantor
    std::optional<double> lambda;            // scaled (scalar constant form)
    std::shared_ptr<const MapDesc> a, b;     // composite children

    SetValuedMap build(Interval domain) const;
};

inline json map_to_json(const MapDesc& d) {
    json j;
    j["family"] = d.family;
    if (d.family == "constant") {
        json parts = json::array();
        for (const auto& p : d.set.parts()) parts.push_back({p.lo, p.hi});
        j["set"] = parts;
    } else if (d.family == "singleton") {
        j["f"] = expr_to_json(*d.e1);
    } else if (d.family == "envelope") {
        j["lo"] = expr_to_json(*d.e1);
        j["hi"] = expr_to_json(*d.e2);
    } else if (d.family == "cantor") {
        j["depth"] = d.depth;
        if (d.e1) j["scale"] = expr_to_json(*d.e1);
    } else if (d.family == "sum" || d.family == "product") {
        j["a"] = map_to_json(*d.a);
        j["b"] = map_to_json(*d.b);
    } else if (d.family == "scaled") {
        if (d.lambda) j["lambda"] = *d.lambda;
        else j["t"] = expr_to_json(*d.e1);
        j["of"] = map_to_json(*d.a);
    } else if (d.family == "translate") {
        j["of"] = map_to_json(*d.a);
        j["by"] = expr_to_json(*d.e1);
    }
    return j;
}

inline MapDesc map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw config_error("map descriptor needs a 'family' field");
    MapDesc d;
    d.family = j.at("family").get<std::string>();
    try {
        if (d.family == "constant") {
            std::vector<Interval> raw;
            for (const auto& p : j.at("set")) {
                if (!p.is_array() || p.size() != 2)
                    throw config_error("constant map: 'set' entries must be [lo, hi]");
                raw.push_back(Interval{p[0].get<double>(), p[1].get<double>()});
            }
            d.set = canonicalize(std::move(raw));
        } else if (d.family == "singleton") {
            d.e1 = expr_from_json(j.at("f"));
        } else if (d.family == "envelope") {
            d.e1 = expr_from_json(j.at("lo"));
            d.e2 = expr_from_json(j.at("hi"));
        } else if (d.family == "cantor") {
            d.depth = j.at("depth").get<int>();
            if (j.contains("scale")) d.e1 = expr_from_json(j.at("scale"));
        } else if (d.family == "sum" || d.family == "product") {
            d.a = std::make_shared<MapDesc>(map_from_json(j.at("a")));
            d.b = std::make_shared<MapDesc>(map_from_json(j.at("b")));
        } else if (d.family == "scaled") {
            if (j.contains("lambda")) d.lambda = j.at("lambda").get<double>();
            else d.e1 = expr_from_json(j.at("t"));
            d.a = std::make_shared<MapDesc>(map_from_json(j.at("of")));
        } else if (d.family == "translate") {
            d.a = std::make_shared<MapDesc>(map_from_json(j.at("of")));
            d.e1 = expr_from_json(j.at("by"));
        } else {
            throw config_error("unknown map family '" + d.family + "'");
        }
    } catch (const json::exception& ex) {
        throw config_error("bad map descriptor: " + std::string(ex.what()));
    }
    return d;
}

inline SetValuedMap MapDesc::build(Interval domain) const {
    if (family == "constant") return constant_map(domain, set);
    if (family == "singleton") return singleton_map(domain, *e1);
    if (family == "envelope") return envelope_map(domain, *e1, *e2);
    if (family == "cantor")
        return e1 ? cantor_map(domain, depth, *e1) : cantor_map(domain, depth);
    if (family == "sum") return sum_map(a->build(domain), b->build(domain));
    if (family == "product") return product_map(a->build(domain), b->build(domain));
    if (family == "scaled") {
        if (lambda) return scaled_map(*lambda, a->build(domain));
        return scaled_map(*e1, a->build(domain));
    }
    if (family == "translate") return translate_map(a->build(domain), *e1);
    throw config_error("unknown map family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Base map descriptors

struct BaseDesc {
    std::string variant = "multiplier"; // reparam | multiplier | custom | same
    ScalarExpr t = ScalarExpr::constant(1.0);
    std::optional<MapDesc> custom;

    /// Resolves against the target map F (the "same" variant reuses it).
    SetValuedMap build(const SetValuedMap& f, const MapDesc& f_desc, double tol_compat) const {
        if (variant == "same") return f_desc.build(f.domain);
        if (variant == "custom") {
            if (!custom) throw config_error("custom base needs a 'map'");
            return custom->build(f.domain);
        }
        if (variant == "reparam")
            return build_base(f, BaseFunctionSpec::reparam(t), tol_compat);
        if (variant == "multiplier")
            return build_base(f, BaseFunctionSpec::multiplier(t), tol_compat);
        throw config_error("unknown base variant '" + variant + "'");
    }
};

inline json base_to_json(const BaseDesc& b) {
    json j;
    j["variant"] = b.variant;
    if (b.variant == "reparam" || b.variant == "multiplier") j["t"] = expr_to_json(b.t);
    if (b.variant == "custom" && b.custom) j["map"] = map_to_json(*b.custom);
    return j;
}

inline BaseDesc base_from_json(const json& j) {
    BaseDesc b;
    if (!j.is_object() || !j.contains("variant"))
        throw config_error("base descriptor needs a 'variant' field");
    b.variant = j.at("variant").get<std::string>();
    if (b.variant == "reparam" || b.variant == "multiplier") {
        if (j.contains("t")) b.t = expr_from_json(j.at("t"));
    } else if (b.variant == "custom") {
        b.custom = map_from_json(j.at("map"));
    } else if (b.variant != "same") {
        throw config_error("unknown base variant '" + b.variant + "'");
    }
    return b;
}

// ---------------------------------------------------------------------------
// Experiment configuration

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    double tol_compat = 1e-9;
    std::string out_prefix = "run";

    Interval domain{0.0, 1.0};
    std::optional<MapDesc> map;
    std::vector<double> partition;
    double alpha = 0.0;
    BaseDesc base;
    int depth = 4;
    int grid_n = 257;
    double set_spacing = 0.01;

    std::string method = "grid_box";            // dimension
    std::vector<double> eta_schedule;           // dimension / range_sum
    double epsilon = 0.0;                       // approx
    int steps = 0;                              // ifs
    std::string init = "zero";                  // ifs
    std::optional<double> delta_prune;          // ifs
    std::string suite;                          // check
    int trials = 10000;                         // check

    json raw;
};

inline ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw config_error("config root must be an object");
    if (j.value("schema", 0) != 1) throw config_error("config needs \"schema\": 1");
    ExperimentConfig c;
    c.raw = j;
    c.command = j.value("command", "");
    static const std::vector<std::string> commands{"build", "dimension", "approx", "ifs",
                                                   "check"};
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
        throw config_error("unknown command '" + c.command + "'");

    try {
        c.seed = j.value("seed", std::uint64_t{0});
        c.tol = j.value("tol", 1e-9);
        c.tol_compat = j.value("tol_compat", 1e-9);
        c.out_prefix = j.value("out_prefix", std::string("run"));
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            if (!d.is_array() || d.size() != 2) throw config_error("'domain' must be [lo, hi]");
            c.domain = Interval{d[0].get<double>(), d[1].get<double>()};
            if (!(c.domain.lo < c.domain.hi)) throw config_error("'domain' must have lo < hi");
        }
        if (j.contains("map")) c.map = map_from_json(j.at("map"));
        if (j.contains("partition"))
            c.partition = j.at("partition").get<std::vector<double>>();
        c.alpha = j.value("alpha", 0.0);
        if (j.contains("base")) c.base = base_from_json(j.at("base"));
        c.depth = j.value("depth", 4);
        c.grid_n = j.value("grid_n", 257);
        c.set_spacing = j.value("set_spacing", 0.01);
        c.method = j.value("method", std::string("grid_box"));
        if (j.contains("eta")) {
            const auto& e = j.at("eta");
            if (e.is_array()) {
                c.eta_schedule = e.get<std::vector<double>>();
            } else if (e.is_object()) {
                const double base_v = e.at("base").get<double>();
                const int j_min = e.at("j_min").get<int>();
                const int j_max = e.at("j_max").get<int>();
                if (!(base_v > 1.0) || j_min > j_max)
                    throw config_error("'eta' schedule needs base > 1 and j_min <= j_max");
                for (int k = j_min; k <= j_max; ++k)
                    c.eta_schedule.push_back(std::pow(base_v, -k));
            } else {
                throw config_error("'eta' must be a list or {base, j_min, j_max}");
            }
        }
        c.epsilon = j.value("epsilon", 0.0);
        c.steps = j.value("steps", 0);
        c.init = j.value("init", std::string("zero"));
        if (j.contains("delta_prune")) c.delta_prune = j.at("delta_prune").get<double>();
        c.suite = j.value("suite", std::string());
        c.trials = j.value("trials", 10000);
    } catch (const json::exception& ex) {
        throw config_error("bad config: " + std::string(ex.what()));
    }

    // Per-command validation.
    if (!(std::abs(c.alpha) < 1.0)) throw config_error("|alpha| must be < 1");
    if (c.depth < 0 || c.depth > 24) throw config_error("'depth' out of range");
    if (c.grid_n < 2 || c.grid_n > 5'000'000) throw config_error("'grid_n' out of range");
    const bool needs_map =
        c.command == "build" || c.command == "dimension" || c.command == "approx" ||
        c.command == "ifs";
    if (needs_map && !c.map) throw config_error("command '" + c.command + "' needs a 'map'");
    if (c.command == "build" || c.command == "ifs") {
        if (c.partition.size() < 3)
            throw config_error("command '" + c.command + "' needs a partition of >= 3 knots");
        for (std::size_t i = 1; i < c.partition.size(); ++i)
            if (!(c.partition[i - 1] < c.partition[i]))
                throw config_error("partition knots must be strictly increasing");
    }
    if (c.command == "dimension") {
        static const std::vector<std::string> methods{"grid_box", "net_cover", "range_sum"};
        if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
            throw config_error("unknown dimension method '" + c.method + "'");
        if (c.eta_schedule.empty()) throw config_error("dimension runs need an 'eta' schedule");
        for (double e : c.eta_schedule)
            if (!(e > 0.0)) throw config_error("eta values must be positive");
    }
    if (c.command == "approx" && !(c.epsilon > 0.0))
        throw config_error("approx runs need epsilon > 0");
    if (c.command == "ifs") {
        if (c.steps < 1) throw config_error("ifs runs need steps >= 1");
        if (c.init != "zero" && c.init != "target")
            throw config_error("ifs 'init' must be 'zero' or 'target'");
    }
    if (c.command == "check" && c.suite.empty())
        throw config_error("check runs need a 'suite'");
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw config_error("config parse error: " + std::string(ex.what()));
    }
    return parse_config(j);
}

} // namespace svf
