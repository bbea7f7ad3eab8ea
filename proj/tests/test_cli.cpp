#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "svf/config.hpp"
#include "svf/csv.hpp"
#include "svf/runner.hpp"

using namespace svf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("svf_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json minimal_build_config() {
    return json{
        {"schema", 1},
        {"command", "build"},
        {"out_prefix", "t"},
        {"domain", {0, 1}},
        {"map", {{"family", "constant"}, {"set", {{0, 1}}}}},
        {"base", {{"variant", "same"}}},
        {"partition", {0, 0.5, 1}},
        {"alpha", 0.5},
        {"depth", 4},
    };
}

} // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config_text("not json"), config_error);
    CHECK_THROWS_AS(parse_config(json{{"command", "build"}}), config_error); // no schema
    CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"command", "fly"}}), config_error);

    auto bad_alpha = minimal_build_config();
    bad_alpha["alpha"] = 1.0;
    CHECK_THROWS_AS(parse_config(bad_alpha), config_error);

    auto bad_partition = minimal_build_config();
    bad_partition["partition"] = {0.0, 0.5, 0.5, 1.0};
    CHECK_THROWS_AS(parse_config(bad_partition), config_error);

    auto no_eps = json{{"schema", 1},
                       {"command", "approx"},
                       {"map", {{"family", "constant"}, {"set", {{0, 1}}}}}};
    CHECK_THROWS_AS(parse_config(no_eps), config_error); // epsilon = 0 rejected

    auto bad_eta = json{{"schema", 1},
                        {"command", "dimension"},
                        {"map", {{"family", "constant"}, {"set", {{0, 1}}}}},
                        {"eta", json::array()}};
    CHECK_THROWS_AS(parse_config(bad_eta), config_error);

    CHECK(parse_config(minimal_build_config()).command == "build");
}

TEST_CASE("map descriptors round-trip through json") {
    const char* samples[] = {
        R"({"family":"constant","set":[[0,1],[2,3]]})",
        R"({"family":"singleton","f":{"kind":"poly","coeffs":[0,1,-1]}})",
        R"({"family":"envelope","lo":{"kind":"poly","coeffs":[0]},"hi":{"kind":"sqrt","scale":1,"shift":0}})",
        R"({"family":"cantor","depth":3})",
        R"({"family":"cantor","depth":2,"scale":{"kind":"sine","amplitude":1,"frequency":2,"phase":0}})",
        R"({"family":"sum","a":{"family":"constant","set":[[0,1]]},"b":{"family":"singleton","f":{"kind":"abs","scale":1,"center":0.5}}})",
        R"({"family":"scaled","lambda":0.5,"of":{"family":"constant","set":[[-1,1]]}})",
        R"({"family":"scaled","t":{"kind":"poly","coeffs":[1,1]},"of":{"family":"cantor","depth":1}})",
        R"({"family":"product","a":{"family":"constant","set":[[1,2]]},"b":{"family":"constant","set":[[3,4]]}})",
        R"({"family":"translate","of":{"family":"constant","set":[[-1,1]]},"by":{"kind":"sinrecip","amplitude":1}})",
        R"({"family":"singleton","f":{"kind":"piecewise","knots":[0,0.5,1],"values":[0,1,0]}})",
    };
    const Interval unit{0.0, 1.0};
    for (const char* text : samples) {
        const auto desc = map_from_json(json::parse(text));
        const auto echoed = map_from_json(map_to_json(desc));
        CHECK(map_to_json(desc) == map_to_json(echoed));
        // Both builds evaluate identically.
        const auto m1 = desc.build(unit);
        const auto m2 = echoed.build(unit);
        for (double u : {0.0, 0.21, 0.5, 0.77, 1.0})
            CHECK(hausdorff(m1(u), m2(u)) <= 1e-15);
    }
    CHECK_THROWS_AS(map_from_json(json::parse(R"({"family":"blob"})")), config_error);
    CHECK_THROWS_AS(expr_from_json(json::parse(R"({"kind":"exp"})")), config_error);

    // Base descriptors round-trip too.
    for (const char* text :
         {R"({"variant":"same"})", R"({"variant":"multiplier","t":{"kind":"poly","coeffs":[1]}})",
          R"({"variant":"reparam","t":{"kind":"poly","coeffs":[0,1]}})",
          R"({"variant":"custom","map":{"family":"constant","set":[[0,1]]}})"}) {
        const auto desc = base_from_json(json::parse(text));
        CHECK(base_to_json(base_from_json(base_to_json(desc))) == base_to_json(desc));
    }
    CHECK_THROWS_AS(base_from_json(json::parse(R"({"variant":"mystery"})")), config_error);
}

TEST_CASE("set csv row form") {
    const auto a = canonicalize({{0, 1}, {3, 4}});
    const auto b = CompactSet::point(2);
    const std::string text = csv::sets_csv({a, b});
    CHECK(text == "set_id,part_index,lo,hi\n0,0,0,1\n0,1,3,4\n1,0,2,2\n");
}

TEST_CASE("run_build writes a grid and reports the residual") {
    const auto dir = fresh_dir("build");
    const auto cfg = parse_config(minimal_build_config());
    const auto rep = run(cfg, dir.string());
    CHECK(rep.code == exit_ok);
    REQUIRE(rep.files.size() == 1);

    const std::string grid = slurp(rep.files.front());
    CHECK(grid.rfind("address,u,part_index,lo,hi\n", 0) == 0);
    // Constant system: every value is [-1, 2] up to tol.
    std::istringstream rows(grid);
    std::string line;
    std::getline(rows, line);
    int parsed = 0;
    while (std::getline(rows, line)) {
        const auto c3 = line.rfind(',');
        const auto c2 = line.rfind(',', c3 - 1);
        const double hi = std::stod(line.substr(c3 + 1));
        const double lo = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK(hi == doctest::Approx(2.0).epsilon(1e-8));
        ++parsed;
    }
    CHECK(parsed > 10);

    double res = -1.0;
    for (const auto& [k, v] : rep.metrics)
        if (k == "residual") res = v;
    CHECK(res >= 0.0);
    CHECK(res <= 4e-9);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    auto j = minimal_build_config();
    const auto cfg = parse_config(j);
    run(cfg, dir1.string());
    run(cfg, dir2.string());
    CHECK(slurp(dir1 / "t_grid.csv") == slurp(dir2 / "t_grid.csv"));

    json check = {{"schema", 1}, {"command", "check"}, {"suite", "hausdorff_axioms"},
                  {"trials", 500}, {"seed", 7}};
    const auto c = parse_config(check);
    const auto r1 = run(c, dir1.string());
    const auto r2 = run(c, dir2.string());
    CHECK(r1.lines == r2.lines);
    CHECK(r1.code == exit_ok);
}

TEST_CASE("exit codes") {
    const auto dir = fresh_dir("codes");

    // Incompatible base: validation error (2).
    auto bad = minimal_build_config();
    bad["map"] = {{"family", "singleton"}, {"f", {{"kind", "poly"}, {"coeffs", {0, 1}}}}};
    bad["base"] = {{"variant", "custom"},
                   {"map", {{"family", "singleton"}, {"f", {{"kind", "poly"}, {"coeffs", {0}}}}}}};
    CHECK(run(parse_config(bad), dir.string()).code == exit_validation);

    // Degenerate fit: numerical error (3). All four meshes give two boxes.
    json flat = {{"schema", 1},        {"command", "dimension"},
                 {"out_prefix", "f"},  {"method", "grid_box"},
                 {"domain", {0, 1}},   {"map", {{"family", "constant"}, {"set", {{0, 0}}}}},
                 {"grid_n", 64},       {"set_spacing", 0.25},
                 {"eta", {0.9, 0.8, 0.7, 0.6}}};
    CHECK(run(parse_config(flat), dir.string()).code == exit_numerical);

    // Capacity: exit 4.
    json big = minimal_build_config();
    big["depth"] = 24;
    CHECK(run(parse_config(big), dir.string()).code == exit_capacity);

    // Unknown suite: validation (2).
    json suite = {{"schema", 1}, {"command", "check"}, {"suite", "nope"}};
    CHECK(run(parse_config(suite), dir.string()).code == exit_validation);
}

TEST_CASE("run_dimension on the constant band recovers slope 2") {
    const auto dir = fresh_dir("dim");
    json j = {{"schema", 1},
              {"command", "dimension"},
              {"out_prefix", "band"},
              {"method", "grid_box"},
              {"domain", {0, 1}},
              {"map", {{"family", "constant"}, {"set", {{-1, 1}}}}},
              {"grid_n", 257},
              {"set_spacing", 0.00390625},
              {"eta", {{"base", 2.0}, {"j_min", 3, }, {"j_max", 7}}}};
    const auto rep = run(parse_config(j), dir.string());
    CHECK(rep.code == exit_ok);
    double slope = 0.0;
    for (const auto& [k, v] : rep.metrics)
        if (k == "slope") slope = v;
    CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK(fs::exists(dir / "band_boxcounts.csv"));
    CHECK(fs::exists(dir / "band_dimension.csv"));
}

TEST_CASE("run_check suites pass") {
    const auto dir = fresh_dir("check");
    for (const char* suite :
         {"hausdorff_axioms", "sum_algebra", "product_bound", "perturbation", "constrained",
          "metric_axioms"}) {
        json j = {{"schema", 1}, {"command", "check"}, {"suite", suite}, {"trials", 800},
                  {"seed", 3}};
        const auto rep = run(parse_config(j), dir.string());
        CHECK_MESSAGE(rep.code == exit_ok, suite);
    }
}

TEST_CASE("run_approx and run_ifs produce their records") {
    const auto dir = fresh_dir("misc");
    json a = {{"schema", 1},
              {"command", "approx"},
              {"out_prefix", "p"},
              {"domain", {0, 1}},
              {"map",
               {{"family", "envelope"},
                {"lo", {{"kind", "poly"}, {"coeffs", {0}}}},
                {"hi", {{"kind", "poly"}, {"coeffs", {0, 0, 1}}}}}},
              {"epsilon", 0.1},
              {"depth", 4}};
    const auto ra = run(parse_config(a), dir.string());
    CHECK(ra.code == exit_ok);
    const std::string approx = slurp(dir / "p_approx.csv");
    CHECK(approx.rfind("epsilon,degree,alpha,achieved,partition_points\n", 0) == 0);

    json i = {{"schema", 1},
              {"command", "ifs"},
              {"out_prefix", "w"},
              {"domain", {0, 1}},
              {"map", {{"family", "constant"}, {"set", {{0, 1}}}}},
              {"base", {{"variant", "same"}}},
              {"partition", {0, 0.5, 1}},
              {"alpha", 0.4},
              {"depth", 4},
              {"steps", 12},
              {"init", "zero"}};
    const auto ri = run(parse_config(i), dir.string());
    CHECK(ri.code == exit_ok);
    const std::string dist = slurp(dir / "w_distances.csv");
    CHECK(dist.rfind("step,distance\n", 0) == 0);
    // Distances decrease toward the sampled attractor.
    std::vector<double> ds;
    std::istringstream ss(dist);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) ds.push_back(std::stod(line.substr(line.find(',') + 1)));
    REQUIRE(ds.size() == 12);
    CHECK(ds.back() < ds.front());

    // steps = 1 writes exactly one distance row.
    i["steps"] = 1;
    i["out_prefix"] = "one";
    CHECK(run(parse_config(i), dir.string()).code == exit_ok);
    const std::string one = slurp(dir / "one_distances.csv");
    CHECK(one == "step,distance\n" + one.substr(one.find('\n') + 1));
    CHECK(std::count(one.begin(), one.end(), '\n') == 2);
}
