#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "svf/bernstein.hpp"
#include "svf/compact_set.hpp"
#include "svf/dimension.hpp"
#include "svf/error.hpp"
#include "svf/fractal.hpp"
#include "svf/graph.hpp"

namespace svf {

/// Writes via a temp file plus rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

namespace csv {

using detail::fmt_double;

inline std::string address_string(const std::vector<int>& address) {
    std::string s;
    for (std::size_t i = 0; i < address.size(); ++i) {
        if (i > 0) s += '.';
        s += std::to_string(address[i] + 1); // 1-based branch labels
    }
    return s;
}

/// Columns: set_id, part_index, lo, hi.
inline std::string sets_csv(const std::vector<CompactSet>& sets) {
    std::string out = "set_id,part_index,lo,hi\n";
    for (std::size_t id = 0; id < sets.size(); ++id) {
        const auto& parts = sets[id].parts();
        for (std::size_t k = 0; k < parts.size(); ++k)
            out += std::to_string(id) + "," + std::to_string(k) + "," + fmt_double(parts[k].lo) +
                   "," + fmt_double(parts[k].hi) + "\n";
    }
    return out;
}

/// Columns: address, u, part_index, lo, hi.
inline std::string grid_csv(const GridFunction& grid) {
    std::string out = "address,u,part_index,lo,hi\n";
    for (const auto& e : grid.entries) {
        const auto& parts = e.value.parts();
        for (std::size_t k = 0; k < parts.size(); ++k)
            out += address_string(e.address) + "," + fmt_double(e.u) + "," + std::to_string(k) +
                   "," + fmt_double(parts[k].lo) + "," + fmt_double(parts[k].hi) + "\n";
    }
    return out;
}

/// Columns: u, part_index, lo, hi.
inline std::string cloud_csv(const GraphCloud& cloud) {
    std::string out = "u,part_index,lo,hi\n";
    for (const auto& p : cloud.pts) {
        const auto& parts = p.second.parts();
        for (std::size_t k = 0; k < parts.size(); ++k)
            out += fmt_double(p.first) + "," + std::to_string(k) + "," +
                   fmt_double(parts[k].lo) + "," + fmt_double(parts[k].hi) + "\n";
    }
    return out;
}

/// Columns: u, y.
inline std::string plane_csv(const PlaneCloud& cloud) {
    std::string out = "u,y\n";
    for (const auto& p : cloud.pts) out += fmt_double(p[0]) + "," + fmt_double(p[1]) + "\n";
    return out;
}

/// Columns: eta, count, method_tag.
inline std::string table_csv(const BoxCountTable& table) {
    std::string out = "eta,count,method_tag\n";
    for (const auto& r : table.rows)
        out += fmt_double(r.eta) + "," + std::to_string(r.count) + "," + table.method_tag + "\n";
    return out;
}

/// One-row record: slope, intercept, r_squared, eta_min, eta_max.
inline std::string estimate_csv(const DimensionEstimate& est) {
    std::string out = "slope,intercept,r_squared,eta_min,eta_max\n";
    out += fmt_double(est.slope) + "," + fmt_double(est.intercept) + "," +
           fmt_double(est.r_squared) + "," + fmt_double(est.eta_min) + "," +
           fmt_double(est.eta_max) + "\n";
    return out;
}

/// Columns: eta, lower, count, upper, within.
inline std::string bracket_csv(const std::vector<std::tuple<double, double, long, double>>& rows) {
    std::string out = "eta,lower,count,upper,within\n";
    for (const auto& [eta, lower, count, upper] : rows) {
        const bool ok = lower <= static_cast<double>(count) && static_cast<double>(count) <= upper;
        out += fmt_double(eta) + "," + fmt_double(lower) + "," + std::to_string(count) + "," +
               fmt_double(upper) + "," + (ok ? "1" : "0") + "\n";
    }
    return out;
}

/// One-row record: epsilon, degree, alpha, achieved, partition (semicolon list).
inline std::string approx_csv(const ApproxReport& rep) {
    std::string pts;
    for (std::size_t i = 0; i < rep.partition.size(); ++i) {
        if (i > 0) pts += ';';
        pts += fmt_double(rep.partition[i]);
    }
    std::string out = "epsilon,degree,alpha,achieved,partition_points\n";
    out += fmt_double(rep.epsilon) + "," + std::to_string(rep.degree) + "," +
           fmt_double(rep.alpha) + "," + fmt_double(rep.achieved) + "," + pts + "\n";
    return out;
}

/// Columns: step, distance.
inline std::string distances_csv(const std::vector<double>& distances) {
    std::string out = "step,distance\n";
    for (std::size_t i = 0; i < distances.size(); ++i)
        out += std::to_string(i + 1) + "," + fmt_double(distances[i]) + "\n";
    return out;
}

} // namespace csv
} // namespace svf
