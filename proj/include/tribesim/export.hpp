#pragma once

// Result tables (CSV / JSON), per-run series, and graph snapshots (DOT and
// plain edge list).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "tribesim/error.hpp"
#include "tribesim/graph.hpp"
#include "tribesim/harness.hpp"
#include "tribesim/settings.hpp"
#include "tribesim/tribes.hpp"

namespace tribesim {

inline constexpr const char* kVersion = "1.0.0";

using ResultTable = SweepResult;

enum class TableFormat { csv, json };

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string format_fixed(double x, int precision) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline nlohmann::json json_value(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

// CSV ------------------------------------------------------------------------

/// One row per (grid point, metric). Undefined means are empty cells. The
/// master seed and the point's effective config ride along on every row.
inline std::string results_csv(const ResultTable& table) {
    std::string out = "grid_point,metric,mean,std,undefined_count,defined_count,single_sample,master_seed,config\n";
    for (const AggregateRow& row : table.rows) {
        out += row.label + "," + row.metric + "," + detail::cell(row.mean) + "," + format_double(row.std) + "," +
               std::to_string(row.undefined) + "," + std::to_string(row.defined) + "," +
               (row.single_sample ? "true" : "false") + "," + std::to_string(table.master_seed) + "," +
               table.point_configs.at(row.point) + "\n";
    }
    return out;
}

inline std::string records_csv(const ResultTable& table) {
    std::string out = "grid_point,replication,seed";
    for (const auto& m : table.metric_names) out += "," + m;
    out += ",master_seed,config\n";
    for (const ReplicationRecord& r : table.records) {
        out += table.point_labels.at(r.point) + "," + std::to_string(r.replication) + "," + std::to_string(r.seed);
        for (const auto& v : r.values) out += "," + detail::cell(v);
        out += "," + std::to_string(table.master_seed) + "," + table.point_configs.at(r.point) + "\n";
    }
    return out;
}

// JSON -----------------------------------------------------------------------

inline nlohmann::json results_json(const ResultTable& table, const nlohmann::json& metadata) {
    nlohmann::json doc;
    doc["metadata"] = metadata;
    doc["metadata"]["master_seed"] = table.master_seed;
    doc["metadata"]["version"] = kVersion;
    doc["metrics"] = table.metric_names;

    nlohmann::json points = nlohmann::json::array();
    for (std::size_t p = 0; p < table.point_labels.size(); ++p) {
        points.push_back({{"grid_point", table.point_labels[p]}, {"config", table.point_configs[p]}});
    }
    doc["grid"] = points;

    nlohmann::json rows = nlohmann::json::array();
    for (const AggregateRow& row : table.rows) {
        rows.push_back({{"grid_point", row.label},
                        {"metric", row.metric},
                        {"mean", detail::json_value(row.mean)},
                        {"std", row.std},
                        {"undefined_count", row.undefined},
                        {"defined_count", row.defined},
                        {"single_sample", row.single_sample}});
    }
    doc["rows"] = rows;

    nlohmann::json records = nlohmann::json::array();
    for (const ReplicationRecord& r : table.records) {
        nlohmann::json values = nlohmann::json::object();
        for (std::size_t m = 0; m < table.metric_names.size(); ++m) {
            values[table.metric_names[m]] = detail::json_value(r.values[m]);
        }
        records.push_back({{"grid_point", table.point_labels[r.point]},
                           {"replication", r.replication},
                           {"seed", r.seed},
                           {"values", values}});
    }
    doc["records"] = records;
    return doc;
}

/// Rebuilds a table from results_json output. Rows are read as stored, not
/// recomputed.
inline ResultTable parse_results_json(const nlohmann::json& doc) {
    ResultTable t;
    try {
        t.master_seed = doc.at("metadata").at("master_seed").get<std::uint64_t>();
        t.metric_names = doc.at("metrics").get<std::vector<std::string>>();
        for (const auto& p : doc.at("grid")) {
            t.point_labels.push_back(p.at("grid_point").get<std::string>());
            t.point_configs.push_back(p.at("config").get<std::string>());
        }
        auto point_index = [&](const std::string& label) {
            const auto it = std::find(t.point_labels.begin(), t.point_labels.end(), label);
            if (it == t.point_labels.end()) throw Error(ErrorCode::parse_error, "unknown grid point " + label);
            return static_cast<std::size_t>(it - t.point_labels.begin());
        };
        for (const auto& r : doc.at("records")) {
            ReplicationRecord rec;
            rec.point = point_index(r.at("grid_point").get<std::string>());
            rec.replication = r.at("replication").get<std::size_t>();
            rec.seed = r.at("seed").get<std::uint64_t>();
            for (const auto& m : t.metric_names) {
                const auto& v = r.at("values").at(m);
                rec.values.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
            }
            t.records.push_back(std::move(rec));
        }
        for (const auto& r : doc.at("rows")) {
            AggregateRow row;
            row.label = r.at("grid_point").get<std::string>();
            row.point = point_index(row.label);
            row.metric = r.at("metric").get<std::string>();
            if (!r.at("mean").is_null()) row.mean = r.at("mean").get<double>();
            row.std = r.at("std").get<double>();
            row.undefined = r.at("undefined_count").get<std::size_t>();
            row.defined = r.at("defined_count").get<std::size_t>();
            row.single_sample = r.at("single_sample").get<bool>();
            t.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed results document: ") + e.what());
    }
    return t;
}

inline void write_results(const ResultTable& table, const std::string& path, TableFormat format,
                          const nlohmann::json& metadata = nlohmann::json::object()) {
    if (table.rows.empty()) throw Error(ErrorCode::invalid_argument, "refusing to write an empty result table");
    if (format == TableFormat::csv) {
        write_text_file(path, results_csv(table));
    } else {
        write_text_file(path, results_json(table, metadata).dump(2) + "\n");
    }
}

// Per-run series ---------------------------------------------------------------

inline std::string fitness_csv(const FitnessVector& fitness, std::uint64_t seed, const std::string& config) {
    std::string out = "agent,fitness,master_seed,config\n";
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        out += std::to_string(i) + "," + format_double(fitness[i]) + "," + std::to_string(seed) + "," + config + "\n";
    }
    return out;
}

inline std::string periods_csv(const std::vector<PeriodMetrics>& periods, std::uint64_t seed, const std::string& config) {
    std::string out = "period,deaths,group_count,component_count,successes,merged,master_seed,config\n";
    for (std::size_t t = 0; t < periods.size(); ++t) {
        const PeriodMetrics& p = periods[t];
        out += std::to_string(t + 1) + "," + std::to_string(p.deaths) + "," + std::to_string(p.group_count) + "," +
               std::to_string(p.component_count) + "," + std::to_string(p.successes) + "," + std::to_string(p.merged) +
               "," + std::to_string(seed) + "," + config + "\n";
    }
    return out;
}

// Graphs ---------------------------------------------------------------------

namespace detail {

inline std::vector<EdgeState> sorted_edges(const SocialGraph& g) {
    std::vector<EdgeState> edges(g.edges().begin(), g.edges().end());
    std::sort(edges.begin(), edges.end(),
              [](const EdgeState& x, const EdgeState& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return edges;
}

}  // namespace detail

/// DOT text: agents in id order with fitness to 6 decimals, then edges
/// sorted by endpoints with q to 6 decimals. `comments` become // lines.
inline std::string to_dot(const SocialGraph& g, const FitnessVector& fitness, const std::vector<std::string>& comments = {}) {
    if (fitness.size() != g.node_count()) throw Error(ErrorCode::invalid_argument, "fitness vector length differs from n");
    std::string out = "graph tribes {\n";
    for (const auto& c : comments) out += "  // " + c + "\n";
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const std::string f = format_fixed(fitness[i], 6);
        out += "  " + std::to_string(i) + " [label=\"" + std::to_string(i) + "\\n" + f + "\", fitness=\"" + f + "\"];\n";
    }
    for (const EdgeState& e : detail::sorted_edges(g)) {
        out += "  " + std::to_string(e.a) + " -- " + std::to_string(e.b) + " [q=\"" + format_fixed(e.q, 6) + "\"];\n";
    }
    out += "}\n";
    return out;
}

inline void export_dot(const SocialGraph& g, const FitnessVector& fitness, const std::string& path,
                       const std::vector<std::string>& comments = {}) {
    write_text_file(path, to_dot(g, fitness, comments));
}

struct EdgeTriple {
    AgentId a = 0;
    AgentId b = 0;
    double q = 1.0;
};

/// Edge statements ("a -- b [...]") of a DOT document produced by to_dot.
inline std::vector<EdgeTriple> parse_dot_edges(const std::string& dot) {
    std::vector<EdgeTriple> edges;
    std::istringstream in(dot);
    std::string line;
    while (std::getline(in, line)) {
        const auto dash = line.find(" -- ");
        if (dash == std::string::npos || line.find("//") != std::string::npos) continue;
        EdgeTriple e;
        std::istringstream fields(line.substr(0, dash) + " " + line.substr(dash + 4));
        if (!(fields >> e.a >> e.b)) throw Error(ErrorCode::parse_error, "bad DOT edge: " + line);
        const auto qpos = line.find("q=\"");
        if (qpos != std::string::npos) e.q = std::stod(line.substr(qpos + 3));
        edges.push_back(e);
    }
    return edges;
}

/// "# nodes N" header, optional comment lines, then one "a b q" per edge.
inline std::string to_edge_list(const SocialGraph& g, const std::vector<std::string>& comments = {}) {
    std::string out = "# nodes " + std::to_string(g.node_count()) + "\n";
    for (const auto& c : comments) out += "# " + c + "\n";
    for (const EdgeState& e : detail::sorted_edges(g)) {
        out += std::to_string(e.a) + " " + std::to_string(e.b) + " " + format_double(e.q) + "\n";
    }
    return out;
}

inline void export_edge_list(const SocialGraph& g, const std::string& path, const std::vector<std::string>& comments = {}) {
    write_text_file(path, to_edge_list(g, comments));
}

inline SocialGraph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<SocialGraph> g;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.starts_with("# nodes ")) {
            g.emplace(std::stoul(line.substr(8)));
            continue;
        }
        if (line.front() == '#') continue;
        if (!g) throw Error(ErrorCode::parse_error, "edge list line " + std::to_string(line_no) + ": missing '# nodes' header");
        std::istringstream fields(line);
        AgentId a = 0;
        AgentId b = 0;
        double q = 0.0;
        if (!(fields >> a >> b >> q)) {
            throw Error(ErrorCode::parse_error, "edge list line " + std::to_string(line_no) + ": expected 'a b q'");
        }
        g->add_edge(a, b, q);
    }
    if (!g) throw Error(ErrorCode::parse_error, "edge list has no '# nodes' header");
    return std::move(*g);
}

}  // namespace tribesim
