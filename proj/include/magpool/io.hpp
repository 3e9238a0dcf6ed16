/*
Copyright 2026 The magpool Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "magpool/edge_pool.hpp"
#include "magpool/error.hpp"
#include "magpool/graph.hpp"
#include "magpool/structure_eval.hpp"

namespace magpool {

// Plain-text graph format (UTF-8, LF):
//
//   nodes N features F
//   edge u v            one per edge, 0-based, u < v
//   feat i v1 ... vF    one per node when F > 0
//
// A pooling result is a graph document for the pooled graph followed by result records
// (original_nodes, target_nodes, exhausted, assign, round_start, merge, step). Graph readers
// skip the result records, so a result file is also a valid graph input. Lines starting with
// '#' are comments. Reals are written with 17 significant digits.

namespace io_detail {

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
    return v ? format_real(*v) : "nan";
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    Index i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const Index start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Drops everything from the first '#' and trims what is left.
inline std::string_view strip_comment(std::string_view line) {
    return trim(line.substr(0, line.find('#')));
}

inline Error malformed(const std::string& where, Index line, const std::string& why) {
    return Error(ErrorCode::MalformedLine, where + ":" + std::to_string(line) + ": " + why);
}

template <typename T>
T parse_number(std::string_view tok, const std::string& where, Index line) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        if (tok == "nan") return std::numeric_limits<T>::quiet_NaN();
        if (tok == "inf") return std::numeric_limits<T>::infinity();
        if (tok == "-inf") return -std::numeric_limits<T>::infinity();
    }
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw malformed(where, line, "cannot parse number '" + std::string(tok) + "'");
    }
    return out;
}

inline std::optional<double> optional_real(double v) {
    return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void dump(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        out.push_back(text.substr(0, nl));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

inline const std::set<std::string_view>& result_keywords() {
    static const std::set<std::string_view> kw{"original_nodes", "target_nodes", "exhausted",
                                               "assign",         "round_start",  "merge",
                                               "step"};
    return kw;
}

}  // namespace io_detail

inline std::string format_graph(const Graph& g) {
    std::string out = "nodes " + std::to_string(g.node_count()) + " features " +
                      std::to_string(g.feature_dim()) + "\n";
    for (const Edge& e : g.edges()) {
        out += "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
    }
    if (g.features()) {
        const Matrix& f = *g.features();
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            out += "feat " + std::to_string(i);
            for (Eigen::Index j = 0; j < f.cols(); ++j) out += " " + io_detail::format_real(f(i, j));
            out += "\n";
        }
    }
    return out;
}

inline Graph parse_graph(std::string_view text, const std::string& where = "<graph>") {
    using namespace io_detail;
    std::optional<Index> nodes;
    Index dim = 0;
    std::vector<Edge> edges;
    std::optional<Matrix> feats;
    std::vector<char> feat_seen;
    const auto lines = lines_of(text);
    for (Index ln = 0; ln < lines.size(); ++ln) {
        const Index lineno = ln + 1;
        const std::string_view line = strip_comment(lines[ln]);
        if (line.empty()) continue;
        const auto tok = split_ws(line);
        if (tok[0] == "nodes") {
            if (nodes) throw malformed(where, lineno, "duplicate header");
            if (tok.size() != 4 || tok[2] != "features") {
                throw malformed(where, lineno, "expected 'nodes N features F'");
            }
            nodes = parse_number<Index>(tok[1], where, lineno);
            dim = parse_number<Index>(tok[3], where, lineno);
            if (dim > 0) {
                feats = Matrix::Zero(static_cast<Eigen::Index>(*nodes), static_cast<Eigen::Index>(dim));
                feat_seen.assign(*nodes, 0);
            }
            continue;
        }
        if (!nodes) throw malformed(where, lineno, "missing 'nodes' header before records");
        if (tok[0] == "edge") {
            if (tok.size() != 3) throw malformed(where, lineno, "expected 'edge u v'");
            const auto u = parse_number<Index>(tok[1], where, lineno);
            const auto v = parse_number<Index>(tok[2], where, lineno);
            if (u >= *nodes || v >= *nodes) {
                throw Error(ErrorCode::IndexOutOfRange,
                            where + ":" + std::to_string(lineno) + ": edge endpoint out of range");
            }
            if (u == v) throw malformed(where, lineno, "self-loop");
            edges.push_back(Edge::make(u, v));
        } else if (tok[0] == "feat") {
            if (dim == 0 || tok.size() != dim + 2) {
                throw malformed(where, lineno, "expected 'feat i' followed by " + std::to_string(dim) + " values");
            }
            const auto i = parse_number<Index>(tok[1], where, lineno);
            if (i >= *nodes) {
                throw Error(ErrorCode::IndexOutOfRange,
                            where + ":" + std::to_string(lineno) + ": feature row out of range");
            }
            for (Index j = 0; j < dim; ++j) {
                (*feats)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    parse_number<double>(tok[j + 2], where, lineno);
            }
            feat_seen[i] = 1;
        } else if (!result_keywords().contains(tok[0])) {
            throw malformed(where, lineno, "unknown record '" + std::string(tok[0]) + "'");
        }
    }
    if (!nodes) throw Error(ErrorCode::MalformedLine, where + ": missing 'nodes' header");
    if (dim > 0 && std::find(feat_seen.begin(), feat_seen.end(), 0) != feat_seen.end()) {
        throw Error(ErrorCode::MalformedLine, where + ": missing feat line for some node");
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw Error(ErrorCode::MalformedLine, where + ": duplicate edge");
    }
    return Graph(*nodes, edges, std::move(feats));
}

inline Graph read_graph(const std::filesystem::path& path) {
    return parse_graph(io_detail::slurp(path), path.string());
}

inline void write_graph(const std::filesystem::path& path, const Graph& g) {
    io_detail::dump(path, format_graph(g));
}

inline std::string format_result(const PoolingResult& r) {
    using io_detail::format_optional;
    using io_detail::format_real;
    std::string out = "# magpool pooling result\n" + format_graph(r.pooled);
    out += "original_nodes " + std::to_string(r.assignment.node_count()) + "\n";
    out += "target_nodes " + std::to_string(r.target_nodes) + "\n";
    out += "exhausted " + std::string(r.exhausted ? "1" : "0") + "\n";
    for (Index i = 0; i < r.assignment.node_count(); ++i) {
        out += "assign " + std::to_string(i) + " " + std::to_string(r.assignment[i]) + "\n";
    }
    for (Index b : r.trace.rescoring_boundaries) out += "round_start " + std::to_string(b) + "\n";
    for (const Merge& m : r.trace.merges) {
        out += "merge " + std::to_string(m.survivor) + " " + std::to_string(m.absorbed) + "\n";
    }
    for (const DiversityStep& s : r.diversity_log) {
        out += "step " + std::to_string(s.round) + " " + std::to_string(s.merge.survivor) + " " +
               std::to_string(s.merge.absorbed) + " " + format_real(s.score) + " " +
               format_optional(s.magnitude_before) + " " + format_optional(s.magnitude_after) +
               " " + format_optional(s.spread_before) + " " + format_optional(s.spread_after) +
               "\n";
    }
    return out;
}

inline PoolingResult parse_result(std::string_view text, const std::string& where = "<result>") {
    using namespace io_detail;
    PoolingResult r;
    r.pooled = parse_graph(text, where);
    r.pooled_features = r.pooled.features();
    std::optional<Index> original;
    std::optional<Index> target;
    std::optional<bool> exhausted;
    std::map<Index, Index> assign;
    const auto lines = lines_of(text);
    for (Index ln = 0; ln < lines.size(); ++ln) {
        const Index lineno = ln + 1;
        const std::string_view line = strip_comment(lines[ln]);
        if (line.empty()) continue;
        const auto tok = split_ws(line);
        auto need = [&](Index count) {
            if (tok.size() != count) {
                throw Error(ErrorCode::SchemaMismatch, where + ":" + std::to_string(lineno) +
                                                           ": '" + std::string(tok[0]) +
                                                           "' expects " + std::to_string(count - 1) +
                                                           " fields");
            }
        };
        auto idx = [&](Index i) { return parse_number<Index>(tok[i], where, lineno); };
        auto real = [&](Index i) { return parse_number<double>(tok[i], where, lineno); };
        if (tok[0] == "original_nodes") {
            need(2);
            original = idx(1);
        } else if (tok[0] == "target_nodes") {
            need(2);
            target = idx(1);
        } else if (tok[0] == "exhausted") {
            need(2);
            exhausted = idx(1) != 0;
        } else if (tok[0] == "assign") {
            need(3);
            if (!assign.emplace(idx(1), idx(2)).second) {
                throw Error(ErrorCode::SchemaMismatch, where + ": node assigned twice");
            }
        } else if (tok[0] == "round_start") {
            need(2);
            r.trace.rescoring_boundaries.push_back(idx(1));
        } else if (tok[0] == "merge") {
            need(3);
            r.trace.merges.push_back({idx(1), idx(2)});
        } else if (tok[0] == "step") {
            need(9);
            DiversityStep s;
            s.round = idx(1);
            s.merge = {idx(2), idx(3)};
            s.score = real(4);
            s.magnitude_before = optional_real(real(5));
            s.magnitude_after = optional_real(real(6));
            s.spread_before = optional_real(real(7));
            s.spread_after = optional_real(real(8));
            r.diversity_log.push_back(s);
        }
    }
    if (!original || !target || !exhausted) {
        throw Error(ErrorCode::SchemaMismatch,
                    where + ": missing original_nodes/target_nodes/exhausted records");
    }
    if (assign.size() != *original) {
        throw Error(ErrorCode::SchemaMismatch, where + ": expected " + std::to_string(*original) +
                                                   " assign records, found " +
                                                   std::to_string(assign.size()));
    }
    std::vector<Index> a;
    a.reserve(*original);
    for (Index i = 0; i < *original; ++i) {
        auto it = assign.find(i);
        if (it == assign.end()) throw Error(ErrorCode::SchemaMismatch, where + ": missing assign for node " + std::to_string(i));
        a.push_back(it->second);
    }
    try {
        r.assignment = AssignmentMatrix(std::move(a), r.pooled.node_count());
    } catch (const Error& err) {
        throw Error(ErrorCode::SchemaMismatch, where + ": " + err.what());
    }
    r.target_nodes = *target;
    r.exhausted = *exhausted;
    return r;
}

inline void write_result(const std::filesystem::path& path, const PoolingResult& r) {
    io_detail::dump(path, format_result(r));
}

inline PoolingResult read_result(const std::filesystem::path& path) {
    return parse_result(io_detail::slurp(path), path.string());
}

inline constexpr std::string_view kSweepHeader =
    "graph_id,ratio,method,spectral_distance,relative_mag_diff";

inline std::string format_sweep_csv(std::span<const PreservationReport> rows) {
    using io_detail::format_real;
    std::string out(kSweepHeader);
    out += "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.graph_id) + "," + format_real(r.ratio) + "," +
               std::string(to_string(r.method)) + "," + format_real(r.spectral_distance) + "," +
               format_real(r.relative_mag_diff) + "\n";
    }
    return out;
}

inline std::vector<PreservationReport> parse_sweep_csv(std::string_view text,
                                                       const std::string& where = "<csv>") {
    using namespace io_detail;
    const auto lines = lines_of(text);
    if (lines.empty() || trim(lines[0]) != kSweepHeader) {
        throw Error(ErrorCode::SchemaMismatch, where + ": unexpected header");
    }
    std::vector<PreservationReport> rows;
    for (Index ln = 1; ln < lines.size(); ++ln) {
        const std::string_view line = trim(lines[ln]);
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 5) {
            throw Error(ErrorCode::SchemaMismatch, where + ":" + std::to_string(ln + 1) + ": expected 5 columns");
        }
        PreservationReport r;
        r.graph_id = parse_number<Index>(cells[0], where, ln + 1);
        r.ratio = parse_number<double>(cells[1], where, ln + 1);
        r.method = parse_pooling_method(cells[2]);
        r.spectral_distance = parse_number<double>(cells[3], where, ln + 1);
        r.relative_mag_diff = parse_number<double>(cells[4], where, ln + 1);
        rows.push_back(r);
    }
    return rows;
}

inline std::string format_sweep_summary_csv(std::span<const SweepSummary> rows) {
    using io_detail::format_real;
    std::string out =
        "ratio,method,count,spectral_mean,spectral_std,spectral_q10,spectral_q25,spectral_q75,"
        "spectral_q90,magdiff_mean,magdiff_std,magdiff_q10,magdiff_q25,magdiff_q75,magdiff_q90\n";
    for (const auto& s : rows) {
        out += format_real(s.ratio) + "," + std::string(to_string(s.method)) + "," +
               std::to_string(s.count);
        for (const Summary* m : {&s.spectral_distance, &s.relative_mag_diff}) {
            for (double v : {m->mean, m->stddev, m->q10, m->q25, m->q75, m->q90}) {
                out += "," + format_real(v);
            }
        }
        out += "\n";
    }
    return out;
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            std::span<const PreservationReport> rows) {
    io_detail::dump(path, format_sweep_csv(rows));
}

inline std::vector<PreservationReport> read_sweep_csv(const std::filesystem::path& path) {
    return parse_sweep_csv(io_detail::slurp(path), path.string());
}

struct Dataset {
    std::vector<Graph> graphs;
    std::optional<std::vector<long long>> labels;
    std::string name;
    Index feature_dim = 0;
};

/// Reads a TUDataset-style directory: NAME_A.txt ("u, v" per line, 1-based, both directions
/// allowed) and NAME_graph_indicator.txt (1-based graph id per node) are required;
/// NAME_node_labels.txt, NAME_node_attributes.txt and NAME_graph_labels.txt are optional.
/// Node labels become a one-hot block in ascending label order, with attributes appended
/// after it. Without either file each node gets its degree as the single feature.
inline Dataset load_tudataset(const std::filesystem::path& dir, const std::string& name) {
    using namespace io_detail;
    auto file = [&](const std::string& suffix) { return dir / (name + "_" + suffix + ".txt"); };
    auto read_lines = [&](const std::filesystem::path& p) {
        std::vector<std::string> out;
        std::ifstream in(p);
        if (!in) throw Error(ErrorCode::MissingFile, p.string());
        std::string line;
        while (std::getline(in, line)) out.push_back(line);
        return out;
    };
    auto split_commas = [](std::string_view line) {
        std::vector<std::string_view> out;
        while (true) {
            const auto comma = line.find(',');
            out.push_back(trim(line.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        return out;
    };

    const auto indicator_path = file("graph_indicator");
    const auto edge_path = file("A");
    const auto indicator_lines = read_lines(indicator_path);
    const auto edge_lines = read_lines(edge_path);

    // Graph membership and local index for every global node.
    std::vector<Index> graph_of;
    std::vector<Index> local_of;
    std::vector<Index> sizes;
    for (Index ln = 0; ln < indicator_lines.size(); ++ln) {
        const std::string_view line = trim(indicator_lines[ln]);
        if (line.empty()) continue;
        const auto gid = parse_number<Index>(line, indicator_path.string(), ln + 1);
        if (gid == 0) throw malformed(indicator_path.string(), ln + 1, "graph ids are 1-based");
        if (gid > sizes.size()) sizes.resize(gid, 0);
        graph_of.push_back(gid - 1);
        local_of.push_back(sizes[gid - 1]++);
    }
    const Index total_nodes = graph_of.size();
    const Index graph_count = sizes.size();

    std::vector<std::vector<Edge>> edges(graph_count);
    for (Index ln = 0; ln < edge_lines.size(); ++ln) {
        const std::string_view line = trim(edge_lines[ln]);
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != 2) throw malformed(edge_path.string(), ln + 1, "expected 'u, v'");
        const auto u = parse_number<Index>(cells[0], edge_path.string(), ln + 1);
        const auto v = parse_number<Index>(cells[1], edge_path.string(), ln + 1);
        if (u == 0 || v == 0 || u > total_nodes || v > total_nodes) {
            throw Error(ErrorCode::IndexOutOfRange, edge_path.string() + ":" +
                                                        std::to_string(ln + 1) +
                                                        ": node index out of range");
        }
        if (u == v) throw malformed(edge_path.string(), ln + 1, "self-loop");
        if (graph_of[u - 1] != graph_of[v - 1]) {
            throw malformed(edge_path.string(), ln + 1, "edge joins two different graphs");
        }
        edges[graph_of[u - 1]].push_back(Edge::make(local_of[u - 1], local_of[v - 1]));
    }
    for (auto& es : edges) {
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
    }

    std::optional<std::vector<long long>> node_labels;
    if (std::filesystem::exists(file("node_labels"))) {
        const auto path = file("node_labels");
        std::vector<long long> labels;
        const auto lines = read_lines(path);
        for (Index ln = 0; ln < lines.size(); ++ln) {
            const std::string_view line = trim(lines[ln]);
            if (line.empty()) continue;
            labels.push_back(parse_number<long long>(split_commas(line)[0], path.string(), ln + 1));
        }
        if (labels.size() != total_nodes) {
            throw Error(ErrorCode::MalformedLine, path.string() + ": expected one label per node");
        }
        node_labels = std::move(labels);
    }
    std::optional<std::vector<std::vector<double>>> attributes;
    if (std::filesystem::exists(file("node_attributes"))) {
        const auto path = file("node_attributes");
        std::vector<std::vector<double>> rows;
        const auto lines = read_lines(path);
        for (Index ln = 0; ln < lines.size(); ++ln) {
            const std::string_view line = trim(lines[ln]);
            if (line.empty()) continue;
            std::vector<double> row;
            for (auto cell : split_commas(line)) row.push_back(parse_number<double>(cell, path.string(), ln + 1));
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw malformed(path.string(), ln + 1, "inconsistent attribute width");
            }
            rows.push_back(std::move(row));
        }
        if (rows.size() != total_nodes) {
            throw Error(ErrorCode::MalformedLine, path.string() + ": expected one attribute row per node");
        }
        attributes = std::move(rows);
    }

    std::vector<long long> label_values;
    if (node_labels) {
        label_values = *node_labels;
        std::sort(label_values.begin(), label_values.end());
        label_values.erase(std::unique(label_values.begin(), label_values.end()), label_values.end());
    }
    const Index attr_dim = attributes && !attributes->empty() ? attributes->front().size() : 0;
    const bool degree_feature = !node_labels && !attributes;
    const Index dim = degree_feature ? 1 : label_values.size() + attr_dim;

    Dataset ds;
    ds.name = name;
    ds.feature_dim = dim;
    std::vector<Matrix> feats(graph_count);
    for (Index gi = 0; gi < graph_count; ++gi) {
        feats[gi] = Matrix::Zero(static_cast<Eigen::Index>(sizes[gi]), static_cast<Eigen::Index>(dim));
    }
    for (Index x = 0; x < total_nodes; ++x) {
        auto row = feats[graph_of[x]].row(static_cast<Eigen::Index>(local_of[x]));
        if (node_labels) {
            const auto pos = std::lower_bound(label_values.begin(), label_values.end(), (*node_labels)[x]) -
                             label_values.begin();
            row(pos) = 1.0;
        }
        if (attributes) {
            for (Index j = 0; j < attr_dim; ++j) {
                row(static_cast<Eigen::Index>(label_values.size() + j)) = (*attributes)[x][j];
            }
        }
    }
    for (Index gi = 0; gi < graph_count; ++gi) {
        Graph g(sizes[gi], edges[gi]);
        if (degree_feature) {
            for (Index x = 0; x < sizes[gi]; ++x) {
                feats[gi](static_cast<Eigen::Index>(x), 0) = static_cast<double>(g.degree(x));
            }
        }
        ds.graphs.push_back(g.with_features(std::move(feats[gi])));
    }

    if (std::filesystem::exists(file("graph_labels"))) {
        const auto path = file("graph_labels");
        std::vector<long long> labels;
        const auto lines = read_lines(path);
        for (Index ln = 0; ln < lines.size(); ++ln) {
            const std::string_view line = trim(lines[ln]);
            if (line.empty()) continue;
            labels.push_back(parse_number<long long>(line, path.string(), ln + 1));
        }
        if (labels.size() != graph_count) {
            throw Error(ErrorCode::MalformedLine, path.string() + ": expected one label per graph");
        }
        ds.labels = std::move(labels);
    }
    return ds;
}

}  // namespace magpool
