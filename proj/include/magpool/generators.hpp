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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "magpool/error.hpp"
#include "magpool/graph.hpp"

namespace magpool {

// Structure is decided with integer arithmetic on mt19937_64 draws so a fixed seed yields
// the same graph on every platform. Only random_geometric uses floating point, for its
// coordinates, and compares squared distances against radius^2.

inline Graph path_graph(Index n) {
    std::vector<Edge> edges;
    for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return Graph(n, edges);
}

/// C_n for n >= 3.
inline Graph ring_graph(Index n) {
    if (n < 3) throw Error(ErrorCode::InvalidParams, "ring needs at least 3 nodes");
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) edges.push_back(Edge::make(i, (i + 1) % n));
    return Graph(n, edges);
}

/// Hub 0 joined to leaves 1..leaves.
inline Graph star_graph(Index leaves) {
    std::vector<Edge> edges;
    for (Index i = 1; i <= leaves; ++i) edges.push_back({0, i});
    return Graph(leaves + 1, edges);
}

inline Graph complete_graph(Index n) {
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) edges.push_back({i, j});
    return Graph(n, edges);
}

/// Cliques K_m1 (nodes 0..m1-1) and K_m2 (last m2 nodes) joined through a path of `bridge`
/// nodes; with bridge = 0 the cliques share a single edge. Total m1 + bridge + m2 nodes.
inline Graph barbell_graph(Index m1, Index m2, Index bridge) {
    if (m1 < 1 || m2 < 1) throw Error(ErrorCode::InvalidParams, "barbell cliques must be non-empty");
    const Index n = m1 + bridge + m2;
    std::vector<Edge> edges;
    for (Index i = 0; i < m1; ++i)
        for (Index j = i + 1; j < m1; ++j) edges.push_back({i, j});
    const Index second = m1 + bridge;
    for (Index i = second; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) edges.push_back({i, j});
    for (Index i = m1 - 1; i < second; ++i) edges.push_back({i, i + 1});
    return Graph(n, edges);
}

/// G(n, p): each pair u < v, in lexicographic order, consumes one draw.
inline Graph erdos_renyi_graph(Index n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParams, "edge probability outside [0, 1]");
    std::mt19937_64 rng(seed);
    const bool always = p >= 1.0;
    const auto threshold = always ? 0 : static_cast<std::uint64_t>(std::ldexp(p, 64));
    std::vector<Edge> edges;
    for (Index u = 0; u < n; ++u) {
        for (Index v = u + 1; v < n; ++v) {
            const std::uint64_t draw = rng();
            if (always || draw < threshold) edges.push_back({u, v});
        }
    }
    return Graph(n, edges);
}

/// n points uniform in the unit square (x then y per node, 53-bit mantissas); u ~ v iff
/// dx^2 + dy^2 <= radius^2.
inline Graph random_geometric_graph(Index n, double radius, std::uint64_t seed) {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidParams, "radius must be non-negative");
    std::mt19937_64 rng(seed);
    std::vector<double> xs(n), ys(n);
    for (Index i = 0; i < n; ++i) {
        xs[i] = static_cast<double>(rng() >> 11) * 0x1p-53;
        ys[i] = static_cast<double>(rng() >> 11) * 0x1p-53;
    }
    const double r2 = radius * radius;
    std::vector<Edge> edges;
    for (Index u = 0; u < n; ++u) {
        for (Index v = u + 1; v < n; ++v) {
            const double dx = xs[u] - xs[v];
            const double dy = ys[u] - ys[v];
            if (dx * dx + dy * dy <= r2) edges.push_back({u, v});
        }
    }
    return Graph(n, edges);
}

enum class GeneratorKind { Ring, Barbell, ErdosRenyi, RandomGeometric, Star, Path };

inline GeneratorKind parse_generator_kind(std::string_view s) {
    if (s == "ring") return GeneratorKind::Ring;
    if (s == "barbell") return GeneratorKind::Barbell;
    if (s == "erdos_renyi" || s == "er") return GeneratorKind::ErdosRenyi;
    if (s == "random_geometric" || s == "rgg") return GeneratorKind::RandomGeometric;
    if (s == "star") return GeneratorKind::Star;
    if (s == "path") return GeneratorKind::Path;
    throw Error(ErrorCode::InvalidParams, "unknown generator kind '" + std::string(s) + "'");
}

struct GeneratorParams {
    Index n = 0;
    Index m1 = 0;
    Index m2 = 0;
    Index bridge = 0;
    double p = 0.0;
    double radius = 0.0;
};

inline Graph generate(GeneratorKind kind, const GeneratorParams& params, std::uint64_t seed = 0) {
    switch (kind) {
    case GeneratorKind::Ring: return ring_graph(params.n);
    case GeneratorKind::Barbell: return barbell_graph(params.m1, params.m2, params.bridge);
    case GeneratorKind::ErdosRenyi: return erdos_renyi_graph(params.n, params.p, seed);
    case GeneratorKind::RandomGeometric: return random_geometric_graph(params.n, params.radius, seed);
    case GeneratorKind::Star: return star_graph(params.n);
    case GeneratorKind::Path: return path_graph(params.n);
    }
    throw Error(ErrorCode::InvalidParams, "unknown generator kind");
}

/// Parses "KIND[:key=value,...]", e.g. "ring:n=64", "barbell:m1=20,m2=20,bridge=24",
/// "erdos_renyi:n=20,p=0.3,seed=7". For star, n is the number of leaves.
inline Graph generate_from_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    const GeneratorKind kind = parse_generator_kind(spec.substr(0, colon));
    GeneratorParams params;
    std::uint64_t seed = 0;
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidParams, "generator parameter '" + std::string(item) +
                                                      "' is not key=value");
        }
        const std::string_view key = item.substr(0, eq);
        const std::string value(item.substr(eq + 1));
        auto as_index = [&] {
            Index out = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw Error(ErrorCode::InvalidParams, "bad integer '" + value + "'");
            }
            return out;
        };
        auto as_real = [&] {
            double out = 0.0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw Error(ErrorCode::InvalidParams, "bad real '" + value + "'");
            }
            return out;
        };
        if (key == "n") params.n = as_index();
        else if (key == "m1") params.m1 = as_index();
        else if (key == "m2") params.m2 = as_index();
        else if (key == "bridge") params.bridge = as_index();
        else if (key == "p") params.p = as_real();
        else if (key == "radius") params.radius = as_real();
        else if (key == "seed") seed = as_index();
        else throw Error(ErrorCode::InvalidParams, "unknown generator parameter '" + std::string(key) + "'");
    }
    return generate(kind, params, seed);
}

/// Desk-scale synthetic corpus: alternating Erdos-Renyi (n in [10, 30], p = 0.3) and random
/// geometric (n in [10, 30], radius 0.4) graphs, all derived from one seed.
inline std::vector<Graph> synthetic_corpus(Index count, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::vector<Graph> out;
    out.reserve(count);
    for (Index i = 0; i < count; ++i) {
        const Index n = 10 + static_cast<Index>(rng() % 21);
        const std::uint64_t graph_seed = rng();
        out.push_back(i % 2 == 0 ? erdos_renyi_graph(n, 0.3, graph_seed)
                                 : random_geometric_graph(n, 0.4, graph_seed));
    }
    return out;
}

}  // namespace magpool
