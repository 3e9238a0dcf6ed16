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
#include <compare>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "magpool/error.hpp"

namespace magpool {

using Index = std::size_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected edge stored with u < v.
struct Edge {
    Index u = 0;
    Index v = 0;

    static constexpr Edge make(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

    constexpr bool touches(Index x) const { return u == x || v == x; }
    constexpr bool adjacent_to(const Edge& other) const {
        return touches(other.u) || touches(other.v);
    }

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph over dense 0-based node indices with optional node features.
///
/// Adjacency is kept as sorted neighbour lists so iteration order (and hence any tie-break
/// built on it) is deterministic. Values are immutable once constructed.
class Graph {
  public:
    Graph() = default;

    explicit Graph(Index node_count) : adjacency_(node_count) {}

    Graph(Index node_count, std::span<const Edge> edges, std::optional<Matrix> features = {})
        : adjacency_(node_count) {
        for (const Edge& raw : edges) {
            const Edge e = Edge::make(raw.u, raw.v);
            if (e.v >= node_count) {
                throw Error(ErrorCode::InvalidGraph, "edge (" + std::to_string(raw.u) + "," +
                                                         std::to_string(raw.v) +
                                                         ") has an endpoint >= node count " +
                                                         std::to_string(node_count));
            }
            if (e.u == e.v) {
                throw Error(ErrorCode::InvalidGraph, "self-loop on node " + std::to_string(e.u));
            }
            adjacency_[e.u].push_back(e.v);
            adjacency_[e.v].push_back(e.u);
        }
        for (Index x = 0; x < node_count; ++x) {
            auto& nbrs = adjacency_[x];
            std::sort(nbrs.begin(), nbrs.end());
            if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
                throw Error(ErrorCode::InvalidGraph,
                            "duplicate edge at node " + std::to_string(x));
            }
            edge_count_ += nbrs.size();
        }
        edge_count_ /= 2;
        set_features(std::move(features));
    }

    Graph(Index node_count, std::initializer_list<Edge> edges)
        : Graph(node_count, std::span<const Edge>(edges.begin(), edges.size())) {}

    Index node_count() const { return adjacency_.size(); }
    Index edge_count() const { return edge_count_; }
    bool empty() const { return adjacency_.empty(); }

    std::span<const Index> neighbors(Index x) const { return adjacency_.at(x); }
    Index degree(Index x) const { return adjacency_.at(x).size(); }

    bool has_edge(Index a, Index b) const {
        if (a >= node_count() || b >= node_count()) return false;
        const auto& nbrs = adjacency_[a];
        return std::binary_search(nbrs.begin(), nbrs.end(), b);
    }

    /// All edges, lexicographically sorted.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (Index x = 0; x < node_count(); ++x) {
            for (Index y : adjacency_[x]) {
                if (x < y) out.push_back({x, y});
            }
        }
        return out;
    }

    const std::optional<Matrix>& features() const { return features_; }
    Index feature_dim() const { return features_ ? static_cast<Index>(features_->cols()) : 0; }

    Graph with_features(std::optional<Matrix> features) const {
        Graph copy = *this;
        copy.set_features(std::move(features));
        return copy;
    }

    /// Relabels node x as perm[x]. Features follow their nodes.
    Graph permuted(std::span<const Index> perm) const {
        const Index n = node_count();
        if (perm.size() != n) {
            throw Error(ErrorCode::ShapeMismatch, "permutation size does not match node count");
        }
        std::vector<char> seen(n, 0);
        for (Index p : perm) {
            if (p >= n || seen[p]) throw Error(ErrorCode::InvalidParams, "not a permutation");
            seen[p] = 1;
        }
        std::vector<Edge> moved;
        moved.reserve(edge_count_);
        for (const Edge& e : edges()) moved.push_back(Edge::make(perm[e.u], perm[e.v]));
        std::optional<Matrix> feats;
        if (features_) {
            feats = Matrix(n, features_->cols());
            for (Index x = 0; x < n; ++x) feats->row(perm[x]) = features_->row(x);
        }
        return Graph(n, moved, std::move(feats));
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        if (a.adjacency_ != b.adjacency_) return false;
        if (a.features_.has_value() != b.features_.has_value()) return false;
        return !a.features_ || *a.features_ == *b.features_;
    }

  private:
    void set_features(std::optional<Matrix> features) {
        if (features && static_cast<Index>(features->rows()) != node_count()) {
            throw Error(ErrorCode::ShapeMismatch,
                        "feature matrix has " + std::to_string(features->rows()) +
                            " rows, graph has " + std::to_string(node_count()) + " nodes");
        }
        features_ = std::move(features);
    }

    std::vector<std::vector<Index>> adjacency_;
    Index edge_count_ = 0;
    std::optional<Matrix> features_;
};

/// Disjoint union; nodes of `b` are shifted by a.node_count(). Features are kept only when
/// both sides carry them with the same width.
inline Graph disjoint_union(const Graph& a, const Graph& b) {
    const Index shift = a.node_count();
    std::vector<Edge> edges = a.edges();
    for (const Edge& e : b.edges()) edges.push_back({e.u + shift, e.v + shift});
    std::optional<Matrix> feats;
    if (a.features() && b.features() && a.feature_dim() == b.feature_dim()) {
        feats = Matrix(a.node_count() + b.node_count(), a.feature_dim());
        feats->topRows(a.node_count()) = *a.features();
        feats->bottomRows(b.node_count()) = *b.features();
    }
    return Graph(a.node_count() + b.node_count(), edges, std::move(feats));
}

/// Components as ascending node lists, ordered by their smallest node.
inline std::vector<std::vector<Index>> connected_components(const Graph& g) {
    const Index n = g.node_count();
    std::vector<char> visited(n, 0);
    std::vector<std::vector<Index>> components;
    std::queue<Index> frontier;
    for (Index start = 0; start < n; ++start) {
        if (visited[start]) continue;
        std::vector<Index> comp;
        visited[start] = 1;
        frontier.push(start);
        while (!frontier.empty()) {
            const Index x = frontier.front();
            frontier.pop();
            comp.push_back(x);
            for (Index y : g.neighbors(x)) {
                if (!visited[y]) {
                    visited[y] = 1;
                    frontier.push(y);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

/// Subgraph induced by `nodes` (ascending), relabelled 0..|nodes|-1 in the given order.
inline Graph induced_subgraph(const Graph& g, std::span<const Index> nodes) {
    std::vector<Index> local(g.node_count(), static_cast<Index>(-1));
    for (Index i = 0; i < nodes.size(); ++i) local.at(nodes[i]) = i;
    std::vector<Edge> edges;
    for (Index i = 0; i < nodes.size(); ++i) {
        for (Index y : g.neighbors(nodes[i])) {
            const Index j = local[y];
            if (j != static_cast<Index>(-1) && i < j) edges.push_back({i, j});
        }
    }
    std::optional<Matrix> feats;
    if (g.features()) {
        feats = Matrix(nodes.size(), g.feature_dim());
        for (Index i = 0; i < nodes.size(); ++i) feats->row(i) = g.features()->row(nodes[i]);
    }
    return Graph(nodes.size(), edges, std::move(feats));
}

struct Contraction {
    Graph graph;
    /// old node index -> new node index
    std::vector<Index> mapping;
};

/// G/e: merges e.v into e.u (e.u < e.v). The self-loop vanishes and parallel edges collapse.
/// Indices above e.v shift down by one. Node features are not carried; pooling aggregates
/// them once at the end through the assignment matrix.
inline Contraction contract_edge(const Graph& g, Edge e) {
    e = Edge::make(e.u, e.v);
    if (!g.has_edge(e.u, e.v)) {
        throw Error(ErrorCode::EdgeNotFound,
                    "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    const Index n = g.node_count();
    std::vector<Index> mapping(n);
    for (Index x = 0; x < n; ++x) mapping[x] = x < e.v ? x : (x == e.v ? e.u : x - 1);

    std::vector<Edge> edges;
    edges.reserve(g.edge_count());
    for (const Edge& old : g.edges()) {
        const Index a = mapping[old.u];
        const Index b = mapping[old.v];
        if (a != b) edges.push_back(Edge::make(a, b));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return {Graph(n - 1, edges), std::move(mapping)};
}

struct Merge {
    Index survivor = 0;
    Index absorbed = 0;
    friend constexpr bool operator==(const Merge&, const Merge&) = default;
};

/// Ordered merges in original node indices. rescoring_boundaries[i] is the index into
/// `merges` at which round i began.
struct ContractionTrace {
    std::vector<Merge> merges;
    std::vector<Index> rescoring_boundaries;

    friend bool operator==(const ContractionTrace&, const ContractionTrace&) = default;
};

/// Hard node -> super-node assignment (the binary selection matrix S, one unit per row).
class AssignmentMatrix {
  public:
    AssignmentMatrix() = default;

    AssignmentMatrix(std::vector<Index> assignment, Index super_node_count)
        : assignment_(std::move(assignment)), super_node_count_(super_node_count) {
        std::vector<char> hit(super_node_count_, 0);
        for (Index j : assignment_) {
            if (j >= super_node_count_) {
                throw Error(ErrorCode::InvalidTrace, "super-node index out of range");
            }
            hit[j] = 1;
        }
        if (std::find(hit.begin(), hit.end(), 0) != hit.end()) {
            throw Error(ErrorCode::InvalidTrace, "assignment is not surjective");
        }
    }

    static AssignmentMatrix identity(Index n) {
        std::vector<Index> a(n);
        std::iota(a.begin(), a.end(), Index{0});
        return AssignmentMatrix(std::move(a), n);
    }

    Index node_count() const { return assignment_.size(); }
    Index super_node_count() const { return super_node_count_; }
    Index operator[](Index node) const { return assignment_.at(node); }
    const std::vector<Index>& assignment() const { return assignment_; }

    std::vector<Index> members(Index super_node) const {
        std::vector<Index> out;
        for (Index x = 0; x < assignment_.size(); ++x) {
            if (assignment_[x] == super_node) out.push_back(x);
        }
        return out;
    }

    std::vector<Index> cluster_sizes() const {
        std::vector<Index> sizes(super_node_count_, 0);
        for (Index j : assignment_) ++sizes[j];
        return sizes;
    }

    /// Dense |X| x k selection matrix.
    Matrix dense() const {
        Matrix s = Matrix::Zero(static_cast<Eigen::Index>(node_count()),
                                static_cast<Eigen::Index>(super_node_count_));
        for (Index x = 0; x < assignment_.size(); ++x) {
            s(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(assignment_[x])) = 1.0;
        }
        return s;
    }

    friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

  private:
    std::vector<Index> assignment_;
    Index super_node_count_ = 0;
};

/// Super-nodes are numbered by their smallest original member.
inline AssignmentMatrix build_assignment(const ContractionTrace& trace, Index n) {
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), Index{0});
    std::vector<char> absorbed(n, 0);
    auto find = [&](Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Index i = 0; i < trace.merges.size(); ++i) {
        const auto [keep, drop] = trace.merges[i];
        if (keep >= n || drop >= n || keep == drop) {
            throw Error(ErrorCode::InvalidTrace, "merge " + std::to_string(i) +
                                                     " references an invalid node pair");
        }
        if (absorbed[keep] || absorbed[drop]) {
            throw Error(ErrorCode::InvalidTrace,
                        "merge " + std::to_string(i) + " references an absorbed node");
        }
        absorbed[drop] = 1;
        const Index a = find(keep);
        const Index b = find(drop);
        if (a == b) {
            throw Error(ErrorCode::InvalidTrace,
                        "merge " + std::to_string(i) + " joins nodes already merged");
        }
        parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<Index> label(n, static_cast<Index>(-1));
    std::vector<Index> assignment(n);
    Index k = 0;
    for (Index x = 0; x < n; ++x) {
        const Index root = find(x);
        if (label[root] == static_cast<Index>(-1)) label[root] = k++;
        assignment[x] = label[root];
    }
    return AssignmentMatrix(std::move(assignment), k);
}

enum class Aggregation { Mean, Sum };

/// Row j of the result is the mean (or sum) of the rows of F assigned to super-node j.
/// Sum mode is S^T F.
inline Matrix aggregate_features(const Matrix& features, const AssignmentMatrix& s,
                                 Aggregation mode = Aggregation::Mean) {
    if (static_cast<Index>(features.rows()) != s.node_count()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "feature rows " + std::to_string(features.rows()) +
                        " != assignment size " + std::to_string(s.node_count()));
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(s.super_node_count()), features.cols());
    for (Index x = 0; x < s.node_count(); ++x) {
        out.row(static_cast<Eigen::Index>(s[x])) += features.row(static_cast<Eigen::Index>(x));
    }
    if (mode == Aggregation::Mean) {
        const auto sizes = s.cluster_sizes();
        for (Index j = 0; j < sizes.size(); ++j) {
            out.row(static_cast<Eigen::Index>(j)) /= static_cast<double>(sizes[j]);
        }
    }
    return out;
}

/// Applies an assignment to the graph structure: super-nodes j, j' are adjacent iff some
/// original edge joins their members.
inline Graph quotient_graph(const Graph& g, const AssignmentMatrix& s) {
    if (g.node_count() != s.node_count()) {
        throw Error(ErrorCode::ShapeMismatch, "assignment does not match graph");
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        if (s[e.u] != s[e.v]) edges.push_back(Edge::make(s[e.u], s[e.v]));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph(s.super_node_count(), edges);
}

}  // namespace magpool
