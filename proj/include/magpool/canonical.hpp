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
#include <optional>
#include <tuple>
#include <vector>

#include "magpool/graph.hpp"

namespace magpool {

// Canonical labelling by colour refinement plus individualisation, taking the smallest
// relabelled edge list over all leaves of the search tree. Transpositions of twin vertices
// (same neighbourhood apart from each other) are automorphisms that fix the current
// partition, so only one twin per class is branched on. Exponential in the worst case;
// intended for the small graphs pooling works on.

namespace detail {

/// Stable refinement: new colour = rank of (old colour, sorted neighbour colours).
inline std::vector<Index> refine_colors(const Graph& g, std::vector<Index> colors) {
    const Index n = g.node_count();
    Index cells = 0;
    {
        std::vector<Index> sorted = colors;
        std::sort(sorted.begin(), sorted.end());
        cells = static_cast<Index>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    }
    while (true) {
        std::vector<std::pair<std::vector<Index>, Index>> keys(n);
        for (Index x = 0; x < n; ++x) {
            std::vector<Index> key;
            key.reserve(g.degree(x) + 1);
            key.push_back(colors[x]);
            std::vector<Index> nb;
            nb.reserve(g.degree(x));
            for (Index y : g.neighbors(x)) nb.push_back(colors[y]);
            std::sort(nb.begin(), nb.end());
            key.insert(key.end(), nb.begin(), nb.end());
            keys[x] = {std::move(key), x};
        }
        std::vector<std::vector<Index>> distinct;
        distinct.reserve(n);
        for (const auto& k : keys) distinct.push_back(k.first);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<Index> next(n);
        for (Index x = 0; x < n; ++x) {
            next[x] = static_cast<Index>(
                std::lower_bound(distinct.begin(), distinct.end(), keys[x].first) -
                distinct.begin());
        }
        colors = std::move(next);
        if (distinct.size() == cells) return colors;
        cells = distinct.size();
    }
}

inline bool are_twins(const Graph& g, Index a, Index b) {
    auto na = g.neighbors(a);
    auto nb = g.neighbors(b);
    std::vector<Index> ra, rb;
    for (Index y : na) if (y != b) ra.push_back(y);
    for (Index y : nb) if (y != a) rb.push_back(y);
    return ra == rb;
}

struct CanonSearch {
    const Graph& g;
    std::optional<std::vector<Edge>> best_cert;
    std::vector<Index> best_labels;

    void run(std::vector<Index> colors) {
        colors = refine_colors(g, std::move(colors));
        const Index n = g.node_count();
        std::vector<Index> cell_size(n, 0);
        for (Index c : colors) ++cell_size[c];
        Index target = n;
        for (Index c = 0; c < n; ++c) {
            if (cell_size[c] > 1) {
                target = c;
                break;
            }
        }
        if (target == n) {
            leaf(colors);
            return;
        }
        std::vector<Index> members;
        for (Index x = 0; x < n; ++x) if (colors[x] == target) members.push_back(x);
        std::vector<Index> reps;
        for (Index x : members) {
            bool dup = false;
            for (Index r : reps) {
                if (are_twins(g, r, x)) {
                    dup = true;
                    break;
                }
            }
            if (!dup) reps.push_back(x);
        }
        for (Index v : reps) {
            std::vector<Index> split(n);
            for (Index x = 0; x < n; ++x) {
                split[x] = 2 * colors[x] + ((colors[x] == target && x != v) ? 1 : 0);
            }
            run(std::move(split));
        }
    }

    void leaf(const std::vector<Index>& labels) {
        std::vector<Edge> cert;
        cert.reserve(g.edge_count());
        for (const Edge& e : g.edges()) cert.push_back(Edge::make(labels[e.u], labels[e.v]));
        std::sort(cert.begin(), cert.end());
        if (!best_cert || cert < *best_cert) {
            best_cert = std::move(cert);
            best_labels = labels;
        }
    }
};

}  // namespace detail

/// Canonical label of every node: isomorphic graphs relabelled by their canonical labellings
/// become identical.
inline std::vector<Index> canonical_labeling(const Graph& g) {
    if (g.node_count() == 0) return {};
    detail::CanonSearch search{g, std::nullopt, {}};
    search.run(std::vector<Index>(g.node_count(), 0));
    return search.best_labels;
}

/// Structure-only canonical representative (features dropped).
inline Graph canonical_form(const Graph& g) {
    return g.with_features(std::nullopt).permuted(canonical_labeling(g));
}

inline bool isomorphic(const Graph& a, const Graph& b) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
    return canonical_form(a) == canonical_form(b);
}

}  // namespace magpool
