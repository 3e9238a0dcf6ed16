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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "magpool/canonical.hpp"
#include "magpool/diffusion.hpp"
#include "magpool/diversity.hpp"
#include "magpool/error.hpp"
#include "magpool/graph.hpp"

namespace magpool {

enum class MetricMode {
    /// Fresh diffusion distances on every contracted graph.
    Exact,
    /// Carry one distance matrix and merge rows with min_distance_update.
    MinUpdate,
    /// Exact up to PoolingConfig::exact_node_limit nodes, MinUpdate above.
    Auto,
};

struct TieBreak {
    enum class Kind { Seeded, Lexicographic };
    Kind kind = Kind::Seeded;
    std::uint64_t seed = 0;

    static TieBreak seeded(std::uint64_t s) { return {Kind::Seeded, s}; }
    static TieBreak lexicographic() { return {Kind::Lexicographic, 0}; }
};

struct PoolingConfig {
    double ratio = 0.5;
    Measure measure = Measure::Spread;
    MetricMode metric_mode = MetricMode::Auto;
    Aggregation aggregation = Aggregation::Mean;
    TieBreak tie_break = TieBreak::seeded(0);
    double scale = 1.0;

    Index exact_node_limit = 200;
    /// Scores within this distance of the round minimum count as tied.
    double tie_tolerance = 1e-12;
    /// Record magnitude and spread before/after every contraction.
    bool log_diversity = true;
    /// Lexicographic ties use canonical node labels up to this size, raw indices above it.
    Index canonical_tie_break_limit = 256;
    /// Edge-scoring workers; 0 uses the hardware concurrency.
    unsigned threads = 0;

    SolverOptions solver;
    DiffusionOptions diffusion;

    void validate() const {
        if (!(ratio > 0.0 && ratio <= 1.0)) {
            throw Error(ErrorCode::InvalidParams, "pooling ratio must lie in (0, 1]");
        }
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw Error(ErrorCode::InvalidParams, "scale must be a positive finite real");
        }
    }

    MetricMode resolved_mode(Index n) const {
        if (metric_mode != MetricMode::Auto) return metric_mode;
        return n <= exact_node_limit ? MetricMode::Exact : MetricMode::MinUpdate;
    }
};

/// round-half-up(r * n)
inline Index target_node_count(double ratio, Index n) {
    return static_cast<Index>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

struct EdgeScoreTable {
    std::vector<Edge> edges;
    /// scores[i] belongs to edges[i]; +inf marks an edge whose diversity could not be solved.
    std::vector<double> scores;
    Measure measure = Measure::Spread;
    MetricMode metric_mode = MetricMode::Exact;
    double base_value = 0.0;
    Index unscoreable = 0;
};

namespace detail {

inline void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<Index>(threads, count));
    if (threads <= 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (Index i = next++; i < count; i = next++) body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Uniform index in [0, n) from one 64-bit draw; identical on every platform.
inline Index uniform_index(std::mt19937_64& rng, Index n) {
    return static_cast<Index>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace detail

/// s(e) = |D(G) - D(G/e)| for every edge, where D is magnitude or spread of the diffusion
/// metric. `d` must be the distance matrix of `g` under the resolved metric mode.
inline EdgeScoreTable score_edges(const Graph& g, const PoolingConfig& cfg,
                                  const DistanceMatrix& d) {
    if (d.size() != g.node_count()) {
        throw Error(ErrorCode::ShapeMismatch, "distance matrix does not match graph");
    }
    EdgeScoreTable table;
    table.edges = g.edges();
    table.measure = cfg.measure;
    table.metric_mode = cfg.resolved_mode(g.node_count());
    table.scores.assign(table.edges.size(), kInfinity);

    std::optional<double> base;
    try {
        base = measure_value(d, cfg.measure, cfg.scale, cfg.solver);
    } catch (const Error& err) {
        if (!is_numerical(err.code())) throw;
    }
    if (!base) {
        table.base_value = std::numeric_limits<double>::quiet_NaN();
        table.unscoreable = table.edges.size();
        return table;
    }
    table.base_value = *base;

    std::vector<char> failed(table.edges.size(), 0);
    detail::parallel_for(table.edges.size(), cfg.threads, [&](Index i) {
        const Edge e = table.edges[i];
        try {
            const DistanceMatrix contracted =
                table.metric_mode == MetricMode::MinUpdate
                    ? min_distance_update(d, e.u, e.v)
                    : diffusion_distances(contract_edge(g, e).graph, cfg.diffusion);
            table.scores[i] =
                std::abs(*base - measure_value(contracted, cfg.measure, cfg.scale, cfg.solver));
        } catch (const Error& err) {
            if (!is_numerical(err.code())) throw;
            failed[i] = 1;
        }
    });
    table.unscoreable = static_cast<Index>(std::count(failed.begin(), failed.end(), 1));
    return table;
}

/// Diversity of the pooled graph before and after one contraction.
struct DiversityStep {
    Index round = 0;
    Merge merge;
    double score = 0.0;
    std::optional<double> magnitude_before;
    std::optional<double> magnitude_after;
    std::optional<double> spread_before;
    std::optional<double> spread_after;

    std::optional<double> magnitude_delta() const {
        if (!magnitude_before || !magnitude_after) return std::nullopt;
        return std::abs(*magnitude_before - *magnitude_after);
    }
    std::optional<double> spread_delta() const {
        if (!spread_before || !spread_after) return std::nullopt;
        return std::abs(*spread_before - *spread_after);
    }
};

struct PoolingResult {
    Graph pooled;
    std::optional<Matrix> pooled_features;
    AssignmentMatrix assignment;
    ContractionTrace trace;
    std::vector<DiversityStep> diversity_log;
    /// Set when the edges ran out before the target node count was reached.
    bool exhausted = false;
    Index target_nodes = 0;
    Index unscoreable_edges = 0;
};

namespace detail {

struct LoggedValues {
    std::optional<double> magnitude;
    std::optional<double> spread;
};

inline LoggedValues log_values(const DistanceMatrix& d, const PoolingConfig& cfg) {
    LoggedValues out;
    out.spread = spread_value(d, cfg.scale);
    try {
        out.magnitude = magnitude_value(d, cfg.scale, cfg.solver);
    } catch (const Error& err) {
        if (!is_numerical(err.code())) throw;
    }
    return out;
}

/// Scores for one rescoring round, aligned with g.edges().
using RoundScorer = std::function<EdgeScoreTable(const Graph&, const DistanceMatrix&)>;

/// Greedy contraction loop shared by the score-driven and the random pooling. Each round
/// scores the current graph once, then repeatedly contracts the lowest-scored edge whose
/// endpoints are both untouched this round, until the target is met or no such edge is
/// left; the next round rescores.
inline PoolingResult run_pooling(const Graph& g, const std::optional<Matrix>& features,
                                 const PoolingConfig& cfg, bool needs_distances,
                                 const RoundScorer& scorer) {
    cfg.validate();
    if (features && static_cast<Index>(features->rows()) != g.node_count()) {
        throw Error(ErrorCode::ShapeMismatch, "feature rows do not match node count");
    }
    const Index n0 = g.node_count();
    const Index k = target_node_count(cfg.ratio, n0);
    const MetricMode mode = cfg.resolved_mode(n0);
    const bool carry = mode == MetricMode::MinUpdate;

    PoolingResult result;
    result.target_nodes = k;

    Graph current = g.with_features(std::nullopt);
    std::vector<Index> reps(n0);
    std::iota(reps.begin(), reps.end(), Index{0});
    std::mt19937_64 rng(cfg.tie_break.seed);

    std::optional<DistanceMatrix> dist;
    bool dist_fresh = false;
    const auto ensure_distances = [&] {
        if (!dist_fresh) {
            dist = diffusion_distances(current, cfg.diffusion);
            dist_fresh = true;
        }
    };
    LoggedValues before;
    if (cfg.log_diversity && current.node_count() > k && current.edge_count() > 0) {
        ensure_distances();
        before = log_values(*dist, cfg);
    }

    Index round = 0;
    while (current.node_count() > k && current.edge_count() > 0) {
        result.trace.rescoring_boundaries.push_back(result.trace.merges.size());
        if (needs_distances || carry) ensure_distances();
        const EdgeScoreTable table =
            scorer(current, dist ? *dist : DistanceMatrix{Matrix(0, 0)});
        result.unscoreable_edges += table.unscoreable;
        if (!table.edges.empty() && table.unscoreable == table.edges.size()) {
            throw Error(ErrorCode::IllConditioned,
                        "every remaining edge is unscoreable in round " + std::to_string(round));
        }

        std::vector<Index> labels(current.node_count());
        std::iota(labels.begin(), labels.end(), Index{0});
        if (cfg.tie_break.kind == TieBreak::Kind::Lexicographic &&
            current.node_count() <= cfg.canonical_tie_break_limit) {
            labels = canonical_labeling(current);
        }

        const Index round_n = current.node_count();
        std::vector<char> matched(round_n, 0);
        std::vector<Index> to_current(round_n);
        std::iota(to_current.begin(), to_current.end(), Index{0});

        while (current.node_count() > k) {
            double best = kInfinity;
            bool any = false;
            for (Index i = 0; i < table.edges.size(); ++i) {
                const Edge e = table.edges[i];
                if (matched[e.u] || matched[e.v]) continue;
                if (!any || table.scores[i] < best) best = table.scores[i];
                any = true;
            }
            if (!any) break;
            std::vector<Index> candidates;
            for (Index i = 0; i < table.edges.size(); ++i) {
                const Edge e = table.edges[i];
                if (matched[e.u] || matched[e.v]) continue;
                if (table.scores[i] <= best + cfg.tie_tolerance) candidates.push_back(i);
            }
            Index pick = candidates.front();
            if (cfg.tie_break.kind == TieBreak::Kind::Seeded) {
                pick = candidates[detail::uniform_index(rng, candidates.size())];
            } else {
                auto key = [&](Index i) {
                    return Edge::make(labels[table.edges[i].u], labels[table.edges[i].v]);
                };
                for (Index i : candidates) {
                    if (key(i) < key(pick)) pick = i;
                }
            }

            const Edge chosen = table.edges[pick];
            matched[chosen.u] = matched[chosen.v] = 1;
            const Edge here = Edge::make(to_current[chosen.u], to_current[chosen.v]);
            Contraction c = contract_edge(current, here);
            const Merge merge{reps[here.u], reps[here.v]};
            reps.erase(reps.begin() + static_cast<std::ptrdiff_t>(here.v));
            for (auto& x : to_current) x = c.mapping[x];
            if (carry) {
                dist = min_distance_update(*dist, here.u, here.v);
            } else {
                dist_fresh = false;
            }
            current = std::move(c.graph);
            result.trace.merges.push_back(merge);

            if (cfg.log_diversity) {
                ensure_distances();
                const LoggedValues after = log_values(*dist, cfg);
                result.diversity_log.push_back({round, merge, table.scores[pick], before.magnitude,
                                                after.magnitude, before.spread, after.spread});
                before = after;
            }
        }
        ++round;
    }

    result.exhausted = current.node_count() > k;
    result.assignment = build_assignment(result.trace, n0);
    result.pooled = std::move(current);
    if (features) {
        result.pooled_features = aggregate_features(*features, result.assignment, cfg.aggregation);
        result.pooled = result.pooled.with_features(result.pooled_features);
    }
    return result;
}

}  // namespace detail

/// MagEdgePool (measure = Magnitude) or SpreadEdgePool (measure = Spread) on explicit features.
inline PoolingResult pool(const Graph& g, const std::optional<Matrix>& features,
                          const PoolingConfig& cfg) {
    return detail::run_pooling(g, features, cfg, true,
                               [&cfg](const Graph& current, const DistanceMatrix& d) {
                                   return score_edges(current, cfg, d);
                               });
}

/// Pools with the graph's own node features, when it has any.
inline PoolingResult pool(const Graph& g, const PoolingConfig& cfg) {
    return pool(g, g.features(), cfg);
}

/// Baseline: identical contraction mechanics, but every valid edge is equally likely.
inline PoolingResult random_pool(const Graph& g, const std::optional<Matrix>& features,
                                 double ratio, std::uint64_t seed,
                                 Aggregation aggregation = Aggregation::Mean,
                                 bool log_diversity = false) {
    PoolingConfig cfg;
    cfg.ratio = ratio;
    cfg.tie_break = TieBreak::seeded(seed);
    cfg.aggregation = aggregation;
    cfg.metric_mode = MetricMode::Exact;
    cfg.log_diversity = log_diversity;
    return detail::run_pooling(g, features, cfg, false,
                               [](const Graph& current, const DistanceMatrix&) {
                                   EdgeScoreTable t;
                                   t.edges = current.edges();
                                   t.scores.assign(t.edges.size(), 0.0);
                                   return t;
                               });
}

inline PoolingResult random_pool(const Graph& g, double ratio, std::uint64_t seed,
                                 Aggregation aggregation = Aggregation::Mean) {
    return random_pool(g, g.features(), ratio, seed, aggregation);
}

struct BoundStep {
    Index step = 0;
    double magnitude_delta = 0.0;
    double spread_delta = 0.0;
    /// Smallest constant satisfying |Mag(G^(k-1)) - Sp(G^(k))| <= C * spread_delta.
    std::optional<double> constant;
    bool holds = false;
    bool degenerate = false;
    bool missing = false;
};

/// Per-step comparison of the magnitude change against 3 C times the spread change, with C
/// estimated per step. Magnitudes come from `magnitude_log`, spreads from `spread_log`; pass
/// the same log twice to inspect a single run. Diagnostic only.
inline std::vector<BoundStep> pooling_bound_diagnostic(
    std::span<const DiversityStep> magnitude_log, std::span<const DiversityStep> spread_log,
    double degenerate_below = 1e-12) {
    const Index steps = std::min(magnitude_log.size(), spread_log.size());
    std::vector<BoundStep> out;
    out.reserve(steps);
    for (Index i = 0; i < steps; ++i) {
        BoundStep s;
        s.step = i + 1;
        const auto& m = magnitude_log[i];
        const auto& p = spread_log[i];
        if (!m.magnitude_before || !m.magnitude_after || !p.spread_before || !p.spread_after) {
            s.missing = true;
            out.push_back(s);
            continue;
        }
        s.magnitude_delta = std::abs(*m.magnitude_before - *m.magnitude_after);
        s.spread_delta = std::abs(*p.spread_before - *p.spread_after);
        if (s.spread_delta < degenerate_below) {
            s.degenerate = true;
            out.push_back(s);
            continue;
        }
        s.constant = std::abs(*m.magnitude_before - *p.spread_after) / s.spread_delta;
        s.holds = s.magnitude_delta <= 3.0 * *s.constant * s.spread_delta;
        out.push_back(s);
    }
    return out;
}

}  // namespace magpool
