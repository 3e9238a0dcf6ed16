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
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "magpool/diffusion.hpp"
#include "magpool/diversity.hpp"
#include "magpool/edge_pool.hpp"
#include "magpool/graph.hpp"

namespace magpool {

/// l2 distance between the K smallest normalized-Laplacian eigenvalues of each graph, with
/// K the pooled node count and both spectra in ascending order.
inline double spectral_distance(const Graph& g, const Graph& pooled,
                                const DiffusionOptions& opts = {}) {
    if (pooled.node_count() > g.node_count()) {
        throw Error(ErrorCode::InvalidParams, "pooled graph is larger than the original");
    }
    const auto k = static_cast<Eigen::Index>(pooled.node_count());
    if (k == 0) return 0.0;
    const Vector a = spectral_decomposition(g, opts).eigenvalues.head(k);
    const Vector b = spectral_decomposition(pooled, opts).eigenvalues.head(k);
    return (a - b).norm();
}

/// |Mag(G) - Mag(G')| / Mag(G) on diffusion distances at scale t.
inline double relative_magnitude_difference(const Graph& g, const Graph& pooled, double t = 1.0,
                                            const SolverOptions& solver = {},
                                            const DiffusionOptions& opts = {}) {
    const double mag = magnitude_value(diffusion_distances(g, opts), t, solver);
    if (!(mag > 0.0)) throw Error(ErrorCode::InvalidParams, "original magnitude must be positive");
    const double pooled_mag = magnitude_value(diffusion_distances(pooled, opts), t, solver);
    return std::abs(mag - pooled_mag) / mag;
}

enum class PoolingMethod { Magnitude, Spread, Random };

constexpr std::string_view to_string(PoolingMethod m) {
    switch (m) {
    case PoolingMethod::Magnitude: return "mag";
    case PoolingMethod::Spread: return "spread";
    case PoolingMethod::Random: return "random";
    }
    return "?";
}

inline PoolingMethod parse_pooling_method(std::string_view s) {
    if (s == "mag") return PoolingMethod::Magnitude;
    if (s == "spread") return PoolingMethod::Spread;
    if (s == "random") return PoolingMethod::Random;
    throw Error(ErrorCode::InvalidParams, "unknown pooling method '" + std::string(s) + "'");
}

struct PreservationReport {
    Index graph_id = 0;
    double ratio = 1.0;
    PoolingMethod method = PoolingMethod::Spread;
    double spectral_distance = 0.0;
    double relative_mag_diff = 0.0;

    friend bool operator==(const PreservationReport&, const PreservationReport&) = default;
};

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
    double q10 = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double q90 = 0.0;
};

/// Linear-interpolation quantile of an ascending sample (position q * (n - 1)).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<Index>(std::floor(pos));
    const Index hi = std::min(lo + 1, static_cast<Index>(sorted.size() - 1));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Mean and population standard deviation, plus quantiles at 10/25/75/90%.
inline Summary summarize(std::vector<double> values) {
    Summary s;
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, nan, nan, nan};
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(values.size()));
    s.q10 = quantile_sorted(values, 0.10);
    s.q25 = quantile_sorted(values, 0.25);
    s.q75 = quantile_sorted(values, 0.75);
    s.q90 = quantile_sorted(values, 0.90);
    return s;
}

struct SweepSummary {
    double ratio = 1.0;
    PoolingMethod method = PoolingMethod::Spread;
    Index count = 0;
    Summary spectral_distance;
    Summary relative_mag_diff;
};

struct SweepResult {
    std::vector<PreservationReport> rows;
    std::vector<SweepSummary> summary;
    Index failures = 0;
    std::vector<std::string> failure_messages;
};

/// Pools with a single method and returns the pooled graph. Random pooling is seeded from the
/// configured seed plus the graph id so every graph draws its own stream.
inline PoolingResult pool_with(PoolingMethod method, const Graph& g, double ratio,
                               const PoolingConfig& defaults, Index graph_id = 0) {
    PoolingConfig cfg = defaults;
    cfg.ratio = ratio;
    cfg.log_diversity = false;
    switch (method) {
    case PoolingMethod::Magnitude: cfg.measure = Measure::Magnitude; break;
    case PoolingMethod::Spread: cfg.measure = Measure::Spread; break;
    case PoolingMethod::Random:
        return random_pool(g, std::nullopt, ratio, cfg.tie_break.seed + graph_id,
                           cfg.aggregation);
    }
    return pool(g, std::nullopt, cfg);
}

/// One report per (graph, ratio, method), in that nesting order, plus per-(ratio, method)
/// aggregates. Failing graphs are counted and left out of the aggregates.
inline SweepResult ratio_sweep(std::span<const Graph> dataset, std::span<const double> ratios,
                               std::span<const PoolingMethod> methods,
                               const PoolingConfig& defaults = {}) {
    for (double r : ratios) {
        if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidParams, "ratio outside (0, 1]");
    }
    const Index per_graph = ratios.size() * methods.size();
    const Index total = dataset.size() * per_graph;
    std::vector<std::optional<PreservationReport>> slots(total);
    std::vector<std::string> errors(total);

    detail::parallel_for(total, defaults.threads, [&](Index idx) {
        const Index gi = idx / per_graph;
        const Index ri = (idx % per_graph) / methods.size();
        const Index mi = idx % methods.size();
        const Graph& g = dataset[gi];
        try {
            PoolingConfig cfg = defaults;
            cfg.threads = 1;
            const PoolingResult res = pool_with(methods[mi], g, ratios[ri], cfg, gi);
            PreservationReport rep;
            rep.graph_id = gi;
            rep.ratio = ratios[ri];
            rep.method = methods[mi];
            rep.spectral_distance = spectral_distance(g, res.pooled, cfg.diffusion);
            rep.relative_mag_diff = relative_magnitude_difference(g, res.pooled, cfg.scale,
                                                                  cfg.solver, cfg.diffusion);
            slots[idx] = rep;
        } catch (const std::exception& err) {
            errors[idx] = "graph " + std::to_string(gi) + ": " + err.what();
        }
    });

    SweepResult out;
    for (Index i = 0; i < total; ++i) {
        if (slots[i]) {
            out.rows.push_back(*slots[i]);
        } else {
            ++out.failures;
            out.failure_messages.push_back(errors[i]);
        }
    }
    for (double r : ratios) {
        for (PoolingMethod m : methods) {
            std::vector<double> spec, mag;
            for (const auto& row : out.rows) {
                if (row.ratio == r && row.method == m) {
                    spec.push_back(row.spectral_distance);
                    mag.push_back(row.relative_mag_diff);
                }
            }
            out.summary.push_back({r, m, spec.size(), summarize(spec), summarize(mag)});
        }
    }
    return out;
}

}  // namespace magpool
