// Pools a 64-node ring to half its size with SpreadEdgePool and prints the diversity trail.

#include <cstdio>

#include "magpool/magpool.hpp"

int main() {
    const magpool::Graph ring = magpool::ring_graph(64);

    magpool::PoolingConfig cfg;
    cfg.ratio = 0.5;
    cfg.measure = magpool::Measure::Spread;
    cfg.tie_break = magpool::TieBreak::seeded(7);

    const magpool::PoolingResult res = magpool::pool(ring, cfg);
    std::printf("pooled: %zu nodes, %zu edges, %zu rounds\n", res.pooled.node_count(),
                res.pooled.edge_count(), res.trace.rescoring_boundaries.size());
    for (const auto& step : res.diversity_log) {
        std::printf("round %zu merge %zu<-%zu  spread %.6f -> %.6f\n", step.round,
                    step.merge.survivor, step.merge.absorbed, *step.spread_before,
                    *step.spread_after);
    }
    return 0;
}
