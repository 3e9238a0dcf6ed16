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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magpool/error.hpp"
#include "magpool/graph.hpp"

namespace magpool {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct DiffusionOptions {
    /// Dense eigensolver cap; larger inputs are rejected rather than approximated.
    Index max_nodes = 2000;
    /// Eigenvalues this close to zero are snapped to exactly zero.
    double zero_eigenvalue_snap = 1e-8;
};

/// I - D^{-1/2} A D^{-1/2}. Isolated nodes get the identity row.
inline Matrix normalized_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Matrix lap = Matrix::Identity(n, n);
    std::vector<double> inv_sqrt_deg(g.node_count());
    for (Index x = 0; x < g.node_count(); ++x) {
        const Index deg = g.degree(x);
        inv_sqrt_deg[x] = deg == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(deg));
    }
    for (const Edge& e : g.edges()) {
        const double w = inv_sqrt_deg[e.u] * inv_sqrt_deg[e.v];
        lap(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = -w;
        lap(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = -w;
    }
    return lap;
}

struct SpectralDecomposition {
    /// Ascending.
    Vector eigenvalues;
    /// Column i pairs with eigenvalues[i].
    Matrix eigenvectors;
};

inline void check_size(const Graph& g, const DiffusionOptions& opts) {
    if (g.node_count() > opts.max_nodes) {
        throw Error(ErrorCode::SizeLimitExceeded,
                    std::to_string(g.node_count()) + " nodes exceeds the dense eigensolver cap of " +
                        std::to_string(opts.max_nodes));
    }
}

inline SpectralDecomposition spectral_decomposition(const Graph& g,
                                                    const DiffusionOptions& opts = {}) {
    check_size(g, opts);
    if (g.node_count() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized_laplacian(g));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "normalized Laplacian eigensolver did not converge (n=" +
                        std::to_string(g.node_count()) + ")");
    }
    SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
    for (auto& lambda : out.eigenvalues) {
        if (std::abs(lambda) < opts.zero_eigenvalue_snap) lambda = 0.0;
    }
    return out;
}

/// Diffusion coordinates of a connected graph: row x holds lambda_i * psi_i(x) over every
/// non-trivial eigenpair, so the result is n x (n-1). The trivial eigenpair has weight zero
/// and is left out; a single node embeds as a 1 x 0 matrix.
inline Matrix diffusion_embedding(const Graph& g, const DiffusionOptions& opts = {}) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    if (n <= 1) return Matrix(n, 0);
    if (connected_components(g).size() != 1) {
        throw Error(ErrorCode::InvalidParams,
                    "diffusion_embedding expects a connected graph; split by component first");
    }
    const SpectralDecomposition spec = spectral_decomposition(g, opts);
    // Ascending order puts the single zero eigenvalue of a connected graph first.
    return spec.eigenvectors.rightCols(n - 1) * spec.eigenvalues.tail(n - 1).asDiagonal();
}

/// Symmetric pairwise distances; +inf marks pairs in different components.
struct DistanceMatrix {
    Matrix values;

    Index size() const { return static_cast<Index>(values.rows()); }
    double operator()(Index x, Index y) const {
        return values(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
};

struct SimilarityMatrix {
    Matrix values;
    double scale = 1.0;

    Index size() const { return static_cast<Index>(values.rows()); }
};

inline Matrix pairwise_euclidean(const Matrix& points) {
    const Eigen::Index n = points.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dist = (points.row(i) - points.row(j)).norm();
            d(i, j) = dist;
            d(j, i) = dist;
        }
    }
    return d;
}

inline DistanceMatrix diffusion_distances(const Graph& g, const DiffusionOptions& opts = {}) {
    check_size(g, opts);
    const auto n = static_cast<Eigen::Index>(g.node_count());
    DistanceMatrix out{Matrix::Constant(n, n, kInfinity)};
    for (const auto& comp : connected_components(g)) {
        const Matrix local = pairwise_euclidean(diffusion_embedding(induced_subgraph(g, comp), opts));
        for (Index i = 0; i < comp.size(); ++i) {
            for (Index j = 0; j < comp.size(); ++j) {
                out.values(static_cast<Eigen::Index>(comp[i]), static_cast<Eigen::Index>(comp[j])) =
                    local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return out;
}

/// exp(-t d) entrywise; infinite distances map to exactly zero.
inline SimilarityMatrix similarity_matrix(const DistanceMatrix& d, double t = 1.0) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidParams, "scale t must be a positive finite real");
    }
    SimilarityMatrix out{d.values.unaryExpr([t](double x) {
                             return std::isinf(x) ? 0.0 : std::exp(-t * x);
                         }),
                         t};
    return out;
}

/// Merges points u and v of a distance matrix: the merged point sits at min(u, v) and its
/// distance to every w is min(d(u, w), d(v, w)). The row and column of max(u, v) are removed,
/// matching the index compaction of contract_edge.
inline DistanceMatrix min_distance_update(const DistanceMatrix& d, Index u, Index v) {
    const Index n = d.size();
    if (u >= n || v >= n) {
        throw Error(ErrorCode::IndexOutOfRange, "merge (" + std::to_string(u) + "," +
                                                    std::to_string(v) + ") on " +
                                                    std::to_string(n) + " points");
    }
    if (u == v) throw Error(ErrorCode::InvalidParams, "cannot merge a point with itself");
    const auto keep = static_cast<Eigen::Index>(std::min(u, v));
    const auto drop = static_cast<Eigen::Index>(std::max(u, v));

    Matrix merged = d.values;
    merged.row(keep) = d.values.row(keep).cwiseMin(d.values.row(drop));
    merged.col(keep) = merged.row(keep).transpose();
    merged(keep, keep) = 0.0;

    const auto m = static_cast<Eigen::Index>(n) - 1;
    Matrix out(m, m);
    const Eigen::Index tail = m - drop;
    out.topLeftCorner(drop, drop) = merged.topLeftCorner(drop, drop);
    out.topRightCorner(drop, tail) = merged.topRightCorner(drop, tail);
    out.bottomLeftCorner(tail, drop) = merged.bottomLeftCorner(tail, drop);
    out.bottomRightCorner(tail, tail) = merged.bottomRightCorner(tail, tail);
    return {std::move(out)};
}

/// Blocks of mutually finite distance, as ascending index lists ordered by smallest index.
inline std::vector<std::vector<Index>> finite_blocks(const Matrix& d) {
    const Index n = static_cast<Index>(d.rows());
    std::vector<char> seen(n, 0);
    std::vector<std::vector<Index>> blocks;
    for (Index start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<Index> block{start};
        seen[start] = 1;
        for (Index head = 0; head < block.size(); ++head) {
            const Index x = block[head];
            for (Index y = 0; y < n; ++y) {
                if (!seen[y] && std::isfinite(d(static_cast<Eigen::Index>(x),
                                                static_cast<Eigen::Index>(y)))) {
                    seen[y] = 1;
                    block.push_back(y);
                }
            }
        }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

inline Matrix principal_submatrix(const Matrix& m, std::span<const Index> idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<Index>(i)]),
                          static_cast<Eigen::Index>(idx[static_cast<Index>(j)]));
        }
    }
    return out;
}

}  // namespace magpool
