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

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "magpool/diffusion.hpp"
#include "magpool/error.hpp"
#include "magpool/graph.hpp"

namespace magpool {

enum class Measure { Magnitude, Spread };

constexpr std::string_view to_string(Measure m) {
    return m == Measure::Magnitude ? "mag" : "spread";
}

struct SolverOptions {
    /// Maximum accepted ||zeta w - 1||_inf.
    double tolerance = 1e-8;
    /// Diagonal jitter for the single retry, relative to trace(zeta)/n.
    double jitter_factor = 1e-10;
};

struct Weighting {
    Vector weights;
    double residual = 0.0;
    bool jittered = false;

    double magnitude() const { return weights.sum(); }
};

namespace detail {

inline double condition_estimate(const Matrix& z) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(z, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) return kInfinity;
    const Vector abs_vals = eig.eigenvalues().cwiseAbs();
    const double lo = abs_vals.minCoeff();
    return lo == 0.0 ? kInfinity : abs_vals.maxCoeff() / lo;
}

inline std::optional<Weighting> try_cholesky(const Matrix& z, const Matrix& factor_input,
                                             double tolerance, bool jittered) {
    Eigen::LLT<Matrix> llt(factor_input);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Vector ones = Vector::Ones(z.rows());
    Vector w = llt.solve(ones);
    if (!w.allFinite()) return std::nullopt;
    const double residual = (z * w - ones).cwiseAbs().maxCoeff();
    if (!(residual <= tolerance)) return std::nullopt;
    return Weighting{std::move(w), residual, jittered};
}

}  // namespace detail

/// Solves zeta w = 1 with a Cholesky factorization. On failure (not positive definite, or the
/// residual exceeds the tolerance) retries once with a small diagonal jitter, then gives up
/// with IllConditioned.
inline Weighting weighting(const SimilarityMatrix& zeta, const SolverOptions& opts = {}) {
    const Matrix& z = zeta.values;
    if (z.rows() != z.cols()) throw Error(ErrorCode::ShapeMismatch, "similarity matrix not square");
    if (z.rows() == 0) return Weighting{Vector(0), 0.0, false};
    if (auto w = detail::try_cholesky(z, z, opts.tolerance, false)) return *std::move(w);

    const double jitter = opts.jitter_factor * z.trace() / static_cast<double>(z.rows());
    Matrix shifted = z;
    shifted.diagonal().array() += jitter;
    if (auto w = detail::try_cholesky(z, shifted, opts.tolerance, true)) return *std::move(w);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", detail::condition_estimate(z));
    throw Error(ErrorCode::IllConditioned, "weighting solve failed for " +
                                               std::to_string(z.rows()) +
                                               " points, condition estimate " + buf);
}

struct ComponentDiversity {
    Index size = 0;
    std::optional<double> magnitude;
    double spread = 0.0;
};

struct DiversityValue {
    std::optional<double> magnitude;
    double spread = 0.0;
    double scale = 1.0;
    std::vector<ComponentDiversity> per_component;
};

/// Sum over x of 1 / sum over y of exp(-t d(x, y)); infinite distances contribute zero, so
/// the value is additive over components without splitting.
inline double spread_value(const DistanceMatrix& d, double t = 1.0) {
    const SimilarityMatrix z = similarity_matrix(d, t);
    return z.values.rowwise().sum().cwiseInverse().sum();
}

/// Magnitude of the space, summed over blocks of mutually finite distance. One-point blocks
/// contribute exactly 1.
inline double magnitude_value(const DistanceMatrix& d, double t = 1.0,
                              const SolverOptions& opts = {},
                              std::vector<ComponentDiversity>* parts = nullptr) {
    const SimilarityMatrix z = similarity_matrix(d, t);
    double total = 0.0;
    const auto blocks = finite_blocks(d.values);
    for (Index b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        double mag = 1.0;
        if (idx.size() > 1) {
            try {
                mag = weighting({principal_submatrix(z.values, idx), t}, opts).magnitude();
            } catch (const Error& err) {
                throw Error(err.code(), "component " + std::to_string(b) + ": " + err.what());
            }
        }
        total += mag;
        if (parts) {
            const Matrix sub = principal_submatrix(z.values, idx);
            parts->push_back({idx.size(), mag, sub.rowwise().sum().cwiseInverse().sum()});
        }
    }
    return total;
}

inline double measure_value(const DistanceMatrix& d, Measure m, double t = 1.0,
                            const SolverOptions& opts = {}) {
    return m == Measure::Magnitude ? magnitude_value(d, t, opts) : spread_value(d, t);
}

inline DiversityValue magnitude(const DistanceMatrix& d, double t = 1.0,
                                const SolverOptions& opts = {}) {
    DiversityValue out;
    out.scale = t;
    out.magnitude = magnitude_value(d, t, opts, &out.per_component);
    out.spread = spread_value(d, t);
    return out;
}

inline DiversityValue magnitude(const Graph& g, double t = 1.0, const SolverOptions& opts = {},
                                const DiffusionOptions& diff = {}) {
    return magnitude(diffusion_distances(g, diff), t, opts);
}

/// Spread only; `magnitude` is left empty and no linear solve happens.
inline DiversityValue spread(const DistanceMatrix& d, double t = 1.0) {
    DiversityValue out;
    out.scale = t;
    out.spread = spread_value(d, t);
    const SimilarityMatrix z = similarity_matrix(d, t);
    for (const auto& idx : finite_blocks(d.values)) {
        const Matrix sub = principal_submatrix(z.values, idx);
        out.per_component.push_back(
            {idx.size(), std::nullopt, sub.rowwise().sum().cwiseInverse().sum()});
    }
    return out;
}

struct ProfilePoint {
    double scale = 0.0;
    std::optional<double> value;
    std::optional<std::string> error;
};

/// Magnitude or spread as a function of the scale t. A failing grid point records its error
/// and the remaining points are still evaluated.
inline std::vector<ProfilePoint> diversity_profile(const DistanceMatrix& d,
                                                   std::span<const double> scales, Measure m,
                                                   const SolverOptions& opts = {}) {
    if (scales.empty()) throw Error(ErrorCode::InvalidParams, "empty scale grid");
    for (Index i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0) || (i > 0 && scales[i] < scales[i - 1])) {
            throw Error(ErrorCode::InvalidParams, "scale grid must be ascending and positive");
        }
    }
    std::map<double, ProfilePoint> cache;
    std::vector<ProfilePoint> out;
    out.reserve(scales.size());
    for (double t : scales) {
        auto it = cache.find(t);
        if (it == cache.end()) {
            ProfilePoint p{t, std::nullopt, std::nullopt};
            try {
                p.value = measure_value(d, m, t, opts);
            } catch (const Error& err) {
                p.error = err.what();
            }
            it = cache.emplace(t, std::move(p)).first;
        }
        out.push_back(it->second);
    }
    return out;
}

struct MagSpreadCorrelation {
    double pearson_r2 = 0.0;
    double max_ratio = 0.0;
};

/// Squared Pearson correlation of (magnitude, spread) pairs and the largest mag/spread ratio.
inline MagSpreadCorrelation mag_spread_correlation(std::span<const std::pair<double, double>> values) {
    if (values.size() < 3) {
        throw Error(ErrorCode::InsufficientData, "need at least 3 (magnitude, spread) pairs");
    }
    double mean_m = 0.0, mean_s = 0.0, max_ratio = 0.0;
    for (const auto& [m, s] : values) {
        if (!(m > 0.0) || !(s > 0.0)) {
            throw Error(ErrorCode::InsufficientData, "values must be positive");
        }
        mean_m += m;
        mean_s += s;
        max_ratio = std::max(max_ratio, m / s);
    }
    mean_m /= static_cast<double>(values.size());
    mean_s /= static_cast<double>(values.size());
    double cov = 0.0, var_m = 0.0, var_s = 0.0;
    for (const auto& [m, s] : values) {
        cov += (m - mean_m) * (s - mean_s);
        var_m += (m - mean_m) * (m - mean_m);
        var_s += (s - mean_s) * (s - mean_s);
    }
    if (var_m == 0.0 || var_s == 0.0) {
        throw Error(ErrorCode::InsufficientData, "zero variance, correlation undefined");
    }
    return {cov * cov / (var_m * var_s), max_ratio};
}

}  // namespace magpool
