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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "magpool/diversity.hpp"
#include "magpool/generators.hpp"
#include "oracles.hpp"

namespace magpool {
namespace {

DistanceMatrix two_points(double delta) {
    Matrix m(2, 2);
    m << 0, delta, delta, 0;
    return {m};
}

TEST(Magnitude, TwoPointsMatchInverseOracle) {
    for (double delta : {0.1, 1.0, 3.0}) {
        const auto d = two_points(delta);
        const double want = oracle::magnitude_by_inverse(d.values);
        EXPECT_NEAR(magnitude_value(d), want, 1e-12);
        EXPECT_NEAR(spread_value(d), want, 1e-12);
    }
}

TEST(Magnitude, SingletonAndEmpty) {
    EXPECT_EQ(magnitude_value({Matrix::Zero(1, 1)}), 1.0);
    EXPECT_EQ(magnitude_value({Matrix(0, 0)}), 0.0);
    EXPECT_EQ(spread_value({Matrix::Zero(1, 1)}), 1.0);
}

TEST(Magnitude, EdgelessGraphCountsPoints) {
    const auto v = magnitude(Graph(5));
    EXPECT_EQ(*v.magnitude, 5.0);
    EXPECT_EQ(v.spread, 5.0);
    EXPECT_EQ(v.per_component.size(), 5u);
}

// Property: Cholesky weighting agrees with an explicit inverse on small graphs.
TEST(Magnitude, AgreesWithExplicitInverse) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        const Graph g = oracle::random_connected_graph(rng, 2 + rng() % 11, 0.3);
        const Matrix d = oracle::diffusion_distances_via_square(g);
        for (double t : {0.5, 1.0, 2.0}) {
            EXPECT_NEAR(magnitude_value(diffusion_distances(g), t),
                        oracle::magnitude_by_inverse(d, t), 1e-8);
            EXPECT_NEAR(spread_value(diffusion_distances(g), t), oracle::spread_direct(d, t), 1e-10);
        }
    }
}

TEST(Magnitude, WeightingResidualIsSmall) {
    const auto w = weighting(similarity_matrix(diffusion_distances(ring_graph(10))));
    EXPECT_LE(w.residual, 1e-8);
    EXPECT_FALSE(w.jittered);
}

TEST(Magnitude, RankDeficientSimilarityNeedsJitter) {
    // Three coincident points behave like one.
    const auto w = weighting({Matrix::Ones(3, 3), 1.0});
    EXPECT_TRUE(w.jittered);
    EXPECT_NEAR(w.magnitude(), 1.0, 1e-8);
}

TEST(Magnitude, IndefiniteSimilarityIsIllConditioned) {
    Matrix z(2, 2);
    z << 1, 2, 2, 1;
    try {
        weighting({z, 1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IllConditioned);
        EXPECT_TRUE(is_numerical(e.code()));
    }
}

// Property: both measures add over disjoint unions.
TEST(Diversity, AdditiveOverComponents) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph a = oracle::random_connected_graph(rng, 1 + rng() % 10, 0.3);
        const Graph b = oracle::random_connected_graph(rng, 1 + rng() % 10, 0.3);
        const auto u = magnitude(disjoint_union(a, b));
        EXPECT_NEAR(*u.magnitude, *magnitude(a).magnitude + *magnitude(b).magnitude, 1e-9);
        EXPECT_NEAR(u.spread, magnitude(a).spread + magnitude(b).spread, 1e-9);
    }
}

// Property: spread never exceeds magnitude.
TEST(Diversity, SpreadBoundedByMagnitude) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = oracle::random_graph(rng, 2 + rng() % 20, 0.3);
        const auto v = magnitude(g);
        EXPECT_LE(v.spread, *v.magnitude + 1e-8);
    }
}

TEST(Diversity, CyclesAreHomogeneous) {
    for (Index n : {3, 6, 9, 16}) {
        const auto v = magnitude(ring_graph(n));
        EXPECT_NEAR(*v.magnitude, v.spread, 1e-9) << n;
    }
}

TEST(Diversity, SpreadOnlyLeavesMagnitudeEmpty) {
    const auto v = spread(diffusion_distances(path_graph(4)));
    EXPECT_FALSE(v.magnitude.has_value());
    EXPECT_GT(v.spread, 1.0);
}

TEST(Profile, LimitsAtSmallAndLargeScale) {
    const auto d = diffusion_distances(path_graph(5));
    const std::vector<double> scales{1e-3, 1.0, 1e3};
    for (Measure m : {Measure::Magnitude, Measure::Spread}) {
        const auto p = diversity_profile(d, scales, m);
        ASSERT_EQ(p.size(), 3u);
        EXPECT_NEAR(*p[0].value, 1.0, 0.05);
        EXPECT_NEAR(*p[2].value, 5.0, 1e-9);
        EXPECT_LT(*p[0].value, *p[1].value);
    }
}

TEST(Profile, RejectsUnsortedGrid) {
    const auto d = diffusion_distances(path_graph(3));
    const std::vector<double> bad{1.0, 0.5};
    EXPECT_THROW(diversity_profile(d, bad, Measure::Spread), Error);
}

TEST(Correlation, PerfectlyLinearPairs) {
    const std::vector<std::pair<double, double>> v{{1, 2}, {2, 4}, {3, 6}};
    const auto c = mag_spread_correlation(v);
    EXPECT_NEAR(c.pearson_r2, 1.0, 1e-15);
    EXPECT_NEAR(c.max_ratio, 0.5, 1e-15);
}

TEST(Correlation, InsufficientData) {
    const std::vector<std::pair<double, double>> two{{1, 1}, {2, 2}};
    const std::vector<std::pair<double, double>> flat{{1, 1}, {1, 2}, {1, 3}};
    EXPECT_THROW(mag_spread_correlation(two), Error);
    EXPECT_THROW(mag_spread_correlation(flat), Error);
}

}  // namespace
}  // namespace magpool
