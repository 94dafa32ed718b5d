#pragma once

#include "courtfda/matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace courtfda::cluster {

enum class WeightScheme { Equal, VarianceProportion };

std::string_view to_string(WeightScheme scheme);  // "equal" | "variance"
std::optional<WeightScheme> parse_weight_scheme(std::string_view text);

/// Equal -> 1/K each. VarianceProportion -> lambda_k / sum_{j<=K} lambda_j.
std::vector<double> resolve_weights(WeightScheme scheme, std::size_t components,
                                    std::span<const double> eigenvalues = {});

/// Column-wise (c - mean) / sd with the N-1 denominator. Throws ClusterError
/// naming the component when a column has zero variance.
ScoreMatrix standardize_scores(const ScoreMatrix& scores);

using DistanceMatrix = Matrix;

/// d(i,j) = sqrt(sum_k w_k (c_ik - c_jk)^2), each unordered pair computed once.
DistanceMatrix weighted_distances(const ScoreMatrix& scores, std::span<const double> weights);

DistanceMatrix distance_matrix(const ScoreMatrix& scores, WeightScheme scheme,
                               std::span<const double> eigenvalues = {});

struct Clustering {
    std::vector<std::size_t> labels;   // 0..k-1, cluster c has medoid medoids[c]
    std::vector<std::size_t> medoids;  // ascending sample indices
    double total_cost = 0.0;
    std::size_t swaps = 0;
};

/// Partitioning around medoids, BUILD then SWAP.
///
/// Fully deterministic: ties go to the lowest candidate index, points
/// equidistant to several medoids join the lowest-indexed one. The seed is
/// accepted for interface stability only and does not affect the result.
Clustering kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed = 0);

/// Sum over points of the distance to the nearest medoid.
double medoid_cost(const DistanceMatrix& d, std::span<const std::size_t> medoids);

}  // namespace courtfda::cluster
