#include "courtfda/cluster.hpp"

#include "courtfda/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace courtfda::cluster {

namespace {

constexpr double kSwapTolerance = 1e-12;
constexpr std::size_t kMaxSwaps = 300;

void check_square(const DistanceMatrix& d) {
    if (d.rows() != d.cols()) throw ClusterError("distance matrix must be square");
}

}  // namespace

std::string_view to_string(WeightScheme scheme) {
    return scheme == WeightScheme::Equal ? "equal" : "variance";
}

std::optional<WeightScheme> parse_weight_scheme(std::string_view text) {
    if (text == "equal") return WeightScheme::Equal;
    if (text == "variance") return WeightScheme::VarianceProportion;
    return std::nullopt;
}

std::vector<double> resolve_weights(WeightScheme scheme, std::size_t components,
                                    std::span<const double> eigenvalues) {
    if (components == 0) throw ClusterError("need at least one component");
    if (scheme == WeightScheme::Equal) {
        return std::vector<double>(components, 1.0 / static_cast<double>(components));
    }
    if (eigenvalues.size() < components) {
        throw ClusterError("variance weighting needs " + std::to_string(components) +
                           " eigenvalues, got " + std::to_string(eigenvalues.size()));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < components; ++k) {
        if (eigenvalues[k] < 0.0) throw ClusterError("negative weight from a negative eigenvalue");
        total += eigenvalues[k];
    }
    if (!(total > 0.0)) throw ClusterError("eigenvalues sum to zero");
    std::vector<double> w(components);
    for (std::size_t k = 0; k < components; ++k) w[k] = eigenvalues[k] / total;
    return w;
}

ScoreMatrix standardize_scores(const ScoreMatrix& scores) {
    const std::size_t n = scores.rows();
    if (n < 2) throw ClusterError("standardizing needs at least 2 rows");
    ScoreMatrix out(n, scores.cols());
    for (std::size_t k = 0; k < scores.cols(); ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += scores(i, k);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (scores(i, k) - mean) * (scores(i, k) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0)) {
            throw ClusterError("component " + std::to_string(k + 1) + " has zero variance");
        }
        for (std::size_t i = 0; i < n; ++i) out(i, k) = (scores(i, k) - mean) / sd;
    }
    return out;
}

DistanceMatrix weighted_distances(const ScoreMatrix& scores, std::span<const double> weights) {
    if (weights.size() != scores.cols()) {
        throw ClusterError("got " + std::to_string(weights.size()) + " weights for " +
                           std::to_string(scores.cols()) + " components");
    }
    for (double w : weights) {
        if (w < 0.0) throw ClusterError("negative distance weight");
    }
    const std::size_t n = scores.rows();
    DistanceMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < weights.size(); ++k) {
                const double diff = scores(i, k) - scores(j, k);
                s += weights[k] * diff * diff;
            }
            d(i, j) = d(j, i) = std::sqrt(s);
        }
    }
    return d;
}

DistanceMatrix distance_matrix(const ScoreMatrix& scores, WeightScheme scheme,
                               std::span<const double> eigenvalues) {
    return weighted_distances(scores, resolve_weights(scheme, scores.cols(), eigenvalues));
}

double medoid_cost(const DistanceMatrix& d, std::span<const std::size_t> medoids) {
    double cost = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m : medoids) best = std::min(best, d(i, m));
        cost += best;
    }
    return cost;
}

Clustering kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t /*seed*/) {
    check_square(d);
    const std::size_t n = d.rows();
    if (k == 0) throw ClusterError("cluster count must be at least 1");
    if (k > n) {
        throw ClusterError("cluster count " + std::to_string(k) + " exceeds " + std::to_string(n) +
                           " points");
    }

    std::vector<bool> is_medoid(n, false);
    std::vector<std::size_t> medoids;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    // BUILD: first the point with least total distance, then greedily the
    // point with the largest cost reduction.
    {
        std::size_t best = 0;
        double best_total = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n; ++c) {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) total += d(c, j);
            if (total < best_total) {
                best_total = total;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = true;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = d(best, j);
    }
    while (medoids.size() < k) {
        std::size_t best = n;
        double best_gain = -1.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (is_medoid[c]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < n; ++j) gain += std::max(nearest[j] - d(c, j), 0.0);
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = true;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(best, j));
    }

    // SWAP: apply the single best (medoid, non-medoid) exchange while it
    // strictly lowers the cost.
    double cost = medoid_cost(d, medoids);
    std::size_t swaps = 0;
    std::vector<std::size_t> trial = medoids;
    while (swaps < kMaxSwaps) {
        double best_cost = cost;
        std::size_t best_slot = k;
        std::size_t best_candidate = n;
        for (std::size_t h = 0; h < n; ++h) {
            if (is_medoid[h]) continue;
            for (std::size_t slot = 0; slot < k; ++slot) {
                trial = medoids;
                trial[slot] = h;
                const double c = medoid_cost(d, trial);
                if (c < best_cost) {
                    best_cost = c;
                    best_slot = slot;
                    best_candidate = h;
                }
            }
        }
        if (best_candidate == n || !(best_cost < cost - kSwapTolerance)) break;
        is_medoid[medoids[best_slot]] = false;
        is_medoid[best_candidate] = true;
        medoids[best_slot] = best_candidate;
        cost = best_cost;
        ++swaps;
    }

    std::sort(medoids.begin(), medoids.end());
    Clustering out;
    out.medoids = medoids;
    out.swaps = swaps;
    out.labels.assign(n, 0);
    out.total_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t label = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (medoids[c] == i) {
                label = c;
                best = 0.0;
                break;
            }
            if (d(i, medoids[c]) < best) {
                best = d(i, medoids[c]);
                label = c;
            }
        }
        out.labels[i] = label;
        out.total_cost += best;
    }
    return out;
}

}  // namespace courtfda::cluster
