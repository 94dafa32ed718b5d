#pragma once

#include "courtfda/matrix.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace courtfda::metrics {

/// Category assignment of N items. Labels must cover 0..m-1.
struct Partition {
    std::vector<std::size_t> labels;
    std::vector<std::string> label_names;  // optional, one per category

    std::size_t categories() const;  // m
    void validate() const;
};

/// Entry (i, j) counts items with a = i and b = j.
std::vector<std::vector<std::size_t>> confusion_matrix(const Partition& a, const Partition& b);

/// Hubert-Arabie adjusted Rand index. When the expected-index denominator is
/// zero, returns 1 if the partitions are the same set partition, else 0.
double adjusted_rand_index(const Partition& a, const Partition& b);

/// True when a and b group items identically, whatever the label names.
bool same_grouping(const Partition& a, const Partition& b);

struct SilhouetteResult {
    std::vector<double> values;         // s(i)
    double mean = 0.0;                  // unweighted mean of s(i)
    std::vector<double> cluster_means;  // per label
};

/// s(i) = (b - a) / max(a, b); members of singleton clusters get 0.
/// Throws MetricsError when the partition has a single cluster.
SilhouetteResult silhouette(const Matrix& distances, const Partition& labels);

}  // namespace courtfda::metrics
