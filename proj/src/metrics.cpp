#include "courtfda/metrics.hpp"

#include "courtfda/error.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

namespace courtfda::metrics {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

void check_lengths(const Partition& a, const Partition& b) {
    if (a.labels.size() != b.labels.size()) {
        throw MetricsError("partitions have different lengths (" + std::to_string(a.labels.size()) +
                           " vs " + std::to_string(b.labels.size()) + ")");
    }
}

}  // namespace

std::size_t Partition::categories() const {
    if (labels.empty()) return 0;
    return *std::max_element(labels.begin(), labels.end()) + 1;
}

void Partition::validate() const {
    const std::size_t m = categories();
    std::vector<bool> seen(m, false);
    for (auto l : labels) seen[l] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw MetricsError("partition labels do not cover 0.." + std::to_string(m - 1));
    }
    if (!label_names.empty() && label_names.size() < m) {
        throw MetricsError("fewer label names than categories");
    }
}

std::vector<std::vector<std::size_t>> confusion_matrix(const Partition& a, const Partition& b) {
    check_lengths(a, b);
    std::vector<std::vector<std::size_t>> table(a.categories(),
                                                std::vector<std::size_t>(b.categories(), 0));
    for (std::size_t n = 0; n < a.labels.size(); ++n) ++table[a.labels[n]][b.labels[n]];
    return table;
}

bool same_grouping(const Partition& a, const Partition& b) {
    check_lengths(a, b);
    std::map<std::size_t, std::size_t> forward;
    std::map<std::size_t, std::size_t> backward;
    for (std::size_t n = 0; n < a.labels.size(); ++n) {
        const auto [f, f_new] = forward.emplace(a.labels[n], b.labels[n]);
        const auto [r, r_new] = backward.emplace(b.labels[n], a.labels[n]);
        if (f->second != b.labels[n] || r->second != a.labels[n]) return false;
    }
    return true;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
    check_lengths(a, b);
    const std::size_t n = a.labels.size();
    if (n < 2) throw MetricsError("adjusted Rand index needs at least 2 items");

    const auto table = confusion_matrix(a, b);
    std::vector<double> rows(table.size(), 0.0);
    std::vector<double> cols(table.empty() ? 0 : table.front().size(), 0.0);
    double sum_cells = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            const double c = static_cast<double>(table[i][j]);
            sum_cells += choose2(c);
            rows[i] += c;
            cols[j] += c;
        }
    }
    double sum_rows = 0.0;
    double sum_cols = 0.0;
    for (double r : rows) sum_rows += choose2(r);
    for (double c : cols) sum_cols += choose2(c);

    const double expected = sum_rows * sum_cols / choose2(static_cast<double>(n));
    const double denominator = 0.5 * (sum_rows + sum_cols) - expected;
    if (denominator == 0.0) return same_grouping(a, b) ? 1.0 : 0.0;
    return (sum_cells - expected) / denominator;
}

SilhouetteResult silhouette(const Matrix& distances, const Partition& labels) {
    const std::size_t n = labels.labels.size();
    if (distances.rows() != n || distances.cols() != n) {
        throw MetricsError("distance matrix does not match the partition size");
    }
    const std::size_t m = labels.categories();
    if (m < 2) throw MetricsError("silhouette needs at least 2 clusters");

    std::vector<std::size_t> sizes(m, 0);
    for (auto l : labels.labels) ++sizes[l];

    SilhouetteResult out;
    out.values.assign(n, 0.0);
    std::vector<double> sums(m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels.labels[i];
        if (sizes[own] < 2) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[labels.labels[j]] += distances(i, j);
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        }
        const double scale = std::max(a, b);
        out.values[i] = scale > 0.0 ? (b - a) / scale : 0.0;
    }

    double total = 0.0;
    out.cluster_means.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        total += out.values[i];
        out.cluster_means[labels.labels[i]] += out.values[i];
    }
    out.mean = n > 0 ? total / static_cast<double>(n) : 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        if (sizes[c] > 0) out.cluster_means[c] /= static_cast<double>(sizes[c]);
    }
    return out;
}

}  // namespace courtfda::metrics
