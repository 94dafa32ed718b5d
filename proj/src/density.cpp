#include "courtfda/density.hpp"

#include "courtfda/error.hpp"
#include "courtfda/parallel.hpp"

#include <cmath>
#include <utility>
#include <numbers>
#include <string>

namespace courtfda::density {

namespace {

double sample_sd(std::span<const Point> points, double Point::*axis) {
    const double n = static_cast<double>(points.size());
    double mean = 0.0;
    for (const auto& p : points) mean += p.*axis;
    mean /= n;
    double ss = 0.0;
    for (const auto& p : points) {
        const double d = p.*axis - mean;
        ss += d * d;
    }
    return std::sqrt(ss / (n - 1.0));
}

// nodes x points table of standard normal kernel values along one axis.
std::vector<double> kernel_table(std::size_t nodes, std::span<const Point> points,
                                 double Point::*axis, double h) {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const std::size_t n = points.size();
    std::vector<double> table(nodes * n);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
        for (std::size_t p = 0; p < n; ++p) {
            const double u = (t - points[p].*axis) / h;
            table[k * n + p] = norm * std::exp(-0.5 * u * u);
        }
    }
    return table;
}

DensityField component(std::span<const Point> points, const GridSpec& grid,
                       const std::string& player_id, const char* name) {
    try {
        return kde(points, silverman_bandwidth(points), grid);
    } catch (const DensityError& e) {
        throw DensityError("player '" + player_id + "', " + name + " component: " + e.what());
    }
}

}  // namespace

Bandwidth silverman_bandwidth(std::span<const Point> points) {
    if (points.size() < 2) {
        throw DensityError("degenerate bandwidth: need at least 2 points, got " +
                           std::to_string(points.size()));
    }
    const double factor = std::pow(4.0 / (4.0 * static_cast<double>(points.size())), 1.0 / 6.0);
    const double sx = sample_sd(points, &Point::x);
    const double sy = sample_sd(points, &Point::y);
    if (!(sx > 0.0) || !(sy > 0.0)) {
        throw DensityError(std::string("degenerate bandwidth: zero variance along ") +
                           (sx > 0.0 ? "y" : "x"));
    }
    return {sx * factor, sy * factor};
}

DensityField kde_unnormalized(std::span<const Point> points, Bandwidth bw, const GridSpec& grid) {
    grid.validate();
    if (!(bw.hx > 0.0) || !(bw.hy > 0.0)) throw DensityError("bandwidths must be positive");
    if (points.empty()) throw DensityError("kde needs at least one point");

    const std::size_t n = points.size();
    const auto kx = kernel_table(grid.nx, points, &Point::x, bw.hx);
    const auto ky = kernel_table(grid.ny, points, &Point::y, bw.hy);
    const double scale = 1.0 / (static_cast<double>(n) * bw.hx * bw.hy);

    DensityField field{grid, std::vector<double>(grid.node_count())};
    for (std::size_t j = 0; j < grid.ny; ++j) {
        const double* row_y = ky.data() + j * n;
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double* row_x = kx.data() + i * n;
            double sum = 0.0;
            for (std::size_t p = 0; p < n; ++p) sum += row_x[p] * row_y[p];
            field.values[grid.index(i, j)] = sum * scale;
        }
    }
    return field;
}

DensityField kde(std::span<const Point> points, Bandwidth bw, const GridSpec& grid) {
    auto field = kde_unnormalized(points, bw, grid);
    const double mass = field.integral();
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw DensityError("kernel estimate has no mass on the grid");
    }
    for (auto& v : field.values) v /= mass;
    return field;
}

FunctionalSample build_sample(const ingest::PlayerRecord& record, const GridSpec& grid) {
    // Named locals: a throw inside a braced initializer would leak the
    // already-built member under GCC 11.
    auto missed = component(record.missed_points, grid, record.player_id, "missed");
    auto made = component(record.made_points, grid, record.player_id, "made");
    return {record.player_id, std::move(missed), std::move(made)};
}

std::vector<FunctionalSample> build_samples(const std::vector<ingest::PlayerRecord>& records,
                                            const GridSpec& grid, std::size_t threads) {
    std::vector<FunctionalSample> out(records.size());
    parallel_for(records.size(), threads,
                 [&](std::size_t i) { out[i] = build_sample(records[i], grid); });
    return out;
}

std::vector<FieldView> views(std::span<const FunctionalSample> samples) {
    std::vector<FieldView> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.view());
    return out;
}

}  // namespace courtfda::density
