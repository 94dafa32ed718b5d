#pragma once

#include "courtfda/grid.hpp"
#include "courtfda/ingest.hpp"

#include <span>
#include <string>
#include <vector>

namespace courtfda::density {

using ingest::Point;

struct Bandwidth {
    double hx = 0.0;
    double hy = 0.0;
};

/// One player's bivariate observation: X = (missed density, made density).
struct FunctionalSample {
    std::string player_id;
    DensityField missed;
    DensityField made;

    FieldView view() const { return {missed.grid, missed.values, made.values}; }
};

/// Per-axis rule of thumb for a 2D Gaussian product kernel:
///   h_j = sd_j * (4 / ((d + 2) n))^(1 / (d + 4)),  d = 2,
/// i.e. sd_j * n^(-1/6), with sd_j the n-1 sample standard deviation.
/// Throws DensityError for fewer than 2 points or a zero-variance axis.
Bandwidth silverman_bandwidth(std::span<const Point> points);

/// Raw kernel sum (1/(n hx hy)) sum_i G((t1-x_i)/hx) G((t2-y_i)/hy) at every
/// node, no renormalization.
DensityField kde_unnormalized(std::span<const Point> points, Bandwidth bw, const GridSpec& grid);

/// kde_unnormalized rescaled so its trapezoid integral over the grid is 1.
/// Mass that leaks outside the unit square is redistributed this way.
DensityField kde(std::span<const Point> points, Bandwidth bw, const GridSpec& grid);

/// Bandwidths are chosen separately for the missed and made components.
FunctionalSample build_sample(const ingest::PlayerRecord& record, const GridSpec& grid);

/// build_sample over all records; result order matches the input.
std::vector<FunctionalSample> build_samples(const std::vector<ingest::PlayerRecord>& records,
                                            const GridSpec& grid, std::size_t threads = 1);

std::vector<FieldView> views(std::span<const FunctionalSample> samples);

}  // namespace courtfda::density
