#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace courtfda {

/// Uniform lattice over the unit square, both endpoints included.
///
/// Node (i, j) sits at (i/(nx-1), j/(ny-1)). Grid values are stored row-major
/// with y as the row: flat index = j * nx + i.
struct GridSpec {
    std::size_t nx = 201;
    std::size_t ny = 201;

    static GridSpec square(std::size_t n) { return {n, n}; }

    void validate() const;
    std::size_t node_count() const noexcept { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
    double x(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(nx - 1); }
    double y(std::size_t j) const noexcept { return static_cast<double>(j) / static_cast<double>(ny - 1); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Product trapezoid rule on the unit square.
struct QuadratureWeights {
    std::vector<double> wx;
    std::vector<double> wy;

    static QuadratureWeights trapezoid(const GridSpec& grid);

    double at(std::size_t i, std::size_t j) const noexcept { return wx[i] * wy[j]; }

    /// w(i,j) flattened in grid order.
    std::vector<double> node_weights() const;

    friend bool operator==(const QuadratureWeights&, const QuadratureWeights&) = default;
};

/// Trapezoid integral of one grid function.
double integrate(std::span<const double> values, const GridSpec& grid);

/// One scalar field on the grid; for densities, probability per unit area.
struct DensityField {
    GridSpec grid;
    std::vector<double> values;

    double integral() const { return integrate(values, grid); }
};

/// Non-owning view of a two-component grid function (missed, made).
struct FieldView {
    GridSpec grid;
    std::span<const double> missed;
    std::span<const double> made;
};

/// Owning two-component grid function. Used for means, eigenfunctions and
/// reconstructions.
struct BivariateField {
    GridSpec grid;
    std::vector<double> missed;
    std::vector<double> made;

    static BivariateField zeros(const GridSpec& grid) {
        return {grid, std::vector<double>(grid.node_count(), 0.0),
                std::vector<double>(grid.node_count(), 0.0)};
    }

    FieldView view() const { return {grid, missed, made}; }

    friend bool operator==(const BivariateField&, const BivariateField&) = default;
};

}  // namespace courtfda
