#include "courtfda/grid.hpp"

#include "courtfda/error.hpp"

#include <string>

namespace courtfda {

namespace {

std::vector<double> trapezoid_1d(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> w(n, h);
    w.front() = h / 2.0;
    w.back() = h / 2.0;
    return w;
}

}  // namespace

void GridSpec::validate() const {
    if (nx < 2 || ny < 2) {
        throw Error("grid needs at least 2 nodes per axis, got " + std::to_string(nx) + "x" +
                    std::to_string(ny));
    }
}

QuadratureWeights QuadratureWeights::trapezoid(const GridSpec& grid) {
    grid.validate();
    return {trapezoid_1d(grid.nx), trapezoid_1d(grid.ny)};
}

std::vector<double> QuadratureWeights::node_weights() const {
    std::vector<double> w(wx.size() * wy.size());
    for (std::size_t j = 0; j < wy.size(); ++j) {
        for (std::size_t i = 0; i < wx.size(); ++i) w[j * wx.size() + i] = wx[i] * wy[j];
    }
    return w;
}

double integrate(std::span<const double> values, const GridSpec& grid) {
    if (values.size() != grid.node_count()) throw Error("field size does not match grid");
    const auto q = QuadratureWeights::trapezoid(grid);
    double total = 0.0;
    for (std::size_t j = 0; j < grid.ny; ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < grid.nx; ++i) row += q.wx[i] * values[grid.index(i, j)];
        total += q.wy[j] * row;
    }
    return total;
}

}  // namespace courtfda
