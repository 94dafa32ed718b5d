#include "covariance_oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<double> trapezoid_node_weights(const courtfda::GridSpec& grid) {
    auto axis = [](std::size_t n) {
        std::vector<double> w(n, 1.0 / static_cast<double>(n - 1));
        w.front() *= 0.5;
        w.back() *= 0.5;
        return w;
    };
    const auto wx = axis(grid.nx);
    const auto wy = axis(grid.ny);
    std::vector<double> out(grid.nx * grid.ny);
    for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i) out[j * grid.nx + i] = wx[i] * wy[j];
    return out;
}

double h_inner(const courtfda::FieldView& f, const courtfda::FieldView& g) {
    const auto w = trapezoid_node_weights(f.grid);
    long double s = 0.0L;
    for (std::size_t n = 0; n < w.size(); ++n) {
        s += static_cast<long double>(w[n]) * f.missed[n] * g.missed[n];
        s += static_cast<long double>(w[n]) * f.made[n] * g.made[n];
    }
    return static_cast<double>(s);
}

CovarianceSpectrum covariance_oracle(std::span<const courtfda::FieldView> samples) {
    if (samples.size() < 2) throw std::invalid_argument("oracle needs at least 2 samples");
    const auto grid = samples.front().grid;
    if (grid.nx > 21 || grid.ny > 21) throw std::invalid_argument("oracle refuses grids above 21x21");
    const std::size_t m = grid.nx * grid.ny;
    const std::size_t n = samples.size();
    const auto w = trapezoid_node_weights(grid);

    Eigen::MatrixXd x(2 * m, n);
    for (std::size_t s = 0; s < n; ++s) {
        if (!(samples[s].grid == grid)) throw std::invalid_argument("oracle grid mismatch");
        for (std::size_t k = 0; k < m; ++k) {
            x(k, s) = samples[s].missed[k];
            x(m + k, s) = samples[s].made[k];
        }
    }
    const Eigen::VectorXd mu = x.rowwise().mean();
    x.colwise() -= mu;

    Eigen::VectorXd sqrt_w(2 * m);
    for (std::size_t k = 0; k < m; ++k) sqrt_w(k) = sqrt_w(m + k) = std::sqrt(w[k]);

    const Eigen::MatrixXd y = sqrt_w.asDiagonal() * x;
    const Eigen::MatrixXd c = (y * y.transpose()) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success) throw std::runtime_error("oracle eigensolver failed");

    CovarianceSpectrum out;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index col = vals.size() - 1; col >= 0; --col) {
        out.values.push_back(vals(col));
        auto f = courtfda::BivariateField::zeros(grid);
        for (std::size_t k = 0; k < m; ++k) {
            f.missed[k] = vecs(static_cast<Eigen::Index>(k), col) / sqrt_w(static_cast<Eigen::Index>(k));
            f.made[k] = vecs(static_cast<Eigen::Index>(m + k), col) / sqrt_w(static_cast<Eigen::Index>(m + k));
        }
        out.functions.push_back(std::move(f));
    }
    return out;
}

}  // namespace oracle
