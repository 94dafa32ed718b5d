#pragma once

#include "courtfda/grid.hpp"
#include "courtfda/matrix.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace courtfda::fda {

/// <f, g>_H: sum over the two components of the trapezoid L2 inner products
/// on the unit square.
double inner_product(const FieldView& f, const FieldView& g, const QuadratureWeights& w);

double h_norm(const FieldView& f, const QuadratureWeights& w);

/// ||f - g||_H
double h_distance(const FieldView& f, const FieldView& g, const QuadratureWeights& w);

/// Pointwise average per component. Throws FdaError on an empty list or
/// mismatched grids.
BivariateField mean_function(std::span<const FieldView> samples);

/// G[i][j] = <X_i - mu, X_j - mu>_H. Upper triangle computed, then mirrored,
/// so the result is exactly symmetric. Rows are filled in parallel.
Matrix gram_matrix(std::span<const FieldView> samples, const BivariateField& mean,
                   const QuadratureWeights& w, std::size_t threads = 1);

struct SpectralDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column k pairs with values[k]
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Values within -1e-10 (scaled by max(1, |largest|)) of zero are clamped to 0.
/// Throws FdaError when the input is not symmetric within 1e-12.
SpectralDecomposition eigendecompose(const Matrix& g);

struct ComponentCount {
    std::size_t count = 4;
};

struct VarianceThreshold {
    double fraction = 0.90;
};

using ComponentSelection = std::variant<ComponentCount, VarianceThreshold>;

struct EigenPair {
    double eigenvalue = 0.0;
    BivariateField eigenfunction;
};

struct MfpcaModel {
    GridSpec grid;
    QuadratureWeights weights;
    BivariateField mean;
    std::vector<EigenPair> pairs;          // eigenvalue descending
    std::size_t n_samples = 0;
    std::vector<double> variance_ratios;   // lambda_k / sum of the full spectrum
    double total_variance = 0.0;           // sum of the full spectrum
    std::size_t numerical_rank = 0;
    ScoreMatrix training_scores;           // sqrt(l_k) u_ik, N x K

    std::size_t components() const noexcept { return pairs.size(); }
    std::vector<double> eigenvalues() const;
};

/// Gram-matrix MFPCA.
///
/// With l_k, u_k the eigenpairs of the Gram matrix, the covariance operator
/// has eigenvalues lambda_k = l_k / (N - 1) and eigenfunctions
/// phi_k = l_k^(-1/2) sum_i u_ik (X_i - mu). Components with
/// l_k <= 1e-12 l_1 are never retained. Each phi_k is signed so that its
/// largest-magnitude grid value (missed scanned before made, lowest index on
/// ties) is positive; the training scores follow the same flip.
MfpcaModel fit_mfpca(std::span<const FieldView> samples, ComponentSelection selection,
                     std::size_t threads = 1);

/// c_k = <X - mu, phi_k>_H for every retained component.
std::vector<double> project_scores(const FieldView& sample, const MfpcaModel& model);

ScoreMatrix project_all(std::span<const FieldView> samples, const MfpcaModel& model);

/// mu + sum_k c_k phi_k using the first scores.size() components.
BivariateField reconstruct(std::span<const double> scores, const MfpcaModel& model);

}  // namespace courtfda::fda
