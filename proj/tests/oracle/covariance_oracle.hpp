#pragma once

#include "courtfda/grid.hpp"

#include <span>
#include <vector>

namespace oracle {

struct CovarianceSpectrum {
    std::vector<double> values;                        // descending
    std::vector<courtfda::BivariateField> functions;   // H-orthonormal
};

/// Direct route: materializes the covariance of the stacked (missed, made)
/// vectors with denominator N-1, symmetrizes it with the square roots of the
/// trapezoid weights, eigendecomposes with Eigen and maps back with W^-1/2.
/// Refuses grids finer than 21x21.
CovarianceSpectrum covariance_oracle(std::span<const courtfda::FieldView> samples);

/// Trapezoid weights computed without the library.
std::vector<double> trapezoid_node_weights(const courtfda::GridSpec& grid);

/// <f, g>_H with trapezoid_node_weights.
double h_inner(const courtfda::FieldView& f, const courtfda::FieldView& g);

}  // namespace oracle
