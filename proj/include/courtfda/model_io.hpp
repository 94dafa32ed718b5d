#pragma once

#include "courtfda/fda.hpp"

#include <iosfwd>
#include <string>

namespace courtfda::fda {

/// JSON document with grid, quadrature weights, mean, eigenvalues,
/// eigenfunctions (row-major, missed then made), variance ratios and the
/// training scores. Every double is written with 17 significant digits, so
/// read_model(write_model(m)) reproduces m bit for bit.
void write_model(std::ostream& out, const MfpcaModel& model);
MfpcaModel read_model(std::istream& in);

void save_model(const std::string& path, const MfpcaModel& model);
MfpcaModel load_model(const std::string& path);

}  // namespace courtfda::fda
