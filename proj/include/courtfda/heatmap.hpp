#pragma once

#include "courtfda/grid.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace courtfda::heatmap {

enum class Scaling {
    Symmetric,  // divide by max |v| into [-1, 1]; sign structure preserved
    MinMax,     // (v - min) / (max - min) into [0, 1]; for per-player densities
};

struct HeatmapExport {
    std::string tag;  // e.g. "phi2_made"
    GridSpec grid;
    Scaling scaling = Scaling::Symmetric;
    std::vector<double> values;  // rescaled
};

/// Identically zero (Symmetric) or constant (MinMax) fields map to all zeros.
/// Throws ExportError on non-finite input.
std::vector<double> rescale(std::span<const double> values, Scaling scaling);

HeatmapExport make_heatmap(std::string tag, std::span<const double> values, const GridSpec& grid,
                           Scaling scaling);

/// 8-bit level of a rescaled value: round((v + 1) / 2 * 255) for Symmetric,
/// round(v * 255) for MinMax.
int gray_level(double rescaled, Scaling scaling);

/// `x,y,value` rows in grid order (x fastest), shortest round-trip decimals.
void write_grid_csv(std::ostream& out, std::span<const double> values, const GridSpec& grid);

/// Binary PGM (P5). Image row r shows grid row ny-1-r, so y = 0 is at the
/// bottom edge.
void write_pgm(std::ostream& out, const HeatmapExport& heatmap);

/// Writes `<stem>.csv` and `<stem>.pgm` from the rescaled field and returns
/// both paths. Throws ExportError when a file cannot be written.
std::vector<std::string> export_heatmap(std::span<const double> values, const GridSpec& grid,
                                        const std::string& stem,
                                        Scaling scaling = Scaling::Symmetric);

/// Raw (not rescaled) grid dump, `x,y,value`.
std::string dump_field_csv(std::span<const double> values, const GridSpec& grid,
                           const std::string& path);

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

}  // namespace courtfda::heatmap
