#include "courtfda/heatmap.hpp"

#include "courtfda/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace courtfda::heatmap {

namespace {

std::ofstream open_for_write(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExportError("cannot write '" + path + "'");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<double> rescale(std::span<const double> values, Scaling scaling) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ExportError("cannot export a field with non-finite values");
    }
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) return out;
    if (scaling == Scaling::Symmetric) {
        double peak = 0.0;
        for (double v : values) peak = std::max(peak, std::abs(v));
        if (peak == 0.0) return out;
        for (std::size_t n = 0; n < values.size(); ++n) out[n] = values[n] / peak;
    } else {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double span = *hi - *lo;
        if (span == 0.0) return out;
        for (std::size_t n = 0; n < values.size(); ++n) out[n] = (values[n] - *lo) / span;
    }
    return out;
}

HeatmapExport make_heatmap(std::string tag, std::span<const double> values, const GridSpec& grid,
                           Scaling scaling) {
    if (values.size() != grid.node_count()) throw ExportError("field size does not match grid");
    return {std::move(tag), grid, scaling, rescale(values, scaling)};
}

int gray_level(double rescaled, Scaling scaling) {
    const double unit = scaling == Scaling::Symmetric ? (rescaled + 1.0) / 2.0 : rescaled;
    return static_cast<int>(std::clamp<long>(std::lround(unit * 255.0), 0, 255));
}

void write_grid_csv(std::ostream& out, std::span<const double> values, const GridSpec& grid) {
    out << "x,y,value\n";
    for (std::size_t j = 0; j < grid.ny; ++j) {
        const std::string y = format_double(grid.y(j));
        for (std::size_t i = 0; i < grid.nx; ++i) {
            out << format_double(grid.x(i)) << ',' << y << ','
                << format_double(values[grid.index(i, j)]) << '\n';
        }
    }
}

void write_pgm(std::ostream& out, const HeatmapExport& heatmap) {
    const auto& g = heatmap.grid;
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    std::string row(g.nx, '\0');
    for (std::size_t r = 0; r < g.ny; ++r) {
        const std::size_t j = g.ny - 1 - r;
        for (std::size_t i = 0; i < g.nx; ++i) {
            row[i] = static_cast<char>(gray_level(heatmap.values[g.index(i, j)], heatmap.scaling));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

std::vector<std::string> export_heatmap(std::span<const double> values, const GridSpec& grid,
                                        const std::string& stem, Scaling scaling) {
    const auto tag = std::filesystem::path(stem).filename().string();
    const auto heatmap = make_heatmap(tag, values, grid, scaling);
    const std::string csv = stem + ".csv";
    const std::string pgm = stem + ".pgm";
    {
        auto out = open_for_write(csv);
        write_grid_csv(out, heatmap.values, grid);
        if (!out) throw ExportError("failed writing '" + csv + "'");
    }
    {
        auto out = open_for_write(pgm);
        write_pgm(out, heatmap);
        if (!out) throw ExportError("failed writing '" + pgm + "'");
    }
    return {csv, pgm};
}

std::string dump_field_csv(std::span<const double> values, const GridSpec& grid,
                           const std::string& path) {
    if (values.size() != grid.node_count()) throw ExportError("field size does not match grid");
    auto out = open_for_write(path);
    write_grid_csv(out, values, grid);
    if (!out) throw ExportError("failed writing '" + path + "'");
    return path;
}

}  // namespace courtfda::heatmap
