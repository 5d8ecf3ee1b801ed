#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "otcell/partition.hpp"
#include "otcell/scenario.hpp"

namespace otcell {

/// Spatial user density discretized on a regular grid; cell masses sum to 1.
struct DensityGrid {
    Area area;
    int nx = 0;
    int ny = 0;
    std::vector<double> mass;  // row-major (iy * nx + ix)

    double dx() const { return area.width() / nx; }
    double dy() const { return area.height() / ny; }
    double cell_x(int ix) const { return area.x_min + (ix + 0.5) * dx(); }
    double cell_y(int iy) const { return area.y_min + (iy + 0.5) * dy(); }
    std::size_t size() const { return mass.size(); }
};

/// One atom of a discrete measure: a location with its probability mass.
struct SupportPoint {
    double x = 0.0;
    double y = 0.0;
    double mass = 0.0;
};

inline double total_mass(const DensityGrid& g) {
    long double s = 0.0L;
    for (double m : g.mass) s += m;
    return static_cast<double>(s);
}

namespace detail {

inline void normalize_mass(std::vector<double>& mass) {
    long double s = 0.0L;
    for (double m : mass) {
        if (!(m >= 0.0)) throw std::invalid_argument("density: negative weight");
        s += m;
    }
    if (!(s > 0.0L)) throw std::invalid_argument("density: total weight must be positive");
    for (double& m : mass) m = static_cast<double>(m / s);
}

}  // namespace detail

inline DensityGrid uniform_density(const Area& area, int nx, int ny) {
    validate_area(area);
    detail::require(nx >= 1 && ny >= 1, "density: nx and ny must be >= 1");
    DensityGrid g{area, nx, ny, {}};
    g.mass.assign(static_cast<std::size_t>(nx) * ny,
                  1.0 / (static_cast<double>(nx) * static_cast<double>(ny)));
    detail::normalize_mass(g.mass);
    return g;
}

/// Isotropic Gaussian evaluated at cell centers (midpoint rule) and
/// renormalized over the area.
inline DensityGrid truncated_gaussian_density(const Area& area, double center_x, double center_y,
                                              double sigma, int nx, int ny) {
    validate_area(area);
    detail::require(nx >= 1 && ny >= 1, "density: nx and ny must be >= 1");
    detail::require(sigma > 0.0, "density: sigma must be positive");
    DensityGrid g{area, nx, ny, {}};
    g.mass.resize(static_cast<std::size_t>(nx) * ny);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double max_exp = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < ny; ++iy) {
        const double dy = g.cell_y(iy) - center_y;
        for (int ix = 0; ix < nx; ++ix) {
            const double dx = g.cell_x(ix) - center_x;
            const double e = -(dx * dx + dy * dy) * inv;
            g.mass[static_cast<std::size_t>(iy) * nx + ix] = e;
            max_exp = std::max(max_exp, e);
        }
    }
    // shift exponents so the peak is exp(0); keeps far-off-center grids finite
    for (double& m : g.mass) m = std::exp(m - max_exp);
    detail::normalize_mass(g.mass);
    return g;
}

/// Flatten the grid to its weighted cell centers.
inline std::vector<SupportPoint> support_points(const DensityGrid& g) {
    std::vector<SupportPoint> pts;
    pts.reserve(g.size());
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            pts.push_back({g.cell_x(ix), g.cell_y(iy), g.mass[static_cast<std::size_t>(iy) * g.nx + ix]});
    return pts;
}

/// Mass captured by one node under a partition.
inline double partition_mass(const DensityGrid& grid, const Partition& part, int node_id) {
    if (part.nx != grid.nx || part.ny != grid.ny || part.labels.size() != grid.size())
        throw std::invalid_argument("partition_mass: partition does not match the grid");
    if (std::find(part.node_ids.begin(), part.node_ids.end(), node_id) == part.node_ids.end())
        throw std::invalid_argument("partition_mass: unknown node id " + std::to_string(node_id));
    long double s = 0.0L;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (part.labels[i] == node_id) s += grid.mass[i];
    return static_cast<double>(s);
}

/// Plain-text grid import. First line: "nx ny x_min x_max y_min y_max";
/// then ny rows of nx non-negative weights, renormalized on load.
inline DensityGrid load_density_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open density grid " + path.string());
    DensityGrid g;
    if (!(in >> g.nx >> g.ny >> g.area.x_min >> g.area.x_max >> g.area.y_min >> g.area.y_max))
        throw std::runtime_error("density grid " + path.string() + ": malformed header");
    validate_area(g.area);
    if (g.nx < 1 || g.ny < 1)
        throw std::runtime_error("density grid " + path.string() + ": nx and ny must be >= 1");
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    g.mass.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> g.mass[i]))
            throw std::runtime_error("density grid " + path.string() + ": expected " +
                                     std::to_string(n) + " weights");
    detail::normalize_mass(g.mass);
    return g;
}

inline void save_density_grid(const DensityGrid& g, const std::filesystem::path& path) {
    std::string out = std::to_string(g.nx) + " " + std::to_string(g.ny) + " " +
                      detail::format_double(g.area.x_min) + " " + detail::format_double(g.area.x_max) +
                      " " + detail::format_double(g.area.y_min) + " " +
                      detail::format_double(g.area.y_max) + "\n";
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (ix) out += ' ';
            out += detail::format_double(g.mass[static_cast<std::size_t>(iy) * g.nx + ix]);
        }
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

}  // namespace otcell
