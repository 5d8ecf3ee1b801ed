#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace otcell {

/// A cell partition: one owning node id per grid cell, plus the probability
/// mass captured by each node. Point-set solves use the same type with
/// nx = number of points, ny = 1.
struct Partition {
    int nx = 0;
    int ny = 0;
    std::vector<int> labels;      // node id per cell, row-major (iy * nx + ix)
    std::vector<int> node_ids;    // scenario node order
    std::vector<double> masses;   // a_k, parallel to node_ids, sums to 1
};

namespace detail {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Label grid as plain text: "nx ny" header, then ny rows of nx node ids.
inline void save_partition_labels(const Partition& p, const std::filesystem::path& path) {
    std::string out;
    out.reserve(static_cast<std::size_t>(p.nx) * p.ny * 3 + 16);
    out += std::to_string(p.nx) + " " + std::to_string(p.ny) + "\n";
    for (int iy = 0; iy < p.ny; ++iy) {
        for (int ix = 0; ix < p.nx; ++ix) {
            if (ix) out += ' ';
            out += std::to_string(p.labels[static_cast<std::size_t>(iy) * p.nx + ix]);
        }
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

/// Per-node mass sidecar, CSV.
inline void save_partition_masses(const Partition& p, const std::filesystem::path& path) {
    std::string out = "node_id,mass\n";
    for (std::size_t k = 0; k < p.node_ids.size(); ++k)
        out += std::to_string(p.node_ids[k]) + "," + detail::format_double(p.masses[k]) + "\n";
    detail::write_file_atomic(path, out);
}

}  // namespace otcell
