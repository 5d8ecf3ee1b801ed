#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "otcell/association.hpp"
#include "otcell/channel.hpp"
#include "otcell/density.hpp"
#include "otcell/partition.hpp"
#include "otcell/scenario.hpp"

namespace otcell {

namespace detail {

// shared accumulation pass over an assignment; all sums are per node
struct DelayAccumulator {
    std::vector<long double> mass;
    std::vector<long double> weighted_kernel;  // sum of F * m over owned points
    std::vector<long double> weighted_snr;     // sum of SNR * m over owned points

    explicit DelayAccumulator(std::size_t nodes)
        : mass(nodes, 0.0L), weighted_kernel(nodes, 0.0L), weighted_snr(nodes, 0.0L) {}
};

inline DelayAccumulator accumulate_delay(const Scenario& sc, std::span<const SupportPoint> pts,
                                         const Partition& part) {
    if (part.labels.size() != pts.size())
        throw std::invalid_argument("metrics: partition does not match the point set");
    DelayAccumulator acc(sc.nodes.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const int id = part.labels[i];
        std::size_t l = sc.nodes.size();
        for (std::size_t k = 0; k < sc.nodes.size(); ++k) {
            if (sc.nodes[k].id == id) {
                l = k;
                break;
            }
        }
        if (l == sc.nodes.size())
            throw std::invalid_argument("metrics: label " + std::to_string(id) +
                                        " is not a scenario node id");
        const double m = pts[i].mass;
        if (m == 0.0) {
            acc.mass[l] += m;
            continue;
        }
        const double s = snr(sc, sc.nodes[l], pts[i].x, pts[i].y);
        acc.mass[l] += m;
        acc.weighted_kernel[l] += (sc.payload_bits / std::log2(1.0 + s)) * m;
        acc.weighted_snr[l] += s * m;
    }
    return acc;
}

}  // namespace detail

/// Average network delay of a partition, in seconds:
/// sum_l (N a_l / W_l) * sum_{cells of l} F(v, s_l) m(v).
inline double average_delay(const Scenario& sc, std::span<const SupportPoint> pts,
                            const Partition& part) {
    const detail::DelayAccumulator acc = detail::accumulate_delay(sc, pts, part);
    long double sum = 0.0L;
    for (std::size_t l = 0; l < sc.nodes.size(); ++l)
        sum += (static_cast<double>(sc.total_users) / sc.nodes[l].bandwidth) * acc.mass[l] *
               acc.weighted_kernel[l];
    return static_cast<double>(sum);
}

inline double average_delay(const Scenario& sc, const DensityGrid& grid, const Partition& part) {
    return average_delay(sc, support_points(grid), part);
}

struct NodeStats {
    int node_id = 0;
    double mass = 0.0;                // a_k
    double load = 0.0;                // N * a_k
    double delay_contribution = 0.0;  // this node's share of average_delay, s
    double mean_snr = 0.0;            // mass-weighted over owned cells; 0 if empty
};

inline std::vector<NodeStats> per_cell_stats(const Scenario& sc, std::span<const SupportPoint> pts,
                                             const Partition& part) {
    const detail::DelayAccumulator acc = detail::accumulate_delay(sc, pts, part);
    std::vector<NodeStats> stats(sc.nodes.size());
    for (std::size_t l = 0; l < sc.nodes.size(); ++l) {
        NodeStats& st = stats[l];
        st.node_id = sc.nodes[l].id;
        st.mass = static_cast<double>(acc.mass[l]);
        st.load = static_cast<double>(sc.total_users) * st.mass;
        st.delay_contribution = static_cast<double>(
            (static_cast<double>(sc.total_users) / sc.nodes[l].bandwidth) * acc.mass[l] *
            acc.weighted_kernel[l]);
        st.mean_snr =
            st.mass > 0.0 ? static_cast<double>(acc.weighted_snr[l] / acc.mass[l]) : 0.0;
    }
    return stats;
}

inline std::vector<NodeStats> per_cell_stats(const Scenario& sc, const DensityGrid& grid,
                                             const Partition& part) {
    return per_cell_stats(sc, support_points(grid), part);
}

struct SweepRow {
    double sigma = 0.0;
    double delay_snr = 0.0;
    double delay_ot = 0.0;
    double reduction_pct = 0.0;
    bool converged = false;
};

/// Hotspot-width sweep: for each sigma, evaluate both associations on a
/// truncated Gaussian centered at (center_x, center_y). Rows are independent
/// and may be computed on up to max_threads threads.
inline std::vector<SweepRow> sweep_sigma(const Scenario& sc, std::span<const double> sigmas,
                                         double center_x, double center_y, int nx, int ny,
                                         const SolverConfig& cfg = {}, int max_threads = 1) {
    validate_scenario(sc);
    validate_solver_config(cfg);
    detail::require(!sigmas.empty(), "sweep: at least one sigma required");
    for (double s : sigmas) detail::require(s > 0.0, "sweep: sigma must be positive");

    std::vector<SweepRow> rows(sigmas.size());
    const auto run_row = [&](std::size_t i) {
        const DensityGrid grid =
            truncated_gaussian_density(sc.area, center_x, center_y, sigmas[i], nx, ny);
        const Partition base = snr_association(sc, grid);
        const auto [opt, trace] = ot_association(sc, grid, cfg, base);
        SweepRow& row = rows[i];
        row.sigma = sigmas[i];
        row.delay_snr = average_delay(sc, grid, base);
        row.delay_ot = average_delay(sc, grid, opt);
        row.reduction_pct = 100.0 * (1.0 - row.delay_ot / row.delay_snr);
        row.converged = trace.converged;
    };

    const int threads = std::clamp(max_threads, 1, static_cast<int>(sigmas.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < sigmas.size(); ++i) run_row(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = static_cast<std::size_t>(w); i < sigmas.size();
                     i += static_cast<std::size_t>(threads))
                    run_row(i);
            });
        }
        for (std::thread& th : pool) th.join();
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "sigma_o,delay_snr_s,delay_ot_s,reduction_pct,converged\n";
    for (const SweepRow& r : rows) {
        out << detail::format_double(r.sigma) << ',' << detail::format_double(r.delay_snr) << ','
            << detail::format_double(r.delay_ot) << ',' << detail::format_double(r.reduction_pct)
            << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace otcell
