#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "otcell/channel.hpp"
#include "otcell/density.hpp"
#include "otcell/partition.hpp"
#include "otcell/scenario.hpp"

namespace otcell {

struct SolverConfig {
    double tol = 1e-6;          // L-inf mass-change threshold gating the fixed-point check
    int max_iter = 2000;
    double damping = 0.01;      // fraction of the new mass vector fed back into the rule;
                                // larger steps make the relabeling oscillate on hotspot densities
    double mass_floor = 1e-12;  // keeps empty nodes competitive without letting them dominate
};

inline void validate_solver_config(const SolverConfig& c) {
    detail::require(c.tol > 0.0, "solver: tol must be positive");
    detail::require(c.max_iter >= 1, "solver: max_iter must be >= 1");
    detail::require(c.damping > 0.0 && c.damping <= 1.0, "solver: damping must be in (0, 1]");
    detail::require(c.mass_floor >= 0.0 && c.mass_floor < 1.0,
                    "solver: mass_floor must be in [0, 1)");
}

/// Per-iteration diagnostics of the fixed-point solve.
struct SolveTrace {
    std::vector<double> objective;    // average delay after each relabel, s
    std::vector<double> mass_change;  // L-inf gap between rule masses and induced masses
    bool converged = false;
    int iterations = 0;
};

namespace detail {

// Per-node kernels precomputed over a fixed point set. Everything the
// association rule needs is load-independent, so this is built once per
// scenario/point-set pair and shared read-only.
struct KernelTable {
    std::size_t num_nodes = 0;
    std::size_t num_points = 0;
    std::vector<double> kernel;     // [node * num_points + p] = F(v_p, s_node)
    std::vector<double> snr_at;     // same layout
    std::vector<double> point_mass; // [p]
    std::vector<double> bandwidth;  // [node]
    std::vector<int> node_id;       // [node], scenario order
    std::vector<std::size_t> scan_order;  // node indices in ascending id order
    double users = 0.0;

    double f(std::size_t node, std::size_t p) const { return kernel[node * num_points + p]; }
};

inline KernelTable make_kernel_table(const Scenario& sc, std::span<const SupportPoint> pts) {
    validate_scenario(sc);
    if (pts.empty()) throw std::invalid_argument("association: empty point set");
    KernelTable t;
    t.num_nodes = sc.nodes.size();
    t.num_points = pts.size();
    t.kernel.resize(t.num_nodes * t.num_points);
    t.snr_at.resize(t.num_nodes * t.num_points);
    t.point_mass.resize(t.num_points);
    t.bandwidth.resize(t.num_nodes);
    t.node_id.resize(t.num_nodes);
    t.users = static_cast<double>(sc.total_users);
    for (std::size_t p = 0; p < t.num_points; ++p) t.point_mass[p] = pts[p].mass;
    for (std::size_t l = 0; l < t.num_nodes; ++l) {
        const NodeSpec& node = sc.nodes[l];
        t.bandwidth[l] = node.bandwidth;
        t.node_id[l] = node.id;
        double* snr_row = &t.snr_at[l * t.num_points];
        double* f_row = &t.kernel[l * t.num_points];
        for (std::size_t p = 0; p < t.num_points; ++p) {
            const double s = snr(sc, node, pts[p].x, pts[p].y);
            snr_row[p] = s;
            f_row[p] = sc.payload_bits / std::log2(1.0 + s);
        }
    }
    t.scan_order.resize(t.num_nodes);
    std::iota(t.scan_order.begin(), t.scan_order.end(), std::size_t{0});
    std::sort(t.scan_order.begin(), t.scan_order.end(),
              [&](std::size_t a, std::size_t b) { return t.node_id[a] < t.node_id[b]; });
    return t;
}

// masses induced by labels (node-index labels)
inline void accumulate_masses(const KernelTable& t, std::span<const int> labels,
                              std::span<double> out) {
    std::vector<long double> acc(t.num_nodes, 0.0L);
    for (std::size_t p = 0; p < t.num_points; ++p) acc[labels[p]] += t.point_mass[p];
    for (std::size_t l = 0; l < t.num_nodes; ++l) out[l] = static_cast<double>(acc[l]);
}

// one application of the weighted rule: argmin_l (a_l / W_l) F(v_p, s_l),
// ties to the lowest node id
inline void relabel(const KernelTable& t, std::span<const double> masses, std::span<int> out) {
    std::vector<double> weight(t.num_nodes);
    for (std::size_t l = 0; l < t.num_nodes; ++l) weight[l] = masses[l] / t.bandwidth[l];
    for (std::size_t p = 0; p < t.num_points; ++p) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_l = t.scan_order[0];
        for (std::size_t l : t.scan_order) {
            const double key = weight[l] * t.f(l, p);
            if (key < best) {
                best = key;
                best_l = l;
            }
        }
        out[p] = static_cast<int>(best_l);
    }
}

// max-SNR labels, ties to the lowest node id
inline std::vector<int> snr_labels(const KernelTable& t) {
    std::vector<int> labels(t.num_points);
    for (std::size_t p = 0; p < t.num_points; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_l = t.scan_order[0];
        for (std::size_t l : t.scan_order) {
            const double s = t.snr_at[l * t.num_points + p];
            if (s > best) {
                best = s;
                best_l = l;
            }
        }
        labels[p] = static_cast<int>(best_l);
    }
    return labels;
}

// average network delay of an assignment: sum_l (N a_l / W_l) sum_{p in D_l} F m_p
inline double objective(const KernelTable& t, std::span<const int> labels) {
    std::vector<long double> mass(t.num_nodes, 0.0L);
    std::vector<long double> weighted_kernel(t.num_nodes, 0.0L);
    for (std::size_t p = 0; p < t.num_points; ++p) {
        const std::size_t l = static_cast<std::size_t>(labels[p]);
        mass[l] += t.point_mass[p];
        weighted_kernel[l] += t.f(l, p) * t.point_mass[p];
    }
    long double sum = 0.0L;
    for (std::size_t l = 0; l < t.num_nodes; ++l)
        sum += (t.users / t.bandwidth[l]) * mass[l] * weighted_kernel[l];
    return static_cast<double>(sum);
}

struct SolveResult {
    std::vector<int> labels;     // node indices
    std::vector<double> masses;  // induced by labels, unfloored
    SolveTrace trace;
};

inline SolveResult solve_fixed_point(const KernelTable& t, const SolverConfig& cfg,
                                     std::vector<int> labels) {
    validate_solver_config(cfg);
    const std::size_t num_nodes = t.num_nodes;
    std::vector<double> rule_mass(num_nodes), induced(num_nodes), floored(num_nodes);
    const auto floor_into = [&](std::span<const double> src, std::span<double> dst) {
        for (std::size_t l = 0; l < num_nodes; ++l) dst[l] = std::max(src[l], cfg.mass_floor);
    };
    accumulate_masses(t, labels, rule_mass);
    floor_into(rule_mass, rule_mass);

    SolveResult res;
    res.trace.objective.reserve(16);
    std::vector<int> best_labels = labels;
    double best_obj = objective(t, labels);  // the init counts as an iterate
    std::vector<int> next(t.num_points), check(t.num_points);

    for (int it = 1; it <= cfg.max_iter; ++it) {
        relabel(t, rule_mass, next);
        accumulate_masses(t, next, induced);
        floor_into(induced, floored);
        double delta = 0.0;
        for (std::size_t l = 0; l < num_nodes; ++l)
            delta = std::max(delta, std::abs(floored[l] - rule_mass[l]));
        const double obj = objective(t, next);
        res.trace.objective.push_back(obj);
        res.trace.mass_change.push_back(delta);
        res.trace.iterations = it;
        labels.swap(next);
        if (obj < best_obj) {
            best_obj = obj;
            best_labels = labels;
        }
        if (delta < cfg.tol) {
            // candidate fixed point: the rule must reproduce the labels under
            // their own recomputed (floored) masses
            relabel(t, floored, check);
            if (check == labels) {
                res.trace.converged = true;
                break;
            }
        }
        for (std::size_t l = 0; l < num_nodes; ++l)
            rule_mass[l] = (1.0 - cfg.damping) * rule_mass[l] + cfg.damping * floored[l];
    }

    if (!res.trace.converged) labels = std::move(best_labels);
    res.masses.resize(num_nodes);
    accumulate_masses(t, labels, res.masses);
    res.labels = std::move(labels);
    return res;
}

inline Partition make_partition(const KernelTable& t, std::span<const int> index_labels,
                                std::span<const double> masses, int nx, int ny) {
    Partition p;
    p.nx = nx;
    p.ny = ny;
    p.labels.resize(t.num_points);
    for (std::size_t i = 0; i < t.num_points; ++i)
        p.labels[i] = t.node_id[static_cast<std::size_t>(index_labels[i])];
    p.node_ids.assign(t.node_id.begin(), t.node_id.end());
    p.masses.assign(masses.begin(), masses.end());
    return p;
}

// node-id labels -> node-index labels
inline std::vector<int> index_labels(const KernelTable& t, const Partition& p) {
    if (p.labels.size() != t.num_points)
        throw std::invalid_argument("association: partition does not match the point set");
    std::vector<int> idx(p.labels.size());
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        bool found = false;
        for (std::size_t l = 0; l < t.num_nodes; ++l) {
            if (t.node_id[l] == p.labels[i]) {
                idx[i] = static_cast<int>(l);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("association: label " + std::to_string(p.labels[i]) +
                                        " is not a scenario node id");
    }
    return idx;
}

}  // namespace detail

/// Baseline association: every point goes to the node with the strongest SNR.
inline Partition snr_association(const Scenario& sc, std::span<const SupportPoint> pts, int nx,
                                 int ny) {
    const detail::KernelTable t = detail::make_kernel_table(sc, pts);
    const std::vector<int> labels = detail::snr_labels(t);
    std::vector<double> masses(t.num_nodes);
    detail::accumulate_masses(t, labels, masses);
    return detail::make_partition(t, labels, masses, nx, ny);
}

inline Partition snr_association(const Scenario& sc, const DensityGrid& grid) {
    return snr_association(sc, support_points(grid), grid.nx, grid.ny);
}

inline Partition snr_association(const Scenario& sc, std::span<const SupportPoint> pts) {
    return snr_association(sc, pts, static_cast<int>(pts.size()), 1);
}

/// The weighted association rule at a single point: the id of the node
/// minimizing (a_l / W_l) F(v, s_l). `masses` is parallel to scenario.nodes
/// and is floored before use; ties go to the lowest node id.
inline int assignment_rule(const Scenario& sc, std::span<const double> masses, double x, double y,
                           double mass_floor = 1e-12) {
    validate_scenario(sc);
    detail::require(masses.size() == sc.nodes.size(),
                    "assignment_rule: one mass per scenario node required");
    double best = std::numeric_limits<double>::infinity();
    int best_id = 0;
    bool first = true;
    for (std::size_t l = 0; l < sc.nodes.size(); ++l) {
        const NodeSpec& node = sc.nodes[l];
        const double key =
            std::max(masses[l], mass_floor) / node.bandwidth * delay_kernel(sc, node, x, y);
        if (first || key < best || (key == best && node.id < best_id)) {
            best = key;
            best_id = node.id;
            first = false;
        }
    }
    return best_id;
}

/// Fixed-point iteration of the weighted rule from an initial partition.
/// Masses feeding the rule are damped between iterations; on convergence the
/// returned labels reproduce themselves under their own recomputed masses.
/// Without convergence the best-objective iterate is returned instead, with
/// trace.converged = false.
inline std::pair<Partition, SolveTrace> ot_association(const Scenario& sc,
                                                       std::span<const SupportPoint> pts,
                                                       const SolverConfig& cfg,
                                                       const Partition& init, int nx, int ny) {
    const detail::KernelTable t = detail::make_kernel_table(sc, pts);
    detail::SolveResult res = detail::solve_fixed_point(t, cfg, detail::index_labels(t, init));
    Partition part = detail::make_partition(t, res.labels, res.masses, nx, ny);
    return {std::move(part), std::move(res.trace)};
}

inline std::pair<Partition, SolveTrace> ot_association(const Scenario& sc, const DensityGrid& grid,
                                                       const SolverConfig& cfg,
                                                       const Partition& init) {
    return ot_association(sc, support_points(grid), cfg, init, grid.nx, grid.ny);
}

inline std::pair<Partition, SolveTrace> ot_association(const Scenario& sc, const DensityGrid& grid,
                                                       const SolverConfig& cfg = {}) {
    return ot_association(sc, grid, cfg, snr_association(sc, grid));
}

inline std::pair<Partition, SolveTrace> ot_association(const Scenario& sc,
                                                       std::span<const SupportPoint> pts,
                                                       const SolverConfig& cfg = {}) {
    return ot_association(sc, pts, cfg, snr_association(sc, pts),
                          static_cast<int>(pts.size()), 1);
}

/// Convergence certificate: the largest relative excess of the assigned
/// node's rule key over the pointwise minimum, using masses recomputed from
/// the labels. Exactly 0 for a partition that satisfies the rule.
inline double fixed_point_violation(const Scenario& sc, std::span<const SupportPoint> pts,
                                    const Partition& part, double mass_floor = 1e-12) {
    const detail::KernelTable t = detail::make_kernel_table(sc, pts);
    const std::vector<int> labels = detail::index_labels(t, part);
    std::vector<double> masses(t.num_nodes);
    detail::accumulate_masses(t, labels, masses);
    std::vector<double> weight(t.num_nodes);
    for (std::size_t l = 0; l < t.num_nodes; ++l)
        weight[l] = std::max(masses[l], mass_floor) / t.bandwidth[l];
    double worst = 0.0;
    for (std::size_t p = 0; p < t.num_points; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t l : t.scan_order) best = std::min(best, weight[l] * t.f(l, p));
        const std::size_t assigned = static_cast<std::size_t>(labels[p]);
        const double key = weight[assigned] * t.f(assigned, p);
        worst = std::max(worst, (key - best) / best);
    }
    return worst;
}

inline double fixed_point_violation(const Scenario& sc, const DensityGrid& grid,
                                    const Partition& part, double mass_floor = 1e-12) {
    return fixed_point_violation(sc, support_points(grid), part, mass_floor);
}

/// Structural checks on an emitted partition: shape, label coverage, and
/// masses consistent with the labels.
inline void validate_partition(const Scenario& sc, const DensityGrid& grid, const Partition& p) {
    detail::require(p.nx == grid.nx && p.ny == grid.ny &&
                        p.labels.size() == grid.size(),
                    "partition: shape does not match the grid");
    detail::require(p.node_ids.size() == sc.nodes.size() && p.masses.size() == sc.nodes.size(),
                    "partition: one mass per scenario node required");
    long double sum = 0.0L;
    for (std::size_t k = 0; k < p.node_ids.size(); ++k) {
        detail::require(p.node_ids[k] == sc.nodes[k].id, "partition: node id order mismatch");
        const double recomputed = partition_mass(grid, p, p.node_ids[k]);
        detail::require(p.masses[k] == recomputed, "partition: stored mass differs from labels");
        sum += p.masses[k];
    }
    detail::require(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12,
                    "partition: masses must sum to 1");
}

}  // namespace otcell
