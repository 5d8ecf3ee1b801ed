#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "otcell/association.hpp"
#include "otcell/density.hpp"
#include "otcell/scenario.hpp"

namespace otcell {

struct OracleResult {
    std::vector<int> labels;  // node id per point
    double objective = 0.0;   // seconds
};

namespace detail {

// fresh (non-incremental) evaluation of an index-label assignment
inline double oracle_objective(const KernelTable& t, std::span<const int> labels) {
    std::vector<long double> a(t.num_nodes, 0.0L), s(t.num_nodes, 0.0L);
    for (std::size_t p = 0; p < t.num_points; ++p) {
        const std::size_t l = static_cast<std::size_t>(labels[p]);
        a[l] += t.point_mass[p];
        s[l] += t.f(l, p) * t.point_mass[p];
    }
    long double sum = 0.0L;
    for (std::size_t l = 0; l < t.num_nodes; ++l)
        sum += (t.users / t.bandwidth[l]) * a[l] * s[l];
    return static_cast<double>(sum);
}

}  // namespace detail

/// Exhaustive global minimizer of the average-delay objective over all point
/// assignments. Intended for toy instances; throws when
/// num_nodes^num_points exceeds ~2e7. The first lexicographic minimizer
/// (point 0 most significant) wins ties.
inline OracleResult enumerate_optimal(const Scenario& sc, std::span<const SupportPoint> pts) {
    const detail::KernelTable t = detail::make_kernel_table(sc, pts);
    const std::size_t num_nodes = t.num_nodes;
    const std::size_t num_points = t.num_points;
    double combos = 1.0;
    for (std::size_t p = 0; p < num_points; ++p) {
        combos *= static_cast<double>(num_nodes);
        if (combos > 2e7)
            throw std::invalid_argument("enumerate_optimal: instance too large");
    }

    // enumerate in lexicographic order with the last point as the fastest
    // digit, keeping per-node sums incrementally; labels store scan positions
    // so that lexicographic order follows ascending node ids
    std::vector<int> labels(num_points, 0);
    std::vector<double> mass(num_nodes, 0.0), kern(num_nodes, 0.0);
    for (std::size_t p = 0; p < num_points; ++p) {
        mass[t.scan_order[0]] += t.point_mass[p];
        kern[t.scan_order[0]] += t.f(t.scan_order[0], p) * t.point_mass[p];
    }

    const auto current_objective = [&]() {
        double sum = 0.0;
        for (std::size_t l = 0; l < num_nodes; ++l)
            sum += (t.users / t.bandwidth[l]) * mass[l] * kern[l];
        return sum;
    };

    std::vector<int> best_labels = labels;
    double best = current_objective();
    for (;;) {
        // advance the odometer: last point runs fastest
        std::size_t p = num_points;
        while (p > 0) {
            --p;
            const std::size_t old_node = t.scan_order[static_cast<std::size_t>(labels[p])];
            if (static_cast<std::size_t>(labels[p]) + 1 < num_nodes) {
                const std::size_t new_node = t.scan_order[static_cast<std::size_t>(labels[p]) + 1];
                ++labels[p];
                mass[old_node] -= t.point_mass[p];
                kern[old_node] -= t.f(old_node, p) * t.point_mass[p];
                mass[new_node] += t.point_mass[p];
                kern[new_node] += t.f(new_node, p) * t.point_mass[p];
                break;
            }
            // roll this digit back to the first node and carry
            const std::size_t new_node = t.scan_order[0];
            labels[p] = 0;
            mass[old_node] -= t.point_mass[p];
            kern[old_node] -= t.f(old_node, p) * t.point_mass[p];
            mass[new_node] += t.point_mass[p];
            kern[new_node] += t.f(new_node, p) * t.point_mass[p];
            if (p == 0) {
                // wrapped all the way around: enumeration complete
                OracleResult res;
                res.labels.resize(num_points);
                std::vector<int> idx(num_points);
                for (std::size_t q = 0; q < num_points; ++q) {
                    idx[q] = static_cast<int>(t.scan_order[static_cast<std::size_t>(best_labels[q])]);
                    res.labels[q] = t.node_id[static_cast<std::size_t>(idx[q])];
                }
                res.objective = detail::oracle_objective(t, idx);
                return res;
            }
        }
        const double obj = current_objective();
        if (obj < best) {
            best = obj;
            best_labels = labels;
        }
    }
}

/// A small random instance for oracle-vs-solver comparisons: three nodes of
/// mixed kind with randomized powers and heights, and 8-12 weighted points.
struct ToyInstance {
    Scenario scenario;
    std::vector<SupportPoint> points;
};

inline ToyInstance make_random_toy(std::mt19937_64& rng) {
    ToyInstance toy;
    toy.scenario.area = {0.0, 4000.0, 0.0, 4000.0};
    toy.scenario.total_users = 300;
    toy.scenario.payload_bits = 1.0e6;

    std::uniform_real_distribution<double> coord(0.0, 4000.0);
    std::uniform_real_distribution<double> uav_height(100.0, 300.0);
    std::uniform_real_distribution<double> bs_height(15.0, 30.0);
    std::uniform_real_distribution<double> uav_power(0.5, 2.0);
    std::uniform_real_distribution<double> bs_power(10.0, 60.0);
    std::bernoulli_distribution is_aerial(0.5);
    for (int i = 0; i < 3; ++i) {
        NodeSpec n;
        n.id = i;
        n.kind = is_aerial(rng) ? NodeKind::aerial : NodeKind::terrestrial;
        n.x = coord(rng);
        n.y = coord(rng);
        if (n.kind == NodeKind::aerial) {
            n.height = uav_height(rng);
            n.tx_power = uav_power(rng);
        } else {
            n.height = bs_height(rng);
            n.tx_power = bs_power(rng);
        }
        n.bandwidth = 1.0e6;
        toy.scenario.nodes.push_back(n);
    }

    std::uniform_int_distribution<int> count(8, 12);
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    const int num_points = count(rng);
    double sum = 0.0;
    for (int p = 0; p < num_points; ++p) {
        SupportPoint pt{coord(rng), coord(rng), weight(rng)};
        sum += pt.mass;
        toy.points.push_back(pt);
    }
    for (SupportPoint& pt : toy.points) pt.mass /= sum;
    return toy;
}

}  // namespace otcell
