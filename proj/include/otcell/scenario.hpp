#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace otcell {

inline constexpr double speed_of_light = 299792458.0;  // m/s

/// 10^(dB/10)
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// dBm -> W (per-Hz quantities convert the same way)
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

struct Area {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

enum class NodeKind { terrestrial, aerial };

inline const char* to_string(NodeKind k) {
    return k == NodeKind::aerial ? "aerial" : "terrestrial";
}

/// One serving node: a terrestrial base station or an aerial one.
struct NodeSpec {
    int id = 0;
    NodeKind kind = NodeKind::terrestrial;
    double x = 0.0;          // m
    double y = 0.0;          // m
    double height = 0.0;     // antenna height, m
    double tx_power = 0.0;   // W
    double bandwidth = 0.0;  // Hz
};

/// Propagation constants. Attenuations and the noise PSD are stored linear;
/// dB-valued config inputs are converted once at load time.
struct ChannelParams {
    double carrier_freq = 2.0e9;               // Hz
    double ref_distance = 1.0;                 // m
    double mu_los = db_to_linear(3.0);         // LoS excess attenuation, linear
    double mu_nlos = db_to_linear(23.0);       // NLoS excess attenuation, linear
    double alpha = 0.36;                       // LoS-probability scale
    double gamma = 0.21;                       // LoS-probability exponent
    double pathloss_exp = 3.0;                 // terrestrial path loss exponent
    double noise_psd = 1.0e-20;                // W/Hz

    /// Free-space reference loss (4*pi*f_c*d_o/c)^2.
    double k_o() const {
        const double s = 4.0 * std::numbers::pi * carrier_freq * ref_distance / speed_of_light;
        return s * s;
    }
};

struct Scenario {
    Area area;
    std::vector<NodeSpec> nodes;
    ChannelParams channel;
    std::int64_t total_users = 0;  // users served across the area
    double payload_bits = 0.0;     // bits per transmission
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

inline void validate_area(const Area& a) {
    detail::require(a.x_max > a.x_min, "area: x_max must exceed x_min");
    detail::require(a.y_max > a.y_min, "area: y_max must exceed y_min");
}

inline void validate_channel(const ChannelParams& c) {
    detail::require(c.carrier_freq > 0.0, "channel: carrier_freq must be positive");
    detail::require(c.ref_distance > 0.0, "channel: ref_distance must be positive");
    detail::require(c.mu_los > 0.0, "channel: mu_los must be positive");
    detail::require(c.mu_nlos > 0.0, "channel: mu_nlos must be positive");
    detail::require(c.mu_nlos >= c.mu_los, "channel: mu_nlos must be >= mu_los");
    detail::require(c.alpha > 0.0, "channel: alpha must be positive");
    detail::require(c.gamma > 0.0, "channel: gamma must be positive");
    detail::require(c.pathloss_exp > 0.0, "channel: pathloss_exp must be positive");
    detail::require(c.noise_psd > 0.0, "channel: noise_psd must be positive");
}

inline void validate_scenario(const Scenario& s) {
    validate_area(s.area);
    validate_channel(s.channel);
    detail::require(!s.nodes.empty(), "scenario: at least one node required");
    detail::require(s.total_users >= 1, "scenario: total_users must be >= 1");
    detail::require(s.payload_bits > 0.0, "scenario: payload_bits must be positive");
    std::unordered_set<int> seen;
    for (const NodeSpec& n : s.nodes) {
        const std::string tag = "node " + std::to_string(n.id) + ": ";
        detail::require(seen.insert(n.id).second, tag + "duplicate id");
        detail::require(n.height > 0.0, tag + "height must be positive");
        detail::require(n.tx_power > 0.0, tag + "tx_power must be positive");
        detail::require(n.bandwidth > 0.0, tag + "bandwidth must be positive");
        detail::require(s.area.contains(n.x, n.y), tag + "position outside area");
    }
}

namespace detail {

inline void append_grid_nodes(std::vector<NodeSpec>& out, const Area& area, int count,
                              NodeKind kind, double height, double power, double bandwidth,
                              int first_id) {
    if (count <= 0) return;
    // near-square tiling; cells are filled row by row from the low-y side
    const int gx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int gy = (count + gx - 1) / gx;
    const double dx = area.width() / gx;
    const double dy = area.height() / gy;
    int placed = 0;
    for (int iy = 0; iy < gy && placed < count; ++iy) {
        for (int ix = 0; ix < gx && placed < count; ++ix) {
            NodeSpec n;
            n.id = first_id + placed;
            n.kind = kind;
            n.x = area.x_min + (ix + 0.5) * dx;
            n.y = area.y_min + (iy + 0.5) * dy;
            n.height = height;
            n.tx_power = power;
            n.bandwidth = bandwidth;
            out.push_back(n);
            ++placed;
        }
    }
}

}  // namespace detail

/// Deterministic grid placement: aerial nodes at the centers of a near-square
/// tiling of the area, terrestrial nodes at the centers of their own tiling.
/// Aerial nodes take ids 0..num_uav-1, terrestrial nodes follow.
inline std::vector<NodeSpec> grid_deployment(const Area& area, int num_uav, int num_bs,
                                             double uav_height = 200.0, double bs_height = 20.0,
                                             double uav_power = 1.0, double bs_power = 40.0,
                                             double bandwidth = 1.0e6) {
    validate_area(area);
    detail::require(num_uav >= 0 && num_bs >= 0, "grid_deployment: node counts must be >= 0");
    detail::require(num_uav + num_bs > 0, "grid_deployment: at least one node required");
    std::vector<NodeSpec> nodes;
    nodes.reserve(static_cast<std::size_t>(num_uav) + static_cast<std::size_t>(num_bs));
    detail::append_grid_nodes(nodes, area, num_uav, NodeKind::aerial, uav_height, uav_power,
                              bandwidth, 0);
    detail::append_grid_nodes(nodes, area, num_bs, NodeKind::terrestrial, bs_height, bs_power,
                              bandwidth, num_uav);
    return nodes;
}

}  // namespace otcell
