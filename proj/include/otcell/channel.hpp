#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "otcell/scenario.hpp"

namespace otcell {

/// 3-D distance from a node's antenna to a ground point.
inline double distance3d(const NodeSpec& node, double x, double y) {
    const double dx = x - node.x;
    const double dy = y - node.y;
    return std::sqrt(dx * dx + dy * dy + node.height * node.height);
}

/// Elevation angle from a ground point toward an aerial node, in (0, pi/2].
/// pi/2 exactly when the point sits directly below the node.
inline double elevation_angle(const NodeSpec& node, double x, double y) {
    if (node.kind != NodeKind::aerial)
        throw std::invalid_argument("elevation_angle: node must be aerial");
    return std::asin(node.height / distance3d(node, x, y));
}

/// Line-of-sight probability at elevation angle theta (radians).
/// Zero at or below pi/12; the power-law value is clamped to [0, 1] above it.
inline double los_probability(const ChannelParams& p, double theta) {
    constexpr double threshold = std::numbers::pi / 12.0;
    if (theta <= threshold) return 0.0;
    const double deg_above = 180.0 / std::numbers::pi * theta - 15.0;
    if (deg_above <= 0.0) return 0.0;
    const double raw = p.alpha * std::pow(deg_above, p.gamma);
    return std::clamp(raw, 0.0, 1.0);
}

/// LoS/NLoS-averaged air-to-ground loss factor, K_o (d/d_o)^2 blended by the
/// LoS probability. Requires an aerial node.
inline double mean_path_loss_uav(const ChannelParams& p, const NodeSpec& node, double x,
                                 double y) {
    const double d = distance3d(node, x, y);
    const double p_los = los_probability(p, elevation_angle(node, x, y));
    const double dn = d / p.ref_distance;
    return p.k_o() * dn * dn * (p_los * p.mu_los + (1.0 - p_los) * p.mu_nlos);
}

/// Power-law loss factor K_o d^n for a terrestrial node.
inline double path_loss_bs(const ChannelParams& p, const NodeSpec& node, double x, double y) {
    return p.k_o() * std::pow(distance3d(node, x, y), p.pathloss_exp);
}

/// Loss factor dispatched on node kind.
inline double path_loss(const ChannelParams& p, const NodeSpec& node, double x, double y) {
    return node.kind == NodeKind::aerial ? mean_path_loss_uav(p, node, x, y)
                                         : path_loss_bs(p, node, x, y);
}

/// Per-user SNR at a ground point. The per-user power share and the per-user
/// noise bandwidth both scale with 1/load, so the ratio is load-free:
/// tx_power / (loss * N0 * W).
inline double snr(const Scenario& sc, const NodeSpec& node, double x, double y) {
    return node.tx_power /
           (path_loss(sc.channel, node, x, y) * sc.channel.noise_psd * node.bandwidth);
}

/// Per-location delay kernel: payload bits over spectral efficiency,
/// b / log2(1 + SNR). Returns +infinity for an unreachable point (zero SNR).
inline double delay_kernel(const Scenario& sc, const NodeSpec& node, double x, double y) {
    return sc.payload_bits / std::log2(1.0 + snr(sc, node, x, y));
}

}  // namespace otcell
