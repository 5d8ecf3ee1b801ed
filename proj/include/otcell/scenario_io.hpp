#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "otcell/partition.hpp"
#include "otcell/scenario.hpp"

namespace otcell {

namespace detail {

// either a linear value under `key` or a dB value under `key_db`
inline void read_linear_or_db(const nlohmann::json& j, const std::string& key, double& out,
                              bool dbm) {
    const std::string db_key = key + "_db";
    const bool has_lin = j.contains(key);
    const bool has_db = j.contains(db_key);
    if (has_lin && has_db)
        throw std::runtime_error("scenario: give either " + key + " or " + db_key + ", not both");
    if (has_lin)
        out = j.at(key).get<double>();
    else if (has_db)
        out = dbm ? dbm_to_watts(j.at(db_key).get<double>()) : db_to_linear(j.at(db_key).get<double>());
}

inline NodeKind parse_kind(const std::string& s) {
    if (s == "terrestrial") return NodeKind::terrestrial;
    if (s == "aerial") return NodeKind::aerial;
    throw std::runtime_error("scenario: unknown node kind \"" + s + "\"");
}

}  // namespace detail

/// Parse and validate a scenario file. Top-level keys: `area`, `channel`
/// (optional, defaults apply), `nodes`, `users`. Attenuations and the noise
/// PSD accept dB inputs via a `_db` key suffix (noise_psd_db is dBm/Hz).
inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("scenario " + path.string() + ": " + e.what());
    }

    Scenario sc;
    try {
        const auto& area = j.at("area");
        sc.area.x_min = area.at("x_min").get<double>();
        sc.area.x_max = area.at("x_max").get<double>();
        sc.area.y_min = area.at("y_min").get<double>();
        sc.area.y_max = area.at("y_max").get<double>();

        if (j.contains("channel")) {
            const auto& ch = j.at("channel");
            ChannelParams& c = sc.channel;
            if (ch.contains("carrier_freq")) c.carrier_freq = ch.at("carrier_freq").get<double>();
            if (ch.contains("ref_distance")) c.ref_distance = ch.at("ref_distance").get<double>();
            if (ch.contains("alpha")) c.alpha = ch.at("alpha").get<double>();
            if (ch.contains("gamma")) c.gamma = ch.at("gamma").get<double>();
            if (ch.contains("pathloss_exp")) c.pathloss_exp = ch.at("pathloss_exp").get<double>();
            detail::read_linear_or_db(ch, "mu_los", c.mu_los, false);
            detail::read_linear_or_db(ch, "mu_nlos", c.mu_nlos, false);
            detail::read_linear_or_db(ch, "noise_psd", c.noise_psd, true);
        }

        for (const auto& jn : j.at("nodes")) {
            NodeSpec n;
            n.id = jn.at("id").get<int>();
            n.kind = detail::parse_kind(jn.at("kind").get<std::string>());
            n.x = jn.at("x").get<double>();
            n.y = jn.at("y").get<double>();
            n.height = jn.at("height").get<double>();
            n.tx_power = jn.at("tx_power").get<double>();
            n.bandwidth = jn.at("bandwidth").get<double>();
            sc.nodes.push_back(n);
        }

        const auto& users = j.at("users");
        sc.total_users = users.at("N").get<std::int64_t>();
        sc.payload_bits = users.at("b").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("scenario " + path.string() + ": " + e.what());
    }

    validate_scenario(sc);
    return sc;
}

/// Write a scenario with all channel quantities in linear units; loading the
/// result reproduces the scenario exactly.
inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    nlohmann::json j;
    j["area"] = {{"x_min", sc.area.x_min},
                 {"x_max", sc.area.x_max},
                 {"y_min", sc.area.y_min},
                 {"y_max", sc.area.y_max}};
    j["channel"] = {{"carrier_freq", sc.channel.carrier_freq},
                    {"ref_distance", sc.channel.ref_distance},
                    {"mu_los", sc.channel.mu_los},
                    {"mu_nlos", sc.channel.mu_nlos},
                    {"alpha", sc.channel.alpha},
                    {"gamma", sc.channel.gamma},
                    {"pathloss_exp", sc.channel.pathloss_exp},
                    {"noise_psd", sc.channel.noise_psd}};
    j["nodes"] = nlohmann::json::array();
    for (const NodeSpec& n : sc.nodes) {
        j["nodes"].push_back({{"id", n.id},
                              {"kind", to_string(n.kind)},
                              {"x", n.x},
                              {"y", n.y},
                              {"height", n.height},
                              {"tx_power", n.tx_power},
                              {"bandwidth", n.bandwidth}});
    }
    j["users"] = {{"N", sc.total_users}, {"b", sc.payload_bits}};
    detail::write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace otcell
