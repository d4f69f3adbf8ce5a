#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <medlink/errors.hpp>

// Domain model: technology profiles, traffic, paths, scenarios.
// Units everywhere: seconds, whole bytes on the wire, bits per second.

namespace medlink {

enum class MacKind { contention, deterministic };
enum class OversizePolicy { drop, accept };
enum class RunMode { analytic, simulate, compare };
enum class ContentionMode { expected_backoff, literal_eq11 };

struct CsmaParams {
    int be_min = 2;
    int be_max = 3;
    int max_backoffs = 2;  // CCA failures allowed before the packet is dropped
    double slot_duration = 0.32e-3;
    double cca_duration = 0.128e-3;
    double turnaround = 0.192e-3;
    double sifs = 0.192e-3;
    double lifs = 0.64e-3;
    int sifs_frame_threshold = 18;  // MPDU bytes at/below which the short IFS applies
    bool ack_enabled = true;
    int max_retries = 3;
    // by default the ack reuses the full data-frame headers; set this to price
    // the ack as a fixed frame size instead (e.g. 11 B for a standard imm-ack)
    std::optional<int> ack_frame_bytes;

    bool operator==(const CsmaParams&) const = default;
};

struct DeterministicLinkParams {
    double processing_delay = 0.0;
    double propagation_delay = 0.0;
    int retry_limit = 0;  // carried configuration; the lossless link never retries

    bool operator==(const DeterministicLinkParams&) const = default;
};

struct TechnologyProfile {
    std::string id;
    std::string name;
    double data_rate = 0.0;  // bits/second
    int phy_header = 0;      // bytes
    int mac_header = 0;
    int mac_footer = 0;
    MacKind mac_kind = MacKind::contention;
    std::optional<CsmaParams> csma;                       // required iff contention
    std::optional<DeterministicLinkParams> deterministic;  // required iff deterministic
    std::optional<long long> buffer_capacity;             // bits
    OversizePolicy oversize_policy = OversizePolicy::accept;
    std::map<std::string, std::string> metadata;  // carried, never computed on

    bool operator==(const TechnologyProfile&) const = default;
};

struct TrafficSpec {
    int payload = 1024;          // bytes
    double inter_arrival = 0.04;  // seconds
    int packet_count = 10000;    // per source device

    bool operator==(const TrafficSpec&) const = default;
};

struct ContentionConfig {
    int num_end_devices = 1;

    bool operator==(const ContentionConfig&) const = default;
};

struct LinkSpec {
    int index = 1;  // 1-based position in the path
    std::string profile_id;
    std::optional<ContentionConfig> contention;  // contention-kind links only

    bool operator==(const LinkSpec&) const = default;
};

struct PathSpec {
    std::string id;
    std::vector<LinkSpec> links;

    bool operator==(const PathSpec&) const = default;
};

using ProfileMap = std::map<std::string, TechnologyProfile>;

struct Scenario {
    std::vector<PathSpec> paths;
    TrafficSpec traffic;
    std::uint64_t seed = 42;
    RunMode mode = RunMode::compare;
    int replications = 1;
    ProfileMap profiles;  // effective table: builtins plus inline declarations

    bool operator==(const Scenario&) const = default;
};

namespace detail {

inline void check_profile(const TechnologyProfile& p, const std::string& where,
                          std::vector<Violation>& out) {
    auto add = [&](const char* code, const std::string& msg) {
        out.push_back({where + "." + code, msg});
    };
    if (!(p.data_rate > 0))
        add("data_rate.min", "data_rate must be > 0 in profile \"" + p.id + "\"");
    if (p.phy_header < 0 || p.mac_header < 0 || p.mac_footer < 0)
        add("headers.min", "header/footer sizes must be >= 0 in profile \"" + p.id + "\"");
    if (p.mac_kind == MacKind::contention) {
        if (!p.csma || p.deterministic)
            add("kind_params_mismatch",
                "contention profile \"" + p.id + "\" must carry csma params only");
    } else {
        if (!p.deterministic || p.csma)
            add("kind_params_mismatch",
                "deterministic profile \"" + p.id + "\" must carry deterministic params only");
    }
    if (p.buffer_capacity && *p.buffer_capacity <= 0)
        add("buffer_capacity.min", "buffer_capacity must be > 0 in profile \"" + p.id + "\"");
    if (p.csma) {
        const CsmaParams& c = *p.csma;
        if (!(0 <= c.be_min && c.be_min <= c.be_max && c.be_max <= 8))
            add("csma.be_order",
                "need 0 <= be_min <= be_max <= 8 in profile \"" + p.id + "\"");
        if (c.max_backoffs < 0 || c.max_retries < 0)
            add("csma.retry_limits.min",
                "max_backoffs and max_retries must be >= 0 in profile \"" + p.id + "\"");
        if (c.slot_duration < 0 || c.cca_duration < 0 || c.turnaround < 0 || c.sifs < 0 ||
            c.lifs < 0)
            add("csma.durations.min", "durations must be >= 0 in profile \"" + p.id + "\"");
        if (c.sifs > c.lifs)
            add("csma.sifs_lifs_order", "sifs must be <= lifs in profile \"" + p.id + "\"");
        if (c.sifs_frame_threshold < 0)
            add("csma.sifs_frame_threshold.min",
                "sifs_frame_threshold must be >= 0 in profile \"" + p.id + "\"");
        if (c.ack_frame_bytes && *c.ack_frame_bytes < 0)
            add("csma.ack_frame_bytes.min",
                "ack_frame_bytes must be >= 0 in profile \"" + p.id + "\"");
    }
    if (p.deterministic) {
        const DeterministicLinkParams& d = *p.deterministic;
        if (d.processing_delay < 0 || d.propagation_delay < 0)
            add("deterministic.delays.min", "delays must be >= 0 in profile \"" + p.id + "\"");
        if (d.retry_limit < 0)
            add("deterministic.retry_limit.min",
                "retry_limit must be >= 0 in profile \"" + p.id + "\"");
    }
}

inline ProfileMap make_builtin_profiles() {
    ProfileMap m;

    {
        TechnologyProfile p;
        p.id = "zigbee";
        p.name = "ZigBee end device / coordinator, IEEE 802.15.4 at 2.4 GHz";
        p.data_rate = 250e3;
        p.phy_header = 6;  // preamble 4 + SFD 1 + PHR 1
        p.mac_header = 9;
        p.mac_footer = 2;  // FCS
        p.mac_kind = MacKind::contention;
        p.csma = CsmaParams{};  // be 2..3, 2 backoffs, 0.32 ms slots
        p.metadata = {{"beacon_order", "6"},
                      {"superframe_order", "0"},
                      {"maximum_routers", "5"},
                      {"maximum_depth", "5"},
                      {"beacon_enabled_network", "disabled"},
                      {"mesh_routing", "disabled"},
                      {"route_discovery_timeout", "10ms"}};
        m.emplace(p.id, std::move(p));
    }
    {
        // same radio with the narrative parameter reading: 0.1 s channel
        // sensing and up to 3 backoff attempts
        TechnologyProfile p = m.at("zigbee");
        p.id = "zigbee-literal";
        p.name = "ZigBee, narrative timing variant";
        p.csma->cca_duration = 0.1;
        p.csma->max_backoffs = 3;
        m.emplace(p.id, std::move(p));
    }
    {
        TechnologyProfile p;
        p.id = "wlan";
        p.name = "WLAN access point, IEEE 802.11b DSSS";
        p.data_rate = 11e6;
        p.phy_header = 24;  // PLCP preamble+header aggregate
        p.mac_header = 28;
        p.mac_footer = 4;
        p.mac_kind = MacKind::contention;
        CsmaParams c;
        c.be_min = 5;  // CWmin 31
        c.be_max = 5;
        c.max_backoffs = 7;
        c.slot_duration = 20e-6;
        c.cca_duration = 15e-6;
        c.turnaround = 10e-6;
        c.sifs = 10e-6;
        c.lifs = 50e-6;  // DIFS
        c.sifs_frame_threshold = 18;
        c.ack_enabled = true;
        c.max_retries = 7;
        p.csma = c;
        p.buffer_capacity = 25600;
        p.oversize_policy = OversizePolicy::drop;
        p.metadata = {{"bss_identifier", "auto_assigned"},
                      {"physical_technique", "direct_sequence"},
                      {"transmit_power", "0.005W"},
                      {"packet_reception_threshold", "-95dBm"},
                      {"mac_interfaces", "IF0_P0,IF1_P0"}};
        m.emplace(p.id, std::move(p));
    }
    {
        TechnologyProfile p = m.at("wlan");
        p.id = "wlan-54g";
        p.name = "WLAN access point, IEEE 802.11g OFDM";
        p.data_rate = 54e6;
        p.csma->slot_duration = 9e-6;
        p.csma->cca_duration = 4e-6;
        p.csma->turnaround = 10e-6;
        p.csma->sifs = 10e-6;
        p.csma->lifs = 28e-6;
        p.metadata["physical_technique"] = "ofdm";
        m.emplace(p.id, std::move(p));
    }
    {
        TechnologyProfile p;
        p.id = "wimax";
        p.name = "WiMAX subscriber station to base station, IEEE 802.16";
        p.data_rate = 120e6;
        p.mac_kind = MacKind::deterministic;
        p.deterministic = DeterministicLinkParams{};
        p.metadata = {{"antenna_gain", "15dbi"},
                      {"number_of_transmitters", "SISO"},
                      {"mac_address", "auto_assigned"},
                      {"maximum_transmission_power", "0.5W"},
                      {"physical_profile", "wireless_ofdm_20mhz"},
                      {"maximum_ss_nodes", "100"},
                      {"minimum_power_density", "-110dBm"},
                      {"maximum_power_density", "-60dBm"}};
        m.emplace(p.id, std::move(p));
    }
    {
        TechnologyProfile p;
        p.id = "umts";
        p.name = "UMTS node B and core, aggregated";
        p.data_rate = 42e6;
        p.mac_kind = MacKind::deterministic;
        p.deterministic = DeterministicLinkParams{0.002, 0.0, 4};
        p.metadata = {{"cell_path_loss_parameters", "default"},
                      {"umts_cell_id", "default"},
                      {"umts_sgsn_id", "0"},
                      {"ip", "default"}};
        m.emplace(p.id, std::move(p));
    }
    {
        TechnologyProfile p;
        p.id = "ipcloud";
        p.name = "IP cloud to health monitoring endpoint, aggregated";
        p.data_rate = 100e6;
        p.mac_kind = MacKind::deterministic;
        p.deterministic = DeterministicLinkParams{};
        m.emplace(p.id, std::move(p));
    }

    std::vector<Violation> v;
    for (const auto& [id, p] : m) check_profile(p, "profile", v);
    if (!v.empty()) throw ValidationError(std::move(v));  // built-ins must be sound
    return m;
}

}  // namespace detail

inline const ProfileMap& builtin_profiles() {
    static const ProfileMap m = detail::make_builtin_profiles();
    return m;
}

// Every invariant violation in the scenario, empty when valid.
inline std::vector<Violation> validate_scenario(const Scenario& s) {
    std::vector<Violation> out;

    for (const auto& [id, p] : s.profiles) {
        detail::check_profile(p, "profile", out);
        if (p.id != id)
            out.push_back({"profile.id.mismatch",
                           "profile keyed \"" + id + "\" carries id \"" + p.id + "\""});
    }

    if (!(s.traffic.payload >= 0))
        out.push_back({"traffic.payload.min", "payload must be >= 0"});
    if (!(s.traffic.inter_arrival > 0))
        out.push_back({"traffic.inter_arrival.min", "inter_arrival must be > 0"});
    if (!(s.traffic.packet_count >= 1))
        out.push_back({"traffic.packet_count.min", "packet_count must be >= 1"});
    if (s.replications < 1)
        out.push_back({"scenario.replications.min", "replications must be >= 1"});
    if (s.paths.empty())
        out.push_back({"scenario.paths.empty", "scenario must declare at least one path"});

    for (const auto& path : s.paths) {
        const std::string where = "path \"" + path.id + "\"";
        if (path.links.empty()) {
            out.push_back({"path.links.empty", where + " has no links"});
            continue;
        }
        if (path.links.size() > 3)
            out.push_back({"path.links.count", where + " has more than three links"});
        for (std::size_t i = 0; i < path.links.size(); ++i) {
            const LinkSpec& link = path.links[i];
            if (link.index != static_cast<int>(i) + 1)
                out.push_back({"link.index.order",
                               where + " link " + std::to_string(link.index) +
                                   " is out of position"});
            auto it = s.profiles.find(link.profile_id);
            if (it == s.profiles.end()) {
                out.push_back({"link.profile.unknown",
                               where + " references unknown profile \"" + link.profile_id +
                                   "\""});
                continue;
            }
            const bool contention = it->second.mac_kind == MacKind::contention;
            if (link.contention && !contention)
                out.push_back({"link.contention.kind_mismatch",
                               where + " attaches contention config to deterministic profile \"" +
                                   link.profile_id + "\""});
            if (!link.contention && contention)
                out.push_back({"link.contention.missing",
                               where + " contention link \"" + link.profile_id +
                                   "\" needs a contention config"});
            if (link.contention && link.contention->num_end_devices < 1)
                out.push_back({"contention.num_end_devices.min",
                               where + " num_end_devices must be >= 1"});
        }
    }
    return out;
}

inline int frame_bytes(const TechnologyProfile& p, int payload) {
    return p.phy_header + p.mac_header + payload + p.mac_footer;
}

inline long long frame_bits(const TechnologyProfile& p, int payload) {
    return 8LL * frame_bytes(p, payload);
}

// The three canonical scenarios: body sensors -> zigbee -> {wlan|wimax|umts}
// -> ip cloud, 1024 B packets every 0.04 s.
inline Scenario make_builtin_scenario(const std::string& name) {
    std::string second;
    if (name == "path1") second = "wlan";
    else if (name == "path2") second = "wimax";
    else if (name == "path3") second = "umts";
    else throw UnknownProfile("builtin:" + name);

    Scenario s;
    s.traffic = TrafficSpec{1024, 0.04, 10000};
    s.seed = 42;
    s.mode = RunMode::compare;
    s.replications = 1;
    const ProfileMap& b = builtin_profiles();
    for (const std::string& id : {std::string("zigbee"), second, std::string("ipcloud")})
        s.profiles.emplace(id, b.at(id));

    PathSpec path;
    path.id = name;
    path.links.push_back({1, "zigbee", ContentionConfig{1}});
    LinkSpec l2{2, second, std::nullopt};
    if (b.at(second).mac_kind == MacKind::contention) l2.contention = ContentionConfig{1};
    path.links.push_back(l2);
    path.links.push_back({3, "ipcloud", std::nullopt});
    s.paths.push_back(std::move(path));
    return s;
}

}  // namespace medlink
