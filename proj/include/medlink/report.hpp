#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include <medlink/composer.hpp>
#include <medlink/linksim.hpp>
#include <medlink/model.hpp>
#include <medlink/scenario_io.hpp>

// Report assembly and emission. All floating output goes through the
// shortest round-trip formatter so identical runs give identical bytes.
//
// CSV schemas (fixed):
//   per packet    packet_id,d1_s,d2_s,d3_s,d_total_s
//   breakdowns    link,component,seconds      (link is "<path>.<n>")
//   comparison    path,link,analytic_s,sim_mean_s,sim_stderr_s,error,error_kind,flagged
//   sweep         parameter,value,path,analytic_d1_s,analytic_d2_s,analytic_d3_s,
//                 analytic_total_s,sim_mean_s,sim_stderr_s,sim_count
//   profiles      id,kind,data_rate_bps,phy_header_B,mac_header_B,mac_footer_B

namespace medlink::report {

using nlohmann::json;

struct LinkAnalysis {
    int index = 0;
    std::string profile_id;
    analytics::DelayBreakdown breakdown;
};

struct PathAnalysis {
    std::string path_id;
    std::vector<LinkAnalysis> links;
    composer::PathDelayReport totals;
    bool literal_out_of_range = false;  // printed-mode expectation left finite range
};

struct PathSimulation {
    std::string path_id;
    std::size_t link_count = 0;
    sim::PathSampleSet merged;
    std::vector<composer::DelayStats> link_stats;  // one per link, of per-packet d_i
    composer::DelayStats total_stats;
};

struct PathComparison {
    PathAnalysis analytic;
    composer::ComparisonReport comparison;
};

inline PathAnalysis analyze_path(const PathSpec& path, const TrafficSpec& traffic,
                                 ContentionMode mode, const ProfileMap& profiles) {
    PathAnalysis res;
    res.path_id = path.id;
    for (const LinkSpec& link : path.links) {
        const TechnologyProfile& prof = profiles.at(link.profile_id);
        analytics::DelayBreakdown b;
        if (prof.mac_kind == MacKind::contention) {
            const CsmaParams& c = *prof.csma;
            const int devices = link.contention ? link.contention->num_end_devices : 1;
            const double bo = mode == ContentionMode::expected_backoff
                                  ? analytics::expected_bo_slots(c.be_min)
                                  : analytics::expected_time_delay_literal(c.be_min, devices);
            b = analytics::link_delay(prof, traffic.payload, bo, c.ack_enabled);
        } else {
            b = analytics::deterministic_link_delay(prof, traffic.payload);
        }
        res.links.push_back({link.index, link.profile_id, b});
    }
    res.totals = composer::analytic_path_delay(path, traffic, mode, profiles);
    res.literal_out_of_range =
        mode == ContentionMode::literal_eq11 && !std::isfinite(res.totals.d_total);
    return res;
}

inline PathSimulation summarize_simulation(const std::string& path_id, std::size_t link_count,
                                           sim::PathSampleSet merged) {
    PathSimulation res;
    res.path_id = path_id;
    res.link_count = link_count;
    res.merged = std::move(merged);
    if (res.merged.per_packet.empty())
        throw EmptySamples("no packets were delivered end to end on path \"" + path_id + "\"");
    std::vector<double> column;
    column.reserve(res.merged.per_packet.size());
    for (std::size_t l = 0; l < link_count && l < 3; ++l) {
        column.clear();
        for (const auto& r : res.merged.per_packet)
            column.push_back(l == 0 ? r.d1 : l == 1 ? r.d2 : r.d3);
        res.link_stats.push_back(composer::summarize(column));
    }
    column.clear();
    for (const auto& r : res.merged.per_packet) column.push_back(r.d_total);
    res.total_stats = composer::summarize(column);
    return res;
}

// ---------------------------------------------------------------------------
// formatting helpers

inline std::string fd(double v) { return ioutil::fmt_double(v); }

// compact form for human tables; machine formats keep full round-trip digits
inline std::string fg(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline json stats_json(const composer::DelayStats& st) {
    return json{{"count", st.count},   {"mean_s", st.mean}, {"variance", st.variance},
                {"min_s", st.min},     {"max_s", st.max},   {"p50_s", st.p50},
                {"p90_s", st.p90},     {"p99_s", st.p99},   {"std_error_s", st.std_error}};
}

inline json breakdown_json(const analytics::DelayBreakdown& b) {
    return json{{"t_bo_s", b.t_bo}, {"t_data_s", b.t_data}, {"t_ta_s", b.t_ta},
                {"t_ack_s", b.t_ack}, {"t_ifs_s", b.t_ifs}, {"total_s", b.total}};
}

// ---------------------------------------------------------------------------
// analyze

inline std::string analyze_csv(const std::vector<PathAnalysis>& paths) {
    std::string out = "link,component,seconds\n";
    for (const auto& p : paths) {
        for (const auto& l : p.links) {
            const std::string key = p.path_id + "." + std::to_string(l.index);
            out += key + ",t_bo," + fd(l.breakdown.t_bo) + "\n";
            out += key + ",t_data," + fd(l.breakdown.t_data) + "\n";
            out += key + ",t_ta," + fd(l.breakdown.t_ta) + "\n";
            out += key + ",t_ack," + fd(l.breakdown.t_ack) + "\n";
            out += key + ",t_ifs," + fd(l.breakdown.t_ifs) + "\n";
            out += key + ",total," + fd(l.breakdown.total) + "\n";
        }
        out += p.path_id + ",d_total," + fd(p.totals.d_total) + "\n";
    }
    return out;
}

inline std::string analyze_table(const std::vector<PathAnalysis>& paths) {
    std::string out;
    for (const auto& p : paths) {
        out += "path " + p.path_id + "\n";
        out += "  " + pad("link", 6) + pad("profile", 16) + pad("t_bo", 14) + pad("t_data", 14) +
               pad("t_ta", 14) + pad("t_ack", 14) + pad("t_ifs", 14) + "total\n";
        for (const auto& l : p.links) {
            out += "  " + pad("D" + std::to_string(l.index), 6) + pad(l.profile_id, 16) +
                   pad(fg(l.breakdown.t_bo), 14) + pad(fg(l.breakdown.t_data), 14) +
                   pad(fg(l.breakdown.t_ta), 14) + pad(fg(l.breakdown.t_ack), 14) +
                   pad(fg(l.breakdown.t_ifs), 14) + fg(l.breakdown.total) + "\n";
        }
        out += "  D_total = " + fg(p.totals.d_total) + " s\n";
        if (p.literal_out_of_range)
            out += "  note: literal-mode expectation is outside finite range\n";
    }
    return out;
}

inline std::string analyze_json_str(const std::vector<PathAnalysis>& paths, ContentionMode mode) {
    json j;
    j["command"] = "analyze";
    j["contention_mode"] =
        mode == ContentionMode::expected_backoff ? "expected_backoff" : "literal_eq11";
    j["paths"] = json::array();
    for (const auto& p : paths) {
        json links = json::array();
        for (const auto& l : p.links) {
            json lj = breakdown_json(l.breakdown);
            lj["index"] = l.index;
            lj["profile"] = l.profile_id;
            links.push_back(lj);
        }
        j["paths"].push_back({{"id", p.path_id},
                              {"links", links},
                              {"d1_s", p.totals.d1},
                              {"d2_s", p.totals.d2},
                              {"d3_s", p.totals.d3},
                              {"d_total_s", p.totals.d_total},
                              {"literal_out_of_range", p.literal_out_of_range}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// simulate

inline std::string per_packet_csv(const std::vector<PathSimulation>& paths) {
    std::string out = "packet_id,d1_s,d2_s,d3_s,d_total_s\n";
    for (const auto& p : paths) {
        for (std::size_t i = 0; i < p.merged.per_packet.size(); ++i) {
            const auto& r = p.merged.per_packet[i];
            out += std::to_string(p.merged.packet_ids[i]) + "," + fd(r.d1) + "," + fd(r.d2) +
                   "," + fd(r.d3) + "," + fd(r.d_total) + "\n";
        }
    }
    return out;
}

inline std::string simulate_table(const std::vector<PathSimulation>& paths) {
    std::string out;
    for (const auto& p : paths) {
        out += "path " + p.path_id + "\n";
        long offered = 0, dropped = 0, collisions = 0;
        for (const auto& l : p.merged.per_link) {
            dropped += l.dropped;
            collisions += l.collisions;
        }
        if (!p.merged.per_link.empty()) offered = p.merged.per_link.front().offered;
        out += "  delivered " + std::to_string(p.merged.per_packet.size()) + " of " +
               std::to_string(offered) + " offered, dropped " + std::to_string(dropped) +
               ", collided attempts " + std::to_string(collisions) + "\n";
        out += "  " + pad("metric", 10) + pad("mean", 14) + pad("p50", 14) + pad("p90", 14) +
               pad("p99", 14) + pad("min", 14) + pad("max", 14) + "stderr\n";
        auto row = [&](const std::string& name, const composer::DelayStats& st) {
            out += "  " + pad(name, 10) + pad(fg(st.mean), 14) + pad(fg(st.p50), 14) +
                   pad(fg(st.p90), 14) + pad(fg(st.p99), 14) + pad(fg(st.min), 14) +
                   pad(fg(st.max), 14) + fg(st.std_error) + "\n";
        };
        for (std::size_t l = 0; l < p.link_stats.size(); ++l)
            row("d" + std::to_string(l + 1), p.link_stats[l]);
        row("d_total", p.total_stats);
    }
    return out;
}

inline json link_counters_json(const sim::LinkSampleSet& l) {
    json hist = json::object();
    for (const auto& [retries, count] : l.retries_histogram)
        hist[std::to_string(retries)] = count;
    return json{{"offered", l.offered},
                {"delivered", l.samples.size()},
                {"dropped", l.dropped},
                {"collisions", l.collisions},
                {"collided_deliveries", l.collided_deliveries},
                {"retries_histogram", hist}};
}

inline std::string simulate_json_str(const std::vector<PathSimulation>& paths) {
    json j;
    j["command"] = "simulate";
    j["paths"] = json::array();
    for (const auto& p : paths) {
        json links = json::array();
        for (std::size_t l = 0; l < p.merged.per_link.size(); ++l) {
            json lj = link_counters_json(p.merged.per_link[l]);
            lj["index"] = l + 1;
            if (l < p.link_stats.size()) lj["stats"] = stats_json(p.link_stats[l]);
            links.push_back(lj);
        }
        j["paths"].push_back({{"id", p.path_id},
                              {"delivered", p.merged.per_packet.size()},
                              {"d_total", stats_json(p.total_stats)},
                              {"per_link", links}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// compare

inline std::string compare_csv(const std::vector<PathComparison>& paths) {
    std::string out = "path,link,analytic_s,sim_mean_s,sim_stderr_s,error,error_kind,flagged\n";
    auto row = [&](const std::string& path, const std::string& link,
                   const composer::LinkComparison& c) {
        out += path + "," + link + "," + fd(c.analytic) + "," + fd(c.simulated.mean) + "," +
               fd(c.simulated.std_error) + "," + fd(c.error) + "," +
               (c.absolute ? "absolute" : "relative") + "," + (c.flagged ? "true" : "false") +
               "\n";
    };
    for (const auto& p : paths) {
        for (std::size_t i = 0; i < p.comparison.per_link.size(); ++i)
            row(p.analytic.path_id, std::to_string(i + 1), p.comparison.per_link[i]);
        row(p.analytic.path_id, "total", p.comparison.path);
    }
    return out;
}

inline std::string compare_table(const std::vector<PathComparison>& paths) {
    std::string out;
    for (const auto& p : paths) {
        out += "path " + p.analytic.path_id + "\n";
        out += "  " + pad("link", 8) + pad("analytic", 16) + pad("simulated", 16) +
               pad("stderr", 14) + pad("error", 14) + "flag\n";
        auto row = [&](const std::string& name, const composer::LinkComparison& c) {
            out += "  " + pad(name, 8) + pad(fg(c.analytic), 16) + pad(fg(c.simulated.mean), 16) +
                   pad(fg(c.simulated.std_error), 14) +
                   pad(fg(c.error) + (c.absolute ? " (abs)" : ""), 14) +
                   (c.flagged ? "FLAG" : "ok") + "\n";
        };
        for (std::size_t i = 0; i < p.comparison.per_link.size(); ++i)
            row("D" + std::to_string(i + 1), p.comparison.per_link[i]);
        row("total", p.comparison.path);
    }
    return out;
}

inline std::string compare_json_str(const std::vector<PathComparison>& paths) {
    json j;
    j["command"] = "compare";
    j["paths"] = json::array();
    for (const auto& p : paths) {
        auto one = [&](const composer::LinkComparison& c) {
            return json{{"analytic_s", c.analytic},
                        {"simulated", stats_json(c.simulated)},
                        {"error", c.error},
                        {"error_kind", c.absolute ? "absolute" : "relative"},
                        {"flagged", c.flagged}};
        };
        json links = json::array();
        for (const auto& c : p.comparison.per_link) links.push_back(one(c));
        j["paths"].push_back({{"id", p.analytic.path_id},
                              {"threshold", p.comparison.threshold},
                              {"per_link", links},
                              {"total", one(p.comparison.path)}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// sweep

inline std::string sweep_csv(const std::string& parameter,
                             const std::vector<composer::SweepRow>& rows) {
    std::string out =
        "parameter,value,path,analytic_d1_s,analytic_d2_s,analytic_d3_s,analytic_total_s,"
        "sim_mean_s,sim_stderr_s,sim_count\n";
    for (const auto& r : rows) {
        out += parameter + "," + fd(r.value) + "," + r.path_id + "," + fd(r.analytic.d1) + "," +
               fd(r.analytic.d2) + "," + fd(r.analytic.d3) + "," + fd(r.analytic.d_total) + ",";
        if (r.simulated_total) {
            out += fd(r.simulated_total->mean) + "," + fd(r.simulated_total->std_error) + "," +
                   std::to_string(r.simulated_total->count);
        } else {
            out += ",,";
        }
        out += "\n";
    }
    return out;
}

inline std::string sweep_table(const std::string& parameter,
                               const std::vector<composer::SweepRow>& rows) {
    std::string out = "sweep over " + parameter + "\n";
    out += "  " + pad("value", 14) + pad("path", 10) + pad("analytic_total", 18) +
           pad("sim_mean", 16) + "sim_stderr\n";
    for (const auto& r : rows) {
        out += "  " + pad(fg(r.value), 14) + pad(r.path_id, 10) +
               pad(fg(r.analytic.d_total), 18);
        if (r.simulated_total)
            out += pad(fg(r.simulated_total->mean), 16) + fg(r.simulated_total->std_error);
        else
            out += pad("-", 16) + "-";
        out += "\n";
    }
    return out;
}

inline std::string sweep_json_str(const std::string& parameter,
                                  const std::vector<composer::SweepRow>& rows) {
    json j;
    j["command"] = "sweep";
    j["parameter"] = parameter;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row{{"value", r.value},
                 {"path", r.path_id},
                 {"analytic",
                  {{"d1_s", r.analytic.d1},
                   {"d2_s", r.analytic.d2},
                   {"d3_s", r.analytic.d3},
                   {"d_total_s", r.analytic.d_total}}}};
        if (r.simulated_total) row["simulated_total"] = stats_json(*r.simulated_total);
        j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// profiles

inline std::string profiles_csv(const ProfileMap& profiles) {
    std::string out = "id,kind,data_rate_bps,phy_header_B,mac_header_B,mac_footer_B\n";
    for (const auto& [id, p] : profiles) {
        out += id + "," +
               (p.mac_kind == MacKind::contention ? "contention" : "deterministic") + "," +
               fd(p.data_rate) + "," + std::to_string(p.phy_header) + "," +
               std::to_string(p.mac_header) + "," + std::to_string(p.mac_footer) + "\n";
    }
    return out;
}

inline std::string profiles_table(const ProfileMap& profiles) {
    std::string out = pad("id", 16) + pad("kind", 15) + pad("rate (bps)", 14) +
                      pad("hdr+ftr (B)", 13) + "notes\n";
    for (const auto& [id, p] : profiles) {
        std::string notes;
        if (p.csma)
            notes = "be " + std::to_string(p.csma->be_min) + ".." + std::to_string(p.csma->be_max) +
                    ", slot " + fg(p.csma->slot_duration) + "s";
        if (p.deterministic)
            notes = "processing " + fg(p.deterministic->processing_delay) + "s";
        if (p.buffer_capacity)
            notes += ", buffer " + std::to_string(*p.buffer_capacity) + " bits";
        out += pad(id, 16) +
               pad(p.mac_kind == MacKind::contention ? "contention" : "deterministic", 15) +
               pad(fg(p.data_rate), 14) +
               pad(std::to_string(p.phy_header) + "+" + std::to_string(p.mac_header) + "+" +
                       std::to_string(p.mac_footer),
                   13) +
               notes + "\n";
    }
    return out;
}

inline std::string profiles_json_str(const ProfileMap& profiles) {
    json j;
    j["command"] = "profiles";
    j["profiles"] = json::array();
    for (const auto& [id, p] : profiles) {
        json pj{{"id", id},
                {"name", p.name},
                {"kind", p.mac_kind == MacKind::contention ? "contention" : "deterministic"},
                {"data_rate_bps", p.data_rate},
                {"phy_header_B", p.phy_header},
                {"mac_header_B", p.mac_header},
                {"mac_footer_B", p.mac_footer}};
        if (p.buffer_capacity) pj["buffer_capacity_bits"] = *p.buffer_capacity;
        pj["oversize_policy"] = p.oversize_policy == OversizePolicy::drop ? "drop" : "accept";
        if (p.csma) {
            const CsmaParams& c = *p.csma;
            pj["csma"] = {{"be_min", c.be_min},
                          {"be_max", c.be_max},
                          {"max_backoffs", c.max_backoffs},
                          {"max_retries", c.max_retries},
                          {"slot_duration_s", c.slot_duration},
                          {"cca_duration_s", c.cca_duration},
                          {"turnaround_s", c.turnaround},
                          {"sifs_s", c.sifs},
                          {"lifs_s", c.lifs},
                          {"sifs_frame_threshold_B", c.sifs_frame_threshold},
                          {"ack_enabled", c.ack_enabled}};
            if (c.ack_frame_bytes) pj["csma"]["ack_frame_bytes_B"] = *c.ack_frame_bytes;
        }
        if (p.deterministic) {
            const DeterministicLinkParams& d = *p.deterministic;
            pj["deterministic"] = {{"processing_delay_s", d.processing_delay},
                                   {"propagation_delay_s", d.propagation_delay},
                                   {"retry_limit", d.retry_limit}};
        }
        if (!p.metadata.empty()) pj["metadata"] = p.metadata;
        j["profiles"].push_back(pj);
    }
    return j.dump(2) + "\n";
}

}  // namespace medlink::report
