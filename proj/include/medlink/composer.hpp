#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <medlink/analytics.hpp>
#include <medlink/linksim.hpp>
#include <medlink/model.hpp>
#include <medlink/path_delay.hpp>
#include <medlink/scenario_io.hpp>

// Aggregation: analytic end-to-end composition, sample statistics,
// analytic-vs-simulated comparison, parameter sweeps.

namespace medlink::composer {

struct DelayStats {
    long count = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance
    double min = 0.0;
    double max = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double std_error = 0.0;
};

// One-pass mean/variance, nearest-rank percentiles on the sorted sample.
inline DelayStats summarize(const std::vector<double>& samples) {
    if (samples.empty()) throw EmptySamples("summarize needs at least one sample");
    DelayStats st;
    st.count = static_cast<long>(samples.size());

    double mean = 0.0, m2 = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    long n = 0;
    for (double x : samples) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }
    st.mean = mean;
    st.variance = n > 1 ? std::max(m2, 0.0) / (n - 1) : 0.0;
    st.min = mn;
    st.max = mx;
    st.std_error = std::sqrt(st.variance / n);

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    auto nearest_rank = [&](int pct) {
        long idx = static_cast<long>(
            std::ceil(static_cast<double>(pct * static_cast<long long>(n)) / 100.0));
        idx = std::clamp(idx, 1L, n);
        return sorted[static_cast<std::size_t>(idx - 1)];
    };
    st.p50 = nearest_rank(50);
    st.p90 = nearest_rank(90);
    st.p99 = nearest_rank(99);
    return st;
}

// Per-link closed-form delays composed end to end. Contention links price the
// backoff either as the plain first-window mean or as the literal printed
// expectation (be = 3 only).
inline PathDelayReport analytic_path_delay(const PathSpec& path, const TrafficSpec& traffic,
                                           ContentionMode mode, const ProfileMap& profiles) {
    double d[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < path.links.size() && i < 3; ++i) {
        const LinkSpec& link = path.links[i];
        auto it = profiles.find(link.profile_id);
        if (it == profiles.end()) throw UnknownProfile(link.profile_id);
        const TechnologyProfile& prof = it->second;
        if (prof.mac_kind == MacKind::contention) {
            const CsmaParams& c = *prof.csma;
            const int devices = link.contention ? link.contention->num_end_devices : 1;
            const double bo = mode == ContentionMode::expected_backoff
                                  ? analytics::expected_bo_slots(c.be_min)
                                  : analytics::expected_time_delay_literal(c.be_min, devices);
            d[i] = analytics::link_delay(prof, traffic.payload, bo, c.ack_enabled).total;
        } else {
            d[i] = analytics::deterministic_link_delay(prof, traffic.payload).total;
        }
    }
    return make_path_report(d[0], d[1], d[2]);
}

struct LinkComparison {
    double analytic = 0.0;
    DelayStats simulated;
    double error = 0.0;    // relative when analytic > 0, absolute otherwise
    bool absolute = false;
    bool flagged = false;  // error exceeded the threshold
};

struct ComparisonReport {
    std::vector<LinkComparison> per_link;
    LinkComparison path;
    double threshold = 0.05;
};

namespace detail {

inline LinkComparison compare_one(double analytic, const std::vector<double>& samples,
                                  double threshold) {
    LinkComparison c;
    c.analytic = analytic;
    c.simulated = summarize(samples);
    if (analytic > 0.0) {
        c.error = std::abs(analytic - c.simulated.mean) / analytic;
    } else {
        c.error = std::abs(analytic - c.simulated.mean);
        c.absolute = true;
    }
    c.flagged = c.error > threshold;
    return c;
}

}  // namespace detail

inline ComparisonReport compare(const PathDelayReport& analytic, const sim::PathSampleSet& simulated,
                                double threshold = 0.05) {
    if (simulated.per_link.empty() || simulated.per_link.size() > 3)
        throw ShapeMismatch("expected 1..3 links, got " +
                            std::to_string(simulated.per_link.size()));
    ComparisonReport rep;
    rep.threshold = threshold;
    const double analytic_link[3] = {analytic.d1, analytic.d2, analytic.d3};
    for (std::size_t i = 0; i < simulated.per_link.size(); ++i) {
        std::vector<double> totals;
        totals.reserve(simulated.per_link[i].samples.size());
        for (const auto& b : simulated.per_link[i].samples) totals.push_back(b.total);
        rep.per_link.push_back(detail::compare_one(analytic_link[i], totals, threshold));
    }
    std::vector<double> path_totals;
    path_totals.reserve(simulated.per_packet.size());
    for (const auto& r : simulated.per_packet) path_totals.push_back(r.d_total);
    rep.path = detail::compare_one(analytic.d_total, path_totals, threshold);
    return rep;
}

// One simulation run per replication, substreams split by replication index.
// Replications are independent, so they fan out across threads; results are
// collected by index, never by completion order.
inline std::vector<sim::PathSampleSet> simulate_replications(const PathSpec& path,
                                                             const TrafficSpec& traffic,
                                                             std::uint64_t seed, int replications,
                                                             const ProfileMap& profiles) {
    std::vector<sim::PathSampleSet> out;
    out.reserve(replications);
    if (replications == 1) {
        out.push_back(sim::simulate_path(path, traffic,
                                         rng::derive(seed, rng::StreamTag::replication, 0),
                                         profiles));
        return out;
    }
    std::vector<std::future<sim::PathSampleSet>> futures;
    futures.reserve(replications);
    for (int r = 0; r < replications; ++r)
        futures.push_back(std::async(std::launch::async, [&, r] {
            return sim::simulate_path(path, traffic,
                                      rng::derive(seed, rng::StreamTag::replication, r), profiles);
        }));
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

// Merge by replication index; packet ids are offset by a fixed stride so the
// merged set stays uniquely keyed.
inline sim::PathSampleSet merge_replications(const std::vector<sim::PathSampleSet>& reps,
                                             long id_stride) {
    sim::PathSampleSet merged;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const sim::PathSampleSet& one = reps[r];
        const long offset = static_cast<long>(r) * id_stride;
        for (std::size_t i = 0; i < one.per_packet.size(); ++i) {
            merged.per_packet.push_back(one.per_packet[i]);
            merged.packet_ids.push_back(one.packet_ids[i] + offset);
        }
        if (merged.per_link.size() < one.per_link.size())
            merged.per_link.resize(one.per_link.size());
        for (std::size_t l = 0; l < one.per_link.size(); ++l) {
            sim::LinkSampleSet& dst = merged.per_link[l];
            const sim::LinkSampleSet& src = one.per_link[l];
            dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
            for (long id : src.packet_ids) dst.packet_ids.push_back(id + offset);
            dst.completion_times.insert(dst.completion_times.end(), src.completion_times.begin(),
                                        src.completion_times.end());
            dst.offered += src.offered;
            dst.dropped += src.dropped;
            dst.collisions += src.collisions;
            dst.collided_deliveries += src.collided_deliveries;
            for (const auto& [k, v] : src.retries_histogram) dst.retries_histogram[k] += v;
        }
    }
    return merged;
}

struct SweepRow {
    double value = 0.0;  // canonical units
    std::string path_id;
    PathDelayReport analytic;
    std::optional<DelayStats> simulated_total;  // present when mode reaches simulate
};

// One row per (value, path), rows in input order.
inline std::vector<SweepRow> sweep(const Scenario& scenario, std::string_view parameter,
                                   const std::vector<double>& values,
                                   ContentionMode mode = ContentionMode::expected_backoff) {
    NumericParameter param = resolve_numeric_parameter(scenario, parameter);
    std::vector<SweepRow> rows;
    for (double v : values) {
        Scenario sc = scenario;
        param.apply(sc, v);
        if (auto violations = validate_scenario(sc); !violations.empty())
            throw ValidationError(std::move(violations));
        for (std::size_t p = 0; p < sc.paths.size(); ++p) {
            const PathSpec& path = sc.paths[p];
            SweepRow row;
            row.value = v;
            row.path_id = path.id;
            row.analytic = analytic_path_delay(path, sc.traffic, mode, sc.profiles);
            if (sc.mode != RunMode::analytic) {
                auto reps = simulate_replications(
                    path, sc.traffic, rng::derive(sc.seed, rng::StreamTag::path, p),
                    sc.replications, sc.profiles);
                std::vector<double> totals;
                for (const auto& rep : reps)
                    for (const auto& r : rep.per_packet) totals.push_back(r.d_total);
                row.simulated_total = summarize(totals);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace medlink::composer
