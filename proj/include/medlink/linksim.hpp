#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include <medlink/analytics.hpp>
#include <medlink/model.hpp>
#include <medlink/path_delay.hpp>
#include <medlink/rng.hpp>

// Seeded discrete-event simulation of single links and whole paths.
//
// Contention links run unslotted CSMA/CA per device: draw a backoff uniform
// in [0, 2^BE - 1] slots, sense for cca_duration, escalate BE and re-draw on a
// busy channel, drop after max_backoffs failures. Overlapping data frames
// collide (no capture); acknowledged traffic retries a collided frame up to
// max_retries with BE escalated, unacknowledged traffic counts it delivered.
// Acks themselves never collide: the channel stays busy through the
// turnaround+ack window of a clean frame, so contenders defer.
//
// The recorded DelayBreakdown is the model decomposition: cumulative drawn
// backoff time plus the final attempt's data/turnaround/ack/IFS components.
// CCA time and queueing shift the wall clock (and therefore downstream
// arrival times) but are not delay components.

namespace medlink::sim {

enum class EventKind { arrival, backoff_expiry, cca_start, cca_result, tx_end, ack_timeout, ifs_end };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::arrival;
    int device = 0;
    long packet = 0;

    friend bool operator<(const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.device != b.device) return a.device < b.device;
        return a.packet < b.packet;
    }
};

struct LinkSampleSet {
    std::vector<analytics::DelayBreakdown> samples;  // delivered packets, completion order
    std::vector<long> packet_ids;                    // parallel to samples
    std::vector<double> completion_times;            // parallel to samples
    long offered = 0;
    long dropped = 0;
    long collisions = 0;           // collided transmission attempts
    long collided_deliveries = 0;  // ack-off frames delivered despite a collision
    std::map<int, long> retries_histogram;  // retransmissions used by delivered packets
};

struct PathSampleSet {
    std::vector<composer::PathDelayReport> per_packet;  // ascending packet id
    std::vector<long> packet_ids;                       // parallel to per_packet
    std::vector<LinkSampleSet> per_link;
};

struct ArrivalSpec {
    double time = 0.0;
    int payload = 0;
    long id = 0;
};

namespace detail {

class CsmaEngine {
  public:
    CsmaEngine(const TechnologyProfile& profile, std::uint64_t link_seed,
               std::vector<std::vector<ArrivalSpec>> per_device_arrivals,
               std::vector<bool> tracked)
        : prof_(profile), prm_(*profile.csma), tracked_(std::move(tracked)) {
        devices_.reserve(per_device_arrivals.size());
        for (std::size_t d = 0; d < per_device_arrivals.size(); ++d) {
            devices_.push_back(
                Device(rng::Xoshiro256ss(rng::derive(link_seed, rng::StreamTag::device, d))));
            for (const ArrivalSpec& a : per_device_arrivals[d])
                schedule_.insert({a.time, EventKind::arrival, static_cast<int>(d), a.id});
            for (const ArrivalSpec& a : per_device_arrivals[d])
                devices_.back().pending.emplace(a.id, a);
        }
    }

    LinkSampleSet run() {
        while (!schedule_.empty()) {
            Event ev = *schedule_.begin();
            schedule_.erase(schedule_.begin());
            dispatch(ev);
        }
        return std::move(out_);
    }

  private:
    struct Packet {
        ArrivalSpec arrival;
        int nb = 0;
        int be = 0;
        int retries = 0;
        double bo_slots = 0.0;  // cumulative drawn slots
        bool collided = false;
    };

    struct Device {
        explicit Device(rng::Xoshiro256ss s) : stream(s) {}

        rng::Xoshiro256ss stream;
        std::map<long, ArrivalSpec> pending;  // not yet arrived, keyed by id
        std::deque<ArrivalSpec> queue;
        bool serving = false;
        bool on_air = false;
        double tx_end_time = 0.0;
        bool in_ack_window = false;
        double ack_end_time = 0.0;
        bool cca_pending = false;
        bool cca_busy_seen = false;
        double cca_end = 0.0;
        Packet cur;
    };

    // Occupancy intervals are half-open: a frame or ack window ending exactly
    // when a CCA starts leaves the channel idle for it.
    bool channel_busy(double now) const {
        for (const Device& d : devices_) {
            if (d.on_air && d.tx_end_time > now) return true;
            if (d.in_ack_window && d.ack_end_time > now) return true;
        }
        return false;
    }

    void dispatch(const Event& ev) {
        Device& dev = devices_[ev.device];
        switch (ev.kind) {
            case EventKind::arrival: {
                ArrivalSpec a = dev.pending.at(ev.packet);
                dev.pending.erase(ev.packet);
                if (oversize(a.payload)) {
                    if (tracked_[ev.device]) ++out_.dropped;
                    break;
                }
                dev.queue.push_back(a);
                if (!dev.serving) begin_service(ev.device, ev.time);
                break;
            }
            case EventKind::backoff_expiry:
                schedule_.insert({ev.time, EventKind::cca_start, ev.device, ev.packet});
                break;
            case EventKind::cca_start:
                dev.cca_pending = true;
                dev.cca_busy_seen = channel_busy(ev.time);
                dev.cca_end = ev.time + prm_.cca_duration;
                schedule_.insert({dev.cca_end, EventKind::cca_result, ev.device, ev.packet});
                break;
            case EventKind::cca_result:
                dev.cca_pending = false;
                if (dev.cca_busy_seen) {
                    dev.cur.nb += 1;
                    dev.cur.be = std::min(dev.cur.be + 1, prm_.be_max);
                    if (dev.cur.nb > prm_.max_backoffs) drop_current(ev.device, ev.time);
                    else start_backoff(ev.device, ev.time);
                } else {
                    begin_transmission(ev.device, ev.time);
                }
                break;
            case EventKind::tx_end: {
                dev.on_air = false;
                if (dev.cur.collided && tracked_[ev.device]) ++out_.collisions;
                if (prm_.ack_enabled) {
                    const double ack_end = ev.time + prm_.turnaround + analytics::t_ack(prof_);
                    if (!dev.cur.collided) {
                        // channel holds through the turnaround+ack window
                        dev.in_ack_window = true;
                        dev.ack_end_time = ack_end;
                    }
                    schedule_.insert({ack_end, EventKind::ack_timeout, ev.device, ev.packet});
                } else {
                    if (dev.cur.collided && tracked_[ev.device]) ++out_.collided_deliveries;
                    schedule_.insert({ev.time + analytics::ifs_for(prm_, prof_, dev.cur.arrival.payload),
                                      EventKind::ifs_end, ev.device, ev.packet});
                }
                break;
            }
            case EventKind::ack_timeout:
                if (dev.cur.collided) {
                    dev.cur.collided = false;
                    dev.cur.retries += 1;
                    if (dev.cur.retries > prm_.max_retries) {
                        drop_current(ev.device, ev.time);
                    } else {
                        dev.cur.be = std::min(dev.cur.be + 1, prm_.be_max);
                        dev.cur.nb = 0;
                        start_backoff(ev.device, ev.time);
                    }
                } else {
                    dev.in_ack_window = false;
                    schedule_.insert({ev.time + analytics::ifs_for(prm_, prof_, dev.cur.arrival.payload),
                                      EventKind::ifs_end, ev.device, ev.packet});
                }
                break;
            case EventKind::ifs_end:
                deliver(ev.device, ev.time);
                break;
        }
    }

    bool oversize(int payload) const {
        return prof_.buffer_capacity && prof_.oversize_policy == OversizePolicy::drop &&
               frame_bits(prof_, payload) > *prof_.buffer_capacity;
    }

    void begin_service(int d, double now) {
        Device& dev = devices_[d];
        dev.serving = true;
        dev.cur = Packet{dev.queue.front()};
        dev.queue.pop_front();
        dev.cur.be = prm_.be_min;
        start_backoff(d, now);
    }

    void start_backoff(int d, double now) {
        Device& dev = devices_[d];
        const std::uint64_t window = 1ULL << dev.cur.be;
        const double slots = static_cast<double>(dev.stream.uniform(window));
        dev.cur.bo_slots += slots;
        schedule_.insert({now + slots * prm_.slot_duration, EventKind::backoff_expiry, d,
                          dev.cur.arrival.id});
    }

    void begin_transmission(int d, double now) {
        Device& dev = devices_[d];
        for (Device& other : devices_) {
            if (&other != &dev && other.on_air && other.tx_end_time > now) {
                dev.cur.collided = true;
                other.cur.collided = true;
            }
        }
        // a transmission starting mid-window spoils every unfinished CCA
        for (Device& other : devices_)
            if (other.cca_pending && other.cca_end > now) other.cca_busy_seen = true;
        dev.on_air = true;
        dev.tx_end_time = now + analytics::t_data(prof_, dev.cur.arrival.payload);
        schedule_.insert({dev.tx_end_time, EventKind::tx_end, d, dev.cur.arrival.id});
    }

    void deliver(int d, double now) {
        Device& dev = devices_[d];
        if (tracked_[d]) {
            const bool acked = prm_.ack_enabled;
            out_.samples.push_back(analytics::make_breakdown(
                dev.cur.bo_slots * prm_.slot_duration,
                analytics::t_data(prof_, dev.cur.arrival.payload),
                acked ? prm_.turnaround : 0.0, acked ? analytics::t_ack(prof_) : 0.0,
                analytics::ifs_for(prm_, prof_, dev.cur.arrival.payload)));
            out_.packet_ids.push_back(dev.cur.arrival.id);
            out_.completion_times.push_back(now);
            out_.retries_histogram[dev.cur.retries] += 1;
        }
        next_packet(d, now);
    }

    void drop_current(int d, double now) {
        if (tracked_[d]) ++out_.dropped;
        next_packet(d, now);
    }

    void next_packet(int d, double now) {
        Device& dev = devices_[d];
        dev.serving = false;
        if (!dev.queue.empty()) begin_service(d, now);
    }

    const TechnologyProfile& prof_;
    const CsmaParams& prm_;
    std::vector<bool> tracked_;
    std::vector<Device> devices_;
    std::multiset<Event> schedule_;
    LinkSampleSet out_;
};

inline LinkSampleSet run_csma(const TechnologyProfile& profile,
                              std::vector<std::vector<ArrivalSpec>> arrivals,
                              std::vector<bool> tracked, std::uint64_t link_seed) {
    if (profile.mac_kind != MacKind::contention || !profile.csma)
        throw WrongKind("csma simulation needs a contention-kind profile, got \"" + profile.id +
                        "\"");
    long offered = 0;
    for (std::size_t d = 0; d < arrivals.size(); ++d)
        if (tracked[d]) offered += static_cast<long>(arrivals[d].size());
    CsmaEngine engine(profile, link_seed, std::move(arrivals), std::move(tracked));
    LinkSampleSet out = engine.run();
    out.offered = offered;
    return out;
}

}  // namespace detail

// Evenly spaced arrivals for one source device.
inline std::vector<ArrivalSpec> traffic_arrivals(const TrafficSpec& t, int device, int num_devices) {
    std::vector<ArrivalSpec> out;
    out.reserve(t.packet_count);
    for (int k = 0; k < t.packet_count; ++k)
        out.push_back({k * t.inter_arrival, t.payload,
                       static_cast<long>(k) * num_devices + device});
    return out;
}

// num_end_devices synchronized sources sharing one contention domain.
inline LinkSampleSet simulate_csma_link(const TechnologyProfile& profile, const TrafficSpec& traffic,
                                        const ContentionConfig& contention, std::uint64_t seed) {
    const int d = contention.num_end_devices;
    std::vector<std::vector<ArrivalSpec>> arrivals;
    arrivals.reserve(d);
    for (int i = 0; i < d; ++i) arrivals.push_back(traffic_arrivals(traffic, i, d));
    return detail::run_csma(profile, std::move(arrivals), std::vector<bool>(d, true), seed);
}

// FIFO store-and-forward server: serialization occupies the server, the fixed
// processing+propagation tail is pipelined.
inline LinkSampleSet simulate_deterministic_link(const TechnologyProfile& profile,
                                                 std::vector<ArrivalSpec> arrivals,
                                                 std::uint64_t /*seed*/ = 0) {
    if (profile.mac_kind != MacKind::deterministic || !profile.deterministic)
        throw WrongKind("deterministic simulation needs a deterministic-kind profile, got \"" +
                        profile.id + "\"");
    std::sort(arrivals.begin(), arrivals.end(), [](const ArrivalSpec& a, const ArrivalSpec& b) {
        return a.time != b.time ? a.time < b.time : a.id < b.id;
    });
    LinkSampleSet out;
    out.offered = static_cast<long>(arrivals.size());
    const DeterministicLinkParams& det = *profile.deterministic;
    double server_free = 0.0;
    for (const ArrivalSpec& a : arrivals) {
        if (profile.buffer_capacity && profile.oversize_policy == OversizePolicy::drop &&
            frame_bits(profile, a.payload) > *profile.buffer_capacity) {
            ++out.dropped;
            continue;
        }
        const double start = std::max(a.time, server_free);
        const double serialization = analytics::t_data(profile, a.payload);
        server_free = start + serialization;
        out.samples.push_back(analytics::deterministic_link_delay(profile, a.payload));
        out.packet_ids.push_back(a.id);
        out.completion_times.push_back(server_free + det.processing_delay + det.propagation_delay);
        out.retries_histogram[0] += 1;
    }
    return out;
}

// Chains the path's links store-and-forward: a packet enters link i+1 at its
// link-i completion time; a drop removes it from everything downstream.
inline PathSampleSet simulate_path(const PathSpec& path, const TrafficSpec& traffic,
                                   std::uint64_t seed, const ProfileMap& profiles) {
    PathSampleSet out;
    if (path.links.empty()) return out;
    std::vector<std::map<long, std::pair<double, double>>> delivered;  // id -> (total, completion)

    std::vector<ArrivalSpec> incoming;  // arrivals into the current link
    for (std::size_t i = 0; i < path.links.size(); ++i) {
        const LinkSpec& link = path.links[i];
        auto pit = profiles.find(link.profile_id);
        if (pit == profiles.end()) throw UnknownProfile(link.profile_id);
        const TechnologyProfile& prof = pit->second;
        const std::uint64_t link_seed = rng::derive(seed, rng::StreamTag::link, i + 1);

        LinkSampleSet set;
        if (prof.mac_kind == MacKind::contention) {
            const int d = link.contention ? link.contention->num_end_devices : 1;
            std::vector<std::vector<ArrivalSpec>> arrivals;
            std::vector<bool> tracked;
            if (i == 0) {
                // every source device carries path traffic
                for (int dev = 0; dev < d; ++dev) {
                    arrivals.push_back(traffic_arrivals(traffic, dev, d));
                    tracked.push_back(true);
                }
            } else {
                // device 0 forwards the path stream; the rest are background
                // contenders with the same traffic pattern
                arrivals.push_back(incoming);
                tracked.push_back(true);
                for (int dev = 1; dev < d; ++dev) {
                    std::vector<ArrivalSpec> bg = traffic_arrivals(traffic, dev, d);
                    for (auto& a : bg) a.id += (1LL << 40);  // keep ids disjoint
                    arrivals.push_back(std::move(bg));
                    tracked.push_back(false);
                }
            }
            set = detail::run_csma(prof, std::move(arrivals), std::move(tracked), link_seed);
        } else {
            std::vector<ArrivalSpec> arrivals =
                i == 0 ? traffic_arrivals(traffic, 0, 1) : incoming;
            set = simulate_deterministic_link(prof, std::move(arrivals), link_seed);
        }

        incoming.clear();
        std::map<long, std::pair<double, double>> by_id;
        for (std::size_t j = 0; j < set.samples.size(); ++j) {
            by_id.emplace(set.packet_ids[j],
                          std::make_pair(set.samples[j].total, set.completion_times[j]));
            incoming.push_back({set.completion_times[j], traffic.payload, set.packet_ids[j]});
        }
        delivered.push_back(std::move(by_id));
        out.per_link.push_back(std::move(set));
    }

    // packets that survived every link, ascending id
    for (const auto& [id, last] : delivered.back()) {
        double d[3] = {0.0, 0.0, 0.0};
        bool complete = true;
        for (std::size_t i = 0; i < delivered.size(); ++i) {
            auto it = delivered[i].find(id);
            if (it == delivered[i].end()) { complete = false; break; }
            d[i] = it->second.first;
        }
        if (!complete) continue;
        out.packet_ids.push_back(id);
        out.per_packet.push_back(composer::make_path_report(d[0], d[1], d[2]));
    }
    return out;
}

}  // namespace medlink::sim
