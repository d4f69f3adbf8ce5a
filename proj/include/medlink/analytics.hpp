#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <medlink/errors.hpp>
#include <medlink/model.hpp>

// Closed-form delay math for contention and deterministic links: per-link
// delay components, contention probabilities, and expected backoff delay in
// a "literal" mode (the printed construction, inconsistencies included) and a
// "corrected" mode backed by an exactly solvable contention model.

namespace medlink::analytics {

struct DelayBreakdown {
    double t_bo = 0.0;
    double t_data = 0.0;
    double t_ta = 0.0;
    double t_ack = 0.0;
    double t_ifs = 0.0;
    double total = 0.0;  // always the sum of the five components
};

inline DelayBreakdown make_breakdown(double bo, double data, double ta, double ack, double ifs) {
    return {bo, data, ta, ack, ifs, bo + data + ta + ack + ifs};
}

inline double t_data(const TechnologyProfile& p, int payload_bytes) {
    return 8.0 * (p.phy_header + p.mac_header + payload_bytes + p.mac_footer) / p.data_rate;
}

inline double t_ack(const TechnologyProfile& p) {
    if (p.csma && p.csma->ack_frame_bytes)
        return 8.0 * *p.csma->ack_frame_bytes / p.data_rate;
    return 8.0 * (p.phy_header + p.mac_header + p.mac_footer) / p.data_rate;
}

inline double t_bo(double bo_slots, const CsmaParams& prm) {
    return bo_slots * prm.slot_duration;
}

// mean of the uniform backoff window [0, 2^be - 1]
inline double expected_bo_slots(int be) {
    return (std::ldexp(1.0, be) - 1.0) / 2.0;
}

inline double ifs_for(const CsmaParams& prm, const TechnologyProfile& p, int payload_bytes) {
    const int mpdu = p.mac_header + payload_bytes + p.mac_footer;
    return mpdu <= prm.sifs_frame_threshold ? prm.sifs : prm.lifs;
}

inline DelayBreakdown link_delay(const TechnologyProfile& p, int payload_bytes, double bo_slots,
                                 bool ack_enabled) {
    if (p.mac_kind != MacKind::contention || !p.csma)
        throw WrongKind("link_delay needs a contention-kind profile, got \"" + p.id + "\"");
    const CsmaParams& prm = *p.csma;
    return make_breakdown(t_bo(bo_slots, prm), t_data(p, payload_bytes),
                          ack_enabled ? prm.turnaround : 0.0, ack_enabled ? t_ack(p) : 0.0,
                          ifs_for(prm, p, payload_bytes));
}

// serialization plus processing/propagation; the fixed pipeline delays ride
// in the t_ifs slot so the five-component shape is preserved
inline DelayBreakdown deterministic_link_delay(const TechnologyProfile& p, int payload_bytes) {
    if (p.mac_kind != MacKind::deterministic || !p.deterministic)
        throw WrongKind("deterministic_link_delay needs a deterministic-kind profile, got \"" +
                        p.id + "\"");
    const DeterministicLinkParams& d = *p.deterministic;
    return make_breakdown(0.0, t_data(p, payload_bytes), 0.0, 0.0,
                          d.processing_delay + d.propagation_delay);
}

inline double p_backoff_period(int be) {
    return std::ldexp(1.0, -be);  // 1 / 2^be
}

// p (1-p)^(be-2) with p = 1/num_devices; 0^0 is 1 for the single-device,
// be = 2 corner
inline double p_tss(int num_devices, int be) {
    const double p = 1.0 / num_devices;
    if (num_devices == 1 && be == 2) return 1.0;
    return p * std::pow(1.0 - p, be - 2);
}

// sum_{n=0}^{2^be - 1} n (1/2^be) p_tss; kept as printed, so values above 1
// are possible and returned as-is
inline double p_tde_literal(int be, int num_devices) {
    const double w = std::ldexp(1.0, be);
    const double success = p_tss(num_devices, be);
    double acc = 0.0;
    for (int n = 0; n < static_cast<int>(w); ++n) acc += n * (1.0 / w) * success;
    return acc;
}

// the printed fraction: split numerator sums over 0..3 and 4..11 with the bare
// p factor, denominator the literal time-delay event sum; units are backoff
// slots, and only the printed exponent is defined
inline double expected_time_delay_literal(int be, int num_devices) {
    if (be != 3)
        throw UnsupportedBE("literal expected delay is only defined for be = 3, got be = " +
                            std::to_string(be));
    const double w = std::ldexp(1.0, be);
    const double p = 1.0 / num_devices;
    double numerator = 0.0;
    for (int n = 0; n <= 3; ++n) numerator += n * (1.0 / w) * p;
    for (int n = 4; n <= 11; ++n) numerator += n * (1.0 / w) * p;
    return numerator / p_tde_literal(be, num_devices);
}

namespace detail {

// Contention model solved exactly: every device in a group draws a slot
// uniformly in [0, 2^be - 1]; devices holding a unique value transmit in slot
// order, devices sharing a value collide and re-draw as a group with be
// escalated (capped at be_max). f(g, be) is the expected cumulative drawn
// slots for a tagged device entering a round in a group of g.
inline double group_expectation(int g, int be, int be_max, std::vector<std::vector<double>>& memo);

// P[tied of the `others` devices match the tagged draw] for window width w.
// Exact product for small counts, log-space beyond to dodge overflow/underflow.
inline double tie_probability(int others, int tied, double w) {
    if (others <= 40) {
        double c = 1.0;
        for (int i = 0; i < tied; ++i) c = c * (others - i) / (i + 1);
        return c * std::pow(1.0 / w, tied) * std::pow((w - 1.0) / w, others - tied);
    }
    double lp = std::lgamma(others + 1.0) - std::lgamma(tied + 1.0) -
                std::lgamma(others - tied + 1.0) - tied * std::log(w) +
                (others - tied) * std::log((w - 1.0) / w);
    return std::exp(lp);
}

inline double group_expectation(int g, int be, int be_max,
                                std::vector<std::vector<double>>& memo) {
    double& slot = memo[be][g];
    if (slot >= 0.0) return slot;
    const double w = std::ldexp(1.0, be);
    const double mean_draw = (w - 1.0) / 2.0;
    if (g == 1) return slot = mean_draw;

    const int next_be = std::min(be + 1, be_max);
    if (w == 1.0) {
        // zero-width window: the whole group always collides
        if (next_be == be) return slot = std::numeric_limits<double>::infinity();
        return slot = group_expectation(g, next_be, be_max, memo);
    }
    double acc = mean_draw;
    double self_coeff = 0.0;
    for (int tied = 1; tied <= g - 1; ++tied) {
        const double p = tie_probability(g - 1, tied, w);
        if (next_be == be && tied + 1 == g) {
            self_coeff = p;  // f(g, be) recurs into itself; fold algebraically
        } else {
            acc += p * group_expectation(tied + 1, next_be, be_max, memo);
        }
    }
    return slot = acc / (1.0 - self_coeff);
}

}  // namespace detail

// Expected cumulative backoff delay (seconds) until a tagged device transmits
// successfully under the model above. Exact; no sampling involved.
inline double expected_time_delay_corrected(const CsmaParams& prm,
                                            const ContentionConfig& contention) {
    const int d = contention.num_end_devices;
    if (d < 1) throw Error("num_end_devices must be >= 1");
    if (prm.be_min < 0 || prm.be_min > prm.be_max || prm.be_max > 8)
        throw Error("need 0 <= be_min <= be_max <= 8");
    if (d == 1) return t_bo(expected_bo_slots(prm.be_min), prm);
    // the recursion touches O(be_span * d^2) states
    const long long states = static_cast<long long>(prm.be_max - prm.be_min + 1) *
                             static_cast<long long>(d) * static_cast<long long>(d);
    if (states > 10'000'000LL)
        throw IntractableEnumeration("contention enumeration over " + std::to_string(states) +
                                     " states exceeds the exact-solve bound");
    std::vector<std::vector<double>> memo(prm.be_max + 1, std::vector<double>(d + 1, -1.0));
    return detail::group_expectation(d, prm.be_min, prm.be_max, memo) * prm.slot_duration;
}

struct ContentionProbabilities {
    double p_backoff_period = 0.0;
    double p_tss = 0.0;
    double p_tde = 0.0;
    double expected_delay_slots = 0.0;
    bool out_of_range = false;  // literal construction left [0, 1]
};

inline ContentionProbabilities contention_probabilities(int be, int num_devices) {
    ContentionProbabilities cp;
    cp.p_backoff_period = p_backoff_period(be);
    cp.p_tss = p_tss(num_devices, be);
    cp.p_tde = p_tde_literal(be, num_devices);
    cp.expected_delay_slots = be == 3 ? expected_time_delay_literal(be, num_devices)
                                      : expected_bo_slots(be);
    cp.out_of_range = !(cp.p_tss >= 0.0 && cp.p_tss <= 1.0) ||
                      !(cp.p_tde >= 0.0 && cp.p_tde <= 1.0) ||
                      !std::isfinite(cp.expected_delay_slots);
    return cp;
}

}  // namespace medlink::analytics
