#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <medlink/analytics.hpp>
#include <medlink/model.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace medlink;
using namespace medlink::analytics;

namespace {

const TechnologyProfile& zb() { return builtin_profiles().at("zigbee"); }

// Independent brute-force summation of the literal time-delay construction.
// Kept separate from the library so the two routes can disagree.
double oracle_p_tde(int be, int d) {
    const double w = std::pow(2.0, be);
    const double p = 1.0 / d;
    double acc = 0.0;
    for (int n = 0; n < static_cast<int>(w); ++n)
        acc += n * (1.0 / w) * (p * std::pow(1.0 - p, be - 2));
    return acc;
}

double oracle_expected_literal(int d) {
    const double w = 8.0;  // BE = 3
    const double p = 1.0 / d;
    double num = 0.0;
    for (int n = 0; n <= 3; ++n) num += n * (1.0 / w) * p;
    for (int n = 4; n <= 11; ++n) num += n * (1.0 / w) * p;
    double den = 0.0;
    for (int n = 0; n <= 7; ++n) den += n * (1.0 / w) * p * (1.0 - p);
    return num / den;
}

// Exhaustive-enumeration oracle for the contention model: every device draws a
// slot uniformly in [0, 2^be - 1]; devices whose value is unique transmit in
// slot order, devices sharing a value collide and re-draw as a group.  Value
// iteration over expected cumulative slots per group size, run to fixpoint.
std::vector<double> oracle_group_expectation(int max_group, int be) {
    const int w = 1 << be;
    std::vector<double> f(max_group + 1, 0.0);
    for (int iter = 0; iter < 400; ++iter) {
        std::vector<double> next = f;
        for (int g = 1; g <= max_group; ++g) {
            // enumerate all w^g joint draws, track the tagged device 0
            long states = 1;
            for (int i = 0; i < g; ++i) states *= w;
            double acc = 0.0;
            for (long code = 0; code < states; ++code) {
                long c = code;
                int draw0 = static_cast<int>(c % w);
                c /= w;
                int tied = 0;
                for (int i = 1; i < g; ++i) {
                    if (static_cast<int>(c % w) == draw0) ++tied;
                    c /= w;
                }
                acc += draw0 + (tied > 0 ? f[tied + 1] : 0.0);
            }
            next[g] = acc / static_cast<double>(states);
        }
        f = next;
    }
    return f;
}

}  // namespace

TEST_CASE("data transmission time") {
    CHECK(t_data(zb(), 100) == doctest::Approx(3.744e-3).epsilon(1e-12));
    CHECK(t_data(zb(), 0) == t_ack(zb()));  // payload 0 reduces to the ack time

    TechnologyProfile flat;
    flat.id = "flat";
    flat.data_rate = 1e6;
    CHECK(t_data(flat, 125) == doctest::Approx(1.0e-3).epsilon(1e-12));
}

TEST_CASE("acknowledgement time") {
    CHECK(t_ack(zb()) == doctest::Approx(0.544e-3).epsilon(1e-12));

    TechnologyProfile bare;
    bare.id = "bare";
    bare.data_rate = 5e5;
    CHECK(t_ack(bare) == 0.0);

    TechnologyProfile doubled = zb();
    doubled.data_rate *= 2;
    CHECK(t_ack(doubled) == doctest::Approx(t_ack(zb()) / 2).epsilon(1e-12));
}

TEST_CASE("ack frame override replaces the literal header reuse") {
    TechnologyProfile p = zb();
    p.csma->ack_frame_bytes = 11;  // PHY 6 + imm-ack MPDU 5
    CHECK(t_ack(p) == doctest::Approx(11 * 8 / 250000.0).epsilon(1e-12));
}

TEST_CASE("backoff slots time") {
    const CsmaParams& prm = *zb().csma;
    CHECK(t_bo(0.0, prm) == 0.0);
    CHECK(t_bo(3.5, prm) == doctest::Approx(1.12e-3).epsilon(1e-12));
    CHECK(t_bo(7.0, prm) == doctest::Approx(2.24e-3).epsilon(1e-12));
}

TEST_CASE("expected backoff slots is the uniform window mean") {
    CHECK(expected_bo_slots(0) == 0.0);
    CHECK(expected_bo_slots(2) == 1.5);
    CHECK(expected_bo_slots(3) == 3.5);
}

TEST_CASE("contention link delay breakdown") {
    DelayBreakdown b = link_delay(zb(), 100, 3.5, true);
    CHECK(b.t_bo == doctest::Approx(1.12e-3).epsilon(1e-12));
    CHECK(b.t_data == doctest::Approx(3.744e-3).epsilon(1e-12));
    CHECK(b.t_ta == doctest::Approx(0.192e-3).epsilon(1e-12));
    CHECK(b.t_ack == doctest::Approx(0.544e-3).epsilon(1e-12));
    CHECK(b.t_ifs == doctest::Approx(0.64e-3).epsilon(1e-12));  // MPDU 111 B > threshold
    CHECK(b.total == doctest::Approx(6.24e-3).epsilon(1e-12));
    CHECK(b.total == b.t_bo + b.t_data + b.t_ta + b.t_ack + b.t_ifs);

    // short frame, no backoff, no ack: only t_data + sifs remain
    DelayBreakdown s = link_delay(zb(), 5, 0.0, false);
    CHECK(s.t_bo == 0.0);
    CHECK(s.t_ta == 0.0);
    CHECK(s.t_ack == 0.0);
    CHECK(s.t_ifs == zb().csma->sifs);  // MPDU 16 B <= 18 B threshold
    CHECK(s.total == s.t_data + zb().csma->sifs);

    CHECK_THROWS_AS(link_delay(builtin_profiles().at("umts"), 10, 0.0, true), WrongKind);
}

TEST_CASE("deterministic link delay") {
    TechnologyProfile fast;
    fast.id = "fast";
    fast.data_rate = 11e6;
    fast.mac_kind = MacKind::deterministic;
    fast.deterministic = DeterministicLinkParams{};
    DelayBreakdown b = deterministic_link_delay(fast, 1024);
    CHECK(b.t_data == doctest::Approx(8192 / 11e6).epsilon(1e-12));
    CHECK(b.t_bo == 0.0);
    CHECK(b.t_ta == 0.0);
    CHECK(b.t_ack == 0.0);

    TechnologyProfile umts = builtin_profiles().at("umts");
    umts.phy_header = umts.mac_header = umts.mac_footer = 0;
    DelayBreakdown u = deterministic_link_delay(umts, 0);
    CHECK(u.total == doctest::Approx(0.002).epsilon(1e-12));

    TechnologyProfile zero;
    zero.id = "zero";
    zero.data_rate = 1.0;
    zero.mac_kind = MacKind::deterministic;
    zero.deterministic = DeterministicLinkParams{};
    CHECK(deterministic_link_delay(zero, 0).total == 0.0);

    CHECK_THROWS_AS(deterministic_link_delay(zb(), 10), WrongKind);
}

TEST_CASE("backoff period probability") {
    CHECK(p_backoff_period(0) == 1.0);
    CHECK(p_backoff_period(3) == 0.125);
    CHECK(p_backoff_period(2) == 0.25);
    for (int be = 0; be <= 8; ++be)
        CHECK(p_backoff_period(be) * std::pow(2.0, be) == 1.0);
}

TEST_CASE("slot transmission success probability") {
    CHECK(p_tss(1, 2) == 1.0);
    CHECK(p_tss(2, 3) == 0.25);
    CHECK(p_tss(4, 2) == 0.25);
    // bounded on the modeled exponent range
    for (int d = 1; d <= 12; ++d)
        for (int be = 2; be <= 8; ++be) {
            double v = p_tss(d, be);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
}

TEST_CASE("literal time-delay event probability") {
    CHECK(p_tde_literal(0, 4) == 0.0);
    CHECK(p_tde_literal(3, 2) == doctest::Approx(0.875).epsilon(1e-13));
    CHECK(p_tde_literal(3, 2) == doctest::Approx(oracle_p_tde(3, 2)).epsilon(1e-13));
    // the weighted sum factors into window mean times success probability
    // (single device below be = 2 hits the printed form's 0^negative corner)
    for (int be : {0, 1, 2})
        for (int d : {2, 5})
            CHECK(p_tde_literal(be, d) ==
                  doctest::Approx(expected_bo_slots(be) * p_tss(d, be)).epsilon(1e-13));
    CHECK(p_tde_literal(2, 1) ==
          doctest::Approx(expected_bo_slots(2) * p_tss(1, 2)).epsilon(1e-13));
    // monotone in num_devices exactly as p_tss is
    CHECK(p_tde_literal(3, 2) / p_tss(2, 3) ==
          doctest::Approx(p_tde_literal(3, 5) / p_tss(5, 3)).epsilon(1e-13));
}

TEST_CASE("literal expected time delay") {
    double v = expected_time_delay_literal(3, 2);
    CHECK(v == doctest::Approx(4.714285714285714).epsilon(1e-13));
    CHECK(v == doctest::Approx(oracle_expected_literal(2)).epsilon(1e-13));
    CHECK(expected_time_delay_literal(3, 4) ==
          doctest::Approx(oracle_expected_literal(4)).epsilon(1e-13));
    // common p factor cancels: ratio times the residual (1-p) term is constant
    CHECK(expected_time_delay_literal(3, 2) * (1 - 0.5) ==
          doctest::Approx(expected_time_delay_literal(3, 4) * (1 - 0.25)).epsilon(1e-13));
    CHECK_THROWS_AS(expected_time_delay_literal(2, 2), UnsupportedBE);
    CHECK_THROWS_AS(expected_time_delay_literal(4, 2), UnsupportedBE);
    // single device drives the printed denominator to zero
    CHECK(std::isinf(expected_time_delay_literal(3, 1)));
}

TEST_CASE("corrected expected delay: single device is the pure window mean") {
    CsmaParams prm = *zb().csma;
    prm.be_min = prm.be_max = 3;
    double v = expected_time_delay_corrected(prm, ContentionConfig{1});
    CHECK(v == t_bo(expected_bo_slots(prm.be_min), prm));
    CHECK(v == doctest::Approx(1.12e-3).epsilon(1e-12));
}

TEST_CASE("corrected expected delay matches exhaustive enumeration") {
    CsmaParams prm = *zb().csma;
    prm.be_min = prm.be_max = 3;

    std::vector<double> f = oracle_group_expectation(3, 3);
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{2}) ==
          doctest::Approx(f[2] * prm.slot_duration).epsilon(1e-12));
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{3}) ==
          doctest::Approx(f[3] * prm.slot_duration).epsilon(1e-12));
    // frozen values: 4 slots and 40/9 slots at 0.32 ms per slot
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{2}) ==
          doctest::Approx(4.0 * 0.32e-3).epsilon(1e-12));
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{3}) ==
          doctest::Approx((40.0 / 9.0) * 0.32e-3).epsilon(1e-12));
}

TEST_CASE("corrected expected delay with escalating exponent") {
    CsmaParams prm = *zb().csma;  // be_min 2, be_max 3
    // device count 1 never escalates
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{1}) ==
          doctest::Approx(1.5 * prm.slot_duration).epsilon(1e-12));
    // hand recursion: first round W=4, tied pairs re-draw at W=8 capped
    // f8(2) = 3.5 * 8/7; f4(2) = 1.5 + (1/4) * f8(2)
    double f8_2 = 3.5 * 8.0 / 7.0;
    double f4_2 = 1.5 + 0.25 * f8_2;
    CHECK(expected_time_delay_corrected(prm, ContentionConfig{2}) ==
          doctest::Approx(f4_2 * prm.slot_duration).epsilon(1e-12));
}

TEST_CASE("corrected expected delay is strictly increasing in device count") {
    CsmaParams prm = *zb().csma;
    prm.be_min = prm.be_max = 3;
    double prev = 0.0;
    for (int d = 1; d <= 5; ++d) {
        double v = expected_time_delay_corrected(prm, ContentionConfig{d});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("corrected expected delay rejects intractable device counts") {
    CsmaParams prm = *zb().csma;
    CHECK_THROWS_AS(expected_time_delay_corrected(prm, ContentionConfig{200000}), IntractableEnumeration);
}

TEST_CASE("scaling properties under randomized inputs") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> rate(1e4, 1e9);
    std::uniform_int_distribution<int> bytes(0, 64);
    std::uniform_int_distribution<int> payload(0, 4096);
    std::uniform_real_distribution<double> slot(1e-6, 1e-2);
    std::uniform_real_distribution<double> slots(0.0, 64.0);
    for (int i = 0; i < 200; ++i) {
        TechnologyProfile p;
        p.id = "r";
        p.data_rate = rate(gen);
        p.phy_header = bytes(gen);
        p.mac_header = bytes(gen);
        p.mac_footer = bytes(gen);
        int pl = payload(gen);

        TechnologyProfile p2 = p;
        p2.data_rate *= 2;
        CHECK(t_data(p2, pl) == doctest::Approx(t_data(p, pl) / 2).epsilon(1e-12));
        CHECK(t_ack(p2) == doctest::Approx(t_ack(p) / 2).epsilon(1e-12));
        CHECK(t_data(p, 0) == t_ack(p));

        CsmaParams c;
        c.slot_duration = slot(gen);
        double n = slots(gen);
        CHECK(t_bo(n, c) == doctest::Approx(n * c.slot_duration).epsilon(1e-12));
    }
}

TEST_CASE("contention probability bundle") {
    ContentionProbabilities cp = contention_probabilities(3, 2);
    CHECK(cp.p_backoff_period == 0.125);
    CHECK(cp.p_tss == 0.25);
    CHECK(cp.p_tde == doctest::Approx(0.875).epsilon(1e-13));
    CHECK(cp.expected_delay_slots == doctest::Approx(4.714285714285714).epsilon(1e-13));
    CHECK_FALSE(cp.out_of_range);

    // d large enough pushes nothing over 1; a tiny window with be<2 does
    ContentionProbabilities odd = contention_probabilities(0, 2);
    CHECK(odd.out_of_range);  // p_tss = 0.5 * 0.5^-2 = 2
}
