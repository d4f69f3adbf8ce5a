#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <medlink/model.hpp>
#include <medlink/scenario_io.hpp>

#include <random>
#include <string>
#include <vector>

using namespace medlink;

namespace {

const char* kCanonical = R"(# canonical first path
seed = 42
mode = compare
replications = 1

[traffic]
payload = 1024B
inter_arrival = 0.04s
packet_count = 10000

[path path1]
[link 1]
profile = zigbee
num_end_devices = 1
[link 2]
profile = wlan
[link 3]
profile = ipcloud
)";

}  // namespace

TEST_CASE("canonical scenario loads") {
    Scenario s = load_scenario(kCanonical);
    CHECK(s.paths.size() == 1);
    CHECK(s.paths[0].links.size() == 3);
    CHECK(s.traffic.payload == 1024);
    CHECK(s.traffic.inter_arrival == 0.04);
    CHECK(s.seed == 42);
    CHECK(s.mode == RunMode::compare);
    // referenced builtins land in the effective profile table
    CHECK(s.profiles.count("zigbee") == 1);
    CHECK(s.profiles.count("wlan") == 1);
    CHECK(s.profiles.count("ipcloud") == 1);
    // wlan contends alone unless told otherwise
    REQUIRE(s.paths[0].links[1].contention.has_value());
    CHECK(s.paths[0].links[1].contention->num_end_devices == 1);
}

TEST_CASE("unit suffixes") {
    std::string text = kCanonical;
    text.replace(text.find("inter_arrival = 0.04s"), 21, "inter_arrival = 40ms ");
    Scenario s = load_scenario(text);
    CHECK(s.traffic.inter_arrival == doctest::Approx(0.04).epsilon(1e-12));

    text = kCanonical;
    text.replace(text.find("payload = 1024B"), 15, "payload = 8192bits");
    CHECK(load_scenario(text).traffic.payload == 1024);
}

TEST_CASE("inline profiles with inheritance") {
    std::string text = kCanonical + std::string(R"(
[profile hotrod]
base = zigbee
data_rate = 1mbps
be_min = 3
be_max = 3
)");
    // point link 1 at the inline profile
    auto pos = text.find("profile = zigbee");
    text.replace(pos, 16, "profile = hotrod");
    Scenario s = load_scenario(text);
    const TechnologyProfile& p = s.profiles.at("hotrod");
    CHECK(p.data_rate == 1e6);
    CHECK(p.csma->be_min == 3);
    CHECK(p.csma->slot_duration == 0.32e-3);  // inherited
    CHECK(p.phy_header == 6);                 // inherited
}

TEST_CASE("parse failures carry line numbers") {
    CHECK_THROWS_AS(load_scenario("payload = 1\n"), ParseError);          // top-level key
    CHECK_THROWS_AS(load_scenario("[traffic]\nbogus = 1\n"), ParseError); // unknown key
    CHECK_THROWS_AS(load_scenario("[link 1]\nprofile = x\n"), ParseError);  // link outside path
    CHECK_THROWS_AS(load_scenario("[traffic]\npayload 1024\n"), ParseError);  // missing =
    CHECK_THROWS_AS(load_scenario("[traffic]\npayload = 12q\n"), ParseError);  // bad unit
    CHECK_THROWS_AS(load_scenario("[traffic]\ninter_arrival = 40m\n"), ParseError);

    try {
        load_scenario("[traffic]\nbogus = 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("load rejects invariant violations") {
    std::string text = kCanonical;
    text.replace(text.find("inter_arrival = 0.04s"), 21, "inter_arrival = 0s   ");
    try {
        load_scenario(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0].code == "traffic.inter_arrival.min");
        CHECK(std::string(e.what()).find("inter_arrival") != std::string::npos);
    }
}

TEST_CASE("unknown profile id raises UnknownProfile") {
    std::string text = kCanonical;
    text.replace(text.find("profile = wlan"), 14, "profile = lte ");
    CHECK_THROWS_AS(load_scenario(text), UnknownProfile);
}

TEST_CASE("serialize/load round trip") {
    Scenario original = load_scenario(kCanonical);
    Scenario reparsed = load_scenario(serialize_scenario(original));
    CHECK(reparsed == original);

    // also with an inline profile, metadata and deterministic params
    Scenario builtin = make_builtin_scenario("path3");
    builtin.traffic.payload = 77;
    builtin.seed = 1234567890123456789ULL;
    Scenario re2 = load_scenario(serialize_scenario(builtin));
    CHECK(re2 == builtin);

    // and with every optional knob exercised
    Scenario fancy = make_builtin_scenario("path1");
    fancy.mode = RunMode::simulate;
    fancy.replications = 4;
    fancy.profiles.at("zigbee").csma->ack_frame_bytes = 11;
    fancy.profiles.at("zigbee").metadata["site"] = "ward 3";
    fancy.profiles.emplace("wlan-54g", builtin_profiles().at("wlan-54g"));
    fancy.profiles.at("ipcloud").deterministic->propagation_delay = 0.125e-3;
    fancy.paths[0].links[1].contention = ContentionConfig{5};
    PathSpec second;
    second.id = "alt";
    second.links.push_back({1, "zigbee", ContentionConfig{2}});
    second.links.push_back({2, "wlan-54g", ContentionConfig{1}});
    fancy.paths.push_back(second);
    REQUIRE(validate_scenario(fancy).empty());
    Scenario re3 = load_scenario(serialize_scenario(fancy));
    CHECK(re3 == fancy);
}

TEST_CASE("round trip holds for generated scenarios") {
    std::mt19937 gen(2024);
    auto real = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };
    auto integer = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    };

    for (int iter = 0; iter < 25; ++iter) {
        CAPTURE(iter);
        Scenario s;
        s.seed = (static_cast<std::uint64_t>(gen()) << 32) | gen();
        s.mode = static_cast<RunMode>(integer(0, 2));
        s.replications = integer(1, 4);
        s.traffic.payload = integer(0, 2048);
        s.traffic.inter_arrival = real(1e-4, 2.0);
        s.traffic.packet_count = integer(1, 500);

        const int nprofiles = integer(1, 3);
        std::vector<std::string> ids;
        for (int p = 0; p < nprofiles; ++p) {
            TechnologyProfile prof;
            prof.id = "gen" + std::to_string(p);
            prof.name = integer(0, 1) ? "generated profile " + std::to_string(p) : "";
            prof.data_rate = real(1e3, 1e9);
            prof.phy_header = integer(0, 32);
            prof.mac_header = integer(0, 40);
            prof.mac_footer = integer(0, 8);
            if (integer(0, 1)) {
                prof.buffer_capacity = integer(1, 1 << 20);
                prof.oversize_policy =
                    integer(0, 1) ? OversizePolicy::drop : OversizePolicy::accept;
            }
            if (integer(0, 1)) {
                prof.mac_kind = MacKind::contention;
                CsmaParams c;
                c.be_min = integer(0, 8);
                c.be_max = integer(c.be_min, 8);
                c.max_backoffs = integer(0, 10);
                c.max_retries = integer(0, 10);
                c.slot_duration = real(1e-6, 1e-2);
                c.cca_duration = real(0.0, 1e-3);
                c.turnaround = real(0.0, 1e-3);
                c.sifs = real(0.0, 1e-3);
                c.lifs = c.sifs + real(0.0, 1e-3);
                c.sifs_frame_threshold = integer(0, 64);
                c.ack_enabled = integer(0, 1) == 1;
                if (integer(0, 1)) c.ack_frame_bytes = integer(0, 32);
                prof.csma = c;
            } else {
                prof.mac_kind = MacKind::deterministic;
                prof.deterministic = DeterministicLinkParams{real(0.0, 0.5), real(0.0, 0.5),
                                                             integer(0, 8)};
            }
            if (integer(0, 1)) prof.metadata["note"] = "value " + std::to_string(integer(0, 99));
            ids.push_back(prof.id);
            s.profiles.emplace(prof.id, std::move(prof));
        }

        const int npaths = integer(1, 2);
        for (int p = 0; p < npaths; ++p) {
            PathSpec path;
            path.id = "route" + std::to_string(p);
            const int nlinks = integer(1, 3);
            for (int l = 1; l <= nlinks; ++l) {
                LinkSpec link;
                link.index = l;
                link.profile_id = ids[integer(0, static_cast<int>(ids.size()) - 1)];
                if (s.profiles.at(link.profile_id).mac_kind == MacKind::contention)
                    link.contention = ContentionConfig{integer(1, 4)};
                path.links.push_back(std::move(link));
            }
            s.paths.push_back(std::move(path));
        }

        REQUIRE(validate_scenario(s).empty());
        Scenario reparsed = load_scenario(serialize_scenario(s));
        CHECK(reparsed == s);
    }
}

TEST_CASE("validate_scenario is empty exactly when load accepts") {
    // corpus of valid and mutated scenario texts
    std::vector<std::string> corpus;
    corpus.emplace_back(kCanonical);
    corpus.push_back(serialize_scenario(make_builtin_scenario("path2")));
    corpus.push_back(serialize_scenario(make_builtin_scenario("path3")));
    std::string t = kCanonical;
    t.replace(t.find("inter_arrival = 0.04s"), 21, "inter_arrival = 0s   ");
    corpus.push_back(t);
    t = kCanonical;
    t.replace(t.find("num_end_devices = 1"), 19, "num_end_devices = 0");
    corpus.push_back(t);
    t = kCanonical;
    t.replace(t.find("payload = 1024B"), 15, "payload = -4B  ");
    corpus.push_back(t);
    t = kCanonical;
    t.replace(t.find("profile = ipcloud"), 17, "profile = lte    ");
    corpus.push_back(t);
    t = kCanonical;
    t.replace(t.find("replications = 1"), 16, "replications = 0");
    corpus.push_back(t);

    for (const std::string& text : corpus) {
        CAPTURE(text);
        Scenario raw = parse_scenario(text);
        bool loads = true;
        try {
            load_scenario(text);
        } catch (const ValidationError&) {
            loads = false;
        } catch (const UnknownProfile&) {
            loads = false;
        }
        CHECK(loads == validate_scenario(raw).empty());
    }
}

TEST_CASE("profile-only files") {
    ProfileMap extra = parse_profiles(R"([profile lab]
mac_kind = contention
data_rate = 2mbps
be_min = 1
be_max = 4
)");
    CHECK(extra.at("lab").data_rate == 2e6);
    CHECK(extra.at("lab").csma->be_max == 4);
    CHECK_THROWS_AS(parse_profiles(kCanonical), ParseError);  // paths not allowed
}

TEST_CASE("set-style overrides") {
    Scenario s = make_builtin_scenario("path1");

    apply_override(s, "traffic.payload", "60B");
    CHECK(s.traffic.payload == 60);

    apply_override(s, "traffic.inter_arrival", "10ms");
    CHECK(s.traffic.inter_arrival == doctest::Approx(0.01).epsilon(1e-12));

    apply_override(s, "seed", "7");
    CHECK(s.seed == 7);

    apply_override(s, "mode", "analytic");
    CHECK(s.mode == RunMode::analytic);

    apply_override(s, "contention.num_end_devices", "3");
    CHECK(s.paths[0].links[0].contention->num_end_devices == 3);
    CHECK(s.paths[0].links[1].contention->num_end_devices == 3);  // wlan too

    apply_override(s, "paths.path1.links.1.num_end_devices", "2");
    CHECK(s.paths[0].links[0].contention->num_end_devices == 2);
    CHECK(s.paths[0].links[1].contention->num_end_devices == 3);  // untouched

    apply_override(s, "profiles.zigbee.csma.be_min", "3");
    CHECK(s.profiles.at("zigbee").csma->be_min == 3);

    apply_override(s, "profiles.zigbee.data_rate", "1mbps");
    CHECK(s.profiles.at("zigbee").data_rate == 1e6);

    apply_override(s, "profiles.ipcloud.deterministic.processing_delay", "5ms");
    CHECK(s.profiles.at("ipcloud").deterministic->processing_delay == doctest::Approx(0.005));

    apply_override(s, "profiles.zigbee.csma.ack_enabled", "false");
    CHECK_FALSE(s.profiles.at("zigbee").csma->ack_enabled);

    apply_override(s, "paths.path1.links.2.profile", "wimax");
    CHECK(s.paths[0].links[1].profile_id == "wimax");
    CHECK_FALSE(s.paths[0].links[1].contention.has_value());  // deterministic now

    CHECK_THROWS_AS(apply_override(s, "traffic.nonsense", "1"), UnknownParameter);
    CHECK_THROWS_AS(apply_override(s, "profiles.zigbee.csma.be_min", "2.5"), TypeMismatch);
    CHECK_THROWS_AS(apply_override(s, "profiles.nope.data_rate", "1"), UnknownParameter);
    CHECK_THROWS_AS(apply_override(s, "paths.path1.links.9.profile", "wlan"), UnknownParameter);
}

TEST_CASE("override equals editing the file") {
    Scenario a = make_builtin_scenario("path1");
    apply_override(a, "traffic.payload", "512B");
    apply_override(a, "profiles.zigbee.csma.be_min", "3");

    std::string text = serialize_scenario(make_builtin_scenario("path1"));
    auto pos = text.find("payload = 1024B");
    text.replace(pos, 15, "payload = 512B ");
    Scenario b = load_scenario(text);
    apply_override(b, "profiles.zigbee.csma.be_min", "3");
    CHECK(a == b);
}

TEST_CASE("numeric parameter resolver rejects what sweep cannot touch") {
    Scenario s = make_builtin_scenario("path2");
    CHECK_THROWS_AS(resolve_numeric_parameter(s, "mode"), UnknownParameter);
    CHECK_THROWS_AS(resolve_numeric_parameter(s, "profiles.zigbee.nope"), UnknownParameter);
    NumericParameter p = resolve_numeric_parameter(s, "traffic.payload");
    p.apply(s, 256);
    CHECK(s.traffic.payload == 256);
    CHECK_THROWS_AS(p.apply(s, 0.5), TypeMismatch);
}
