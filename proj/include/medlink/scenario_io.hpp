#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <medlink/errors.hpp>
#include <medlink/model.hpp>

// Scenario text format: line-oriented `key = value` with [section] headers
//
//   seed = 42                     top-level keys: seed, mode, replications
//   [traffic]                     payload, inter_arrival, packet_count
//   [profile custom]              inline profile; `base = <id>` inherits
//   [path path1]
//   [link 1]                      profile, num_end_devices
//
// Times take s/ms/us suffixes, rates bps/kbps/mbps, sizes B/bits; a bare
// number means the canonical unit (seconds, bps, B or bits). `#` starts a
// comment. Unknown keys and sections are errors.

namespace medlink {

namespace ioutil {

inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

enum class Unit { seconds, bits_per_second, bytes, bits, count, raw_u64 };

inline double parse_scaled(std::string_view text, Unit unit, int line) {
    text = trim(text);
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc())
        throw ParseError(line, "expected a number, got \"" + std::string(text) + "\"");
    std::string_view suffix = trim(std::string_view(res.ptr, text.data() + text.size() - res.ptr));

    auto bad = [&]() -> double {
        throw ParseError(line, "unknown unit \"" + std::string(suffix) + "\"");
    };
    switch (unit) {
        case Unit::seconds:
            if (suffix.empty() || suffix == "s") return value;
            if (suffix == "ms") return value * 1e-3;
            if (suffix == "us") return value * 1e-6;
            return bad();
        case Unit::bits_per_second:
            if (suffix.empty() || suffix == "bps") return value;
            if (suffix == "kbps") return value * 1e3;
            if (suffix == "mbps") return value * 1e6;
            return bad();
        case Unit::bytes:
            if (suffix.empty() || suffix == "B") return value;
            if (suffix == "bits") {
                if (std::fmod(value, 8.0) != 0.0)
                    throw ParseError(line, "bit size is not a whole number of bytes");
                return value / 8.0;
            }
            return bad();
        case Unit::bits:
            if (suffix.empty() || suffix == "bits") return value;
            if (suffix == "B") return value * 8.0;
            return bad();
        case Unit::count:
        case Unit::raw_u64:
            if (!suffix.empty()) return bad();
            return value;
    }
    return bad();
}

inline int parse_int(std::string_view text, Unit unit, int line) {
    double v = parse_scaled(text, unit, line);
    if (v != std::floor(v) || v < -2e9 || v > 2e9)
        throw ParseError(line, "expected an integer, got \"" + std::string(text) + "\"");
    return static_cast<int>(v);
}

inline std::uint64_t parse_u64(std::string_view text, int line) {
    text = trim(text);
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError(line, "expected an unsigned integer, got \"" + std::string(text) + "\"");
    return v;
}

inline bool parse_bool(std::string_view text, int line) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ParseError(line, "expected true or false, got \"" + std::string(text) + "\"");
}

inline RunMode parse_mode(std::string_view text, int line) {
    if (text == "analytic") return RunMode::analytic;
    if (text == "simulate") return RunMode::simulate;
    if (text == "compare") return RunMode::compare;
    throw ParseError(line, "mode must be analytic, simulate or compare");
}

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::analytic: return "analytic";
        case RunMode::simulate: return "simulate";
        case RunMode::compare: return "compare";
    }
    return "?";
}

}  // namespace ioutil

namespace detail {

// Applies one profile-section key. Shared between scenario files and profile
// directory files.
inline void apply_profile_key(TechnologyProfile& p, std::string_view key, std::string_view value,
                              int line, const ProfileMap& known) {
    using ioutil::Unit;
    auto need_csma = [&]() -> CsmaParams& {
        if (!p.csma) p.csma.emplace();
        return *p.csma;
    };
    auto need_det = [&]() -> DeterministicLinkParams& {
        if (!p.deterministic) p.deterministic.emplace();
        return *p.deterministic;
    };

    if (key == "base") {
        auto it = known.find(std::string(value));
        if (it == known.end())
            throw ParseError(line, "base profile \"" + std::string(value) + "\" is not known");
        std::string id = p.id;
        p = it->second;
        p.id = id;
        return;
    }
    if (key == "name") { p.name = std::string(value); return; }
    if (key == "data_rate") { p.data_rate = ioutil::parse_scaled(value, Unit::bits_per_second, line); return; }
    if (key == "phy_header") { p.phy_header = ioutil::parse_int(value, Unit::bytes, line); return; }
    if (key == "mac_header") { p.mac_header = ioutil::parse_int(value, Unit::bytes, line); return; }
    if (key == "mac_footer") { p.mac_footer = ioutil::parse_int(value, Unit::bytes, line); return; }
    if (key == "mac_kind") {
        if (value == "contention") {
            p.mac_kind = MacKind::contention;
            need_csma();
            p.deterministic.reset();
        } else if (value == "deterministic") {
            p.mac_kind = MacKind::deterministic;
            need_det();
            p.csma.reset();
        } else {
            throw ParseError(line, "mac_kind must be contention or deterministic");
        }
        return;
    }
    if (key == "buffer_capacity") {
        p.buffer_capacity = static_cast<long long>(ioutil::parse_scaled(value, Unit::bits, line));
        return;
    }
    if (key == "oversize_policy") {
        if (value == "drop") p.oversize_policy = OversizePolicy::drop;
        else if (value == "accept") p.oversize_policy = OversizePolicy::accept;
        else throw ParseError(line, "oversize_policy must be drop or accept");
        return;
    }
    if (key == "be_min") { need_csma().be_min = ioutil::parse_int(value, Unit::count, line); return; }
    if (key == "be_max") { need_csma().be_max = ioutil::parse_int(value, Unit::count, line); return; }
    if (key == "max_backoffs") { need_csma().max_backoffs = ioutil::parse_int(value, Unit::count, line); return; }
    if (key == "max_retries") { need_csma().max_retries = ioutil::parse_int(value, Unit::count, line); return; }
    if (key == "slot_duration") { need_csma().slot_duration = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "cca_duration") { need_csma().cca_duration = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "turnaround") { need_csma().turnaround = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "sifs") { need_csma().sifs = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "lifs") { need_csma().lifs = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "sifs_frame_threshold") { need_csma().sifs_frame_threshold = ioutil::parse_int(value, Unit::bytes, line); return; }
    if (key == "ack_enabled") { need_csma().ack_enabled = ioutil::parse_bool(value, line); return; }
    if (key == "ack_frame_bytes") { need_csma().ack_frame_bytes = ioutil::parse_int(value, Unit::bytes, line); return; }
    if (key == "processing_delay") { need_det().processing_delay = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "propagation_delay") { need_det().propagation_delay = ioutil::parse_scaled(value, Unit::seconds, line); return; }
    if (key == "retry_limit") { need_det().retry_limit = ioutil::parse_int(value, Unit::count, line); return; }
    if (key.substr(0, 5) == "meta.") {
        p.metadata[std::string(key.substr(5))] = std::string(value);
        return;
    }
    throw ParseError(line, "unknown profile key \"" + std::string(key) + "\"");
}

struct RawLine {
    int number;
    std::string_view key;
    std::string_view value;
};

}  // namespace detail

// Parse without validating invariants; exposed so validation can be
// cross-checked independently of loading.
inline Scenario parse_scenario(std::string_view text, const ProfileMap& base = builtin_profiles()) {
    Scenario s;
    s.mode = RunMode::compare;

    enum class Section { top, traffic, profile, path, link };
    Section section = Section::top;
    std::string current_profile;
    ProfileMap declared;
    PathSpec* current_path = nullptr;
    LinkSpec* current_link = nullptr;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = ioutil::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            std::string_view inside = ioutil::trim(line.substr(1, line.size() - 2));
            std::size_t sp = inside.find(' ');
            std::string_view kind = sp == std::string_view::npos ? inside : inside.substr(0, sp);
            std::string_view arg =
                sp == std::string_view::npos ? std::string_view{} : ioutil::trim(inside.substr(sp + 1));

            if (kind == "traffic") {
                if (!arg.empty()) throw ParseError(line_no, "[traffic] takes no argument");
                section = Section::traffic;
                current_path = nullptr;
            } else if (kind == "profile") {
                if (!ioutil::valid_identifier(arg))
                    throw ParseError(line_no, "[profile] needs an identifier");
                section = Section::profile;
                current_profile = std::string(arg);
                TechnologyProfile p;
                p.id = current_profile;
                declared.insert_or_assign(current_profile, std::move(p));
                current_path = nullptr;
            } else if (kind == "path") {
                if (!ioutil::valid_identifier(arg))
                    throw ParseError(line_no, "[path] needs an identifier");
                section = Section::path;
                s.paths.emplace_back();
                current_path = &s.paths.back();
                current_path->id = std::string(arg);
                current_link = nullptr;
            } else if (kind == "link") {
                if (current_path == nullptr)
                    throw ParseError(line_no, "[link] must follow a [path] section");
                section = Section::link;
                current_path->links.emplace_back();
                current_link = &current_path->links.back();
                current_link->index = ioutil::parse_int(arg, ioutil::Unit::count, line_no);
            } else {
                throw ParseError(line_no, "unknown section \"" + std::string(kind) + "\"");
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        std::string_view key = ioutil::trim(line.substr(0, eq));
        std::string_view value = ioutil::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");

        switch (section) {
            case Section::top:
                if (key == "seed") s.seed = ioutil::parse_u64(value, line_no);
                else if (key == "mode") s.mode = ioutil::parse_mode(value, line_no);
                else if (key == "replications")
                    s.replications = ioutil::parse_int(value, ioutil::Unit::count, line_no);
                else throw ParseError(line_no, "unknown top-level key \"" + std::string(key) + "\"");
                break;
            case Section::traffic:
                if (key == "payload")
                    s.traffic.payload = ioutil::parse_int(value, ioutil::Unit::bytes, line_no);
                else if (key == "inter_arrival")
                    s.traffic.inter_arrival = ioutil::parse_scaled(value, ioutil::Unit::seconds, line_no);
                else if (key == "packet_count")
                    s.traffic.packet_count = ioutil::parse_int(value, ioutil::Unit::count, line_no);
                else throw ParseError(line_no, "unknown traffic key \"" + std::string(key) + "\"");
                break;
            case Section::profile: {
                ProfileMap known = base;
                for (const auto& [id, p] : declared)
                    if (id != current_profile) known.insert_or_assign(id, p);
                detail::apply_profile_key(declared.at(current_profile), key, value, line_no, known);
                break;
            }
            case Section::path:
                throw ParseError(line_no, "keys are not allowed directly under [path]");
            case Section::link:
                if (key == "profile") {
                    if (!ioutil::valid_identifier(value))
                        throw ParseError(line_no, "profile id expected");
                    current_link->profile_id = std::string(value);
                } else if (key == "num_end_devices") {
                    current_link->contention =
                        ContentionConfig{ioutil::parse_int(value, ioutil::Unit::count, line_no)};
                } else {
                    throw ParseError(line_no, "unknown link key \"" + std::string(key) + "\"");
                }
                break;
        }
    }

    // effective profile table: everything declared inline plus every
    // referenced builtin
    s.profiles = std::move(declared);
    for (const auto& path : s.paths)
        for (const auto& link : path.links)
            if (!s.profiles.count(link.profile_id)) {
                auto it = base.find(link.profile_id);
                if (it != base.end()) s.profiles.emplace(link.profile_id, it->second);
            }

    // a contention link without an explicit device count contends alone
    for (auto& path : s.paths)
        for (auto& link : path.links) {
            auto it = s.profiles.find(link.profile_id);
            if (it != s.profiles.end() && it->second.mac_kind == MacKind::contention &&
                !link.contention)
                link.contention = ContentionConfig{1};
        }
    return s;
}

// Parse + validate; the only loader the tools use.
inline Scenario load_scenario(std::string_view text, const ProfileMap& base = builtin_profiles()) {
    Scenario s = parse_scenario(text, base);
    std::vector<Violation> v = validate_scenario(s);
    for (const auto& path : s.paths)
        for (const auto& link : path.links)
            if (!s.profiles.count(link.profile_id)) throw UnknownProfile(link.profile_id);
    if (!v.empty()) throw ValidationError(std::move(v));
    return s;
}

inline Scenario load_scenario(std::istream& in, const ProfileMap& base = builtin_profiles()) {
    std::string text(std::istreambuf_iterator<char>(in), {});
    return load_scenario(std::string_view(text), base);
}

// Profile-only files (profile directory): a sequence of [profile] sections.
inline ProfileMap parse_profiles(std::string_view text, const ProfileMap& base = builtin_profiles()) {
    Scenario s = parse_scenario(text, base);
    if (!s.paths.empty()) throw ParseError(0, "profile files may only contain [profile] sections");
    std::vector<Violation> v;
    for (const auto& [id, p] : s.profiles) detail::check_profile(p, "profile", v);
    if (!v.empty()) throw ValidationError(std::move(v));
    return s.profiles;
}

inline std::string serialize_scenario(const Scenario& s) {
    using ioutil::fmt_double;
    std::string out;
    out += "seed = " + std::to_string(s.seed) + "\n";
    out += "mode = " + std::string(ioutil::mode_name(s.mode)) + "\n";
    out += "replications = " + std::to_string(s.replications) + "\n";
    out += "\n[traffic]\n";
    out += "payload = " + std::to_string(s.traffic.payload) + "B\n";
    out += "inter_arrival = " + fmt_double(s.traffic.inter_arrival) + "s\n";
    out += "packet_count = " + std::to_string(s.traffic.packet_count) + "\n";

    for (const auto& [id, p] : s.profiles) {
        out += "\n[profile " + id + "]\n";
        if (!p.name.empty()) out += "name = " + p.name + "\n";
        out += "mac_kind = ";
        out += p.mac_kind == MacKind::contention ? "contention" : "deterministic";
        out += "\n";
        out += "data_rate = " + fmt_double(p.data_rate) + "bps\n";
        out += "phy_header = " + std::to_string(p.phy_header) + "B\n";
        out += "mac_header = " + std::to_string(p.mac_header) + "B\n";
        out += "mac_footer = " + std::to_string(p.mac_footer) + "B\n";
        if (p.buffer_capacity)
            out += "buffer_capacity = " + std::to_string(*p.buffer_capacity) + "bits\n";
        if (p.oversize_policy == OversizePolicy::drop) out += "oversize_policy = drop\n";
        if (p.csma) {
            const CsmaParams& c = *p.csma;
            out += "be_min = " + std::to_string(c.be_min) + "\n";
            out += "be_max = " + std::to_string(c.be_max) + "\n";
            out += "max_backoffs = " + std::to_string(c.max_backoffs) + "\n";
            out += "max_retries = " + std::to_string(c.max_retries) + "\n";
            out += "slot_duration = " + fmt_double(c.slot_duration) + "s\n";
            out += "cca_duration = " + fmt_double(c.cca_duration) + "s\n";
            out += "turnaround = " + fmt_double(c.turnaround) + "s\n";
            out += "sifs = " + fmt_double(c.sifs) + "s\n";
            out += "lifs = " + fmt_double(c.lifs) + "s\n";
            out += "sifs_frame_threshold = " + std::to_string(c.sifs_frame_threshold) + "B\n";
            out += std::string("ack_enabled = ") + (c.ack_enabled ? "true" : "false") + "\n";
            if (c.ack_frame_bytes)
                out += "ack_frame_bytes = " + std::to_string(*c.ack_frame_bytes) + "B\n";
        }
        if (p.deterministic) {
            const DeterministicLinkParams& d = *p.deterministic;
            out += "processing_delay = " + fmt_double(d.processing_delay) + "s\n";
            out += "propagation_delay = " + fmt_double(d.propagation_delay) + "s\n";
            out += "retry_limit = " + std::to_string(d.retry_limit) + "\n";
        }
        for (const auto& [k, v] : p.metadata) out += "meta." + k + " = " + v + "\n";
    }

    for (const auto& path : s.paths) {
        out += "\n[path " + path.id + "]\n";
        for (const auto& link : path.links) {
            out += "[link " + std::to_string(link.index) + "]\n";
            out += "profile = " + link.profile_id + "\n";
            if (link.contention)
                out += "num_end_devices = " + std::to_string(link.contention->num_end_devices) + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dotted-path overrides shared by `--set` and parameter sweeps.

struct NumericParameter {
    ioutil::Unit unit;
    std::function<void(Scenario&, double)> apply;  // value in canonical units
};

namespace detail {

inline std::vector<std::string> split_dotted(std::string_view key) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= key.size()) {
        std::size_t dot = key.find('.', start);
        if (dot == std::string_view::npos) dot = key.size();
        parts.emplace_back(key.substr(start, dot - start));
        start = dot + 1;
    }
    return parts;
}

inline bool link_exists(const Scenario& s, const std::string& path_id, int index) {
    for (const auto& p : s.paths)
        if (p.id == path_id)
            for (const auto& l : p.links)
                if (l.index == index) return true;
    return false;
}

inline LinkSpec& find_link(Scenario& s, const std::string& path_id, int index) {
    for (auto& p : s.paths)
        if (p.id == path_id)
            for (auto& l : p.links)
                if (l.index == index) return l;
    throw UnknownParameter("no link " + std::to_string(index) + " in path \"" + path_id + "\"");
}

inline TechnologyProfile& find_profile(Scenario& s, const std::string& id) {
    auto it = s.profiles.find(id);
    if (it == s.profiles.end()) throw UnknownParameter("no profile \"" + id + "\" in scenario");
    return it->second;
}

inline void set_int_checked(int& target, double v, const std::string& key) {
    if (v != std::floor(v)) throw TypeMismatch("\"" + key + "\" takes an integer");
    target = static_cast<int>(v);
}

}  // namespace detail

// Resolve a dotted parameter name to a numeric setter. `shape` is only used
// to reject names that do not exist; the setter navigates whatever scenario
// it is applied to.
inline NumericParameter resolve_numeric_parameter(const Scenario& shape, std::string_view key) {
    using ioutil::Unit;
    const std::string k(key);
    auto parts = detail::split_dotted(key);

    auto make = [&](Unit u, std::function<void(Scenario&, double)> f) {
        return NumericParameter{u, std::move(f)};
    };

    if (k == "seed")
        return make(Unit::raw_u64, [k](Scenario& s, double v) {
            if (v != std::floor(v) || v < 0) throw TypeMismatch("\"seed\" takes an unsigned integer");
            s.seed = static_cast<std::uint64_t>(v);
        });
    if (k == "replications")
        return make(Unit::count,
                    [k](Scenario& s, double v) { detail::set_int_checked(s.replications, v, k); });
    if (k == "traffic.payload")
        return make(Unit::bytes,
                    [k](Scenario& s, double v) { detail::set_int_checked(s.traffic.payload, v, k); });
    if (k == "traffic.inter_arrival")
        return make(Unit::seconds, [](Scenario& s, double v) { s.traffic.inter_arrival = v; });
    if (k == "traffic.packet_count")
        return make(Unit::count, [k](Scenario& s, double v) {
            detail::set_int_checked(s.traffic.packet_count, v, k);
        });
    if (k == "contention.num_end_devices") {
        bool any = false;
        for (const auto& p : shape.paths)
            for (const auto& l : p.links) {
                auto it = shape.profiles.find(l.profile_id);
                if (it != shape.profiles.end() && it->second.mac_kind == MacKind::contention)
                    any = true;
            }
        if (!any) throw UnknownParameter("scenario has no contention links");
        return make(Unit::count, [k](Scenario& s, double v) {
            int n = 0;
            detail::set_int_checked(n, v, k);
            for (auto& p : s.paths)
                for (auto& l : p.links) {
                    auto it = s.profiles.find(l.profile_id);
                    if (it != s.profiles.end() && it->second.mac_kind == MacKind::contention)
                        l.contention = ContentionConfig{n};
                }
        });
    }

    if (parts.size() == 5 && parts[0] == "paths" && parts[2] == "links" &&
        parts[4] == "num_end_devices") {
        const std::string path_id = parts[1];
        int index = 0;
        try {
            index = ioutil::parse_int(parts[3], Unit::count, 0);
        } catch (const ParseError&) {
            throw UnknownParameter("bad link index in \"" + k + "\"");
        }
        if (!detail::link_exists(shape, path_id, index))
            throw UnknownParameter("no link " + std::to_string(index) + " in path \"" + path_id +
                                   "\"");
        return make(Unit::count, [k, path_id, index](Scenario& s, double v) {
            int n = 0;
            detail::set_int_checked(n, v, k);
            detail::find_link(s, path_id, index).contention = ContentionConfig{n};
        });
    }

    if (parts.size() >= 3 && parts[0] == "profiles") {
        const std::string id = parts[1];
        if (!shape.profiles.count(id)) throw UnknownParameter("no profile \"" + id + "\" in scenario");
        std::string field = parts[2];
        for (std::size_t i = 3; i < parts.size(); ++i) field += "." + parts[i];

        auto profile_setter = [id](auto fn) {
            return [id, fn](Scenario& s, double v) { fn(detail::find_profile(s, id), v); };
        };
        auto csma_setter = [id, k](auto fn) {
            return [id, k, fn](Scenario& s, double v) {
                TechnologyProfile& p = detail::find_profile(s, id);
                if (!p.csma) throw TypeMismatch("\"" + k + "\" needs a contention profile");
                fn(*p.csma, v);
            };
        };
        auto det_setter = [id, k](auto fn) {
            return [id, k, fn](Scenario& s, double v) {
                TechnologyProfile& p = detail::find_profile(s, id);
                if (!p.deterministic)
                    throw TypeMismatch("\"" + k + "\" needs a deterministic profile");
                fn(*p.deterministic, v);
            };
        };

        if (field == "data_rate")
            return make(Unit::bits_per_second,
                        profile_setter([](TechnologyProfile& p, double v) { p.data_rate = v; }));
        if (field == "phy_header")
            return make(Unit::bytes, profile_setter([k](TechnologyProfile& p, double v) {
                            detail::set_int_checked(p.phy_header, v, k);
                        }));
        if (field == "mac_header")
            return make(Unit::bytes, profile_setter([k](TechnologyProfile& p, double v) {
                            detail::set_int_checked(p.mac_header, v, k);
                        }));
        if (field == "mac_footer")
            return make(Unit::bytes, profile_setter([k](TechnologyProfile& p, double v) {
                            detail::set_int_checked(p.mac_footer, v, k);
                        }));
        if (field == "buffer_capacity")
            return make(Unit::bits, profile_setter([k](TechnologyProfile& p, double v) {
                            if (v != std::floor(v)) throw TypeMismatch("\"" + k + "\" takes whole bits");
                            p.buffer_capacity = static_cast<long long>(v);
                        }));
        if (field == "csma.be_min")
            return make(Unit::count,
                        csma_setter([k](CsmaParams& c, double v) { detail::set_int_checked(c.be_min, v, k); }));
        if (field == "csma.be_max")
            return make(Unit::count,
                        csma_setter([k](CsmaParams& c, double v) { detail::set_int_checked(c.be_max, v, k); }));
        if (field == "csma.max_backoffs")
            return make(Unit::count, csma_setter([k](CsmaParams& c, double v) {
                            detail::set_int_checked(c.max_backoffs, v, k);
                        }));
        if (field == "csma.max_retries")
            return make(Unit::count, csma_setter([k](CsmaParams& c, double v) {
                            detail::set_int_checked(c.max_retries, v, k);
                        }));
        if (field == "csma.sifs_frame_threshold")
            return make(Unit::bytes, csma_setter([k](CsmaParams& c, double v) {
                            detail::set_int_checked(c.sifs_frame_threshold, v, k);
                        }));
        if (field == "csma.ack_frame_bytes")
            return make(Unit::bytes, csma_setter([k](CsmaParams& c, double v) {
                            int n = 0;
                            detail::set_int_checked(n, v, k);
                            c.ack_frame_bytes = n;
                        }));
        if (field == "csma.slot_duration")
            return make(Unit::seconds,
                        csma_setter([](CsmaParams& c, double v) { c.slot_duration = v; }));
        if (field == "csma.cca_duration")
            return make(Unit::seconds,
                        csma_setter([](CsmaParams& c, double v) { c.cca_duration = v; }));
        if (field == "csma.turnaround")
            return make(Unit::seconds, csma_setter([](CsmaParams& c, double v) { c.turnaround = v; }));
        if (field == "csma.sifs")
            return make(Unit::seconds, csma_setter([](CsmaParams& c, double v) { c.sifs = v; }));
        if (field == "csma.lifs")
            return make(Unit::seconds, csma_setter([](CsmaParams& c, double v) { c.lifs = v; }));
        if (field == "deterministic.processing_delay")
            return make(Unit::seconds, det_setter([](DeterministicLinkParams& d, double v) {
                            d.processing_delay = v;
                        }));
        if (field == "deterministic.propagation_delay")
            return make(Unit::seconds, det_setter([](DeterministicLinkParams& d, double v) {
                            d.propagation_delay = v;
                        }));
        if (field == "deterministic.retry_limit")
            return make(Unit::count, det_setter([k](DeterministicLinkParams& d, double v) {
                            detail::set_int_checked(d.retry_limit, v, k);
                        }));
        throw UnknownParameter("unknown profile field \"" + field + "\"");
    }

    throw UnknownParameter("unknown parameter \"" + k + "\"");
}

// `--set key=value`; accepts everything resolve_numeric_parameter does plus
// the string-typed fields. `base` supplies profiles not yet in the scenario.
inline void apply_override(Scenario& s, std::string_view key, std::string_view value,
                           const ProfileMap& base = builtin_profiles()) {
    using ioutil::Unit;
    const std::string k(key);
    auto parts = detail::split_dotted(key);

    if (k == "mode") {
        s.mode = ioutil::parse_mode(value, 0);
        return;
    }
    if (parts.size() == 5 && parts[0] == "paths" && parts[2] == "links" && parts[4] == "profile") {
        int index = ioutil::parse_int(parts[3], Unit::count, 0);
        LinkSpec& link = detail::find_link(s, parts[1], index);
        if (!ioutil::valid_identifier(value)) throw TypeMismatch("profile id expected");
        link.profile_id = std::string(value);
        auto it = s.profiles.find(link.profile_id);
        if (it == s.profiles.end()) {
            auto bit = base.find(link.profile_id);
            if (bit == base.end()) throw UnknownProfile(link.profile_id);
            it = s.profiles.emplace(link.profile_id, bit->second).first;
        }
        if (it->second.mac_kind == MacKind::contention) {
            if (!link.contention) link.contention = ContentionConfig{1};
        } else {
            link.contention.reset();
        }
        return;
    }
    if (parts.size() >= 3 && parts[0] == "profiles") {
        TechnologyProfile& p = detail::find_profile(s, parts[1]);
        std::string field = parts[2];
        for (std::size_t i = 3; i < parts.size(); ++i) field += "." + parts[i];
        if (field == "name" || field == "mac_kind" || field == "oversize_policy" ||
            field == "csma.ack_enabled" || field.substr(0, 5) == "meta.") {
            std::string pkey = field;
            if (field == "csma.ack_enabled") pkey = "ack_enabled";
            try {
                detail::apply_profile_key(p, pkey, value, 0, base);
            } catch (const ParseError& e) {
                throw TypeMismatch(e.what());
            }
            return;
        }
        // numeric profile fields fall through to the shared resolver
    }

    NumericParameter param = resolve_numeric_parameter(s, key);
    double v = param.unit == Unit::raw_u64
                   ? static_cast<double>(ioutil::parse_u64(value, 0))
                   : ioutil::parse_scaled(value, param.unit, 0);
    param.apply(s, v);
}

}  // namespace medlink
