#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <medlink/composer.hpp>
#include <medlink/model.hpp>
#include <medlink/report.hpp>
#include <medlink/scenario_io.hpp>

// Command front end shared by the binary and the tests: resolve the scenario
// (file or builtin), apply overrides, run, emit. Exit codes: 0 success,
// 1 bad input or scenario, 2 internal fault. Errors go to the error stream
// as one "code: message" line.

namespace medlink::cli {

enum class Command { profiles, analyze, simulate, compare, sweep };
enum class OutputFormat { table, csv, json };

struct RunRequest {
    Command command = Command::analyze;
    std::string scenario;  // file path or "builtin:<name>"; unused for profiles
    std::vector<std::pair<std::string, std::string>> overrides;  // --set key=value
    OutputFormat format = OutputFormat::table;
    std::string output_path;  // empty: standard output
    std::optional<std::uint64_t> seed;
    std::optional<int> packets;
    std::optional<int> replications;
    std::optional<RunMode> mode;
    ContentionMode contention_mode = ContentionMode::expected_backoff;
    std::string sweep_parameter;
    std::vector<std::string> sweep_values;
    std::optional<std::string> profile_dir;  // overrides MEDLINK_PROFILE_DIR
};

namespace detail {

inline ProfileMap effective_builtins(const RunRequest& req) {
    ProfileMap base = builtin_profiles();
    std::string dir;
    if (req.profile_dir) dir = *req.profile_dir;
    else if (const char* env = std::getenv("MEDLINK_PROFILE_DIR")) dir = env;
    if (dir.empty()) return base;

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw Error("cannot read profile file " + file.string());
        std::string text(std::istreambuf_iterator<char>(in), {});
        for (auto& [id, p] : parse_profiles(text, base)) base.insert_or_assign(id, std::move(p));
    }
    return base;
}

inline Scenario resolve_scenario(const RunRequest& req, const ProfileMap& base) {
    if (req.scenario.empty()) throw Error("no scenario given");
    Scenario s;
    if (req.scenario.rfind("builtin:", 0) == 0) {
        s = make_builtin_scenario(req.scenario.substr(8));
        // rebase builtin profiles onto the effective table
        for (auto& [id, p] : s.profiles) {
            auto it = base.find(id);
            if (it != base.end()) p = it->second;
        }
    } else {
        std::ifstream in(req.scenario);
        if (!in) throw Error("cannot open scenario file " + req.scenario);
        std::string text(std::istreambuf_iterator<char>(in), {});
        s = load_scenario(std::string_view(text), base);
    }

    if (req.seed) s.seed = *req.seed;
    if (req.packets) s.traffic.packet_count = *req.packets;
    if (req.replications) s.replications = *req.replications;
    if (req.mode) s.mode = *req.mode;
    for (const auto& [key, value] : req.overrides) apply_override(s, key, value, base);

    if (auto violations = validate_scenario(s); !violations.empty())
        throw ValidationError(std::move(violations));
    return s;
}

inline long packet_id_stride(const Scenario& s, const PathSpec& path) {
    long devices = 1;
    if (!path.links.empty() && path.links.front().contention)
        devices = path.links.front().contention->num_end_devices;
    return static_cast<long>(s.traffic.packet_count) * devices;
}

inline std::vector<report::PathSimulation> run_simulations(const Scenario& s) {
    std::vector<report::PathSimulation> out;
    for (std::size_t i = 0; i < s.paths.size(); ++i) {
        const PathSpec& path = s.paths[i];
        const std::uint64_t path_seed = rng::derive(s.seed, rng::StreamTag::path, i);
        auto reps = composer::simulate_replications(path, s.traffic, path_seed, s.replications,
                                                    s.profiles);
        sim::PathSampleSet merged = composer::merge_replications(reps, packet_id_stride(s, path));
        out.push_back(report::summarize_simulation(path.id, path.links.size(), std::move(merged)));
    }
    return out;
}

inline void emit(const RunRequest& req, std::ostream& out, const std::string& text) {
    if (req.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(req.output_path, std::ios::binary);
    if (!f) throw Error("cannot write " + req.output_path);
    f << text;
}

inline int dispatch(const RunRequest& req, std::ostream& out) {
    if (req.command == Command::profiles) {
        ProfileMap profiles = effective_builtins(req);
        switch (req.format) {
            case OutputFormat::table: emit(req, out, report::profiles_table(profiles)); break;
            case OutputFormat::csv: emit(req, out, report::profiles_csv(profiles)); break;
            case OutputFormat::json: emit(req, out, report::profiles_json_str(profiles)); break;
        }
        return 0;
    }

    ProfileMap base = effective_builtins(req);
    Scenario s = resolve_scenario(req, base);

    switch (req.command) {
        case Command::analyze: {
            std::vector<report::PathAnalysis> paths;
            for (const PathSpec& p : s.paths)
                paths.push_back(report::analyze_path(p, s.traffic, req.contention_mode, s.profiles));
            switch (req.format) {
                case OutputFormat::table: emit(req, out, report::analyze_table(paths)); break;
                case OutputFormat::csv: emit(req, out, report::analyze_csv(paths)); break;
                case OutputFormat::json:
                    emit(req, out, report::analyze_json_str(paths, req.contention_mode));
                    break;
            }
            return 0;
        }
        case Command::simulate: {
            auto sims = detail::run_simulations(s);
            switch (req.format) {
                case OutputFormat::table: emit(req, out, report::simulate_table(sims)); break;
                case OutputFormat::csv: emit(req, out, report::per_packet_csv(sims)); break;
                case OutputFormat::json: emit(req, out, report::simulate_json_str(sims)); break;
            }
            return 0;
        }
        case Command::compare: {
            auto sims = detail::run_simulations(s);
            std::vector<report::PathComparison> cmps;
            for (std::size_t i = 0; i < s.paths.size(); ++i) {
                report::PathComparison pc;
                pc.analytic =
                    report::analyze_path(s.paths[i], s.traffic, req.contention_mode, s.profiles);
                pc.comparison = composer::compare(pc.analytic.totals, sims[i].merged);
                cmps.push_back(std::move(pc));
            }
            switch (req.format) {
                case OutputFormat::table: emit(req, out, report::compare_table(cmps)); break;
                case OutputFormat::csv: emit(req, out, report::compare_csv(cmps)); break;
                case OutputFormat::json: emit(req, out, report::compare_json_str(cmps)); break;
            }
            return 0;
        }
        case Command::sweep: {
            if (req.sweep_parameter.empty()) throw UnknownParameter("sweep needs --param");
            NumericParameter param = resolve_numeric_parameter(s, req.sweep_parameter);
            std::vector<double> values;
            for (const std::string& v : req.sweep_values)
                values.push_back(param.unit == ioutil::Unit::raw_u64
                                     ? static_cast<double>(ioutil::parse_u64(v, 0))
                                     : ioutil::parse_scaled(v, param.unit, 0));
            auto rows = composer::sweep(s, req.sweep_parameter, values, req.contention_mode);
            switch (req.format) {
                case OutputFormat::table:
                    emit(req, out, report::sweep_table(req.sweep_parameter, rows));
                    break;
                case OutputFormat::csv:
                    emit(req, out, report::sweep_csv(req.sweep_parameter, rows));
                    break;
                case OutputFormat::json:
                    emit(req, out, report::sweep_json_str(req.sweep_parameter, rows));
                    break;
            }
            return 0;
        }
        case Command::profiles: break;  // handled above
    }
    return 2;
}

}  // namespace detail

inline int run(const RunRequest& req, std::ostream& out, std::ostream& err) {
    try {
        return detail::dispatch(req, out);
    } catch (const ParseError& e) {
        err << "parse: " << e.what() << "\n";
    } catch (const ValidationError& e) {
        err << "validation: " << e.what() << "\n";
    } catch (const UnknownProfile& e) {
        err << "unknown-profile: " << e.what() << "\n";
    } catch (const UnknownParameter& e) {
        err << "unknown-parameter: " << e.what() << "\n";
    } catch (const TypeMismatch& e) {
        err << "type-mismatch: " << e.what() << "\n";
    } catch (const UnsupportedBE& e) {
        err << "unsupported-be: " << e.what() << "\n";
    } catch (const EmptySamples& e) {
        err << "empty-samples: " << e.what() << "\n";
    } catch (const ShapeMismatch& e) {
        err << "shape-mismatch: " << e.what() << "\n";
    } catch (const WrongKind& e) {
        err << "wrong-kind: " << e.what() << "\n";
    } catch (const IntractableEnumeration& e) {
        err << "intractable-enumeration: " << e.what() << "\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace medlink::cli
