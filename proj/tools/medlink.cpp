#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <medlink/cli.hpp>

namespace {

void add_common(CLI::App* cmd, medlink::cli::RunRequest& req, std::string& scenario,
                std::string& format, std::vector<std::string>& sets, std::string& out_path,
                bool needs_scenario = true) {
    auto* opt = cmd->add_option("--scenario", scenario,
                                "scenario file path or builtin:{path1,path2,path3}");
    if (needs_scenario) opt->required();
    cmd->add_option("--format", format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--set", sets, "override a scenario field, key=value (repeatable)");
    cmd->add_option("--out", out_path, "write the report to a file instead of stdout");
    cmd->add_option("--profile-dir", [&req](const std::vector<std::string>& v) {
        req.profile_dir = v.back();
        return true;
    }, "directory of extra profile files (default: $MEDLINK_PROFILE_DIR)");
}

void add_run_options(CLI::App* cmd, medlink::cli::RunRequest& req, std::string& contention_mode) {
    cmd->add_option("--seed", [&req](const std::vector<std::string>& v) {
        req.seed = std::stoull(v.back());
        return true;
    }, "simulation seed (64-bit)");
    cmd->add_option("--packets", [&req](const std::vector<std::string>& v) {
        req.packets = std::stoi(v.back());
        return true;
    }, "packets per source device");
    cmd->add_option("--replications", [&req](const std::vector<std::string>& v) {
        req.replications = std::stoi(v.back());
        return true;
    }, "independent replications to run and merge");
    cmd->add_option("--mode", [&req](const std::vector<std::string>& v) {
        if (v.back() == "analytic") req.mode = medlink::RunMode::analytic;
        else if (v.back() == "simulate") req.mode = medlink::RunMode::simulate;
        else if (v.back() == "compare") req.mode = medlink::RunMode::compare;
        else return false;
        return true;
    }, "analytic, simulate or compare (sweep honours this)");
    cmd->add_option("--contention-mode", contention_mode,
                    "analytic backoff pricing: expected_backoff or literal_eq11")
        ->check(CLI::IsMember({"expected_backoff", "literal_eq11"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay analysis for heterogeneous multi-hop body-area network paths"};
    app.require_subcommand(1);

    medlink::cli::RunRequest req;
    std::string scenario, format = "table", out_path, contention_mode = "expected_backoff";
    std::vector<std::string> sets;
    std::string sweep_param;
    std::string sweep_values;

    CLI::App* profiles = app.add_subcommand("profiles", "list the known technology profiles");
    add_common(profiles, req, scenario, format, sets, out_path, false);

    CLI::App* analyze = app.add_subcommand("analyze", "closed-form per-link and path delays");
    add_common(analyze, req, scenario, format, sets, out_path);
    add_run_options(analyze, req, contention_mode);

    CLI::App* simulate = app.add_subcommand("simulate", "seeded discrete-event simulation");
    add_common(simulate, req, scenario, format, sets, out_path);
    add_run_options(simulate, req, contention_mode);

    CLI::App* compare = app.add_subcommand("compare", "analytic versus simulated delays");
    add_common(compare, req, scenario, format, sets, out_path);
    add_run_options(compare, req, contention_mode);

    CLI::App* sweep = app.add_subcommand("sweep", "re-run analysis across parameter values");
    add_common(sweep, req, scenario, format, sets, out_path);
    add_run_options(sweep, req, contention_mode);
    sweep->add_option("--param", sweep_param, "dotted parameter name, e.g. traffic.payload")
        ->required();
    sweep->add_option("--values", sweep_values, "comma-separated values, units allowed")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (profiles->parsed()) req.command = medlink::cli::Command::profiles;
    else if (analyze->parsed()) req.command = medlink::cli::Command::analyze;
    else if (simulate->parsed()) req.command = medlink::cli::Command::simulate;
    else if (compare->parsed()) req.command = medlink::cli::Command::compare;
    else if (sweep->parsed()) req.command = medlink::cli::Command::sweep;

    req.scenario = scenario;
    req.output_path = out_path;
    req.format = format == "csv" ? medlink::cli::OutputFormat::csv
                 : format == "json" ? medlink::cli::OutputFormat::json
                                    : medlink::cli::OutputFormat::table;
    req.contention_mode = contention_mode == "literal_eq11"
                              ? medlink::ContentionMode::literal_eq11
                              : medlink::ContentionMode::expected_backoff;
    for (const std::string& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "parse: --set expects key=value, got \"" << kv << "\"\n";
            return 1;
        }
        req.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    req.sweep_parameter = sweep_param;
    if (!sweep_values.empty()) {
        std::size_t start = 0;
        while (start <= sweep_values.size()) {
            std::size_t comma = sweep_values.find(',', start);
            if (comma == std::string::npos) comma = sweep_values.size();
            req.sweep_values.push_back(sweep_values.substr(start, comma - start));
            start = comma + 1;
        }
    }

    return medlink::cli::run(req, std::cout, std::cerr);
}
