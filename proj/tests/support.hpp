#pragma once

// Helpers for tests that drive the built binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace testsupport {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("medlink_" + tag + "_" +
                                                         std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

#ifdef MEDLINK_CLI_PATH
inline CliResult run_cli(const std::string& args, const std::string& tag = "run") {
    auto dir = fresh_dir(tag);
    auto out_path = dir / "stdout.txt";
    auto err_path = dir / "stderr.txt";
    std::string cmd = std::string(MEDLINK_CLI_PATH) + " " + args + " > " + out_path.string() +
                      " 2> " + err_path.string();
    int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    std::filesystem::remove_all(dir);
    return res;
}
#endif

}  // namespace testsupport
