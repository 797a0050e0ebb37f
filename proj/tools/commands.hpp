#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace bhd::cli {

struct Context {
    std::filesystem::path out_dir = ".";
    std::filesystem::path base_dir = ".";  // relative paths in a config resolve here
    unsigned threads = 1;
    std::optional<unsigned long long> seed;
    std::string suffix;                 // appended to output file stems
    std::vector<std::string> outputs;   // file names written, in order

    std::string file(const std::string& stem, const std::string& ext);
    std::string resolve(const std::string& path) const;
};

void write_json(const std::string& path, const json& j);

using CommandFn = void (*)(Section&, Context&);

struct CommandInfo {
    const char* name;
    const char* help;
    CommandFn fn;
};

const std::vector<CommandInfo>& commands();

const std::vector<std::string>& figure_names();
// Runs a figure recipe; `resolved` receives the per-step configurations.
void run_figure(const std::string& name, Context& ctx, json& resolved);

}  // namespace bhd::cli
