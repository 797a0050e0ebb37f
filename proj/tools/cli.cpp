#include "bhdimer/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "bhdimer/errors.hpp"
#include "commands.hpp"

#ifndef BHD_VERSION
#define BHD_VERSION "dev"
#endif

namespace bhd::cli {

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return j;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Options {
    std::string config;
    std::string out = ".";
    unsigned threads = 1;
    long long seed = -1;
    std::string figure;
};

void execute(const std::string& command, const Options& opt, std::ostream& out) {
    Context ctx;
    ctx.out_dir = opt.out;
    ctx.threads = opt.threads;
    if (opt.seed >= 0) ctx.seed = static_cast<unsigned long long>(opt.seed);
    if (!opt.config.empty()) ctx.base_dir = std::filesystem::path(opt.config).parent_path();
    if (ctx.base_dir.empty()) ctx.base_dir = ".";
    std::filesystem::create_directories(ctx.out_dir);

    json resolved = json::object();
    if (command == "figure") {
        if (!opt.config.empty()) throw ConfigError("figure recipes take no --config");
        run_figure(opt.figure, ctx, resolved);
    } else {
        const json cfg = load_config(opt.config);
        for (const auto& c : commands())
            if (command == c.name) {
                Section root(&cfg, &resolved, "");
                c.fn(root, ctx);
            }
    }
    json manifest = {{"tool", "bhdimer"},
                     {"version", BHD_VERSION},
                     {"command", command == "figure" ? "figure " + opt.figure : command},
                     {"config", resolved},
                     {"threads", opt.threads},
                     {"outputs", ctx.outputs},
                     {"timestamp", utc_timestamp()}};
    write_json((ctx.out_dir / "manifest.json").string(), manifest);
    for (const auto& f : ctx.outputs) out << (ctx.out_dir / f).string() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Driven Bose-Hubbard dimer toolkit", "bhdimer"};
    app.set_version_flag("--version", BHD_VERSION);
    app.require_subcommand(1);
    Options opt;
    std::vector<CLI::App*> subs;
    for (const auto& c : commands()) {
        auto* s = app.add_subcommand(c.name, c.help);
        s->add_option("-c,--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
        subs.push_back(s);
    }
    auto* fig = app.add_subcommand("figure", "emit the data behind a named figure");
    fig->add_option("name", opt.figure, "figure id")->required()->check(CLI::IsMember(figure_names()));
    subs.push_back(fig);
    for (auto* s : subs) {
        s->add_option("-o,--out", opt.out, "output directory")->capture_default_str();
        s->add_option("-t,--threads", opt.threads, "worker threads for grid commands")
            ->check(CLI::Range(1u, 256u))
            ->capture_default_str();
        s->add_option("--seed", opt.seed, "override the configured RNG seed")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    std::string command;
    for (auto* s : subs)
        if (s->parsed()) command = s->get_name();
    try {
        execute(command, opt, out);
    } catch (const ConfigError& e) {
        err << "ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "Error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace bhd::cli
