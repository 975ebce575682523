// bpbound command-line front end: flags and an optional JSON config file are merged
// into one configuration and handed to the matching command.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpbound/experiment.hpp"

namespace {

using bpbound::cli::json;

enum class Kind { number, integer, text, flag };

struct FlagSpec {
    std::string flag;
    std::string key;
    Kind kind;
    std::string help;
};

const std::map<std::string, std::vector<FlagSpec>>& subcommand_flags() {
    static const std::map<std::string, std::vector<FlagSpec>> flags{
        {"bounds",
         {{"--capacity", "capacity", Kind::number, "channel capacity C in bits"},
          {"--channel", "channel", Kind::text, "channel, e.g. bsc:0.05, bec:0.3, biawgn:1.0:64"},
          {"--tau", "tau", Kind::number, "decoding success tau in bits"},
          {"--k", "k", Kind::number, "neighborhood size"},
          {"--c", "c", Kind::number, "operations per information bit"},
          {"--rate", "rate", Kind::number, "code rate R for the P_e lower bound"},
          {"--eps", "eps", Kind::number, "gap to capacity for c_min"},
          {"--eps-grid", "eps_grid", Kind::text, "start:stop[:points] gap grid for the c_min curve"},
          {"--seed", "seed", Kind::integer, "recorded seed"}}},
        {"sweep",
         {{"--eps-grid", "eps_grid", Kind::text, "start:stop[:points] gap grid"},
          {"--tau", "tau", Kind::number, "single tau"},
          {"--tau-grid", "tau_grid", Kind::text, "comma-separated tau values"},
          {"--seed", "seed", Kind::integer, "recorded seed"}}},
        {"simulate",
         {{"--channel", "channel", Kind::text, "channel, e.g. bsc:0.05"},
          {"--ensemble", "ensemble", Kind::text, "regular ensemble dv,dc"},
          {"--family", "family", Kind::text, "ldpc or ldgm"},
          {"--n", "n", Kind::integer, "block length"},
          {"--iterations", "iterations", Kind::integer, "BP iterations"},
          {"--trials", "trials", Kind::integer, "independent graph and noise draws"},
          {"--profile-nodes", "profile_nodes", Kind::integer, "nodes per trial for neighborhood profiling"},
          {"--seed", "seed", Kind::integer, "master seed"}}},
        {"verify",
         {{"--p-list", "p_list", Kind::text, "comma-separated BSC crossover probabilities"},
          {"--l-list", "l_list", Kind::text, "comma-separated depths"},
          {"--graph", "graph", Kind::text, "edge-list file instead of the default suite"},
          {"--code", "code", Kind::text, "codeword file (needs --graph)"},
          {"--per-node", "per_node", Kind::flag, "use each node's own neighborhood size"},
          {"--rhs-offset", "rhs_offset", Kind::number, "test hook added to every right-hand side"},
          {"--seed", "seed", Kind::integer, "suite seed"}}},
        {"de",
         {{"--ensemble", "ensemble", Kind::text, "regular ensemble dv,dc"},
          {"--channel", "channel", Kind::text, "channel, e.g. bec:0.3"},
          {"--mode", "mode", Kind::text, "exact, population or threshold"},
          {"--iterations", "iterations", Kind::integer, "DE iterations"},
          {"--pop-size", "pop_size", Kind::integer, "population size"},
          {"--tol", "tol", Kind::number, "threshold bisection tolerance"},
          {"--max-iters", "max_iters", Kind::integer, "threshold recursion length"},
          {"--target", "target", Kind::number, "threshold convergence target"},
          {"--seed", "seed", Kind::integer, "population seed"}}},
    };
    return flags;
}

json flag_value(const FlagSpec& spec, const std::string& raw) {
    switch (spec.kind) {
        case Kind::number:
            return bpbound::cli::parse_double(raw, spec.flag);
        case Kind::integer: {
            const double x = bpbound::cli::parse_double(raw, spec.flag);
            if (!(x >= 0.0) || x != static_cast<double>(static_cast<std::uint64_t>(x)))
                throw bpbound::ConfigError(spec.flag + " must be a nonnegative integer");
            return static_cast<std::uint64_t>(x);
        }
        case Kind::flag:
            return true;
        case Kind::text:
            break;
    }
    return raw;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Message-passing decoding complexity bounds and their empirical checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bpbound::cli::kVersion));

    std::string config_path;
    std::string out_path;
    std::string summary_path;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON configuration file; flags override its values");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--threads", threads, "worker threads (does not affect results)");

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::map<std::string, bool>> switches;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, specs] : subcommand_flags()) {
        auto* sub = app.add_subcommand(name);
        subs[name] = sub;
        for (const auto& spec : specs) {
            if (spec.kind == Kind::flag)
                sub->add_flag(spec.flag, switches[name][spec.key], spec.help);
            else
                sub->add_option(spec.flag, raw[name][spec.key], spec.help);
        }
    }
    subs["simulate"]->add_option("--summary", summary_path, "write the bounds-compatible summary JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bpbound::cli::kInvalidConfig;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;

    json cfg = json::object();
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw bpbound::ConfigError("cannot open config file '" + config_path + "'");
            cfg = json::parse(in);
            if (!cfg.is_object()) throw bpbound::ConfigError("config file must hold a JSON object");
        }
        for (const auto& spec : subcommand_flags().at(command)) {
            auto* opt = subs[command]->get_option_no_throw(spec.flag);
            if (!opt || opt->count() == 0) continue;
            cfg[spec.key] = spec.kind == Kind::flag ? json(true) : flag_value(spec, raw[command][spec.key]);
        }
        if (threads > 0) cfg["threads"] = threads;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bpbound::cli::kInvalidConfig;
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return bpbound::cli::kInvalidConfig;
        }
    }
    std::ofstream summary;
    if (!summary_path.empty()) {
        summary.open(summary_path, std::ios::binary);
        if (!summary) {
            std::cerr << "error: cannot write '" << summary_path << "'\n";
            return bpbound::cli::kInvalidConfig;
        }
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    return bpbound::cli::run_command(command, cfg, out, std::cerr, summary_path.empty() ? nullptr : &summary);
}
