#pragma once

// Experiment commands behind the bpbound CLI. Each command takes a resolved JSON
// configuration, writes its report to a stream and returns a process exit code.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bpbound/bounds.hpp"
#include "bpbound/channels.hpp"
#include "bpbound/decoder.hpp"
#include "bpbound/density_evolution.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/errors.hpp"
#include "bpbound/oracle.hpp"
#include "bpbound/simulation.hpp"

namespace bpbound::cli {

using json = nlohmann::json;

inline constexpr const char* kToolName = "bpbound";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kInvalidConfig = 2, kBudgetExceeded = 3 };

// Keys that never influence results and are left out of recorded configurations.
inline bool is_runtime_key(const std::string& key) {
    return key == "threads" || key == "out" || key == "summary" || key == "config";
}

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// JSON value for a double; non-finite values become null.
inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// --- configuration parsing -------------------------------------------------------------

inline double get_number(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            std::size_t used = 0;
            const double x = std::stod(v.get<std::string>(), &used);
            if (used == v.get<std::string>().size()) return x;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("'" + key + "' must be a number");
}

inline std::optional<double> opt_number(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
    return get_number(cfg, key);
}

inline std::uint64_t get_count(const json& cfg, const std::string& key, std::uint64_t fallback) {
    if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
    const double x = get_number(cfg, key);
    if (!(x >= 0.0) || x != std::floor(x) || x > 1e18) throw ConfigError("'" + key + "' must be a nonnegative integer");
    return static_cast<std::uint64_t>(x);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used == s.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse " + what + " '" + s + "'");
}

// {"kind": "bsc"|"bec"|"biawgn", "param": x, "bins": K} or the shorthand "bsc:0.05",
// "bec:0.3", "biawgn:1.0:64".
inline BmsChannel parse_channel(const json& spec) {
    std::string kind;
    double param = 0.0;
    int bins = 64;
    if (spec.is_string()) {
        const auto parts = split(spec.get<std::string>(), ':');
        if (parts.size() < 2 || parts.size() > 3) throw ConfigError("channel must look like kind:param[:bins]");
        kind = parts[0];
        param = parse_double(parts[1], "channel parameter");
        if (parts.size() == 3) bins = static_cast<int>(parse_double(parts[2], "bin count"));
    } else if (spec.is_object()) {
        if (!spec.contains("kind") || !spec.contains("param")) throw ConfigError("channel needs 'kind' and 'param'");
        kind = spec.at("kind").get<std::string>();
        param = get_number(spec, "param");
        if (spec.contains("bins")) bins = static_cast<int>(get_number(spec, "bins"));
    } else {
        throw ConfigError("channel must be an object or a kind:param string");
    }
    try {
        if (kind == "bsc") return BmsChannel::bsc(param);
        if (kind == "bec") return BmsChannel::bec(param);
        if (kind == "biawgn") return BmsChannel::quantized_biawgn(param, bins);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown channel kind '" + kind + "'");
}

inline json channel_to_json(const BmsChannel& ch) {
    json j{{"kind", to_string(ch.kind())}, {"param", ch.param()}};
    if (ch.kind() == ChannelKind::quantized_biawgn) j["bins"] = ch.bins();
    return j;
}

// "3,6" / {"dv": 3, "dc": 6} for regular ensembles, or
// {"var": {"2": 0.5, "3": 0.5}, "chk": {"6": 1}} node-perspective fractions.
inline DegreeDistribution parse_ensemble(const json& spec) {
    try {
        if (spec.is_string()) {
            const auto parts = split(spec.get<std::string>(), ',');
            if (parts.size() != 2) throw ConfigError("ensemble must look like dv,dc");
            return regular_ensemble(static_cast<int>(parse_double(parts[0], "dv")),
                                    static_cast<int>(parse_double(parts[1], "dc")));
        }
        if (spec.is_object() && spec.contains("dv")) {
            return regular_ensemble(static_cast<int>(get_number(spec, "dv")), static_cast<int>(get_number(spec, "dc")));
        }
        if (spec.is_object() && spec.contains("var") && spec.contains("chk")) {
            auto fractions = [](const json& side) {
                std::map<int, double> out;
                for (auto it = side.begin(); it != side.end(); ++it)
                    out[static_cast<int>(parse_double(it.key(), "degree"))] = it.value().get<double>();
                return out;
            };
            return DegreeDistribution::from_node_fractions(fractions(spec.at("var")), fractions(spec.at("chk")));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid ensemble: ") + e.what());
    }
    throw ConfigError("ensemble must be 'dv,dc', {dv, dc} or {var, chk}");
}

inline CodeFamily parse_family(const json& cfg) {
    if (!cfg.contains("family")) return CodeFamily::ldpc;
    const auto f = cfg.at("family").get<std::string>();
    if (f == "ldpc") return CodeFamily::ldpc;
    if (f == "ldgm") return CodeFamily::ldgm;
    throw ConfigError("family must be 'ldpc' or 'ldgm'");
}

// Logarithmic grid "start:stop[:points]", emitted from start towards stop. Without a
// point count there is one point per decade.
inline std::vector<double> parse_log_grid(const json& spec) {
    if (spec.is_array()) {
        std::vector<double> out;
        for (const auto& v : spec) out.push_back(v.get<double>());
        if (out.empty()) throw ConfigError("grid must be nonempty");
        for (std::size_t i = 1; i < out.size(); ++i) {
            const bool up = out[1] > out[0];
            if ((up && !(out[i] > out[i - 1])) || (!up && !(out[i] < out[i - 1])))
                throw ConfigError("grid must be strictly monotone");
        }
        return out;
    }
    if (!spec.is_string()) throw ConfigError("grid must be 'start:stop[:points]' or an array");
    const auto parts = split(spec.get<std::string>(), ':');
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("grid must be 'start:stop[:points]'");
    const double start = parse_double(parts[0], "grid start");
    const double stop = parse_double(parts[1], "grid stop");
    if (!(start > 0.0) || !(stop > 0.0)) throw ConfigError("grid endpoints must be positive");
    const double decades = std::log10(stop) - std::log10(start);
    std::size_t points = static_cast<std::size_t>(std::llround(std::abs(decades))) + 1;
    if (parts.size() == 3) {
        const double p = parse_double(parts[2], "grid points");
        if (!(p >= 1.0) || p != std::floor(p)) throw ConfigError("grid points must be a positive integer");
        points = static_cast<std::size_t>(p);
    }
    if (points > 1 && start == stop) throw ConfigError("grid must be strictly monotone");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        out[i] = std::pow(10.0, std::log10(start) + frac * decades);
    }
    out.front() = start;
    if (points > 1) out.back() = stop;
    return out;
}

inline std::vector<double> parse_number_list(const json& spec) {
    std::vector<double> out;
    if (spec.is_array()) {
        for (const auto& v : spec) out.push_back(v.get<double>());
    } else if (spec.is_number()) {
        out.push_back(spec.get<double>());
    } else if (spec.is_string()) {
        for (const auto& part : split(spec.get<std::string>(), ',')) out.push_back(parse_double(part, "list entry"));
    } else {
        throw ConfigError("expected a number list");
    }
    if (out.empty()) throw ConfigError("list must be nonempty");
    return out;
}

// --- provenance ---------------------------------------------------------------------------

inline json recorded_config(const json& cfg) {
    json out = json::object();
    for (auto it = cfg.begin(); it != cfg.end(); ++it)
        if (!is_runtime_key(it.key())) out[it.key()] = it.value();
    if (!out.contains("seed")) out["seed"] = 0;
    return out;
}

inline json meta(const json& cfg) {
    const json rec = recorded_config(cfg);
    return {{"tool", kToolName}, {"version", kVersion}, {"config", rec}, {"seed", rec.at("seed")}};
}

inline void write_csv_preamble(std::ostream& out, const json& cfg, const std::string& header) {
    const json rec = recorded_config(cfg);
    out << "# " << kToolName << ' ' << kVersion << " seed=" << rec.at("seed").dump()
        << " config=" << rec.dump() << '\n'
        << header << '\n';
}

// --- commands -----------------------------------------------------------------------------

inline void write_cmin_curve(std::ostream& out, const json& cfg, const std::vector<double>& eps_grid,
                             const std::vector<double>& taus) {
    write_csv_preamble(out, cfg, "eps,tau,c_min,k_bd_log2_at_cmin");
    for (double tau : taus) {
        if (!(tau > 0.0)) throw ConfigError("tau must be positive for the c_min curve");
        for (double eps : eps_grid) {
            const double c = min_ops_per_bit(eps, tau);
            out << format_number(eps) << ',' << format_number(tau) << ',' << format_number(c) << ','
                << format_number(k_bd(c).log2_value) << '\n';
        }
    }
}

// Bound chain for one operating point, or the c_min curve when an eps grid is given.
inline int cmd_bounds(const json& cfg, std::ostream& out) {
    const auto tau = opt_number(cfg, "tau");
    if (!tau) throw ConfigError("bounds: 'tau' is required");
    if (!(*tau >= 0.0)) throw ConfigError("bounds: 'tau' must be nonnegative");
    const auto k = opt_number(cfg, "k");
    const auto c = opt_number(cfg, "c");
    if (k && c) throw ConfigError("bounds: give either 'k' or 'c', not both");

    if (cfg.contains("eps_grid")) {
        if (k || c) throw ConfigError("bounds: 'eps_grid' cannot be combined with 'k' or 'c'");
        write_cmin_curve(out, cfg, parse_log_grid(cfg.at("eps_grid")), {*tau});
        return kOk;
    }

    std::optional<BmsChannel> channel;
    if (cfg.contains("channel")) channel = parse_channel(cfg.at("channel"));
    std::optional<double> capacity = opt_number(cfg, "capacity");
    std::optional<double> h_y;
    if (channel) {
        const auto stats = channel_stats(*channel);
        if (!capacity) capacity = stats.capacity;
        h_y = stats.output_entropy;
    }
    const auto rate = opt_number(cfg, "rate");
    const auto eps = opt_number(cfg, "eps");
    if (!k && !c && !eps) throw ConfigError("bounds: one of 'k', 'c', 'eps' or 'eps_grid' is required");
    if ((k || c) && !capacity) throw ConfigError("bounds: 'capacity' or 'channel' is required");

    json report;
    report["meta"] = meta(cfg);
    report["pe_basis"] = "bit-error probability";
    if (channel && channel->is_bec()) report["bec_outside_validity"] = true;
    if (capacity) report["capacity"] = *capacity;
    if (h_y) report["output_entropy"] = *h_y;
    report["tau"] = *tau;

    try {
        if (k) {
            if (h_y) report["entropy_bound"] = permutation_entropy_bound(*h_y, *tau, *k);
            const auto rb = achievable_rate_bound(*capacity, *tau, *k);
            report["k"] = *k;
            report["rate_bound"] = rb.clamped;
            report["rate_bound_raw"] = rb.raw;
            if (rate) report["pe_lower"] = fano_pe_lower_bound(*rate, *capacity, *tau, *k);
        }
        if (c) {
            if (!(*c > 0.0)) throw ConfigError("bounds: 'c' must be positive");
            const auto fixed = rate_bound_fixed_ops(*capacity, *tau, *c);
            report["c"] = *c;
            report["k_bd_log2"] = fixed.k.log2_value;
            report["k_bd_linear_or_null"] = fixed.k.linear ? json(*fixed.k.linear) : json(nullptr);
            report["argmax_l"] = fixed.k.argmax_l;
            report["rate_bound"] = std::clamp(fixed.rate_bound, 0.0, 1.0);
            report["rate_bound_raw"] = fixed.rate_bound;
            report["rate_gap_log2"] = number_or_null(fixed.gap_log2);
            if (h_y && fixed.k.linear && *tau <= *h_y)
                report["entropy_bound"] = permutation_entropy_bound(*h_y, *tau, std::max(1.0, *fixed.k.linear));
            if (rate) {
                const double delta = *rate - fixed.rate_bound;
                report["pe_lower"] = delta <= 0.0 ? 0.0 : (delta >= 1.0 ? 0.5 : inverse_binary_entropy(delta));
            }
        }
        if (eps) {
            if (!(*eps > 0.0) || !(*tau > 0.0)) throw ConfigError("bounds: 'eps' and 'tau' must be positive for c_min");
            const double cmin = min_ops_per_bit(*eps, *tau);
            report["eps"] = *eps;
            report["c_min"] = cmin;
            report["k_bd_log2_at_cmin"] = k_bd(cmin).log2_value;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bounds: ") + e.what());
    }
    out << report.dump(2) << '\n';
    return kOk;
}

// c_min curves over an eps grid for each tau in a list.
inline int cmd_sweep(const json& cfg, std::ostream& out) {
    if (!cfg.contains("eps_grid")) throw ConfigError("sweep: 'eps_grid' is required");
    std::vector<double> taus;
    if (cfg.contains("tau_grid"))
        taus = parse_number_list(cfg.at("tau_grid"));
    else if (cfg.contains("tau"))
        taus = {get_number(cfg, "tau")};
    else
        throw ConfigError("sweep: 'tau_grid' or 'tau' is required");
    write_cmin_curve(out, cfg, parse_log_grid(cfg.at("eps_grid")), taus);
    return kOk;
}

inline SimulationConfig simulation_config(const json& cfg) {
    if (!cfg.contains("channel")) throw ConfigError("simulate: 'channel' is required");
    if (!cfg.contains("ensemble")) throw ConfigError("simulate: 'ensemble' is required");
    SimulationConfig sc{.ensemble = parse_ensemble(cfg.at("ensemble")), .channel = parse_channel(cfg.at("channel"))};
    sc.n = get_count(cfg, "n", 0);
    if (sc.n == 0) throw ConfigError("simulate: 'n' is required");
    sc.iterations = static_cast<int>(get_count(cfg, "iterations", 0));
    if (sc.iterations < 1) throw ConfigError("simulate: 'iterations' must be at least 1");
    sc.trials = get_count(cfg, "trials", 1);
    if (sc.trials < 1) throw ConfigError("simulate: 'trials' must be at least 1");
    sc.seed = get_count(cfg, "seed", 0);
    sc.threads = static_cast<unsigned>(get_count(cfg, "threads", 1));
    sc.family = parse_family(cfg);
    sc.profile_nodes = get_count(cfg, "profile_nodes", 16);
    return sc;
}

inline void write_trace_csv(std::ostream& out, const json& cfg, const DecodeTrace& trace) {
    write_csv_preamble(out, cfg, "l,pe,tau_hat,tau_stderr,ops_total,ops_per_info_bit");
    for (const auto& r : trace.iterations) {
        out << r.l << ',' << format_number(r.pe) << ',' << format_number(r.tau_hat) << ','
            << format_number(r.tau_stderr) << ',' << format_number(r.ops_total) << ','
            << format_number(r.ops_per_info_bit) << '\n';
    }
}

// Bounds-compatible summary of a simulation: measured tau_l with the sampled
// node-maximum neighborhood size k_l, and the resulting tightened bounds.
inline json simulation_summary(const json& cfg, const SimulationConfig& sc, const SimulationResult& res) {
    json s;
    s["meta"] = meta(cfg);
    s["capacity"] = res.channel.capacity;
    s["output_entropy"] = res.channel.output_entropy;
    s["rate"] = res.trace.rate;
    s["pe_basis"] = "bit-error probability";
    s["k_basis"] = "sampled node-maximum neighborhood size plus one";
    if (sc.channel.is_bec()) s["bec_outside_validity"] = true;
    s["graph_reseeds"] = res.graph_retries;
    json rows = json::array();
    std::vector<std::pair<double, double>> schedule;
    for (std::size_t l = 0; l < res.trace.iterations.size(); ++l) {
        const auto& r = res.trace.iterations[l];
        const double tau = std::clamp(r.tau_hat, 0.0, res.channel.output_entropy);
        const double k = static_cast<double>(res.neighborhoods.k_max[l]) + 1.0;
        rows.push_back({{"l", r.l},
                        {"tau_hat", r.tau_hat},
                        {"tau_stderr", r.tau_stderr},
                        {"k_mean", res.neighborhoods.k_mean[l]},
                        {"k_max", res.neighborhoods.k_max[l]},
                        {"tree_fraction", res.neighborhoods.tree_fraction[l]},
                        {"nominal_k_estimate", nominal_k_estimate(sc.ensemble.alpha, sc.ensemble.beta, r.l)},
                        {"entropy_bound", permutation_entropy_bound(res.channel.output_entropy, tau, k)}});
        schedule.emplace_back(tau, k);
    }
    s["iterations"] = rows;
    // Iteration attaining the tightened bound.
    std::size_t best = 0;
    for (std::size_t l = 1; l < schedule.size(); ++l)
        if (schedule[l].first / schedule[l].second > schedule[best].first / schedule[best].second) best = l;
    const auto [tau, k] = schedule[best];
    s["l"] = static_cast<int>(best);
    s["tau"] = tau;
    s["k"] = k;
    s["entropy_bound"] = tightened_entropy_bound(res.channel.output_entropy, schedule);
    const auto rb = achievable_rate_bound(res.channel.capacity, tau, k);
    s["rate_bound"] = rb.clamped;
    s["rate_bound_raw"] = rb.raw;
    s["c"] = res.trace.iterations[best].ops_per_info_bit;
    return s;
}

inline int cmd_simulate(const json& cfg, std::ostream& out, std::ostream* summary = nullptr) {
    const SimulationConfig sc = simulation_config(cfg);
    SimulationResult res;
    try {
        res = simulate(sc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }
    write_trace_csv(out, cfg, res.trace);
    if (summary) *summary << simulation_summary(cfg, sc, res).dump(2) << '\n';
    return kOk;
}

struct VerifyInstance {
    std::string name;
    TannerGraph graph;
    double p = 0.0;
    int l = 1;
};

// Random small LDPC instances: (2,4) and (3,6) graphs on 8 and 10 variables, each over
// BSC p in p_list and depths in l_list, plus one useless-channel (p = 0.5) instance.
inline std::vector<VerifyInstance> default_verify_suite(std::uint64_t seed, const std::vector<double>& p_list,
                                                        const std::vector<int>& l_list) {
    const std::pair<int, int> shapes[] = {{2, 4}, {3, 6}};
    const std::size_t lengths[] = {8, 10};
    std::vector<VerifyInstance> suite;
    std::uint64_t index = 0;
    std::vector<std::pair<std::string, TannerGraph>> graphs;
    for (auto [dv, dc] : shapes) {
        for (std::size_t n : lengths) {
            std::size_t retries = 0;
            const auto g = detail::sample_with_retries(regular_ensemble(dv, dc), n, CodeFamily::ldpc,
                                                       derive_seed(seed, index++), retries);
            graphs.emplace_back("(" + std::to_string(dv) + "," + std::to_string(dc) + ") n=" + std::to_string(n), g);
        }
    }
    for (const auto& [name, g] : graphs)
        for (double p : p_list)
            for (int l : l_list) suite.push_back({name, g, p, l});
    suite.push_back({graphs.front().first, graphs.front().second, 0.5, 1});
    return suite;
}

inline std::vector<VerifyInstance> verify_instances(const json& cfg) {
    const std::vector<double> p_list = cfg.contains("p_list") ? parse_number_list(cfg.at("p_list"))
                                                              : std::vector<double>{0.05, 0.1, 0.2};
    std::vector<int> l_list{1, 2};
    if (cfg.contains("l_list")) {
        l_list.clear();
        for (double l : parse_number_list(cfg.at("l_list"))) l_list.push_back(static_cast<int>(l));
    }
    if (cfg.contains("graph")) {
        std::ifstream in(cfg.at("graph").get<std::string>());
        if (!in) throw ConfigError("verify: cannot open graph file");
        const TannerGraph g = read_edge_list(in);
        std::vector<VerifyInstance> suite;
        for (double p : p_list)
            for (int l : l_list) suite.push_back({"graph file", g, p, l});
        return suite;
    }
    return default_verify_suite(get_count(cfg, "seed", 0), p_list, l_list);
}

// Exact permutation-bound and Fano-chain validation on small instances.
inline int cmd_verify(const json& cfg, std::ostream& out) {
    PermutationCheckOptions opts;
    if (auto off = opt_number(cfg, "rhs_offset")) opts.rhs_offset = *off;
    if (cfg.contains("per_node")) opts.per_node = cfg.at("per_node").get<bool>();

    std::optional<ExactCode> file_code;
    if (cfg.contains("code")) {
        std::ifstream in(cfg.at("code").get<std::string>());
        if (!in) throw ConfigError("verify: cannot open code file");
        std::optional<TannerGraph> g;
        if (cfg.contains("graph")) {
            std::ifstream gin(cfg.at("graph").get<std::string>());
            if (!gin) throw ConfigError("verify: cannot open graph file");
            g = read_edge_list(gin);
        }
        file_code = read_exact_code(in, g);
        if (!file_code->graph()) throw ConfigError("verify: a code file needs an attached 'graph'");
    }

    json report;
    report["meta"] = meta(cfg);
    json rows = json::array();
    bool all_hold = true;
    bool budget = false;
    for (const auto& inst : verify_instances(cfg)) {
        json row{{"graph", inst.name}, {"p", inst.p}, {"l", inst.l}};
        try {
            const ExactCode code = file_code ? *file_code : ExactCode::from_graph(inst.graph);
            const BmsChannel ch = BmsChannel::bsc(inst.p);
            const auto check = verify_permutation_bound(code, ch, inst.l, opts);
            const auto fano = exact_fano_chain(code, ch);
            const bool identity_ok = std::abs(fano.residual()) < 1e-9;
            row["n"] = code.n();
            row["codewords"] = code.codewords().size();
            row["rate"] = code.rate();
            row["lhs"] = check.lhs;
            row["rhs"] = check.rhs;
            row["slack"] = check.slack;
            row["tau_bar"] = check.tau_bar;
            row["k_bar"] = check.k_bar;
            row["holds"] = check.holds;
            row["fano"] = {{"h_x_given_y", fano.h_x_given_y},
                           {"h_y", fano.h_y},
                           {"h_y_given_x", fano.h_y_given_x},
                           {"rate", fano.rate},
                           {"residual", fano.residual()},
                           {"identity_holds", identity_ok}};
            all_hold = all_hold && check.holds && identity_ok;
        } catch (const BudgetExceeded& e) {
            row["error"] = e.what();
            budget = true;
        }
        rows.push_back(row);
    }
    report["instances"] = rows;
    report["all_hold"] = all_hold && !budget;
    out << report.dump(2) << '\n';
    if (!all_hold) return kValidationFailure;
    return budget ? kBudgetExceeded : kOk;
}

inline void write_de_csv(std::ostream& out, const json& cfg, const DeTrajectory& traj) {
    write_csv_preamble(out, cfg, "l,x_or_perr,mean_cond_entropy,tau");
    for (const auto& p : traj.points)
        out << p.l << ',' << format_number(p.x_or_perr) << ',' << format_number(p.mean_cond_entropy) << ','
            << format_number(p.tau) << '\n';
}

// Density-evolution trajectory (exact BEC or population) or BEC threshold bisection.
inline int cmd_de(const json& cfg, std::ostream& out) {
    if (!cfg.contains("ensemble")) throw ConfigError("de: 'ensemble' is required");
    const DegreeDistribution dd = parse_ensemble(cfg.at("ensemble"));
    std::string mode = cfg.contains("mode") ? cfg.at("mode").get<std::string>() : "";
    std::optional<BmsChannel> ch;
    if (cfg.contains("channel")) ch = parse_channel(cfg.at("channel"));
    if (mode.empty()) mode = (ch && ch->is_bec()) ? "exact" : "population";

    if (mode == "threshold") {
        ThresholdOptions opts;
        opts.max_iters = static_cast<int>(get_count(cfg, "max_iters", 2000));
        if (auto t = opt_number(cfg, "target")) opts.target = *t;
        const double tol = opt_number(cfg, "tol").value_or(1e-4);
        if (!(tol > 0.0)) throw ConfigError("de: 'tol' must be positive");
        json report{{"meta", meta(cfg)},
                    {"threshold", bec_threshold(dd, tol, opts)},
                    {"tol", tol},
                    {"max_iters", opts.max_iters},
                    {"target", opts.target},
                    {"design_rate", design_rate(dd)}};
        out << report.dump(2) << '\n';
        return kOk;
    }
    if (!ch) throw ConfigError("de: 'channel' is required");
    const int iters = static_cast<int>(get_count(cfg, "iterations", 50));
    if (mode == "exact") {
        if (!ch->is_bec()) throw ConfigError("de: exact mode requires a BEC channel");
        write_de_csv(out, cfg, bec_de(dd, ch->param(), iters));
        return kOk;
    }
    if (mode == "population") {
        const std::size_t pop = get_count(cfg, "pop_size", 100000);
        if (pop < 1000) throw ConfigError("de: 'pop_size' must be at least 1000");
        write_de_csv(out, cfg, population_de(dd, *ch, iters, pop, get_count(cfg, "seed", 0)));
        return kOk;
    }
    throw ConfigError("de: mode must be 'exact', 'population' or 'threshold'");
}

// Dispatches a subcommand, mapping failures to exit codes and messages on `err`.
inline int run_command(const std::string& name, const json& cfg, std::ostream& out, std::ostream& err,
                       std::ostream* summary = nullptr) {
    try {
        if (name == "bounds") return cmd_bounds(cfg, out);
        if (name == "sweep") return cmd_sweep(cfg, out);
        if (name == "simulate") return cmd_simulate(cfg, out, summary);
        if (name == "verify") return cmd_verify(cfg, out);
        if (name == "de") return cmd_de(cfg, out);
        err << "unknown subcommand '" << name << "'\n";
        return kInvalidConfig;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kBudgetExceeded;
    } catch (const json::exception& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const GraphConstructionError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }
}

}  // namespace bpbound::cli
