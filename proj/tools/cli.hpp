#pragma once

// tribesim command-line front end. run_cli() is kept separate from main() so
// the test suite can drive it in-process.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tribesim/config.hpp"
#include "tribesim/error.hpp"
#include "tribesim/export.hpp"
#include "tribesim/harness.hpp"
#include "tribesim/reinforcement.hpp"
#include "tribesim/settings.hpp"
#include "tribesim/tribes.hpp"

namespace tribesim::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, usage_error = 2 };

struct Options {
    std::string config;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
    std::string format = "csv";
    bool strict_eq4 = false;
    std::optional<std::size_t> replications;
    std::size_t replication = 0;
    std::string graph_format = "both";
    bool no_timestamp = false;
};

namespace detail {

inline const std::vector<std::string>& artifact_chosen() {
    static const std::vector<std::string> keys{"shocks", "periods", "ratio", "m0", "m", "group_gap",
                                               "shuffle_arrivals", "keeper_rule", "revive_isolated"};
    return keys;
}

inline ConfigDocument resolve_document(const Options& o) {
    if (!o.config.empty() && !o.preset.empty()) {
        throw Error(ErrorCode::validation_error, "--config and --preset are mutually exclusive");
    }
    if (!o.preset.empty()) return preset(o.preset);
    if (!o.config.empty()) return load_config(o.config);
    throw Error(ErrorCode::validation_error, "one of --config or --preset is required");
}

inline void apply_overrides(AnyConfig& c, const Options& o) {
    for (const std::string& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::validation_error, "--set expects key=value, got '" + kv + "'");
        apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.replications) apply_setting(c, "replications", std::to_string(*o.replications));
    if (o.strict_eq4) apply_setting(c, "strict_eq4", "true");
    validate(c);
}

inline std::uint64_t choose_seed(const Options& o, const AnyConfig& c) {
    if (o.seed) return *o.seed;
    const auto from_config = std::visit([](const auto& cfg) { return cfg.master_seed; }, c);
    if (from_config) return *from_config;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline nlohmann::json metadata(const std::string& command, const AnyConfig& c, std::uint64_t seed, const Options& o) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["master_seed"] = seed;
    meta["version"] = kVersion;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : describe(c)) cfg[k] = v;
    meta["config"] = cfg;
    meta["artifact_chosen_parameters"] = artifact_chosen();
    if (!o.no_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        meta["generated_at"] = buf;
    }
    return meta;
}

inline void announce(std::ostream& out, const AnyConfig& c, std::uint64_t seed) {
    out << "master seed: " << seed << "\n";
    out << "effective config:\n";
    for (const auto& [k, v] : describe(c)) out << "  " << k << " = " << v << "\n";
    out << "note: shocks, periods, ratio, m0, m, group_gap and the rewiring rules are tool defaults;"
           " override them with --set\n";
}

inline std::filesystem::path prepare_out(const Options& o) {
    std::filesystem::path dir(o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create output directory " + o.out + ": " + ec.message());
    return dir;
}

inline TableFormat table_format(const Options& o) { return o.format == "json" ? TableFormat::json : TableFormat::csv; }

template <typename Config>
const Config& expect_model(const AnyConfig& c, const char* command) {
    const auto* cfg = std::get_if<Config>(&c);
    if (!cfg) {
        throw Error(ErrorCode::validation_error,
                    std::string(command) + " needs a " + model_name(Config{}) + " configuration");
    }
    return *cfg;
}

inline std::vector<std::string> graph_comments(std::uint64_t seed, std::size_t replication, const AnyConfig& c) {
    return {"master_seed=" + std::to_string(seed), "replication=" + std::to_string(replication),
            "config=" + compact(describe(c))};
}

inline void write_graph(const std::filesystem::path& dir, const Options& o, const TribeMetrics& run,
                        const std::vector<std::string>& comments, std::ostream& out) {
    if (o.graph_format == "dot" || o.graph_format == "both") {
        export_dot(run.final_graph, run.final_fitness, (dir / "graph.dot").string(), comments);
        out << "wrote " << (dir / "graph.dot").string() << "\n";
    }
    if (o.graph_format == "edgelist" || o.graph_format == "both") {
        export_edge_list(run.final_graph, (dir / "graph.edges").string(), comments);
        out << "wrote " << (dir / "graph.edges").string() << "\n";
    }
}

// Subcommands ----------------------------------------------------------------

inline int run_sweep_command(const std::string& command, const Options& o, bool model1, std::ostream& out) {
    const ConfigDocument doc = resolve_document(o);
    SweepSpec spec;
    if (const auto* s = std::get_if<SweepSpec>(&doc)) spec = *s;
    else spec.base = base_config(doc);
    apply_overrides(spec.base, o);
    const std::uint64_t seed = choose_seed(o, spec.base);
    announce(out, spec.base, seed);

    SweepResult result;
    if (model1) {
        const auto points = expand_grid(expect_model<Model1Config>(spec.base, command.c_str()), spec.axes);
        result = run_model1_sweep(points, seed, o.jobs);
    } else {
        const auto points = expand_grid(expect_model<Model2Config>(spec.base, command.c_str()), spec.axes);
        result = run_model2_sweep(points, seed, o.jobs);
    }

    const auto dir = prepare_out(o);
    const auto meta = metadata(command, spec.base, seed, o);
    const std::string results = (dir / (o.format == "json" ? "results.json" : "results.csv")).string();
    write_results(result, results, table_format(o), meta);
    write_text_file((dir / "records.csv").string(), records_csv(result));
    out << "wrote " << results << "\nwrote " << (dir / "records.csv").string() << "\n";
    for (const AggregateRow& row : result.rows) {
        out << "  " << row.label << "  " << row.metric << ": "
            << (row.mean ? format_fixed(*row.mean, 4) : std::string("-")) << " (std " << format_fixed(row.std, 4)
            << ", undefined " << row.undefined << ")\n";
    }
    return ok;
}

inline int run_model1(const Options& o, std::ostream& out) {
    const ConfigDocument doc = resolve_document(o);
    if (std::holds_alternative<SweepSpec>(doc)) throw Error(ErrorCode::validation_error, "model1-run takes a single configuration, not a sweep");
    AnyConfig c = base_config(doc);
    apply_overrides(c, o);
    const Model1Config& cfg = expect_model<Model1Config>(c, "model1-run");
    const std::uint64_t seed = choose_seed(o, c);
    announce(out, c, seed);

    Rng rng(derive_seed(seed, 0, 0));
    const Model1Run run = simulate_model1(cfg, rng);
    const RunSummary s = summarize(run.final_fitness);
    const auto dir = prepare_out(o);
    const std::string cfg_text = compact(describe(c));
    write_text_file((dir / "fitness.csv").string(), fitness_csv(run.final_fitness, seed, cfg_text));

    std::string traj = "period,agent,fitness,master_seed,config\n";
    for (std::size_t t = 0; t < run.trajectory.size(); ++t) {
        for (std::size_t i = 0; i < run.trajectory[t].size(); ++i) {
            traj += std::to_string(t + 1) + "," + std::to_string(i) + "," + format_double(run.trajectory[t][i]) + "," +
                    std::to_string(seed) + "," + cfg_text + "\n";
        }
    }
    write_text_file((dir / "trajectory.csv").string(), traj);

    nlohmann::json summary;
    summary["metadata"] = metadata("model1-run", c, seed, o);
    summary["average_fit"] = s.average_fit;
    summary["max_to_median"] = s.max_to_median ? nlohmann::json(*s.max_to_median) : nlohmann::json(nullptr);
    summary["max_to_min"] = s.max_to_min ? nlohmann::json(*s.max_to_min) : nlohmann::json(nullptr);
    summary["degenerate_periods"] = run.degenerate_periods;
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");

    out << "average fit " << format_fixed(s.average_fit, 4) << ", max/median "
        << (s.max_to_median ? format_fixed(*s.max_to_median, 4) : "-") << ", max/min "
        << (s.max_to_min ? format_fixed(*s.max_to_min, 4) : "-") << "\n";
    out << "wrote fitness.csv, trajectory.csv, summary.json to " << dir.string() << "\n";
    return ok;
}

inline int run_model2(const std::string& command, const Options& o, bool graph_only, std::ostream& out) {
    const ConfigDocument doc = resolve_document(o);
    if (std::holds_alternative<SweepSpec>(doc)) throw Error(ErrorCode::validation_error, command + " takes a single configuration, not a sweep");
    AnyConfig c = base_config(doc);
    apply_overrides(c, o);
    const Model2Config& cfg = expect_model<Model2Config>(c, command.c_str());
    const std::uint64_t seed = choose_seed(o, c);
    announce(out, c, seed);

    Rng rng(derive_seed(seed, 0, o.replication));
    const TribeMetrics run = simulate_model2(cfg, rng);
    const auto dir = prepare_out(o);
    write_graph(dir, o, run, graph_comments(seed, o.replication, c), out);
    if (graph_only) return ok;

    const std::string cfg_text = compact(describe(c));
    write_text_file((dir / "periods.csv").string(), periods_csv(run.periods, seed, cfg_text));
    write_text_file((dir / "fitness.csv").string(), fitness_csv(run.final_fitness, seed, cfg_text));
    out << "wrote periods.csv, fitness.csv to " << dir.string() << "\n";
    if (!run.periods.empty()) {
        const PeriodMetrics& last = run.periods.back();
        out << "final: groups " << last.group_count << ", components " << last.component_count << ", edges "
            << run.final_graph.edge_count() << "\n";
    }
    return ok;
}

inline int list_presets(std::ostream& out) {
    for (const auto& name : preset_names()) out << name << "  " << preset_description(name) << "\n";
    return ok;
}

inline void add_common(CLI::App* cmd, Options& o, bool run_flags) {
    cmd->add_option("--config", o.config, "Config file (INI style)");
    cmd->add_option("--preset", o.preset, "Built-in preset (see `presets`)");
    cmd->add_option("--set", o.overrides, "Override key=value (repeatable)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
    cmd->add_option("--format", o.format, "Result table format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--strict-eq4", o.strict_eq4, "Use the literal |fa + fb| <= epsilon exchange condition");
    cmd->add_option("--replications", o.replications, "Override replication count");
    cmd->add_flag("--no-timestamp", o.no_timestamp, "Omit generated_at from metadata");
    if (run_flags) {
        cmd->add_option("--replication", o.replication, "Replication index whose stream is used");
        cmd->add_option("--graph-format", o.graph_format, "Graph snapshot format")
            ->check(CLI::IsMember({"dot", "edgelist", "both"}));
    }
}

}  // namespace detail

/// Exit codes: 0 success, 2 usage/config/validation error, 1 runtime error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tribesim: endogenous social network simulations"};
    app.require_subcommand(1);
    Options o;
    auto* m1run = app.add_subcommand("model1-run", "Single reinforcement-model run");
    auto* m1sweep = app.add_subcommand("model1-sweep", "Reinforcement-model Monte Carlo sweep");
    auto* m2run = app.add_subcommand("model2-run", "Single tribes-model run with graph snapshot");
    auto* m2sweep = app.add_subcommand("model2-sweep", "Tribes-model Monte Carlo sweep");
    auto* exportg = app.add_subcommand("export-graph", "Export the final tribes graph of one replication");
    auto* presets = app.add_subcommand("presets", "List built-in presets");
    detail::add_common(m1run, o, false);
    detail::add_common(m1sweep, o, false);
    detail::add_common(m2run, o, true);
    detail::add_common(m2sweep, o, false);
    detail::add_common(exportg, o, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage_error;
    }

    try {
        if (*presets) return detail::list_presets(out);
        if (*m1run) return detail::run_model1(o, out);
        if (*m1sweep) return detail::run_sweep_command("model1-sweep", o, true, out);
        if (*m2run) return detail::run_model2("model2-run", o, false, out);
        if (*m2sweep) return detail::run_sweep_command("model2-sweep", o, false, out);
        if (*exportg) return detail::run_model2("export-graph", o, true, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        const bool bad_input = e.code() == ErrorCode::validation_error || e.code() == ErrorCode::parse_error;
        return bad_input ? usage_error : runtime_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return runtime_failure;
    }
    return usage_error;
}

}  // namespace tribesim::cli
