#pragma once

// Config files and built-in presets.
//
// Grammar (INI style, parsed by Boost.PropertyTree):
//
//   # comment
//   ; also a comment
//   model = tribes
//   n = 80
//   epsilon = 0.5
//   [bb]
//   m0 = 3
//   m = 2
//   [sweep]
//   epsilon = 0.2, 2.0
//
// `model` (reinforcement | tribes) is optional. [sweep] is optional; each
// of its keys lists comma-separated values and the grid is their product.
//
// Comments must be on their own line. Top-level keys are the ones accepted
// by apply_setting(); keys in [bb] may also be written as bb.m0 at top
// level. When `model` is absent it is inferred from model-specific keys.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tribesim/error.hpp"
#include "tribesim/harness.hpp"
#include "tribesim/settings.hpp"

namespace tribesim {

using ConfigDocument = std::variant<Model1Config, Model2Config, SweepSpec>;

inline AnyConfig base_config(const ConfigDocument& doc) {
    if (const auto* c = std::get_if<Model1Config>(&doc)) return *c;
    if (const auto* c = std::get_if<Model2Config>(&doc)) return *c;
    return std::get<SweepSpec>(doc).base;
}

namespace detail {

inline constexpr std::array<std::string_view, 5> model1_only_keys{"p", "reward", "initial_fitness", "mode", "ratio"};
inline constexpr std::array<std::string_view, 8> model2_only_keys{
    "alpha", "epsilon", "kernel", "out_weight", "group_gap", "strict_eq4", "keeper_rule", "revive_isolated"};

inline bool contains(auto const& list, std::string_view key) {
    for (auto k : list) {
        if (k == key) return true;
    }
    return false;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace detail

/// Parses config text; `source` names the input in error messages.
inline ConfigDocument parse_config(const std::string& text, const std::string& source = "<config>") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::parse_error, source + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    std::vector<Setting> settings;
    std::vector<SweepAxis> axes;
    std::string model;
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            if (key == "model") model = detail::trim(node.data());
            else settings.emplace_back(key, node.data());
            continue;
        }
        if (key == "bb") {
            for (const auto& [k, v] : node) settings.emplace_back("bb." + k, v.data());
        } else if (key == "sweep") {
            for (const auto& [k, v] : node) axes.push_back({k, detail::split_list(v.data())});
        } else {
            throw Error(ErrorCode::validation_error, source + ": unknown section [" + key + "]");
        }
    }

    if (model.empty()) {
        bool m1 = false;
        bool m2 = false;
        auto scan = [&](const std::string& k) {
            m1 = m1 || detail::contains(detail::model1_only_keys, k);
            m2 = m2 || detail::contains(detail::model2_only_keys, k);
        };
        for (const auto& s : settings) scan(s.first);
        for (const auto& a : axes) scan(a.key);
        if (m1 == m2) {
            throw Error(ErrorCode::validation_error,
                        source + ": cannot infer the model; set model = reinforcement or model = tribes");
        }
        model = m1 ? "reinforcement" : "tribes";
    }

    AnyConfig base;
    if (model == "reinforcement") base = Model1Config{};
    else if (model == "tribes") base = Model2Config{};
    else throw Error(ErrorCode::validation_error, source + ": model must be reinforcement or tribes");

    for (const auto& [k, v] : settings) apply_setting(base, k, v);

    if (axes.empty()) {
        validate(base);
        return std::visit([](const auto& c) -> ConfigDocument { return c; }, base);
    }
    SweepSpec spec{base, axes};
    std::visit([&](const auto& c) { (void)expand_grid(c, std::span<const SweepAxis>(spec.axes)); }, spec.base);
    return spec;
}

inline ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

// Built-in presets. Shocks, periods, ratio, m0, m and group_gap are our own
// choices and are printed with each run.

inline std::vector<std::string> preset_names() {
    return {"table1", "table2", "fig3-alpha09", "fig3-alpha099", "fig4a", "fig4b", "fig4c", "fig4d"};
}

inline ConfigDocument preset(const std::string& name) {
    auto reinforcement_table = [](double p) {
        Model1Config c;
        c.scheme = {p, 0.05};
        c.shocks = 46;
        c.periods = 20;
        c.ratio = 100.0 / 46.0;
        c.replications = 1000;
        return SweepSpec{c, {{"mode", {"fixed-shocks", "fixed-ratio"}}, {"n", {"50", "100", "200", "400"}}}};
    };
    auto fig3 = [](double alpha) {
        Model2Config c;
        c.n = 80;
        c.shocks = 10;
        c.alpha = alpha;
        c.periods = 200;
        c.replications = 50;
        return SweepSpec{c, {{"epsilon", {"0.1", "0.2", "0.3", "0.5", "0.75", "1", "1.5", "2"}}}};
    };
    auto fig4 = [](double epsilon, SimilarityKernel kernel) {
        Model2Config c;
        c.n = 40;
        c.shocks = 20;
        c.alpha = 0.99;
        c.periods = 300;
        c.epsilon = epsilon;
        c.kernel = kernel;
        c.out_weight = 0.01;
        c.replications = 1;
        return c;
    };
    if (name == "table1") return reinforcement_table(1.0);
    if (name == "table2") return reinforcement_table(0.5);
    if (name == "fig3-alpha09") return fig3(0.9);
    if (name == "fig3-alpha099") return fig3(0.99);
    if (name == "fig4a") return fig4(0.5, SimilarityKernel::reciprocal);
    if (name == "fig4b") return fig4(1.5, SimilarityKernel::reciprocal);
    if (name == "fig4c") return fig4(0.5, SimilarityKernel::ingroup);
    if (name == "fig4d") return fig4(1.5, SimilarityKernel::ingroup);
    throw Error(ErrorCode::validation_error, "unknown preset '" + name + "'");
}

inline std::string preset_description(const std::string& name) {
    if (name == "table1") return "reinforcement sweep, p=1, r=0.05, fixed-shocks S=46 vs fixed-ratio n/S=100/46, T=20, R=1000";
    if (name == "table2") return "reinforcement sweep, p=0.5, r=0.05, fixed-shocks S=46 vs fixed-ratio n/S=100/46, T=20, R=1000";
    if (name == "fig3-alpha09") return "tribes epsilon sweep, n=80, S=10, alpha=0.9, T=200, R=50";
    if (name == "fig3-alpha099") return "tribes epsilon sweep, n=80, S=10, alpha=0.99, T=200, R=50";
    if (name == "fig4a") return "tribes run, n=40, S=20, alpha=0.99, T=300, epsilon=0.5, reciprocal kernel";
    if (name == "fig4b") return "tribes run, n=40, S=20, alpha=0.99, T=300, epsilon=1.5, reciprocal kernel";
    if (name == "fig4c") return "tribes run, n=40, S=20, alpha=0.99, T=300, epsilon=0.5, ingroup kernel a=0.01";
    if (name == "fig4d") return "tribes run, n=40, S=20, alpha=0.99, T=300, epsilon=1.5, ingroup kernel a=0.01";
    throw Error(ErrorCode::validation_error, "unknown preset '" + name + "'");
}

}  // namespace tribesim
