#pragma once

// Key/value view of the model configurations: shared by config files,
// `--set key=value` overrides and sweep axes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "tribesim/error.hpp"
#include "tribesim/reinforcement.hpp"
#include "tribesim/tribes.hpp"

namespace tribesim {

using AnyConfig = std::variant<Model1Config, Model2Config>;
using Setting = std::pair<std::string, std::string>;

inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace detail {

[[noreturn]] inline void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw Error(ErrorCode::validation_error,
                std::string(key) + ": cannot read '" + std::string(value) + "' as " + std::string(expected));
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::uint64_t parse_u64(std::string_view key, std::string_view v) {
    v = trim(v);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "a nonnegative integer");
    return out;
}

inline std::size_t parse_size(std::string_view key, std::string_view v) {
    return static_cast<std::size_t>(parse_u64(key, v));
}

inline double parse_double(std::string_view key, std::string_view v) {
    v = trim(v);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
        bad_value(key, v, "a finite number");
    }
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "a boolean");
}

inline std::string_view strip_section(std::string_view key) {
    if (key.starts_with("bb.")) key.remove_prefix(3);
    return key;
}

// Keys understood by both models. Returns false when `key` is not one of them.
template <typename Config>
bool apply_common(Config& c, std::string_view key, std::string_view value) {
    if (key == "n") c.n = parse_size(key, value);
    else if (key == "shocks") c.shocks = parse_size(key, value);
    else if (key == "periods") c.periods = parse_size(key, value);
    else if (key == "replications") c.replications = parse_size(key, value);
    else if (key == "seed") c.master_seed = parse_u64(key, value);
    else if (key == "m0") c.bb.m0 = parse_size(key, value);
    else if (key == "m") c.bb.m = parse_size(key, value);
    else if (key == "shuffle_arrivals") c.bb.shuffle_arrivals = parse_bool(key, value);
    else return false;
    return true;
}

}  // namespace detail

inline const char* to_string(ShockMode m) { return m == ShockMode::fixed_ratio ? "fixed-ratio" : "fixed-shocks"; }
inline const char* to_string(SimilarityKernel k) { return k == SimilarityKernel::ingroup ? "ingroup" : "reciprocal"; }
inline const char* to_string(KeeperRule r) { return r == KeeperRule::uniform ? "uniform" : "protect-last-edge"; }

inline const char* model_name(const Model1Config&) { return "reinforcement"; }
inline const char* model_name(const Model2Config&) { return "tribes"; }

/// Sets one field from its textual form. Unknown keys and unreadable values
/// raise validation-error naming the key; range checks are left to validate().
inline void apply_setting(Model1Config& c, std::string_view key, std::string_view value) {
    key = detail::strip_section(detail::trim(key));
    value = detail::trim(value);
    if (detail::apply_common(c, key, value)) return;
    if (key == "p") c.scheme.p = detail::parse_double(key, value);
    else if (key == "reward") c.scheme.reward = detail::parse_double(key, value);
    else if (key == "initial_fitness") c.initial_fitness = detail::parse_double(key, value);
    else if (key == "ratio") c.ratio = detail::parse_double(key, value);
    else if (key == "mode") {
        if (value == "fixed-shocks") c.mode = ShockMode::fixed_shocks;
        else if (value == "fixed-ratio") c.mode = ShockMode::fixed_ratio;
        else detail::bad_value(key, value, "fixed-shocks or fixed-ratio");
    } else if (key == "model") {
        if (value != "reinforcement") detail::bad_value(key, value, "reinforcement");
    } else {
        throw Error(ErrorCode::validation_error, "unknown key '" + std::string(key) + "' for the reinforcement model");
    }
}

inline void apply_setting(Model2Config& c, std::string_view key, std::string_view value) {
    key = detail::strip_section(detail::trim(key));
    value = detail::trim(value);
    if (detail::apply_common(c, key, value)) return;
    if (key == "alpha") c.alpha = detail::parse_double(key, value);
    else if (key == "epsilon") c.epsilon = detail::parse_double(key, value);
    else if (key == "out_weight") c.out_weight = detail::parse_double(key, value);
    else if (key == "group_gap") c.group_gap = detail::parse_double(key, value);
    else if (key == "strict_eq4") c.strict_eq4 = detail::parse_bool(key, value);
    else if (key == "revive_isolated") c.revive_isolated = detail::parse_bool(key, value);
    else if (key == "kernel") {
        if (value == "reciprocal") c.kernel = SimilarityKernel::reciprocal;
        else if (value == "ingroup") c.kernel = SimilarityKernel::ingroup;
        else detail::bad_value(key, value, "reciprocal or ingroup");
    } else if (key == "keeper_rule") {
        if (value == "uniform") c.keeper_rule = KeeperRule::uniform;
        else if (value == "protect-last-edge") c.keeper_rule = KeeperRule::protect_last_edge;
        else detail::bad_value(key, value, "uniform or protect-last-edge");
    } else if (key == "model") {
        if (value != "tribes") detail::bad_value(key, value, "tribes");
    } else {
        throw Error(ErrorCode::validation_error, "unknown key '" + std::string(key) + "' for the tribes model");
    }
}

inline void apply_setting(AnyConfig& c, std::string_view key, std::string_view value) {
    std::visit([&](auto& cfg) { apply_setting(cfg, key, value); }, c);
}

inline void validate(const AnyConfig& c) {
    std::visit([](const auto& cfg) { validate(cfg); }, c);
}

/// Every effective parameter in a fixed order, seed excluded.
inline std::vector<Setting> describe(const Model1Config& c) {
    return {
        {"model", "reinforcement"},
        {"n", std::to_string(c.n)},
        {"mode", to_string(c.mode)},
        {"shocks", std::to_string(effective_shocks(c))},
        {"ratio", format_double(c.ratio)},
        {"periods", std::to_string(c.periods)},
        {"p", format_double(c.scheme.p)},
        {"reward", format_double(c.scheme.reward)},
        {"initial_fitness", format_double(c.initial_fitness)},
        {"m0", std::to_string(c.bb.m0)},
        {"m", std::to_string(c.bb.m)},
        {"shuffle_arrivals", c.bb.shuffle_arrivals ? "true" : "false"},
        {"replications", std::to_string(c.replications)},
    };
}

inline std::vector<Setting> describe(const Model2Config& c) {
    return {
        {"model", "tribes"},
        {"n", std::to_string(c.n)},
        {"shocks", std::to_string(c.shocks)},
        {"periods", std::to_string(c.periods)},
        {"alpha", format_double(c.alpha)},
        {"epsilon", format_double(c.epsilon)},
        {"kernel", to_string(c.kernel)},
        {"out_weight", format_double(c.out_weight)},
        {"group_gap", format_double(c.group_gap)},
        {"strict_eq4", c.strict_eq4 ? "true" : "false"},
        {"keeper_rule", to_string(c.keeper_rule)},
        {"revive_isolated", c.revive_isolated ? "true" : "false"},
        {"m0", std::to_string(c.bb.m0)},
        {"m", std::to_string(c.bb.m)},
        {"shuffle_arrivals", c.bb.shuffle_arrivals ? "true" : "false"},
        {"replications", std::to_string(c.replications)},
    };
}

inline std::vector<Setting> describe(const AnyConfig& c) {
    return std::visit([](const auto& cfg) { return describe(cfg); }, c);
}

/// "k1=v1;k2=v2;..." without commas, safe inside a CSV cell.
inline std::string compact(const std::vector<Setting>& settings) {
    std::string out;
    for (const auto& [k, v] : settings) {
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

}  // namespace tribesim
