#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "iemo/algorithms.hpp"

namespace iemo {

/// Invalid configuration value; `field` is the dotted path of the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Builds a RunConfig from a JSON object. Accepted keys:
///   algorithm, problem {family, m, n}, N, max_fe, tau, warmup_gens, mu, eta_step,
///   guidance, seed, record_margin,
///   train {learning_rate, epochs, hidden_dim, sigma, init_range},
///   variation {p_c, eta_c, p_m, eta_m}, moead {neighborhood, delta_nb, replacement_cap}.
/// Only `problem` is required; everything else falls back to RunConfig::defaults, with
/// max_fe = 300 N and warmup_gens = 3 tau derived from the values actually given.
/// Unknown keys are rejected. `prefix` is prepended to field names in errors.
RunConfig run_config_from_json(const nlohmann::json& j, std::string_view prefix = "");

nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json to_json(const Solution& s);
nlohmann::json to_json(const Population& pop);
nlohmann::json to_json(const ComparisonRecord& r);
nlohmann::json to_json(const GenerationTrace& t);
nlohmann::json to_json(const Consultation& c);

ComparisonRecord comparison_record_from_json(const nlohmann::json& j);

/// Throws ConfigError when `j` is not an object or has keys outside `allowed`.
void require_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed, std::string_view prefix);

/// 64-bit FNV-1a of a string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace iemo
