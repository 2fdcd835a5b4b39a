#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "bmv/model.hpp"

namespace bmv {

/// Unvalidated config as read from a file or flags.
struct RawConfig {
  TrafficModel traffic;
  PolicyConfig policy;
  PowerProfile power;
};

// Flat key-value grammar, one entry per line:
//
//   line    := (blank | entry) comment?
//   comment := '#' any*
//   entry   := key ws* '=' ws* value
//   key     := lambda | mu | cap | policy | stage_lengths | stage_powers
//            | p_active | p_idle | n_threshold
//   value   := number | list | policy-name
//   list    := number ((',' | ws)+ number)*
//
// Unknown keys and malformed numbers raise ParseError with the line number.
// A missing p_idle defaults to p_active; a missing cap defaults to 50.
RawConfig parse_config(std::istream& in);
RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::string& path);

std::string serialize(const RawConfig& config);
std::string serialize(const ValidatedConfig& config);

RawConfig to_raw(const ValidatedConfig& config);
ValidatedConfig validate(const RawConfig& raw);

nlohmann::json to_json(const ValidatedConfig& config);

}  // namespace bmv
