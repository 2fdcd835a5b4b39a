#include "bmv/config_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace bmv {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& text, int line) {
  // strtod rather than from_chars: libstdc++ 11 lacks floating from_chars on some targets.
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    parse_fail(line, "not a number: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    parse_fail(line, "not an integer: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_number(token, line));
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

}  // namespace

RawConfig parse_config(std::istream& in) {
  RawConfig cfg;
  cfg.policy.queue_cap = kDefaultQueueCap;
  bool saw_idle = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));

    if (key == "lambda") {
      cfg.traffic.lambda = parse_number(value, line);
    } else if (key == "mu") {
      cfg.traffic.mu = parse_number(value, line);
    } else if (key == "cap") {
      cfg.policy.queue_cap = parse_int(value, line);
    } else if (key == "policy") {
      auto kind = parse_policy_kind(value);
      if (!kind) parse_fail(line, "unknown policy '" + value + "'");
      cfg.policy.kind = *kind;
    } else if (key == "stage_lengths") {
      cfg.policy.stage_lengths = parse_list(value, line);
    } else if (key == "stage_powers") {
      cfg.power.stage_powers = parse_list(value, line);
    } else if (key == "p_active") {
      cfg.power.p_active = parse_number(value, line);
    } else if (key == "p_idle") {
      cfg.power.p_idle = parse_number(value, line);
      saw_idle = true;
    } else if (key == "n_threshold") {
      cfg.policy.n_threshold = parse_int(value, line);
    } else {
      parse_fail(line, "unknown key '" + key + "'");
    }
  }
  if (!saw_idle) cfg.power.p_idle = cfg.power.p_active;
  return cfg;
}

RawConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize(const RawConfig& c) {
  std::ostringstream out;
  out << "lambda = " << format_number(c.traffic.lambda) << "\n";
  out << "mu = " << format_number(c.traffic.mu) << "\n";
  out << "cap = " << c.policy.queue_cap << "\n";
  out << "policy = " << to_string(c.policy.kind) << "\n";
  out << "stage_lengths = " << format_list(c.policy.stage_lengths) << "\n";
  out << "n_threshold = " << c.policy.n_threshold << "\n";
  out << "p_active = " << format_number(c.power.p_active) << "\n";
  out << "p_idle = " << format_number(c.power.p_idle) << "\n";
  out << "stage_powers = " << format_list(c.power.stage_powers) << "\n";
  return out.str();
}

RawConfig to_raw(const ValidatedConfig& config) {
  return {config.traffic(), config.policy(), config.power()};
}

std::string serialize(const ValidatedConfig& config) { return serialize(to_raw(config)); }

ValidatedConfig validate(const RawConfig& raw) {
  return validate_config(raw.traffic, raw.policy, raw.power);
}

nlohmann::json to_json(const ValidatedConfig& config) {
  const auto& t = config.traffic();
  const auto& p = config.policy();
  const auto& w = config.power();
  nlohmann::json j;
  j["traffic"] = {{"lambda", t.lambda}, {"mu", t.mu}, {"rho", t.rho()}};
  j["policy"] = {{"kind", std::string(to_string(p.kind))},
                 {"stage_lengths", p.stage_lengths},
                 {"n_threshold", p.n_threshold},
                 {"queue_cap", p.queue_cap}};
  j["power"] = {{"p_active", w.p_active}, {"p_idle", w.p_idle}, {"stage_powers", w.stage_powers}};
  return j;
}

}  // namespace bmv
