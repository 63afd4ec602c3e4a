#include "aggsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "aggsim/errors.hpp"

namespace aggsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& where, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    raise(ErrorCode::parse, where + ": not a number: '" + v + "'");
  return x;
}

long parse_long(const std::string& where, const std::string& v) {
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    raise(ErrorCode::parse, where + ": not an integer: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& where, const std::string& v) {
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    raise(ErrorCode::parse, where + ": not an unsigned integer: '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& where,
                                      const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(where, s));
  return out;
}

std::vector<long> parse_long_list(const std::string& where,
                                  const std::string& v) {
  std::vector<long> out;
  for (const auto& s : split_list(v)) out.push_back(parse_long(where, s));
  return out;
}

bool parse_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  raise(ErrorCode::parse, where + ": not a boolean: '" + v + "'");
}

void set_key(ExperimentConfig& cfg, const std::string& section,
             const std::string& key, const std::string& value) {
  const std::string where = "[" + section + "] " + key;

  if (section == "experiment") {
    if (key == "scenario") {
      if (value == "remark1")
        cfg.scenario = ScenarioKind::remark1;
      else if (value == "congestion")
        cfg.scenario = ScenarioKind::congestion;
      else if (value == "pev")
        cfg.scenario = ScenarioKind::pev;
      else
        raise(ErrorCode::parse, where + ": unknown scenario '" + value + "'");
    } else if (key == "sizes") {
      cfg.sizes = parse_long_list(where, value);
    } else if (key == "replicates") {
      cfg.replicates = static_cast<int>(parse_long(where, value));
    } else if (key == "thresholds") {
      cfg.thresholds = parse_double_list(where, value);
    } else if (key == "base_seed") {
      cfg.base_seed = parse_u64(where, value);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_long(where, value));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "run_size") {
      cfg.run_size = parse_long(where, value);
    } else if (key == "format") {
      if (value == "csv")
        cfg.format = OutputFormat::csv;
      else if (value == "json")
        cfg.format = OutputFormat::json;
      else
        raise(ErrorCode::parse, where + ": unknown format '" + value + "'");
    } else {
      raise(ErrorCode::parse, where + ": unknown key");
    }
    return;
  }

  if (section == "coordinator") {
    auto& co = cfg.coordinator;
    if (key == "eps_factor")
      co.eps_factor = parse_double(where, value);
    else if (key == "eps_abs")
      co.eps_abs = parse_double(where, value);
    else if (key == "tight_beta")
      co.tight_beta = parse_bool(where, value);
    else if (key == "schedule") {
      if (value == "constant")
        co.mann_schedule = false;
      else if (value == "mann")
        co.mann_schedule = true;
      else
        raise(ErrorCode::parse, where + ": unknown schedule '" + value + "'");
    } else if (key == "alpha")
      co.alpha_bar = parse_double(where, value);
    else if (key == "tol")
      co.tol = parse_double(where, value);
    else if (key == "max_iter")
      co.max_iter = parse_long(where, value);
    else if (key == "cert_tol")
      co.cert_tol = parse_double(where, value);
    else
      raise(ErrorCode::parse, where + ": unknown key");
    return;
  }

  if (section == "remark1") {
    if (key == "k_gain")
      cfg.remark1_k_gain = parse_double(where, value);
    else
      raise(ErrorCode::parse, where + ": unknown key");
    return;
  }

  if (section == "congestion") {
    auto& p = cfg.congestion;
    if (key == "n")
      p.n = static_cast<int>(parse_long(where, value));
    else if (key == "beta_e")
      p.beta_e = parse_double(where, value);
    else if (key == "caps")
      p.caps = parse_double_list(where, value);
    else if (key == "xi_max")
      p.xi_max = parse_double(where, value);
    else if (key == "w")
      p.w = parse_double(where, value);
    else if (key == "k_gain")
      p.k_gain = parse_double(where, value);
    else
      raise(ErrorCode::parse, where + ": unknown key");
    return;
  }

  if (section == "pev") {
    auto& p = cfg.pev;
    if (key == "n")
      p.n = static_cast<int>(parse_long(where, value));
    else if (key == "q_center")
      p.q_center = parse_double(where, value);
    else if (key == "q_halfwidth")
      p.q_halfwidth = parse_double(where, value);
    else if (key == "c_center")
      p.c_center = parse_double(where, value);
    else if (key == "c_halfwidth")
      p.c_halfwidth = parse_double(where, value);
    else if (key == "gamma_center")
      p.gamma_center = parse_double(where, value);
    else if (key == "gamma_halfwidth")
      p.gamma_halfwidth = parse_double(where, value);
    else if (key == "a")
      p.price_slope = parse_double(where, value);
    else if (key == "b")
      p.price_base = parse_double(where, value);
    else if (key == "d_profile")
      p.d_profile = parse_double_list(where, value);
    else if (key == "caps")
      p.caps = parse_double_list(where, value);
    else if (key == "v2g_frac")
      p.v2g_frac = parse_double(where, value);
    else if (key == "zero_slot_prob")
      p.zero_slot_prob = parse_double(where, value);
    else if (key == "slot_level")
      p.slot_level = parse_double(where, value);
    else if (key == "k_gain")
      p.k_gain = parse_double(where, value);
    else
      raise(ErrorCode::parse, where + ": unknown key");
    return;
  }

  raise(ErrorCode::parse, "unknown section [" + section + "]");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty())
    raise(ErrorCode::parse, "config: sizes must be nonempty");
  for (long s : cfg.sizes)
    if (s < 1) raise(ErrorCode::parse, "config: sizes must be positive");
  if (cfg.replicates < 1)
    raise(ErrorCode::parse, "config: replicates must be positive");
  if (cfg.thresholds.empty())
    raise(ErrorCode::parse, "config: thresholds must be nonempty");
  for (std::size_t k = 1; k < cfg.thresholds.size(); ++k)
    if (!(cfg.thresholds[k] < cfg.thresholds[k - 1]))
      raise(ErrorCode::parse, "config: thresholds must be strictly decreasing");
  if (cfg.workers < 1)
    raise(ErrorCode::parse, "config: workers must be positive");
  if (!cfg.coordinator.eps_abs &&
      !(cfg.coordinator.eps_factor > 0.0 && cfg.coordinator.eps_factor < 1.0))
    raise(ErrorCode::parse, "config: eps_factor must lie in (0, 1)");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        raise(ErrorCode::parse,
              "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      raise(ErrorCode::parse,
            "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      raise(ErrorCode::parse,
            "line " + std::to_string(lineno) + ": key outside any section");
    set_key(cfg, section, key, value);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io, "cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
  std::size_t dot = dotted_key.find('.');
  if (dot == std::string::npos)
    raise(ErrorCode::parse, "override key must be section.key: " + dotted_key);
  set_key(cfg, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
  validate(cfg);
}

std::string ExperimentConfig::scenario_name() const {
  switch (scenario) {
    case ScenarioKind::remark1:
      return "remark1";
    case ScenarioKind::congestion:
      return "congestion";
    case ScenarioKind::pev:
      return "pev";
  }
  return "unknown";
}

std::pair<GamePopulation, Scenario> ExperimentConfig::build(
    long size, std::uint64_t seed) const {
  std::pair<GamePopulation, Scenario> built = [&] {
    switch (scenario) {
      case ScenarioKind::congestion:
        return build_congestion(size, seed, congestion);
      case ScenarioKind::pev:
        return build_pev(size, seed, pev);
      case ScenarioKind::remark1:
      default:
        return build_remark1(remark1_k_gain);
    }
  }();
  built.second.coordinator = coordinator;
  return built;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = {{"scenario", scenario_name()},
                     {"sizes", sizes},
                     {"replicates", replicates},
                     {"thresholds", thresholds},
                     {"base_seed", base_seed},
                     {"workers", workers},
                     {"out", out_dir},
                     {"run_size", run_size},
                     {"format", format == OutputFormat::csv ? "csv" : "json"}};
  j["coordinator"] = {
      {"eps_factor", coordinator.eps_factor},
      {"eps_abs", coordinator.eps_abs ? nlohmann::json(*coordinator.eps_abs)
                                      : nlohmann::json()},
      {"tight_beta", coordinator.tight_beta},
      {"schedule", coordinator.mann_schedule ? "mann" : "constant"},
      {"alpha", coordinator.alpha_bar},
      {"tol", coordinator.tol},
      {"max_iter", coordinator.max_iter},
      {"cert_tol", coordinator.cert_tol}};
  j["remark1"] = {{"k_gain", remark1_k_gain}};
  j["congestion"] = {{"n", congestion.n},       {"beta_e", congestion.beta_e},
                     {"caps", congestion.caps}, {"xi_max", congestion.xi_max},
                     {"w", congestion.w},       {"k_gain", congestion.k_gain}};
  j["pev"] = {{"n", pev.n},
              {"q_center", pev.q_center},
              {"q_halfwidth", pev.q_halfwidth},
              {"c_center", pev.c_center},
              {"c_halfwidth", pev.c_halfwidth},
              {"gamma_center", pev.gamma_center},
              {"gamma_halfwidth", pev.gamma_halfwidth},
              {"a", pev.price_slope},
              {"b", pev.price_base},
              {"d_profile", pev.d_profile},
              {"caps", pev.caps},
              {"v2g_frac", pev.v2g_frac},
              {"zero_slot_prob", pev.zero_slot_prob},
              {"slot_level", pev.slot_level},
              {"k_gain", pev.k_gain}};
  return j.dump(2);
}

}  // namespace aggsim
