#include "nap/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "nap/errors.hpp"

namespace nap {

namespace {

int line_of(const YAML::Node& node) {
  const int line = node.Mark().line;
  return line < 0 ? 1 : line + 1;
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key, const std::string& source) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(source, line_of(node), "invalid value for '" + key + "'");
  }
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key, const std::string& source) {
  std::vector<double> out;
  if (node.IsScalar()) {
    out.push_back(scalar<double>(node, key, source));
  } else if (node.IsSequence()) {
    for (const auto& item : node) {
      out.push_back(scalar<double>(item, key, source));
    }
  } else {
    throw ConfigError(source, line_of(node), "'" + key + "' must be a number or a list of numbers");
  }
  if (out.empty()) {
    throw ConfigError(source, line_of(node), "'" + key + "' must not be empty");
  }
  return out;
}

ParameterSchedule schedule_from(const YAML::Node& node, double duration, const std::string& name,
                                const std::string& source) {
  if (node.IsScalar()) {
    return ParameterSchedule::constant(scalar<double>(node, name, source), duration);
  }
  if (!node.IsMap() || !node["kind"]) {
    throw ConfigError(source, line_of(node), "schedule '" + name + "' needs a number or a map with 'kind'");
  }
  const auto kind = scalar<std::string>(node["kind"], "kind", source);
  auto get = [&](const char* key, std::optional<double> fallback) {
    if (node[key]) {
      return scalar<double>(node[key], key, source);
    }
    if (!fallback) {
      throw ConfigError(source, line_of(node), "schedule '" + name + "' is missing '" + key + "'");
    }
    return *fallback;
  };
  try {
    if (kind == "constant") {
      return ParameterSchedule::constant(get("value", std::nullopt), duration);
    }
    if (kind == "cosine_ramp") {
      std::optional<double> period;
      if (node["period"]) {
        period = get("period", std::nullopt);
      }
      return ParameterSchedule::cosine_ramp(get("amplitude", std::nullopt), duration, get("offset", 0.0),
                                            get("shift", 0.0), period);
    }
    if (kind == "linear_ramp") {
      return ParameterSchedule::linear_ramp(get("start", std::nullopt), get("slope", 0.0), duration);
    }
    if (kind == "sampled") {
      if (!node["times"] || !node["values"]) {
        throw ConfigError(source, line_of(node), "sampled schedule '" + name + "' needs 'times' and 'values'");
      }
      std::vector<double> times = number_list(node["times"], "times", source);
      std::vector<double> values = number_list(node["values"], "values", source);
      ParameterSchedule s = ParameterSchedule::sampled(std::move(times), std::move(values));
      if (std::abs(s.duration() - duration) > 1e-12 * std::max(1.0, duration)) {
        throw ConfigError(source, line_of(node), "sampled schedule '" + name + "' must end at the step duration");
      }
      return s;
    }
  } catch (const DomainError& e) {
    throw ConfigError(source, line_of(node), e.what());
  }
  throw ConfigError(source, line_of(node["kind"]), "unknown schedule kind '" + kind + "'");
}

nlohmann::json to_json(const YAML::Node& node) {
  if (node.IsMap()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& kv : node) {
      j[kv.first.as<std::string>()] = to_json(kv.second);
    }
    return j;
  }
  if (node.IsSequence()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& item : node) {
      j.push_back(to_json(item));
    }
    return j;
  }
  if (node.IsScalar()) {
    const std::string s = node.Scalar();
    if (node.Tag() != "!") {
      double d = 0.0;
      if (YAML::convert<double>::decode(node, d)) {
        return d;
      }
      bool b = false;
      if (YAML::convert<bool>::decode(node, b)) {
        return b;
      }
    }
    return s;
  }
  return nullptr;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) {
    throw ConfigError(source, 1, "configuration must be a key/value mapping");
  }
  static const std::set<std::string> known{"protocol", "qubits", "mode",   "duration",       "grid",
                                           "boundary", "kappa_T", "kappa_over_omega", "omega_T",
                                           "coupling_ratio", "output", "seed", "schedules"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) {
      throw ConfigError(source, line_of(kv.first), "unknown key '" + key + "'");
    }
  }
  for (const char* key : {"protocol", "duration"}) {
    if (!root[key]) {
      throw ConfigError(source, line_of(root), std::string("missing required key '") + key + "'");
    }
  }

  RunConfig c;
  c.source = source;
  c.echo = to_json(root);
  c.protocol = scalar<std::string>(root["protocol"], "protocol", source);
  if (c.protocol != "bell" && c.protocol != "bell-reverse" && c.protocol != "ghz") {
    throw ConfigError(source, line_of(root["protocol"]), "protocol must be bell, bell-reverse or ghz");
  }
  c.qubits = c.protocol == "ghz" ? 3 : 2;
  if (root["qubits"]) {
    const int q = scalar<int>(root["qubits"], "qubits", source);
    const bool ok = c.protocol == "ghz" ? (q >= 3 && q <= 12) : q == 2;
    if (!ok) {
      throw ConfigError(source, line_of(root["qubits"]),
                        c.protocol == "ghz" ? "ghz needs 3..12 qubits" : "Bell protocols use 2 qubits");
    }
    c.qubits = static_cast<std::size_t>(q);
  }
  if (root["mode"]) {
    const auto mode = scalar<std::string>(root["mode"], "mode", source);
    if (mode == "effective") {
      c.mode = HamiltonianMode::Effective;
    } else if (mode == "rotating-frame") {
      c.mode = HamiltonianMode::RotatingFrame;
    } else {
      throw ConfigError(source, line_of(root["mode"]), "mode must be effective or rotating-frame");
    }
  }
  c.duration = scalar<double>(root["duration"], "duration", source);
  if (!(c.duration > 0.0)) {
    throw ConfigError(source, line_of(root["duration"]), "duration must be positive");
  }
  if (root["grid"]) {
    const long g = scalar<long>(root["grid"], "grid", source);
    if (g < 1) {
      throw ConfigError(source, line_of(root["grid"]), "grid must be a positive step count");
    }
    c.grid = static_cast<std::size_t>(g);
  }
  if (root["boundary"]) {
    const auto b = scalar<std::string>(root["boundary"], "boundary", source);
    if (b != "caption" && b != "text") {
      throw ConfigError(source, line_of(root["boundary"]), "boundary must be caption or text");
    }
    c.boundary = b == "caption" ? BoundaryChoice::Caption : BoundaryChoice::Text;
  }
  if (root["omega_T"]) {
    c.omega_T = scalar<double>(root["omega_T"], "omega_T", source);
    if (!(*c.omega_T > 0.0)) {
      throw ConfigError(source, line_of(root["omega_T"]), "omega_T must be positive");
    }
  }
  if (root["coupling_ratio"]) {
    c.coupling_ratio = scalar<double>(root["coupling_ratio"], "coupling_ratio", source);
    if (c.coupling_ratio < 0.0) {
      throw ConfigError(source, line_of(root["coupling_ratio"]), "coupling_ratio must be non-negative");
    }
  }
  if (root["kappa_T"] && root["kappa_over_omega"]) {
    throw ConfigError(source, line_of(root["kappa_over_omega"]), "give either kappa_T or kappa_over_omega");
  }
  if (root["kappa_T"]) {
    c.kappa_T = number_list(root["kappa_T"], "kappa_T", source);
  }
  if (root["kappa_over_omega"]) {
    if (!c.omega_T) {
      throw ConfigError(source, line_of(root["kappa_over_omega"]), "kappa_over_omega needs omega_T");
    }
    c.kappa_over_omega = number_list(root["kappa_over_omega"], "kappa_over_omega", source);
    c.kappa_T.clear();
    for (double r : *c.kappa_over_omega) {
      c.kappa_T.push_back(r * *c.omega_T);
    }
  }
  for (double k : c.kappa_T) {
    if (k < 0.0) {
      throw ConfigError(source, line_of(root[root["kappa_T"] ? "kappa_T" : "kappa_over_omega"]),
                        "decay rates must be non-negative");
    }
  }
  if (c.mode == HamiltonianMode::RotatingFrame && !c.omega_T) {
    throw ConfigError(source, line_of(root["mode"]), "rotating-frame mode needs omega_T");
  }
  if (root["output"]) {
    c.output = scalar<std::string>(root["output"], "output", source);
  }
  if (root["seed"]) {
    c.seed = scalar<std::uint64_t>(root["seed"], "seed", source);
  }
  if (root["schedules"]) {
    const YAML::Node schedules = root["schedules"];
    if (!schedules.IsMap()) {
      throw ConfigError(source, line_of(schedules), "'schedules' must map step names to symbol maps");
    }
    for (const auto& step : schedules) {
      const auto name = step.first.as<std::string>();
      std::size_t number = 0;
      if (name.rfind("step", 0) == 0) {
        try {
          number = std::stoul(name.substr(4));
        } catch (const std::exception&) {
          number = 0;
        }
      }
      if (number == 0 || !step.second.IsMap()) {
        throw ConfigError(source, line_of(step.first), "schedule overrides are keyed step1, step2, ...");
      }
      for (const auto& sym : step.second) {
        const auto symbol_name = sym.first.as<std::string>();
        c.overrides[number].insert_or_assign(symbol_name,
                                             schedule_from(sym.second, c.duration, symbol_name, source));
      }
    }
  }
  try {
    build_plan(c);
  } catch (const Error& e) {
    const YAML::Node anchor = root["schedules"] ? root["schedules"] : root["protocol"];
    throw ConfigError(source, line_of(anchor), e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path, 0, "cannot open configuration file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

ProtocolPlan build_plan(const RunConfig& config) {
  if (config.protocol == "bell") {
    return plan_bell(config.duration, config.boundary, config.grid, config.overrides);
  }
  if (config.protocol == "bell-reverse") {
    return plan_bell_reverse(config.duration, config.grid, config.overrides);
  }
  return plan_ghz(config.qubits, config.duration, config.grid, config.overrides);
}

QubitModel model_for(const RunConfig& config, double kappa_T) {
  QubitModel m;
  m.count = config.qubits;
  m.omega_T = config.omega_T;
  m.coupling_ratio = config.coupling_ratio;
  m.kappa_T = kappa_T;
  return m;
}

}  // namespace nap
